//! Python bindings. Graphs cross the boundary as `(n, [(u, v), ...])`;
//! structured reports come back as JSON strings.

use std::sync::Arc;

use induced_core::bits::BitString;
use induced_core::diamond_listing::{list_induced_diamonds_congest, DecompositionParams, Fraction, ListingParams};
use induced_core::families::{
    build_diamond_fixture, verify_family_conditions, FamilyBuilder, FamilySpec, InputPair, VerifyOptions,
};
use induced_core::graph::{Graph, VertexSubset};
use induced_core::search;
use induced_core::twoparty::{cycle_listing_protocol, diamond_listing_protocol};
use induced_core::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Input(_) | Error::Unsupported(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn graph(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Graph> {
    Graph::from_edges(n, edges).map_err(py_err)
}

fn lists<'a>(sets: impl IntoIterator<Item = &'a VertexSubset>) -> Vec<Vec<usize>> {
    sets.into_iter().map(|s| s.members().to_vec()).collect()
}

fn spec(
    family: &str,
    n: usize,
    k: Option<usize>,
    ell: usize,
    m: usize,
    hubs: bool,
    seed: Option<u64>,
) -> PyResult<FamilySpec> {
    Ok(match family {
        "c4" => FamilySpec::C4 { n },
        "subdivided" => FamilySpec::Subdivided { n, k: k.ok_or_else(|| PyValueError::new_err("subdivided needs k"))? },
        "c8l" => FamilySpec::C8l { n, ell, m, hubs },
        "diamond" => {
            let seed = seed.ok_or_else(|| PyValueError::new_err("diamond needs seed"))?;
            FamilySpec::Diamond { fixture: Arc::new(build_diamond_fixture(n, seed).map_err(py_err)?) }
        }
        other => return Err(PyValueError::new_err(format!("unknown family {other:?}"))),
    })
}

/// All induced `k`-cycles as sorted vertex lists.
#[pyfunction]
fn induced_cycles(n: usize, edges: Vec<(usize, usize)>, k: usize) -> PyResult<Vec<Vec<usize>>> {
    let g = graph(n, edges)?;
    Ok(lists(&search::list_induced_cycles(&g, k).map_err(py_err)?))
}

#[pyfunction]
fn induced_diamonds(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Vec<Vec<usize>>> {
    let g = graph(n, edges)?;
    Ok(lists(&search::list_induced_diamonds(&g).map_err(py_err)?))
}

/// Builds a family member; `x` and `y` are 0/1 strings (zeros when omitted).
#[pyfunction]
#[pyo3(signature = (family, n, x=None, y=None, k=None, ell=1, m=0, hubs=true, seed=None))]
#[allow(clippy::too_many_arguments)]
fn build_family<'py>(
    py: Python<'py>,
    family: &str,
    n: usize,
    x: Option<&str>,
    y: Option<&str>,
    k: Option<usize>,
    ell: usize,
    m: usize,
    hubs: bool,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = spec(family, n, k, ell, m, hubs, seed)?;
    let len = spec.input_len();
    let parse = |s: Option<&str>| s.map_or(Ok(BitString::zeros(len)), BitString::parse_binary).map_err(py_err);
    let inputs = InputPair::new(parse(x)?, parse(y)?).map_err(py_err)?;
    let inst = spec.build(&inputs).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("family", inst.tag.name())?;
    d.set_item("n", inst.n())?;
    d.set_item("edges", inst.graph.edges().collect::<Vec<_>>())?;
    d.set_item("va", inst.va.members().to_vec())?;
    d.set_item("cut_edges", inst.cut_edges.clone())?;
    d.set_item("labels", inst.labels.clone())?;
    Ok(d)
}

/// Runs the family-condition sweep and returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (family, n, k=None, ell=1, m=0, hubs=true, seed=None, samples=500, sample_seed=0))]
#[allow(clippy::too_many_arguments)]
fn verify_family(
    family: &str,
    n: usize,
    k: Option<usize>,
    ell: usize,
    m: usize,
    hubs: bool,
    seed: Option<u64>,
    samples: usize,
    sample_seed: u64,
) -> PyResult<String> {
    let spec = spec(family, n, k, ell, m, hubs, seed)?;
    let opts = VerifyOptions { samples, seed: sample_seed, ..Default::default() };
    let report = verify_family_conditions(&spec, &opts).map_err(py_err)?;
    serde_json::to_string(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Two-party listing over the partition `alice`; `target` is `"diamond"` or a cycle length.
#[pyfunction]
fn two_party_listing<'py>(
    py: Python<'py>,
    n: usize,
    edges: Vec<(usize, usize)>,
    alice: Vec<usize>,
    target: &Bound<'py, PyAny>,
) -> PyResult<Bound<'py, PyDict>> {
    let g = graph(n, edges)?;
    let va = VertexSubset::new(&g, alice).map_err(py_err)?;
    let res = if let Ok(k) = target.extract::<usize>() {
        cycle_listing_protocol(&g, &va, k)
    } else if target.extract::<String>().is_ok_and(|s| s == "diamond") {
        diamond_listing_protocol(&g, &va)
    } else {
        return Err(PyValueError::new_err("target must be a cycle length or \"diamond\""));
    }
    .map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("a_list", lists(&res.a_list))?;
    d.set_item("b_list", lists(&res.b_list))?;
    d.set_item("payload_bits", res.transcript.payload_bits())?;
    d.set_item("bound", res.bound.bound)?;
    d.set_item("bound_holds", res.bound.holds)?;
    Ok(d)
}

/// Distributed induced diamond listing; returns the diamonds and the stats as JSON.
#[pyfunction]
#[pyo3(signature = (n, edges, delta="5/6", epsilon="1/2"))]
fn list_diamonds_congest(
    n: usize,
    edges: Vec<(usize, usize)>,
    delta: &str,
    epsilon: &str,
) -> PyResult<(Vec<Vec<usize>>, String)> {
    let g = graph(n, edges)?;
    let params = ListingParams {
        epsilon: epsilon.parse::<Fraction>().map_err(py_err)?,
        decomposition: DecompositionParams { delta: delta.parse().map_err(py_err)?, ..Default::default() },
    };
    let (found, stats) = list_induced_diamonds_congest(&g, &params).map_err(py_err)?;
    let json = serde_json::to_string(&stats).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((lists(&found), json))
}

#[pymodule]
fn induced_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(induced_cycles, m)?)?;
    m.add_function(wrap_pyfunction!(induced_diamonds, m)?)?;
    m.add_function(wrap_pyfunction!(build_family, m)?)?;
    m.add_function(wrap_pyfunction!(verify_family, m)?)?;
    m.add_function(wrap_pyfunction!(two_party_listing, m)?)?;
    m.add_function(wrap_pyfunction!(list_diamonds_congest, m)?)?;
    Ok(())
}
