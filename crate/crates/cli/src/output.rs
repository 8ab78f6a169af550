use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use induced_core::families::{BundleMeta, SCHEMA_VERSION};
use induced_core::graph::{Graph, VertexSubset};
use serde::Serialize;
use serde_json::{json, Value};

/// Wraps a command's body with the fields every report carries.
pub fn envelope(command: &str, params: &impl Serialize, ok: bool, body: Value) -> Result<Value> {
    let mut out = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "params": params,
        "ok": ok,
    });
    if let (Value::Object(o), Value::Object(b)) = (&mut out, body) {
        o.extend(b);
    }
    Ok(out)
}

/// Pretty JSON to `path`, or to stdout when no path is given.
pub fn write_json(path: Option<&Path>, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn read_graph(path: &PathBuf) -> Result<Graph> {
    let f = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(Graph::read_text(std::io::BufReader::new(f))?)
}

/// Alice's side from a bundle's meta.json.
pub fn read_partition(path: &Path, g: &Graph) -> Result<VertexSubset> {
    let meta = BundleMeta::read(path).with_context(|| format!("reading {}", path.display()))?;
    if meta.n_vertices != g.n() {
        return Err(induced_core::Error::Input(format!(
            "partition has {} vertices, graph has {}",
            meta.n_vertices,
            g.n()
        ))
        .into());
    }
    Ok(VertexSubset::from_sorted(g, meta.va)?)
}
