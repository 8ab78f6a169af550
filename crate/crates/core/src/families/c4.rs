//! The induced `C_4` family and its subdivided variants for `C_k`, `k >= 5`.

use super::{bit_index, Draft, FamilyInstance, FamilyTag, InputPair};
use crate::error::{Error, Result};

/// Vertex ids: `a1^i = i-1`, `a2^i = n+i-1`, `b1^i = 2n+i-1`, `b2^i = 3n+i-1`.
fn base(n: usize, inputs: &InputPair) -> Result<Draft> {
    if n < 2 {
        return Err(Error::input(format!("block size must be at least 2, got {n}")));
    }
    inputs.expect_len(n * n, "this family")?;
    let mut d = Draft::new();
    for (block, alice) in [("a1", true), ("a2", true), ("b1", false), ("b2", false)] {
        let group = block.to_uppercase();
        for i in 1..=n {
            d.vertex(format!("{block}^{i}"), alice, &[group.as_str()]);
        }
    }
    let (a1, a2, b1, b2) = (|i: usize| i - 1, |i: usize| n + i - 1, |i: usize| 2 * n + i - 1, |i: usize| 3 * n + i - 1);
    for i in 1..=n {
        for j in i + 1..=n {
            d.edge(a1(i), a1(j));
            d.edge(b2(i), b2(j));
        }
    }
    for i in 1..=n {
        d.edge(a1(i), b1(i));
        d.edge(a2(i), b2(i));
    }
    for i in 1..=n {
        for j in 1..=n {
            if inputs.x.get(bit_index(n, i, j)) {
                d.edge(a1(i), a2(j));
            }
            if inputs.y.get(bit_index(n, i, j)) {
                d.edge(b1(i), b2(j));
            }
        }
    }
    Ok(d)
}

/// `A1`, `B2` cliques, `A2`, `B1` independent, two perfect matchings across the
/// cut, `x` wiring `A1` to `A2` and `y` wiring `B1` to `B2`.
pub fn build_c4_family(n: usize, inputs: &InputPair) -> Result<FamilyInstance> {
    base(n, inputs)?.finish(FamilyTag::C4 { n }, inputs.clone())
}

/// The `C_4` family with each `a1^i b1^i` edge stretched by `ceil((k-4)/2)`
/// internal vertices and each `a2^i b2^i` edge by `floor((k-4)/2)`.
pub fn build_ck_subdivided_family(n: usize, k: usize, inputs: &InputPair) -> Result<FamilyInstance> {
    if k < 5 {
        return Err(Error::input(format!("subdivided family needs k >= 5, got {k}")));
    }
    let mut d = base(n, inputs)?;
    let (top, bottom) = ((k - 4).div_ceil(2), (k - 4) / 2);
    for i in 1..=n {
        d.subdivide(i - 1, 2 * n + i - 1, top, &format!("p_top^{i}"))?;
    }
    for i in 1..=n {
        d.subdivide(n + i - 1, 3 * n + i - 1, bottom, &format!("p_bot^{i}"))?;
    }
    d.finish(FamilyTag::Subdivided { n, k }, inputs.clone())
}
