use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde_json::Value;

use crate::CheckFailed;

/// Key figures per command, picked from the report body.
fn facts(v: &Value) -> String {
    let get = |path: &str| v.pointer(path).filter(|x| !x.is_null()).map(|x| x.to_string());
    let picks: &[(&str, &str)] = match v["command"].as_str().unwrap_or_default() {
        "gen-family" => {
            &[("family", "/family"), ("vertices", "/vertices"), ("cut", "/cut_edges"), ("diameter", "/diameter")]
        }
        "verify-family" => &[("families", "/params/families"), ("pairs", "/reports/0/pairs_checked")],
        "run-congest" => {
            &[("decision", "/decision"), ("rounds", "/stats/rounds_used"), ("cut bits", "/stats/total_cut_bits")]
        }
        "run-protocol" => &[("listed", "/listed"), ("payload", "/payload_bits"), ("bound", "/bound/bound")],
        "run-diamond-listing" => &[
            ("listed", "/listed"),
            ("rounds", "/stats/measured_rounds"),
            ("charged", "/stats/simulation/total"),
            ("uncovered", "/coverage/uncovered"),
        ],
        _ => &[],
    };
    picks.iter().filter_map(|(name, path)| get(path).map(|x| format!("{name}={x}"))).collect::<Vec<_>>().join(" ")
}

pub fn report(files: &[PathBuf]) -> Result<()> {
    let mut failed = 0;
    for f in files {
        let text = std::fs::read_to_string(f).with_context(|| format!("reading {}", f.display()))?;
        let v: Value = serde_json::from_str(&text).map_err(induced_core::Error::from)?;
        let ok = v["ok"].as_bool().unwrap_or(false);
        failed += usize::from(!ok);
        println!(
            "{}: {} {} {}",
            f.display(),
            v["command"].as_str().unwrap_or("unknown"),
            if ok { "ok" } else { "FAILED" },
            facts(&v)
        );
    }
    if failed > 0 {
        bail!(CheckFailed(format!("{failed} of {} reports failed", files.len())));
    }
    Ok(())
}
