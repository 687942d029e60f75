#![allow(dead_code)]

use repbasis::construct::{build, BuildFailure, ConstructionTrace, SearchConfig};
use repbasis::{Phi, RepTarget};

/// The four targets of the soundness matrix, with a short label each.
pub fn matrix_targets() -> Vec<(&'static str, RepTarget)> {
    [
        ("f=1", r#"{"window":0,"values":{},"default":1}"#),
        ("f=2", r#"{"window":0,"values":{},"default":2}"#),
        (
            "zeros|n|<=2",
            r#"{"window":2,"values":{"-2":0,"-1":0,"0":0,"1":0,"2":0},"default":1}"#,
        ),
        ("f(0)=inf", r#"{"window":0,"values":{"0":"inf"},"default":1}"#),
    ]
    .into_iter()
    .map(|(label, json)| (label, serde_json::from_str(json).expect("valid target")))
    .collect()
}

pub fn phi(s: &str) -> Phi {
    s.parse().expect("valid phi")
}

pub fn build_default(f: &RepTarget, phi: &Phi, rounds: usize) -> Result<ConstructionTrace, BuildFailure> {
    build(f, phi, rounds, &SearchConfig::default())
}

/// Every trace that can actually be realized: matrix builds (complete or
/// partial) plus full-depth builds under faster-growing φ.
pub fn realized_traces() -> Vec<(String, ConstructionTrace)> {
    let mut out = Vec::new();
    for (label, f) in matrix_targets() {
        for p in ["log2", "pow:0.25"] {
            for l in [1, 3, 6] {
                let trace = match build_default(&f, &phi(p), l) {
                    Ok(t) => t,
                    Err(e) => *e.partial,
                };
                out.push((format!("{label}/{p}/L={l}"), trace));
            }
        }
        for (p, l) in [("clog:1e12", 6), ("pow:0.45", 2)] {
            let trace = build_default(&f, &phi(p), l).expect("supplementary build succeeds");
            out.push((format!("{label}/{p}/L={l}"), trace));
        }
    }
    out
}
