//! Command implementations shared by the binary and the integration tests.
//!
//! Each command returns either a [`CommandOutput`] — a prose sentence, a
//! JSON document for machine consumption, and an exit code — or a
//! [`CliError`] that the binary reports on stderr. Exit codes:
//!
//! * 0 — success (for `feasible`: the triple is realizable)
//! * 1 — usage or sizing error
//! * 2 — infeasible request
//! * 3 — I/O failure while writing a state file
//! * 4 — unreadable or invalid state file
//! * 5 — sweep finished with recorded failures

use std::path::Path;

use birank::{
    analyze_state, classify_triple, classify_triple_extended, construct_witness, is_uncorrelated,
    rank_triple, sweep_theorem, Error, ExtendedDim, WitnessKind,
};
use serde_json::{json, Value};

use crate::statefile::{LoadError, StateFile};

pub struct CommandOutput {
    pub prose: String,
    pub doc: Value,
    pub exit: i32,
}

pub struct CliError {
    pub exit: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            exit: 1,
            message: message.into(),
        }
    }
}

fn reasons_json(reasons: &[birank::ReasonCode]) -> Value {
    Value::Array(
        reasons
            .iter()
            .map(|r| Value::String(r.to_string()))
            .collect(),
    )
}

pub fn cmd_feasible(d1: &str, d2: &str, d3: &str) -> Result<CommandOutput, CliError> {
    let parse = |token: &str| {
        token
            .parse::<ExtendedDim>()
            .map_err(|e| CliError::usage(e.to_string()))
    };
    let (e1, e2, e3) = (parse(d1)?, parse(d2)?, parse(d3)?);

    if let (ExtendedDim::Finite(f1), ExtendedDim::Finite(f2), ExtendedDim::Finite(f3)) =
        (e1, e2, e3)
    {
        let class = classify_triple(f1, f2, f3).map_err(|e| CliError::usage(e.to_string()))?;
        let mut parts = vec![if class.exists {
            "states exist".to_owned()
        } else {
            "no state exists".to_owned()
        }];
        if class.exists {
            parts.push(if class.correlated_exists {
                "correlated witnesses exist".to_owned()
            } else {
                "every state is uncorrelated".to_owned()
            });
            parts.push(if class.uncorrelated_exists {
                "uncorrelated witnesses exist".to_owned()
            } else {
                "every state is correlated".to_owned()
            });
        }
        let prose = format!("triple ({f1}, {f2}, {f3}): {}.", parts.join("; "));
        let doc = json!({
            "d1": f1,
            "d2": f2,
            "d3": f3,
            "exists": class.exists,
            "correlated_exists": class.correlated_exists,
            "uncorrelated_exists": class.uncorrelated_exists,
            "reasons": reasons_json(&class.reasons),
        });
        return Ok(CommandOutput {
            prose,
            doc,
            exit: if class.exists { 0 } else { 2 },
        });
    }

    let class = classify_triple_extended(e1, e2, e3).map_err(|e| CliError::usage(e.to_string()))?;
    let prose = format!(
        "triple ({e1}, {e2}, {e3}): {}.",
        if class.exists {
            "states exist"
        } else {
            "no state exists"
        }
    );
    let doc = json!({
        "d1": e1.to_string(),
        "d2": e2.to_string(),
        "d3": e3.to_string(),
        "exists": class.exists,
        "reasons": reasons_json(&class.reasons),
    });
    Ok(CommandOutput {
        prose,
        doc,
        exit: if class.exists { 0 } else { 2 },
    })
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_construct(
    d1: usize,
    d2: usize,
    d3: usize,
    kind: WitnessKind,
    seed: u64,
    out: &Path,
    rank_tol: f64,
    prod_tol: f64,
) -> Result<CommandOutput, CliError> {
    let rho = match construct_witness(d1, d2, d3, kind, seed) {
        Ok(rho) => rho,
        Err(Error::Infeasible { reasons, .. }) => {
            let prose = format!(
                "no {kind} witness exists for ({d1}, {d2}, {d3}): {}.",
                reasons
                    .iter()
                    .map(|r| r.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            let doc = json!({
                "error": "infeasible",
                "d1": d1,
                "d2": d2,
                "d3": d3,
                "kind": kind.to_string(),
                "reasons": reasons_json(&reasons),
            });
            return Ok(CommandOutput {
                prose,
                doc,
                exit: 2,
            });
        }
        Err(e @ (Error::ZeroDimension | Error::SizeLimit { .. })) => {
            return Err(CliError::usage(e.to_string()));
        }
        Err(e) => {
            return Err(CliError {
                exit: 2,
                message: e.to_string(),
            });
        }
    };

    let ranks = rank_triple(&rho, rank_tol).map_err(|e| CliError {
        exit: 2,
        message: e.to_string(),
    })?;
    let verdict = is_uncorrelated(&rho, prod_tol);

    StateFile::from_operator(&rho)
        .save(out)
        .map_err(|e| CliError {
            exit: 3,
            message: e.to_string(),
        })?;

    let correlation = if verdict.uncorrelated {
        "uncorrelated"
    } else {
        "correlated"
    };
    let prose = format!(
        "constructed {kind} witness for ({d1}, {d2}, {d3}): rank triple {ranks}, {correlation} (residual {:.3e}); wrote {}.",
        verdict.residual,
        out.display()
    );
    let doc = json!({
        "d1": d1,
        "d2": d2,
        "d3": d3,
        "kind": kind.to_string(),
        "seed": seed,
        "out": out.display().to_string(),
        "dims": [rho.dims().dim_a(), rho.dims().dim_b()],
        "rank_triple": serde_json::to_value(ranks).expect("serializable"),
        "uncorrelated": verdict.uncorrelated,
        "residual": verdict.residual,
    });
    Ok(CommandOutput {
        prose,
        doc,
        exit: 0,
    })
}

pub fn cmd_analyze(path: &Path, rank_tol: f64, prod_tol: f64) -> Result<CommandOutput, CliError> {
    let invalid = |message: String| CliError { exit: 4, message };
    let rho = StateFile::load(path)
        .and_then(|f| f.to_operator())
        .map_err(|e: LoadError| invalid(e.to_string()))?;
    let report = analyze_state(&rho, rank_tol, prod_tol).map_err(|e| invalid(e.to_string()))?;

    let correlation = if report.uncorrelated {
        "uncorrelated".to_owned()
    } else if report.ambiguous {
        format!(
            "correlated but within {:.0e} of product form (ambiguous)",
            birank::AMBIGUOUS_RESIDUAL
        )
    } else {
        "correlated".to_owned()
    };
    let prose = format!(
        "state {}: dims {}, rank triple {}, purity {:.4}, {correlation} (residual {:.3e}), necessity chain {}.",
        path.display(),
        report.dims,
        report.rank_triple,
        report.purity,
        report.residual,
        if report.necessity.all_ok { "ok" } else { "VIOLATED" }
    );
    let doc = serde_json::to_value(&report).expect("serializable");
    Ok(CommandOutput {
        prose,
        doc,
        exit: 0,
    })
}

pub fn cmd_sweep(
    max_dim: usize,
    samples: usize,
    seed: u64,
    rank_tol: f64,
    prod_tol: f64,
) -> Result<CommandOutput, CliError> {
    let report =
        sweep_theorem(max_dim, samples, seed, rank_tol, prod_tol).map_err(|e| match e {
            Error::ZeroDimension | Error::SizeLimit { .. } => CliError::usage(e.to_string()),
            other => CliError {
                exit: 1,
                message: other.to_string(),
            },
        })?;
    let prose = format!(
        "sweep up to dimension {} (seed {seed}, {samples} samples/config): {} triples ({} feasible, {} correlated, {} uncorrelated), {} samples, {} failures.",
        report.max_dim,
        report.triples_checked,
        report.feasible_count,
        report.correlated_count,
        report.uncorrelated_count,
        report.samples_checked,
        report.failures.len()
    );
    let exit = if report.failures.is_empty() { 0 } else { 5 };
    let doc = serde_json::to_value(&report).expect("serializable");
    Ok(CommandOutput { prose, doc, exit })
}
