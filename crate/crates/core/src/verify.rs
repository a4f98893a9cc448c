//! Per-state verification of the necessity relations between a composite
//! state's spectral decomposition and its rank triple, a user-facing state
//! analyzer, and an exhaustive small-dimension sweep reconciling
//! classification, construction, and random sampling.
//!
//! For every state rho with spectral decomposition
//! `rho = sum_n r_n |Psi_n><Psi_n|` the following must hold:
//!
//! * each eigenvector's two reduced ranks agree (`schmidt1 = schmidt2`);
//! * `max_n d_i^(n) <= d_i <= sum_n d_i^(n)` for both subsystems;
//! * the range of each reduced state equals the span of the union of the
//!   per-eigenvector reduced supports.
//!
//! [`verify_necessity_chain`] checks all of this numerically on one state;
//! [`sweep_theorem`] runs it, alongside the classification/construction
//! reconciliation and sampling checks, over every triple up to a bound.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::construct::{
    classify_triple, construct_witness, derive_seed, sample_random_state, scramble_local,
    WitnessKind, CORRELATED_RESIDUAL_MARGIN,
};
use crate::error::{Error, Result};
use crate::matrix::{
    frobenius_distance, hermitian_eigensystem, orthonormalize_columns, projector, ComplexMatrix,
    MAX_MATRIX_DIM,
};
use crate::state::{
    is_uncorrelated, partial_trace_over_1, partial_trace_over_2, rank_triple, reduced_of_vector,
    schmidt_rank, BipartiteDims, DensityOperator, RankTriple,
};

/// Frobenius tolerance for the range-projector comparison, and the drop
/// tolerance of the underlying orthonormalization.
pub const SPAN_TOL: f64 = 1e-8;

/// Residual band above the product tolerance inside which a correlated
/// verdict is flagged as ambiguous instead of being silently trusted.
pub const AMBIGUOUS_RESIDUAL: f64 = 1e-6;

/// Residual ceiling certified for constructed uncorrelated witnesses.
pub const UNCORRELATED_RESIDUAL_MAX: f64 = 1e-10;

/// Per-eigenvector record: the eigenvalue and the ranks of the two reduced
/// states of the eigenvector.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EigvecRecord {
    pub weight: f64,
    pub schmidt1: usize,
    pub schmidt2: usize,
}

/// Outcome of the necessity-chain check on one state.
#[derive(Debug, Clone, Serialize)]
pub struct NecessityReport {
    /// Number of eigenvalues above the rank threshold (= d3).
    pub eigen_count: usize,
    /// One record per kept eigenvector, largest eigenvalue first.
    pub per_eigenvector: Vec<EigvecRecord>,
    /// max_n d1_n <= d1 <= sum_n d1_n.
    pub bounds_ok_1: bool,
    /// max_n d2_n <= d2 <= sum_n d2_n.
    pub bounds_ok_2: bool,
    /// Both reduced ranges equal the span of their per-eigenvector supports.
    pub span_ok: bool,
    pub all_ok: bool,
}

fn span_matches(
    reduced: &ComplexMatrix,
    union_columns: &[Vec<Complex64>],
    rank_tol: f64,
) -> Result<bool> {
    let dim = reduced.rows();
    let es = hermitian_eigensystem(reduced)?;
    let range_columns: Vec<Vec<Complex64>> = es
        .support(rank_tol)
        .into_iter()
        .map(|(_, col)| col)
        .collect();
    let p_range = projector(dim, &range_columns);
    let basis = orthonormalize_columns(union_columns, SPAN_TOL);
    let p_union = projector(dim, &basis);
    Ok(frobenius_distance(&p_union, &p_range)? < SPAN_TOL)
}

/// Eigendecomposes the state and checks, for every eigenvector above the
/// rank threshold, the equality of its two reduced ranks, the dimension
/// bounds against the full reduced ranks, and the equality of each reduced
/// range with the span of the per-eigenvector supports.
pub fn verify_necessity_chain(rho: &DensityOperator, rank_tol: f64) -> Result<NecessityReport> {
    let dims = rho.dims();
    let es = hermitian_eigensystem(rho.matrix())?;
    let kept = es.support(rank_tol);

    let rho1 = partial_trace_over_2(rho);
    let rho2 = partial_trace_over_1(rho);
    let d1 = crate::matrix::numerical_rank(&rho1, rank_tol)?;
    let d2 = crate::matrix::numerical_rank(&rho2, rank_tol)?;

    let mut per_eigenvector = Vec::with_capacity(kept.len());
    let mut union1: Vec<Vec<Complex64>> = Vec::new();
    let mut union2: Vec<Vec<Complex64>> = Vec::new();
    for (weight, psi) in &kept {
        let (red1, red2) = reduced_of_vector(psi, dims);
        let sup1 = hermitian_eigensystem(&red1)?.support(rank_tol);
        let sup2 = hermitian_eigensystem(&red2)?.support(rank_tol);
        per_eigenvector.push(EigvecRecord {
            weight: *weight,
            schmidt1: sup1.len(),
            schmidt2: sup2.len(),
        });
        union1.extend(sup1.into_iter().map(|(_, col)| col));
        union2.extend(sup2.into_iter().map(|(_, col)| col));
    }

    let schmidt_consistent = per_eigenvector.iter().all(|r| r.schmidt1 == r.schmidt2);
    let max1 = per_eigenvector
        .iter()
        .map(|r| r.schmidt1)
        .max()
        .unwrap_or(0);
    let sum1: usize = per_eigenvector.iter().map(|r| r.schmidt1).sum();
    let max2 = per_eigenvector
        .iter()
        .map(|r| r.schmidt2)
        .max()
        .unwrap_or(0);
    let sum2: usize = per_eigenvector.iter().map(|r| r.schmidt2).sum();
    let bounds_ok_1 = max1 <= d1 && d1 <= sum1;
    let bounds_ok_2 = max2 <= d2 && d2 <= sum2;
    let span_ok =
        span_matches(&rho1, &union1, rank_tol)? && span_matches(&rho2, &union2, rank_tol)?;

    Ok(NecessityReport {
        eigen_count: per_eigenvector.len(),
        all_ok: schmidt_consistent && bounds_ok_1 && bounds_ok_2 && span_ok,
        per_eigenvector,
        bounds_ok_1,
        bounds_ok_2,
        span_ok,
    })
}

/// Everything the analyzer reports about one state.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub dims: BipartiteDims,
    pub rank_triple: RankTriple,
    /// trace(rho^2).
    pub purity: f64,
    pub uncorrelated: bool,
    pub residual: f64,
    /// Correlated verdict with a residual inside the ambiguity band
    /// (prod_tol, 1e-6): too close to product form to classify confidently.
    pub ambiguous: bool,
    pub necessity: NecessityReport,
}

/// Bundles rank triple, purity, the correlation verdict, and the necessity
/// report for one state.
pub fn analyze_state(
    rho: &DensityOperator,
    rank_tol: f64,
    prod_tol: f64,
) -> Result<AnalysisReport> {
    let ranks = rank_triple(rho, rank_tol)?;
    let verdict = is_uncorrelated(rho, prod_tol);
    let necessity = verify_necessity_chain(rho, rank_tol)?;
    Ok(AnalysisReport {
        dims: rho.dims(),
        rank_triple: ranks,
        purity: rho.purity(),
        uncorrelated: verdict.uncorrelated,
        residual: verdict.residual,
        ambiguous: !verdict.uncorrelated && verdict.residual < AMBIGUOUS_RESIDUAL,
        necessity,
    })
}

/// One recorded violation found by the sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepFailure {
    pub triple: RankTriple,
    pub stage: String,
    pub detail: String,
}

/// Aggregate result of [`sweep_theorem`].
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub max_dim: usize,
    pub triples_checked: usize,
    pub feasible_count: usize,
    pub correlated_count: usize,
    pub uncorrelated_count: usize,
    pub samples_checked: usize,
    pub failures: Vec<SweepFailure>,
}

struct TripleOutcome {
    exists: bool,
    correlated: bool,
    uncorrelated: bool,
    failures: Vec<SweepFailure>,
}

fn fail(
    failures: &mut Vec<SweepFailure>,
    triple: RankTriple,
    stage: &str,
    detail: impl Into<String>,
) {
    failures.push(SweepFailure {
        triple,
        stage: stage.to_owned(),
        detail: detail.into(),
    });
}

fn check_triple(
    d1: usize,
    d2: usize,
    d3: usize,
    master_seed: u64,
    rank_tol: f64,
    prod_tol: f64,
) -> TripleOutcome {
    let triple = RankTriple { d1, d2, d3 };
    let triple_seed = derive_seed(master_seed, &[1, d1 as u64, d2 as u64, d3 as u64]);
    let class = classify_triple(d1, d2, d3).expect("sweep dimensions are at least 1");
    let mut failures = Vec::new();

    for (idx, kind) in [
        WitnessKind::Any,
        WitnessKind::Correlated,
        WitnessKind::Uncorrelated,
    ]
    .into_iter()
    .enumerate()
    {
        let allowed = match kind {
            WitnessKind::Any => class.exists,
            WitnessKind::Correlated => class.correlated_exists,
            WitnessKind::Uncorrelated => class.uncorrelated_exists,
        };
        match construct_witness(d1, d2, d3, kind, derive_seed(triple_seed, &[idx as u64])) {
            Ok(rho) => {
                if !allowed {
                    fail(
                        &mut failures,
                        triple,
                        "classify",
                        format!("{kind} witness built although classification denies it"),
                    );
                    continue;
                }
                match rank_triple(&rho, rank_tol) {
                    Ok(got) if got == triple => {}
                    Ok(got) => fail(
                        &mut failures,
                        triple,
                        "rank",
                        format!("{kind} witness has rank triple {got}"),
                    ),
                    Err(e) => fail(&mut failures, triple, "rank", e.to_string()),
                }
                let verdict = is_uncorrelated(&rho, prod_tol);
                match kind {
                    WitnessKind::Correlated
                        if verdict.uncorrelated
                            || verdict.residual <= CORRELATED_RESIDUAL_MARGIN =>
                    {
                        fail(
                            &mut failures,
                            triple,
                            "correlation",
                            format!("correlated witness residual {:e}", verdict.residual),
                        );
                    }
                    WitnessKind::Uncorrelated
                        if !verdict.uncorrelated
                            || verdict.residual >= UNCORRELATED_RESIDUAL_MAX =>
                    {
                        fail(
                            &mut failures,
                            triple,
                            "correlation",
                            format!("uncorrelated witness residual {:e}", verdict.residual),
                        );
                    }
                    _ => {}
                }
                match verify_necessity_chain(&rho, rank_tol) {
                    Ok(report) if report.all_ok => {}
                    Ok(_) => fail(
                        &mut failures,
                        triple,
                        "necessity",
                        format!("{kind} witness fails the necessity chain"),
                    ),
                    Err(e) => fail(&mut failures, triple, "necessity", e.to_string()),
                }
                let scrambled = scramble_local(&rho, derive_seed(triple_seed, &[16 + idx as u64]));
                match rank_triple(&scrambled, rank_tol) {
                    Ok(got) if got == triple => {}
                    Ok(got) => fail(
                        &mut failures,
                        triple,
                        "scramble",
                        format!("scrambled {kind} witness has rank triple {got}"),
                    ),
                    Err(e) => fail(&mut failures, triple, "scramble", e.to_string()),
                }
                let scrambled_verdict = is_uncorrelated(&scrambled, prod_tol);
                if scrambled_verdict.uncorrelated != verdict.uncorrelated {
                    fail(
                        &mut failures,
                        triple,
                        "scramble",
                        format!(
                            "scramble flipped the correlation verdict (residual {:e} -> {:e})",
                            verdict.residual, scrambled_verdict.residual
                        ),
                    );
                }
            }
            Err(Error::Infeasible { .. }) if !allowed => {}
            Err(e) => fail(&mut failures, triple, "construct", format!("{kind}: {e}")),
        }
    }

    TripleOutcome {
        exists: class.exists,
        correlated: class.correlated_exists,
        uncorrelated: class.uncorrelated_exists,
        failures,
    }
}

fn check_samples(
    dim_a: usize,
    dim_b: usize,
    mix_rank: usize,
    samples: usize,
    master_seed: u64,
    rank_tol: f64,
    prod_tol: f64,
) -> Vec<SweepFailure> {
    let dims = BipartiteDims::new(dim_a, dim_b).expect("sweep dimensions within limits");
    let config_seed = derive_seed(
        master_seed,
        &[2, dim_a as u64, dim_b as u64, mix_rank as u64],
    );
    let mut failures = Vec::new();
    for s in 0..samples {
        let rho = sample_random_state(dims, mix_rank, derive_seed(config_seed, &[s as u64]))
            .expect("mix rank validated by the caller");
        let ranks = match rank_triple(&rho, rank_tol) {
            Ok(r) => r,
            Err(e) => {
                fail(
                    &mut failures,
                    RankTriple {
                        d1: 0,
                        d2: 0,
                        d3: 0,
                    },
                    "sample-rank",
                    e.to_string(),
                );
                continue;
            }
        };
        let class =
            classify_triple(ranks.d1, ranks.d2, ranks.d3).expect("computed ranks are positive");
        if !class.exists {
            fail(
                &mut failures,
                ranks,
                "sample-condition1",
                format!(
                    "sample on {dims} with mix rank {mix_rank} violates the cyclic inequalities"
                ),
            );
        }
        if mix_rank == 1 {
            let pure_ok = ranks.d3 == 1 && ranks.d1 == ranks.d2;
            let schmidt_ok = pure_ok && {
                let es = match hermitian_eigensystem(rho.matrix()) {
                    Ok(es) => es,
                    Err(_) => unreachable!("validated on construction"),
                };
                let top = es.support(rank_tol);
                let psi = ComplexMatrix::new(dims.composite(), 1, top[0].1.clone())
                    .expect("eigenvector length matches");
                schmidt_rank(&psi, dims, rank_tol)
                    .map(|r| r == ranks.d1)
                    .unwrap_or(false)
            };
            if !pure_ok || !schmidt_ok {
                fail(
                    &mut failures,
                    ranks,
                    "sample-pure",
                    format!("pure sample on {dims} has ranks {ranks}"),
                );
            }
        }
        let verdict = is_uncorrelated(&rho, prod_tol);
        if verdict.uncorrelated && ranks.d3 != ranks.d1 * ranks.d2 {
            fail(
                &mut failures,
                ranks,
                "sample-product",
                format!(
                    "uncorrelated sample (residual {:e}) with d3 != d1*d2",
                    verdict.residual
                ),
            );
        }
    }
    failures
}

/// Runs the full reconciliation over every triple in [1, max_dim]^3 and
/// every sampling configuration with ambient dims up to max_dim.
///
/// For each triple the three witness kinds are requested and reconciled
/// against the classification, each successful witness is rank-checked,
/// necessity-checked, and re-checked after a local scramble. For each
/// ambient configuration and mixing rank, seeded samples are checked
/// against the cyclic inequalities, the pure-state rank equality, and
/// "uncorrelated implies d3 = d1 d2". Failures are collected, not thrown;
/// the run is deterministic for a fixed seed.
pub fn sweep_theorem(
    max_dim: usize,
    samples_per_config: usize,
    seed: u64,
    rank_tol: f64,
    prod_tol: f64,
) -> Result<SweepReport> {
    if max_dim == 0 {
        return Err(Error::ZeroDimension);
    }
    let composite = max_dim.saturating_mul(max_dim);
    if composite > MAX_MATRIX_DIM {
        return Err(Error::SizeLimit {
            rows: composite,
            cols: composite,
            max: MAX_MATRIX_DIM,
        });
    }

    let mut triples = Vec::with_capacity(max_dim * max_dim * max_dim);
    for d1 in 1..=max_dim {
        for d2 in 1..=max_dim {
            for d3 in 1..=max_dim {
                triples.push((d1, d2, d3));
            }
        }
    }
    let outcomes: Vec<TripleOutcome> = triples
        .par_iter()
        .map(|&(d1, d2, d3)| check_triple(d1, d2, d3, seed, rank_tol, prod_tol))
        .collect();

    let mut configs = Vec::new();
    for dim_a in 1..=max_dim {
        for dim_b in 1..=max_dim {
            for mix_rank in 1..=dim_a * dim_b {
                configs.push((dim_a, dim_b, mix_rank));
            }
        }
    }
    let sample_failures: Vec<Vec<SweepFailure>> = configs
        .par_iter()
        .map(|&(da, db, mr)| {
            check_samples(da, db, mr, samples_per_config, seed, rank_tol, prod_tol)
        })
        .collect();

    let mut failures: Vec<SweepFailure> = outcomes
        .iter()
        .flat_map(|o| o.failures.iter().cloned())
        .chain(sample_failures.into_iter().flatten())
        .collect();
    failures.sort_by(|a, b| {
        (a.triple.d1, a.triple.d2, a.triple.d3, &a.stage, &a.detail).cmp(&(
            b.triple.d1,
            b.triple.d2,
            b.triple.d3,
            &b.stage,
            &b.detail,
        ))
    });

    Ok(SweepReport {
        max_dim,
        triples_checked: outcomes.len(),
        feasible_count: outcomes.iter().filter(|o| o.exists).count(),
        correlated_count: outcomes.iter().filter(|o| o.correlated).count(),
        uncorrelated_count: outcomes.iter().filter(|o| o.uncorrelated).count(),
        samples_checked: configs.len() * samples_per_config,
        failures,
    })
}
