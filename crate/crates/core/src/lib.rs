//! Bipartite density operators with prescribed range dimensions.
//!
//! A bipartite state rho determines three ranks: d1 and d2 of its two
//! reduced states and d3 of rho itself. This crate classifies which triples
//! (d1, d2, d3) are realizable — realizable by a correlated state,
//! realizable by an uncorrelated one — constructs witness states for every
//! admissible request, and numerically verifies the supporting spectral
//! relations on arbitrary states.
//!
//! The main entry points:
//!
//! * [`classify_triple`] / [`classify_triple_extended`] — feasibility of a
//!   triple, with diagnostic reason codes; the extended form admits
//!   infinite entries.
//! * [`construct_witness`] — a state with the requested rank triple and
//!   correlation status, or an infeasibility error.
//! * [`rank_triple`], [`schmidt_rank`], [`is_uncorrelated`] — the measured
//!   quantities on a given [`DensityOperator`].
//! * [`verify_necessity_chain`], [`analyze_state`], [`sweep_theorem`] —
//!   per-state and exhaustive small-dimension verification.
//!
//! All randomness is seed-parameterized and every operation is a pure
//! function of its inputs, so any number of operations may run in parallel
//! with no coordination.
//!
//! ```
//! use birank::{classify_triple, construct_witness, is_uncorrelated, rank_triple};
//! use birank::{WitnessKind, DEFAULT_PROD_TOL, DEFAULT_RANK_TOL};
//!
//! let class = classify_triple(2, 3, 5)?;
//! assert!(class.exists && class.correlated_exists && !class.uncorrelated_exists);
//!
//! let rho = construct_witness(2, 3, 5, WitnessKind::Correlated, 7)?;
//! let ranks = rank_triple(&rho, DEFAULT_RANK_TOL)?;
//! assert_eq!((ranks.d1, ranks.d2, ranks.d3), (2, 3, 5));
//! assert!(!is_uncorrelated(&rho, DEFAULT_PROD_TOL).uncorrelated);
//! # Ok::<(), birank::Error>(())
//! ```

mod error;

pub mod construct;
pub mod matrix;
pub mod state;
pub mod verify;

pub use error::{Error, Result};

pub use matrix::{
    frobenius_distance, hermitian_eigensystem, numerical_rank, random_unitary, singular_values,
    tensor_product, ComplexMatrix, EigenSystem, DEFAULT_RANK_TOL, HERMITICITY_TOL, MAX_MATRIX_DIM,
};

pub use state::{
    is_uncorrelated, partial_trace_over_1, partial_trace_over_2, rank_triple, schmidt_rank,
    swap_subsystems, BipartiteDims, CorrelationVerdict, DensityOperator, RankTriple,
    DEFAULT_PROD_TOL, DENSITY_TOL,
};

pub use construct::{
    classify_triple, classify_triple_extended, construct_product_mixture,
    construct_subbasis_mixture, construct_uncorrelated, construct_witness, sample_random_state,
    scramble_local, ExtendedClass, ExtendedDim, ReasonCode, TripleClass, WeightVector, WitnessKind,
    CORRELATED_RESIDUAL_MARGIN,
};

pub use verify::{
    analyze_state, sweep_theorem, verify_necessity_chain, AnalysisReport, EigvecRecord,
    NecessityReport, SweepFailure, SweepReport, AMBIGUOUS_RESIDUAL, SPAN_TOL,
    UNCORRELATED_RESIDUAL_MAX,
};
