//! Bipartite density operators and the maps derived from them: partial
//! traces, rank triples, Schmidt rank, the product-form correlation test,
//! and the subsystem swap.
//!
//! The composite index convention is subsystem-1-major throughout: the
//! basis vector |i>|j> of a `(dim_a, dim_b)` space sits at composite index
//! `i * dim_b + j`.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{self, ComplexMatrix, MAX_MATRIX_DIM};

/// Validation tolerance for Hermiticity, unit trace, and positivity of a
/// density operator.
pub const DENSITY_TOL: f64 = 1e-10;

/// Default Frobenius-residual threshold below which a state counts as a
/// product of its own reduced states.
pub const DEFAULT_PROD_TOL: f64 = 1e-8;

/// Ambient dimensions of the two tensor factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BipartiteDims {
    dim_a: usize,
    dim_b: usize,
}

impl BipartiteDims {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::ZeroDimension);
        }
        let composite = dim_a.saturating_mul(dim_b);
        if composite > MAX_MATRIX_DIM {
            return Err(Error::SizeLimit {
                rows: composite,
                cols: composite,
                max: MAX_MATRIX_DIM,
            });
        }
        Ok(Self { dim_a, dim_b })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn composite(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn swapped(&self) -> Self {
        Self {
            dim_a: self.dim_b,
            dim_b: self.dim_a,
        }
    }
}

impl fmt::Display for BipartiteDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.dim_a, self.dim_b)
    }
}

/// A state of a bipartite system: Hermitian, positive semidefinite,
/// unit-trace matrix on the composite space, with recorded factor
/// dimensions.
///
/// All three defining properties are enforced on construction, each within
/// [`DENSITY_TOL`].
#[derive(Debug, Clone)]
pub struct DensityOperator {
    dims: BipartiteDims,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(dims: BipartiteDims, matrix: ComplexMatrix) -> Result<Self> {
        let n = dims.composite();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::ShapeMismatch {
                op: "density operator",
                left: (n, n),
                right: (matrix.rows(), matrix.cols()),
            });
        }
        let deviation = matrix.hermiticity_deviation()?;
        if deviation > DENSITY_TOL {
            return Err(Error::NotHermitian {
                deviation,
                tol: DENSITY_TOL,
            });
        }
        let trace_dev = (matrix.trace()? - Complex64::new(1.0, 0.0)).norm();
        if trace_dev > DENSITY_TOL {
            return Err(Error::TraceNotOne {
                deviation: trace_dev,
            });
        }
        let es = matrix::hermitian_eigensystem(&matrix)?;
        let lam_min = es.eigenvalues()[0];
        if lam_min < -DENSITY_TOL {
            return Err(Error::NegativeEigenvalue { value: lam_min });
        }
        Ok(Self { dims, matrix })
    }

    /// Projector |psi><psi| of a unit column vector. The vector is
    /// renormalized exactly before the outer product is formed.
    pub fn from_pure(psi: &ComplexMatrix, dims: BipartiteDims) -> Result<Self> {
        let n = dims.composite();
        if psi.cols() != 1 || psi.rows() != n {
            return Err(Error::ShapeMismatch {
                op: "pure state vector",
                left: (n, 1),
                right: (psi.rows(), psi.cols()),
            });
        }
        let norm = matrix::vec_norm(psi.entries());
        if (norm - 1.0).abs() > DENSITY_TOL {
            return Err(Error::NotNormalized { norm });
        }
        let v: Vec<Complex64> = psi.entries().iter().map(|z| z / norm).collect();
        let mut m = ComplexMatrix::zeros(n, n)?;
        m.add_scaled_outer(&v, 1.0);
        Self::new(dims, m)
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// trace(rho^2); equals the squared Frobenius norm for Hermitian rho.
    pub fn purity(&self) -> f64 {
        let f = self.matrix.frobenius_norm();
        f * f
    }
}

/// Reduced state of subsystem 1: `out[i, i'] = sum_j rho[(i db + j), (i' db + j)]`.
pub fn partial_trace_over_2(rho: &DensityOperator) -> ComplexMatrix {
    let da = rho.dims.dim_a();
    let db = rho.dims.dim_b();
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(da, da).expect("dims validated on construction");
    for i in 0..da {
        for ip in 0..da {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..db {
                s += m.get(i * db + j, ip * db + j);
            }
            out.set(i, ip, s);
        }
    }
    out
}

/// Reduced state of subsystem 2: `out[j, j'] = sum_i rho[(i db + j), (i db + j')]`.
pub fn partial_trace_over_1(rho: &DensityOperator) -> ComplexMatrix {
    let da = rho.dims.dim_a();
    let db = rho.dims.dim_b();
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(db, db).expect("dims validated on construction");
    for j in 0..db {
        for jp in 0..db {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..da {
                s += m.get(i * db + j, i * db + jp);
            }
            out.set(j, jp, s);
        }
    }
    out
}

/// Both reduced states of a composite-space column vector, computed without
/// forming the projector: `red1 = M M^dagger` and `red2[j,j'] = sum_i
/// psi[i db + j] conj(psi[i db + j'])` for the reshaped coefficient matrix M.
pub(crate) fn reduced_of_vector(
    psi: &[Complex64],
    dims: BipartiteDims,
) -> (ComplexMatrix, ComplexMatrix) {
    let da = dims.dim_a();
    let db = dims.dim_b();
    debug_assert_eq!(psi.len(), dims.composite());
    let mut red1 = ComplexMatrix::zeros(da, da).expect("dims validated");
    let mut red2 = ComplexMatrix::zeros(db, db).expect("dims validated");
    for i in 0..da {
        for ip in 0..da {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..db {
                s += psi[i * db + j] * psi[ip * db + j].conj();
            }
            red1.set(i, ip, s);
        }
    }
    for j in 0..db {
        for jp in 0..db {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..da {
                s += psi[i * db + j] * psi[i * db + jp].conj();
            }
            red2.set(j, jp, s);
        }
    }
    (red1, red2)
}

/// The three range dimensions (d1, d2, d3) of a composite state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankTriple {
    pub d1: usize,
    pub d2: usize,
    pub d3: usize,
}

impl fmt::Display for RankTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.d1, self.d2, self.d3)
    }
}

/// Numerical ranks of (Tr_2 rho, Tr_1 rho, rho).
pub fn rank_triple(rho: &DensityOperator, rank_tol: f64) -> Result<RankTriple> {
    let d1 = matrix::numerical_rank(&partial_trace_over_2(rho), rank_tol)?;
    let d2 = matrix::numerical_rank(&partial_trace_over_1(rho), rank_tol)?;
    let d3 = matrix::numerical_rank(rho.matrix(), rank_tol)?;
    Ok(RankTriple { d1, d2, d3 })
}

/// Number of singular values of the reshaped coefficient matrix above
/// `rank_tol * max(1, sigma_max)`.
pub fn schmidt_rank(psi: &ComplexMatrix, dims: BipartiteDims, rank_tol: f64) -> Result<usize> {
    let n = dims.composite();
    if psi.cols() != 1 || psi.rows() != n {
        return Err(Error::ShapeMismatch {
            op: "schmidt_rank vector",
            left: (n, 1),
            right: (psi.rows(), psi.cols()),
        });
    }
    let norm = matrix::vec_norm(psi.entries());
    if (norm - 1.0).abs() > DENSITY_TOL {
        return Err(Error::NotNormalized { norm });
    }
    let coeff = ComplexMatrix::new(dims.dim_a(), dims.dim_b(), psi.entries().to_vec())?;
    let sv = matrix::singular_values(&coeff);
    let s_max = sv.first().copied().unwrap_or(0.0);
    let threshold = rank_tol * s_max.max(1.0);
    Ok(sv.iter().filter(|&&s| s > threshold).count())
}

/// Outcome of the product-form test, with the Frobenius residual against
/// the reconstructed product of the reduced states.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CorrelationVerdict {
    pub uncorrelated: bool,
    pub residual: f64,
}

/// Tests `rho == Tr_2(rho) (x) Tr_1(rho)` within `prod_tol` in Frobenius
/// distance. The residual is reported alongside the verdict.
pub fn is_uncorrelated(rho: &DensityOperator, prod_tol: f64) -> CorrelationVerdict {
    let product = matrix::tensor_product(&partial_trace_over_2(rho), &partial_trace_over_1(rho))
        .expect("product of reduced states stays within the composite size");
    let residual = matrix::frobenius_distance(rho.matrix(), &product).expect("same shape");
    CorrelationVerdict {
        uncorrelated: residual < prod_tol,
        residual,
    }
}

/// Exchanges the two factors: conjugation by the permutation taking
/// composite index `i * db + j` to `j * da + i`. The rank triple of the
/// output is (d2, d1, d3) of the input.
pub fn swap_subsystems(rho: &DensityOperator) -> DensityOperator {
    let da = rho.dims.dim_a();
    let db = rho.dims.dim_b();
    let n = da * db;
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(n, n).expect("same size as input");
    for i in 0..da {
        for j in 0..db {
            for ip in 0..da {
                for jp in 0..db {
                    out.set(j * da + i, jp * da + ip, m.get(i * db + j, ip * db + jp));
                }
            }
        }
    }
    DensityOperator::new(rho.dims.swapped(), out)
        .expect("entry permutation preserves the density-operator invariants")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{construct_subbasis_mixture, construct_uncorrelated, WeightVector};
    use crate::matrix::{frobenius_distance, gaussian_complex, tensor_product};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn bell_state() -> DensityOperator {
        let dims = BipartiteDims::new(2, 2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi =
            ComplexMatrix::new(4, 1, vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap();
        DensityOperator::from_pure(&psi, dims).unwrap()
    }

    fn seeded_state(da: usize, db: usize, mix_rank: usize, seed: u64) -> DensityOperator {
        let dims = BipartiteDims::new(da, db).unwrap();
        crate::construct::sample_random_state(dims, mix_rank, seed).unwrap()
    }

    fn product_state() -> DensityOperator {
        let a = WeightVector::new(vec![0.6, 0.4]).unwrap();
        let b = WeightVector::new(vec![0.5, 0.3, 0.2]).unwrap();
        construct_uncorrelated(2, 3, &a, &b).unwrap()
    }

    #[test]
    fn partial_traces_of_bell_state() {
        let rho = bell_state();
        let half_identity = ComplexMatrix::identity(2).unwrap().scaled(0.5);
        assert!(frobenius_distance(&partial_trace_over_2(&rho), &half_identity).unwrap() < 1e-12);
        assert!(frobenius_distance(&partial_trace_over_1(&rho), &half_identity).unwrap() < 1e-12);
    }

    #[test]
    fn partial_traces_recover_product_factors() {
        let rho = product_state();
        let rho1 = partial_trace_over_2(&rho);
        let rho2 = partial_trace_over_1(&rho);
        let a = ComplexMatrix::from_diagonal(&[0.6, 0.4]).unwrap();
        let b = ComplexMatrix::from_diagonal(&[0.5, 0.3, 0.2]).unwrap();
        assert!(frobenius_distance(&rho1, &a).unwrap() < 1e-12);
        assert!(frobenius_distance(&rho2, &b).unwrap() < 1e-12);
    }

    #[test]
    fn partial_traces_match_index_loop_oracle() {
        let rho = seeded_state(3, 2, 4, 33);
        let m = rho.matrix();
        let rho1 = partial_trace_over_2(&rho);
        let rho2 = partial_trace_over_1(&rho);
        for i in 0..3 {
            for ip in 0..3 {
                let mut s = c(0.0, 0.0);
                for j in 0..2 {
                    s += m.get(i * 2 + j, ip * 2 + j);
                }
                assert!((rho1.get(i, ip) - s).norm() < 1e-12);
            }
        }
        for j in 0..2 {
            for jp in 0..2 {
                let mut s = c(0.0, 0.0);
                for i in 0..3 {
                    s += m.get(i * 2 + j, i * 2 + jp);
                }
                assert!((rho2.get(j, jp) - s).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rank_triple_of_bell_state() {
        let ranks = rank_triple(&bell_state(), crate::matrix::DEFAULT_RANK_TOL).unwrap();
        assert_eq!(
            ranks,
            RankTriple {
                d1: 2,
                d2: 2,
                d3: 1
            }
        );
    }

    #[test]
    fn rank_triple_of_full_product() {
        let a = WeightVector::uniform(2).unwrap();
        let rho = construct_uncorrelated(2, 2, &a, &a).unwrap();
        let ranks = rank_triple(&rho, crate::matrix::DEFAULT_RANK_TOL).unwrap();
        assert_eq!(
            ranks,
            RankTriple {
                d1: 2,
                d2: 2,
                d3: 4
            }
        );
    }

    #[test]
    fn rank_triple_of_subbasis_mixture() {
        let spectrum = WeightVector::linear(2).unwrap();
        let rho = construct_subbasis_mixture(3, 2, 2, &spectrum, 17).unwrap();
        let ranks = rank_triple(&rho, crate::matrix::DEFAULT_RANK_TOL).unwrap();
        assert_eq!(
            ranks,
            RankTriple {
                d1: 3,
                d2: 2,
                d3: 2
            }
        );
    }

    #[test]
    fn schmidt_rank_cases() {
        let dims = BipartiteDims::new(2, 2).unwrap();
        let product = ComplexMatrix::basis_column(4, 0).unwrap();
        assert_eq!(schmidt_rank(&product, dims, 1e-9).unwrap(), 1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell =
            ComplexMatrix::new(4, 1, vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap();
        assert_eq!(schmidt_rank(&bell, dims, 1e-9).unwrap(), 2);
        let unnormalized = ComplexMatrix::basis_column(4, 0).unwrap().scaled(2.0);
        assert!(matches!(
            schmidt_rank(&unnormalized, dims, 1e-9),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn schmidt_rank_matches_reduced_ranks() {
        let dims = BipartiteDims::new(3, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut v: Vec<Complex64> = (0..12).map(|_| gaussian_complex(&mut rng)).collect();
        let norm = crate::matrix::vec_norm(&v);
        for z in &mut v {
            *z /= norm;
        }
        let psi = ComplexMatrix::new(12, 1, v).unwrap();
        let rho = DensityOperator::from_pure(&psi, dims).unwrap();
        let ranks = rank_triple(&rho, 1e-9).unwrap();
        let schmidt = schmidt_rank(&psi, dims, 1e-9).unwrap();
        assert_eq!(ranks.d3, 1);
        assert_eq!(ranks.d1, schmidt);
        assert_eq!(ranks.d2, schmidt);
    }

    #[test]
    fn product_state_is_uncorrelated() {
        let verdict = is_uncorrelated(&product_state(), DEFAULT_PROD_TOL);
        assert!(verdict.uncorrelated);
        assert!(verdict.residual < 1e-12);
    }

    #[test]
    fn bell_state_residual_is_half_sqrt_three() {
        // || |phi+><phi+| - I/4 ||_F = sqrt(12/16).
        let verdict = is_uncorrelated(&bell_state(), DEFAULT_PROD_TOL);
        assert!(!verdict.uncorrelated);
        assert!((verdict.residual - 0.75f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn swap_fixes_bell_state() {
        let rho = bell_state();
        let swapped = swap_subsystems(&rho);
        assert!(frobenius_distance(rho.matrix(), swapped.matrix()).unwrap() < 1e-15);
    }

    #[test]
    fn swap_exchanges_product_factors() {
        let rho = product_state();
        let swapped = swap_subsystems(&rho);
        let a = WeightVector::new(vec![0.5, 0.3, 0.2]).unwrap();
        let b = WeightVector::new(vec![0.6, 0.4]).unwrap();
        let expected = construct_uncorrelated(3, 2, &a, &b).unwrap();
        assert!(frobenius_distance(swapped.matrix(), expected.matrix()).unwrap() < 1e-12);
        let ranks = rank_triple(&swapped, 1e-9).unwrap();
        assert_eq!(
            ranks,
            RankTriple {
                d1: 3,
                d2: 2,
                d3: 6
            }
        );
    }

    #[test]
    fn double_swap_is_identity() {
        let rho = seeded_state(3, 2, 3, 5);
        let back = swap_subsystems(&swap_subsystems(&rho));
        assert!(frobenius_distance(rho.matrix(), back.matrix()).unwrap() < 1e-14);
        assert_eq!(back.dims(), rho.dims());
    }

    #[test]
    fn density_operator_validation() {
        let dims = BipartiteDims::new(2, 1).unwrap();
        // Non-Hermitian.
        let skew = ComplexMatrix::new(
            2,
            2,
            vec![c(0.5, 0.0), c(0.2, 0.0), c(0.0, 0.0), c(0.5, 0.0)],
        )
        .unwrap();
        assert!(matches!(
            DensityOperator::new(dims, skew),
            Err(Error::NotHermitian { .. })
        ));
        // Wrong trace.
        let double = ComplexMatrix::from_diagonal(&[1.0, 1.0]).unwrap();
        assert!(matches!(
            DensityOperator::new(dims, double),
            Err(Error::TraceNotOne { .. })
        ));
        // Negative eigenvalue.
        let indefinite = ComplexMatrix::from_diagonal(&[1.5, -0.5]).unwrap();
        assert!(matches!(
            DensityOperator::new(dims, indefinite),
            Err(Error::NegativeEigenvalue { .. })
        ));
        // Wrong shape.
        let three = ComplexMatrix::identity(3).unwrap().scaled(1.0 / 3.0);
        assert!(matches!(
            DensityOperator::new(dims, three),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn bipartite_dims_limits() {
        assert!(matches!(
            BipartiteDims::new(0, 2),
            Err(Error::ZeroDimension)
        ));
        assert!(matches!(
            BipartiteDims::new(65, 64),
            Err(Error::SizeLimit { .. })
        ));
        assert_eq!(BipartiteDims::new(64, 64).unwrap().composite(), 4096);
    }

    #[test]
    fn tensor_product_of_reduced_states_matches_construct() {
        let rho = product_state();
        let product =
            tensor_product(&partial_trace_over_2(&rho), &partial_trace_over_1(&rho)).unwrap();
        assert!(frobenius_distance(rho.matrix(), &product).unwrap() < 1e-12);
    }
}
