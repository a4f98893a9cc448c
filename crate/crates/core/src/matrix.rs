//! Dense complex matrices and the spectral primitives built on them.
//!
//! Everything in this crate runs on [`ComplexMatrix`], a row-major dense
//! matrix of double-precision complex entries. Structural operations
//! (tensor products, mixtures, norms) are implemented directly on the
//! row-major storage; Hermitian eigendecompositions and singular values are
//! delegated to `nalgebra` and re-checked against the reconstruction
//! identity before being returned.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Hard cap on the extent of any matrix in either direction.
pub const MAX_MATRIX_DIM: usize = 4096;

/// Default relative threshold for counting an eigenvalue or singular value
/// as nonzero: values above `rank_tol * max(1, lambda_max)` count.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Maximum entrywise deviation |m - m^dagger| tolerated for inputs that
/// must be Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Relative Frobenius tolerance for the eigendecomposition reconstruction
/// check, with an absolute floor of 1e-12.
const EIGEN_RECONSTRUCTION_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense rectangular complex matrix, row-major.
///
/// Invariants: `entries.len() == rows * cols`, both extents within
/// [`MAX_MATRIX_DIM`], and every entry component finite. Column vectors are
/// matrices with `cols == 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

fn check_extent(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::ZeroDimension);
    }
    if rows > MAX_MATRIX_DIM || cols > MAX_MATRIX_DIM {
        return Err(Error::SizeLimit {
            rows,
            cols,
            max: MAX_MATRIX_DIM,
        });
    }
    Ok(())
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        check_extent(rows, cols)?;
        if entries.len() != rows * cols {
            return Err(Error::EntryCount {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        check_extent(rows, cols)?;
        Ok(Self {
            rows,
            cols,
            entries: vec![ZERO; rows * cols],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim, dim)?;
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        Ok(m)
    }

    /// Square matrix with the given real diagonal.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(diag.len(), diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, Complex64::new(d, 0.0));
        }
        Ok(m)
    }

    /// Standard basis column vector |k> in a `dim`-dimensional space.
    pub fn basis_column(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, dim });
        }
        let mut m = Self::zeros(dim, 1)?;
        m.set(k, 0, Complex64::new(1.0, 0.0));
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).conj());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch {
                op: "matmul",
                left: (self.rows, self.cols),
                right: (rhs.rows, rhs.cols),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols)?;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).map(|i| self.get(i, i)).sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Max entrywise |m - m^dagger|.
    pub fn hermiticity_deviation(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut dev = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                if d > dev {
                    dev = d;
                }
            }
        }
        Ok(dev)
    }

    /// `self += weight * v v^dagger` for a column `v` of matching length.
    pub(crate) fn add_scaled_outer(&mut self, v: &[Complex64], weight: f64) {
        debug_assert!(self.is_square() && v.len() == self.rows);
        for i in 0..self.rows {
            let wi = v[i] * weight;
            for (j, vj) in v.iter().enumerate() {
                let val = self.get(i, j) + wi * vj.conj();
                self.set(i, j, val);
            }
        }
    }
}

/// Kronecker product with subsystem-1-major indexing: composite row index
/// `i_a * b.rows + i_b`, same for columns.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    if rows > MAX_MATRIX_DIM || cols > MAX_MATRIX_DIM {
        return Err(Error::SizeLimit {
            rows,
            cols,
            max: MAX_MATRIX_DIM,
        });
    }
    let mut out = ComplexMatrix::zeros(rows, cols)?;
    for ia in 0..a.rows {
        for ja in 0..a.cols {
            let av = a.get(ia, ja);
            if av == ZERO {
                continue;
            }
            for ib in 0..b.rows {
                for jb in 0..b.cols {
                    out.set(ia * b.rows + ib, ja * b.cols + jb, av * b.get(ib, jb));
                }
            }
        }
    }
    Ok(out)
}

/// Frobenius distance sqrt(sum |a - b|^2) between same-shaped matrices.
pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Error::ShapeMismatch {
            op: "frobenius_distance",
            left: (a.rows, a.cols),
            right: (b.rows, b.cols),
        });
    }
    Ok(a.entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted ascending; the columns of `eigenvectors` are the
/// matching orthonormal eigenvectors. Degenerate eigenvalues carry no
/// canonical eigenvector ordering, but the output is reproducible for
/// bit-identical input.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    /// Eigenpairs above the rank threshold `rank_tol * max(1, lambda_max)`,
    /// largest eigenvalue first.
    pub fn support(&self, rank_tol: f64) -> Vec<(f64, Vec<Complex64>)> {
        let lam_max = self.eigenvalues.last().copied().unwrap_or(0.0);
        let threshold = rank_tol * lam_max.max(1.0);
        self.eigenvalues
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &l)| l > threshold)
            .map(|(k, &l)| (l, self.eigenvectors.column(k)))
            .collect()
    }
}

pub(crate) fn to_dmatrix(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(m.rows, m.cols, &m.entries)
}

/// Hermitian eigendecomposition with ascending eigenvalues.
///
/// The decomposition is validated against the reconstruction identity
/// `V diag(lambda) V^dagger = h` before being returned.
pub fn hermitian_eigensystem(h: &ComplexMatrix) -> Result<EigenSystem> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.rows,
            cols: h.cols,
        });
    }
    let deviation = h.hermiticity_deviation()?;
    if deviation > HERMITICITY_TOL {
        return Err(Error::NotHermitian {
            deviation,
            tol: HERMITICITY_TOL,
        });
    }
    let n = h.rows;
    let se = to_dmatrix(h).symmetric_eigen();

    // Ascending order; sort_by is stable, so exact ties keep backend order
    // and the result is reproducible for identical input bits.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[a]
            .partial_cmp(&se.eigenvalues[b])
            .expect("eigenvalues of a finite matrix are finite")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for &k in &order {
            entries.push(se.eigenvectors[(i, k)]);
        }
    }
    let eigenvectors = ComplexMatrix::new(n, n, entries)?;

    let mut residual_sq = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut v = ZERO;
            for (k, &lambda) in eigenvalues.iter().enumerate() {
                v += eigenvectors.get(i, k) * lambda * eigenvectors.get(j, k).conj();
            }
            residual_sq += (v - h.get(i, j)).norm_sqr();
        }
    }
    let residual = residual_sq.sqrt();
    let tol = (EIGEN_RECONSTRUCTION_TOL * h.frobenius_norm()).max(1e-12);
    if residual > tol {
        return Err(Error::EigenFailure { residual });
    }
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Number of eigenvalues of a Hermitian PSD matrix above the threshold
/// `rank_tol * max(1, lambda_max)`.
pub fn numerical_rank(h: &ComplexMatrix, rank_tol: f64) -> Result<usize> {
    let es = hermitian_eigensystem(h)?;
    let lam_max = *es.eigenvalues.last().expect("matrices are nonempty");
    let threshold = rank_tol * lam_max.max(1.0);
    let lam_min = es.eigenvalues[0];
    if lam_min < -threshold {
        return Err(Error::NegativeEigenvalue { value: lam_min });
    }
    Ok(es.eigenvalues.iter().filter(|&&l| l > threshold).count())
}

/// Singular values, descending.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let sv = to_dmatrix(m).singular_values();
    let mut out: Vec<f64> = sv.iter().copied().collect();
    out.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
    out
}

pub(crate) fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn project_out(q: &[Complex64], v: &mut [Complex64]) {
    let c = inner(q, v);
    for (vi, qi) in v.iter_mut().zip(q) {
        *vi -= c * qi;
    }
}

/// Modified Gram-Schmidt with a second re-orthogonalization pass. Columns
/// whose residual norm falls at or below `drop_tol` are discarded.
pub(crate) fn orthonormalize_columns(
    columns: &[Vec<Complex64>],
    drop_tol: f64,
) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for col in columns {
        let mut v = col.clone();
        for _ in 0..2 {
            for q in &basis {
                project_out(q, &mut v);
            }
        }
        let n = vec_norm(&v);
        if n > drop_tol {
            for z in &mut v {
                *z /= n;
            }
            basis.push(v);
        }
    }
    basis
}

/// Projector onto the span of orthonormal columns, as a dim x dim matrix.
pub(crate) fn projector(dim: usize, columns: &[Vec<Complex64>]) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(dim, dim).expect("dim within limits");
    for col in columns {
        p.add_scaled_outer(col, 1.0);
    }
    p
}

pub(crate) fn gaussian_complex<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Unitary matrix obtained by orthonormalizing a seeded complex Gaussian
/// matrix. Deterministic per `(dim, seed)`.
pub fn random_unitary(dim: usize, seed: u64) -> Result<ComplexMatrix> {
    check_extent(dim, dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while columns.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(&mut rng)).collect();
        for _ in 0..2 {
            for q in &columns {
                project_out(q, &mut v);
            }
        }
        let n = vec_norm(&v);
        if n < 1e-8 {
            // A numerically dependent Gaussian draw; redraw the column.
            continue;
        }
        for z in &mut v {
            *z /= n;
        }
        columns.push(v);
    }
    let mut u = ComplexMatrix::zeros(dim, dim)?;
    for (c, col) in columns.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            u.set(i, c, z);
        }
    }
    Ok(u)
}
