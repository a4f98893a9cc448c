//! Classification of rank triples and construction of witness states.
//!
//! A triple (d1, d2, d3) of range dimensions is realizable by some bipartite
//! state exactly when the cyclic inequalities hold:
//!
//! ```text
//! d1 <= d2 d3,    d2 <= d3 d1,    d3 <= d1 d2
//! ```
//!
//! A correlated witness additionally requires d1, d2 >= 2 (states with a
//! one-dimensional reduced range are necessarily products), and an
//! uncorrelated witness exists exactly when d3 = d1 d2. The constructors
//! here realize each admissible case: a mixture of product-basis projectors
//! when d3 dominates, a mixture of entangled vectors over disjoint
//! subbases of the first factor when d1 dominates, and a plain tensor
//! product of diagonal factors for the uncorrelated case.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{self, ComplexMatrix, DEFAULT_RANK_TOL};
use crate::state::{
    is_uncorrelated, rank_triple, swap_subsystems, BipartiteDims, DensityOperator, RankTriple,
    DEFAULT_PROD_TOL,
};

/// Residual above which a witness counts as robustly correlated. Residuals
/// between [`DEFAULT_PROD_TOL`] and this margin are treated as ambiguous.
pub const CORRELATED_RESIDUAL_MARGIN: f64 = 1e-6;

const MAX_CORRELATED_RETRIES: u64 = 8;

/// A dimension that is either a positive natural or infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtendedDim {
    Finite(usize),
    Infinite,
}

impl ExtendedDim {
    fn as_value(self) -> Option<u128> {
        match self {
            ExtendedDim::Finite(n) => Some(n as u128),
            ExtendedDim::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedDim::Infinite)
    }
}

impl fmt::Display for ExtendedDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedDim::Finite(n) => write!(f, "{n}"),
            ExtendedDim::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for ExtendedDim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("inf") {
            return Ok(ExtendedDim::Infinite);
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(ExtendedDim::Finite(n)),
            _ => Err(Error::InvalidDimension {
                token: s.to_owned(),
            }),
        }
    }
}

/// `a <= b` in the extended arithmetic (None encodes infinity): anything
/// <= inf, inf <= finite is false.
fn ext_le(a: Option<u128>, b: Option<u128>) -> bool {
    match (a, b) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(x), Some(y)) => x <= y,
    }
}

/// `a * b` in the extended arithmetic: inf times anything >= 1 is inf.
fn ext_mul(a: Option<u128>, b: Option<u128>) -> Option<u128> {
    Some(a? * b?)
}

/// Diagnostic codes attached to a classification verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReasonCode {
    /// d1 > d2 d3.
    #[serde(rename = "VIOLATES_INEQ_1")]
    ViolatesIneq1,
    /// d2 > d3 d1.
    #[serde(rename = "VIOLATES_INEQ_2")]
    ViolatesIneq2,
    /// d3 > d1 d2.
    #[serde(rename = "VIOLATES_INEQ_3")]
    ViolatesIneq3,
    /// d1 < 2 or d2 < 2: every state with this triple is a product.
    #[serde(rename = "LOWER_BOUND_FAIL")]
    LowerBoundFail,
    /// d3 = d1 d2: an uncorrelated witness exists.
    #[serde(rename = "PRODUCT_MATCH")]
    ProductMatch,
    /// d3 != d1 d2: no uncorrelated witness exists.
    #[serde(rename = "PRODUCT_MISMATCH")]
    ProductMismatch,
    /// Exactly one of the three dimensions is infinite.
    #[serde(rename = "EXACTLY_ONE_INFINITE")]
    ExactlyOneInfinite,
}

impl fmt::Display for ReasonCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ReasonCode::ViolatesIneq1 => "VIOLATES_INEQ_1",
            ReasonCode::ViolatesIneq2 => "VIOLATES_INEQ_2",
            ReasonCode::ViolatesIneq3 => "VIOLATES_INEQ_3",
            ReasonCode::LowerBoundFail => "LOWER_BOUND_FAIL",
            ReasonCode::ProductMatch => "PRODUCT_MATCH",
            ReasonCode::ProductMismatch => "PRODUCT_MISMATCH",
            ReasonCode::ExactlyOneInfinite => "EXACTLY_ONE_INFINITE",
        };
        f.write_str(s)
    }
}

/// Classification verdict for a finite rank triple.
#[derive(Debug, Clone, Serialize)]
pub struct TripleClass {
    /// Some state realizes the triple (the cyclic inequalities hold).
    pub exists: bool,
    /// A correlated state realizes it (exists and d1, d2 >= 2).
    pub correlated_exists: bool,
    /// An uncorrelated state realizes it (d3 = d1 d2).
    pub uncorrelated_exists: bool,
    pub reasons: Vec<ReasonCode>,
}

/// Existence verdict for a triple that may contain infinite entries.
#[derive(Debug, Clone, Serialize)]
pub struct ExtendedClass {
    pub exists: bool,
    pub reasons: Vec<ReasonCode>,
}

/// Evaluates the cyclic inequalities, the common lower bound, and the
/// product condition for a finite triple.
pub fn classify_triple(d1: usize, d2: usize, d3: usize) -> Result<TripleClass> {
    if d1 == 0 || d2 == 0 || d3 == 0 {
        return Err(Error::ZeroDimension);
    }
    let (a, b, c) = (d1 as u128, d2 as u128, d3 as u128);
    let mut reasons = Vec::new();
    let ineq1 = a <= b * c;
    let ineq2 = b <= c * a;
    let ineq3 = c <= a * b;
    if !ineq1 {
        reasons.push(ReasonCode::ViolatesIneq1);
    }
    if !ineq2 {
        reasons.push(ReasonCode::ViolatesIneq2);
    }
    if !ineq3 {
        reasons.push(ReasonCode::ViolatesIneq3);
    }
    let exists = ineq1 && ineq2 && ineq3;
    let lower_bound = d1 >= 2 && d2 >= 2;
    if !lower_bound {
        reasons.push(ReasonCode::LowerBoundFail);
    }
    let product = c == a * b;
    reasons.push(if product {
        ReasonCode::ProductMatch
    } else {
        ReasonCode::ProductMismatch
    });
    Ok(TripleClass {
        exists,
        correlated_exists: exists && lower_bound,
        uncorrelated_exists: product,
        reasons,
    })
}

/// Evaluates the cyclic inequalities over naturals extended with infinity.
/// A triple with exactly one infinite entry always fails one inequality.
pub fn classify_triple_extended(
    d1: ExtendedDim,
    d2: ExtendedDim,
    d3: ExtendedDim,
) -> Result<ExtendedClass> {
    for d in [d1, d2, d3] {
        if d == ExtendedDim::Finite(0) {
            return Err(Error::ZeroDimension);
        }
    }
    let (v1, v2, v3) = (d1.as_value(), d2.as_value(), d3.as_value());
    let mut reasons = Vec::new();
    if !ext_le(v1, ext_mul(v2, v3)) {
        reasons.push(ReasonCode::ViolatesIneq1);
    }
    if !ext_le(v2, ext_mul(v3, v1)) {
        reasons.push(ReasonCode::ViolatesIneq2);
    }
    if !ext_le(v3, ext_mul(v1, v2)) {
        reasons.push(ReasonCode::ViolatesIneq3);
    }
    let infinite_count = [d1, d2, d3].iter().filter(|d| d.is_infinite()).count();
    if infinite_count == 1 {
        reasons.push(ReasonCode::ExactlyOneInfinite);
    }
    let exists = !reasons.iter().any(|r| {
        matches!(
            r,
            ReasonCode::ViolatesIneq1 | ReasonCode::ViolatesIneq2 | ReasonCode::ViolatesIneq3
        )
    });
    Ok(ExtendedClass { exists, reasons })
}

/// Strictly positive weights summing to one within 1e-12.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::ZeroDimension);
        }
        for &w in &weights {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::NonPositiveWeight { value: w });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::WeightSumNotOne { sum });
        }
        Ok(Self(weights))
    }

    /// Equal weights 1/len.
    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::ZeroDimension);
        }
        Self::new(vec![1.0 / len as f64; len])
    }

    /// Strictly decreasing weights proportional to (len, len-1, ..., 1).
    /// This is the default spectrum for witnesses: it keeps every weight
    /// well above the rank threshold and does not factorize across product
    /// grids.
    pub fn linear(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::ZeroDimension);
        }
        let raw: Vec<f64> = (0..len).map(|n| (len - n) as f64).collect();
        let sum: f64 = raw.iter().sum();
        Self::new(raw.into_iter().map(|w| w / sum).collect())
    }

    /// Seeded positive weights, uniform in [0.1, 1) before normalization.
    pub fn seeded(len: usize, seed: u64) -> Result<Self> {
        if len == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..len).map(|_| rng.gen_range(0.1..1.0)).collect();
        let sum: f64 = raw.iter().sum();
        Self::new(raw.into_iter().map(|w| w / sum).collect())
    }

    /// Convex mixture (1 - portion) * self + portion * other, renormalized.
    fn mixed_with(&self, other: &WeightVector, portion: f64) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::WeightCount {
                expected: self.len(),
                got: other.len(),
            });
        }
        let raw: Vec<f64> = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (1.0 - portion) * a + portion * b)
            .collect();
        let sum: f64 = raw.iter().sum();
        Self::new(raw.into_iter().map(|w| w / sum).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// The mixture of product-basis projectors used when d3 dominates
/// (d2 <= d1 <= d3 <= d1 d2).
///
/// The projector sequence starts with the diagonal pairs (1,1)..(d2,d2),
/// continues down the first column with (d2+1,1)..(d1,1), and fills the
/// remaining d3 - d1 slots with unused pairs in lexicographic (i, j) order.
/// The output lives on ambient dims (d1, d2) and has rank triple
/// (d1, d2, d3) exactly.
pub fn construct_product_mixture(
    d1: usize,
    d2: usize,
    d3: usize,
    weights: &WeightVector,
) -> Result<DensityOperator> {
    if d1 == 0 || d2 == 0 || d3 == 0 {
        return Err(Error::ZeroDimension);
    }
    if !(d2 <= d1 && d1 <= d3 && d3 <= d1 * d2) {
        return Err(Error::OrderingViolation {
            detail: format!(
                "product mixture requires d2 <= d1 <= d3 <= d1*d2, got ({d1}, {d2}, {d3})"
            ),
        });
    }
    if weights.len() != d3 {
        return Err(Error::WeightCount {
            expected: d3,
            got: weights.len(),
        });
    }
    let dims = BipartiteDims::new(d1, d2)?;

    // Pair sequence, 0-indexed.
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(d3);
    for k in 0..d2 {
        pairs.push((k, k));
    }
    for k in d2..d1 {
        pairs.push((k, 0));
    }
    'outer: for i in 0..d1 {
        for j in 0..d2 {
            if pairs.len() == d3 {
                break 'outer;
            }
            if !pairs.contains(&(i, j)) {
                pairs.push((i, j));
            }
        }
    }
    debug_assert_eq!(pairs.len(), d3);

    let n = dims.composite();
    let mut m = ComplexMatrix::zeros(n, n)?;
    for (&w, &(i, j)) in weights.as_slice().iter().zip(&pairs) {
        let idx = i * d2 + j;
        m.set(idx, idx, Complex64::new(w, 0.0));
    }
    DensityOperator::new(dims, m)
}

/// The mixture of entangled vectors over disjoint subbases of the first
/// factor, used when d1 dominates (d2 <= d1, d3 <= d1 <= d2 d3).
///
/// The d1 first-factor basis vectors are split into d3 consecutive blocks
/// of balanced sizes (larger blocks first). The second-factor index counts
/// cumulatively across blocks and wraps modulo d2, so each block pairs its
/// vectors with distinct second-factor basis vectors. The block amplitudes
/// are seeded nonzero complex numbers, normalized per block. The output
/// lives on ambient dims (d1, d2) and has rank triple (d1, d2, d3) exactly.
pub fn construct_subbasis_mixture(
    d1: usize,
    d2: usize,
    d3: usize,
    spectrum: &WeightVector,
    amplitude_seed: u64,
) -> Result<DensityOperator> {
    if d1 == 0 || d2 == 0 || d3 == 0 {
        return Err(Error::ZeroDimension);
    }
    if !(d2 <= d1 && d3 <= d1 && d1 <= d2 * d3) {
        return Err(Error::OrderingViolation {
            detail: format!(
                "subbasis mixture requires d2 <= d1, d3 <= d1 <= d2*d3, got ({d1}, {d2}, {d3})"
            ),
        });
    }
    if spectrum.len() != d3 {
        return Err(Error::WeightCount {
            expected: d3,
            got: spectrum.len(),
        });
    }
    let dims = BipartiteDims::new(d1, d2)?;

    // Balanced consecutive blocks, larger ones first. Each block size is at
    // most ceil(d1/d3) <= d2 because d1 <= d2*d3.
    let base = d1 / d3;
    let remainder = d1 % d3;
    let block_sizes = (0..d3).map(|n| if n < remainder { base + 1 } else { base });

    let mut rng = ChaCha8Rng::seed_from_u64(amplitude_seed);
    let n = dims.composite();
    let mut m = ComplexMatrix::zeros(n, n)?;
    let mut cursor = 0usize;
    for (block, r_n) in block_sizes.zip(spectrum.as_slice()) {
        let mut amplitudes: Vec<Complex64> = Vec::with_capacity(block);
        for _ in 0..block {
            let modulus: f64 = rng.gen_range(0.3..=1.0);
            let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            amplitudes.push(Complex64::from_polar(modulus, phase));
        }
        if amplitudes.iter().any(|a| a.norm() == 0.0) {
            return Err(Error::ZeroAmplitude);
        }
        let norm = matrix::vec_norm(&amplitudes);
        let mut psi = vec![Complex64::new(0.0, 0.0); n];
        for (k, alpha) in amplitudes.iter().enumerate() {
            let i = cursor + k;
            let j = i % d2;
            psi[i * d2 + j] = alpha / norm;
        }
        m.add_scaled_outer(&psi, *r_n);
        cursor += block;
    }
    debug_assert_eq!(cursor, d1);
    DensityOperator::new(dims, m)
}

/// Tensor product of diagonal factor states with the given spectra:
/// rank triple (d1, d2, d1 d2), uncorrelated by construction.
pub fn construct_uncorrelated(
    d1: usize,
    d2: usize,
    spectrum_a: &WeightVector,
    spectrum_b: &WeightVector,
) -> Result<DensityOperator> {
    if d1 == 0 || d2 == 0 {
        return Err(Error::ZeroDimension);
    }
    if spectrum_a.len() != d1 {
        return Err(Error::WeightCount {
            expected: d1,
            got: spectrum_a.len(),
        });
    }
    if spectrum_b.len() != d2 {
        return Err(Error::WeightCount {
            expected: d2,
            got: spectrum_b.len(),
        });
    }
    let dims = BipartiteDims::new(d1, d2)?;
    let a = ComplexMatrix::from_diagonal(spectrum_a.as_slice())?;
    let b = ComplexMatrix::from_diagonal(spectrum_b.as_slice())?;
    let m = matrix::tensor_product(&a, &b)?;
    DensityOperator::new(dims, m)
}

/// What kind of witness a caller asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    Any,
    Correlated,
    Uncorrelated,
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            WitnessKind::Any => "any",
            WitnessKind::Correlated => "correlated",
            WitnessKind::Uncorrelated => "uncorrelated",
        };
        f.write_str(s)
    }
}

fn build_mixture(
    d1: usize,
    d2: usize,
    d3: usize,
    weights: &WeightVector,
    amplitude_seed: u64,
) -> Result<DensityOperator> {
    if d3 >= d1 && d3 >= d2 {
        if d1 >= d2 {
            construct_product_mixture(d1, d2, d3, weights)
        } else {
            Ok(swap_subsystems(&construct_product_mixture(
                d2, d1, d3, weights,
            )?))
        }
    } else if d1 >= d2 {
        construct_subbasis_mixture(d1, d2, d3, weights, amplitude_seed)
    } else {
        Ok(swap_subsystems(&construct_subbasis_mixture(
            d2,
            d1,
            d3,
            weights,
            amplitude_seed,
        )?))
    }
}

/// Builds a witness with the requested rank triple and correlation status,
/// or reports why none exists.
///
/// The classification gates the request. Granted uncorrelated requests go
/// through [`construct_uncorrelated`]; everything else routes to the
/// product-basis mixture when d3 dominates and to the subbasis mixture
/// otherwise, swapping the subsystems first when d1 < d2. The default
/// spectrum is the strictly decreasing linear one. Correlated requests are
/// verified post hoc: if the output lands within the ambiguity margin of
/// product form, the weights are deterministically perturbed (90% current,
/// 10% seeded redraw) and the build retries, at most eight times.
pub fn construct_witness(
    d1: usize,
    d2: usize,
    d3: usize,
    kind: WitnessKind,
    seed: u64,
) -> Result<DensityOperator> {
    let class = classify_triple(d1, d2, d3)?;
    let allowed = match kind {
        WitnessKind::Any => class.exists,
        WitnessKind::Correlated => class.correlated_exists,
        WitnessKind::Uncorrelated => class.uncorrelated_exists,
    };
    if !allowed {
        return Err(Error::Infeasible {
            d1,
            d2,
            d3,
            kind,
            reasons: class.reasons,
        });
    }
    let requested = RankTriple { d1, d2, d3 };

    let check_ranks = |rho: &DensityOperator| -> Result<()> {
        let got = rank_triple(rho, DEFAULT_RANK_TOL)?;
        if got != requested {
            return Err(Error::ConstructionFailed {
                detail: format!("witness has rank triple {got}, requested {requested}"),
            });
        }
        Ok(())
    };

    if kind == WitnessKind::Uncorrelated {
        let rho = construct_uncorrelated(
            d1,
            d2,
            &WeightVector::linear(d1)?,
            &WeightVector::linear(d2)?,
        )?;
        check_ranks(&rho)?;
        return Ok(rho);
    }

    let mut weights = WeightVector::linear(d3)?;
    let mut rho = build_mixture(d1, d2, d3, &weights, seed)?;
    check_ranks(&rho)?;
    if kind == WitnessKind::Any {
        return Ok(rho);
    }

    // Correlated: certify the residual, retrying with perturbed weights if
    // an unlucky spectrum lands too close to product form.
    for attempt in 1..=MAX_CORRELATED_RETRIES {
        let verdict = is_uncorrelated(&rho, DEFAULT_PROD_TOL);
        if !verdict.uncorrelated && verdict.residual > CORRELATED_RESIDUAL_MARGIN {
            return Ok(rho);
        }
        let redraw = WeightVector::seeded(d3, seed.wrapping_add(attempt))?;
        weights = weights.mixed_with(&redraw, 0.1)?;
        rho = build_mixture(d1, d2, d3, &weights, seed)?;
        check_ranks(&rho)?;
    }
    let verdict = is_uncorrelated(&rho, DEFAULT_PROD_TOL);
    if !verdict.uncorrelated && verdict.residual > CORRELATED_RESIDUAL_MARGIN {
        return Ok(rho);
    }
    Err(Error::ConstructionFailed {
        detail: format!(
            "correlated witness for {requested} stayed within {CORRELATED_RESIDUAL_MARGIN:e} of product form after {MAX_CORRELATED_RETRIES} retries"
        ),
    })
}

/// Normalized Wishart sample G G^dagger / tr(G G^dagger) from a seeded
/// complex Gaussian matrix G with `mix_rank` columns. The composite rank is
/// `mix_rank` generically.
pub fn sample_random_state(
    dims: BipartiteDims,
    mix_rank: usize,
    seed: u64,
) -> Result<DensityOperator> {
    let n = dims.composite();
    if mix_rank == 0 || mix_rank > n {
        return Err(Error::MixRankOutOfRange { mix_rank, max: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries: Vec<Complex64> = (0..n * mix_rank)
        .map(|_| matrix::gaussian_complex(&mut rng))
        .collect();
    let g = ComplexMatrix::new(n, mix_rank, entries)?;
    let gram = g.matmul(&g.adjoint())?;
    let trace = gram.trace()?.re;
    let m = gram.scaled(1.0 / trace);
    DensityOperator::new(dims, m)
}

/// Conjugates by a seeded product of local unitaries U1 (x) U2; the rank
/// triple and correlation verdict are invariant. Seed 0 is reserved for the
/// identity.
pub fn scramble_local(rho: &DensityOperator, seed: u64) -> DensityOperator {
    if seed == 0 {
        return rho.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seed_a: u64 = rng.gen();
    let seed_b: u64 = rng.gen();
    let u1 =
        matrix::random_unitary(rho.dims().dim_a(), seed_a).expect("factor dimension within limits");
    let u2 =
        matrix::random_unitary(rho.dims().dim_b(), seed_b).expect("factor dimension within limits");
    let u = matrix::tensor_product(&u1, &u2).expect("composite dimension within limits");
    let conjugated = u
        .matmul(rho.matrix())
        .and_then(|m| m.matmul(&u.adjoint()))
        .expect("shapes agree by construction");
    DensityOperator::new(rho.dims(), conjugated)
        .expect("unitary conjugation preserves the density-operator invariants")
}

/// Splitmix-style combination of a master seed with context words; used to
/// give every triple, configuration, and sample an independent seed.
pub(crate) fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e3779b97f4a7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }
    let mut acc = mix(master);
    for &p in parts {
        acc = mix(acc ^ p);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::frobenius_distance;
    use crate::state::schmidt_rank;

    const RANK_TOL: f64 = DEFAULT_RANK_TOL;

    fn ranks_of(rho: &DensityOperator) -> RankTriple {
        rank_triple(rho, RANK_TOL).unwrap()
    }

    #[test]
    fn classify_examples() {
        let c = classify_triple(2, 3, 5).unwrap();
        assert!(c.exists && c.correlated_exists && !c.uncorrelated_exists);

        let c = classify_triple(1, 3, 3).unwrap();
        assert!(c.exists && !c.correlated_exists && c.uncorrelated_exists);
        assert!(c.reasons.contains(&ReasonCode::LowerBoundFail));
        assert!(c.reasons.contains(&ReasonCode::ProductMatch));

        let c = classify_triple(2, 2, 5).unwrap();
        assert!(!c.exists);
        assert!(c.reasons.contains(&ReasonCode::ViolatesIneq3));

        let c = classify_triple(1, 1, 1).unwrap();
        assert!(c.exists && !c.correlated_exists && c.uncorrelated_exists);

        assert!(matches!(
            classify_triple(0, 1, 1),
            Err(Error::ZeroDimension)
        ));
    }

    #[test]
    fn classify_is_symmetric_in_d1_d2() {
        for d1 in 1..=6 {
            for d2 in 1..=6 {
                for d3 in 1..=6 {
                    let a = classify_triple(d1, d2, d3).unwrap();
                    let b = classify_triple(d2, d1, d3).unwrap();
                    assert_eq!(a.exists, b.exists);
                    assert_eq!(a.correlated_exists, b.correlated_exists);
                    assert_eq!(a.uncorrelated_exists, b.uncorrelated_exists);
                }
            }
        }
    }

    #[test]
    fn classify_extended_examples() {
        use ExtendedDim::{Finite, Infinite};
        let c = classify_triple_extended(Infinite, Finite(2), Finite(3)).unwrap();
        assert!(!c.exists);
        assert!(c.reasons.contains(&ReasonCode::ViolatesIneq1));
        assert!(c.reasons.contains(&ReasonCode::ExactlyOneInfinite));

        let c = classify_triple_extended(Infinite, Infinite, Finite(2)).unwrap();
        assert!(c.exists);

        let c = classify_triple_extended(Infinite, Infinite, Infinite).unwrap();
        assert!(c.exists);

        // All-finite agrees with the finite classifier.
        let c = classify_triple_extended(Finite(2), Finite(2), Finite(5)).unwrap();
        assert!(!c.exists);

        assert!(matches!(
            classify_triple_extended(Finite(0), Infinite, Infinite),
            Err(Error::ZeroDimension)
        ));
    }

    #[test]
    fn extended_dim_parsing() {
        assert_eq!("inf".parse::<ExtendedDim>().unwrap(), ExtendedDim::Infinite);
        assert_eq!("4".parse::<ExtendedDim>().unwrap(), ExtendedDim::Finite(4));
        assert!("0".parse::<ExtendedDim>().is_err());
        assert!("four".parse::<ExtendedDim>().is_err());
    }

    #[test]
    fn product_mixture_2_2_3() {
        let w = WeightVector::new(vec![0.5, 0.3, 0.2]).unwrap();
        let rho = construct_product_mixture(2, 2, 3, &w).unwrap();
        assert_eq!(
            ranks_of(&rho),
            RankTriple {
                d1: 2,
                d2: 2,
                d3: 3
            }
        );
        // Pair sequence: diagonal (0,0), (1,1), then the first unused pair
        // in lexicographic (i, j) order, which is (0,1).
        let m = rho.matrix();
        assert!((m.get(0, 0).re - 0.5).abs() < 1e-15);
        assert!((m.get(3, 3).re - 0.3).abs() < 1e-15);
        assert!((m.get(1, 1).re - 0.2).abs() < 1e-15);
        assert!(m.get(2, 2).norm() < 1e-15);
    }

    #[test]
    fn product_mixture_degenerate_case() {
        let w = WeightVector::new(vec![1.0]).unwrap();
        let rho = construct_product_mixture(1, 1, 1, &w).unwrap();
        assert_eq!(
            ranks_of(&rho),
            RankTriple {
                d1: 1,
                d2: 1,
                d3: 1
            }
        );
        assert!((rho.matrix().get(0, 0).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn product_mixture_full_grid_is_correlated() {
        let w = WeightVector::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let rho = construct_product_mixture(2, 2, 4, &w).unwrap();
        assert_eq!(
            ranks_of(&rho),
            RankTriple {
                d1: 2,
                d2: 2,
                d3: 4
            }
        );
        // Factorization oracle on the 2x2 weight grid: the diagonal state
        // is a product iff w(0,0) w(1,1) = w(0,1) w(1,0).
        let m = rho.matrix();
        let w00 = m.get(0, 0).re;
        let w01 = m.get(1, 1).re;
        let w10 = m.get(2, 2).re;
        let w11 = m.get(3, 3).re;
        assert!((w00 * w11 - w01 * w10).abs() > 1e-3);
        assert!(!is_uncorrelated(&rho, DEFAULT_PROD_TOL).uncorrelated);
    }

    #[test]
    fn product_mixture_rejects_bad_ordering() {
        let w = WeightVector::linear(4).unwrap();
        assert!(matches!(
            construct_product_mixture(2, 3, 4, &w),
            Err(Error::OrderingViolation { .. })
        ));
        let w = WeightVector::linear(2).unwrap();
        assert!(matches!(
            construct_product_mixture(3, 2, 2, &w),
            Err(Error::OrderingViolation { .. })
        ));
        let w = WeightVector::linear(3).unwrap();
        assert!(matches!(
            construct_product_mixture(2, 2, 4, &w),
            Err(Error::WeightCount { .. })
        ));
    }

    #[test]
    fn subbasis_mixture_3_2_2() {
        let spectrum = WeightVector::new(vec![0.7, 0.3]).unwrap();
        let rho = construct_subbasis_mixture(3, 2, 2, &spectrum, 99).unwrap();
        assert_eq!(
            ranks_of(&rho),
            RankTriple {
                d1: 3,
                d2: 2,
                d3: 2
            }
        );
        // Blocks {0,1} and {2}; j wraps to 0 on the third vector. Verify
        // against the explicit 6x6 matrix: psi1 = a0|0,0> + a1|1,1>,
        // psi2 = a2|2,0>.
        let m = rho.matrix();
        // Occupied composite indices: 0 (0*2+0), 3 (1*2+1), 4 (2*2+0).
        assert!(m.get(0, 0).re > 0.0);
        assert!(m.get(3, 3).re > 0.0);
        assert!((m.get(4, 4).re - 0.3).abs() < 1e-12);
        assert!(m.get(0, 3).norm() > 0.0); // coherence within block 1
        assert!(m.get(0, 4).norm() < 1e-15); // no coherence across blocks
        assert!((m.get(0, 0).re + m.get(3, 3).re - 0.7).abs() < 1e-12);
    }

    #[test]
    fn subbasis_mixture_2_2_2_diagonal_blocks() {
        let spectrum = WeightVector::uniform(2).unwrap();
        let rho = construct_subbasis_mixture(2, 2, 2, &spectrum, 5).unwrap();
        assert_eq!(
            ranks_of(&rho),
            RankTriple {
                d1: 2,
                d2: 2,
                d3: 2
            }
        );
        // Single-vector blocks give projectors onto |0,0> and |1,1>; the
        // amplitude phases cancel.
        let m = rho.matrix();
        assert!((m.get(0, 0).re - 0.5).abs() < 1e-12);
        assert!((m.get(3, 3).re - 0.5).abs() < 1e-12);
        assert!(m.get(1, 1).norm() < 1e-15);
        assert!(m.get(2, 2).norm() < 1e-15);
    }

    #[test]
    fn subbasis_mixture_1_1_1() {
        let spectrum = WeightVector::new(vec![1.0]).unwrap();
        let rho = construct_subbasis_mixture(1, 1, 1, &spectrum, 1).unwrap();
        assert_eq!(
            ranks_of(&rho),
            RankTriple {
                d1: 1,
                d2: 1,
                d3: 1
            }
        );
    }

    #[test]
    fn subbasis_mixture_rejects_bad_ordering() {
        let spectrum = WeightVector::linear(3).unwrap();
        assert!(matches!(
            construct_subbasis_mixture(2, 2, 3, &spectrum, 1),
            Err(Error::OrderingViolation { .. })
        ));
    }

    #[test]
    fn uncorrelated_construction_examples() {
        let one = WeightVector::new(vec![1.0]).unwrap();
        let rho = construct_uncorrelated(1, 1, &one, &one).unwrap();
        assert_eq!(
            ranks_of(&rho),
            RankTriple {
                d1: 1,
                d2: 1,
                d3: 1
            }
        );

        let half = WeightVector::uniform(2).unwrap();
        let rho = construct_uncorrelated(2, 2, &half, &half).unwrap();
        let quarter_identity = ComplexMatrix::identity(4).unwrap().scaled(0.25);
        assert!(frobenius_distance(rho.matrix(), &quarter_identity).unwrap() < 1e-15);
        assert_eq!(
            ranks_of(&rho),
            RankTriple {
                d1: 2,
                d2: 2,
                d3: 4
            }
        );

        // Spectrum of the product is the six pairwise weight products.
        let a = WeightVector::new(vec![0.6, 0.4]).unwrap();
        let b = WeightVector::new(vec![0.5, 0.3, 0.2]).unwrap();
        let rho = construct_uncorrelated(2, 3, &a, &b).unwrap();
        assert_eq!(
            ranks_of(&rho),
            RankTriple {
                d1: 2,
                d2: 3,
                d3: 6
            }
        );
        let es = matrix::hermitian_eigensystem(rho.matrix()).unwrap();
        let mut expected: Vec<f64> = vec![
            0.6 * 0.5,
            0.6 * 0.3,
            0.6 * 0.2,
            0.4 * 0.5,
            0.4 * 0.3,
            0.4 * 0.2,
        ];
        expected.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (got, want) in es.eigenvalues().iter().zip(&expected) {
            assert!((got - want).abs() < 1e-12);
        }
        let verdict = is_uncorrelated(&rho, DEFAULT_PROD_TOL);
        assert!(verdict.uncorrelated && verdict.residual < 1e-12);
    }

    #[test]
    fn witness_correlated_2_2_3() {
        let rho = construct_witness(2, 2, 3, WitnessKind::Correlated, 7).unwrap();
        assert_eq!(
            ranks_of(&rho),
            RankTriple {
                d1: 2,
                d2: 2,
                d3: 3
            }
        );
        let verdict = is_uncorrelated(&rho, DEFAULT_PROD_TOL);
        assert!(!verdict.uncorrelated);
        assert!(verdict.residual > CORRELATED_RESIDUAL_MARGIN);
    }

    #[test]
    fn witness_rejects_lemma_violation() {
        let err = construct_witness(1, 3, 3, WitnessKind::Correlated, 7).unwrap_err();
        match err {
            Error::Infeasible { reasons, .. } => {
                assert!(reasons.contains(&ReasonCode::LowerBoundFail));
            }
            other => panic!("expected Infeasible, got {other:?}"),
        }
    }

    #[test]
    fn witness_subbasis_branch_4_2_2() {
        let rho = construct_witness(4, 2, 2, WitnessKind::Any, 3).unwrap();
        assert_eq!(
            ranks_of(&rho),
            RankTriple {
                d1: 4,
                d2: 2,
                d3: 2
            }
        );
    }

    #[test]
    fn witness_uncorrelated_2_2_4() {
        let rho = construct_witness(2, 2, 4, WitnessKind::Uncorrelated, 1).unwrap();
        let verdict = is_uncorrelated(&rho, DEFAULT_PROD_TOL);
        assert!(verdict.uncorrelated && verdict.residual < 1e-12);
    }

    #[test]
    fn witness_swaps_when_d2_dominates() {
        let rho = construct_witness(2, 4, 2, WitnessKind::Any, 3).unwrap();
        assert_eq!(
            ranks_of(&rho),
            RankTriple {
                d1: 2,
                d2: 4,
                d3: 2
            }
        );
        let rho = construct_witness(2, 3, 5, WitnessKind::Correlated, 11).unwrap();
        assert_eq!(
            ranks_of(&rho),
            RankTriple {
                d1: 2,
                d2: 3,
                d3: 5
            }
        );
    }

    #[test]
    fn witness_infeasible_uncorrelated() {
        let err = construct_witness(2, 2, 3, WitnessKind::Uncorrelated, 1).unwrap_err();
        match err {
            Error::Infeasible { reasons, .. } => {
                assert!(reasons.contains(&ReasonCode::ProductMismatch));
            }
            other => panic!("expected Infeasible, got {other:?}"),
        }
    }

    #[test]
    fn sample_pure_state_has_equal_reduced_ranks() {
        let dims = BipartiteDims::new(3, 2).unwrap();
        for seed in 0..20 {
            let rho = sample_random_state(dims, 1, seed).unwrap();
            let ranks = ranks_of(&rho);
            assert_eq!(ranks.d3, 1);
            assert_eq!(ranks.d1, ranks.d2);
            let es = matrix::hermitian_eigensystem(rho.matrix()).unwrap();
            let top = es.support(RANK_TOL);
            assert_eq!(top.len(), 1);
            let psi = ComplexMatrix::new(6, 1, top[0].1.clone()).unwrap();
            assert_eq!(schmidt_rank(&psi, dims, RANK_TOL).unwrap(), ranks.d1);
        }
    }

    #[test]
    fn sample_full_rank_state() {
        let dims = BipartiteDims::new(2, 3).unwrap();
        for seed in 0..20 {
            let rho = sample_random_state(dims, 6, seed).unwrap();
            assert_eq!(
                ranks_of(&rho),
                RankTriple {
                    d1: 2,
                    d2: 3,
                    d3: 6
                }
            );
        }
    }

    #[test]
    fn samples_satisfy_cyclic_inequalities() {
        for (da, db) in [(1, 1), (2, 2), (3, 2), (4, 3)] {
            let dims = BipartiteDims::new(da, db).unwrap();
            for mix_rank in 1..=dims.composite() {
                for seed in 0..5 {
                    let rho = sample_random_state(dims, mix_rank, derive_seed(8, &[seed])).unwrap();
                    let r = ranks_of(&rho);
                    assert!(classify_triple(r.d1, r.d2, r.d3).unwrap().exists);
                }
            }
        }
    }

    #[test]
    fn sample_rejects_bad_mix_rank() {
        let dims = BipartiteDims::new(2, 2).unwrap();
        assert!(matches!(
            sample_random_state(dims, 0, 1),
            Err(Error::MixRankOutOfRange { .. })
        ));
        assert!(matches!(
            sample_random_state(dims, 5, 1),
            Err(Error::MixRankOutOfRange { .. })
        ));
    }

    #[test]
    fn scramble_seed_zero_is_identity() {
        let rho = construct_witness(2, 2, 3, WitnessKind::Any, 4).unwrap();
        let same = scramble_local(&rho, 0);
        assert_eq!(rho.matrix(), same.matrix());
    }

    #[test]
    fn scramble_preserves_ranks_and_verdict() {
        let rho = construct_witness(3, 2, 4, WitnessKind::Any, 4).unwrap();
        let before = ranks_of(&rho);
        for seed in 1..=10 {
            let scrambled = scramble_local(&rho, seed);
            assert_eq!(ranks_of(&scrambled), before);
        }
        let product = construct_witness(2, 2, 4, WitnessKind::Uncorrelated, 1).unwrap();
        let scrambled = scramble_local(&product, 12);
        let verdict = is_uncorrelated(&scrambled, DEFAULT_PROD_TOL);
        assert!(verdict.uncorrelated);
        assert!(verdict.residual < 1e-10);
    }

    #[test]
    fn weight_vector_validation() {
        assert!(matches!(
            WeightVector::new(vec![0.5, 0.6]),
            Err(Error::WeightSumNotOne { .. })
        ));
        assert!(matches!(
            WeightVector::new(vec![1.5, -0.5]),
            Err(Error::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            WeightVector::new(vec![]),
            Err(Error::ZeroDimension)
        ));
        let linear = WeightVector::linear(4).unwrap();
        assert!(linear.as_slice().windows(2).all(|w| w[0] > w[1]));
        let seeded = WeightVector::seeded(5, 3).unwrap();
        assert_eq!(seeded, WeightVector::seeded(5, 3).unwrap());
    }
}
