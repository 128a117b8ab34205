//! Homogeneous quadratic self-maps of `C^d`, the conjugacy operators
//! `p ↦ L⁻¹ ∘ p ∘ L` as matrices, the projector killing the triangular
//! coordinates, and pinched sequences of upper triangular matrices.

use std::ops::{Add, Neg, Sub};

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, ONE, ZERO};
use crate::poset::{Permutation, Relation, Resonance, Subset};
use crate::seed;

/// `(a, b)` with `a <= b` for each monomial `z_a z_b`, in basis order.
pub fn monomial_pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|a| (a..d).map(move |b| (a, b))).collect()
}

pub fn quad_dim(d: usize) -> usize {
    d * d * (d + 1) / 2
}

fn mono_index(d: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    a * d - a * a.saturating_sub(1) / 2 + (b - a)
}

/// A 2-homogeneous polynomial map `p(z) = Σ c_(α,i) z^α e_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomQuadMap {
    d: usize,
    coeffs: Vec<Complex64>,
}

impl HomQuadMap {
    pub fn zeros(d: usize) -> Self {
        Self { d, coeffs: vec![ZERO; quad_dim(d)] }
    }

    pub fn from_coeffs(d: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != quad_dim(d) {
            return Err(Error::InvalidParameter {
                name: "coeffs",
                reason: format!("expected {} coefficients, got {}", quad_dim(d), coeffs.len()),
            });
        }
        Ok(Self { d, coeffs })
    }

    pub fn from_vector(d: usize, v: &DVector<Complex64>) -> Self {
        Self { d, coeffs: v.iter().copied().collect() }
    }

    /// Coefficients drawn from the unit disk times `scale`, restricted to `support` if given.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R, scale: f64, support: Option<&Subset>) -> Self {
        let coeffs = (0..quad_dim(d))
            .map(|p| {
                let c = linalg::unit_disk(rng) * scale;
                match support {
                    Some(s) if !s.contains(p) => ZERO,
                    _ => c,
                }
            })
            .collect();
        Self { d, coeffs }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn to_vector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.coeffs)
    }

    /// Coefficient of `z_a z_b e_i`.
    pub fn coeff(&self, a: usize, b: usize, i: usize) -> Complex64 {
        self.coeffs[self.position(a, b, i)]
    }

    pub fn set_coeff(&mut self, a: usize, b: usize, i: usize, c: Complex64) {
        let p = self.position(a, b, i);
        self.coeffs[p] = c;
    }

    pub fn position(&self, a: usize, b: usize, i: usize) -> usize {
        i * (self.d * (self.d + 1) / 2) + mono_index(self.d, a, b)
    }

    /// Max coefficient magnitude.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, c| acc.max(c.norm()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { d: self.d, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Zero every coefficient outside `keep`.
    pub fn masked(&self, keep: &Subset) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(p, c)| if keep.contains(p) { *c } else { ZERO })
            .collect();
        Self { d: self.d, coeffs }
    }

    /// Largest coefficient magnitude outside `allowed`.
    pub fn max_outside(&self, allowed: &Subset) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(p, _)| !allowed.contains(*p))
            .fold(0.0, |acc, (_, c)| acc.max(c.norm()))
    }

    pub fn eval(&self, z: &[Complex64]) -> Vec<Complex64> {
        let pairs = monomial_pairs(self.d);
        let m = pairs.len();
        (0..self.d)
            .map(|i| {
                pairs
                    .iter()
                    .enumerate()
                    .map(|(q, &(a, b))| self.coeffs[i * m + q] * z[a] * z[b])
                    .sum()
            })
            .collect()
    }

    /// `p ∘ A` for a linear map `A`.
    pub fn precompose(&self, a: &CMatrix) -> Self {
        let d = self.d;
        let pairs = monomial_pairs(d);
        let m = pairs.len();
        let mut out = Self::zeros(d);
        for (q, &(x, y)) in pairs.iter().enumerate() {
            let expanded = expand_product(a, x, y);
            for i in 0..d {
                let c = self.coeffs[i * m + q];
                if c == ZERO {
                    continue;
                }
                for (r, e) in expanded.iter().enumerate() {
                    out.coeffs[i * m + r] += c * e;
                }
            }
        }
        out
    }

    /// `A ∘ p` for a linear map `A`.
    pub fn left_mul(&self, a: &CMatrix) -> Self {
        let d = self.d;
        let m = d * (d + 1) / 2;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for i in 0..d {
                let s = a[(r, i)];
                if s == ZERO {
                    continue;
                }
                for q in 0..m {
                    out.coeffs[r * m + q] += s * self.coeffs[i * m + q];
                }
            }
        }
        out
    }

    /// `L⁻¹ ∘ p ∘ L` given both `L` and its inverse.
    pub fn conjugate(&self, l: &CMatrix, l_inv: &CMatrix) -> Self {
        self.precompose(l).left_mul(l_inv)
    }
}

/// Coefficients of `(Az)_x (Az)_y` over the monomial basis.
fn expand_product(a: &CMatrix, x: usize, y: usize) -> Vec<Complex64> {
    let d = a.nrows();
    monomial_pairs(d)
        .iter()
        .map(|&(c, e)| {
            if c == e {
                a[(x, c)] * a[(y, c)]
            } else {
                a[(x, c)] * a[(y, e)] + a[(x, e)] * a[(y, c)]
            }
        })
        .collect()
}

impl Add for &HomQuadMap {
    type Output = HomQuadMap;
    fn add(self, rhs: &HomQuadMap) -> HomQuadMap {
        HomQuadMap {
            d: self.d,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &HomQuadMap {
    type Output = HomQuadMap;
    fn sub(self, rhs: &HomQuadMap) -> HomQuadMap {
        HomQuadMap {
            d: self.d,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &HomQuadMap {
    type Output = HomQuadMap;
    fn neg(self) -> HomQuadMap {
        self.scale(-ONE)
    }
}

/// Matrix of `p ↦ L⁻¹ ∘ p ∘ L`; entry `(s, t)` is the coefficient of basis
/// element `s` in the image of basis element `t`.
pub fn conj_matrix(l: &CMatrix) -> Result<CMatrix> {
    let l_inv = linalg::invert(l)?;
    Ok(conj_matrix_with_inverse(l, &l_inv))
}

/// Same as [`conj_matrix`] with a precomputed inverse.
pub fn conj_matrix_with_inverse(l: &CMatrix, l_inv: &CMatrix) -> CMatrix {
    let d = l.nrows();
    let pairs = monomial_pairs(d);
    let m = pairs.len();
    let n = d * m;
    let mut out = CMatrix::zeros(n, n);
    for (q, &(a, b)) in pairs.iter().enumerate() {
        let expanded = expand_product(l, a, b);
        for i in 0..d {
            let col = i * m + q;
            for r in 0..d {
                let s = l_inv[(r, i)];
                for (q2, e) in expanded.iter().enumerate() {
                    out[(r * m + q2, col)] = s * e;
                }
            }
        }
    }
    out
}

/// The linear map `U_σ` with `U_σ e_j = e_σ(j)`.
pub fn permutation_unitary(sigma: &Permutation) -> CMatrix {
    let d = sigma.d();
    let mut u = CMatrix::zeros(d, d);
    for j in 0..d {
        u[(sigma.apply(j), j)] = ONE;
    }
    u
}

/// Diagonal 0/1 matrix vanishing exactly on the triangular set.
pub fn projector_q(res: &Resonance) -> CMatrix {
    let n = res.t.universe();
    CMatrix::from_fn(n, n, |s, t| if s == t && !res.t.contains(s) { ONE } else { ZERO })
}

/// Apply the projector to a coefficient map.
pub fn project(p: &HomQuadMap, res: &Resonance) -> HomQuadMap {
    p.masked(&res.t.complement())
}

/// Split of `QAQ` into the part supported off `W` and the part supported on `W`.
#[derive(Debug, Clone)]
pub struct SupportSplit {
    pub m0: CMatrix,
    pub m1: CMatrix,
}

pub fn decompose(a: &CMatrix, res: &Resonance) -> SupportSplit {
    let n = a.nrows();
    let tc = res.t.complement();
    let mut m0 = CMatrix::zeros(n, n);
    let mut m1 = CMatrix::zeros(n, n);
    for s in tc.iter() {
        for t in tc.iter() {
            if res.w.contains(s, t) {
                m1[(s, t)] = a[(s, t)];
            } else {
                m0[(s, t)] = a[(s, t)];
            }
        }
    }
    SupportSplit { m0, m1 }
}

/// Largest entry magnitude of `m` at positions outside `rel`.
pub fn max_outside(m: &CMatrix, rel: &Relation) -> f64 {
    let mut worst = 0.0_f64;
    for s in 0..m.nrows() {
        for t in 0..m.ncols() {
            if !rel.contains(s, t) {
                worst = worst.max(m[(s, t)].norm());
            }
        }
    }
    worst
}

/// How a pinched sequence produces its matrices.
#[derive(Debug, Clone)]
pub enum PinchedKind {
    /// Random upper triangular with diagonal moduli inside the pinching window.
    Random,
    /// `Λ·I` at every step.
    Scalar,
    /// `diag(Λ, 1/M, ..., 1/M)`, the extremal case for the resonant coefficient.
    DiagonalExtremal,
    /// A fixed list, repeated cyclically.
    Explicit(Vec<CMatrix>),
}

/// A `(Λ, M)`-pinched sequence of upper triangular automorphisms.
#[derive(Debug, Clone)]
pub struct PinchedSequence {
    pub d: usize,
    pub lambda: f64,
    pub m: f64,
    pub seed: u64,
    pub kind: PinchedKind,
    /// Relative margin kept between diagonal moduli and the window ends.
    pub margin: f64,
    /// Off-diagonal entries are bounded by this fraction of the largest diagonal modulus.
    pub off_diagonal: f64,
}

impl PinchedSequence {
    fn validate(d: usize, lambda: f64, m: f64) -> Result<()> {
        if d == 0 {
            return Err(Error::InvalidDimension { d, reason: "dimension must be at least 1" });
        }
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidParameter { name: "lambda", reason: format!("{lambda} not in (0,1)") });
        }
        if !(m > 1.0 && m.is_finite()) {
            return Err(Error::InvalidParameter { name: "m", reason: format!("{m} must exceed 1") });
        }
        if lambda * m < 1.0 {
            return Err(Error::InvalidParameter {
                name: "m",
                reason: format!("lambda*m = {} < 1", lambda * m),
            });
        }
        Ok(())
    }

    pub fn random(d: usize, lambda: f64, m: f64, seed: u64) -> Result<Self> {
        Self::validate(d, lambda, m)?;
        let margin = 0.05;
        if (1.0 + margin) / m > lambda * (1.0 - margin) {
            return Err(Error::InvalidParameter {
                name: "m",
                reason: format!("window [{}, {}] is empty", (1.0 + margin) / m, lambda * (1.0 - margin)),
            });
        }
        Ok(Self { d, lambda, m, seed, kind: PinchedKind::Random, margin, off_diagonal: 0.1 })
    }

    pub fn scalar(d: usize, lambda: f64, m: f64) -> Result<Self> {
        Self::validate(d, lambda, m)?;
        Ok(Self { d, lambda, m, seed: 0, kind: PinchedKind::Scalar, margin: 0.0, off_diagonal: 0.0 })
    }

    pub fn diagonal_extremal(d: usize, lambda: f64, m: f64) -> Result<Self> {
        Self::validate(d, lambda, m)?;
        Ok(Self { d, lambda, m, seed: 0, kind: PinchedKind::DiagonalExtremal, margin: 0.0, off_diagonal: 0.0 })
    }

    pub fn explicit(list: Vec<CMatrix>, lambda: f64, m: f64) -> Result<Self> {
        let d = list.first().map(|l| l.nrows()).ok_or(Error::InvalidParameter {
            name: "list",
            reason: "empty matrix list".into(),
        })?;
        Self::validate(d, lambda, m)?;
        if list.iter().any(|l| l.nrows() != d || l.ncols() != d || !linalg::is_upper_triangular(l)) {
            return Err(Error::InvalidParameter {
                name: "list",
                reason: "matrices must be square upper triangular of equal size".into(),
            });
        }
        Ok(Self { d, lambda, m, seed: 0, kind: PinchedKind::Explicit(list), margin: 0.0, off_diagonal: 0.0 })
    }

    /// The upper triangular matrix `L_n`.
    pub fn matrix(&self, n: usize) -> CMatrix {
        let d = self.d;
        match &self.kind {
            PinchedKind::Scalar => linalg::identity(d) * Complex64::new(self.lambda, 0.0),
            PinchedKind::DiagonalExtremal => {
                let mut diag = vec![1.0 / self.m; d];
                diag[0] = self.lambda;
                linalg::from_real_diagonal(&diag)
            }
            PinchedKind::Explicit(list) => list[n % list.len()].clone(),
            PinchedKind::Random => {
                let mut rng = seed::indexed_rng(self.seed, 2 * n as u64);
                let lo = (1.0 + self.margin) / self.m;
                let hi = self.lambda * (1.0 - self.margin);
                let mut l = CMatrix::zeros(d, d);
                for i in 0..d {
                    let modulus = rng.gen_range(lo..=hi);
                    l[(i, i)] = linalg::unit_phase(&mut rng) * modulus;
                }
                for i in 0..d {
                    for j in (i + 1)..d {
                        l[(i, j)] = linalg::unit_disk(&mut rng) * (self.off_diagonal * hi);
                    }
                }
                l
            }
        }
    }

    /// Unitary frame `Q_n` used to hide the triangular structure; `Q_0 = I`.
    pub fn frame(&self, n: usize) -> CMatrix {
        if n == 0 {
            return linalg::identity(self.d);
        }
        let mut rng = seed::indexed_rng(self.seed, 2 * n as u64 + 1);
        linalg::random_unitary(&mut rng, self.d)
    }

    /// `Q_{n+1} L_n Q_n*`: a non-triangular matrix whose compositions have
    /// the same singular values as those of the triangular sequence.
    pub fn general(&self, n: usize) -> CMatrix {
        self.frame(n + 1) * self.matrix(n) * self.frame(n).adjoint()
    }

    /// `L_{k,h} = L_{k-1} ⋯ L_h`, identity when `k = h`.
    pub fn product(&self, k: usize, h: usize) -> CMatrix {
        let mut acc = linalg::identity(self.d);
        for j in h..k {
            acc = self.matrix(j) * acc;
        }
        acc
    }

    /// `L_{n,0}` for `n = 0..=horizon`.
    pub fn forward_products(&self, horizon: usize) -> Vec<CMatrix> {
        let mut out = Vec::with_capacity(horizon + 1);
        let mut acc = linalg::identity(self.d);
        out.push(acc.clone());
        for j in 0..horizon {
            acc = self.matrix(j) * acc;
            out.push(acc.clone());
        }
        out
    }
}

/// Norms of the two parts of the split along `n = 0..=horizon`.
#[derive(Debug, Clone, Serialize)]
pub struct DecompRow {
    pub n: usize,
    pub norm_a: f64,
    pub norm_m0: f64,
    pub norm_m1: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompTrace {
    pub rows: Vec<DecompRow>,
    /// Least-squares slope of `log‖m0‖` over the fit window, if any value is nonzero there.
    pub slope_m0: Option<f64>,
    pub slope_m1: Option<f64>,
    pub fit_from: usize,
}

pub fn decomposition_trace(seq: &PinchedSequence, horizon: usize, fit_from: usize) -> Result<DecompTrace> {
    let poset = crate::poset::Poset::quadratic(seq.d)?;
    let res = Resonance::new(&poset)?;
    let q = projector_q(&res);
    let mut rows = Vec::with_capacity(horizon + 1);
    for (n, l) in seq.forward_products(horizon).iter().enumerate() {
        let a = conj_matrix(l)?;
        let qaq = &q * &a * &q;
        let split = decompose(&qaq, &res);
        rows.push(DecompRow {
            n,
            norm_a: linalg::inf_norm(&a),
            norm_m0: linalg::inf_norm(&split.m0),
            norm_m1: linalg::inf_norm(&split.m1),
        });
    }
    let fit = |f: fn(&DecompRow) -> f64| {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.n >= fit_from && f(r) > 0.0)
            .map(|r| (r.n as f64, f(r).ln()))
            .collect();
        crate::stats::slope(&pts)
    };
    Ok(DecompTrace {
        slope_m0: fit(|r| r.norm_m0),
        slope_m1: fit(|r| r.norm_m1),
        rows,
        fit_from,
    })
}

/// Comparison of `‖A_{L_{n,0}}‖` against `C³ (Λ²M)^n`.
#[derive(Debug, Clone, Serialize)]
pub struct NormBoundReport {
    pub n: usize,
    pub norm: f64,
    pub c: f64,
    pub bound: f64,
    pub ratio: f64,
    /// Norm-equivalence constant between the coefficient max-norm and the
    /// Euclidean operator norms used in the pinching estimate.
    pub slack: f64,
    pub holds: bool,
}

/// Constant `κ` with `‖A_L‖ ≤ κ ‖L⁻¹‖₂ ‖L‖₂²` in the coefficient max-norm.
pub fn norm_slack(d: usize) -> f64 {
    2.0 * (d as f64).powf(1.5)
}

pub fn operator_norm_bound_check(seq: &PinchedSequence, n: usize) -> Result<NormBoundReport> {
    let c = crate::bunching::verify_pinched(seq, n, None)?.c;
    let a = conj_matrix(&seq.product(n, 0))?;
    let norm = linalg::inf_norm(&a);
    let bound = c.powi(3) * (seq.lambda * seq.lambda * seq.m).powi(n as i32);
    let ratio = norm / bound;
    let slack = norm_slack(seq.d);
    Ok(NormBoundReport { n, norm, c, bound, ratio, slack, holds: ratio <= slack * (1.0 + 1e-12) })
}
