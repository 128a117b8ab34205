//! The non-autonomous conjugacy equation at the level of 2-jets.
//!
//! Given jets `f_n`, the solver builds `h_n` with unitary linear part and
//! `g_n` such that `h_{n+1} ∘ f_n = g_n ∘ h_n` as 2-jets, where
//! `U_{τ_n} ∘ g_n ∘ U_{τ_n}⁻¹` is upper triangular with quadratic part
//! supported in the triangular set.
//!
//! Frames: `P_n = U_{τ_n}` with `τ_{n+1} = θ_n ∘ τ_n`. In the frame the maps
//! are `F_n = P_n f_n P_n⁻¹`, triangularised by `Q_n⁻¹ DF_n V_n = L_n` with
//! `V_{n+1} = U_{θ_n} Q_n U_{θ_n}⁻¹`. With `k_n = Q_n⁻¹ F_n V_n = L_n + w_n`
//! the equation becomes `U_θ⁻¹ (I + u_{n+1}) U_θ ∘ k_n = g̃_n ∘ (I + u_n)`,
//! solved backwards by `X = A_{U_θ L_n} u_{n+1} + L_n⁻¹ w_n`, `u_n = QX`,
//! quadratic part of `g̃_n` equal to `L_n (I - Q) X`.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::bunching;
use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::linalg::{self, CMatrix};
use crate::nilpotency::{build_word, PermWord};
use crate::polyspace::{conj_matrix, permutation_unitary, projector_q, HomQuadMap, PinchedSequence};
use crate::poset::{Permutation, Poset, Resonance};
use crate::seed;

/// The permutation schedule `θ_n` and the accumulated frames `τ_n`.
#[derive(Debug, Clone)]
pub struct PermSchedule {
    pub d: usize,
    pub big_d: u64,
    pub word: PermWord,
}

impl PermSchedule {
    pub fn new(d: usize) -> Result<Self> {
        let word = build_word(d)?;
        Ok(Self { d, big_d: 1u64 << (d - 1), word })
    }

    /// `σ_h`, the periodic extension of the word with `σ_h = word[(h-1) mod N]`.
    pub fn sigma(&self, h: u64) -> Permutation {
        let n = self.word.len() as u64;
        if n == 0 {
            return Permutation::identity(self.d);
        }
        let idx = (h + n - 1) % n;
        self.word.perms[idx as usize].clone()
    }

    /// `h` with `n = D^h - 1`, if any.
    pub fn epoch_of(&self, n: u64) -> Option<u64> {
        if self.big_d == 1 {
            return None;
        }
        let mut p = 1u64;
        let mut h = 0u64;
        while p - 1 < n {
            p = p.checked_mul(self.big_d)?;
            h += 1;
        }
        (p - 1 == n).then_some(h)
    }

    pub fn theta(&self, n: u64) -> Permutation {
        match self.epoch_of(n) {
            Some(h) => self.sigma(h),
            None => Permutation::identity(self.d),
        }
    }

    /// `τ_0, .., τ_count-1`.
    pub fn taus(&self, count: usize) -> Vec<Permutation> {
        let mut out = Vec::with_capacity(count);
        let mut tau = Permutation::identity(self.d);
        for n in 0..count {
            out.push(tau.clone());
            tau = self.theta(n as u64).compose(&tau);
        }
        out
    }
}

/// Unitary and triangular factors with `V_{n+1} L_n = A_n V_n`.
#[derive(Debug, Clone)]
pub struct Triangularization {
    /// `V_0, .., V_N`.
    pub v: Vec<CMatrix>,
    /// `L_0, .., L_{N-1}` with positive real diagonals.
    pub l: Vec<CMatrix>,
    /// The unitary QR factors `Q_n` before any twist.
    pub q: Vec<CMatrix>,
}

pub const COND_MAX: f64 = 1e12;

fn triangularize_twisted(a: &[CMatrix], twist: impl Fn(usize) -> Option<CMatrix>) -> Result<Triangularization> {
    let d = a.first().map(|m| m.nrows()).unwrap_or(0);
    let mut v = vec![linalg::identity(d)];
    let mut l = Vec::with_capacity(a.len());
    let mut q = Vec::with_capacity(a.len());
    for (n, an) in a.iter().enumerate() {
        let cond = linalg::condition_number(an);
        if !(cond <= COND_MAX) {
            return Err(Error::IllConditioned { step: n, cond });
        }
        let (qn, ln) = linalg::qr_positive(&(an * &v[n]));
        let next = match twist(n) {
            Some(u) => &u * &qn * u.transpose(),
            None => qn.clone(),
        };
        v.push(next);
        l.push(ln);
        q.push(qn);
    }
    Ok(Triangularization { v, l, q })
}

/// QR triangularisation of a sequence: `V_0 = I`, `V_{n+1} L_n = A_n V_n`.
pub fn triangularize(a: &[CMatrix]) -> Result<Triangularization> {
    triangularize_twisted(a, |_| None)
}

#[derive(Debug, Clone)]
pub struct SolveParams {
    /// Reject steps whose triangular diagonal drops below `1/(2M)`.
    pub m_bound: Option<f64>,
    /// Value of `u` at the horizon; zero when absent.
    pub terminal: Option<HomQuadMap>,
}

impl Default for SolveParams {
    fn default() -> Self {
        Self { m_bound: None, terminal: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StepDiagnostics {
    pub n: usize,
    pub residual: f64,
    pub h_norm: f64,
    pub g_norm: f64,
    pub u_norm: f64,
    pub unitarity_defect: f64,
    /// Largest quadratic coefficient of the framed `g_n` outside the triangular set.
    pub off_support: f64,
}

#[derive(Debug, Clone)]
pub struct SolverOutput {
    pub d: usize,
    /// `h_0, .., h_N`.
    pub h: Vec<Jet2>,
    /// `g_0, .., g_{N-1}`.
    pub g: Vec<Jet2>,
    /// Framed maps `g̃_n = U_{τ_n} g_n U_{τ_n}⁻¹`.
    pub g_framed: Vec<Jet2>,
    /// `u_0, .., u_N`.
    pub u: Vec<HomQuadMap>,
    /// Quadratic part of the 2-jet of `g̃_n⁻¹`, supported in the triangular set.
    pub v: Vec<HomQuadMap>,
    pub triangularizer: Vec<CMatrix>,
    pub l: Vec<CMatrix>,
    pub taus: Vec<Permutation>,
    pub thetas: Vec<Permutation>,
    pub diagnostics: Vec<StepDiagnostics>,
}

impl SolverOutput {
    pub fn max_residual(&self) -> f64 {
        self.diagnostics.iter().map(|s| s.residual).fold(0.0, f64::max)
    }

    pub fn max_off_support(&self) -> f64 {
        self.diagnostics.iter().map(|s| s.off_support).fold(0.0, f64::max)
    }

    pub fn max_unitarity_defect(&self) -> f64 {
        self.diagnostics.iter().map(|s| s.unitarity_defect).fold(0.0, f64::max)
    }
}

pub fn solve_2jet(f: &[Jet2], params: &SolveParams) -> Result<SolverOutput> {
    let horizon = f.len();
    let d = f.first().map(Jet2::d).ok_or(Error::InvalidParameter {
        name: "f",
        reason: "empty jet sequence".into(),
    })?;
    let poset = Poset::quadratic(d)?;
    let res = Resonance::new(&poset)?;
    let tc = res.t.complement();
    let sched = PermSchedule::new(d)?;
    let taus = sched.taus(horizon + 1);
    let thetas: Vec<Permutation> = (0..horizon).map(|n| sched.theta(n as u64)).collect();
    let frames: Vec<CMatrix> = taus.iter().map(permutation_unitary).collect();
    let theta_u: Vec<CMatrix> = thetas.iter().map(permutation_unitary).collect();

    // maps in the moving frame
    let framed: Vec<Jet2> = f
        .iter()
        .zip(&frames)
        .map(|(fj, p)| fj.conjugate_linear(&p.transpose(), p))
        .collect();
    let lin: Vec<CMatrix> = framed.iter().map(|j| j.linear.clone()).collect();
    let tri = triangularize_twisted(&lin, |n| {
        if thetas[n].is_identity() {
            None
        } else {
            Some(theta_u[n].clone())
        }
    })?;
    if let Some(m) = params.m_bound {
        let floor = 0.5 / m;
        for (n, l) in tri.l.iter().enumerate() {
            for k in 0..d {
                let value = l[(k, k)].norm();
                if value < floor {
                    return Err(Error::DegenerateDiagonal { step: n, value, floor });
                }
            }
        }
    }

    let mut u = vec![HomQuadMap::zeros(d); horizon + 1];
    if let Some(t) = &params.terminal {
        u[horizon] = t.clone();
    }
    let mut v = vec![HomQuadMap::zeros(d); horizon];
    let mut g_framed = Vec::with_capacity(horizon);
    for n in (0..horizon).rev() {
        let l = &tri.l[n];
        let l_inv = linalg::upper_triangular_inverse(l)?;
        let qn = &tri.q[n];
        // w_n = Q_n⁻¹ q_F(V_n z)
        let w = framed[n].quad.precompose(&tri.v[n]).left_mul(&qn.adjoint());
        let ul = &theta_u[n] * l;
        let ul_inv = &l_inv * theta_u[n].transpose();
        let x = &u[n + 1].conjugate(&ul, &ul_inv) + &w.left_mul(&l_inv);
        u[n] = x.masked(&tc);
        let rest = x.masked(&res.t);
        v[n] = -&rest.precompose(&l_inv);
        g_framed.push(Jet2::new(l.clone(), rest.left_mul(l).masked(&res.t)));
    }
    g_framed.reverse();

    let h: Vec<Jet2> = (0..=horizon)
        .map(|n| {
            let p = &frames[n];
            let pt = p.transpose();
            Jet2::linear(pt.clone())
                .compose(&Jet2::near_identity(u[n].clone()))
                .compose(&Jet2::linear(tri.v[n].adjoint() * p))
        })
        .collect();
    let g: Vec<Jet2> = g_framed
        .iter()
        .zip(&frames)
        .map(|(gt, p)| gt.conjugate_linear(p, &p.transpose()))
        .collect();

    let diagnostics = (0..horizon)
        .map(|n| {
            let lhs = h[n + 1].compose(&f[n]);
            let rhs = g[n].compose(&h[n]);
            StepDiagnostics {
                n,
                residual: lhs.distance(&rhs),
                h_norm: h[n].norm(),
                g_norm: g[n].norm(),
                u_norm: u[n].norm(),
                unitarity_defect: linalg::unitarity_defect(&h[n].linear),
                off_support: g_framed[n].quad.max_outside(&res.t),
            }
        })
        .collect();

    Ok(SolverOutput {
        d,
        h,
        g,
        g_framed,
        u,
        v,
        triangularizer: tri.v,
        l: tri.l,
        taus,
        thetas,
        diagnostics,
    })
}

/// Solve after checking pinching of the linear parts and the summability condition.
pub fn solve_checked(f: &[Jet2], lambda: f64, m: f64, c_max: Option<f64>) -> Result<SolverOutput> {
    let d = f.first().map(Jet2::d).unwrap_or(0);
    let lin: Vec<CMatrix> = f.iter().map(|j| j.linear.clone()).collect();
    bunching::measure_pinching(&lin, lambda, m, c_max)?;
    if d >= 2 {
        let sum = bunching::check_summability(lambda, m, d)?;
        if !sum.holds {
            return Err(Error::Bunching { condition: "summability", log_margin: -sum.log_value });
        }
    }
    solve_2jet(f, &SolveParams { m_bound: Some(m), terminal: None })
}

/// Jets with linear parts from `seq` (hidden behind random unitary frames
/// when `general`) and quadratic parts with coefficients in the disk of radius `scale`.
pub fn random_jets(seq: &PinchedSequence, horizon: usize, general: bool, scale: f64, master_seed: u64) -> Vec<Jet2> {
    let stream = seed::derive(master_seed, "jets");
    (0..horizon)
        .map(|n| {
            let linear = if general { seq.general(n) } else { seq.matrix(n) };
            let mut rng = seed::indexed_rng(stream, n as u64);
            Jet2::new(linear, HomQuadMap::random(seq.d, &mut rng, scale, None))
        })
        .collect()
}

/// Jets with positive real diagonal linear parts, moduli in `[lo, hi]`.
pub fn diagonal_jets(d: usize, lo: f64, hi: f64, horizon: usize, scale: f64, master_seed: u64) -> Vec<Jet2> {
    let stream = seed::derive(master_seed, "diagonal-jets");
    (0..horizon)
        .map(|n| {
            let mut rng = seed::indexed_rng(stream, n as u64);
            let diag: Vec<f64> = (0..d).map(|_| rng.gen_range(lo..=hi)).collect();
            Jet2::new(linalg::from_real_diagonal(&diag), HomQuadMap::random(d, &mut rng, scale, None))
        })
        .collect()
}

/// Largest per-coefficient violation of the scalar recursion
/// `h_{n+1}(a,b;k) λ_a λ_b = λ_k h_n(a,b;k) + g_n(a,b;k) - f_n(a,b;k)`
/// for diagonal linear parts.
pub fn scalar_recursion_defect(f: &[Jet2], out: &SolverOutput) -> f64 {
    let d = out.d;
    let pairs = crate::polyspace::monomial_pairs(d);
    let mut worst = 0.0_f64;
    for (n, fj) in f.iter().enumerate() {
        let lam: Vec<Complex64> = (0..d).map(|k| fj.linear[(k, k)]).collect();
        for &(a, b) in &pairs {
            for k in 0..d {
                let expect = (lam[k] * out.h[n].quad.coeff(a, b, k) + out.g[n].quad.coeff(a, b, k)
                    - fj.quad.coeff(a, b, k))
                    / (lam[a] * lam[b]);
                let got = out.h[n + 1].quad.coeff(a, b, k);
                worst = worst.max((expect - got).norm());
            }
        }
    }
    worst
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub theta: f64,
    pub exponent: f64,
    pub slope: f64,
    pub bound: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Fit `log‖h_n‖` against `n` and compare with `(D^{3 binom(d,2)} - 1) log Θ`.
pub fn growth_check(out: &SolverOutput, theta: f64, slack: f64) -> GrowthReport {
    let pts: Vec<(f64, f64)> = out.h.iter().enumerate().map(|(n, h)| (n as f64, h.norm().ln())).collect();
    let slope = crate::stats::slope(&pts).unwrap_or(0.0);
    let exponent = if out.d >= 2 {
        2f64.powi(bunching::growth_log2(out.d) as i32) - 1.0
    } else {
        0.0
    };
    let bound = exponent * theta.ln();
    GrowthReport { theta, exponent, slope, bound, slack, holds: slope <= bound + slack }
}

#[derive(Debug, Clone, Copy)]
pub struct Truncation {
    pub tol: f64,
    pub max_terms: usize,
    pub window: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Self { tol: 1e-12, max_terms: 200, window: 20 }
    }
}

#[derive(Debug, Clone)]
pub struct SeriesReport {
    pub n: usize,
    pub sum: CMatrix,
    pub terms: usize,
    pub last_term_norm: f64,
    pub sum_norm: f64,
    pub converged: bool,
    /// Ratio of the last two term norms below one.
    pub geometric_tail: bool,
}

/// Partial sums of `Σ_{m>=n} (Q A_{U_{θ_n} L_n} Q) ⋯ (Q A_{U_{θ_{m-1}} L_{m-1}} Q)`.
pub fn series_s(seq: &PinchedSequence, sched: &PermSchedule, n: usize, trunc: Truncation) -> Result<SeriesReport> {
    let poset = Poset::quadratic(seq.d)?;
    let res = Resonance::new(&poset)?;
    let q = projector_q(&res);
    let dim = q.nrows();
    let mut term = CMatrix::identity(dim, dim);
    let mut sum = term.clone();
    let mut norms = vec![linalg::inf_norm(&sum)];
    let mut term_norms = vec![1.0_f64];
    let mut converged = trunc.max_terms == 0;
    let mut terms = 1;
    for j in n..n + trunc.max_terms {
        let factor = conj_matrix(&(permutation_unitary(&sched.theta(j as u64)) * seq.matrix(j)))?;
        term = term * (&q * factor * &q);
        sum += &term;
        terms += 1;
        let tn = linalg::inf_norm(&term);
        let sn = linalg::inf_norm(&sum);
        term_norms.push(tn);
        norms.push(sn);
        if !sn.is_finite() {
            return Err(Error::Divergence { n, terms });
        }
        if norms.len() > trunc.window && sn >= 2.0 * norms[norms.len() - 1 - trunc.window] {
            return Err(Error::Divergence { n, terms });
        }
        if tn < trunc.tol * sn {
            converged = true;
            break;
        }
    }
    let k = term_norms.len();
    let geometric_tail = k >= 2 && term_norms[k - 1] < term_norms[k - 2];
    Ok(SeriesReport {
        n,
        sum_norm: linalg::inf_norm(&sum),
        sum,
        terms,
        last_term_norm: term_norms[k - 1],
        converged,
        geometric_tail,
    })
}
