//! Special triangular automorphisms, their stable degree, the scalar epoch
//! recursion and numerical basin membership for interleaved sequences.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::linalg::{self, CMatrix, ZERO};
use crate::polyspace::{monomial_pairs, permutation_unitary};
use crate::poset::{Permutation, Poset, Resonance};
use crate::seed;
use crate::solver::PermSchedule;

/// Orbit entries beyond this magnitude count as divergence.
pub const OVERFLOW_CAP: f64 = 1e150;

/// A polynomial in `nvars` complex variables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, j: usize) -> Self {
        let mut e = vec![0; nvars];
        e[j] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, linalg::ONE);
        p
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Complex64) {
        if c == ZERO {
            return;
        }
        let entry = self.terms.entry(exps).or_insert(ZERO);
        *entry += c;
        // keep the map free of cancelled terms
        let dead: Vec<Vec<u32>> = self.terms.iter().filter(|(_, v)| **v == ZERO).map(|(k, _)| k.clone()).collect();
        for k in dead {
            self.terms.remove(&k);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Complex64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Lowest total degree among the terms.
    pub fn order(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).min().unwrap_or(u32::MAX)
    }

    /// Degree with variable `j` weighted by `w[j]`.
    pub fn weighted_degree(&self, w: &[u64]) -> u64 {
        self.terms
            .keys()
            .map(|e| e.iter().zip(w).map(|(a, b)| *a as u64 * b).sum())
            .max()
            .unwrap_or(0)
    }

    /// True when only variables with index `>= first` occur.
    pub fn uses_only_from(&self, first: usize) -> bool {
        self.terms.keys().all(|e| e[..first.min(e.len())].iter().all(|&a| a == 0))
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = *c;
                for (zj, &a) in z.iter().zip(e) {
                    if a > 0 {
                        t *= zj.powu(a);
                    }
                }
                t
            })
            .sum()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::constant(self.nvars, linalg::ONE);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Substitute `subs[j]` for variable `j`.
    pub fn compose(&self, subs: &[Poly]) -> Poly {
        let nv = subs.first().map(|p| p.nvars).unwrap_or(self.nvars);
        let mut out = Poly::zero(nv);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(nv, *c);
            for (j, &a) in e.iter().enumerate() {
                if a > 0 {
                    t = t.mul(&subs[j].pow(a));
                }
            }
            out = out.add(&t);
        }
        out
    }
}

/// `z ↦ L z + p(z)` with `L` upper triangular and `p_j` a polynomial in
/// `z_{j+1}, .., z_d` without constant or linear terms.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularAuto {
    pub linear: CMatrix,
    pub p: Vec<Poly>,
}

impl TriangularAuto {
    pub fn new(linear: CMatrix, p: Vec<Poly>) -> Result<Self> {
        let d = linear.nrows();
        if p.len() != d || !linalg::is_upper_triangular(&linear) {
            return Err(Error::InvalidParameter {
                name: "triangular",
                reason: "linear part must be upper triangular with one polynomial per coordinate".into(),
            });
        }
        if (0..d).any(|k| linear[(k, k)] == ZERO) {
            return Err(Error::Singular { det: 0.0 });
        }
        for (j, pj) in p.iter().enumerate() {
            if !pj.uses_only_from(j + 1) || (!pj.is_zero() && pj.order() < 2) {
                return Err(Error::InvalidParameter {
                    name: "triangular",
                    reason: format!("component {} depends on earlier variables or has low-order terms", j + 1),
                });
            }
        }
        Ok(Self { linear, p })
    }

    /// The degree-2 map of a jet whose quadratic part lies in the triangular set.
    pub fn from_jet(j: &Jet2) -> Result<Self> {
        let d = j.d();
        let mut p = vec![Poly::zero(d); d];
        for (i, pi) in p.iter_mut().enumerate() {
            for &(a, b) in &monomial_pairs(d) {
                let c = j.quad.coeff(a, b, i);
                let mut e = vec![0u32; d];
                e[a] += 1;
                e[b] += 1;
                pi.add_term(e, c);
            }
        }
        Self::new(j.linear.clone(), p)
    }

    pub fn d(&self) -> usize {
        self.linear.nrows()
    }

    pub fn eval(&self, z: &[Complex64]) -> Vec<Complex64> {
        let d = self.d();
        (0..d)
            .map(|i| {
                let mut acc = self.p[i].eval(z);
                for k in i..d {
                    acc += self.linear[(i, k)] * z[k];
                }
                acc
            })
            .collect()
    }

    /// Solve `self(z) = w` by back substitution.
    pub fn inverse_eval(&self, w: &[Complex64]) -> Vec<Complex64> {
        let d = self.d();
        let mut z = vec![ZERO; d];
        for i in (0..d).rev() {
            let mut acc = w[i] - self.p[i].eval(&z);
            for k in (i + 1)..d {
                acc -= self.linear[(i, k)] * z[k];
            }
            z[i] = acc / self.linear[(i, i)];
        }
        z
    }

    fn as_polys(&self) -> Vec<Poly> {
        let d = self.d();
        (0..d)
            .map(|i| {
                let mut lin = Poly::zero(d);
                for k in i..d {
                    lin = lin.add(&Poly::var(d, k).scale(self.linear[(i, k)]));
                }
                lin.add(&self.p[i])
            })
            .collect()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &TriangularAuto) -> TriangularAuto {
        let d = self.d();
        let subs = inner.as_polys();
        let mut p = Vec::with_capacity(d);
        for i in 0..d {
            let mut acc = self.p[i].compose(&subs);
            for k in i..d {
                acc = acc.add(&inner.p[k].scale(self.linear[(i, k)]));
            }
            p.push(acc);
        }
        TriangularAuto { linear: &self.linear * &inner.linear, p }
    }

    /// Weighted degree condition `deg_w p_j <= k_j`.
    pub fn satisfies_weights(&self, w: &[u64]) -> bool {
        self.p.iter().zip(w).all(|(pj, &kj)| pj.weighted_degree(w) <= kj)
    }
}

/// Weights `k_j = 2^{d-j}` and stable degree `K = 2^{d-1}` for degree-2 maps.
pub fn stable_degree(d: usize) -> (Vec<u64>, u64) {
    let w: Vec<u64> = (1..=d).map(|j| 1u64 << (d - j)).collect();
    let k = w.first().copied().unwrap_or(1);
    (w, k)
}

/// Random degree-2 special triangular maps with diagonal moduli in `[lo, hi]`.
pub fn random_triangular(d: usize, lo: f64, hi: f64, quad_scale: f64, count: usize, master_seed: u64) -> Vec<TriangularAuto> {
    let res = Resonance::new(&Poset::quadratic(d).expect("d >= 1")).expect("degree 2");
    let stream = seed::derive(master_seed, "triangular");
    (0..count)
        .map(|n| {
            let mut rng = seed::indexed_rng(stream, n as u64);
            let linear = CMatrix::from_fn(d, d, |i, j| match i.cmp(&j) {
                std::cmp::Ordering::Equal => linalg::unit_phase(&mut rng) * rng.gen_range(lo..=hi),
                std::cmp::Ordering::Less => linalg::unit_disk(&mut rng) * (0.1 * hi),
                _ => ZERO,
            });
            let quad = crate::polyspace::HomQuadMap::random(d, &mut rng, quad_scale, Some(&res.t));
            TriangularAuto::from_jet(&Jet2::new(linear, quad)).expect("triangular by construction")
        })
        .collect()
}

/// `g_n = f_n`, except `g_{m_h} = f_{m_h} ∘ T_h`.
#[derive(Debug, Clone)]
pub struct InterleavedSequence {
    pub autos: Vec<TriangularAuto>,
    pub interleave: BTreeMap<usize, CMatrix>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapDiagnostics {
    pub times: Vec<usize>,
    pub gaps: Vec<usize>,
    /// Partial sums of `K^{-h} m_h`.
    pub weighted_partial_sums: Vec<f64>,
    pub gaps_increasing: bool,
}

impl InterleavedSequence {
    pub fn plain(autos: Vec<TriangularAuto>) -> Self {
        Self { autos, interleave: BTreeMap::new() }
    }

    /// Interleave `U_{σ_h}` at `m_h = D^h - 1 + offset` for `h <= last_epoch`
    /// (every epoch inside the horizon when `None`).
    pub fn with_word_schedule(autos: Vec<TriangularAuto>, offset: usize, last_epoch: Option<u32>) -> Result<Self> {
        let d = autos.first().map(TriangularAuto::d).ok_or(Error::InvalidParameter {
            name: "autos",
            reason: "empty sequence".into(),
        })?;
        let sched = PermSchedule::new(d)?;
        let mut interleave = BTreeMap::new();
        if sched.big_d > 1 {
            let mut h = 0u32;
            loop {
                let m = sched.big_d.pow(h) as usize - 1 + offset;
                if m >= autos.len() || last_epoch.is_some_and(|e| h > e) {
                    break;
                }
                interleave.insert(m, permutation_unitary(&sched.sigma(h as u64)));
                h += 1;
            }
        }
        Ok(Self { autos, interleave })
    }

    /// Interleave `U_σ` at each listed time.
    pub fn with_permutations(autos: Vec<TriangularAuto>, schedule: &[(usize, Permutation)]) -> Self {
        let interleave = schedule.iter().map(|(t, p)| (*t, permutation_unitary(p))).collect();
        Self { autos, interleave }
    }

    pub fn d(&self) -> usize {
        self.autos.first().map(TriangularAuto::d).unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.autos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.autos.is_empty()
    }

    pub fn step(&self, n: usize, z: &[Complex64]) -> Vec<Complex64> {
        match self.interleave.get(&n) {
            Some(t) => {
                let tz = t * nalgebra::DVector::from_column_slice(z);
                self.autos[n].eval(tz.as_slice())
            }
            None => self.autos[n].eval(z),
        }
    }

    pub fn gap_diagnostics(&self, k: u64) -> GapDiagnostics {
        let times: Vec<usize> = self.interleave.keys().copied().collect();
        let gaps: Vec<usize> = times.windows(2).map(|w| w[1] - w[0]).collect();
        let mut acc = 0.0;
        let weighted_partial_sums = times
            .iter()
            .enumerate()
            .map(|(h, &m)| {
                acc += m as f64 / (k as f64).powi(h as i32);
                acc
            })
            .collect();
        let gaps_increasing = gaps.windows(2).all(|w| w[1] > w[0]);
        GapDiagnostics { times, gaps, weighted_partial_sums, gaps_increasing }
    }
}

fn norm(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitReport {
    pub norms: Vec<f64>,
    /// `max_n |f_{n,0}(z)| / (Λ^n (|z| + |z|^K))`.
    pub c0: f64,
    pub diverged: bool,
}

/// Orbit of `z` under the first `n` maps with the measured constant of the triangular bound.
pub fn iterate_triangular(seq: &InterleavedSequence, z: &[Complex64], n: usize, lambda: f64, k: u64) -> OrbitReport {
    let r0 = norm(z);
    let scale = r0 + r0.powi(k as i32);
    let mut cur = z.to_vec();
    let mut norms = vec![r0];
    let mut c0 = if scale > 0.0 { 1.0_f64 } else { 0.0 };
    let mut diverged = false;
    for j in 0..n.min(seq.len()) {
        cur = seq.step(j, &cur);
        let r = norm(&cur);
        norms.push(r);
        if !(r < OVERFLOW_CAP) {
            diverged = true;
            break;
        }
        if scale > 0.0 {
            c0 = c0.max(r / (lambda.powi(j as i32 + 1) * scale));
        }
    }
    OrbitReport { norms, c0, diverged }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Converged,
    Diverged,
    Undecided,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpochReport {
    /// `log r_h`; `-inf` for `r_h = 0`.
    pub log_r: Vec<f64>,
    pub peak_log_r: f64,
    pub verdict: EpochVerdict,
    /// First epoch with `r_h < 1e-9`.
    pub first_small: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpochVerdict {
    Infinitesimal,
    BlowUp,
    Undecided,
}

pub const SMALL: f64 = 1e-9;

/// `r_{h+1} = C Λ^{s_h} (r_h + r_h^K)` evaluated in log space over the whole
/// horizon. Transients far beyond double range are fine here, so the verdict
/// looks at the last epoch: below `1e-9` or above the overflow cap.
pub fn epoch_recursion(c: f64, lambda: f64, k: f64, s: &[f64], r0: f64) -> EpochReport {
    let (lc, ll) = (c.ln(), lambda.ln());
    let small = SMALL.ln();
    let mut rho = if r0 > 0.0 { r0.ln() } else { f64::NEG_INFINITY };
    let mut log_r = vec![rho];
    let mut first_small = (rho < small).then_some(0);
    for (h, &sh) in s.iter().enumerate() {
        if rho > f64::NEG_INFINITY {
            // log(r + r^K) = rho + log(1 + e^{(K-1) rho})
            let x = (k - 1.0) * rho;
            let softplus = if x > 30.0 { x + (-x).exp().ln_1p() } else { x.exp().ln_1p() };
            rho = lc + sh * ll + rho + softplus;
        }
        log_r.push(rho);
        if rho < small && first_small.is_none() {
            first_small = Some(h + 1);
        }
    }
    let peak_log_r = log_r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let verdict = if rho < small {
        EpochVerdict::Infinitesimal
    } else if rho >= OVERFLOW_CAP.ln() {
        EpochVerdict::BlowUp
    } else {
        EpochVerdict::Undecided
    };
    EpochReport { log_r, peak_log_r, verdict, first_small }
}

/// Sample layout for a scan.
#[derive(Debug, Clone, Serialize)]
pub struct GridSpec {
    pub radius: f64,
    pub per_axis: usize,
    /// Target number of grid samples after downsampling.
    pub samples: usize,
    /// Extra random samples with norm in `[radius, far_radius]`.
    pub far_field: usize,
    pub far_radius: f64,
    pub seed: u64,
}

impl GridSpec {
    /// Real grid over all `2d` real coordinates, downsampled evenly, plus far-field samples.
    pub fn points(&self, d: usize) -> Vec<Vec<Complex64>> {
        let dims = 2 * d;
        let total = (self.per_axis as u128).pow(dims as u32);
        let take = (self.samples as u128).min(total);
        let axis = |i: usize| {
            if self.per_axis <= 1 {
                0.0
            } else {
                -self.radius + 2.0 * self.radius * i as f64 / (self.per_axis - 1) as f64
            }
        };
        let mut out = Vec::with_capacity(take as usize + self.far_field);
        for s in 0..take {
            let mut idx = s * total / take.max(1);
            let mut coords = Vec::with_capacity(dims);
            for _ in 0..dims {
                coords.push(axis((idx % self.per_axis as u128) as usize));
                idx /= self.per_axis as u128;
            }
            out.push((0..d).map(|j| Complex64::new(coords[2 * j], coords[2 * j + 1])).collect());
        }
        let mut rng = seed::rng(self.seed, "far-field");
        for _ in 0..self.far_field {
            let dir: Vec<Complex64> = (0..d).map(|_| linalg::unit_disk(&mut rng)).collect();
            let r = norm(&dir).max(1e-12);
            let target = rng.gen_range(self.radius..=self.far_radius.max(self.radius));
            out.push(dir.iter().map(|c| c * (target / r)).collect());
        }
        out
    }

    /// `per_axis × per_axis` slice through the real parts of the first two
    /// coordinates (real and imaginary part of `z_1` when `d = 1`).
    pub fn slice(&self, d: usize) -> Vec<Vec<Complex64>> {
        let axis = |i: usize| -self.radius + 2.0 * self.radius * i as f64 / (self.per_axis.max(2) - 1) as f64;
        let mut out = Vec::with_capacity(self.per_axis * self.per_axis);
        for iy in 0..self.per_axis {
            for ix in 0..self.per_axis {
                let mut z = vec![ZERO; d];
                if d == 1 {
                    z[0] = Complex64::new(axis(ix), axis(iy));
                } else {
                    z[0] = Complex64::new(axis(ix), 0.0);
                    z[1] = Complex64::new(axis(iy), 0.0);
                }
                out.push(z);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BasinSample {
    pub point: Vec<[f64; 2]>,
    pub verdict: Verdict,
    pub iterations: usize,
    pub final_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BasinReport {
    pub samples: Vec<BasinSample>,
    pub converged: usize,
    pub diverged: usize,
    pub undecided: usize,
    pub eps_conv: f64,
    pub max_iter: usize,
}

impl BasinReport {
    pub fn fraction_converged(&self) -> f64 {
        if self.samples.is_empty() {
            return 1.0;
        }
        self.converged as f64 / self.samples.len() as f64
    }
}

fn run_orbit(seq: &InterleavedSequence, z: &[Complex64], eps_conv: f64, max_iter: usize) -> BasinSample {
    let point = z.iter().map(|c| [c.re, c.im]).collect();
    let mut cur = z.to_vec();
    let mut r = norm(&cur);
    if r < eps_conv {
        return BasinSample { point, verdict: Verdict::Converged, iterations: 0, final_norm: r };
    }
    let steps = max_iter.min(seq.len());
    for n in 0..steps {
        cur = seq.step(n, &cur);
        r = norm(&cur);
        if !(r < OVERFLOW_CAP) {
            return BasinSample { point, verdict: Verdict::Diverged, iterations: n + 1, final_norm: r };
        }
        if r < eps_conv {
            return BasinSample { point, verdict: Verdict::Converged, iterations: n + 1, final_norm: r };
        }
    }
    BasinSample { point, verdict: Verdict::Undecided, iterations: steps, final_norm: r }
}

/// Orbit every point in parallel; the report keeps the input order.
pub fn basin_scan(seq: &InterleavedSequence, points: &[Vec<Complex64>], eps_conv: f64, max_iter: usize) -> BasinReport {
    let samples: Vec<BasinSample> = points.par_iter().map(|z| run_orbit(seq, z, eps_conv, max_iter)).collect();
    let count = |v: Verdict| samples.iter().filter(|s| s.verdict == v).count();
    BasinReport {
        converged: count(Verdict::Converged),
        diverged: count(Verdict::Diverged),
        undecided: count(Verdict::Undecided),
        samples,
        eps_conv,
        max_iter,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn example_map() -> TriangularAuto {
        // (z1/2 + z2^2, z2/2)
        let mut p1 = Poly::zero(2);
        p1.add_term(vec![0, 2], linalg::ONE);
        TriangularAuto::new(linalg::from_real_diagonal(&[0.5, 0.5]), vec![p1, Poly::zero(2)]).unwrap()
    }

    #[test]
    fn stable_degree_values() {
        assert_eq!(stable_degree(3), (vec![4, 2, 1], 4));
        assert_eq!(stable_degree(1), (vec![1], 1));
        assert_eq!(stable_degree(5), (vec![16, 8, 4, 2, 1], 16));
    }

    #[test]
    fn closed_form_orbit() {
        let seq = InterleavedSequence::plain(vec![example_map(); 30]);
        let rep = iterate_triangular(&seq, &[c(0.0), c(1.0)], 30, 0.5, 2);
        assert!(!rep.diverged && rep.c0.is_finite());
        let mut z = [c(0.0), c(1.0)];
        for n in 0..30 {
            z = [z[0] * 0.5 + z[1] * z[1], z[1] * 0.5];
            assert!((z[1].re - 0.5f64.powi(n + 1)).abs() < 1e-15);
            assert!((rep.norms[n as usize + 1] - norm(&z)).abs() < 1e-12);
        }
        let zero = iterate_triangular(&seq, &[c(0.0), c(0.0)], 10, 0.5, 2);
        assert!(zero.norms.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn inverse_and_composition() {
        let autos = random_triangular(3, 0.3, 0.9, 1.0, 4, 2);
        let (w, _) = stable_degree(3);
        let z = vec![Complex64::new(0.3, -1.2), Complex64::new(2.0, 0.5), Complex64::new(-0.7, 0.1)];
        for f in &autos {
            assert!(f.satisfies_weights(&w));
            let back = f.inverse_eval(&f.eval(&z));
            assert!(norm(&back.iter().zip(&z).map(|(a, b)| a - b).collect::<Vec<_>>()) < 1e-10);
        }
        let fg = autos[0].compose(&autos[1]);
        assert!(fg.satisfies_weights(&w));
        let direct = autos[0].eval(&autos[1].eval(&z));
        let comp = fg.eval(&z);
        assert!(norm(&direct.iter().zip(&comp).map(|(a, b)| a - b).collect::<Vec<_>>()) < 1e-10);
        let three = autos[2].compose(&fg);
        assert!(three.satisfies_weights(&w));
        assert!(TriangularAuto::new(three.linear.clone(), three.p.clone()).is_ok());
    }

    #[test]
    fn rejects_non_triangular_dependence() {
        let mut p0 = Poly::zero(2);
        p0.add_term(vec![2, 0], linalg::ONE);
        assert!(TriangularAuto::new(linalg::identity(2), vec![p0, Poly::zero(2)]).is_err());
    }

    #[test]
    fn epoch_recursion_examples() {
        let s: Vec<f64> = (0..60).map(|h| 2f64.powi(h)).collect();
        assert_eq!(epoch_recursion(1.0, 0.5, 2.0, &s, 10.0).verdict, EpochVerdict::Infinitesimal);
        let zero = epoch_recursion(1.0, 0.5, 2.0, &s, 0.0);
        assert!(zero.log_r.iter().all(|&x| x == f64::NEG_INFINITY));
        let lin: Vec<f64> = (0..60).map(|h| h as f64).collect();
        assert_eq!(epoch_recursion(1.0, 0.5, 2.0, &lin, 1e6).verdict, EpochVerdict::BlowUp);
        // passes far beyond double range before decaying
        let fast: Vec<f64> = (0..60).map(|h| 4.0 * 2f64.powi(h)).collect();
        let rep = epoch_recursion(1.0, 0.5, 2.0, &fast, 1e10);
        assert_eq!(rep.verdict, EpochVerdict::Infinitesimal);
        assert!(rep.peak_log_r > 1e3);
    }

    #[test]
    fn scalar_maps_converge_in_predicted_steps() {
        let f = TriangularAuto::new(linalg::from_real_diagonal(&[0.5, 0.5]), vec![Poly::zero(2); 2]).unwrap();
        let seq = InterleavedSequence::plain(vec![f; 200]);
        let z = vec![c(3.0), c(4.0)];
        let rep = basin_scan(&seq, &[z], 1e-9, 200);
        let expect = ((1e-9f64 / 5.0).ln() / 0.5f64.ln()).ceil() as usize;
        assert_eq!(rep.samples[0].iterations, expect);
    }

    #[test]
    fn word_schedule_positions() {
        let autos = random_triangular(2, 0.1, 0.2, 1.0, 40, 1);
        let seq = InterleavedSequence::with_word_schedule(autos, 0, None).unwrap();
        assert_eq!(seq.interleave.keys().copied().collect::<Vec<_>>(), vec![0, 1, 3, 7, 15, 31]);
        let g = seq.gap_diagnostics(2);
        assert!(g.gaps_increasing);
    }

    #[test]
    fn grid_counts() {
        let spec = GridSpec { radius: 5.0, per_axis: 21, samples: 500, far_field: 10, far_radius: 1e3, seed: 3 };
        let pts = spec.points(2);
        assert_eq!(pts.len(), 510);
        assert!(pts[500..].iter().all(|z| norm(z) >= 5.0 - 1e-9 && norm(z) <= 1e3 + 1e-9));
        assert_eq!(spec.slice(2).len(), 441);
    }
}
