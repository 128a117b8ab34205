//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if any
//! criterion fails. Run with `cargo test --test acceptance`.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::Instant;

use jetconj::basin::{self, basin_scan, epoch_recursion, EpochVerdict, GridSpec, InterleavedSequence};
use jetconj::bunching;
use jetconj::config::ExperimentConfig;
use jetconj::jet::Jet2;
use jetconj::linalg::{self, CMatrix};
use jetconj::nilpotency;
use jetconj::pipeline::run_pipeline;
use jetconj::polyspace::{conj_matrix, decomposition_trace, monomial_pairs, permutation_unitary, HomQuadMap, PinchedSequence};
use jetconj::poset::{Permutation, Poset, Resonance};
use jetconj::report::{emit, Emit};
use jetconj::solver::{self, random_jets, solve_2jet, SolveParams};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------- independent oracles ----------

type Idx = (Vec<u32>, usize);

fn oracle_h(d: usize) -> Vec<Idx> {
    let mut out = Vec::new();
    for i in 0..d {
        for a in 0..d {
            for b in a..d {
                let mut alpha = vec![0u32; d];
                alpha[a] += 1;
                alpha[b] += 1;
                out.push((alpha, i));
            }
        }
    }
    out
}

fn oracle_leq(s: &Idx, t: &Idx) -> bool {
    if s.1 > t.1 {
        return false;
    }
    let (mut ps, mut pt) = (0, 0);
    for m in 0..s.0.len() {
        ps += s.0[m];
        pt += t.0[m];
        if ps > pt {
            return false;
        }
    }
    true
}

struct OracleSets {
    h: Vec<Idx>,
    t: BTreeSet<Idx>,
    v: BTreeSet<Idx>,
    w: BTreeSet<(Idx, Idx)>,
}

fn oracle_sets(d: usize) -> OracleSets {
    let h = oracle_h(d);
    let v: BTreeSet<Idx> = h.iter().filter(|(a, i)| a[*i] == 0).cloned().collect();
    // T is the complement of the up-closure of the complement of V
    let t: BTreeSet<Idx> = h
        .iter()
        .filter(|s| !h.iter().any(|r| !v.contains(r) && oracle_leq(r, s)))
        .cloned()
        .collect();
    let mut w = BTreeSet::new();
    for s in h.iter().filter(|s| !t.contains(*s)) {
        for tt in &h {
            if v.iter().any(|r| oracle_leq(s, r) && oracle_leq(r, tt)) {
                w.insert((s.clone(), tt.clone()));
            }
        }
    }
    OracleSets { h, t, v, w }
}

/// `σ·(α, i) = (α∘σ⁻¹, σ(i))` with `σ` the cycle `1 → 2 → .. → h → 1`.
fn oracle_cycle_act(h: usize, s: &Idx) -> Idx {
    let sigma = |j: usize| if j < h { (j + 1) % h } else { j };
    let mut alpha = vec![0u32; s.0.len()];
    for (j, &a) in s.0.iter().enumerate() {
        alpha[sigma(j)] = a;
    }
    (alpha, sigma(s.1))
}

fn oracle_word(d: usize) -> Vec<usize> {
    if d <= 1 {
        return Vec::new();
    }
    let mut w: Vec<usize> = (2..d).collect();
    w.extend(oracle_word(d - 1));
    w.push(d);
    w
}

/// Image of `{s}` under `W σ_N W ... σ_1 W`.
fn oracle_word_image(o: &OracleSets, letters: &[usize], s: &Idx) -> BTreeSet<Idx> {
    let apply_w = |e: &BTreeSet<Idx>| -> BTreeSet<Idx> {
        o.w.iter().filter(|(a, _)| e.contains(a)).map(|(_, b)| b.clone()).collect()
    };
    let mut e = apply_w(&BTreeSet::from([s.clone()]));
    for &h in letters {
        e = e.iter().map(|x| oracle_cycle_act(h, x)).collect();
        e = apply_w(&e);
    }
    e
}

fn oracle_longest_chain(h: &[Idx]) -> usize {
    // elements sorted so that s < t implies s comes first (by prefix-sum weight)
    let mut order: Vec<&Idx> = h.iter().collect();
    order.sort_by_key(|s| {
        let mut acc = 0u32;
        let w: u32 = s.0.iter().map(|&a| {
            acc += a;
            acc
        }).sum();
        (w, s.1)
    });
    let mut best = vec![1usize; order.len()];
    for j in 0..order.len() {
        for k in 0..j {
            if order[k] != order[j] && oracle_leq(order[k], order[j]) {
                best[j] = best[j].max(best[k] + 1);
            }
        }
    }
    best.into_iter().max().unwrap_or(0)
}

/// Quadratic coefficient `(a, b; k)` of `z ↦ q(z)` by polarization of evaluations.
fn polar_coeff(q: &dyn Fn(&[Complex64]) -> Vec<Complex64>, d: usize, a: usize, b: usize, k: usize) -> Complex64 {
    let e = |idx: &[usize]| {
        let mut z = vec![Complex64::new(0.0, 0.0); d];
        for &j in idx {
            z[j] += 1.0;
        }
        q(&z)[k]
    };
    if a == b {
        e(&[a])
    } else {
        e(&[a, b]) - e(&[a]) - e(&[b])
    }
}

/// Quadratic part of the 2-jet `F ∘ G`, coefficientwise by polarization.
fn oracle_compose_quad(f: &Jet2, g: &Jet2) -> Vec<((usize, usize, usize), Complex64)> {
    let d = f.d();
    let q = |z: &[Complex64]| -> Vec<Complex64> {
        let gz = g.quad.eval(z);
        let lin = &f.linear * nalgebra::DVector::from_column_slice(&gz);
        let inner = &g.linear * nalgebra::DVector::from_column_slice(z);
        let fq = f.quad.eval(inner.as_slice());
        lin.iter().zip(fq).map(|(a, b)| a + b).collect()
    };
    let mut out = Vec::new();
    for &(a, b) in &monomial_pairs(d) {
        for k in 0..d {
            out.push(((a, b, k), polar_coeff(&q, d, a, b, k)));
        }
    }
    out
}

fn random_upper(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            linalg::unit_phase(rng) * rng.gen_range(0.3..1.5)
        } else if i < j {
            linalg::unit_disk(rng)
        } else {
            linalg::ZERO
        }
    })
}

// ---------- criteria ----------

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn c1_epsilon() -> Outcome {
    let t = Instant::now();
    let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    let e2 = bunching::epsilon(2).unwrap();
    let e3 = bunching::epsilon(3).unwrap();
    let table = bunching::epsilon_table(6).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let ok = e2 == r(1, 14) && e3 == r(1, 5_591_039) && table.len() == 5 && secs < 1.0;
    outcome(ok, format!("ε(2) = {e2}, ε(3) = {e3}, {secs:.3}s"))
}

fn c2_relation_word() -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for d in 1..=6 {
        let lib = nilpotency::verify_combi(d).unwrap();
        assert_eq!(lib.word, oracle_word(d));
        // oracle on d <= 4 (d = 5, 6 grow quickly in the set-based oracle)
        let oracle_empty = d > 4 || {
            let o = oracle_sets(d);
            o.h.iter().all(|s| oracle_word_image(&o, &oracle_word(d), s).is_empty())
        };
        ok &= lib.holds && oracle_empty;
        notes.push(format!("d{d}:{}", if lib.holds { "empty" } else { "NONEMPTY" }));
    }
    let short = nilpotency::verify_combi_truncated(3).unwrap();
    let o3 = oracle_sets(3);
    let mut letters = oracle_word(3);
    letters.pop();
    let oracle_short = o3.h.iter().map(|s| oracle_word_image(&o3, &letters, s).len()).sum::<usize>();
    ok &= !short.holds && oracle_short > 0 && short.remaining_pairs == oracle_short;
    let secs = t.elapsed().as_secs_f64();
    ok &= secs < 5.0;
    outcome(ok, format!("{}; shortened d3 leaves {} pairs; {secs:.2}s", notes.join(" "), short.remaining_pairs))
}

fn c3_w_structure() -> Outcome {
    let mut ok = true;
    for d in 2..=6 {
        let p = Poset::quadratic(d).unwrap();
        let res = Resonance::new(&p).unwrap();
        ok &= res.w.compose(&res.w) == res.w;
        if d <= 4 {
            let o = oracle_sets(d);
            let lib_w: BTreeSet<(Idx, Idx)> = res
                .w
                .pairs()
                .map(|(s, t)| {
                    let (a, b) = (p.set().get(s), p.set().get(t));
                    ((a.alpha.clone(), a.i), (b.alpha.clone(), b.i))
                })
                .collect();
            ok &= lib_w == o.w;
            ok &= p.max_chain_len() == 3 * d - 2 && oracle_longest_chain(&o.h) == 3 * d - 2;
        }
    }
    let o = oracle_sets(2);
    let t2: BTreeSet<Idx> = [(vec![0, 2], 0)].into();
    let v2: BTreeSet<Idx> = [(vec![0, 2], 0), (vec![2, 0], 1)].into();
    let image: BTreeSet<Idx> = o.w.iter().map(|(_, b)| b.clone()).collect();
    let w_h: BTreeSet<Idx> = [(vec![2, 0], 1)].into();
    let p2 = Poset::quadratic(2).unwrap();
    let r2 = Resonance::new(&p2).unwrap();
    let lib_t: BTreeSet<Idx> = r2.t.iter().map(|k| (p2.set().get(k).alpha.clone(), p2.set().get(k).i)).collect();
    let lib_v: BTreeSet<Idx> = r2.v.iter().map(|k| (p2.set().get(k).alpha.clone(), p2.set().get(k).i)).collect();
    ok &= o.t == t2 && o.v == v2 && image == w_h && lib_t == t2 && lib_v == v2;
    outcome(ok, "W∘W = W for d = 2..6; d = 2 sets T, V, W(H) match; chains 3d-2 for d = 2..4")
}

fn c4_matrix_word() -> Outcome {
    let t = Instant::now();
    let mut worst = 0.0_f64;
    for d in 2..=4 {
        let rep = nilpotency::verify_nilp_matrix(d, 100, 2024).unwrap();
        worst = worst.max(rep.max_entry).max(rep.ones_max_entry);
    }
    // oracle product for d = 3 from hand-built permutation operators
    let o = oracle_sets(3);
    let pos = |s: &Idx| o.h.iter().position(|x| x == s).unwrap();
    let n = o.h.len();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let mut acc = CMatrix::zeros(n, n);
        for (s, tt) in &o.w {
            acc[(pos(s), pos(tt))] = linalg::unit_disk(&mut rng) + 0.01;
        }
        for &h in &oracle_word(3) {
            let mut perm = CMatrix::zeros(n, n);
            for s in &o.h {
                perm[(pos(s), pos(&oracle_cycle_act(h, s)))] = linalg::ONE;
            }
            let mut m = CMatrix::zeros(n, n);
            for (s, tt) in &o.w {
                m[(pos(s), pos(tt))] = linalg::unit_disk(&mut rng) + 0.01;
            }
            acc = acc * perm * m;
        }
        worst = worst.max(linalg::max_abs(&acc));
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(worst <= 1e-12 && secs < 10.0, format!("max |entry| {worst:e} over d = 2, 3, 4; {secs:.2}s"))
}

fn c5_operator_structure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut outside, mut diag_err, mut contra, mut oracle_err) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for d in [2usize, 3] {
        let p = Poset::quadratic(d).unwrap();
        let n = p.len();
        for _ in 0..50 {
            let l = random_upper(&mut rng, d);
            let a = conj_matrix(&l).unwrap();
            for s in 0..n {
                for t in 0..n {
                    if !p.leq(s, t) {
                        outside = outside.max(a[(s, t)].norm());
                    }
                }
                let e = p.set().get(s);
                let mut lam = linalg::ONE / l[(e.i, e.i)];
                for (j, &k) in e.alpha.iter().enumerate() {
                    lam *= l[(j, j)].powu(k);
                }
                diag_err = diag_err.max((a[(s, s)] - lam).norm() / lam.norm().max(1.0));
            }
            // column t is the image of the basis element t: L⁻¹ p(L z)
            let l_inv = linalg::invert(&l).unwrap();
            for t in 0..n {
                let e = p.set().get(t);
                let basis = |z: &[Complex64]| -> Vec<Complex64> {
                    let lz = &l * nalgebra::DVector::from_column_slice(z);
                    let mut v = nalgebra::DVector::from_element(d, linalg::ZERO);
                    let mut m = linalg::ONE;
                    for (j, &k) in e.alpha.iter().enumerate() {
                        m *= lz[j].powu(k);
                    }
                    v[e.i] = m;
                    (&l_inv * v).iter().cloned().collect()
                };
                for (s, es) in p.set().elements().iter().enumerate() {
                    let ab: Vec<usize> = es.alpha.iter().enumerate().flat_map(|(j, &k)| std::iter::repeat(j).take(k as usize)).collect();
                    let c = polar_coeff(&basis, d, ab[0], ab[1], es.i);
                    oracle_err = oracle_err.max((c - a[(s, t)]).norm());
                }
            }
            let m2 = random_upper(&mut rng, d);
            let lhs = conj_matrix(&(&l * &m2)).unwrap();
            let rhs = conj_matrix(&m2).unwrap() * &a;
            contra = contra.max(linalg::max_abs(&(lhs - rhs)));
        }
    }
    let ok = outside <= 1e-14 && diag_err <= 1e-12 && contra <= 1e-10 && oracle_err <= 1e-10;
    outcome(
        ok,
        format!("outside order {outside:e}, diagonal {diag_err:.1e}, contravariance {contra:.1e}, vs evaluation {oracle_err:.1e}"),
    )
}

fn c6_decomp_slopes() -> Outcome {
    let t = Instant::now();
    let seq = PinchedSequence::random(2, 0.5, 4.0, 6).unwrap();
    let trace = decomposition_trace(&seq, 40, 5).unwrap();
    let s0 = trace.slope_m0.unwrap_or(f64::NEG_INFINITY);
    let s1 = trace.slope_m1.unwrap_or(f64::NEG_INFINITY);
    // the split itself is checked against the oracle W at one step
    let o = oracle_sets(2);
    let p = Poset::quadratic(2).unwrap();
    let a = conj_matrix(&seq.product(7, 0)).unwrap();
    let mut w_norm = 0.0_f64;
    for (s, tt) in &o.w {
        let si = p.set().elements().iter().position(|e| e.alpha == s.0 && e.i == s.1).unwrap();
        let ti = p.set().elements().iter().position(|e| e.alpha == tt.0 && e.i == tt.1).unwrap();
        w_norm = w_norm.max(a[(si, ti)].norm());
    }
    let lib_m1 = trace.rows[7].norm_m1;
    let secs = t.elapsed().as_secs_f64();
    let ok = s1 <= 0.05 && s0 <= 0.5f64.ln() + 0.05 && secs < 30.0 && lib_m1 >= w_norm - 1e-15;
    outcome(ok, format!("slope m1 {s1:.4} (<= 0.05), slope m0 {s0:.4} (<= {:.4}); {secs:.2}s", 0.5f64.ln() + 0.05))
}

/// Backward coefficient recursion for diagonal jets with `h_N = id`, using the
/// frame schedule of `d = 2`: a coordinate swap at `n = 2^h - 1`.
fn oracle_diagonal(f: &[Jet2]) -> (Vec<HomQuadMap>, Vec<HomQuadMap>) {
    let d = 2;
    let n_total = f.len();
    let swaps = |n: usize| if n == 0 { 0 } else { (usize::BITS - n.leading_zeros()) as usize };
    let mut h = vec![HomQuadMap::zeros(d); n_total + 1];
    let mut g = vec![HomQuadMap::zeros(d); n_total];
    for n in (0..n_total).rev() {
        let lam: Vec<Complex64> = (0..d).map(|k| f[n].linear[(k, k)]).collect();
        // allowed monomial of g in original coordinates: z_2^2 e_1, or z_1^2 e_2 after an odd number of swaps
        let allowed = if swaps(n) % 2 == 0 { (1, 1, 0) } else { (0, 0, 1) };
        for &(a, b) in &monomial_pairs(d) {
            for k in 0..d {
                let rhs = h[n + 1].coeff(a, b, k) * lam[a] * lam[b] + f[n].quad.coeff(a, b, k);
                if (a, b, k) == allowed {
                    g[n].set_coeff(a, b, k, rhs);
                } else {
                    h[n].set_coeff(a, b, k, rhs / lam[k]);
                }
            }
        }
    }
    (h, g)
}

fn c7_solver() -> Outcome {
    // diagonal oracle
    let f = solver::diagonal_jets(2, 0.3, 0.45, 40, 1.0, 17);
    let out = solve_2jet(&f, &SolveParams::default()).unwrap();
    let (oh, og) = oracle_diagonal(&f);
    let mut diag_err = 0.0_f64;
    for n in 0..f.len() {
        diag_err = diag_err.max((&out.h[n].quad - &oh[n]).norm()).max((&out.g[n].quad - &og[n]).norm());
        diag_err = diag_err.max(linalg::max_abs(&(&out.h[n].linear - linalg::identity(2))));
    }
    // general instances
    let mut residual = 0.0_f64;
    let mut outside = 0usize;
    for d in [2usize, 3] {
        let (lambda, m) = (0.5, 3.9);
        assert!(bunching::check_summability(lambda, m, d).unwrap().holds);
        let seq = PinchedSequence::random(d, lambda, m, 31 + d as u64).unwrap();
        let f = random_jets(&seq, 50, true, 1.0, 41 + d as u64);
        let out = solve_2jet(&f, &SolveParams { m_bound: Some(m), terminal: None }).unwrap();
        for n in 0..50 {
            let lhs = oracle_compose_quad(&out.h[n + 1], &f[n]);
            let rhs = oracle_compose_quad(&out.g[n], &out.h[n]);
            for ((_, x), (_, y)) in lhs.iter().zip(&rhs) {
                residual = residual.max((x - y).norm());
            }
            let lin = &out.h[n + 1].linear * &f[n].linear - &out.g[n].linear * &out.h[n].linear;
            residual = residual.max(linalg::max_abs(&lin));
            // framed g: coefficient (a,b;j) moves to (τa, τb; τj) exactly
            let tau: &Permutation = &out.taus[n];
            for &(a, b) in &monomial_pairs(d) {
                for j in 0..d {
                    let c = out.g[n].quad.coeff(a, b, j);
                    let (ta, tb, tj) = (tau.apply(a), tau.apply(b), tau.apply(j));
                    if ta.min(tb) <= tj && c != linalg::ZERO {
                        outside += 1;
                    }
                }
            }
        }
    }
    let ok = diag_err <= 1e-9 && residual <= 1e-8 && outside == 0;
    outcome(
        ok,
        format!("diagonal oracle {diag_err:.1e}, max 2-jet residual {residual:.1e}, {outside} coefficients outside T"),
    )
}

fn c8_growth() -> Outcome {
    let (lambda, m) = (0.5, 4.1);
    let theta = 1.05 * lambda * lambda * m;
    let mut worst = f64::NEG_INFINITY;
    let mut ok = bunching::hypothesis_log(lambda, m, 2).unwrap() < 0.0 && bunching::check_summability(lambda, m, 2).unwrap().holds;
    for s in 0..10u64 {
        let seq = PinchedSequence::random(2, lambda, m, 100 + s).unwrap();
        let f = random_jets(&seq, 80, true, 1.0, 200 + s);
        let out = solve_2jet(&f, &SolveParams { m_bound: Some(m), terminal: None }).unwrap();
        // least squares slope of log|h_n| computed here
        let pts: Vec<(f64, f64)> = out.h.iter().enumerate().map(|(n, h)| (n as f64, h.norm().ln())).collect();
        let k = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (sx / k, sy / k);
        let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
        let slope = num / den;
        worst = worst.max(slope);
        ok &= slope <= 7.0 * theta.ln() + 0.1;
    }
    outcome(ok, format!("worst slope {worst:.4} vs 7 log Θ + 0.1 = {:.4}", 7.0 * theta.ln() + 0.1))
}

fn c9_epoch_recursion() -> Outcome {
    let mut ok = true;
    let mut worst_epoch = 0;
    for &k in &[2.0_f64, 3.0, 4.0] {
        for &c in &[1.0_f64, 2.0] {
            for &lambda in &[0.25_f64, 0.5] {
                let s: Vec<f64> = (0..60).map(|h| 4.0 * k.powi(h)).collect();
                for &r0 in &[1e-3, 1.0, 1e5, 1e10] {
                    let rep = epoch_recursion(c, lambda, k, &s, r0);
                    ok &= rep.verdict == EpochVerdict::Infinitesimal;
                    worst_epoch = worst_epoch.max(rep.first_small.unwrap_or(usize::MAX));
                }
            }
        }
    }
    let slow: Vec<f64> = (0..60).map(|h| h as f64).collect();
    let quad: Vec<f64> = (0..60).map(|h| (h * h) as f64).collect();
    let n1 = epoch_recursion(1.0, 0.5, 2.0, &slow, 1e6);
    let n2 = epoch_recursion(1.0, 0.5, 3.0, &quad, 1e8);
    let cap = basin::OVERFLOW_CAP.ln();
    ok &= n1.verdict == EpochVerdict::BlowUp && n2.verdict == EpochVerdict::BlowUp;
    ok &= *n1.log_r.last().unwrap() > cap && *n2.log_r.last().unwrap() > cap;
    ok &= worst_epoch <= 60;
    outcome(ok, format!("sufficiency below 1e-9 by epoch {worst_epoch}; both necessity controls exceed 1e150"))
}

fn c10_basin() -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for (d, lo, hi, epochs) in [(2usize, 0.1, 0.2, 6u32), (3, 0.3, 0.5, 4)] {
        let big_d = 1usize << (d - 1);
        let max_iter = 10 * (big_d.pow(epochs) - 1);
        let autos = basin::random_triangular(d, lo, hi, 1.0, max_iter, 77 + d as u64);
        let seq = InterleavedSequence::with_word_schedule(autos.clone(), 0, Some(epochs)).unwrap();
        // schedule: m_h = D^h - 1 with the cycle of letter ((h-1) mod N), h = 0 using the last letter
        let word = oracle_word(d);
        let expect: Vec<usize> = (0..=epochs).map(|h| big_d.pow(h) - 1).collect();
        ok &= seq.interleave.keys().copied().collect::<Vec<_>>() == expect;
        for (h, (_, mat)) in seq.interleave.iter().enumerate() {
            let letter = if h == 0 { *word.last().unwrap() } else { word[(h - 1) % word.len()] };
            ok &= *mat == permutation_unitary(&Permutation::cycle(d, letter));
        }
        let gaps = seq.gap_diagnostics(big_d as u64);
        ok &= gaps.gaps_increasing;
        let grid = GridSpec { radius: 5.0, per_axis: 21, samples: 500, far_field: 100, far_radius: 1e3, seed: 5 };
        let points = grid.points(d);
        let with = basin_scan(&seq, &points, 1e-9, max_iter);
        let plain = basin_scan(&InterleavedSequence::plain(autos), &points, 1e-9, max_iter);
        ok &= points.len() >= 500 && with.converged == points.len() && plain.converged == points.len();
        notes.push(format!("d{d}: {}/{} interleaved, {}/{} plain", with.converged, points.len(), plain.converged, points.len()));
    }
    let secs = t.elapsed().as_secs_f64();
    ok &= secs < 120.0;
    outcome(ok, format!("{}; {secs:.1}s", notes.join(", ")))
}

fn c11_pipeline() -> Outcome {
    let cfg = ExperimentConfig::default();
    let p = &cfg.pipeline;
    assert!(p.d == 2 && p.lambda == 0.45 && p.m == 4.5 && cfg.seed == 1);
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut passed = true;
    let mut stages = Vec::new();
    for dir in &dirs {
        let mut run = run_pipeline(&cfg).unwrap();
        passed &= run.outputs.report.passed && run.failed_stage.is_none();
        stages = run.outputs.report.checks.iter().map(|c| c.name.clone()).collect();
        emit(&mut run.outputs, dir.path(), "pipeline", &[Emit::Json, Emit::Csv, Emit::Svg]).unwrap();
    }
    let mut identical = true;
    for f in ["pipeline.json", "pipeline.csv", "pipeline.svg"] {
        let a = std::fs::read(dirs[0].path().join(f)).unwrap();
        let b = std::fs::read(dirs[1].path().join(f)).unwrap();
        identical &= a == b;
    }
    let expected = ["pinching", "bunching", "rescaling", "solve", "structure", "basin"];
    let ok = passed && identical && stages == expected;
    outcome(ok, format!("stages {stages:?} all pass: {passed}; byte-identical outputs: {identical}"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("1 exact epsilon table", c1_epsilon),
        ("2 relation word annihilates W", c2_relation_word),
        ("3 W idempotent, d=2 sets, chain length", c3_w_structure),
        ("4 matrix word vanishes", c4_matrix_word),
        ("5 conjugacy operator structure", c5_operator_structure),
        ("6 split decay slopes", c6_decomp_slopes),
        ("7 2-jet solver correctness", c7_solver),
        ("8 growth of h_n", c8_growth),
        ("9 epoch recursion dichotomy", c9_epoch_recursion),
        ("10 interleaved basin", c10_basin),
        ("11 end-to-end pipeline", c11_pipeline),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    for (name, run) in criteria {
        let o = run();
        writeln!(out, "{} [{name}] {}", if o.passed { "PASS" } else { "FAIL" }, o.detail).unwrap();
        if !o.passed {
            failed.push(name);
        }
    }
    drop(out);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
