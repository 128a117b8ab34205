//! One runner per CLI subcommand. Each returns its report plus optional
//! CSV and SVG payloads; [`crate::report::emit`] writes them.

use crate::basin::{self, InterleavedSequence, Verdict};
use crate::bunching;
use crate::config::{BasinConfig, DecompConfig, ExperimentConfig, SequenceKind};
use crate::error::{Error, Result};
use crate::nilpotency;
use crate::polyspace::{decomposition_trace, PinchedSequence};
use crate::poset::{Poset, Resonance};
use crate::report::{heatmap_svg, line_plot_svg, Outputs, RunReport, Table};
use crate::seed;
use crate::solver;

pub fn pinched_sequence(kind: SequenceKind, d: usize, lambda: f64, m: f64, master_seed: u64) -> Result<PinchedSequence> {
    match kind {
        SequenceKind::Random => PinchedSequence::random(d, lambda, m, seed::derive(master_seed, "linear")),
        SequenceKind::Scalar => PinchedSequence::scalar(d, lambda, m),
        SequenceKind::DiagonalExtremal => PinchedSequence::diagonal_extremal(d, lambda, m),
    }
}

pub fn poset(cfg: &ExperimentConfig) -> Result<Outputs> {
    let d = cfg.poset.d;
    let poset = Poset::quadratic(d)?;
    let res = Resonance::new(&poset)?;
    let mut report = RunReport::new("poset", &cfg.hash(), cfg.seed);
    let idempotent = res.w.compose(&res.w) == res.w;
    let chain = poset.max_chain_len();
    report.check("w-idempotent", idempotent, format!("|W| = {}", res.w.len()));
    report.check("max-chain", chain == 3 * d - 2, format!("longest chain {chain}, expected {}", 3 * d - 2));
    report.metric("d", d);
    report.metric("size", poset.len());
    report.metric("t_size", res.t.len());
    report.metric("v_size", res.v.len());
    report.metric("w_size", res.w.len());
    report.metric("t", res.t.iter().map(|p| poset.set().get(p).clone()).collect::<Vec<_>>());
    report.metric("v", res.v.iter().map(|p| poset.set().get(p).clone()).collect::<Vec<_>>());
    let mut table = Table::new(&["position", "alpha", "i", "in_t", "in_v", "w_row"]);
    for (p, s) in poset.set().elements().iter().enumerate() {
        let alpha: Vec<String> = s.alpha.iter().map(u32::to_string).collect();
        let row = res.w.pairs().filter(|&(a, _)| a == p).count();
        table.push([
            p.to_string(),
            alpha.join(" "),
            (s.i + 1).to_string(),
            res.t.contains(p).to_string(),
            res.v.contains(p).to_string(),
            row.to_string(),
        ]);
    }
    Ok(Outputs { report, table: Some(table), svg: None })
}

pub fn verify_nilpotency(cfg: &ExperimentConfig) -> Result<Outputs> {
    let c = &cfg.nilpotency;
    let mut report = RunReport::new("verify-nilpotency", &cfg.hash(), cfg.seed);
    let mut table = Table::new(&["kind", "d", "holds", "detail"]);
    for d in 1..=c.combi_max {
        let out = nilpotency::verify_combi(d)?;
        report.check(&format!("relation-word-d{d}"), out.holds, format!("{} pairs remain", out.remaining_pairs));
        table.push(["relation".to_string(), d.to_string(), out.holds.to_string(), out.remaining_pairs.to_string()]);
    }
    if c.combi_max >= 3 {
        let short = nilpotency::verify_combi_truncated(3)?;
        report.check(
            "shortened-word-d3-nonempty",
            !short.holds,
            format!("{} pairs survive without the last letter", short.remaining_pairs),
        );
    }
    for &d in &c.matrix_dims {
        let rep = nilpotency::verify_nilp_matrix(d, c.trials, cfg.seed)?;
        report.check(
            &format!("matrix-word-d{d}"),
            rep.holds,
            format!("max entry {:e} over {} trials", rep.max_entry, rep.trials),
        );
        table.push(["matrix".to_string(), d.to_string(), rep.holds.to_string(), format!("{:e}", rep.max_entry)]);
    }
    Ok(Outputs { report, table: Some(table), svg: None })
}

pub fn decomp_bounds(cfg: &ExperimentConfig) -> Result<Outputs> {
    let DecompConfig { d, lambda, m, horizon, fit_from, kind } = cfg.decomp.clone();
    let seq = pinched_sequence(kind, d, lambda, m, cfg.seed)?;
    let trace = decomposition_trace(&seq, horizon, fit_from)?;
    let mut report = RunReport::new("decomp-bounds", &cfg.hash(), cfg.seed);
    let tol = 0.05;
    let resonant = (lambda * lambda * m).ln();
    let s1 = trace.slope_m1.unwrap_or(f64::NEG_INFINITY);
    let s0 = trace.slope_m0.unwrap_or(f64::NEG_INFINITY);
    report.check("resonant-part-slope", s1 <= resonant + tol, format!("slope {s1:.4} vs log(Λ²M) = {resonant:.4}"));
    report.check("regular-part-slope", s0 <= lambda.ln() + tol, format!("slope {s0:.4} vs log Λ = {:.4}", lambda.ln()));
    report.metric("slope_m0", trace.slope_m0);
    report.metric("slope_m1", trace.slope_m1);
    report.metric("fit_from", fit_from);
    let mut table = Table::new(&["n", "norm_a", "norm_m0", "norm_m1"]);
    for r in &trace.rows {
        table.push([r.n.to_string(), r.norm_a.to_string(), r.norm_m0.to_string(), r.norm_m1.to_string()]);
    }
    let series = |name: &str, f: fn(&crate::polyspace::DecompRow) -> f64| {
        (name.to_string(), trace.rows.iter().map(|r| (r.n as f64, f(r).log10())).collect())
    };
    let svg = line_plot_svg(
        "operator split norms",
        "n",
        "log10 norm",
        &[series("A", |r| r.norm_a), series("m0", |r| r.norm_m0), series("m1", |r| r.norm_m1)],
    );
    Ok(Outputs { report, table: Some(table), svg: Some(svg) })
}

pub fn solve_jets(cfg: &ExperimentConfig) -> Result<Outputs> {
    let c = &cfg.solve;
    let seq = PinchedSequence::random(c.d, c.lambda, c.m, seed::derive(cfg.seed, "linear"))?;
    let jets = solver::random_jets(&seq, c.horizon, c.general, c.quad_scale, cfg.seed);
    let mut report = RunReport::new("solve-jets", &cfg.hash(), cfg.seed);
    let out = match solver::solve_checked(&jets, c.lambda, c.m, Some(c.pinching_max)) {
        Ok(out) => out,
        Err(e @ (Error::PinchingViolated { .. } | Error::Bunching { .. })) => {
            report.check("hypotheses", false, e.to_string());
            return Ok(Outputs { report, table: None, svg: None });
        }
        Err(e) => return Err(e),
    };
    report.check("hypotheses", true, "pinching and summability hold");
    report.check(
        "residual",
        out.max_residual() <= c.residual_tol,
        format!("max residual {:e}", out.max_residual()),
    );
    report.check(
        "triangular-support",
        out.max_off_support() == 0.0,
        format!("largest coefficient outside the triangular set {:e}", out.max_off_support()),
    );
    report.check(
        "unitary-linear-part",
        out.max_unitarity_defect() <= 1e-10,
        format!("max unitarity defect {:e}", out.max_unitarity_defect()),
    );
    report.metric("max_residual", out.max_residual());
    report.metric("diagnostics", &out.diagnostics);
    let mut table = Table::new(&["n", "residual", "h_norm", "g_norm", "u_norm", "unitarity_defect", "off_support"]);
    for s in &out.diagnostics {
        table.push([
            s.n.to_string(),
            s.residual.to_string(),
            s.h_norm.to_string(),
            s.g_norm.to_string(),
            s.u_norm.to_string(),
            s.unitarity_defect.to_string(),
            s.off_support.to_string(),
        ]);
    }
    let series = |name: &str, f: fn(&solver::StepDiagnostics) -> f64| {
        (name.to_string(), out.diagnostics.iter().map(|s| (s.n as f64, f(s).log10())).collect())
    };
    let svg = line_plot_svg(
        "2-jet solution norms",
        "n",
        "log10 norm",
        &[series("h", |s| s.h_norm), series("g", |s| s.g_norm), series("u", |s| s.u_norm)],
    );
    Ok(Outputs { report, table: Some(table), svg: Some(svg) })
}

/// `10 m_H` for `H` epochs of the word schedule, at least 100.
pub fn basin_horizon(d: usize, epochs: u32) -> usize {
    let big_d = bunching::big_d(d.max(1)) as usize;
    (10 * (big_d.pow(epochs).saturating_sub(1))).max(100)
}

pub fn basin_sequence(c: &BasinConfig, master_seed: u64) -> Result<(InterleavedSequence, usize)> {
    if c.d == 0 {
        return Err(Error::InvalidDimension { d: 0, reason: "dimension must be at least 1" });
    }
    if !(c.lambda_lo > 0.0 && c.lambda_lo <= c.lambda_hi && c.lambda_hi < 1.0) {
        return Err(Error::Config(format!("need 0 < lambda_lo <= lambda_hi < 1, got {} and {}", c.lambda_lo, c.lambda_hi)));
    }
    let max_iter = basin_horizon(c.d, c.epochs);
    let autos = basin::random_triangular(c.d, c.lambda_lo, c.lambda_hi, c.quad_scale, max_iter, master_seed);
    let seq = match c.parsed_schedule()? {
        None => InterleavedSequence::with_word_schedule(autos, 0, Some(c.epochs))?,
        Some(list) => InterleavedSequence::with_permutations(autos, &list),
    };
    Ok((seq, max_iter))
}

/// Heat map of iteration counts over the slice scan.
pub fn slice_svg(title: &str, per_axis: usize, slice: &basin::BasinReport) -> String {
    let values: Vec<Option<f64>> = slice
        .samples
        .iter()
        .map(|s| (s.verdict == Verdict::Converged).then_some(s.iterations as f64))
        .collect();
    heatmap_svg(title, per_axis, per_axis, &values)
}

pub fn basin_table(rep: &basin::BasinReport) -> Table {
    let mut table = Table::new(&["sample", "point", "verdict", "iterations", "final_norm"]);
    for (k, s) in rep.samples.iter().enumerate() {
        let point: Vec<String> = s.point.iter().map(|[re, im]| format!("{re}{im:+}i")).collect();
        let verdict = match s.verdict {
            Verdict::Converged => "converged",
            Verdict::Diverged => "diverged",
            Verdict::Undecided => "undecided",
        };
        table.push([k.to_string(), point.join(" "), verdict.to_string(), s.iterations.to_string(), s.final_norm.to_string()]);
    }
    table
}

pub fn basin(cfg: &ExperimentConfig) -> Result<Outputs> {
    let c = &cfg.basin;
    let (seq, max_iter) = basin_sequence(c, cfg.seed)?;
    let points = c.grid.spec(cfg.seed).points(c.d);
    let rep = basin::basin_scan(&seq, &points, c.eps_conv, max_iter);
    let slice = basin::basin_scan(&seq, &c.grid.slice_spec(cfg.seed).slice(c.d), c.eps_conv, max_iter);
    let (_, k) = basin::stable_degree(c.d);
    let gaps = seq.gap_diagnostics(k);
    let mut report = RunReport::new("basin", &cfg.hash(), cfg.seed);
    report.check(
        "all-converged",
        rep.converged == rep.samples.len(),
        format!("{} converged, {} diverged, {} undecided", rep.converged, rep.diverged, rep.undecided),
    );
    report.metric("samples", rep.samples.len());
    report.metric("converged", rep.converged);
    report.metric("diverged", rep.diverged);
    report.metric("undecided", rep.undecided);
    report.metric("max_iter", max_iter);
    report.metric("stable_degree", k);
    report.metric("gaps", &gaps);
    let svg = slice_svg("iterations to converge", c.grid.slice_per_axis, &slice);
    Ok(Outputs { report, table: Some(basin_table(&rep)), svg: Some(svg) })
}

pub fn epsilon_table(cfg: &ExperimentConfig) -> Result<Outputs> {
    let rows = bunching::epsilon_table(cfg.epsilon.dmax)?;
    let mut report = RunReport::new("epsilon-table", &cfg.hash(), cfg.seed);
    report.check(
        "rescaling-exponent-dominates",
        rows.iter().all(|r| r.rescale_ok),
        "1/(2(2^{3d(d-1)^2/2}-1)) >= epsilon(d) for every row",
    );
    let mut table = Table::new(&["d", "epsilon", "epsilon_f64", "delta", "D", "K", "summability_threshold"]);
    for r in &rows {
        table.push([
            r.d.to_string(),
            r.epsilon.clone(),
            r.epsilon_f64.to_string(),
            r.delta.clone(),
            r.big_d.to_string(),
            r.k.to_string(),
            r.summability_threshold.clone(),
        ]);
    }
    report.metric("rows", &rows);
    Ok(Outputs { report, table: Some(table), svg: None })
}
