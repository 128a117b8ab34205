//! End-to-end run: pinching, bunching admissibility, rescaling factor,
//! 2-jet solve, structural checks, rescaled normal forms and their basin.
//! Each stage failure is terminal and the report names the violated condition.

use crate::basin::{self, BasinReport, InterleavedSequence, TriangularAuto};
use crate::bunching;
use crate::commands::{basin_table, pinched_sequence, slice_svg};
use crate::config::{ExperimentConfig, PipelineConfig};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::report::{Outputs, RunReport};
use crate::solver::{self, SolveParams};

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub outputs: Outputs,
    /// Stage reached; `None` when every stage passed.
    pub failed_stage: Option<&'static str>,
    pub basin: Option<BasinReport>,
}

fn stop(mut report: RunReport, stage: &'static str, detail: String) -> PipelineRun {
    report.check(stage, false, detail);
    report.metric("failed_stage", stage);
    PipelineRun { outputs: Outputs { report, table: None, svg: None }, failed_stage: Some(stage), basin: None }
}

pub fn run_pipeline(cfg: &ExperimentConfig) -> Result<PipelineRun> {
    let p: &PipelineConfig = &cfg.pipeline;
    let mut report = RunReport::new("pipeline", &cfg.hash(), cfg.seed);
    report.metric("d", p.d);
    report.metric("lambda", p.lambda);
    report.metric("m", p.m);

    let seq = pinched_sequence(p.kind, p.d, p.lambda, p.m, cfg.seed)?;
    let general = matches!(p.kind, crate::config::SequenceKind::Random);
    let jets = solver::random_jets(&seq, p.horizon, general, p.quad_scale, cfg.seed);
    let linear: Vec<CMatrix> = jets.iter().map(|j| j.linear.clone()).collect();

    match bunching::measure_pinching(&linear, p.lambda, p.m, Some(p.pinching_max)) {
        Ok(pinch) => {
            report.check("pinching", true, format!("constant {:.4} over {} steps", pinch.c, pinch.horizon));
            report.metric("pinching_constant", pinch.c);
        }
        Err(e @ Error::PinchingViolated { .. }) => return Ok(stop(report, "pinching", e.to_string())),
        Err(e) => return Err(e),
    }

    let hyp = bunching::hypothesis_log(p.lambda, p.m, p.d)?;
    report.metric("beta", p.m.ln() / -p.lambda.ln());
    if hyp >= 0.0 {
        let e = Error::Bunching { condition: "bunching hypothesis", log_margin: -hyp };
        return Ok(stop(report, "bunching", e.to_string()));
    }
    let sum = bunching::check_summability(p.lambda, p.m, p.d)?;
    if !sum.holds {
        let e = Error::Bunching { condition: "summability", log_margin: -sum.log_value };
        return Ok(stop(report, "bunching", e.to_string()));
    }
    report.check("bunching", true, format!("log(Λ^(2+ε) M) = {hyp:.6}, summability log-value {:.6}", sum.log_value));

    let plan = match bunching::choose_r(p.lambda, p.m, p.d) {
        Ok(plan) => plan,
        Err(e @ Error::Bunching { .. }) => return Ok(stop(report, "rescaling", e.to_string())),
        Err(e) => return Err(e),
    };
    report.check(
        "rescaling",
        plan.margin_growth > 0.0 && plan.margin_contraction > 0.0 && plan.margin_pinching > 0.0,
        format!("R = {:.6} in exp({:.6}, {:.6})", plan.r, plan.log_r_interval.0, plan.log_r_interval.1),
    );
    report.metric("rescale", &plan);

    let out = match solver::solve_2jet(&jets, &SolveParams { m_bound: Some(p.m), terminal: None }) {
        Ok(out) => out,
        Err(e @ (Error::DegenerateDiagonal { .. } | Error::IllConditioned { .. } | Error::Singular { .. })) => {
            return Ok(stop(report, "solve", e.to_string()))
        }
        Err(e) => return Err(e),
    };
    let residual = out.max_residual();
    report.metric("max_residual", residual);
    if residual > p.residual_tol {
        return Ok(stop(report, "solve", format!("residual {residual:e} exceeds {:e}", p.residual_tol)));
    }
    report.check("solve", true, format!("max residual {residual:e}"));

    let defect = out.max_unitarity_defect();
    let off = out.max_off_support();
    let lower = out
        .g_framed
        .iter()
        .map(|g| (0..p.d).flat_map(|i| (0..i).map(move |j| (i, j))).map(|ij| g.linear[ij].norm()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    let growth = solver::growth_check(&out, plan.theta, 0.1);
    report.metric("max_unitarity_defect", defect);
    report.metric("max_off_support", off);
    report.metric("growth", &growth);
    if defect > 1e-10 || off != 0.0 || lower != 0.0 {
        return Ok(stop(
            report,
            "structure",
            format!("unitarity defect {defect:e}, off-support {off:e}, below-diagonal {lower:e}"),
        ));
    }
    report.check("structure", true, "unitary linear parts of h, framed g triangular with exact support");

    // rescaled framed normal forms: linear part R L_n, quadratic part R^{1-n} G_n
    let autos: Vec<TriangularAuto> = out
        .g_framed
        .iter()
        .enumerate()
        .map(|(n, g)| TriangularAuto::from_jet(&g.rescaled(plan.r, n)))
        .collect::<Result<_>>()?;
    let seq = InterleavedSequence::with_word_schedule(autos, 1, None)?;
    let big_d = bunching::big_d(p.d) as usize;
    let last_time = seq.interleave.keys().next_back().copied().unwrap_or(0).max(big_d.saturating_sub(1));
    let max_iter = (10 * last_time).clamp(1, seq.len());
    let points = p.grid.spec(cfg.seed).points(p.d);
    let rep = basin::basin_scan(&seq, &points, p.eps_conv, max_iter);
    let slice = basin::basin_scan(&seq, &p.grid.slice_spec(cfg.seed).slice(p.d), p.eps_conv, max_iter);
    report.metric("basin_samples", rep.samples.len());
    report.metric("basin_converged", rep.converged);
    report.metric("basin_max_iter", max_iter);
    report.metric("rescaled_linear_max", seq.autos.iter().map(|a| linalg::spectral_norm(&a.linear)).fold(0.0, f64::max));
    let all = rep.converged == rep.samples.len();
    report.check(
        "basin",
        all,
        format!("{} of {} converged ({} diverged, {} undecided)", rep.converged, rep.samples.len(), rep.diverged, rep.undecided),
    );
    let failed_stage = (!all).then_some("basin");
    if let Some(stage) = failed_stage {
        report.metric("failed_stage", stage);
    }
    let svg = slice_svg("rescaled normal form: iterations to converge", p.grid.slice_per_axis, &slice);
    Ok(PipelineRun {
        outputs: Outputs { report, table: Some(basin_table(&rep)), svg: Some(svg) },
        failed_stage,
        basin: Some(rep),
    })
}
