//! Solve h_{n+1} ∘ f_n = g_n ∘ h_n for random 2-jets and check the residual.

use jetconj::bunching;
use jetconj::polyspace::PinchedSequence;
use jetconj::solver::{growth_check, random_jets, solve_checked};

fn main() -> jetconj::Result<()> {
    for d in [2, 3] {
        let (lambda, m) = (0.5, 3.9);
        let seq = PinchedSequence::random(d, lambda, m, 5)?;
        let jets = random_jets(&seq, 50, true, 1.0, 5);
        let out = solve_checked(&jets, lambda, m, Some(1e3))?;
        println!(
            "d = {d}: residual {:.2e}, off-support {:e}, unitarity defect {:.2e}",
            out.max_residual(),
            out.max_off_support(),
            out.max_unitarity_defect()
        );
        for s in out.diagnostics.iter().step_by(10) {
            println!("  n = {:>2}  |h| = {:.4}  |g| = {:.4}  |u| = {:.4}", s.n, s.h_norm, s.g_norm, s.u_norm);
        }
    }

    let (lambda, m) = (0.5, 4.1);
    let theta = 1.05 * lambda * lambda * m;
    let seq = PinchedSequence::random(2, lambda, m, 9)?;
    let out = solve_checked(&random_jets(&seq, 60, true, 1.0, 9), lambda, m, None)?;
    let g = growth_check(&out, theta, 0.1);
    println!(
        "near the threshold (β = {:.4}): slope {:.4} vs {} log Θ = {:.4}",
        bunching::BunchingParams::new(2, lambda, m, 1.0)?.beta,
        g.slope,
        g.exponent,
        g.bound
    );
    Ok(())
}
