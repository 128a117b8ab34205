//! Split Q A_{L_{n,0}} Q into its regular and resonant parts and fit decay slopes.

use jetconj::polyspace::{decomposition_trace, PinchedSequence};

fn main() -> jetconj::Result<()> {
    let (lambda, m) = (0.5, 4.0);
    let seq = PinchedSequence::random(2, lambda, m, 11)?;
    let trace = decomposition_trace(&seq, 40, 5)?;

    println!("{:>4} {:>12} {:>12} {:>12}", "n", "|A|", "|m0|", "|m1|");
    for r in trace.rows.iter().step_by(5) {
        println!("{:>4} {:>12.4e} {:>12.4e} {:>12.4e}", r.n, r.norm_a, r.norm_m0, r.norm_m1);
    }
    println!("slope of log|m0|: {:?} (log Λ = {:.4})", trace.slope_m0, f64::ln(lambda));
    println!("slope of log|m1|: {:?} (log Λ²M = {:.4})", trace.slope_m1, f64::ln(lambda * lambda * m));
    Ok(())
}
