//! Exact bunching constants by dimension.

fn main() -> jetconj::Result<()> {
    println!("{:>2} {:>28} {:>12} {:>10} {:>26}", "d", "ε(d)", "≈", "δ", "summability threshold");
    for row in jetconj::bunching::epsilon_table(6)? {
        println!(
            "{:>2} {:>28} {:>12.4e} {:>10} {:>26}",
            row.d, row.epsilon, row.epsilon_f64, row.delta, row.summability_threshold
        );
    }
    Ok(())
}
