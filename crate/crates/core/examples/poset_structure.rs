//! Enumerate the quadratic basis poset and its resonance sets.
//!
//! cargo run --example poset_structure -- 3

use jetconj::poset::{Poset, Resonance};

fn main() -> jetconj::Result<()> {
    let d: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2);
    let poset = Poset::quadratic(d)?;
    let res = Resonance::new(&poset)?;

    println!("d = {d}: {} basis elements, longest chain {}", poset.len(), poset.max_chain_len());
    for (p, s) in poset.set().elements().iter().enumerate() {
        let tag = match (res.t.contains(p), res.v.contains(p)) {
            (true, true) => "T V",
            (true, false) => "T  ",
            (false, true) => "  V",
            (false, false) => "   ",
        };
        println!("  {p:>3}  {tag}  {s}");
    }

    let ww = res.w.compose(&res.w);
    println!("|W| = {}, W∘W = W: {}", res.w.len(), ww == res.w);
    for (s, t) in res.w.pairs().take(10) {
        println!("  {} -> {}", poset.set().get(s), poset.set().get(t));
    }
    Ok(())
}
