//! The cycle word that annihilates W, checked exactly and with random matrices.

use jetconj::nilpotency::{build_word, verify_combi, verify_combi_truncated, verify_nilp_matrix};

fn main() -> jetconj::Result<()> {
    for d in 1..=6 {
        let word = build_word(d)?;
        let out = verify_combi(d)?;
        println!("d = {d}: word {:?} kills W: {}", word.letters, out.holds);
    }

    let short = verify_combi_truncated(3)?;
    if let Some((s, t)) = &short.witness {
        println!("without its last letter the d = 3 word leaves {} pairs, e.g. {s} -> {t}", short.remaining_pairs);
    }

    for d in 2..=4 {
        let rep = verify_nilp_matrix(d, 100, 7)?;
        println!("d = {d}: 100 random W-supported products, largest entry {:e}", rep.max_entry);
    }
    Ok(())
}
