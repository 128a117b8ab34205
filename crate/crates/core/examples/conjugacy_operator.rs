//! Matrix of p ↦ L⁻¹ ∘ p ∘ L on quadratic maps for a triangular L.

use jetconj::linalg::{self, CMatrix};
use jetconj::polyspace::{conj_matrix, HomQuadMap};
use jetconj::poset::Poset;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> jetconj::Result<()> {
    let l = CMatrix::from_row_slice(
        2,
        2,
        &[Complex64::new(0.5, 0.0), Complex64::new(0.3, 0.1), linalg::ZERO, Complex64::new(0.25, 0.0)],
    );
    let a = conj_matrix(&l)?;
    let poset = Poset::quadratic(2)?;

    println!("operator matrix ({0}x{0}):", a.nrows());
    for r in 0..a.nrows() {
        let row: Vec<String> = (0..a.ncols()).map(|c| format!("{:>8.3}", a[(r, c)].re)).collect();
        println!("  {}  {}", row.join(" "), poset.set().get(r));
    }

    // the diagonal is λ^(α - e_i)
    let lam = [0.5_f64, 0.25];
    for (p, s) in poset.set().elements().iter().enumerate() {
        let expect = lam[0].powi(s.alpha[0] as i32) * lam[1].powi(s.alpha[1] as i32) / lam[s.i];
        println!("  diag {s}: {:.4} (expected {expect:.4})", a[(p, p)].re);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = HomQuadMap::random(2, &mut rng, 1.0, None);
    let l_inv = linalg::invert(&l)?;
    let direct = p.conjugate(&l, &l_inv);
    let via_matrix = HomQuadMap::from_vector(2, &(&a * p.to_vector()));
    println!("matrix vs direct conjugation: {:e}", (&direct - &via_matrix).norm());
    Ok(())
}
