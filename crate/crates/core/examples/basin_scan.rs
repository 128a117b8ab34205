//! Orbits of a random triangular sequence with permutations interleaved at D^h - 1.

use jetconj::basin::{basin_scan, epoch_recursion, random_triangular, stable_degree, GridSpec, InterleavedSequence};

fn main() -> jetconj::Result<()> {
    let d = 2;
    let (weights, k) = stable_degree(d);
    println!("weights {weights:?}, stable degree {k}");

    let autos = random_triangular(d, 0.1, 0.2, 1.0, 630, 4);
    let seq = InterleavedSequence::with_word_schedule(autos.clone(), 0, Some(6))?;
    println!("interleaving times {:?}", seq.gap_diagnostics(k).times);

    let grid = GridSpec { radius: 5.0, per_axis: 21, samples: 500, far_field: 100, far_radius: 1e3, seed: 4 };
    let points = grid.points(d);
    let with = basin_scan(&seq, &points, 1e-9, 630);
    let without = basin_scan(&InterleavedSequence::plain(autos), &points, 1e-9, 630);
    println!("interleaved: {} / {} converged", with.converged, with.samples.len());
    println!("plain:       {} / {} converged", without.converged, without.samples.len());

    let fast: Vec<f64> = (0..60).map(|h| 4.0 * 2f64.powi(h)).collect();
    let slow: Vec<f64> = (0..60).map(|h| h as f64).collect();
    println!("r_h with s_h = 4·2^h from 1e10: {:?}", epoch_recursion(1.0, 0.5, 2.0, &fast, 1e10).verdict);
    println!("r_h with s_h = h from 1e6:      {:?}", epoch_recursion(1.0, 0.5, 2.0, &slow, 1e6).verdict);
    Ok(())
}
