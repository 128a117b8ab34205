//! Small dense complex linear algebra helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Determinant magnitude below which a matrix is treated as singular.
pub const SINGULAR_DET: f64 = 1e-300;

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn from_real_diagonal(diag: &[f64]) -> CMatrix {
    let d = diag.len();
    CMatrix::from_fn(d, d, |i, j| if i == j { Complex64::new(diag[i], 0.0) } else { ZERO })
}

/// True when every entry strictly below the diagonal is exactly zero.
pub fn is_upper_triangular(m: &CMatrix) -> bool {
    (0..m.nrows()).all(|i| (0..i.min(m.ncols())).all(|j| m[(i, j)] == ZERO))
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Operator norm induced by the max-norm on vectors (maximum absolute row sum).
pub fn inf_norm(m: &CMatrix) -> f64 {
    m.row_iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Ratio of the extreme singular values; infinite for singular input.
pub fn condition_number(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    let sv = m.clone().singular_values();
    let (lo, hi) = (sv.min(), sv.max());
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Inverse of an upper triangular matrix by back substitution. Entries below
/// the diagonal of the result are exact zeros.
pub fn upper_triangular_inverse(l: &CMatrix) -> Result<CMatrix> {
    let d = l.nrows();
    let mut det = 1.0_f64;
    for k in 0..d {
        det *= l[(k, k)].norm();
    }
    if det < SINGULAR_DET {
        return Err(Error::Singular { det });
    }
    let mut inv = CMatrix::zeros(d, d);
    for j in 0..d {
        for i in (0..=j).rev() {
            let mut acc = if i == j { ONE } else { ZERO };
            for k in (i + 1)..=j {
                acc -= l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = acc / l[(i, i)];
        }
    }
    Ok(inv)
}

/// Inverse of a square matrix. Upper triangular input keeps its exact zero pattern.
pub fn invert(m: &CMatrix) -> Result<CMatrix> {
    if is_upper_triangular(m) {
        return upper_triangular_inverse(m);
    }
    let det = m.determinant().norm();
    if det < SINGULAR_DET {
        return Err(Error::Singular { det });
    }
    m.clone().try_inverse().ok_or(Error::Singular { det })
}

/// QR factorisation normalised so that the triangular factor has a positive real diagonal.
pub fn qr_positive(a: &CMatrix) -> (CMatrix, CMatrix) {
    let qr = a.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for k in 0..r.nrows() {
        let diag = r[(k, k)];
        let modulus = diag.norm();
        if modulus == 0.0 {
            continue;
        }
        let phase = diag / modulus;
        for j in 0..r.ncols() {
            r[(k, j)] /= phase;
        }
        for i in 0..q.nrows() {
            q[(i, k)] *= phase;
        }
        r[(k, k)] = Complex64::new(modulus, 0.0);
        for i in (k + 1)..r.nrows() {
            r[(i, k)] = ZERO;
        }
    }
    (q, r)
}

/// Distance of `m m*` from the identity, in max-entry norm.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let prod = m * m.adjoint();
    max_abs(&(prod - identity(m.nrows())))
}

/// Uniform sample from the closed complex unit disk.
pub fn unit_disk<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let r = rng.gen::<f64>().sqrt();
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, phi)
}

/// Unit-modulus complex number with uniform phase.
pub fn unit_phase<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Haar-ish random unitary: the Q factor of a matrix with Gaussian-like entries.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    loop {
        let g = CMatrix::from_fn(d, d, |_, _| {
            // Box-Muller pair gives a standard complex normal.
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen();
            let r = (-2.0 * u1.ln()).sqrt();
            Complex64::from_polar(r, std::f64::consts::TAU * u2)
        });
        if condition_number(&g) < 1e6 {
            return qr_positive(&g).0;
        }
    }
}
