//! Quadratic jets at a fixed point: `z ↦ A z + q(z)` modulo cubic terms.

use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::{self, CMatrix};
use crate::polyspace::HomQuadMap;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub linear: CMatrix,
    pub quad: HomQuadMap,
}

impl Jet2 {
    pub fn new(linear: CMatrix, quad: HomQuadMap) -> Self {
        assert_eq!(linear.nrows(), quad.d());
        Self { linear, quad }
    }

    pub fn identity(d: usize) -> Self {
        Self::linear(linalg::identity(d))
    }

    pub fn linear(a: CMatrix) -> Self {
        let d = a.nrows();
        Self { linear: a, quad: HomQuadMap::zeros(d) }
    }

    /// `I + q`.
    pub fn near_identity(q: HomQuadMap) -> Self {
        Self { linear: linalg::identity(q.d()), quad: q }
    }

    pub fn d(&self) -> usize {
        self.linear.nrows()
    }

    /// `self ∘ inner`, truncated at degree 2.
    pub fn compose(&self, inner: &Jet2) -> Jet2 {
        let linear = &self.linear * &inner.linear;
        let quad = &inner.quad.left_mul(&self.linear) + &self.quad.precompose(&inner.linear);
        Jet2 { linear, quad }
    }

    /// The 2-jet of the inverse map.
    pub fn inverse(&self) -> Result<Jet2> {
        let inv = linalg::invert(&self.linear)?;
        let quad = -&self.quad.precompose(&inv).left_mul(&inv);
        Ok(Jet2 { linear: inv, quad })
    }

    /// `U⁻¹ ∘ self ∘ U` for a linear `U` with known inverse.
    pub fn conjugate_linear(&self, u: &CMatrix, u_inv: &CMatrix) -> Jet2 {
        Jet2 {
            linear: u_inv * &self.linear * u,
            quad: self.quad.conjugate(u, u_inv),
        }
    }

    /// Largest entry magnitude over both parts.
    pub fn norm(&self) -> f64 {
        linalg::max_abs(&self.linear).max(self.quad.norm())
    }

    pub fn distance(&self, other: &Jet2) -> f64 {
        linalg::max_abs(&(&self.linear - &other.linear)).max((&self.quad - &other.quad).norm())
    }

    pub fn eval(&self, z: &[Complex64]) -> Vec<Complex64> {
        let lin = &self.linear * nalgebra::DVector::from_column_slice(z);
        let q = self.quad.eval(z);
        lin.iter().zip(q).map(|(a, b)| a + b).collect()
    }

    /// `z ↦ s^{n+1} f(s^{-n} z)`: linear part times `s`, quadratic part times `s^{1-n}`.
    pub fn rescaled(&self, s: f64, n: usize) -> Jet2 {
        let lin = s;
        let quad = s.powf(1.0 - n as f64);
        Jet2 {
            linear: &self.linear * Complex64::new(lin, 0.0),
            quad: self.quad.scale(Complex64::new(quad, 0.0)),
        }
    }
}
