//! Bunching constants in exact arithmetic, the summability condition in log
//! space, the choice of the rescaling factor and pinching measurement.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::polyspace::PinchedSequence;

fn pow2(e: u32) -> BigInt {
    BigInt::one() << e
}

fn rat(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

/// `D = 2^{d-1}`.
pub fn big_d(d: usize) -> u64 {
    1u64 << (d - 1)
}

/// `binom(d, 2)`.
pub fn pairs(d: usize) -> usize {
    d * d.saturating_sub(1) / 2
}

/// `3 d (d-1)^2 / 2`, the exponent of two in `D^{3 binom(d,2)}`.
pub fn growth_log2(d: usize) -> u32 {
    (3 * d * (d - 1) * (d - 1) / 2) as u32
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension { d, reason: "bunching constants need d >= 2" });
    }
    Ok(())
}

/// Admissible excess over the classical exponent 2.
pub fn epsilon(d: usize) -> Result<BigRational> {
    check_dim(d)?;
    if d == 2 {
        return Ok(rat(BigInt::from(1), BigInt::from(14)));
    }
    let e = (d * (d - 1) * (d - 1)) as u32;
    let num = pow2((d - 1) as u32) - 1;
    let den = pow2(2 * e) - pow2(e) - pow2((d - 1) as u32) + 1;
    Ok(rat(num, den))
}

/// `δ = (D - 1) / (D^{d(d-1)} - 1)`.
pub fn delta(d: usize) -> Result<BigRational> {
    check_dim(d)?;
    let dd = BigInt::from(big_d(d));
    let top = dd.pow((d * (d - 1)) as u32);
    Ok(rat(dd - 1, top - 1))
}

/// `D^{d(d-1)}` as an exact integer.
pub fn summability_power(d: usize) -> BigInt {
    BigInt::from(big_d(d)).pow((d * (d - 1)) as u32)
}

/// Exponent `t` with: summability holds iff `Λ^t M < 1`.
pub fn summability_threshold(d: usize) -> Result<BigRational> {
    let p = BigRational::from_integer(summability_power(d));
    let dl = delta(d)?;
    let two = BigRational::from_integer(BigInt::from(2));
    Ok((two * &p - &dl) / (p - dl))
}

/// `1 / (2 (2^{3d(d-1)^2/2} - 1))`, the exponent excess that makes a rescaling factor exist.
pub fn rescale_excess(d: usize) -> Result<BigRational> {
    check_dim(d)?;
    let k = pow2(growth_log2(d)) - 1;
    Ok(rat(BigInt::one(), BigInt::from(2) * k))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn validate_lm(lambda: f64, m: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter { name: "lambda", reason: format!("{lambda} not in (0,1)") });
    }
    if !(m > 1.0 && m.is_finite()) {
        return Err(Error::InvalidParameter { name: "m", reason: format!("{m} must exceed 1") });
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct BunchingParams {
    pub d: usize,
    pub lambda: f64,
    pub m: f64,
    pub c: f64,
    pub beta: f64,
    pub big_d: u64,
    pub delta: String,
    pub epsilon: String,
}

impl BunchingParams {
    pub fn new(d: usize, lambda: f64, m: f64, c: f64) -> Result<Self> {
        validate_lm(lambda, m)?;
        Ok(Self {
            d,
            lambda,
            m,
            c,
            beta: m.ln() / -lambda.ln(),
            big_d: big_d(d),
            delta: delta(d)?.to_string(),
            epsilon: epsilon(d)?.to_string(),
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SummabilityCheck {
    /// `log` of `(Λ²M)^{D^{d(d-1)}} (ΛM)^{-δ}`.
    pub log_value: f64,
    pub holds: bool,
}

pub fn check_summability(lambda: f64, m: f64, d: usize) -> Result<SummabilityCheck> {
    validate_lm(lambda, m)?;
    let p = to_f64(&BigRational::from_integer(summability_power(d)));
    let dl = to_f64(&delta(d)?);
    let log_value = p * (2.0 * lambda.ln() + m.ln()) - dl * (lambda.ln() + m.ln());
    Ok(SummabilityCheck { log_value, holds: log_value < 0.0 })
}

/// `log(Λ^{2+ε(d)} M)`; negative when the main hypothesis holds.
pub fn hypothesis_log(lambda: f64, m: f64, d: usize) -> Result<f64> {
    validate_lm(lambda, m)?;
    Ok((2.0 + to_f64(&epsilon(d)?)) * lambda.ln() + m.ln())
}

#[derive(Debug, Clone, Serialize)]
pub struct RescalePlan {
    pub d: usize,
    pub lambda: f64,
    pub m: f64,
    pub r: f64,
    /// Feasible interval for `log R`.
    pub log_r_interval: (f64, f64),
    /// Positive margins of the three inequalities in log form.
    pub margin_growth: f64,
    pub margin_contraction: f64,
    pub margin_pinching: f64,
    pub theta: f64,
    pub eta: f64,
    pub lambda_tilde: f64,
    pub m_tilde: f64,
}

/// Pick `R` in the middle of the feasible log-interval for
/// `R > (Λ²M)^{2^{3d(d-1)²/2}-1}`, `RΛ < 1`, `R²Λ³M < 1`, with `R > 1`.
pub fn choose_r(lambda: f64, m: f64, d: usize) -> Result<RescalePlan> {
    let hyp = hypothesis_log(lambda, m, d)?;
    if hyp >= 0.0 {
        return Err(Error::Bunching { condition: "bunching hypothesis", log_margin: -hyp });
    }
    let (ll, lm) = (lambda.ln(), m.ln());
    let k = to_f64(&BigRational::from_integer(pow2(growth_log2(d)) - 1));
    let growth_floor = k * (2.0 * ll + lm);
    let contraction_cap = -ll;
    let pinching_cap = -(3.0 * ll + lm) / 2.0;
    let lo = growth_floor.max(0.0);
    let hi = contraction_cap.min(pinching_cap);
    if hi <= 0.0 {
        let cond = if pinching_cap <= contraction_cap { "rescaled pinching" } else { "rescaling contraction" };
        return Err(Error::Bunching { condition: cond, log_margin: hi });
    }
    if lo >= hi {
        return Err(Error::Bunching { condition: "rescaling growth", log_margin: hi - lo });
    }
    let log_r = 0.5 * (lo + hi);
    let (theta, eta) = choose_theta(lambda, m, d)?;
    let r = log_r.exp();
    Ok(RescalePlan {
        d,
        lambda,
        m,
        r,
        log_r_interval: (lo, hi),
        margin_growth: log_r - growth_floor,
        margin_contraction: -(log_r + ll),
        margin_pinching: -(2.0 * log_r + 3.0 * ll + lm),
        theta,
        eta,
        lambda_tilde: r * lambda,
        m_tilde: m / r,
    })
}

/// `Θ > Λ²M` with `η = Θ^{D^{d(d-1)}} (ΛM)^{-δ} < 1`, midpoint in log space.
pub fn choose_theta(lambda: f64, m: f64, d: usize) -> Result<(f64, f64)> {
    let sum = check_summability(lambda, m, d)?;
    if !sum.holds {
        return Err(Error::Bunching { condition: "summability", log_margin: -sum.log_value });
    }
    let p = to_f64(&BigRational::from_integer(summability_power(d)));
    let dl = to_f64(&delta(d)?);
    let lo = 2.0 * lambda.ln() + m.ln();
    let hi = dl * (lambda.ln() + m.ln()) / p;
    let log_theta = 0.5 * (lo + hi);
    let log_eta = p * log_theta - dl * (lambda.ln() + m.ln());
    Ok((log_theta.exp(), log_eta.exp()))
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsilonRow {
    pub d: usize,
    pub epsilon: String,
    pub epsilon_f64: f64,
    pub delta: String,
    pub big_d: u64,
    pub k: u64,
    pub summability_threshold: String,
    /// `1/(2(2^{3d(d-1)²/2}-1)) >= ε(d)`.
    pub rescale_ok: bool,
}

pub fn epsilon_table(dmax: usize) -> Result<Vec<EpsilonRow>> {
    (2..=dmax)
        .map(|d| {
            let eps = epsilon(d)?;
            Ok(EpsilonRow {
                d,
                epsilon_f64: to_f64(&eps),
                rescale_ok: rescale_excess(d)? >= eps,
                epsilon: eps.to_string(),
                delta: delta(d)?.to_string(),
                big_d: big_d(d),
                k: big_d(d),
                summability_threshold: summability_threshold(d)?.to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct PinchReport {
    pub horizon: usize,
    /// Smallest constant making both estimates hold over the horizon.
    pub c: f64,
    /// `(k, h)` attaining it.
    pub worst: (usize, usize),
}

/// Measure the pinching constant of `L_0, .., L_{horizon-1}` in the spectral norm.
pub fn measure_pinching(mats: &[CMatrix], lambda: f64, m: f64, c_max: Option<f64>) -> Result<PinchReport> {
    let horizon = mats.len();
    let inverses: Vec<CMatrix> = mats.iter().map(linalg::invert).collect::<Result<_>>()?;
    let (ll, lm) = (lambda.ln(), m.ln());
    let mut log_c = 0.0_f64;
    let mut worst = (0, 0);
    for h in 0..horizon {
        let d = mats[h].nrows();
        let mut fwd = linalg::identity(d);
        let mut inv = linalg::identity(d);
        let (mut fwd_log, mut inv_log) = (0.0_f64, 0.0_f64);
        for k in (h + 1)..=horizon {
            fwd = &mats[k - 1] * fwd;
            inv *= &inverses[k - 1];
            for (mat, scale) in [(&mut fwd, &mut fwd_log), (&mut inv, &mut inv_log)] {
                let s = linalg::max_abs(mat);
                if s > 0.0 {
                    *mat /= num_complex::Complex64::new(s, 0.0);
                    *scale += s.ln();
                }
            }
            let steps = (k - h) as f64;
            let r_fwd = linalg::spectral_norm(&fwd).ln() + fwd_log - steps * ll;
            let r_inv = linalg::spectral_norm(&inv).ln() + inv_log - steps * lm;
            let r = r_fwd.max(r_inv);
            if r > log_c {
                log_c = r;
                worst = (k, h);
            }
            if let Some(cm) = c_max {
                if r > cm.ln() {
                    return Err(Error::PinchingViolated { k, h, measured: r.exp(), allowed: cm });
                }
            }
        }
    }
    Ok(PinchReport { horizon, c: log_c.exp(), worst })
}

pub fn verify_pinched(seq: &PinchedSequence, horizon: usize, c_max: Option<f64>) -> Result<PinchReport> {
    let mats: Vec<CMatrix> = (0..horizon).map(|n| seq.matrix(n)).collect();
    measure_pinching(&mats, seq.lambda, seq.m, c_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    use num_traits::Zero;

    fn r(n: i64, d: i64) -> BigRational {
        rat(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn epsilon_values() {
        assert_eq!(epsilon(2).unwrap(), r(1, 14));
        assert_eq!(epsilon(3).unwrap(), r(1, 5_591_039));
        assert_eq!(epsilon(3).unwrap(), r(3, 16_773_117));
        assert!(epsilon(1).is_err());
    }

    #[test]
    fn delta_values() {
        assert_eq!(delta(2).unwrap(), r(1, 3));
        assert_eq!(delta(3).unwrap(), r(1, 1365));
    }

    #[test]
    fn d2_threshold_is_two_and_one_eleventh() {
        assert_eq!(summability_threshold(2).unwrap(), r(23, 11));
        assert!(summability_threshold(2).unwrap() > r(2, 1) + epsilon(2).unwrap());
    }

    #[test]
    fn rescale_excess_dominates_epsilon() {
        for d in 2..=6 {
            assert!(rescale_excess(d).unwrap() >= epsilon(d).unwrap(), "d = {d}");
        }
        assert_eq!(rescale_excess(2).unwrap(), epsilon(2).unwrap());
    }

    #[test]
    fn epsilon_decreasing() {
        let mut prev = epsilon(3).unwrap();
        assert!(prev < r(1, 14) && prev > r(0, 1));
        for d in 4..8 {
            let e = epsilon(d).unwrap();
            assert!(e < prev && !e.is_zero());
            prev = e;
        }
    }

    #[test]
    fn summability_examples() {
        assert!(check_summability(0.5, 3.9, 2).unwrap().holds);
        // beta = log2(4.001) is just above 2 but below 23/11
        assert!(check_summability(0.5, 4.001, 2).unwrap().holds);
        assert!(!check_summability(0.5, 4.5, 2).unwrap().holds);
        assert!(!check_summability(0.5, 5.0, 2).unwrap().holds);
    }

    #[test]
    fn choose_r_examples() {
        let plan = choose_r(0.45, 4.5, 2).unwrap();
        assert!(plan.r > 1.0);
        assert!(plan.margin_growth > 0.0 && plan.margin_contraction > 0.0 && plan.margin_pinching > 0.0);
        assert!(plan.eta < 1.0 && plan.theta > 0.45 * 0.45 * 4.5);
        match choose_r(0.5, 5.0, 2) {
            Err(Error::Bunching { condition, .. }) => assert_eq!(condition, "bunching hypothesis"),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn pinching_of_scalar_and_empty() {
        let seq = PinchedSequence::scalar(2, 0.5, 4.0).unwrap();
        let rep = verify_pinched(&seq, 20, None).unwrap();
        assert!((rep.c - 1.0).abs() < 1e-12);
        assert_eq!(verify_pinched(&seq, 0, None).unwrap().c, 1.0);
    }

    #[test]
    fn pinching_violation_reported() {
        let l = linalg::from_real_diagonal(&[0.9, 0.9]);
        let err = measure_pinching(&vec![l; 10], 0.5, 4.0, Some(10.0)).unwrap_err();
        assert!(matches!(err, Error::PinchingViolated { .. }));
    }
}
