//! Scalar information-theoretic primitives.
//!
//! The Bernoulli relative entropy `kappa(p, q) = p ln(p/q) + (1-p) ln((1-p)/(1-q))`,
//! its upper inverse in `q`, the closed-form relaxation `q - p <= sqrt(2pB) + 2B`,
//! and a max-shifted log-sum-exp.

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};

/// Largest `q` returned by [`kappa_inverse_upper`]. `kappa(p, .)` diverges as `q -> 1`.
pub const KAPPA_SATURATION: f64 = 1.0 - 1e-15;

/// A Bernoulli relative entropy in nats. Always non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct KappaValue(f64);

impl KappaValue {
    pub fn nats(self) -> f64 {
        self.0
    }
}

impl From<KappaValue> for f64 {
    fn from(k: KappaValue) -> f64 {
        k.0
    }
}

/// `x ln(x / y)` with `0 ln 0 = 0`.
#[inline]
fn xlogxy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (x / y).ln()
    }
}

#[inline]
fn kappa_unchecked(p: f64, q: f64) -> f64 {
    (xlogxy(p, q) + xlogxy(1.0 - p, 1.0 - q)).max(0.0)
}

/// Relative entropy between Bernoulli(`p`) and Bernoulli(`q`).
///
/// Requires `p` in `[0, 1]` and `q` in the open interval `(0, 1)`.
pub fn kappa(p: f64, q: f64) -> Result<KappaValue> {
    check_probability("p", p)?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("q = {q} is not in (0, 1)")));
    }
    Ok(KappaValue(kappa_unchecked(p, q)))
}

/// `kappa` extended to the closed square `[0, 1]^2`: zero when `p == q`, `+inf` when
/// `q` is 0 or 1 and differs from `p`. Used for realized values where the true
/// loss can sit on the boundary.
pub fn kappa_extended(p: f64, q: f64) -> Result<f64> {
    check_probability("p", p)?;
    check_probability("q", q)?;
    if p == q {
        return Ok(0.0);
    }
    if q == 0.0 || q == 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(kappa_unchecked(p, q))
}

/// `sup { q in [p, 1) : kappa(p, q) <= bound }`.
///
/// Bisection on the monotone branch `q >= p`, run until the bracket can no longer
/// be split in double precision (well below the 1e-12 target). Returns
/// [`KAPPA_SATURATION`] when even `q = 1 - 1e-15` satisfies the bound.
pub fn kappa_inverse_upper(p: f64, bound: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::Domain(format!("p = {p} is not in [0, 1)")));
    }
    if !(bound >= 0.0) {
        return Err(Error::Domain(format!("bound = {bound} is negative or NaN")));
    }
    if bound == 0.0 {
        return Ok(p);
    }
    if kappa_unchecked(p, KAPPA_SATURATION) <= bound {
        return Ok(KAPPA_SATURATION);
    }
    let (mut lo, mut hi) = (p, KAPPA_SATURATION);
    for _ in 0..256 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if kappa_unchecked(p, mid) <= bound {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Closed-form relaxation of the inverse: `p + sqrt(2 p B) + 2 B`. Not clamped to 1.
pub fn inversion_relaxation(p: f64, bound: f64) -> Result<f64> {
    check_probability("p", p)?;
    if !(bound >= 0.0) {
        return Err(Error::Domain(format!("bound = {bound} is negative or NaN")));
    }
    Ok(p + (2.0 * p * bound).sqrt() + 2.0 * bound)
}

/// `ln sum_i exp(log_weights[i] + values[i])`, shifted by the largest term.
///
/// `-inf` entries (zero weights) are allowed; if every term is `-inf` the result is `-inf`.
pub fn log_sum_exp(log_weights: &[f64], values: &[f64]) -> Result<f64> {
    if log_weights.is_empty() {
        return Err(Error::Empty("log_sum_exp input"));
    }
    if log_weights.len() != values.len() {
        return Err(Error::LengthMismatch {
            left: log_weights.len(),
            right: values.len(),
        });
    }
    let max = log_weights
        .iter()
        .zip(values)
        .map(|(w, v)| w + v)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    if max.is_infinite() || max.is_nan() {
        return Ok(max);
    }
    let sum: f64 = log_weights.iter().zip(values).map(|(w, v)| (w + v - max).exp()).sum();
    Ok(max + sum.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    // Expected values below come from a 40-digit mpmath evaluation of the formulas.

    #[test]
    fn kappa_identity_is_zero() {
        assert_eq!(kappa(0.3, 0.3).unwrap().nats(), 0.0);
    }

    #[test]
    fn kappa_zero_p_uses_zero_log_zero() {
        assert!((kappa(0.0, 0.5).unwrap().nats() - LN_2).abs() < 1e-15);
    }

    #[test]
    fn kappa_reference_value() {
        let k = kappa(0.1, 0.3).unwrap().nats();
        assert!((k - 0.116_321_756_586_004_48).abs() < 1e-14, "{k}");
    }

    #[test]
    fn kappa_domain_errors() {
        assert!(kappa(0.5, 0.0).is_err());
        assert!(kappa(0.5, 1.0).is_err());
        assert!(kappa(-0.1, 0.5).is_err());
        assert!(kappa(1.1, 0.5).is_err());
        assert!(kappa(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn kappa_extended_boundary() {
        assert_eq!(kappa_extended(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(kappa_extended(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(kappa_extended(0.2, 0.0).unwrap(), f64::INFINITY);
        assert_eq!(kappa_extended(0.2, 1.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(kappa_inverse_upper(0.3, 0.0).unwrap(), 0.3);
        assert!((kappa_inverse_upper(0.0, LN_2).unwrap() - 0.5).abs() < 1e-12);
        // mpmath root of kappa(0.1, q) = 0.116315
        let q = kappa_inverse_upper(0.1, 0.116315).unwrap();
        assert!((q - 0.299_992_905_506_800_64).abs() < 1e-12, "{q}");
    }

    #[test]
    fn inverse_saturates() {
        assert_eq!(kappa_inverse_upper(0.5, 1e3).unwrap(), KAPPA_SATURATION);
    }

    #[test]
    fn inverse_domain_errors() {
        assert!(kappa_inverse_upper(1.0, 0.1).is_err());
        assert!(kappa_inverse_upper(0.2, -1e-3).is_err());
    }

    #[test]
    fn relaxation_examples() {
        assert_eq!(inversion_relaxation(0.3, 0.0).unwrap(), 0.3);
        assert!((inversion_relaxation(0.0, LN_2).unwrap() - 2.0 * LN_2).abs() < 1e-15);
        let r = inversion_relaxation(0.1, 0.116315).unwrap();
        assert!((r - 0.485_152_129_541_912_7).abs() < 1e-12, "{r}");
        assert!(r >= kappa_inverse_upper(0.1, 0.116315).unwrap());
    }

    #[test]
    fn log_sum_exp_examples() {
        assert_eq!(log_sum_exp(&[0.0], &[2.5]).unwrap(), 2.5);
        let h = 0.5f64.ln();
        let v = log_sum_exp(&[h, h], &[0.0, -1.0]).unwrap();
        assert!((v + 0.379_885_493_041_722_5).abs() < 1e-15, "{v}");
        let w = [0.2f64, 0.3, 0.5].map(f64::ln);
        assert!((log_sum_exp(&w, &[-4.0; 3]).unwrap() + 4.0).abs() < 1e-14);
    }

    #[test]
    fn log_sum_exp_errors_and_extremes() {
        assert_eq!(log_sum_exp(&[], &[]), Err(Error::Empty("log_sum_exp input")));
        assert!(log_sum_exp(&[0.0], &[0.0, 1.0]).is_err());
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY], &[0.0]).unwrap(), f64::NEG_INFINITY);
        // No overflow at very large magnitudes.
        let v = log_sum_exp(&[0.5f64.ln(), 0.5f64.ln()], &[-1e9, -1e9 - 1.0]).unwrap();
        assert!((v - (-1e9 + (0.5 + 0.5 * (-1f64).exp()).ln())).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn kappa_nonnegative_and_zero_only_on_diagonal(p in 0.0f64..=1.0, q in 1e-9f64..(1.0 - 1e-9)) {
            let k = kappa(p, q).unwrap().nats();
            prop_assert!(k >= 0.0);
            if (p - q).abs() > 1e-6 {
                prop_assert!(k > 0.0);
            }
        }

        #[test]
        fn kappa_increasing_in_q_above_p(p in 0.0f64..0.99, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let q1 = p + (1.0 - p) * a.min(b) * 0.999;
            let q2 = p + (1.0 - p) * a.max(b) * 0.999;
            prop_assume!(q1 > 0.0 && q2 < 1.0);
            prop_assert!(kappa(p, q1).unwrap().nats() <= kappa(p, q2).unwrap().nats());
        }

        #[test]
        fn inverse_round_trips(p in 0.0f64..0.99, frac in 0.0f64..0.999) {
            let q = p + (1.0 - p) * frac;
            prop_assume!(q > 0.0 && q < 1.0 - 1e-6);
            let b = kappa(p, q).unwrap().nats();
            let inv = kappa_inverse_upper(p, b).unwrap();
            prop_assert!((kappa(p.max(0.0), inv).unwrap().nats() - b).abs() <= 1e-10);
            prop_assert!(inversion_relaxation(p, b).unwrap() >= inv);
        }

        #[test]
        fn log_sum_exp_shift_invariant(vals in proptest::collection::vec(-50.0f64..50.0, 1..20), c in -100.0f64..100.0) {
            let w = vec![-(vals.len() as f64).ln(); vals.len()];
            let shifted: Vec<f64> = vals.iter().map(|v| v + c).collect();
            let a = log_sum_exp(&w, &vals).unwrap();
            let b = log_sum_exp(&w, &shifted).unwrap();
            prop_assert!((b - c - a).abs() <= 1e-12 * (1.0 + c.abs()));
        }
    }
}
