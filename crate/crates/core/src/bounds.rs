//! Right-hand sides of the generalization bounds and the per-trial report row.

use serde::{Deserialize, Serialize};

use crate::error::{check_delta, check_probability, Error, Result};
use crate::measures::{inversion_relaxation, kappa_inverse_upper};
use crate::model::StepCdf;

/// Smallest sample size accepted by the kl-type bounds.
pub const MIN_KL_SAMPLE: usize = 8;

/// One Monte Carlo trial: a realized quantity compared against its bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub trial_seed: u64,
    pub beta: f64,
    pub n: usize,
    pub delta: f64,
    pub lambda: f64,
    pub rhs: f64,
    pub realized: f64,
    pub violated: bool,
}

impl BoundReport {
    /// Sets `violated` to `realized > rhs`.
    pub fn new(trial_seed: u64, beta: f64, n: usize, delta: f64, lambda: f64, rhs: f64, realized: f64) -> Self {
        Self {
            trial_seed,
            beta,
            n,
            delta,
            lambda,
            rhs,
            realized,
            violated: realized > rhs,
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_nan() || lambda == f64::NEG_INFINITY {
        Err(Error::Domain(format!("lambda = {lambda} is not a valid complexity")))
    } else {
        Ok(())
    }
}

fn check_kl_n(n: usize) -> Result<()> {
    if n < MIN_KL_SAMPLE {
        Err(Error::Precondition(format!("n = {n} is below {MIN_KL_SAMPLE}")))
    } else {
        Ok(())
    }
}

/// `lambda + log_moment + ln(1/delta)`.
pub fn theorem_main_rhs(lambda: f64, log_moment: f64, delta: f64) -> Result<f64> {
    check_lambda(lambda)?;
    check_delta(delta)?;
    Ok(lambda + log_moment - delta.ln())
}

/// `ln(2 sqrt(n) / delta)`, the log-moment of `n kappa(L_hat, L)` plus confidence.
pub fn kl_log_term(n: usize, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok((2.0 * (n as f64).sqrt()).ln() - delta.ln())
}

/// `(lambda + ln(2 sqrt(n) / delta)) / n`, bounding `kappa(L_hat(h, x), L(h))`.
pub fn kl_bound(lambda: f64, n: usize, delta: f64) -> Result<f64> {
    check_kl_n(n)?;
    check_lambda(lambda)?;
    Ok((lambda + kl_log_term(n, delta)?) / n as f64)
}

/// Upper bounds on `L - L_hat` obtained by inverting [`kl_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapBound {
    /// `sqrt(2 L_hat B) + 2 B`.
    pub relaxed: f64,
    /// `kappa_inverse_upper(L_hat, B) - L_hat`.
    pub exact: f64,
}

pub fn gap_bound_from_kl(empirical: f64, lambda: f64, n: usize, delta: f64) -> Result<GapBound> {
    check_probability("empirical loss", empirical)?;
    let b = kl_bound(lambda, n, delta)?.max(0.0);
    Ok(GapBound {
        relaxed: inversion_relaxation(empirical, b)? - empirical,
        exact: kappa_inverse_upper(empirical, b)? - empirical,
    })
}

/// `(beta + ln(2 sqrt(n) / delta)) / n`: the kl bound with `Lambda` replaced by `beta`.
pub fn high_temp_bound(beta: f64, n: usize, delta: f64) -> Result<f64> {
    if !(beta >= 0.0) {
        return Err(Error::Domain(format!("beta = {beta} is negative")));
    }
    kl_bound(beta, n, delta)
}

/// `ln(1 / pi(H_min))`.
pub fn zero_temp_lambda_bound(prior_mass_min: f64) -> Result<f64> {
    if !(prior_mass_min > 0.0 && prior_mass_min <= 1.0) {
        return Err(Error::Domain(format!(
            "minimizer mass {prior_mass_min} is not in (0, 1]; the bound is vacuous"
        )));
    }
    Ok(-prior_mass_min.ln())
}

/// `2 sigma sqrt((max(lambda, 1) + ln(2 max(lambda, 1) / delta) / 2) / n)`, bounding `|L - L_hat|`.
pub fn stratified_subgaussian_bound(lambda: f64, sigma: f64, n: usize, delta: f64) -> Result<f64> {
    check_lambda(lambda)?;
    check_delta(delta)?;
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("sigma = {sigma} must be positive")));
    }
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let level = lambda.max(1.0);
    Ok(2.0 * sigma * ((level + (2.0 * level / delta).ln() / 2.0) / n as f64).sqrt())
}

/// `(lambda + c1 psi1_sup + ln(1/delta)) / sqrt(n)`, valid when `sqrt(n) >= c2 psi1_sup`.
pub fn subexponential_bound(lambda: f64, psi1_sup: f64, n: usize, delta: f64, c1: f64, c2: f64) -> Result<f64> {
    check_lambda(lambda)?;
    check_delta(delta)?;
    if !(psi1_sup > 0.0 && c1 > 0.0 && c2 > 0.0) {
        return Err(Error::Domain("psi1_sup, c1 and c2 must be positive".into()));
    }
    let root = (n as f64).sqrt();
    if root < c2 * psi1_sup {
        return Err(Error::Precondition(format!(
            "sqrt(n) = {root} is below c2 * psi1_sup = {}",
            c2 * psi1_sup
        )));
    }
    Ok((lambda + c1 * psi1_sup - delta.ln()) / root)
}

/// `s(n, delta, p) = sqrt(ln((1 + n^(2p+1)) / delta) / (2n))`.
pub fn shift_radius(n: usize, delta: f64, p: u32) -> Result<f64> {
    check_delta(delta)?;
    if n == 0 || p == 0 {
        return Err(Error::Domain("shift radius needs n >= 1 and p >= 1".into()));
    }
    let e = f64::from(2 * p + 1);
    let ln_n = (n as f64).ln();
    let log_count = e * ln_n + (-e * ln_n).exp().ln_1p();
    Ok(((log_count - delta.ln()) / (2.0 * n as f64)).sqrt())
}

/// `n^(-p) s(n, delta, p)`: the mass slack paired with [`shift_radius`].
pub fn mass_slack(n: usize, delta: f64, p: u32) -> Result<f64> {
    Ok(shift_radius(n, delta, p)? * (n as f64).powi(-(p as i32)))
}

/// Distribution-dependent bound:
/// `inf_{r in S} beta r - ln(phi(L_hat + r - s) - n^(-p) s) + log_moment + ln(2/delta)`.
///
/// `prior` and `true_losses` define `phi`. The infimum is taken at the shifts that
/// put `L_hat + r - s` on a jump of `phi`. Returns `+inf` when `S` is empty.
#[allow(clippy::too_many_arguments)]
pub fn dist_dependent_rhs(
    prior: &[f64],
    true_losses: &[f64],
    h_empirical: f64,
    beta: f64,
    n: usize,
    delta: f64,
    p: u32,
    log_moment: f64,
) -> Result<f64> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("beta = {beta} must be finite and non-negative")));
    }
    let s = shift_radius(n, delta, p)?;
    let slack = mass_slack(n, delta, p)?;
    let cdf = StepCdf::new(prior, true_losses)?;
    let best = cdf
        .jumps()
        .filter(|(_, mass)| mass - slack > 0.0)
        .map(|(level, mass)| beta * (level - h_empirical + s) - (mass - slack).ln())
        .fold(f64::INFINITY, f64::min);
    if best == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    Ok(best + log_moment + (2.0 / delta).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::kappa;
    use proptest::prelude::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn report_flag() {
        assert!(BoundReport::new(1, 1.0, 50, 0.05, 0.0, 0.1, 0.2).violated);
        assert!(!BoundReport::new(1, 1.0, 50, 0.05, 0.0, 0.1, 0.1).violated);
    }

    #[test]
    fn main_rhs_examples() {
        assert_eq!(theorem_main_rhs(0.0, 0.0, 1.0).unwrap(), 0.0);
        let v = theorem_main_rhs(LN2, (2.0 * 10.0f64).ln(), 0.05).unwrap();
        assert!((v - 6.684_611_727_667_927).abs() < 1e-12);
        assert!(theorem_main_rhs(0.0, 0.0, 0.0).is_err());
        assert!(theorem_main_rhs(0.0, 0.0, 1.5).is_err());
    }

    #[test]
    fn kl_examples() {
        assert!((kl_bound(LN2, 100, 0.05).unwrap() - 0.066_846_117_276_679_27).abs() < 1e-15);
        assert!((kl_bound(0.0, 1_000_000, 1.0).unwrap() - 7.6009024595420824e-6).abs() < 1e-18);
        assert!(kl_bound(0.0, 7, 0.5).is_err());
    }

    #[test]
    fn gap_examples() {
        let b = kl_bound(LN2, 100, 0.05).unwrap();
        assert!((gap_bound_from_kl(0.0, LN2, 100, 0.05).unwrap().relaxed - 2.0 * b).abs() < 1e-15);
        let g = gap_bound_from_kl(0.1, LN2, 100, 0.05).unwrap();
        assert!((g.relaxed - 0.24931759273803988).abs() < 1e-12, "{}", g.relaxed);
        assert!(g.exact <= g.relaxed);
        assert!((kappa(0.1, 0.1 + g.exact).unwrap().nats() - b).abs() < 1e-10);
    }

    #[test]
    fn high_temp_examples() {
        assert!((high_temp_bound(50.0, 100, 0.05).unwrap() - 0.559_914_645_471_079_8).abs() < 1e-15);
        assert_eq!(high_temp_bound(0.0, 64, 0.1).unwrap(), kl_bound(0.0, 64, 0.1).unwrap());
        assert!(high_temp_bound(-1.0, 64, 0.1).is_err());
    }

    #[test]
    fn zero_temp_examples() {
        assert_eq!(zero_temp_lambda_bound(1.0).unwrap(), 0.0);
        assert!((zero_temp_lambda_bound(4.0 / 100.0).unwrap() - 3.2188758248682007).abs() < 1e-15);
        assert!((zero_temp_lambda_bound((-100f64).exp()).unwrap() - 100.0).abs() < 1e-12);
        assert!(zero_temp_lambda_bound(0.0).is_err());
    }

    #[test]
    fn stratified_examples() {
        let v = stratified_subgaussian_bound(3.0, 1.0, 100, 0.05).unwrap();
        assert!((v - 0.464_488_788_729_761_4).abs() < 1e-14);
        assert_eq!(
            stratified_subgaussian_bound(0.3, 1.0, 100, 0.05).unwrap(),
            stratified_subgaussian_bound(-2.0, 1.0, 100, 0.05).unwrap()
        );
        let scaled = stratified_subgaussian_bound(3.0, 2.5, 100, 0.05).unwrap();
        assert!((scaled - 2.5 * v).abs() < 1e-14);
    }

    #[test]
    fn subexponential_examples() {
        assert!((subexponential_bound(0.0, 1.0, 100, 1.0, 1.0, 1.0).unwrap() - 0.1).abs() < 1e-15);
        let v = subexponential_bound(LN2, 2.0, 400, 0.05, 1.0, 1.0).unwrap();
        assert!((v - 0.284_443_972_705_696_8).abs() < 1e-14);
        assert!(matches!(
            subexponential_bound(0.0, 2.0, 9, 0.5, 1.0, 2.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn shift_examples() {
        let s = shift_radius(100, 0.05, 1).unwrap();
        assert!((s - 0.28992451).abs() < 1e-8, "{s}");
        assert!((shift_radius(1, 0.5, 1).unwrap() - 0.832_554_611_157_697_8).abs() < 1e-15);
        assert!(shift_radius(100, 0.05, 2).unwrap() > s);
        assert!((mass_slack(100, 0.05, 1).unwrap() - s / 100.0).abs() < 1e-18);
        // Large exponents stay finite.
        assert!(shift_radius(1_000_000, 0.05, 10).unwrap().is_finite());
    }

    #[test]
    fn dist_dependent_examples() {
        let (n, delta, p, beta) = (100, 0.05, 1, 4.0);
        let s = shift_radius(n, delta, p).unwrap();
        let slack = mass_slack(n, delta, p).unwrap();
        // phi = 1 from 0 on.
        let full = dist_dependent_rhs(&[0.5, 0.5], &[0.0, 0.0], 0.0, beta, n, delta, p, 0.0).unwrap();
        let expected = beta * s - (1.0 - slack).ln() + (2.0 / delta).ln();
        assert!((full - expected).abs() < 1e-12);

        // Two true-loss levels above a small empirical loss: the bound pays beta (L_min - L_hat).
        let (l_min, l_hat) = (0.5, 0.05);
        let v = dist_dependent_rhs(&[0.5, 0.5], &[l_min, 0.9], l_hat, beta, n, delta, p, 0.0).unwrap();
        let first = beta * (l_min - l_hat + s) - (0.5 - slack).ln();
        let second = beta * (0.9 - l_hat + s) - (1.0 - slack).ln();
        assert!((v - first.min(second) - (2.0 / delta).ln()).abs() < 1e-12);
    }

    #[test]
    fn dist_dependent_empty_set_is_infinite() {
        // A prior mass below the slack at every jump.
        let slack = mass_slack(8, 0.5, 1).unwrap();
        let v = dist_dependent_rhs(&[slack / 2.0], &[0.0], 0.0, 1.0, 8, 0.5, 1, 0.0).unwrap();
        assert_eq!(v, f64::INFINITY);
    }

    proptest! {
        #[test]
        fn monotone_in_inputs(lambda in -2.0f64..50.0, dl in 0.0f64..5.0, n in 8usize..10_000, delta in 0.001f64..1.0, dd in 0.0f64..0.5) {
            let d2 = delta * (1.0 - dd);
            prop_assert!(kl_bound(lambda + dl, n, delta).unwrap() >= kl_bound(lambda, n, delta).unwrap());
            prop_assert!(kl_bound(lambda, n, d2).unwrap() >= kl_bound(lambda, n, delta).unwrap());
            prop_assert!(stratified_subgaussian_bound(lambda + dl, 0.5, n, delta).unwrap() >= stratified_subgaussian_bound(lambda, 0.5, n, delta).unwrap());
            prop_assert!(stratified_subgaussian_bound(lambda, 0.5, n, d2).unwrap() >= stratified_subgaussian_bound(lambda, 0.5, n, delta).unwrap());
            prop_assert!(stratified_subgaussian_bound(lambda, 0.5, 2 * n, delta).unwrap() <= stratified_subgaussian_bound(lambda, 0.5, n, delta).unwrap());
            prop_assert!(theorem_main_rhs(lambda + dl, 0.3, d2).unwrap() >= theorem_main_rhs(lambda, 0.3, delta).unwrap());
            if lambda >= 0.0 {
                prop_assert!(kl_bound(lambda, 2 * n, delta).unwrap() <= kl_bound(lambda, n, delta).unwrap());
            }
            if lambda + 1.0 > 0.0 {
                prop_assert!(subexponential_bound(lambda, 1.0, 4 * n, delta, 1.0, 1.0).unwrap() <= subexponential_bound(lambda, 1.0, n, delta, 1.0, 1.0).unwrap());
            }
        }

        #[test]
        fn exact_gap_below_relaxed(emp in 0.0f64..=1.0, lambda in 0.0f64..20.0, n in 8usize..2000, delta in 0.01f64..1.0) {
            let g = gap_bound_from_kl(emp, lambda, n, delta).unwrap();
            prop_assert!(g.exact <= g.relaxed + 1e-12);
        }

        #[test]
        fn high_temp_dominates(lambda in -3.0f64..10.0, extra in 0.0f64..10.0, n in 8usize..1000) {
            prop_assert!(high_temp_bound(lambda.max(0.0) + extra, n, 0.05).unwrap() >= kl_bound(lambda, n, 0.05).unwrap());
        }

        #[test]
        fn shift_increasing_in_p(n in 1usize..100_000, delta in 0.001f64..1.0, p in 1u32..5) {
            prop_assert!(shift_radius(n, delta, p + 1).unwrap() >= shift_radius(n, delta, p).unwrap());
        }
    }
}
