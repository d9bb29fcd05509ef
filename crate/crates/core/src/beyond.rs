//! Posteriors with non-increasing, log-Lipschitz densities in the empirical loss.
//!
//! A density `q(t)` of the empirical loss, non-increasing with
//! `|ln q(t) - ln q(s)| <= gamma |t - s|`, induces the posterior
//! `Q(h) ∝ pi(h) q(L_hat(h))`, and the bound of the Gibbs case holds with
//! `Lambda_gamma` in place of `Lambda_beta`.

use serde::{Deserialize, Serialize};

use crate::bounds::{kl_bound, theorem_main_rhs};
use crate::error::{check_delta, Error, Result};
use crate::gibbs::lambda_complexity;
use crate::measures::log_sum_exp;
use crate::model::StepCdf;

// Relative and absolute slack for the log-Lipschitz comparison.
const LIPSCHITZ_TOL: f64 = 1e-12;

/// An unnormalized density of the empirical loss, given through its logarithm.
pub trait MonotoneDensity {
    /// `ln q(t)`; `-inf` where the density vanishes.
    fn log_density(&self, t: f64) -> f64;
}

/// Wraps a closure computing `ln q(t)`.
#[derive(Debug, Clone, Copy)]
pub struct FnDensity<F>(pub F);

impl<F: Fn(f64) -> f64> MonotoneDensity for FnDensity<F> {
    fn log_density(&self, t: f64) -> f64 {
        (self.0)(t)
    }
}

/// Shipped density families with their log-Lipschitz constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DensityFamily {
    /// `exp(-beta t)`, the Gibbs posterior; `gamma = beta`.
    Exponential { beta: f64 },
    /// `(1 + t)^(-a)`; `gamma = a`.
    Polynomial { a: f64 },
    /// `exp(-beta min(t, cap))`; `gamma = beta`.
    CappedExponential { beta: f64, cap: f64 },
}

impl DensityFamily {
    pub fn gamma(&self) -> f64 {
        match *self {
            Self::Exponential { beta } | Self::CappedExponential { beta, .. } => beta,
            Self::Polynomial { a } => a,
        }
    }

    /// Same family with its rate (`beta` or `a`) replaced by `gamma`.
    pub fn with_gamma(&self, gamma: f64) -> Self {
        match *self {
            Self::Exponential { .. } => Self::Exponential { beta: gamma },
            Self::Polynomial { .. } => Self::Polynomial { a: gamma },
            Self::CappedExponential { cap, .. } => Self::CappedExponential { beta: gamma, cap },
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Exponential { beta } => beta >= 0.0 && beta.is_finite(),
            Self::Polynomial { a } => a >= 0.0 && a.is_finite(),
            Self::CappedExponential { beta, cap } => beta >= 0.0 && beta.is_finite() && cap >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid density parameters {self:?}")))
        }
    }
}

impl MonotoneDensity for DensityFamily {
    fn log_density(&self, t: f64) -> f64 {
        match *self {
            Self::Exponential { beta } => -beta * t,
            Self::Polynomial { a } => -a * t.ln_1p(),
            Self::CappedExponential { beta, cap } => -beta * t.min(cap),
        }
    }
}

/// Normalized posterior `Q(h) = c pi(h) q(L_hat(h))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneDensityPosterior {
    gamma: f64,
    log_normalizer: f64,
    weights: Vec<f64>,
}

impl MonotoneDensityPosterior {
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `c` with `c sum_h pi(h) q(L_hat(h)) = 1`; may overflow to `+inf` for steep densities.
    pub fn normalizer(&self) -> f64 {
        self.log_normalizer.exp()
    }

    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Checks monotonicity and the log-Lipschitz condition on consecutive achieved levels,
/// which implies both conditions for every pair of achieved levels.
fn check_conditions<D: MonotoneDensity + ?Sized>(levels: &[f64], density: &D, gamma: f64) -> Result<()> {
    for pair in levels.windows(2) {
        let (s, t) = (pair[0], pair[1]);
        let (ls, lt) = (density.log_density(s), density.log_density(t));
        if ls.is_nan() || lt.is_nan() || ls == f64::INFINITY || lt == f64::INFINITY {
            return Err(Error::DensityCondition {
                condition: "finite density",
                s,
                t,
            });
        }
        if !(ls - lt >= -LIPSCHITZ_TOL) {
            return Err(Error::DensityCondition {
                condition: "non-increasing",
                s,
                t,
            });
        }
        if !((ls - lt).abs() <= gamma * (t - s) * (1.0 + LIPSCHITZ_TOL) + LIPSCHITZ_TOL) {
            return Err(Error::DensityCondition {
                condition: "log-Lipschitz",
                s,
                t,
            });
        }
    }
    Ok(())
}

/// Normalizes `density` against the prior after verifying its conditions at the
/// positive-mass empirical loss levels.
pub fn normalize_density<D: MonotoneDensity + ?Sized>(
    prior: &[f64],
    losses: &[f64],
    density: &D,
    gamma: f64,
) -> Result<MonotoneDensityPosterior> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!(
            "gamma = {gamma} must be finite and non-negative"
        )));
    }
    let cdf = StepCdf::new(prior, losses)?;
    if cdf.is_empty() {
        return Err(Error::ZeroPriorMass);
    }
    if let Some(l) = cdf.levels().iter().find(|l| **l < 0.0) {
        return Err(Error::Domain(format!("loss {l} is negative")));
    }
    check_conditions(cdf.levels(), density, gamma)?;
    let log_prior: Vec<f64> = prior.iter().map(|p| p.ln()).collect();
    let log_q: Vec<f64> = losses
        .iter()
        .zip(prior)
        .map(|(l, p)| if *p > 0.0 { density.log_density(*l) } else { 0.0 })
        .collect();
    let log_total = log_sum_exp(&log_prior, &log_q)?;
    if log_total == f64::NEG_INFINITY {
        return Err(Error::Domain("density vanishes at every achieved level".into()));
    }
    let weights = log_prior
        .iter()
        .zip(&log_q)
        .map(|(lp, lq)| (lp + lq - log_total).exp())
        .collect();
    Ok(MonotoneDensityPosterior {
        gamma,
        log_normalizer: -log_total,
        weights,
    })
}

/// [`normalize_density`] with the family's own `gamma`.
pub fn normalize_family(prior: &[f64], losses: &[f64], family: &DensityFamily) -> Result<MonotoneDensityPosterior> {
    family.validate()?;
    normalize_density(prior, losses, family, family.gamma())
}

/// `Lambda_gamma(h, x) + log_moment + ln(1/delta)`.
pub fn beyond_gibbs_rhs(
    prior: &[f64],
    losses: &[f64],
    h: usize,
    posterior: &MonotoneDensityPosterior,
    log_moment: f64,
    delta: f64,
) -> Result<f64> {
    let lambda = lambda_complexity(prior, losses, h, posterior.gamma())?;
    theorem_main_rhs(lambda.value, log_moment, delta)
}

/// The kl form `(Lambda_gamma(h, x) + ln(2 sqrt(n)/delta)) / n` and the `Lambda_gamma` used.
pub fn beyond_kl_bound(
    prior: &[f64],
    losses: &[f64],
    h: usize,
    posterior: &MonotoneDensityPosterior,
    n: usize,
    delta: f64,
) -> Result<(f64, f64)> {
    let lambda = lambda_complexity(prior, losses, h, posterior.gamma())?.value;
    Ok((lambda, kl_bound(lambda, n, delta)?))
}

/// `log_moment_exact + sup_gamma_scale * ipm_distance + ln(1/delta)`: the bound when
/// sampling from an approximation at integral-probability-metric distance `ipm_distance`.
pub fn ipm_corrected_rhs(log_moment_exact: f64, sup_gamma_scale: f64, ipm_distance: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if !(sup_gamma_scale > 0.0) {
        return Err(Error::Domain(format!("scale {sup_gamma_scale} must be positive")));
    }
    if !(ipm_distance >= 0.0) {
        return Err(Error::Domain(format!("ipm distance {ipm_distance} is negative")));
    }
    Ok(log_moment_exact + sup_gamma_scale * ipm_distance - delta.ln())
}
