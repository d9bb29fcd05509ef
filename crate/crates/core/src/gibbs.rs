//! Gibbs posteriors, exact and approximate sampling, and the complexity `Lambda_beta`.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng as _;
use serde::Serialize;

use crate::error::{check_distribution, Error, Result};
use crate::measures::log_sum_exp;
use crate::model::{essential_minimum, StepCdf, TIE_TOL};
use crate::seed::{rng_from_seed, Rng};

/// Posterior `G_beta(x)` over a finite hypothesis space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GibbsPosterior {
    beta: f64,
    log_partition: f64,
    weights: Vec<f64>,
}

impl GibbsPosterior {
    /// `+inf` for the zero-temperature posterior.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `ln Z_beta(x)`; `-inf` for the zero-temperature posterior.
    pub fn log_partition(&self) -> f64 {
        self.log_partition
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }
}

fn check_inputs(prior: &[f64], losses: &[f64], beta: f64) -> Result<()> {
    if prior.len() != losses.len() {
        return Err(Error::LengthMismatch {
            left: prior.len(),
            right: losses.len(),
        });
    }
    if prior.is_empty() {
        return Err(Error::Empty("hypothesis space"));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("beta = {beta} must be finite and non-negative")));
    }
    if let Some(l) = losses.iter().find(|l| !l.is_finite()) {
        return Err(Error::Domain(format!("loss {l} is not finite")));
    }
    Ok(())
}

fn log_prior(prior: &[f64]) -> Vec<f64> {
    prior.iter().map(|p| p.ln()).collect()
}

/// `ln sum_i prior_i exp(-beta losses_i)`.
pub fn log_partition(prior: &[f64], losses: &[f64], beta: f64) -> Result<f64> {
    check_inputs(prior, losses, beta)?;
    if beta == 0.0 {
        return Ok(0.0);
    }
    let exponents: Vec<f64> = losses.iter().map(|l| -beta * l).collect();
    log_sum_exp(&log_prior(prior), &exponents)
}

pub fn posterior(prior: &[f64], losses: &[f64], beta: f64) -> Result<GibbsPosterior> {
    let log_z = log_partition(prior, losses, beta)?;
    if log_z == f64::NEG_INFINITY {
        return Err(Error::ZeroPriorMass);
    }
    let weights = if beta == 0.0 {
        prior.to_vec()
    } else {
        prior
            .iter()
            .zip(losses)
            .map(|(p, l)| (p.ln() - beta * l - log_z).exp())
            .collect()
    };
    Ok(GibbsPosterior {
        beta,
        log_partition: log_z,
        weights,
    })
}

/// The `beta -> inf` limit: the prior restricted to the empirical minimizers, renormalized.
pub fn zero_temperature_posterior(prior: &[f64], losses: &[f64]) -> Result<GibbsPosterior> {
    check_inputs(prior, losses, 0.0)?;
    let (min, mass) = essential_minimum(prior, losses)?;
    let weights = prior
        .iter()
        .zip(losses)
        .map(|(p, l)| {
            if *p > 0.0 && (l - min).abs() <= TIE_TOL {
                p / mass
            } else {
                0.0
            }
        })
        .collect();
    Ok(GibbsPosterior {
        beta: f64::INFINITY,
        log_partition: f64::NEG_INFINITY,
        weights,
    })
}

/// Categorical draw from the posterior weights.
pub fn sample_hypothesis(posterior: &GibbsPosterior, seed: u64) -> usize {
    sample_with(posterior.weights(), &mut rng_from_seed(seed))
}

/// Draws an index with probability proportional to `weights`.
///
/// # Panics
/// If `weights` has no positive entry; posterior weights always do.
pub fn sample_with(weights: &[f64], rng: &mut Rng) -> usize {
    WeightedIndex::new(weights)
        .expect("weights must contain a positive entry")
        .sample(rng)
}

/// `Lambda_beta(h, x)` and a shift attaining the infimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaValue {
    pub value: f64,
    pub argmin_r: f64,
}

/// `inf_r beta r - ln phi_hat(L_hat(h) + r)`, minimized over the jump points of `phi_hat`.
///
/// Between jumps the objective increases linearly, so the infimum is attained at a
/// shift `r_k = u_k - L_hat(h)` for some positive-mass level `u_k`. Ties keep the
/// smallest shift.
pub fn lambda_complexity(prior: &[f64], losses: &[f64], h: usize, beta: f64) -> Result<LambdaValue> {
    check_inputs(prior, losses, beta)?;
    let own = *losses.get(h).ok_or(Error::IndexOutOfRange {
        index: h,
        len: losses.len(),
    })?;
    let cdf = StepCdf::new(prior, losses)?;
    if cdf.is_empty() {
        return Err(Error::ZeroPriorMass);
    }
    let mut best = LambdaValue {
        value: f64::INFINITY,
        argmin_r: f64::NAN,
    };
    for (level, mass) in cdf.jumps() {
        let r = level - own;
        let objective = beta * r - mass.ln();
        if objective < best.value {
            best = LambdaValue {
                value: objective,
                argmin_r: r,
            };
        }
    }
    Ok(best)
}

/// Minimum of the `Lambda` objective over the grid `r = -L_hat(h) - 1 + j * grid_step`
/// up to the largest positive-mass loss plus one. Reference implementation for
/// [`lambda_complexity`]; never below it and at most `beta * grid_step` above it.
pub fn lambda_bruteforce(prior: &[f64], losses: &[f64], h: usize, beta: f64, grid_step: f64) -> Result<f64> {
    check_inputs(prior, losses, beta)?;
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(Error::Domain(format!("grid_step = {grid_step} must be positive")));
    }
    let own = *losses.get(h).ok_or(Error::IndexOutOfRange {
        index: h,
        len: losses.len(),
    })?;
    let mut sorted: Vec<(f64, f64)> = losses
        .iter()
        .zip(prior)
        .filter(|(_, p)| **p > 0.0)
        .map(|(l, p)| (*l, *p))
        .collect();
    if sorted.is_empty() {
        return Err(Error::ZeroPriorMass);
    }
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let top = sorted.last().map(|s| s.0).unwrap_or(0.0);
    let lo = -own - 1.0;
    let hi = top + 1.0;
    let steps = ((hi - lo) / grid_step).ceil() as usize;

    // Sweep r upward, advancing a pointer into the sorted losses.
    let mut next = 0;
    let mut mass = 0.0;
    let mut neg_log_mass = f64::INFINITY;
    let mut best = f64::INFINITY;
    for j in 0..=steps {
        let r = lo + j as f64 * grid_step;
        let threshold = own + r;
        let before = next;
        while next < sorted.len() && sorted[next].0 <= threshold {
            mass += sorted[next].1;
            next += 1;
        }
        if next != before {
            neg_log_mass = if next == sorted.len() && (mass - 1.0).abs() <= 1e-12 {
                0.0
            } else {
                -mass.min(1.0).ln()
            };
        }
        best = best.min(beta * r + neg_log_mass);
    }
    Ok(best)
}

fn metropolis_step(prior: &WeightedIndex<f64>, losses: &[f64], beta: f64, state: usize, rng: &mut Rng) -> usize {
    let proposal = prior.sample(rng);
    let log_accept = -beta * (losses[proposal] - losses[state]);
    if log_accept >= 0.0 || rng.gen::<f64>().ln() < log_accept {
        proposal
    } else {
        state
    }
}

fn metropolis_setup(prior: &[f64], losses: &[f64], beta: f64) -> Result<WeightedIndex<f64>> {
    check_inputs(prior, losses, beta)?;
    WeightedIndex::new(prior).map_err(|e| Error::InvalidDistribution(e.to_string()))
}

/// State of an independence Metropolis chain targeting `G_beta(x)` after
/// `chain_length` steps. Proposals are drawn from the prior, whose density cancels in
/// the acceptance ratio `exp(-beta (L_hat(j) - L_hat(i)))`. The initial state is a prior draw.
pub fn metropolis_sample(prior: &[f64], losses: &[f64], beta: f64, chain_length: usize, seed: u64) -> Result<usize> {
    if chain_length == 0 {
        return Err(Error::Domain("chain_length must be at least 1".into()));
    }
    let proposals = metropolis_setup(prior, losses, beta)?;
    let mut rng = rng_from_seed(seed);
    let mut state = proposals.sample(&mut rng);
    for _ in 0..chain_length {
        state = metropolis_step(&proposals, losses, beta, state, &mut rng);
    }
    Ok(state)
}

/// Fraction of the `steps` post-burn-in states spent at each hypothesis.
pub fn metropolis_occupancy(
    prior: &[f64],
    losses: &[f64],
    beta: f64,
    burn_in: usize,
    steps: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::Domain("steps must be at least 1".into()));
    }
    let proposals = metropolis_setup(prior, losses, beta)?;
    let mut rng = rng_from_seed(seed);
    let mut state = proposals.sample(&mut rng);
    for _ in 0..burn_in {
        state = metropolis_step(&proposals, losses, beta, state, &mut rng);
    }
    let mut counts = vec![0u64; prior.len()];
    for _ in 0..steps {
        state = metropolis_step(&proposals, losses, beta, state, &mut rng);
        counts[state] += 1;
    }
    Ok(counts.into_iter().map(|c| c as f64 / steps as f64).collect())
}

/// L1 distance between two distributions; the integral probability metric for
/// test functions bounded by one.
pub fn ipm_l1(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    check_distribution("p", p, 1e-8)?;
    check_distribution("q", q, 1e-8)?;
    Ok(p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum())
}
