//! Seeded synthetic settings.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{FiniteDataDomain, FiniteHypothesisSpace, Instance};
use crate::error::{Error, Result};
use crate::margins::{self, build_linear_grid, LabeledPoint, LinearHypothesis, PriorKind};
use crate::seed::rng_from_seed;

fn random_probs(atoms: usize, rng: &mut crate::seed::Rng) -> Vec<f64> {
    let w: Vec<f64> = (0..atoms).map(|_| rng.gen_range(0.5..1.5)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

fn uniform(len: usize) -> Vec<f64> {
    vec![1.0 / len as f64; len]
}

/// `hypotheses x atoms` iid Uniform[0, 1] losses, uniform prior, random positive data probabilities.
pub fn random_loss_table(hypotheses: usize, atoms: usize, seed: u64) -> Result<Instance> {
    if hypotheses == 0 || atoms == 0 {
        return Err(Error::Domain(
            "random_loss_table needs at least one hypothesis and one atom".into(),
        ));
    }
    let mut rng = rng_from_seed(seed);
    let probs = random_probs(atoms, &mut rng);
    let table = (0..hypotheses)
        .map(|_| (0..atoms).map(|_| rng.gen::<f64>()).collect())
        .collect();
    Instance::new(
        FiniteDataDomain::atoms(probs)?,
        FiniteHypothesisSpace::from_table(uniform(hypotheses), table)?,
    )
}

/// Uniform prior over `hypotheses`, of which the first `minimizers` have zero loss on
/// every atom; the others draw iid losses from Uniform[`gap`, 1]. Every dataset then
/// has exactly `minimizers` empirical minimizers and a loss gap of at least `gap`.
pub fn k_minimizer_space(hypotheses: usize, minimizers: usize, atoms: usize, gap: f64, seed: u64) -> Result<Instance> {
    if minimizers == 0 || minimizers > hypotheses || atoms == 0 {
        return Err(Error::Domain(format!(
            "need 1 <= minimizers ({minimizers}) <= hypotheses ({hypotheses}) and atoms > 0"
        )));
    }
    if !(gap > 0.0 && gap < 1.0) {
        return Err(Error::Domain(format!("gap = {gap} is not in (0, 1)")));
    }
    let mut rng = rng_from_seed(seed);
    let probs = random_probs(atoms, &mut rng);
    let table = (0..hypotheses)
        .map(|h| {
            (0..atoms)
                .map(|_| if h < minimizers { 0.0 } else { rng.gen_range(gap..=1.0) })
                .collect()
        })
        .collect();
    Instance::new(
        FiniteDataDomain::atoms(probs)?,
        FiniteHypothesisSpace::from_table(uniform(hypotheses), table)?,
    )
}

/// Parameters of [`permuted_label_task`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutedLabelSpec {
    /// Distinct inputs drawn uniformly from `[-1, 1]^2`.
    pub inputs: usize,
    pub angular_steps: usize,
    pub bias_steps: usize,
    pub bias_range: f64,
    /// With random labels each input appears once with each label (probability
    /// `1/(2 inputs)` each), so every classifier has true 0-1 loss at least 1/2.
    /// Otherwise labels follow a fixed random linear rule.
    pub random_labels: bool,
    pub seed: u64,
}

impl Default for PermutedLabelSpec {
    fn default() -> Self {
        Self {
            inputs: 16,
            angular_steps: 72,
            bias_steps: 9,
            bias_range: 1.0,
            random_labels: true,
            seed: 0,
        }
    }
}

/// Binary classification on a 2D linear grid under 0-1 loss, with labels either
/// independent of the inputs or given by a linear rule.
pub fn permuted_label_task(spec: &PermutedLabelSpec) -> Result<Instance<LabeledPoint, LinearHypothesis>> {
    if spec.inputs == 0 {
        return Err(Error::Domain("permuted_label_task needs at least one input".into()));
    }
    let mut rng = rng_from_seed(spec.seed);
    let inputs: Vec<Vec<f64>> = (0..spec.inputs)
        .map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
        .collect();
    let points: Vec<LabeledPoint> = if spec.random_labels {
        inputs
            .into_iter()
            .flat_map(|z| [LabeledPoint::new(z.clone(), 1), LabeledPoint::new(z, -1)])
            .collect::<Result<_>>()?
    } else {
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let rule = LinearHypothesis::new(vec![angle.cos(), angle.sin()], 0.0)?;
        inputs
            .into_iter()
            .map(|z| {
                let s = margins::score(&rule, &z)?;
                LabeledPoint::new(z, if s >= 0.0 { 1 } else { -1 })
            })
            .collect::<Result<_>>()?
    };
    let probs = uniform(points.len());
    let domain = FiniteDataDomain::new(points, probs)?;
    let grid = build_linear_grid(
        2,
        spec.angular_steps,
        spec.bias_steps,
        spec.bias_range,
        PriorKind::Uniform,
    )?;
    let space = grid.tabulate(&domain, margins::MarginLoss::ZeroOne)?;
    Instance::new(domain, space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{minimizer_summary, sample_dataset, true_cdf, LossProfile};

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(random_loss_table(8, 4, 5).unwrap(), random_loss_table(8, 4, 5).unwrap());
        assert_ne!(random_loss_table(8, 4, 5).unwrap(), random_loss_table(8, 4, 6).unwrap());
        let spec = PermutedLabelSpec::default();
        assert_eq!(permuted_label_task(&spec).unwrap(), permuted_label_task(&spec).unwrap());
    }

    #[test]
    fn random_table_losses_in_unit_interval() {
        let inst = random_loss_table(64, 16, 1).unwrap();
        assert!(inst.space.losses_in_unit_interval());
        assert_eq!(inst.space.len(), 64);
        assert_eq!(inst.domain.len(), 16);
    }

    #[test]
    fn k_minimizer_mass_is_k_over_h() {
        let inst = k_minimizer_space(100, 4, 16, 0.25, 3).unwrap();
        for seed in 0..20 {
            let data = sample_dataset(&inst.domain, 30, seed).unwrap();
            let p = inst.profile(&data).unwrap();
            let s = minimizer_summary(&inst.space, &p).unwrap();
            assert_eq!(s.min_empirical, 0.0);
            assert!((s.prior_mass_empirical_min - 0.04).abs() < 1e-15);
            assert!(p.empirical[4..].iter().all(|l| *l >= 0.25));
        }
        assert!(k_minimizer_space(10, 11, 4, 0.2, 0).is_err());
    }

    #[test]
    fn random_labels_have_flat_true_cdf_below_half() {
        let inst = permuted_label_task(&PermutedLabelSpec::default()).unwrap();
        let expected = inst.space.true_losses(&inst.domain).unwrap();
        let profile = LossProfile::new(expected.clone(), expected).unwrap();
        let s = minimizer_summary(&inst.space, &profile).unwrap();
        assert!(s.min_true >= 0.5 - 1e-12);
        for r in [0.0, 0.25, 0.49, s.min_true - 1e-9] {
            assert_eq!(true_cdf(&inst.space, &profile, r), 0.0);
        }
    }
}
