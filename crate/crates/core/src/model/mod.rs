//! Finite statistical settings: data domains with exact probabilities, enumerated
//! hypothesis spaces with priors and tabulated losses, and the loss CDFs built on them.
//!
//! Losses are tabulated once per (space, domain) pair as an `|H| x |X|` table over
//! domain atoms. A dataset is a list of atom indices, so empirical losses only need
//! the atom counts of the sample and never an `n x |H|` matrix.

use rand::distributions::{Distribution, WeightedIndex};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_distribution, Error, Result};
use crate::seed::{rng_from_seed, Rng};

pub mod generators;
mod io;

pub use generators::{k_minimizer_space, permuted_label_task, random_loss_table, PermutedLabelSpec};
pub use io::InstanceDocument;

/// Tolerance on probability vectors summing to one.
pub const PROBABILITY_SUM_TOL: f64 = 1e-12;

/// Two losses closer than this are the same level when collecting minimizers.
pub const TIE_TOL: f64 = 1e-12;

/// A finite data distribution `mu` over opaque points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDataDomain<X = usize> {
    points: Vec<X>,
    probs: Vec<f64>,
}

impl<X> FiniteDataDomain<X> {
    pub fn new(points: Vec<X>, probs: Vec<f64>) -> Result<Self> {
        if points.len() != probs.len() {
            return Err(Error::LengthMismatch {
                left: points.len(),
                right: probs.len(),
            });
        }
        check_distribution("data probabilities", &probs, PROBABILITY_SUM_TOL)?;
        Ok(Self { points, probs })
    }

    pub fn point_mass(point: X) -> Self {
        Self {
            points: vec![point],
            probs: vec![1.0],
        }
    }

    pub fn points(&self) -> &[X] {
        &self.points
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Replaces points by their atom indices.
    pub fn into_atoms(self) -> FiniteDataDomain<usize> {
        FiniteDataDomain {
            points: (0..self.probs.len()).collect(),
            probs: self.probs,
        }
    }
}

impl FiniteDataDomain<usize> {
    /// Domain whose points are the atom indices `0..probs.len()`.
    pub fn atoms(probs: Vec<f64>) -> Result<Self> {
        Self::new((0..probs.len()).collect(), probs)
    }
}

/// An ordered training sample, stored as indices into a [`FiniteDataDomain`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DataSet {
    items: Vec<usize>,
}

impl DataSet {
    pub fn new(items: Vec<usize>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Empty("dataset"));
        }
        Ok(Self { items })
    }

    pub fn items(&self) -> &[usize] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Occurrence count of every atom of a domain with `atoms` points.
    pub fn counts(&self, atoms: usize) -> Result<Vec<u32>> {
        let mut counts = vec![0u32; atoms];
        for &i in &self.items {
            *counts
                .get_mut(i)
                .ok_or(Error::IndexOutOfRange { index: i, len: atoms })? += 1;
        }
        Ok(counts)
    }

    /// The sample as concrete points.
    pub fn materialize<X: Clone>(&self, domain: &FiniteDataDomain<X>) -> Vec<X> {
        self.items.iter().map(|&i| domain.points[i].clone()).collect()
    }
}

/// Enumerated hypotheses with a prior and their losses on every atom of one domain.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteHypothesisSpace<H = usize> {
    hypotheses: Vec<H>,
    prior: Vec<f64>,
    /// Row-major `|H| x atoms`.
    table: Vec<f64>,
    atoms: usize,
}

impl<H> FiniteHypothesisSpace<H> {
    /// Evaluates `loss(h, x)` for every hypothesis and every point of `domain`.
    pub fn tabulate<X, F>(hypotheses: Vec<H>, prior: Vec<f64>, domain: &FiniteDataDomain<X>, loss: F) -> Result<Self>
    where
        H: Sync,
        X: Sync,
        F: Fn(&H, &X) -> f64 + Sync,
    {
        let atoms = domain.len();
        let table: Vec<f64> = hypotheses
            .par_iter()
            .flat_map_iter(|h| domain.points().iter().map(|x| loss(h, x)).collect::<Vec<_>>())
            .collect();
        Self::from_parts(hypotheses, prior, table, atoms)
    }

    fn from_parts(hypotheses: Vec<H>, prior: Vec<f64>, table: Vec<f64>, atoms: usize) -> Result<Self> {
        if hypotheses.is_empty() {
            return Err(Error::Empty("hypothesis space"));
        }
        if hypotheses.len() != prior.len() {
            return Err(Error::LengthMismatch {
                left: hypotheses.len(),
                right: prior.len(),
            });
        }
        check_distribution("prior", &prior, PROBABILITY_SUM_TOL)?;
        if let Some(bad) = table.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
            return Err(Error::Domain(format!("loss {bad} is negative or not finite")));
        }
        debug_assert_eq!(table.len(), hypotheses.len() * atoms);
        Ok(Self {
            hypotheses,
            prior,
            table,
            atoms,
        })
    }

    pub fn hypotheses(&self) -> &[H] {
        &self.hypotheses
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    /// Number of domain atoms the loss table covers.
    pub fn atoms(&self) -> usize {
        self.atoms
    }

    /// Losses of hypothesis `h` on each atom.
    pub fn row(&self, h: usize) -> Result<&[f64]> {
        if h >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: h,
                len: self.len(),
            });
        }
        Ok(&self.table[h * self.atoms..(h + 1) * self.atoms])
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.table.chunks(self.atoms.max(1)).take(self.len())
    }

    /// Whether every tabulated loss lies in `[0, 1]`.
    pub fn losses_in_unit_interval(&self) -> bool {
        self.table.iter().all(|l| *l <= 1.0)
    }

    /// Forgets the hypothesis handles.
    pub fn into_indexed(self) -> FiniteHypothesisSpace<usize> {
        FiniteHypothesisSpace {
            hypotheses: (0..self.hypotheses.len()).collect(),
            prior: self.prior,
            table: self.table,
            atoms: self.atoms,
        }
    }

    fn check_domain<X>(&self, domain: &FiniteDataDomain<X>) -> Result<()> {
        if domain.len() != self.atoms {
            return Err(Error::LengthMismatch {
                left: self.atoms,
                right: domain.len(),
            });
        }
        Ok(())
    }

    /// Exact true losses `L(h) = sum_j mu_j l(h, x_j)` for every hypothesis.
    pub fn true_losses<X>(&self, domain: &FiniteDataDomain<X>) -> Result<Vec<f64>> {
        self.check_domain(domain)?;
        Ok(self
            .rows()
            .map(|row| row.iter().zip(domain.probs()).map(|(l, p)| l * p).sum())
            .collect())
    }

    /// Empirical losses of every hypothesis on `data`, computed from atom counts.
    pub fn empirical_losses(&self, data: &DataSet) -> Result<Vec<f64>> {
        let counts = data.counts(self.atoms)?;
        let n = data.len() as f64;
        let support: Vec<(usize, f64)> = counts
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > 0)
            .map(|(j, c)| (j, *c as f64))
            .collect();
        Ok(self
            .rows()
            .map(|row| support.iter().map(|&(j, c)| c * row[j]).sum::<f64>() / n)
            .collect())
    }
}

impl FiniteHypothesisSpace<usize> {
    /// Space over abstract hypotheses `0..prior.len()` with an explicit loss table
    /// (one row per hypothesis, one column per domain atom).
    pub fn from_table(prior: Vec<f64>, loss_table: Vec<Vec<f64>>) -> Result<Self> {
        if loss_table.len() != prior.len() {
            return Err(Error::LengthMismatch {
                left: prior.len(),
                right: loss_table.len(),
            });
        }
        let atoms = loss_table.first().map_or(0, Vec::len);
        if atoms == 0 {
            return Err(Error::Empty("loss table row"));
        }
        if let Some(row) = loss_table.iter().find(|r| r.len() != atoms) {
            return Err(Error::LengthMismatch {
                left: atoms,
                right: row.len(),
            });
        }
        let table = loss_table.into_iter().flatten().collect();
        Self::from_parts((0..prior.len()).collect(), prior, table, atoms)
    }
}

/// Empirical and true losses of every hypothesis, aligned with the space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossProfile {
    pub empirical: Vec<f64>,
    /// True (expected) losses.
    pub expected: Vec<f64>,
}

impl LossProfile {
    pub fn new(empirical: Vec<f64>, expected: Vec<f64>) -> Result<Self> {
        if empirical.len() != expected.len() {
            return Err(Error::LengthMismatch {
                left: empirical.len(),
                right: expected.len(),
            });
        }
        if let Some(bad) = empirical
            .iter()
            .chain(&expected)
            .find(|l| !(l.is_finite() && **l >= 0.0))
        {
            return Err(Error::Domain(format!("loss {bad} is negative or not finite")));
        }
        Ok(Self { empirical, expected })
    }

    pub fn compute<H, X>(
        space: &FiniteHypothesisSpace<H>,
        domain: &FiniteDataDomain<X>,
        data: &DataSet,
    ) -> Result<Self> {
        Ok(Self {
            empirical: space.empirical_losses(data)?,
            expected: space.true_losses(domain)?,
        })
    }
}

/// Minima of the empirical and true losses and the prior mass of their minimizers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizerSummary {
    pub min_empirical: f64,
    pub min_true: f64,
    pub prior_mass_empirical_min: f64,
    pub prior_mass_true_min: f64,
}

/// Draws `n` iid atoms from the domain.
pub fn sample_dataset<X>(domain: &FiniteDataDomain<X>, n: usize, seed: u64) -> Result<DataSet> {
    sample_dataset_with(domain, n, &mut rng_from_seed(seed))
}

pub fn sample_dataset_with<X>(domain: &FiniteDataDomain<X>, n: usize, rng: &mut Rng) -> Result<DataSet> {
    if n == 0 {
        return Err(Error::Domain("sample size must be at least 1".into()));
    }
    let dist = WeightedIndex::new(domain.probs()).map_err(|e| Error::InvalidDistribution(e.to_string()))?;
    DataSet::new((0..n).map(|_| dist.sample(rng)).collect())
}

/// `L_hat(h, x)`: mean of the per-item losses of hypothesis `h`.
pub fn empirical_loss<H>(space: &FiniteHypothesisSpace<H>, h: usize, data: &DataSet) -> Result<f64> {
    let row = space.row(h)?;
    let mut sum = 0.0;
    for &i in data.items() {
        sum += *row.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: row.len(),
        })?;
    }
    Ok(sum / data.len() as f64)
}

/// `L(h)`: expectation of the loss of `h` under the domain distribution.
pub fn true_loss<H, X>(space: &FiniteHypothesisSpace<H>, h: usize, domain: &FiniteDataDomain<X>) -> Result<f64> {
    space.check_domain(domain)?;
    Ok(space.row(h)?.iter().zip(domain.probs()).map(|(l, p)| l * p).sum())
}

/// Prior mass of `{g : losses[g] <= r}` by direct summation.
pub fn prior_mass_below(prior: &[f64], losses: &[f64], r: f64) -> f64 {
    prior
        .iter()
        .zip(losses)
        .filter(|(_, l)| **l <= r)
        .fold(0.0, |acc, (p, _)| acc + p)
        .min(1.0)
}

/// `phi_hat(r, x)`: prior mass of hypotheses with empirical loss at most `r`.
pub fn empirical_cdf<H>(space: &FiniteHypothesisSpace<H>, profile: &LossProfile, r: f64) -> f64 {
    prior_mass_below(space.prior(), &profile.empirical, r)
}

/// `phi(r)`: prior mass of hypotheses with true loss at most `r`.
pub fn true_cdf<H>(space: &FiniteHypothesisSpace<H>, profile: &LossProfile, r: f64) -> f64 {
    prior_mass_below(space.prior(), &profile.expected, r)
}

/// Right-continuous step CDF `r -> prior{g : loss(g) <= r}` stored as its jumps.
///
/// Only levels carrying positive prior mass are kept. Identical loss values are
/// merged. When the total mass is within [`PROBABILITY_SUM_TOL`] of one, the
/// last cumulative value is set to exactly one.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCdf {
    levels: Vec<f64>,
    cumulative: Vec<f64>,
}

impl StepCdf {
    pub fn new(prior: &[f64], losses: &[f64]) -> Result<Self> {
        if prior.len() != losses.len() {
            return Err(Error::LengthMismatch {
                left: prior.len(),
                right: losses.len(),
            });
        }
        let mut pairs: Vec<(f64, f64)> = losses
            .iter()
            .zip(prior)
            .filter(|(_, p)| **p > 0.0)
            .map(|(l, p)| (*l, *p))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut levels: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut cumulative: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut acc = 0.0;
        for (level, mass) in pairs {
            acc += mass;
            if levels.last() == Some(&level) {
                *cumulative.last_mut().unwrap() = acc;
            } else {
                levels.push(level);
                cumulative.push(acc);
            }
        }
        if let Some(last) = cumulative.last_mut() {
            if (*last - 1.0).abs() <= PROBABILITY_SUM_TOL {
                *last = 1.0;
            }
        }
        for c in &mut cumulative {
            *c = c.min(1.0);
        }
        Ok(Self { levels, cumulative })
    }

    pub fn eval(&self, r: f64) -> f64 {
        let k = self.levels.partition_point(|l| *l <= r);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// Distinct loss levels with positive mass, ascending.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// CDF value at each level.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn jumps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.levels.iter().copied().zip(self.cumulative.iter().copied())
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

/// Essential minimum of `losses` under `prior` and the mass of its level set.
pub(crate) fn essential_minimum(prior: &[f64], losses: &[f64]) -> Result<(f64, f64)> {
    let min = prior
        .iter()
        .zip(losses)
        .filter(|(p, _)| **p > 0.0)
        .map(|(_, l)| *l)
        .fold(f64::INFINITY, f64::min);
    if min == f64::INFINITY {
        return Err(Error::ZeroPriorMass);
    }
    let mass = prior
        .iter()
        .zip(losses)
        .filter(|(p, l)| **p > 0.0 && (**l - min).abs() <= TIE_TOL)
        .map(|(p, _)| p)
        .sum::<f64>()
        .min(1.0);
    Ok((min, mass))
}

/// Indices of positive-mass hypotheses attaining the essential minimum (ties within [`TIE_TOL`]).
pub fn minimizer_indices(prior: &[f64], losses: &[f64]) -> Result<Vec<usize>> {
    let (min, _) = essential_minimum(prior, losses)?;
    Ok(prior
        .iter()
        .zip(losses)
        .enumerate()
        .filter(|(_, (p, l))| **p > 0.0 && (**l - min).abs() <= TIE_TOL)
        .map(|(i, _)| i)
        .collect())
}

/// Minima over hypotheses with positive prior mass, and the prior mass of the minimizers.
pub fn minimizer_summary<H>(space: &FiniteHypothesisSpace<H>, profile: &LossProfile) -> Result<MinimizerSummary> {
    if profile.empirical.len() != space.len() {
        return Err(Error::LengthMismatch {
            left: space.len(),
            right: profile.empirical.len(),
        });
    }
    let (min_empirical, prior_mass_empirical_min) = essential_minimum(space.prior(), &profile.empirical)?;
    let (min_true, prior_mass_true_min) = essential_minimum(space.prior(), &profile.expected)?;
    Ok(MinimizerSummary {
        min_empirical,
        min_true,
        prior_mass_empirical_min,
        prior_mass_true_min,
    })
}

/// A data domain together with a hypothesis space tabulated on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<X = usize, H = usize> {
    pub domain: FiniteDataDomain<X>,
    pub space: FiniteHypothesisSpace<H>,
}

impl<X, H> Instance<X, H> {
    pub fn new(domain: FiniteDataDomain<X>, space: FiniteHypothesisSpace<H>) -> Result<Self> {
        space.check_domain(&domain)?;
        Ok(Self { domain, space })
    }

    /// Drops point and hypothesis handles, keeping probabilities, prior and losses.
    pub fn into_abstract(self) -> Instance {
        Instance {
            domain: self.domain.into_atoms(),
            space: self.space.into_indexed(),
        }
    }

    pub fn profile(&self, data: &DataSet) -> Result<LossProfile> {
        LossProfile::compute(&self.space, &self.domain, data)
    }
}
