//! Fixtures shared by the benchmarks.

use gibbslab::model::{random_loss_table, sample_dataset, Instance};
use gibbslab::Result;

/// A random loss table together with the empirical losses of one sampled dataset.
pub struct Fixture {
    pub instance: Instance,
    pub empirical: Vec<f64>,
}

pub fn fixture(hypotheses: usize, atoms: usize, n: usize, seed: u64) -> Result<Fixture> {
    let instance = random_loss_table(hypotheses, atoms, seed)?;
    let data = sample_dataset(&instance.domain, n, seed ^ 0x9e37_79b9)?;
    let empirical = instance.space.empirical_losses(&data)?;
    Ok(Fixture { instance, empirical })
}
