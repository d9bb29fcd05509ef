//! Seeded experiment drivers, their configuration, report writers and the
//! named verification suites.

pub mod config;
pub mod experiments;
pub mod stats;
pub mod suites;

pub use config::{BoundKind, ExperimentConfig, ExperimentKind, SpaceSpec};
pub use experiments::{
    run_concentration_experiment, run_experiment, run_phase_diagram, run_random_label_experiment,
    run_violation_experiment, run_zero_temp_sweep, ConcentrationRow, ConcentrationSummary, ExperimentOutcome, PhaseRow,
    RandomLabelRow, ViolationSummary, ZeroTempRow,
};
pub use stats::{median, wilson_upper, RateSummary, WILSON_Z_99};
pub use suites::{run_suite, Check, SuiteReport};
