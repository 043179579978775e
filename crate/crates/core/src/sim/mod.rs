//! Monte Carlo ground truth: samples the full spatial system, runs the
//! literal CSMA retention, associates users by biased max power, measures
//! SIR at typical probes, and estimates every probability the closed forms
//! predict.
//!
//! Every random draw derives from (master seed, iteration index), so runs
//! replay bit-identically regardless of worker count or scheduling.

pub mod csma;
pub mod estimate;
pub mod geometry;
pub mod measure;
pub mod realization;

pub use csma::{run_aloha, run_csma, sensing_fade, MAX_SENSING_FADE};
pub use estimate::{
    estimate_access_comparison,
    collect_serving_distances, estimate_aloha_coverage, estimate_association, estimate_coverage,
    estimate_load_histogram, estimate_retention, wilson_interval, AssociationStats, LoadHistogram,
    RetentionStats, MIN_EFFECTIVE_SAMPLES,
};
pub use geometry::{dist_sq, Vec2};
pub use measure::{measure_sir, ProbeContext, ProbeKind, SirSample};
pub use realization::{
    associate, sample_realization, ActiveSets, Associations, BaseStation, CellUser, D2dPair,
    NetworkRealization,
};

use serde::{Deserialize, Serialize};

/// Simulation controls: iteration count, window side, master seed, optional
/// worker override, and the boundary metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimSettings {
    pub iterations: u64,
    /// Square window side in meters.
    pub window: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Wrap-around distances remove window edge bias.
    pub toroidal: bool,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings {
            iterations: 10_000,
            window: 5000.0,
            seed: 0,
            workers: None,
            toroidal: true,
        }
    }
}

impl SimSettings {
    pub fn with_iterations(mut self, iterations: u64) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}
