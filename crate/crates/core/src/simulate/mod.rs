//! Seeded Monte Carlo sampling of finite chains.
//!
//! Each trajectory gets its own ChaCha8 stream keyed by the run seed and the
//! trajectory index, so any trajectory can be regenerated on its own and the
//! aggregate does not depend on how work is split across threads. All
//! aggregation is integer counting, which keeps reports bit-identical.

mod report;
mod sampler;

use thiserror::Error;

pub use report::{run_simulation, simulate_cbr, PhaseFrequencies, SimulationReport};
pub use sampler::{sample_paths, sample_trajectory, trajectory_rng, RowSampler, SampledPath};

/// Default truncation guard for a single trajectory.
pub const DEFAULT_MAX_PHASES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationConfig {
    pub seed: u64,
    pub num_trajectories: usize,
    /// Paths are censored once they hold this many phases without absorbing.
    pub max_phases: usize,
}

impl SimulationConfig {
    pub fn new(seed: u64, num_trajectories: usize) -> Result<Self, SimulationError> {
        Self::with_max_phases(seed, num_trajectories, DEFAULT_MAX_PHASES)
    }

    pub fn with_max_phases(
        seed: u64,
        num_trajectories: usize,
        max_phases: usize,
    ) -> Result<Self, SimulationError> {
        if num_trajectories == 0 {
            return Err(SimulationError::InvalidConfig(
                "num_trajectories must be at least 1",
            ));
        }
        if max_phases == 0 {
            return Err(SimulationError::InvalidConfig(
                "max_phases must be at least 1",
            ));
        }
        Ok(SimulationConfig {
            seed,
            num_trajectories,
            max_phases,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimulationError {
    #[error("UnknownStartState: no state labelled {0:?}")]
    UnknownStartState(String),
    #[error("InvalidConfig: {0}")]
    InvalidConfig(&'static str),
}
