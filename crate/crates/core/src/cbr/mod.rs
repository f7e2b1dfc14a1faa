//! The four-step case-based reasoning cycle as an absorbing Markov chain.
//!
//! States are Retrieve (R1), Reuse (R2), Revise (R3) and Retain (R4). The
//! only random choice happens in Revise, which either sends the process
//! back to Retrieve (`p31`), repeats the revision (`p33`) or moves on to
//! Retain (`p34`). Retain is absorbing.

mod estimate;
mod params;
mod trajectory;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::markov::ChainError;
use crate::rational::Rational;

pub use estimate::{estimate_parameters, EstimationResult, R3ExitCounts};
pub use params::{
    cbr_transition_matrix, completion_steps, mean_phases, phase_distribution, CbrParameters,
};
pub use trajectory::{
    format_trajectories, parse_trajectories, trajectory_step_count, validate_trajectory, Trajectory,
};

/// One step of the CBR cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CbrState {
    R1,
    R2,
    R3,
    R4,
}

impl CbrState {
    pub const ALL: [CbrState; 4] = [CbrState::R1, CbrState::R2, CbrState::R3, CbrState::R4];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            CbrState::R1 => "R1",
            CbrState::R2 => "R2",
            CbrState::R3 => "R3",
            CbrState::R4 => "R4",
        }
    }

    pub fn step_name(self) -> &'static str {
        match self {
            CbrState::R1 => "Retrieve",
            CbrState::R2 => "Reuse",
            CbrState::R3 => "Revise",
            CbrState::R4 => "Retain",
        }
    }

    /// Edges of the flow diagram: R1 -> R2 -> R3 -> {R1, R3, R4}.
    pub fn can_move_to(self, next: CbrState) -> bool {
        use CbrState::*;
        matches!(
            (self, next),
            (R1, R2) | (R2, R3) | (R3, R1) | (R3, R3) | (R3, R4)
        )
    }

    pub fn labels() -> Vec<String> {
        Self::ALL.iter().map(|s| s.label().to_string()).collect()
    }
}

impl fmt::Display for CbrState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CbrState {
    type Err = CbrError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "R1" => Ok(CbrState::R1),
            "R2" => Ok(CbrState::R2),
            "R3" => Ok(CbrState::R3),
            "R4" => Ok(CbrState::R4),
            other => Err(CbrError::UnknownLabel {
                index: 0,
                label: other.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CbrError {
    #[error("InvalidParameters: {0}")]
    InvalidParameters(String),
    #[error("NonAbsorbing: p34 = 0, so Retain is never reached")]
    NonAbsorbing,
    #[error("EmptyTrajectory: a trajectory needs at least one phase")]
    EmptyTrajectory,
    #[error("DoesNotStartAtR1: trajectory starts at {0}")]
    DoesNotStartAtR1(CbrState),
    #[error("IllegalTransition: phase {index} moves {from} -> {to}, which is not an edge of the CBR cycle")]
    IllegalTransition {
        index: usize,
        from: CbrState,
        to: CbrState,
    },
    #[error("UnknownLabel: {label:?} at position {index} is not one of R1, R2, R3, R4")]
    UnknownLabel { index: usize, label: String },
    #[error("NotAbsorbed: trajectory ends at {0} instead of R4")]
    NotAbsorbed(CbrState),
    #[error("NoR3Observations: no transition out of R3 was observed")]
    NoR3Observations,
    #[error("ParseError: line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: Box<CbrError>,
    },
    #[error(transparent)]
    Chain(#[from] ChainError),
}

pub(crate) fn rational_probability(name: &str, value: &Rational) -> Result<(), CbrError> {
    if value.is_probability() {
        Ok(())
    } else {
        Err(CbrError::InvalidParameters(format!(
            "{name} = {value} is outside [0, 1]"
        )))
    }
}
