//! General finite Markov chains in exact arithmetic.
//!
//! The pipeline is: validate a row-stochastic [`TransitionMatrix`], classify
//! its states, bring it into canonical form `[I 0; R Q]` with the absorbing
//! states first, then read mean absorption times off the fundamental matrix
//! `N = (I - Q)^-1`.

mod canonical;
mod classify;
mod distribution;
mod linalg;
mod matrix;

use thiserror::Error;

use crate::rational::Rational;

pub use canonical::{
    absorption_probabilities, canonical_form, expected_absorption_steps, fundamental_from_q,
    fundamental_matrix, CanonicalChain,
};
pub use classify::{classify_states, StateClassification};
pub use distribution::{evolve, step_distribution, ProbabilityVector};
pub use linalg::RatMatrix;
pub use matrix::{validate_stochastic, TransitionMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("EmptyChain: a chain needs at least one state")]
    EmptyChain,
    #[error("RowCountMismatch: {states} state labels but {rows} matrix rows")]
    RowCountMismatch { states: usize, rows: usize },
    #[error(
        "DimensionMismatch: expected {expected}x{expected} matrix, row {row} has {found} entries"
    )]
    DimensionMismatch {
        expected: usize,
        row: usize,
        found: usize,
    },
    #[error("DuplicateLabel: state label {0:?} appears more than once")]
    DuplicateLabel(String),
    #[error("NegativeEntry: entry ({row}, {col}) is {value}")]
    NegativeEntry {
        row: usize,
        col: usize,
        value: Rational,
    },
    #[error("RowSumNotOne: row {row} sums to {sum}")]
    RowSumNotOne { row: usize, sum: Rational },
    #[error("StateMismatch: distribution and matrix are over different state lists")]
    StateMismatch,
    #[error("InvalidDistribution: {0}")]
    InvalidDistribution(String),
    #[error("UnknownState: no state labelled {0:?}")]
    UnknownState(String),
    #[error("NotAbsorbingChain: some transient state cannot reach an absorbing state")]
    NotAbsorbingChain,
    #[error("NoTransientStates: every state is absorbing")]
    NoTransientStates,
    #[error("SingularMatrix: I - Q is not invertible")]
    SingularMatrix,
}
