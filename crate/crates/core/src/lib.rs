//! Exact analysis of the case-based reasoning (CBR) cycle as an absorbing
//! Markov chain.
//!
//! The crate has four layers:
//!
//! * [`markov`]: a general finite-chain engine over exact rationals
//!   (validation, classification, evolution, canonical form, fundamental
//!   matrix, absorption statistics).
//! * [`cbr`]: the Retrieve/Reuse/Revise/Retain chain, its closed-form mean
//!   phase count, trajectory handling and parameter estimation.
//! * [`library`]: case libraries organised as generalized episodes and the
//!   efficiency metric over them.
//! * [`simulate`]: seeded Monte Carlo runs that cross-check the analytics.
//!
//! ```
//! use cbr_markov::{cbr::{mean_phases, CbrParameters}, ratio};
//!
//! let p = CbrParameters::new(ratio(1, 3), ratio(1, 3), ratio(1, 3)).unwrap();
//! assert_eq!(mean_phases(&p).unwrap(), ratio(7, 1));
//! ```

pub mod cbr;
pub mod library;
pub mod markov;
pub mod rational;
pub mod simulate;

pub use cbr::{CbrError, CbrParameters, CbrState, Trajectory};
pub use library::{CaseLibrary, LibraryError};
pub use markov::{ChainError, ProbabilityVector, RatMatrix, TransitionMatrix};
pub use rational::{ratio, ParseRationalError, Rational};
pub use simulate::{SimulationConfig, SimulationError, SimulationReport};
