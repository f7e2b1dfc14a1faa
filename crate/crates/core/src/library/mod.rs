//! Case libraries organised as generalized episodes, and the efficiency
//! metric built on the per-case mean phase count `t_i`.
//!
//! Lower efficiency is better; a library whose cases all ran the cycle
//! straight through has efficiency 3.

mod efficiency;
mod io;
mod model;

use thiserror::Error;

use crate::cbr::CbrError;
use crate::rational::Rational;

pub use efficiency::{
    case_measure, efficiency_trend, episode_efficiency, flat_efficiency, system_efficiency,
    EpisodeSummary,
};
pub use io::{
    library_to_json, load_library, load_library_with, parse_library, parse_library_with,
    write_library, BoundPolicy, LibraryWarning,
};
pub use model::{CaseLibrary, CaseRecord, CaseSource, GeneralizedEpisode};

/// Smallest possible mean phase count; reached only by the straightforward cycle.
pub fn minimum_measure() -> Rational {
    Rational::from_integer(3)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LibraryError {
    #[error("ParseError: line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("SchemaError: {field}: {message}")]
    Schema { field: String, message: String },
    #[error("DuplicateCaseId: case id {0:?} is defined more than once with different contents")]
    DuplicateCaseId(String),
    #[error("InvalidTrajectory: case {case:?}: {source}")]
    InvalidTrajectory {
        case: String,
        #[source]
        source: CbrError,
    },
    #[error("MeasureBelowBound: case {case:?} has t = {t}, but every case needs t >= 3")]
    MeasureBelowBound { case: String, t: Rational },
    #[error("EmptyLibrary: the library contains no cases")]
    EmptyLibrary,
    #[error("EmptyEpisode: episode {0:?} contains no cases")]
    EmptyEpisode(String),
    #[error("case {case:?}: {source}")]
    Case {
        case: String,
        #[source]
        source: CbrError,
    },
    #[error("IoError: {0}")]
    Io(String),
}
