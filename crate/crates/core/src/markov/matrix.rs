use std::collections::HashSet;
use std::fmt;

use crate::markov::{ChainError, RatMatrix};
use crate::rational::Rational;

/// A labelled row-stochastic matrix: `entries[i][j]` is the probability of
/// moving from state `i` to state `j` in one phase.
#[derive(Clone, PartialEq, Eq)]
pub struct TransitionMatrix {
    states: Vec<String>,
    entries: RatMatrix,
}

impl TransitionMatrix {
    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn entries(&self) -> &RatMatrix {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }

    pub fn prob(&self, from: usize, to: usize) -> &Rational {
        &self.entries[(from, to)]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        self.entries.row(i)
    }
}

impl fmt::Debug for TransitionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransitionMatrix")
            .field("states", &self.states)
            .field("entries", &self.entries)
            .finish()
    }
}

/// Checks that `raw` is a square row-stochastic matrix over `states` and
/// wraps it. No entry is altered.
pub fn validate_stochastic(
    states: Vec<String>,
    raw: Vec<Vec<Rational>>,
) -> Result<TransitionMatrix, ChainError> {
    let n = states.len();
    if n == 0 {
        return Err(ChainError::EmptyChain);
    }
    let mut seen = HashSet::with_capacity(n);
    for label in &states {
        if !seen.insert(label.as_str()) {
            return Err(ChainError::DuplicateLabel(label.clone()));
        }
    }
    if raw.len() != n {
        return Err(ChainError::RowCountMismatch {
            states: n,
            rows: raw.len(),
        });
    }
    for (i, row) in raw.iter().enumerate() {
        if row.len() != n {
            return Err(ChainError::DimensionMismatch {
                expected: n,
                row: i,
                found: row.len(),
            });
        }
        if let Some((j, value)) = row.iter().enumerate().find(|(_, v)| v.is_negative()) {
            return Err(ChainError::NegativeEntry {
                row: i,
                col: j,
                value: value.clone(),
            });
        }
        let sum: Rational = row.iter().sum();
        if !sum.is_one() {
            return Err(ChainError::RowSumNotOne { row: i, sum });
        }
    }
    Ok(TransitionMatrix {
        states,
        entries: RatMatrix::from_rows(raw),
    })
}

impl TransitionMatrix {
    /// Builds from string labels; convenience over [`validate_stochastic`].
    pub fn new<S: Into<String>>(
        states: impl IntoIterator<Item = S>,
        raw: Vec<Vec<Rational>>,
    ) -> Result<Self, ChainError> {
        validate_stochastic(states.into_iter().map(Into::into).collect(), raw)
    }
}
