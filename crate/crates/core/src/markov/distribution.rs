use crate::markov::{ChainError, TransitionMatrix};
use crate::rational::Rational;

/// Distribution over chain states at phase `phase_index`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbabilityVector {
    states: Vec<String>,
    probs: Vec<Rational>,
    phase_index: usize,
}

impl ProbabilityVector {
    /// Validates that `probs` is a distribution over `states`.
    pub fn new(
        states: Vec<String>,
        probs: Vec<Rational>,
        phase_index: usize,
    ) -> Result<Self, ChainError> {
        if probs.len() != states.len() {
            return Err(ChainError::InvalidDistribution(format!(
                "{} probabilities for {} states",
                probs.len(),
                states.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_probability()) {
            return Err(ChainError::InvalidDistribution(format!(
                "{p} is not a probability"
            )));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(ChainError::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(ProbabilityVector {
            states,
            probs,
            phase_index,
        })
    }

    /// Point mass on `label` at phase 0.
    pub fn point_mass(m: &TransitionMatrix, label: &str) -> Result<Self, ChainError> {
        let idx = m
            .index_of(label)
            .ok_or_else(|| ChainError::UnknownState(label.to_string()))?;
        let probs = (0..m.len())
            .map(|i| {
                if i == idx {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        Ok(ProbabilityVector {
            states: m.states().to_vec(),
            probs,
            phase_index: 0,
        })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn phase_index(&self) -> usize {
        self.phase_index
    }

    pub fn prob_of(&self, label: &str) -> Option<&Rational> {
        self.states
            .iter()
            .position(|s| s == label)
            .map(|i| &self.probs[i])
    }
}

/// One phase forward: `P_{i+1} = P_i A`.
pub fn step_distribution(
    p: &ProbabilityVector,
    m: &TransitionMatrix,
) -> Result<ProbabilityVector, ChainError> {
    if p.states != m.states() {
        return Err(ChainError::StateMismatch);
    }
    Ok(ProbabilityVector {
        states: p.states.clone(),
        probs: m.entries().left_mul_vec(&p.probs),
        phase_index: p.phase_index + 1,
    })
}

/// Returns `[P_0, P_1, ..., P_phases]` starting from `start`.
pub fn evolve(
    start: &ProbabilityVector,
    m: &TransitionMatrix,
    phases: usize,
) -> Result<Vec<ProbabilityVector>, ChainError> {
    if start.phase_index != 0 {
        return Err(ChainError::InvalidDistribution(format!(
            "evolution must start at phase 0, got phase {}",
            start.phase_index
        )));
    }
    let mut out = Vec::with_capacity(phases + 1);
    out.push(start.clone());
    for _ in 0..phases {
        let next = step_distribution(out.last().expect("non-empty"), m)?;
        out.push(next);
    }
    Ok(out)
}
