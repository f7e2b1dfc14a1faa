use serde::Serialize;

use crate::cbr::{rational_probability, CbrError, CbrState};
use crate::markov::{evolve, ProbabilityVector, TransitionMatrix};
use crate::rational::Rational;

/// Exit probabilities of the Revise step.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CbrParameters {
    p31: Rational,
    p33: Rational,
    p34: Rational,
}

impl CbrParameters {
    pub fn new(p31: Rational, p33: Rational, p34: Rational) -> Result<Self, CbrError> {
        rational_probability("p31", &p31)?;
        rational_probability("p33", &p33)?;
        rational_probability("p34", &p34)?;
        let total = &p31 + &p33 + &p34;
        if !total.is_one() {
            return Err(CbrError::InvalidParameters(format!(
                "p31 + p33 + p34 = {total}, expected 1"
            )));
        }
        Ok(CbrParameters { p31, p33, p34 })
    }

    /// Derives `p34 = 1 - p31 - p33`.
    pub fn from_return_and_stay(p31: Rational, p33: Rational) -> Result<Self, CbrError> {
        let p34 = Rational::one() - &p31 - &p33;
        Self::new(p31, p33, p34)
    }

    /// The straightforward cycle: Revise always succeeds.
    pub fn straightforward() -> Self {
        CbrParameters {
            p31: Rational::zero(),
            p33: Rational::zero(),
            p34: Rational::one(),
        }
    }

    pub fn p31(&self) -> &Rational {
        &self.p31
    }

    pub fn p33(&self) -> &Rational {
        &self.p33
    }

    pub fn p34(&self) -> &Rational {
        &self.p34
    }

    pub fn is_absorbing(&self) -> bool {
        self.p34.is_positive()
    }
}

pub fn cbr_transition_matrix(p: &CbrParameters) -> TransitionMatrix {
    let zero = Rational::zero;
    let one = Rational::one;
    let rows = vec![
        vec![zero(), one(), zero(), zero()],
        vec![zero(), zero(), one(), zero()],
        vec![p.p31.clone(), zero(), p.p33.clone(), p.p34.clone()],
        vec![zero(), zero(), zero(), one()],
    ];
    TransitionMatrix::new(CbrState::labels(), rows).expect("CbrParameters sum to one")
}

/// Closed-form mean number of phases before absorption starting from
/// Retrieve: `(3 - 2 p33) / (1 - p31 - p33)`.
pub fn mean_phases(p: &CbrParameters) -> Result<Rational, CbrError> {
    if !p.is_absorbing() {
        return Err(CbrError::NonAbsorbing);
    }
    let numerator = Rational::from_integer(3) - Rational::from_integer(2) * &p.p33;
    let denominator = Rational::one() - &p.p31 - &p.p33;
    Ok(numerator / denominator)
}

/// Mean number of steps to complete the cycle, absorbing phase included.
pub fn completion_steps(p: &CbrParameters) -> Result<Rational, CbrError> {
    Ok(mean_phases(p)? + Rational::one())
}

/// `P_i` starting from a point mass on Retrieve.
pub fn phase_distribution(p: &CbrParameters, i: usize) -> ProbabilityVector {
    let m = cbr_transition_matrix(p);
    let start = ProbabilityVector::point_mass(&m, CbrState::R1.label()).expect("R1 exists");
    evolve(&start, &m, i)
        .expect("states match")
        .pop()
        .expect("evolve returns i + 1 vectors")
}
