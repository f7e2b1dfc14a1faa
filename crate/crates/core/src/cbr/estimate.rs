use serde::Serialize;

use crate::cbr::{CbrError, CbrParameters, CbrState, Trajectory};
use crate::rational::Rational;

/// Observed transitions out of Revise.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct R3ExitCounts {
    pub to_r1: u64,
    pub to_r3: u64,
    pub to_r4: u64,
}

impl R3ExitCounts {
    pub fn total(&self) -> u64 {
        self.to_r1 + self.to_r3 + self.to_r4
    }

    pub fn record(&mut self, next: CbrState) {
        match next {
            CbrState::R1 => self.to_r1 += 1,
            CbrState::R3 => self.to_r3 += 1,
            CbrState::R4 => self.to_r4 += 1,
            CbrState::R2 => {}
        }
    }

    pub fn observe(&mut self, t: &Trajectory) {
        for (from, to) in t.transitions() {
            if from == CbrState::R3 {
                self.record(to);
            }
        }
    }

    pub fn merge(&mut self, other: &R3ExitCounts) {
        self.to_r1 += other.to_r1;
        self.to_r3 += other.to_r3;
        self.to_r4 += other.to_r4;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EstimationResult {
    pub params: CbrParameters,
    pub r3_exit_counts: R3ExitCounts,
}

/// Maximum-likelihood estimate of the Revise exit probabilities: each is
/// the observed fraction of R3 exits going that way. Censored trajectories
/// contribute whatever exits they contain.
pub fn estimate_parameters(trajectories: &[Trajectory]) -> Result<EstimationResult, CbrError> {
    let mut counts = R3ExitCounts::default();
    for t in trajectories {
        counts.observe(t);
    }
    let total = counts.total();
    if total == 0 {
        return Err(CbrError::NoR3Observations);
    }
    let frac = |k: u64| Rational::from(k) / Rational::from(total);
    let params = CbrParameters::new(frac(counts.to_r1), frac(counts.to_r3), frac(counts.to_r4))?;
    Ok(EstimationResult {
        params,
        r3_exit_counts: counts,
    })
}
