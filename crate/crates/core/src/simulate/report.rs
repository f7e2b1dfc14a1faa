use rayon::prelude::*;
use serde::Serialize;

use crate::cbr::{cbr_transition_matrix, CbrParameters, CbrState, R3ExitCounts};
use crate::markov::TransitionMatrix;
use crate::simulate::{trajectory_rng, RowSampler, SampledPath, SimulationConfig, SimulationError};

const CHUNK: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseFrequencies {
    pub phase: usize,
    /// Trajectories whose state at this phase is known (censored paths
    /// shorter than the phase are left out).
    pub observed: u64,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub states: Vec<String>,
    pub start: String,
    pub seed: u64,
    pub num_trajectories: usize,
    pub max_phases: usize,
    pub absorbed_count: u64,
    pub censored_count: u64,
    /// Mean number of phases of absorbed paths, absorbing phase included.
    pub empirical_mean_steps: Option<f64>,
    /// Standard error of `empirical_mean_steps`; absent below two samples.
    pub standard_error: Option<f64>,
    pub empirical_phase_distributions: Vec<PhaseFrequencies>,
    /// `transition_counts[i][j]`: observed moves from state i to state j.
    pub transition_counts: Vec<Vec<u64>>,
    /// Set when the chain is the four-state CBR cycle.
    pub exit_counts_from_r3: Option<R3ExitCounts>,
}

impl SimulationReport {
    pub fn phase(&self, phase: usize) -> Option<&PhaseFrequencies> {
        self.empirical_phase_distributions
            .iter()
            .find(|p| p.phase == phase)
    }

    /// Counts of moves out of `from`, paired with destination labels.
    pub fn exit_counts(&self, from: &str) -> Option<Vec<(&str, u64)>> {
        let i = self.states.iter().position(|s| s == from)?;
        Some(
            self.states
                .iter()
                .zip(&self.transition_counts[i])
                .map(|(s, &c)| (s.as_str(), c))
                .collect(),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone)]
struct Tally {
    absorbed: u64,
    censored: u64,
    sum_len: u128,
    sum_len_sq: u128,
    phase_counts: Vec<Vec<u64>>,
    transitions: Vec<Vec<u64>>,
}

impl Tally {
    fn new(n: usize, phases: usize) -> Self {
        Tally {
            absorbed: 0,
            censored: 0,
            sum_len: 0,
            sum_len_sq: 0,
            phase_counts: vec![vec![0; n]; phases],
            transitions: vec![vec![0; n]; n],
        }
    }

    fn add(&mut self, path: &SampledPath, phases: &[usize]) {
        if path.censored {
            self.censored += 1;
        } else {
            let len = path.len() as u128;
            self.absorbed += 1;
            self.sum_len += len;
            self.sum_len_sq += len * len;
        }
        for (slot, &phase) in phases.iter().enumerate() {
            if let Some(s) = path.state_at(phase) {
                self.phase_counts[slot][s] += 1;
            }
        }
        for w in path.states.windows(2) {
            self.transitions[w[0]][w[1]] += 1;
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.absorbed += other.absorbed;
        self.censored += other.censored;
        self.sum_len += other.sum_len;
        self.sum_len_sq += other.sum_len_sq;
        for (a, b) in self.phase_counts.iter_mut().zip(&other.phase_counts) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        for (a, b) in self.transitions.iter_mut().zip(&other.transitions) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        self
    }
}

fn mean_and_error(n: u64, sum: u128, sum_sq: u128) -> (Option<f64>, Option<f64>) {
    if n == 0 {
        return (None, None);
    }
    let mean = sum as f64 / n as f64;
    if n < 2 {
        return (Some(mean), None);
    }
    let n128 = n as u128;
    // Sample variance (n Σx² - (Σx)²) / (n (n - 1)), numerator exact.
    let numerator = n128 * sum_sq - sum * sum;
    let variance = numerator as f64 / (n as f64 * (n - 1) as f64);
    (Some(mean), Some((variance / n as f64).sqrt()))
}

fn is_cbr_chain(m: &TransitionMatrix) -> bool {
    m.states()
        .iter()
        .map(String::as_str)
        .eq(CbrState::ALL.iter().map(|s| s.label()))
}

/// Runs `cfg.num_trajectories` independent walks from `start` and
/// aggregates absorption times, phase occupancy and transition counts.
/// The report is identical however the work is scheduled.
pub fn run_simulation(
    m: &TransitionMatrix,
    start: &str,
    cfg: &SimulationConfig,
    phases_of_interest: &[usize],
) -> Result<SimulationReport, SimulationError> {
    let s = m
        .index_of(start)
        .ok_or_else(|| SimulationError::UnknownStartState(start.to_string()))?;
    let sampler = RowSampler::new(m);
    let n = m.len();
    let total = cfg.num_trajectories as u64;
    let chunks = total.div_ceil(CHUNK);

    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut t = Tally::new(n, phases_of_interest.len());
            for i in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let path = sampler.walk(s, cfg.max_phases, &mut trajectory_rng(cfg.seed, i));
                t.add(&path, phases_of_interest);
            }
            t
        })
        .reduce(|| Tally::new(n, phases_of_interest.len()), Tally::merge);

    let (empirical_mean_steps, standard_error) =
        mean_and_error(tally.absorbed, tally.sum_len, tally.sum_len_sq);

    let empirical_phase_distributions = phases_of_interest
        .iter()
        .zip(&tally.phase_counts)
        .map(|(&phase, counts)| {
            let observed: u64 = counts.iter().sum();
            let frequencies = counts
                .iter()
                .map(|&c| {
                    if observed == 0 {
                        0.0
                    } else {
                        c as f64 / observed as f64
                    }
                })
                .collect();
            PhaseFrequencies {
                phase,
                observed,
                counts: counts.clone(),
                frequencies,
            }
        })
        .collect();

    let exit_counts_from_r3 = is_cbr_chain(m).then(|| {
        let row = &tally.transitions[CbrState::R3.index()];
        R3ExitCounts {
            to_r1: row[CbrState::R1.index()],
            to_r3: row[CbrState::R3.index()],
            to_r4: row[CbrState::R4.index()],
        }
    });

    Ok(SimulationReport {
        states: m.states().to_vec(),
        start: start.to_string(),
        seed: cfg.seed,
        num_trajectories: cfg.num_trajectories,
        max_phases: cfg.max_phases,
        absorbed_count: tally.absorbed,
        censored_count: tally.censored,
        empirical_mean_steps,
        standard_error,
        empirical_phase_distributions,
        transition_counts: tally.transitions,
        exit_counts_from_r3,
    })
}

/// [`run_simulation`] on the CBR cycle, starting at Retrieve.
pub fn simulate_cbr(
    p: &CbrParameters,
    cfg: &SimulationConfig,
    phases_of_interest: &[usize],
) -> SimulationReport {
    run_simulation(
        &cbr_transition_matrix(p),
        CbrState::R1.label(),
        cfg,
        phases_of_interest,
    )
    .expect("R1 is a CBR state")
}
