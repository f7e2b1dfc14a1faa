use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cbr::{CbrState, Trajectory};
use crate::markov::TransitionMatrix;
use crate::simulate::{SimulationConfig, SimulationError};

/// Generator for trajectory `index` of a run seeded with `seed`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Per-row inverse-CDF tables, built once from the exact matrix.
#[derive(Debug, Clone)]
pub struct RowSampler {
    /// (cumulative weight, destination) for each positive entry of a row.
    rows: Vec<Vec<(f64, usize)>>,
    absorbing: Vec<bool>,
}

impl RowSampler {
    pub fn new(m: &TransitionMatrix) -> Self {
        let n = m.len();
        let rows = (0..n)
            .map(|i| {
                let mut acc = 0.0;
                let mut row: Vec<(f64, usize)> = m
                    .row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| p.is_positive())
                    .map(|(j, p)| {
                        acc += p.to_f64();
                        (acc, j)
                    })
                    .collect();
                // The last bucket takes whatever mass rounding left over.
                if let Some(last) = row.last_mut() {
                    last.0 = f64::INFINITY;
                }
                row
            })
            .collect();
        let absorbing = (0..n).map(|i| m.prob(i, i).is_one()).collect();
        RowSampler { rows, absorbing }
    }

    pub fn is_absorbing(&self, state: usize) -> bool {
        self.absorbing[state]
    }

    pub fn next_state<R: Rng + ?Sized>(&self, state: usize, rng: &mut R) -> usize {
        let row = &self.rows[state];
        if row.len() == 1 {
            return row[0].1;
        }
        let u: f64 = rng.random();
        row.iter()
            .find(|(cum, _)| u < *cum)
            .map(|&(_, j)| j)
            .expect("last bucket is unbounded")
    }

    /// Walks from `start` until an absorbing state or `max_phases` phases.
    pub fn walk<R: Rng + ?Sized>(
        &self,
        start: usize,
        max_phases: usize,
        rng: &mut R,
    ) -> SampledPath {
        let mut states = vec![start];
        let mut current = start;
        while !self.absorbing[current] && states.len() < max_phases {
            current = self.next_state(current, rng);
            states.push(current);
        }
        SampledPath {
            censored: !self.absorbing[current],
            states,
        }
    }
}

/// A sampled run as state indices into the generating matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledPath {
    pub states: Vec<usize>,
    /// True if the walk hit the phase cap before absorbing.
    pub censored: bool,
}

impl SampledPath {
    /// Number of phases, the starting phase and the absorbing one included.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn labels<'a>(&self, m: &'a TransitionMatrix) -> Vec<&'a str> {
        self.states
            .iter()
            .map(|&i| m.states()[i].as_str())
            .collect()
    }

    /// State occupied at `phase`, if the path determines it. After
    /// absorption the chain stays put.
    pub fn state_at(&self, phase: usize) -> Option<usize> {
        match self.states.get(phase) {
            Some(&s) => Some(s),
            None if !self.censored => self.states.last().copied(),
            None => None,
        }
    }

    /// Converts a path over a matrix whose states are R1..R4 in order.
    pub fn to_cbr_trajectory(&self) -> Option<Trajectory> {
        let phases = self
            .states
            .iter()
            .map(|&i| CbrState::from_index(i))
            .collect::<Option<Vec<_>>>()?;
        Trajectory::from_states(phases).ok()
    }
}

fn start_index(m: &TransitionMatrix, start: &str) -> Result<usize, SimulationError> {
    m.index_of(start)
        .ok_or_else(|| SimulationError::UnknownStartState(start.to_string()))
}

/// Samples one path from `start`, driven by the generator for
/// (`seed`, `index`).
pub fn sample_trajectory(
    m: &TransitionMatrix,
    start: &str,
    seed: u64,
    index: u64,
    max_phases: usize,
) -> Result<SampledPath, SimulationError> {
    let s = start_index(m, start)?;
    let sampler = RowSampler::new(m);
    Ok(sampler.walk(s, max_phases.max(1), &mut trajectory_rng(seed, index)))
}

/// All `cfg.num_trajectories` paths, in index order.
pub fn sample_paths(
    m: &TransitionMatrix,
    start: &str,
    cfg: &SimulationConfig,
) -> Result<Vec<SampledPath>, SimulationError> {
    let s = start_index(m, start)?;
    let sampler = RowSampler::new(m);
    Ok((0..cfg.num_trajectories as u64)
        .into_par_iter()
        .map(|i| sampler.walk(s, cfg.max_phases, &mut trajectory_rng(cfg.seed, i)))
        .collect())
}
