use std::collections::VecDeque;

use crate::markov::TransitionMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateClassification {
    /// Labels with self-loop probability 1, in original order.
    pub absorbing: Vec<String>,
    pub transient: Vec<String>,
    /// True iff every transient state reaches some absorbing state.
    pub is_absorbing_chain: bool,
}

/// Splits states into absorbing and transient and checks that absorption is
/// reachable from everywhere. Reachability only looks at which entries are
/// positive, never at their size.
pub fn classify_states(m: &TransitionMatrix) -> StateClassification {
    let n = m.len();
    let is_absorbing: Vec<bool> = (0..n).map(|i| m.prob(i, i).is_one()).collect();

    // Reverse BFS from the absorbing set over positive-probability edges.
    let mut reaches = is_absorbing.clone();
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| is_absorbing[i]).collect();
    while let Some(target) = queue.pop_front() {
        for (source, reached) in reaches.iter_mut().enumerate() {
            if !*reached && m.prob(source, target).is_positive() {
                *reached = true;
                queue.push_back(source);
            }
        }
    }

    let label = |i: usize| m.states()[i].clone();
    StateClassification {
        absorbing: (0..n).filter(|&i| is_absorbing[i]).map(label).collect(),
        transient: (0..n).filter(|&i| !is_absorbing[i]).map(label).collect(),
        is_absorbing_chain: is_absorbing.iter().any(|&a| a) && reaches.iter().all(|&r| r),
    }
}
