use std::sync::OnceLock;

use crate::markov::{
    classify_states, validate_stochastic, ChainError, RatMatrix, TransitionMatrix,
};
use crate::rational::Rational;

/// An absorbing chain reordered so that absorbing states come first:
///
/// ```text
/// A* = [ I 0 ]
///      [ R Q ]
/// ```
///
/// `Q` is transient-to-transient, `R` is transient-to-absorbing. The
/// fundamental matrix `N = (I - Q)^-1` is computed on first use and cached.
#[derive(Debug)]
pub struct CanonicalChain {
    /// canonical position -> original index
    order: Vec<usize>,
    absorbing_count: usize,
    a_star: TransitionMatrix,
    q_block: RatMatrix,
    r_block: RatMatrix,
    fundamental: OnceLock<Result<RatMatrix, ChainError>>,
}

impl Clone for CanonicalChain {
    fn clone(&self) -> Self {
        let fundamental = OnceLock::new();
        if let Some(n) = self.fundamental.get() {
            let _ = fundamental.set(n.clone());
        }
        CanonicalChain {
            order: self.order.clone(),
            absorbing_count: self.absorbing_count,
            a_star: self.a_star.clone(),
            q_block: self.q_block.clone(),
            r_block: self.r_block.clone(),
            fundamental,
        }
    }
}

impl CanonicalChain {
    /// Partitions `m` into the canonical block form without checking that
    /// every transient state can reach absorption. For such chains `I - Q`
    /// is singular and [`fundamental_matrix`] reports it.
    pub fn partition(m: &TransitionMatrix) -> Result<Self, ChainError> {
        let n = m.len();
        let (absorbing, transient): (Vec<usize>, Vec<usize>) =
            (0..n).partition(|&i| m.prob(i, i).is_one());
        if absorbing.is_empty() {
            return Err(ChainError::NotAbsorbingChain);
        }
        if transient.is_empty() {
            return Err(ChainError::NoTransientStates);
        }
        let absorbing_count = absorbing.len();
        let order: Vec<usize> = absorbing.into_iter().chain(transient).collect();

        let labels = order.iter().map(|&i| m.states()[i].clone()).collect();
        let rows = order
            .iter()
            .map(|&i| order.iter().map(|&j| m.prob(i, j).clone()).collect())
            .collect();
        let a_star = validate_stochastic(labels, rows)?;

        let t = n - absorbing_count;
        let q_block = RatMatrix::from_fn(t, t, |i, j| {
            a_star
                .prob(absorbing_count + i, absorbing_count + j)
                .clone()
        });
        let r_block = RatMatrix::from_fn(t, absorbing_count, |i, j| {
            a_star.prob(absorbing_count + i, j).clone()
        });

        Ok(CanonicalChain {
            order,
            absorbing_count,
            a_star,
            q_block,
            r_block,
            fundamental: OnceLock::new(),
        })
    }

    /// Canonical position -> original state index.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Original state index -> canonical position.
    pub fn permutation(&self) -> Vec<usize> {
        let mut perm = vec![0; self.order.len()];
        for (canonical, &original) in self.order.iter().enumerate() {
            perm[original] = canonical;
        }
        perm
    }

    pub fn a_star(&self) -> &TransitionMatrix {
        &self.a_star
    }

    pub fn q_block(&self) -> &RatMatrix {
        &self.q_block
    }

    pub fn r_block(&self) -> &RatMatrix {
        &self.r_block
    }

    pub fn absorbing_labels(&self) -> &[String] {
        &self.a_star.states()[..self.absorbing_count]
    }

    pub fn transient_labels(&self) -> &[String] {
        &self.a_star.states()[self.absorbing_count..]
    }

    /// `N = (I - Q)^-1`, computed at most once.
    pub fn fundamental(&self) -> Result<&RatMatrix, ChainError> {
        self.fundamental
            .get_or_init(|| fundamental_from_q(&self.q_block))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Mean number of phases before absorption starting from transient
    /// state `label`.
    pub fn expected_steps_from(&self, label: &str) -> Result<Rational, ChainError> {
        let idx = self
            .transient_labels()
            .iter()
            .position(|s| s == label)
            .ok_or_else(|| ChainError::UnknownState(label.to_string()))?;
        Ok(self.fundamental()?.row(idx).iter().sum())
    }

    /// Undoes the reordering, giving back the original matrix.
    pub fn unpermute(&self) -> TransitionMatrix {
        let perm = self.permutation();
        let n = perm.len();
        let mut labels = vec![String::new(); n];
        for (original, &canonical) in perm.iter().enumerate() {
            labels[original] = self.a_star.states()[canonical].clone();
        }
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.a_star.prob(perm[i], perm[j]).clone())
                    .collect()
            })
            .collect();
        validate_stochastic(labels, rows).expect("permutation preserves stochasticity")
    }
}

/// Canonical form of an absorbing chain: absorbing states first, each group
/// keeping its original relative order.
pub fn canonical_form(m: &TransitionMatrix) -> Result<CanonicalChain, ChainError> {
    let class = classify_states(m);
    if !class.is_absorbing_chain {
        return Err(ChainError::NotAbsorbingChain);
    }
    if class.transient.is_empty() {
        return Err(ChainError::NoTransientStates);
    }
    CanonicalChain::partition(m)
}

/// `(I - Q)^-1` by exact elimination.
pub fn fundamental_from_q(q: &RatMatrix) -> Result<RatMatrix, ChainError> {
    RatMatrix::identity(q.rows()).sub(q).inverse()
}

pub fn fundamental_matrix(c: &CanonicalChain) -> Result<RatMatrix, ChainError> {
    c.fundamental().cloned()
}

/// Row sums of `N`, one per transient state in canonical order.
pub fn expected_absorption_steps(c: &CanonicalChain) -> Result<Vec<Rational>, ChainError> {
    Ok(c.fundamental()?.row_sums())
}

/// `B = N R`: probability of ending in each absorbing state (columns) from
/// each transient state (rows).
pub fn absorption_probabilities(c: &CanonicalChain) -> Result<RatMatrix, ChainError> {
    Ok(c.fundamental()?.mul(&c.r_block))
}
