//! Inputs shared by the benchmarks.

use cbr_markov::{ratio, Rational, TransitionMatrix};

/// Random walk on `0..=n` with absorbing ends and a 1/3 chance of staying put.
pub fn lazy_walk(n: usize) -> TransitionMatrix {
    let labels: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
    let rows = (0..=n)
        .map(|i| {
            (0..=n)
                .map(|j| {
                    if i == 0 || i == n {
                        if i == j {
                            Rational::one()
                        } else {
                            Rational::zero()
                        }
                    } else if j + 1 == i || j == i + 1 || j == i {
                        ratio(1, 3)
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    TransitionMatrix::new(labels, rows).expect("rows are stochastic")
}
