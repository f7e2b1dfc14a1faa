mod common;

use cbr_markov::cbr::{cbr_transition_matrix, mean_phases, phase_distribution, CbrParameters};
use cbr_markov::library::{
    episode_efficiency, flat_efficiency, system_efficiency, CaseLibrary, CaseRecord,
    GeneralizedEpisode,
};
use cbr_markov::markov::{
    absorption_probabilities, canonical_form, classify_states, evolve, expected_absorption_steps,
    fundamental_matrix, step_distribution, ProbabilityVector, RatMatrix, TransitionMatrix,
};
use cbr_markov::{ratio, Rational};
use common::{closed_form_t, r, symbolic_phase};
use proptest::prelude::*;

fn normalise(weights: Vec<u32>) -> Vec<Rational> {
    let total: u32 = weights.iter().sum();
    weights
        .into_iter()
        .map(|w| ratio(w as i64, total as i64))
        .collect()
}

fn weight_row(n: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..6, n).prop_filter("row needs mass", |w| w.iter().any(|&x| x > 0))
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("S{i}")).collect()
}

fn stochastic_matrix() -> impl Strategy<Value = TransitionMatrix> {
    (1usize..=5).prop_flat_map(|n| {
        prop::collection::vec(weight_row(n), n).prop_map(move |rows| {
            TransitionMatrix::new(labels(n), rows.into_iter().map(normalise).collect()).unwrap()
        })
    })
}

/// Matrices with some states forced absorbing, kept only if every other
/// state can reach one of them.
fn absorbing_chain() -> impl Strategy<Value = TransitionMatrix> {
    (2usize..=5)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(weight_row(n), n),
                prop::collection::vec(any::<bool>(), n),
            )
                .prop_map(move |(rows, absorbing)| {
                    let rows = rows
                        .into_iter()
                        .enumerate()
                        .map(|(i, w)| {
                            if absorbing[i] {
                                (0..n).map(|j| if i == j { r(1) } else { r(0) }).collect()
                            } else {
                                normalise(w)
                            }
                        })
                        .collect();
                    TransitionMatrix::new(labels(n), rows).unwrap()
                })
        })
        .prop_filter("absorbing chain with transients", |m| {
            let c = classify_states(m);
            c.is_absorbing_chain && !c.transient.is_empty()
        })
}

fn params() -> impl Strategy<Value = CbrParameters> {
    (1i64..=40, 1i64..=40).prop_flat_map(|(d1, d2)| {
        (0..=d1, 0..=d2).prop_map(move |(a, b)| {
            let budget = ratio(99, 100);
            let p31 = &budget * ratio(a, d1);
            let p33 = (budget - &p31) * ratio(b, d2);
            CbrParameters::from_return_and_stay(p31, p33).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn step_preserves_total_mass(m in stochastic_matrix(), seed_row in 0usize..5) {
        let start = m.states()[seed_row % m.len()].clone();
        let mut p = ProbabilityVector::point_mass(&m, &start).unwrap();
        for _ in 0..6 {
            p = step_distribution(&p, &m).unwrap();
            let total: Rational = p.probs().iter().sum();
            prop_assert!(total.is_one());
            prop_assert!(p.probs().iter().all(Rational::is_probability));
        }
    }

    #[test]
    fn fundamental_inverts_i_minus_q(m in absorbing_chain()) {
        let c = canonical_form(&m).unwrap();
        let n = fundamental_matrix(&c).unwrap();
        let i_minus_q = RatMatrix::identity(n.rows()).sub(c.q_block());
        prop_assert_eq!(n.mul(&i_minus_q), RatMatrix::identity(n.rows()));
        prop_assert_eq!(i_minus_q.mul(&n), RatMatrix::identity(n.rows()));
    }

    #[test]
    fn absorption_times_satisfy_first_step_equation(m in absorbing_chain()) {
        let c = canonical_form(&m).unwrap();
        let t = expected_absorption_steps(&c).unwrap();
        let q = c.q_block();
        for i in 0..t.len() {
            prop_assert!(t[i].is_positive());
            let rhs = Rational::one() + (0..t.len()).map(|j| &q[(i, j)] * &t[j]).sum::<Rational>();
            prop_assert_eq!(&t[i], &rhs);
        }
    }

    #[test]
    fn absorption_probability_rows_sum_to_one(m in absorbing_chain()) {
        let c = canonical_form(&m).unwrap();
        let b = absorption_probabilities(&c).unwrap();
        for row in b.row_sums() {
            prop_assert!(row.is_one());
        }
    }

    #[test]
    fn canonical_form_round_trips(m in absorbing_chain()) {
        let c = canonical_form(&m).unwrap();
        prop_assert_eq!(c.unpermute(), m.clone());
        let abs = c.absorbing_labels().len();
        for i in 0..abs {
            for j in 0..m.len() {
                let expected = if i == j { r(1) } else { r(0) };
                prop_assert_eq!(c.a_star().prob(i, j), &expected);
            }
        }
    }

    #[test]
    fn cumulative_absorption_is_monotone(p in params(), phases in 12usize..30) {
        let m = cbr_transition_matrix(&p);
        let start = ProbabilityVector::point_mass(&m, "R1").unwrap();
        let path = evolve(&start, &m, phases).unwrap();
        let absorbed: Vec<&Rational> = path.iter().map(|v| v.prob_of("R4").unwrap()).collect();
        for w in absorbed.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        // Every three phases some mass must pass through Revise into Retain.
        for k in 0..absorbed.len() - 3 {
            prop_assert!(absorbed[k] < absorbed[k + 3] || absorbed[k].is_one());
        }
        prop_assert!(absorbed.last().unwrap() <= &&Rational::one());
    }

    #[test]
    fn closed_form_matches_generic_engine(p in params()) {
        let c = canonical_form(&cbr_transition_matrix(&p)).unwrap();
        let generic = c.expected_steps_from("R1").unwrap();
        prop_assert_eq!(mean_phases(&p).unwrap(), generic.clone());
        prop_assert_eq!(generic, closed_form_t(&p));
    }

    #[test]
    fn mean_phases_lower_bound(p in params()) {
        let t = mean_phases(&p).unwrap();
        prop_assert!(t >= r(3));
        prop_assert_eq!(t == r(3), p.p31().is_zero() && p.p33().is_zero());
    }

    #[test]
    fn phase_distribution_matches_symbolic_forms(p in params()) {
        let m = cbr_transition_matrix(&p);
        let start = ProbabilityVector::point_mass(&m, "R1").unwrap();
        let path = evolve(&start, &m, 5).unwrap();
        for (i, evolved) in path.iter().enumerate() {
            let pi = phase_distribution(&p, i);
            prop_assert_eq!(&pi, evolved);
            prop_assert_eq!(pi.probs(), &symbolic_phase(&p, i)[..]);
        }
    }
}

fn direct(id: &str, t: &Rational) -> CaseRecord {
    CaseRecord::direct(id, t.clone()).unwrap()
}

fn measure() -> impl Strategy<Value = Rational> {
    (3i64..40, 1i64..7).prop_map(|(n, d)| ratio(n * d + (n % d), d).max(r(3)))
}

proptest! {
    #[test]
    fn efficiencies_ignore_ordering(ts in prop::collection::vec(measure(), 1..12), split in 0usize..12) {
        let cases: Vec<_> = ts.iter().enumerate().map(|(i, t)| direct(&format!("c{i}"), t)).collect();
        let k = split % cases.len();
        let lib = CaseLibrary::new(vec![
            GeneralizedEpisode::new("a").with_cases(cases[..k].iter().cloned()),
            GeneralizedEpisode::new("b").with_cases(cases[k..].iter().cloned()),
        ]).unwrap();
        let mut reversed_cases = cases.clone();
        reversed_cases.reverse();
        let reversed = CaseLibrary::new(vec![
            GeneralizedEpisode::new("b").with_cases(cases[k..].iter().rev().cloned()),
            GeneralizedEpisode::new("a").with_cases(cases[..k].iter().rev().cloned()),
        ]).unwrap();
        prop_assert_eq!(flat_efficiency(&lib).unwrap(), flat_efficiency(&reversed).unwrap());
        if k > 0 {
            prop_assert_eq!(system_efficiency(&lib).unwrap(), system_efficiency(&reversed).unwrap());
        }
        let one = GeneralizedEpisode::new("one").with_cases(cases.iter().cloned());
        let one_rev = GeneralizedEpisode::new("one").with_cases(reversed_cases);
        prop_assert_eq!(episode_efficiency(&one).unwrap(), episode_efficiency(&one_rev).unwrap());
    }

    #[test]
    fn efficiency_bounds_and_single_episode(ts in prop::collection::vec(measure(), 1..12)) {
        let cases: Vec<_> = ts.iter().enumerate().map(|(i, t)| direct(&format!("c{i}"), t)).collect();
        let lib = CaseLibrary::new(vec![GeneralizedEpisode::new("only").with_cases(cases)]).unwrap();
        let flat = flat_efficiency(&lib).unwrap();
        prop_assert!(flat >= r(3));
        prop_assert_eq!(system_efficiency(&lib).unwrap(), flat);
    }

    #[test]
    fn constant_measures(c in measure(), n in 1usize..10) {
        let cases: Vec<_> = (0..n).map(|i| direct(&format!("c{i}"), &c)).collect();
        let ge = GeneralizedEpisode::new("g").with_cases(cases[..n / 2].iter().cloned())
            .with_sub_episode(GeneralizedEpisode::new("h").with_cases(cases[n / 2..].iter().cloned()));
        let lib = CaseLibrary::new(vec![ge.clone()]).unwrap();
        prop_assert_eq!(&episode_efficiency(&ge).unwrap(), &c);
        prop_assert_eq!(&flat_efficiency(&lib).unwrap(), &c);
        prop_assert_eq!(&system_efficiency(&lib).unwrap(), &c);
    }

    #[test]
    fn adding_a_better_case_lowers_flat_efficiency(ts in prop::collection::vec(measure(), 1..12), new in measure()) {
        let cases: Vec<_> = ts.iter().enumerate().map(|(i, t)| direct(&format!("c{i}"), t)).collect();
        let before = flat_efficiency(&CaseLibrary::new(vec![GeneralizedEpisode::new("g").with_cases(cases.clone())]).unwrap()).unwrap();
        prop_assume!(new < before);
        let mut grown = cases;
        grown.push(direct("new", &new));
        let after = flat_efficiency(&CaseLibrary::new(vec![GeneralizedEpisode::new("g").with_cases(grown)]).unwrap()).unwrap();
        prop_assert!(after < before);
    }
}
