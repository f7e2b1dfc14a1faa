//! Independent oracles shared by the integration tests. Nothing here calls
//! into the elimination, evolution or estimation code it is used to check.
#![allow(dead_code)]

use std::path::PathBuf;

use cbr_markov::{ratio, CbrParameters, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn r(n: i64) -> Rational {
    Rational::from_integer(n)
}

pub type Mat3 = [[Rational; 3]; 3];

fn det2(a: &Rational, b: &Rational, c: &Rational, d: &Rational) -> Rational {
    a * d - b * c
}

/// 3x3 inverse by cofactor expansion: `adj(M) / det(M)`.
pub fn adjugate_inverse(m: &Mat3) -> Option<Mat3> {
    let minor = |i: usize, j: usize| {
        let rows: Vec<usize> = (0..3).filter(|&x| x != i).collect();
        let cols: Vec<usize> = (0..3).filter(|&x| x != j).collect();
        det2(
            &m[rows[0]][cols[0]],
            &m[rows[0]][cols[1]],
            &m[rows[1]][cols[0]],
            &m[rows[1]][cols[1]],
        )
    };
    let cofactor = |i: usize, j: usize| {
        let c = minor(i, j);
        if (i + j).is_multiple_of(2) {
            c
        } else {
            -c
        }
    };
    let det = (0..3).map(|j| &m[0][j] * cofactor(0, j)).sum::<Rational>();
    if det.is_zero() {
        return None;
    }
    // adj(M)[i][j] = cofactor(j, i)
    Some(std::array::from_fn(|i| {
        std::array::from_fn(|j| cofactor(j, i) / &det)
    }))
}

/// `I - Q` for the transient block of the CBR chain, written out by hand.
pub fn cbr_i_minus_q(p: &CbrParameters) -> Mat3 {
    [
        [r(1), r(-1), r(0)],
        [r(0), r(1), r(-1)],
        [-p.p31(), r(0), Rational::one() - p.p33()],
    ]
}

/// Closed-form fundamental matrix with the (2,1) entry as `+p31`.
pub fn closed_form_fundamental(p: &CbrParameters) -> Mat3 {
    let d = Rational::one() - p.p31() - p.p33();
    let s = Rational::one() - p.p33();
    let raw = [
        [s.clone(), s.clone(), r(1)],
        [p.p31().clone(), s, r(1)],
        [p.p31().clone(), p.p31().clone(), r(1)],
    ];
    raw.map(|row| row.map(|x| x / &d))
}

pub fn closed_form_t(p: &CbrParameters) -> Rational {
    (r(3) - r(2) * p.p33()) / (Rational::one() - p.p31() - p.p33())
}

/// Symbolic phase vectors P0..P5 evaluated at `p`; P5's third entry is
/// `p31 + p33^3`.
pub fn symbolic_phase(p: &CbrParameters, i: usize) -> [Rational; 4] {
    let (a, s, e) = (p.p31(), p.p33(), p.p34());
    match i {
        0 => [r(1), r(0), r(0), r(0)],
        1 => [r(0), r(1), r(0), r(0)],
        2 => [r(0), r(0), r(1), r(0)],
        3 => [a.clone(), r(0), s.clone(), e.clone()],
        4 => [s * a, a.clone(), s.pow(2), e * (s + r(1))],
        5 => [s.pow(2) * a, s * a, a + s.pow(3), e * (s.pow(2) + s + r(1))],
        _ => panic!("no symbolic form for phase {i}"),
    }
}

/// Random valid parameters with `p34 >= 1/100`.
pub fn random_params(rng: &mut impl Rng) -> CbrParameters {
    let d1: i64 = rng.random_range(1..=60);
    let d2: i64 = rng.random_range(1..=60);
    let x = ratio(rng.random_range(0..=d1), d1);
    let y = ratio(rng.random_range(0..=d2), d2);
    let budget = ratio(99, 100);
    let p31 = &budget * x;
    let p33 = (budget - &p31) * y;
    CbrParameters::from_return_and_stay(p31, p33).expect("constructed inside the simplex")
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
