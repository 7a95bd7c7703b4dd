//! Worked examples: the cyclic three-symbol channel, its extension to larger
//! alphabets, and the hand-built BAC semimetrics shipped under `data/`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::io::{parse_channel, parse_distance};
use crate::model::{Alphabet, Channel, DistanceMatrix, SquareMatrix};
use crate::rational::{int, Rational};

pub const THREE_CYCLE_CHANNEL: &str = include_str!("../data/three_cycle_channel.txt");
pub const BAC2_SEMIMETRIC: &str = include_str!("../data/bac2_semimetric.txt");
pub const BAC3_RULE_A_SEMIMETRIC: &str = include_str!("../data/bac3_rule_a_semimetric.txt");
pub const BAC3_RULE_B_SEMIMETRIC: &str = include_str!("../data/bac3_rule_b_semimetric.txt");

/// The cyclic channel with `a = 1/2, b = 1/3, c = 1/6`.
pub fn three_cycle_channel() -> Channel {
    parse_channel(THREE_CYCLE_CHANNEL).expect("bundled fixture parses")
}

fn cyclic_block(a: &Rational, b: &Rational, c: &Rational) -> [[Rational; 3]; 3] {
    [
        [a.clone(), b.clone(), c.clone()],
        [c.clone(), a.clone(), b.clone()],
        [b.clone(), c.clone(), a.clone()],
    ]
}

/// The cyclic three-symbol channel for any `a > b > c > 0`, `a + b + c = 1`.
pub fn cyclic_channel(a: &Rational, b: &Rational, c: &Rational) -> Result<Channel> {
    if !(a > b && b > c && c.is_positive()) || !(a + b + c).is_one() {
        return Err(Error::OutOfRange(format!(
            "need a > b > c > 0 with a + b + c = 1, got {a}, {b}, {c}"
        )));
    }
    let block = cyclic_block(a, b, c);
    Channel::new(Alphabet::new(3)?, SquareMatrix::from_fn(3, |u, v| block[u][v].clone()))
}

/// The cyclic channel on `{0, 1, 2}` extended by `extra` symbols.
///
/// With `a > b > c > d > 0` summing to one: inside the first three symbols
/// the cyclic block; from a first-three symbol each extra symbol is received
/// with probability `d / extra`; an extra symbol is received as itself with
/// probability `a` and as each other extra symbol with `(1 - a) / (extra - 1)`;
/// extra symbols never reach the first three.
///
/// `extra = 1` is rejected: the lone extra column would sum to `a`.
pub fn cyclic_extension_channel(
    a: &Rational,
    b: &Rational,
    c: &Rational,
    d: &Rational,
    extra: usize,
) -> Result<Channel> {
    if !(a > b && b > c && c > d && d.is_positive()) || !(a + b + c + d).is_one() {
        return Err(Error::OutOfRange(format!(
            "need a > b > c > d > 0 with a + b + c + d = 1, got {a}, {b}, {c}, {d}"
        )));
    }
    if extra < 2 {
        return Err(Error::OutOfRange(format!("need at least 2 extra symbols, got {extra}")));
    }
    let m = int(extra as i64);
    let block = cyclic_block(a, b, c);
    let to_extra = d / &m;
    let spread = (Rational::one() - a) / (&m - Rational::one());
    let matrix = SquareMatrix::from_fn(3 + extra, |u, v| match (u < 3, v < 3) {
        (true, true) => block[u][v].clone(),
        (true, false) => Rational::zero(),
        (false, true) => to_extra.clone(),
        (false, false) if u == v => a.clone(),
        (false, false) => spread.clone(),
    });
    Channel::new(Alphabet::new(3 + extra)?, matrix)
}

pub fn bac2_semimetric() -> DistanceMatrix {
    parse_distance(BAC2_SEMIMETRIC).expect("bundled fixture parses")
}

pub fn bac3_rule_a_semimetric() -> DistanceMatrix {
    parse_distance(BAC3_RULE_A_SEMIMETRIC).expect("bundled fixture parses")
}

pub fn bac3_rule_b_semimetric() -> DistanceMatrix {
    parse_distance(BAC3_RULE_B_SEMIMETRIC).expect("bundled fixture parses")
}
