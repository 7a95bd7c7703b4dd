//! Matched channel/metric pairs on finite alphabets.
//!
//! A channel `W` and a distance `d` on the same alphabet are *matched* when
//! maximum-likelihood decoding on `W` and nearest-neighbour decoding under
//! `d` pick the same codewords for every code and every received word. This
//! crate decides that relation exactly, builds matched pairs (a channel from
//! any metric, a metric for the n-fold Z-channel), refutes it with decision
//! chains and constraint-cycle certificates, and searches for a matched
//! metric of an arbitrary channel.
//!
//! All arithmetic is over arbitrary-precision rationals: matchedness is a
//! statement about strict inequalities and ties, which floating point can
//! silently get wrong.

pub mod cli;
pub mod constructions;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod matching;
pub mod model;
pub mod par;
pub mod rational;
pub mod solver;

pub use error::{Error, Result};
pub use model::{Alphabet, Channel, Code, DistanceKind, DistanceMatrix, ReverseKernel, SquareMatrix};
pub use par::Execution;
pub use rational::Rational;
