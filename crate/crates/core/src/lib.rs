//! Values and pure-strategy optimal equilibria of multi-player competitive
//! Dynkin games.
//!
//! Each of `m` players either exercises for a fixed payoff `X_k` or waits for
//! the terminal payoff `P_k`, adjusted by a share `w_k(E)` of the difference
//! caused by the exercising set `E`. With weights generated by positive
//! `a_k` summing to at most one, the game has a unique value: the projection
//! of `P` onto the orthant `{x : x >= X}` under a weighted inner product.
//!
//! Modules:
//! - [`game`]: weights, single-period payoffs and subgame reduction.
//! - [`geometry`]: the weighted inner product and the hyperplane/orthant
//!   projections that produce the value.
//! - [`solver`]: deterministic, stochastic and quitting game solvers.
//! - [`stopping`]: multi-period stopping games on finite event trees.
//! - [`oracle`]: brute-force equilibrium enumeration used to check all of
//!   the above.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
pub mod game;
pub mod geometry;
pub mod oracle;
mod set;
pub mod solver;
pub mod stopping;
mod tolerance;

pub use error::{Error, Result};
pub use game::{PayoffVector, Regime, SinglePeriodGame, WeightSource, WeightSystem};
pub use set::{ExerciseSet, StrategyProfile, MAX_PLAYERS};
pub use tolerance::Tolerance;
