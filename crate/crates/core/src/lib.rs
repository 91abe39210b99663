//! A laboratory for online covering under randomly ordered arrivals.
//!
//! The crate has three layers:
//!
//! 1. **Problems** ([`covering`], [`instances`]) — weighted set cover, unit-cost
//!    set multicover, and facility location, all presented as monotone covering
//!    programs with irrevocable integer solutions, exact fixed-point cost
//!    accounting ([`money`]), and JSON persistence.
//! 2. **Algorithms** ([`nmfl`], [`smc`], [`mfl`]) — multiplicative-weights
//!    "learn or cover" solvers for facility location and multicover in random
//!    order, plus the classic coin-flip algorithm for metric facility location —
//!    and **reductions** ([`reductions`]) that lift any random-order algorithm
//!    to sampled-prophet, two-stage, and sample-then-adversary arrival models
//!    via cheap per-request backup augmentations.
//! 3. **Ground truth** ([`oracles`], [`runner`], [`report`]) — exact
//!    branch-and-bound / subset-enumeration optima and greedy baselines for
//!    small instances, exact rational i.i.d. expectations, and a deterministic
//!    seeded trial runner producing CSV reports, so every competitive-ratio and
//!    invariant claim is empirically checkable.

// Matrix-shaped code (relay tables, connection grids, subset masks) reads
// better with explicit indices than with zipped iterators.
#![allow(clippy::needless_range_loop)]

pub mod covering;
pub mod error;
pub mod instances;
pub mod mfl;
pub mod money;
pub mod nmfl;
pub mod oracles;
pub mod reductions;
pub mod report;
pub mod rng;
pub mod runner;
pub mod smc;

pub use covering::{weighted_kl, CoveringProblem, Increment, Request, Solution};
pub use error::{Error, Result};
pub use instances::Instance;
pub use money::{Cost, Money};
