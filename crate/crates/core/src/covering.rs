//! Monotone covering problems with irrevocable, augmentable solutions.
//!
//! Everything in this crate — weighted set cover, set multicover, facility
//! location — is an integer program of the same shape: requests arrive one at a
//! time, each request adds covering constraints that are monotone in the decision
//! vector, and the solver may only *raise* coordinates, never retract them. This
//! module defines that shared shape:
//!
//! * [`Request`] — one online arrival (an element, a constraint row, or a client),
//!   referencing the instance by id;
//! * [`Solution`] — a monotonically growing integer vector with an exact running
//!   cost;
//! * [`Increment`] — a sparse coordinate raise, the witness returned by backup;
//! * [`CoveringProblem`] — feasibility, cheapest-augmentation cost, and the
//!   backup increment realizing it.
//!
//! The `context` parameter on [`CoveringProblem::augmentation_cost`] and
//! [`CoveringProblem::backup`] names the requests the current solution already
//! satisfies. For monotone covering constraints it is inert — once satisfied,
//! always satisfied under coordinate raises — but callers (the sampling
//! reductions) still pass it, and implementations may use it for validation.
//!
//! [`weighted_kl`] lives here too: it is the potential-function ingredient shared
//! by the learning algorithms' diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::money::{Cost, Money};

/// One online arrival, referencing the instance it belongs to by index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Request {
    /// A set-cover element that must be covered.
    Element(usize),
    /// A multicover constraint row that must be satisfied.
    Row(usize),
    /// A facility-location client that must be connected.
    Client(usize),
}

impl Request {
    /// The raw index into the instance's request space.
    pub fn index(self) -> usize {
        match self {
            Request::Element(i) | Request::Row(i) | Request::Client(i) => i,
        }
    }
}

impl std::fmt::Display for Request {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Request::Element(i) => write!(f, "element {i}"),
            Request::Row(i) => write!(f, "row {i}"),
            Request::Client(i) => write!(f, "client {i}"),
        }
    }
}

/// A sparse set of coordinate raises: `(coordinate, target level)`, sorted by
/// coordinate, levels ≥ 1. Applying an increment never lowers anything.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Increment {
    raises: Vec<(usize, u32)>,
}

impl Increment {
    pub fn empty() -> Increment {
        Increment { raises: Vec::new() }
    }

    /// Build from raises; sorts by coordinate and rejects duplicates/zero levels.
    pub fn new(mut raises: Vec<(usize, u32)>) -> Increment {
        raises.sort_unstable();
        debug_assert!(raises.windows(2).all(|w| w[0].0 != w[1].0), "duplicate coordinate");
        debug_assert!(raises.iter().all(|&(_, l)| l >= 1), "zero-level raise");
        Increment { raises }
    }

    pub fn is_empty(&self) -> bool {
        self.raises.is_empty()
    }

    pub fn raises(&self) -> &[(usize, u32)] {
        &self.raises
    }
}

/// A monotonically growing integer solution vector with exact cached cost.
///
/// The only mutators raise coordinates, so feasibility of anything already
/// satisfied is preserved for good. The cached cost is maintained exactly in
/// fixed-point money.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Solution {
    levels: Vec<u32>,
    cost: Money,
}

impl Solution {
    /// The all-zero solution over `num_coords` decision coordinates.
    pub fn new(num_coords: usize) -> Solution {
        Solution {
            levels: vec![0; num_coords],
            cost: Money::ZERO,
        }
    }

    pub fn num_coords(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, coord: usize) -> u32 {
        self.levels[coord]
    }

    /// Exact total cost `⟨c, z⟩` of everything bought so far.
    pub fn cost(&self) -> Money {
        self.cost
    }

    /// Nonzero coordinates with their levels.
    pub fn support(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.levels
            .iter()
            .enumerate()
            .filter(|&(_, &l)| l > 0)
            .map(|(c, &l)| (c, l))
    }

    /// True when `self ≤ other` coordinate-wise (used by monotonicity checks).
    pub fn dominated_by(&self, other: &Solution) -> bool {
        self.levels.len() == other.levels.len()
            && self.levels.iter().zip(&other.levels).all(|(a, b)| a <= b)
    }

    /// Raise one coordinate to at least `level`, paying `unit_cost` per unit
    /// raised. Returns the exact amount paid (zero if already at or above).
    pub fn raise_to(&mut self, coord: usize, level: u32, unit_cost: Money) -> Money {
        let cur = self.levels[coord];
        if level <= cur {
            return Money::ZERO;
        }
        let paid = unit_cost.scaled(level - cur);
        self.levels[coord] = level;
        self.cost += paid;
        paid
    }

    /// Coordinate-wise `z ← max(z, w)` against the problem's coordinate costs.
    /// Returns the exact amount paid for the raises actually performed.
    pub fn apply_max<P: CoveringProblem + ?Sized>(
        &mut self,
        increment: &Increment,
        problem: &P,
    ) -> Result<Money> {
        if self.levels.len() != problem.num_coords() {
            return Err(Error::Dimension(format!(
                "solution has {} coordinates, problem has {}",
                self.levels.len(),
                problem.num_coords()
            )));
        }
        let mut paid = Money::ZERO;
        for &(coord, level) in increment.raises() {
            if coord >= self.levels.len() {
                return Err(Error::Dimension(format!(
                    "increment coordinate {coord} out of range"
                )));
            }
            if level > self.levels[coord] {
                let unit = match problem.coord_cost(coord) {
                    Cost::Finite(m) => m,
                    Cost::Infinite => {
                        return Err(Error::Invariant(format!(
                            "increment raises unavailable coordinate {coord}"
                        )))
                    }
                };
                paid += self.raise_to(coord, level, unit);
            }
        }
        Ok(paid)
    }
}

/// A monotone covering problem over an integer decision vector.
///
/// Implementations fix a coordinate space (decision variables with per-unit
/// costs), a request space, and the covering semantics tying them together.
pub trait CoveringProblem {
    /// Number of decision coordinates.
    fn num_coords(&self) -> usize;

    /// Per-unit cost of a coordinate. `Infinite` marks a structurally
    /// unavailable coordinate (it may never be bought).
    fn coord_cost(&self, coord: usize) -> Cost;

    /// Every request this instance can emit, in the instance's natural order.
    fn request_universe(&self) -> Vec<Request>;

    /// Err if the request's kind or index does not belong to this instance.
    fn validate_request(&self, request: Request) -> Result<()>;

    /// Does `z` satisfy this single request's constraints?
    fn satisfied(&self, z: &Solution, request: Request) -> Result<bool>;

    /// Is `z` feasible for the whole request set (including any structural
    /// constraints that do not mention a specific request)?
    fn is_feasible(&self, z: &Solution, requests: &[Request]) -> Result<bool> {
        self.check_dims(z)?;
        for &r in requests {
            if !self.satisfied(z, r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Cheapest cost of raising `z` so the new request is also satisfied:
    /// `min { c(w) : max(w, z) feasible for context ∪ {request} }`, or
    /// `Infinite` when no raise can do it. The context is inert for monotone
    /// constraints but part of the call shape.
    fn augmentation_cost(
        &self,
        request: Request,
        z: &Solution,
        context: &[Request],
    ) -> Result<Cost>;

    /// The minimum-cost increment realizing [`Self::augmentation_cost`], with
    /// deterministic tie-breaking (lowest coordinate indices among minimizers).
    /// Err([`Error::NoAugmentation`]) when the cost is infinite.
    fn backup(&self, request: Request, z: &Solution, context: &[Request]) -> Result<Increment>;

    /// Dimension guard shared by implementations.
    fn check_dims(&self, z: &Solution) -> Result<()> {
        if z.num_coords() != self.num_coords() {
            Err(Error::Dimension(format!(
                "solution has {} coordinates, problem has {}",
                z.num_coords(),
                self.num_coords()
            )))
        } else {
            Ok(())
        }
    }
}

/// Weighted KL divergence between nonnegative vectors:
/// `Σ_i c_i · (x_i·ln(x_i/y_i) − x_i + y_i)`.
///
/// Conventions: a zero `x_i` term reduces to `c_i·y_i` (the `0·ln 0 = 0`
/// convention), and `x_i > 0` with `y_i = 0` is a domain error. Every summand
/// equals `c_i·y_i·φ(x_i/y_i)` with `φ(u) = u·ln u − u + 1 ≥ 0`, so the result
/// is nonnegative, and zero exactly when `x = y` wherever `c > 0`.
pub fn weighted_kl(c: &[f64], x: &[f64], y: &[f64]) -> Result<f64> {
    if c.len() != x.len() || x.len() != y.len() {
        return Err(Error::Dimension(format!(
            "weighted_kl lengths differ: c={}, x={}, y={}",
            c.len(),
            x.len(),
            y.len()
        )));
    }
    let mut total = 0.0;
    for i in 0..x.len() {
        let (ci, xi, yi) = (c[i], x[i], y[i]);
        if ci < 0.0 || xi < 0.0 || yi < 0.0 {
            return Err(Error::Invariant(format!(
                "weighted_kl requires nonnegative inputs, found c[{i}]={ci}, x[{i}]={xi}, y[{i}]={yi}"
            )));
        }
        let term = if xi == 0.0 {
            yi
        } else if yi == 0.0 {
            return Err(Error::KlDomain(i));
        } else {
            // Mathematically ≥ 0; clamp away negative rounding residue.
            (xi * (xi / yi).ln() - xi + yi).max(0.0)
        };
        total += ci * term;
    }
    Ok(total)
}
