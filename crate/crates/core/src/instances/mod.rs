//! Concrete problem instances: weighted set cover, set multicover, facility
//! location — plus request distributions, random generators, hand-built
//! fixtures, and JSON persistence.
//!
//! Each instance type implements [`CoveringProblem`](crate::covering::CoveringProblem)
//! so the algorithms, reductions and oracles can treat them uniformly. The
//! [`Instance`] enum is the serialized form: a `"type"`-tagged JSON object (see
//! [`io`]).

mod distribution;
mod fixtures;
mod fl;
mod generate;
pub mod io;
mod set_cover;
mod smc;

pub use distribution::DiscreteDistribution;
pub use fixtures::{counterexample_fixture, sequence_cover_fixture, CounterexampleFixture};
pub use fl::FlInstance;
pub use generate::{gen_random_fl, gen_random_setcover, gen_random_smc, FlCostModel};
pub use set_cover::SetCoverInstance;
pub use smc::SmcInstance;

use serde::{Deserialize, Serialize};

use crate::covering::{CoveringProblem, Increment, Request, Solution};
use crate::error::Result;
use crate::money::Cost;

/// Any of the three instance kinds, as serialized to/from JSON.
///
/// The JSON form is an object tagged by `"type"` (`"set_cover"`, `"smc"`,
/// `"fl"`) with the instance's fields inline. Infinite connection costs
/// serialize as the literal string `"inf"`.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Instance {
    SetCover(SetCoverInstance),
    Smc(SmcInstance),
    Fl(FlInstance),
}

impl Instance {
    /// Short kind label (used in reports).
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::SetCover(_) => "set_cover",
            Instance::Smc(_) => "smc",
            Instance::Fl(_) => "fl",
        }
    }

    /// Number of requests the instance can emit (elements / rows / clients).
    pub fn num_requests(&self) -> usize {
        match self {
            Instance::SetCover(sc) => sc.num_elements(),
            Instance::Smc(smc) => smc.num_rows(),
            Instance::Fl(fl) => fl.num_clients(),
        }
    }

    /// Number of purchasable objects (sets / columns / facilities).
    pub fn num_objects(&self) -> usize {
        match self {
            Instance::SetCover(sc) => sc.num_sets(),
            Instance::Smc(smc) => smc.num_columns(),
            Instance::Fl(fl) => fl.num_facilities(),
        }
    }

    /// Re-run structural validation (used after deserialization), normalizing
    /// representation (sorted supports) on the way. With `reject_unservable`,
    /// instances containing requests that can never be satisfied are refused.
    pub fn validate(&mut self, reject_unservable: bool) -> Result<()> {
        match self {
            Instance::SetCover(sc) => sc.validate(reject_unservable),
            Instance::Smc(smc) => smc.validate(),
            Instance::Fl(fl) => fl.validate(reject_unservable),
        }
    }
}

impl CoveringProblem for Instance {
    fn num_coords(&self) -> usize {
        match self {
            Instance::SetCover(p) => p.num_coords(),
            Instance::Smc(p) => p.num_coords(),
            Instance::Fl(p) => p.num_coords(),
        }
    }

    fn coord_cost(&self, coord: usize) -> Cost {
        match self {
            Instance::SetCover(p) => p.coord_cost(coord),
            Instance::Smc(p) => p.coord_cost(coord),
            Instance::Fl(p) => p.coord_cost(coord),
        }
    }

    fn request_universe(&self) -> Vec<Request> {
        match self {
            Instance::SetCover(p) => p.request_universe(),
            Instance::Smc(p) => p.request_universe(),
            Instance::Fl(p) => p.request_universe(),
        }
    }

    fn validate_request(&self, request: Request) -> Result<()> {
        match self {
            Instance::SetCover(p) => p.validate_request(request),
            Instance::Smc(p) => p.validate_request(request),
            Instance::Fl(p) => p.validate_request(request),
        }
    }

    fn satisfied(&self, z: &Solution, request: Request) -> Result<bool> {
        match self {
            Instance::SetCover(p) => p.satisfied(z, request),
            Instance::Smc(p) => p.satisfied(z, request),
            Instance::Fl(p) => p.satisfied(z, request),
        }
    }

    fn is_feasible(&self, z: &Solution, requests: &[Request]) -> Result<bool> {
        match self {
            Instance::SetCover(p) => p.is_feasible(z, requests),
            Instance::Smc(p) => p.is_feasible(z, requests),
            Instance::Fl(p) => p.is_feasible(z, requests),
        }
    }

    fn augmentation_cost(&self, request: Request, z: &Solution, context: &[Request]) -> Result<Cost> {
        match self {
            Instance::SetCover(p) => p.augmentation_cost(request, z, context),
            Instance::Smc(p) => p.augmentation_cost(request, z, context),
            Instance::Fl(p) => p.augmentation_cost(request, z, context),
        }
    }

    fn backup(&self, request: Request, z: &Solution, context: &[Request]) -> Result<Increment> {
        match self {
            Instance::SetCover(p) => p.backup(request, z, context),
            Instance::Smc(p) => p.backup(request, z, context),
            Instance::Fl(p) => p.backup(request, z, context),
        }
    }
}
