//! Weighted set cover instances.

use serde::{Deserialize, Serialize};

use crate::covering::{CoveringProblem, Increment, Request, Solution};
use crate::error::{Error, Result};
use crate::money::{Cost, Money};

/// A weighted set cover instance: `n` elements, `m` sets with costs.
///
/// Sets are stored as sorted, deduplicated element-id lists. Elements no set
/// covers are permitted in hand-built instances (their augmentation cost is
/// infinite) but are rejected when loading from a file.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SetCoverInstance {
    /// Universe size (elements are `0..n`).
    n: usize,
    /// Number of sets.
    m: usize,
    /// Element ids per set, sorted ascending.
    sets: Vec<Vec<usize>>,
    /// Per-set costs, parallel to `sets`.
    costs: Vec<Money>,
}

impl SetCoverInstance {
    /// Build and validate an instance. Sets are sorted and deduplicated.
    /// Elements covered by no set are allowed here; [`crate::instances::io::load_instance`]
    /// rejects them.
    pub fn new(n: usize, sets: Vec<Vec<usize>>, costs: Vec<Money>) -> Result<SetCoverInstance> {
        let m = sets.len();
        let mut instance = SetCoverInstance { n, m, sets, costs };
        instance.validate(false)?;
        Ok(instance)
    }

    pub(crate) fn validate(&mut self, reject_uncoverable: bool) -> Result<()> {
        if self.sets.len() != self.m {
            return Err(Error::InvalidInstance(format!(
                "declared m={} but {} sets present",
                self.m,
                self.sets.len()
            )));
        }
        if self.costs.len() != self.m {
            return Err(Error::InvalidInstance(format!(
                "{} sets but {} costs",
                self.m,
                self.costs.len()
            )));
        }
        for (j, set) in self.sets.iter_mut().enumerate() {
            set.sort_unstable();
            set.dedup();
            if let Some(&e) = set.last() {
                if e >= self.n {
                    return Err(Error::InvalidInstance(format!(
                        "set {j} contains element {e}, universe size is {}",
                        self.n
                    )));
                }
            }
        }
        if reject_uncoverable {
            let uncovered = self.uncoverable_elements();
            if !uncovered.is_empty() {
                return Err(Error::InvalidInstance(format!(
                    "elements covered by no set: {uncovered:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn num_elements(&self) -> usize {
        self.n
    }

    pub fn num_sets(&self) -> usize {
        self.m
    }

    pub fn set(&self, j: usize) -> &[usize] {
        &self.sets[j]
    }

    pub fn cost(&self, j: usize) -> Money {
        self.costs[j]
    }

    pub fn costs(&self) -> &[Money] {
        &self.costs
    }

    /// Does set `j` contain element `e`?
    pub fn contains(&self, j: usize, e: usize) -> bool {
        self.sets[j].binary_search(&e).is_ok()
    }

    /// Ids of the sets containing element `e`, ascending.
    pub fn covering_sets(&self, e: usize) -> Vec<usize> {
        (0..self.m).filter(|&j| self.contains(j, e)).collect()
    }

    /// Elements no set covers (empty for fully coverable instances).
    pub fn uncoverable_elements(&self) -> Vec<usize> {
        let mut covered = vec![false; self.n];
        for set in &self.sets {
            for &e in set {
                covered[e] = true;
            }
        }
        covered
            .iter()
            .enumerate()
            .filter(|&(_, &c)| !c)
            .map(|(e, _)| e)
            .collect()
    }

    /// True when every set costs exactly one unit.
    pub fn has_unit_costs(&self) -> bool {
        self.costs.iter().all(|&c| c == Money::from_units(1))
    }

    fn element_of(&self, request: Request) -> Result<usize> {
        match request {
            Request::Element(e) if e < self.n => Ok(e),
            Request::Element(e) => Err(Error::Dimension(format!(
                "element {e} out of range (universe size {})",
                self.n
            ))),
            other => Err(Error::Dimension(format!(
                "set cover instance cannot serve {other}"
            ))),
        }
    }
}

impl CoveringProblem for SetCoverInstance {
    fn num_coords(&self) -> usize {
        self.m
    }

    fn coord_cost(&self, coord: usize) -> Cost {
        Cost::Finite(self.costs[coord])
    }

    fn request_universe(&self) -> Vec<Request> {
        (0..self.n).map(Request::Element).collect()
    }

    fn validate_request(&self, request: Request) -> Result<()> {
        self.element_of(request).map(|_| ())
    }

    fn satisfied(&self, z: &Solution, request: Request) -> Result<bool> {
        self.check_dims(z)?;
        let e = self.element_of(request)?;
        Ok((0..self.m).any(|j| z.level(j) >= 1 && self.contains(j, e)))
    }

    fn augmentation_cost(&self, request: Request, z: &Solution, _context: &[Request]) -> Result<Cost> {
        if self.satisfied(z, request)? {
            return Ok(Cost::ZERO);
        }
        let e = self.element_of(request)?;
        let cheapest = (0..self.m)
            .filter(|&j| self.contains(j, e))
            .map(|j| self.costs[j])
            .min();
        Ok(cheapest.map_or(Cost::Infinite, Cost::Finite))
    }

    fn backup(&self, request: Request, z: &Solution, _context: &[Request]) -> Result<Increment> {
        if self.satisfied(z, request)? {
            return Ok(Increment::empty());
        }
        let e = self.element_of(request)?;
        // Cheapest covering set; ties resolved toward the lowest set id.
        let best = (0..self.m)
            .filter(|&j| self.contains(j, e))
            .min_by_key(|&j| (self.costs[j], j));
        match best {
            Some(j) => Ok(Increment::new(vec![(j, 1)])),
            None => Err(Error::NoAugmentation),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Three sets over elements {a=0, b=1, c=2}: S0={a,b} cost 2, S1={b,c}
    /// cost 2, S2={c} cost 1. Exercised throughout the augmentation tests.
    pub(crate) fn abc_instance() -> SetCoverInstance {
        SetCoverInstance::new(
            3,
            vec![vec![0, 1], vec![1, 2], vec![2]],
            vec![Money::from_units(2), Money::from_units(2), Money::from_units(1)],
        )
        .unwrap()
    }

    #[test]
    fn feasibility_matches_coverage() {
        let inst = abc_instance();
        let mut z = Solution::new(3);
        let all: Vec<Request> = inst.request_universe();
        assert!(!inst.is_feasible(&z, &all).unwrap());
        z.raise_to(0, 1, inst.cost(0));
        assert!(inst.satisfied(&z, Request::Element(0)).unwrap());
        assert!(inst.satisfied(&z, Request::Element(1)).unwrap());
        assert!(!inst.satisfied(&z, Request::Element(2)).unwrap());
        z.raise_to(2, 1, inst.cost(2));
        assert!(inst.is_feasible(&z, &all).unwrap());
    }

    #[test]
    fn single_request_augmentation_values() {
        let inst = abc_instance();
        let z = Solution::new(3);
        // Cheapest way to cover c alone is S2 at cost 1.
        assert_eq!(
            inst.augmentation_cost(Request::Element(2), &z, &[]).unwrap(),
            Cost::Finite(Money::from_units(1))
        );
        // Covering a requires S0 at cost 2.
        assert_eq!(
            inst.augmentation_cost(Request::Element(0), &z, &[]).unwrap(),
            Cost::Finite(Money::from_units(2))
        );
        let mut z1 = Solution::new(3);
        z1.raise_to(0, 1, inst.cost(0));
        // With S0 bought, covering c still costs 1 (S2), and the backup buys S2.
        assert_eq!(
            inst.augmentation_cost(Request::Element(2), &z1, &[]).unwrap(),
            Cost::Finite(Money::from_units(1))
        );
        let w = inst.backup(Request::Element(2), &z1, &[]).unwrap();
        assert_eq!(w.raises(), &[(2, 1)]);
        // Already-satisfied requests augment for free with an empty witness.
        assert_eq!(
            inst.augmentation_cost(Request::Element(1), &z1, &[]).unwrap(),
            Cost::ZERO
        );
        assert!(inst.backup(Request::Element(1), &z1, &[]).unwrap().is_empty());
    }

    #[test]
    fn uncovered_element_augments_to_infinity() {
        let inst = SetCoverInstance::new(2, vec![vec![0]], vec![Money::from_units(1)]).unwrap();
        let z = Solution::new(1);
        assert_eq!(
            inst.augmentation_cost(Request::Element(1), &z, &[]).unwrap(),
            Cost::Infinite
        );
        assert!(matches!(
            inst.backup(Request::Element(1), &z, &[]),
            Err(Error::NoAugmentation)
        ));
        assert_eq!(inst.uncoverable_elements(), vec![1]);
    }

    #[test]
    fn backup_ties_break_toward_lowest_set_id() {
        // Two sets of equal cost both cover element 0; the backup must pick set 0.
        let inst = SetCoverInstance::new(
            1,
            vec![vec![0], vec![0]],
            vec![Money::from_units(3), Money::from_units(3)],
        )
        .unwrap();
        let w = inst.backup(Request::Element(0), &Solution::new(2), &[]).unwrap();
        assert_eq!(w.raises(), &[(0, 1)]);
    }

    #[test]
    fn rejects_out_of_range_elements() {
        assert!(SetCoverInstance::new(2, vec![vec![0, 5]], vec![Money::from_units(1)]).is_err());
        let inst = abc_instance();
        assert!(inst.validate_request(Request::Element(3)).is_err());
        assert!(inst.validate_request(Request::Row(0)).is_err());
    }
}
