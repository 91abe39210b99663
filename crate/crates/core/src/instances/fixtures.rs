//! Hand-built fixtures separating the per-slot-distribution model from the
//! averaged-i.i.d. model.
//!
//! The construction: a universe laid out as a `rows × cols` grid, one set per
//! *choice sequence* (pick one column per row; `cols^rows` unit-cost sets, each
//! of size `rows`), and one request distribution per row, uniform over that
//! row's elements.
//!
//! Drawing one element per row (one draw per slot distribution) always yields a
//! request set hit by a single set — per-slot optimum 1 — while i.i.d. draws
//! from the averaged distribution can land two draws in the same row on
//! different columns, forcing two sets. The gap grows with the grid, which is
//! why averaging away per-slot knowledge loses information.

use crate::covering::Request;
use crate::error::{Error, Result};
use crate::money::Money;

use super::{DiscreteDistribution, SetCoverInstance};

/// A grid fixture: the instance, one request distribution per row (slot), and
/// their exact average.
#[derive(Clone, Debug)]
pub struct CounterexampleFixture {
    pub instance: SetCoverInstance,
    /// `slot_distributions[t]` is uniform over row `t`'s elements.
    pub slot_distributions: Vec<DiscreteDistribution>,
    /// The exact average of the slot distributions (uniform over the grid).
    pub average: DiscreteDistribution,
}

impl CounterexampleFixture {
    /// Number of draws in one trial: one per row.
    pub fn num_slots(&self) -> usize {
        self.slot_distributions.len()
    }
}

/// The `rows × cols` grid fixture. Guarded: `cols^rows` sets must stay small.
pub fn sequence_cover_fixture(rows: usize, cols: usize) -> Result<CounterexampleFixture> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidInstance("grid needs rows ≥ 1, cols ≥ 1".into()));
    }
    let m = (cols as u64)
        .checked_pow(rows as u32)
        .filter(|&m| m <= 65_536)
        .ok_or_else(|| {
            Error::SizeGuard(format!("grid fixture would have cols^rows = {cols}^{rows} sets"))
        })? as usize;
    let n = rows * cols;
    let element = |row: usize, col: usize| row * cols + col;

    // Enumerate all choice sequences in odometer order: sequence index s picks
    // column (s / cols^row) % cols in each row.
    let mut sets = Vec::with_capacity(m);
    for s in 0..m {
        let mut set = Vec::with_capacity(rows);
        let mut digits = s;
        for row in 0..rows {
            set.push(element(row, digits % cols));
            digits /= cols;
        }
        sets.push(set);
    }
    let costs = vec![Money::from_units(1); m];
    let instance = SetCoverInstance::new(n, sets, costs)?;

    let slot_distributions: Vec<DiscreteDistribution> = (0..rows)
        .map(|row| {
            let elems: Vec<Request> =
                (0..cols).map(|col| Request::Element(element(row, col))).collect();
            DiscreteDistribution::uniform(&elems)
        })
        .collect::<Result<_>>()?;
    let refs: Vec<&DiscreteDistribution> = slot_distributions.iter().collect();
    let average = DiscreteDistribution::average(&refs)?;

    Ok(CounterexampleFixture {
        instance,
        slot_distributions,
        average,
    })
}

/// The smallest interesting grid: 2 rows × 2 columns. Four elements, four
/// unit-cost sets (every row-wise choice), per-slot distributions uniform on
/// each row, average uniform on all four elements.
pub fn counterexample_fixture() -> CounterexampleFixture {
    sequence_cover_fixture(2, 2).expect("2×2 grid is always valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::CoveringProblem;

    #[test]
    fn two_by_two_grid_shape() {
        let fx = counterexample_fixture();
        assert_eq!(fx.instance.num_elements(), 4);
        assert_eq!(fx.instance.num_sets(), 4);
        // Each set picks one element from row 0 (ids 0..2) and one from row 1 (ids 2..4).
        for j in 0..4 {
            let set = fx.instance.set(j);
            assert_eq!(set.len(), 2);
            assert!(set[0] < 2 && set[1] >= 2);
        }
        assert!(fx.instance.has_unit_costs());
        assert_eq!(fx.num_slots(), 2);
        assert_eq!(fx.average.support_size(), 4);
        assert_eq!(fx.average.total_weight(), 4);
    }

    #[test]
    fn every_one_per_row_draw_is_covered_by_one_set() {
        let fx = counterexample_fixture();
        // For each pair (one element per row) some single set contains both.
        for c0 in 0..2usize {
            for c1 in 0..2usize {
                let e0 = c0;
                let e1 = 2 + c1;
                let hit = (0..fx.instance.num_sets()).any(|j| {
                    fx.instance.contains(j, e0) && fx.instance.contains(j, e1)
                });
                assert!(hit, "no single set covers {{{e0},{e1}}}");
            }
        }
    }

    #[test]
    fn larger_grids_enumerate_all_sequences() {
        let fx = sequence_cover_fixture(4, 2).unwrap();
        assert_eq!(fx.instance.num_elements(), 8);
        assert_eq!(fx.instance.num_sets(), 16);
        assert_eq!(fx.num_slots(), 4);
        // All sets distinct.
        let mut sets: Vec<Vec<usize>> =
            (0..16).map(|j| fx.instance.set(j).to_vec()).collect();
        sets.sort();
        sets.dedup();
        assert_eq!(sets.len(), 16);
        // Guard trips for absurd sizes.
        assert!(sequence_cover_fixture(64, 64).is_err());
    }

    #[test]
    fn fixture_universe_matches_request_space() {
        let fx = counterexample_fixture();
        let universe = fx.instance.request_universe();
        assert_eq!(universe.len(), 4);
        for (r, _) in fx.average.entries() {
            assert!(universe.contains(r));
        }
    }
}
