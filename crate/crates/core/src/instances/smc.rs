//! Unit-cost set multicover instances.

use serde::{Deserialize, Serialize};

use crate::covering::{CoveringProblem, Increment, Request, Solution};
use crate::error::{Error, Result};
use crate::money::{Cost, Money};

use super::SetCoverInstance;

/// A set multicover instance: a 0/1 constraint matrix over `m` unit-cost
/// columns, one row per request, each row demanding that at least `demand`
/// distinct columns from its support be bought.
///
/// Rows are stored as sorted support lists plus a parallel demand vector.
/// Validation enforces `1 ≤ demand ≤ |support|`, so every row is satisfiable.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SmcInstance {
    /// Number of rows.
    n: usize,
    /// Number of columns (purchasable objects, unit cost each).
    m: usize,
    /// Column ids with a 1-entry per row, sorted ascending.
    rows: Vec<Vec<usize>>,
    /// Coverage demands, parallel to `rows`.
    demands: Vec<u32>,
}

impl SmcInstance {
    pub fn new(m: usize, rows: Vec<Vec<usize>>, demands: Vec<u32>) -> Result<SmcInstance> {
        let n = rows.len();
        let mut instance = SmcInstance { n, m, rows, demands };
        instance.validate()?;
        Ok(instance)
    }

    pub(crate) fn validate(&mut self) -> Result<()> {
        if self.rows.len() != self.n {
            return Err(Error::InvalidInstance(format!(
                "declared n={} but {} rows present",
                self.n,
                self.rows.len()
            )));
        }
        if self.demands.len() != self.n {
            return Err(Error::InvalidInstance(format!(
                "{} rows but {} demands",
                self.n,
                self.demands.len()
            )));
        }
        for (i, row) in self.rows.iter_mut().enumerate() {
            row.sort_unstable();
            row.dedup();
            if let Some(&j) = row.last() {
                if j >= self.m {
                    return Err(Error::InvalidInstance(format!(
                        "row {i} references column {j}, only {} columns exist",
                        self.m
                    )));
                }
            }
            let b = self.demands[i];
            if b == 0 || (b as usize) > row.len() {
                return Err(Error::InfeasibleRow(i));
            }
        }
        Ok(())
    }

    /// Embed unit-cost weighted set cover as multicover with all demands 1:
    /// one row per element, supported by the sets containing it.
    pub fn from_unit_set_cover(sc: &SetCoverInstance) -> Result<SmcInstance> {
        if !sc.has_unit_costs() {
            return Err(Error::Unsupported(
                "multicover embedding requires unit set costs".into(),
            ));
        }
        let rows: Vec<Vec<usize>> = (0..sc.num_elements()).map(|e| sc.covering_sets(e)).collect();
        let demands = vec![1; sc.num_elements()];
        SmcInstance::new(sc.num_sets(), rows, demands)
    }

    pub fn num_rows(&self) -> usize {
        self.n
    }

    pub fn num_columns(&self) -> usize {
        self.m
    }

    /// Sorted support of row `i`.
    pub fn row_support(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn demand(&self, i: usize) -> u32 {
        self.demands[i]
    }

    /// How many distinct support columns of row `i` are bought in `z`.
    pub fn coverage(&self, z: &Solution, i: usize) -> u32 {
        self.rows[i].iter().filter(|&&j| z.level(j) >= 1).count() as u32
    }

    /// Residual demand of row `i` under `z`: `max(0, demand − coverage)`.
    pub fn deficiency(&self, z: &Solution, i: usize) -> u32 {
        self.demands[i].saturating_sub(self.coverage(z, i))
    }

    fn row_of(&self, request: Request) -> Result<usize> {
        match request {
            Request::Row(i) if i < self.n => Ok(i),
            Request::Row(i) => Err(Error::Dimension(format!(
                "row {i} out of range ({} rows)",
                self.n
            ))),
            other => Err(Error::Dimension(format!(
                "multicover instance cannot serve {other}"
            ))),
        }
    }
}

impl CoveringProblem for SmcInstance {
    fn num_coords(&self) -> usize {
        self.m
    }

    fn coord_cost(&self, _coord: usize) -> Cost {
        Cost::Finite(Money::from_units(1))
    }

    fn request_universe(&self) -> Vec<Request> {
        (0..self.n).map(Request::Row).collect()
    }

    fn validate_request(&self, request: Request) -> Result<()> {
        self.row_of(request).map(|_| ())
    }

    fn satisfied(&self, z: &Solution, request: Request) -> Result<bool> {
        self.check_dims(z)?;
        let i = self.row_of(request)?;
        Ok(self.deficiency(z, i) == 0)
    }

    fn augmentation_cost(&self, request: Request, z: &Solution, _context: &[Request]) -> Result<Cost> {
        self.check_dims(z)?;
        let i = self.row_of(request)?;
        let d = self.deficiency(z, i);
        if d == 0 {
            return Ok(Cost::ZERO);
        }
        let unbought = self.rows[i].iter().filter(|&&j| z.level(j) == 0).count();
        if (d as usize) <= unbought {
            Ok(Cost::Finite(Money::from_units(d as u64)))
        } else {
            Ok(Cost::Infinite)
        }
    }

    fn backup(&self, request: Request, z: &Solution, _context: &[Request]) -> Result<Increment> {
        self.check_dims(z)?;
        let i = self.row_of(request)?;
        let d = self.deficiency(z, i) as usize;
        if d == 0 {
            return Ok(Increment::empty());
        }
        // d cheapest new columns; unit costs make that the d lowest-indexed
        // unbought support columns (lexicographically smallest witness).
        let picks: Vec<(usize, u32)> = self.rows[i]
            .iter()
            .filter(|&&j| z.level(j) == 0)
            .take(d)
            .map(|&j| (j, 1))
            .collect();
        if picks.len() < d {
            return Err(Error::NoAugmentation);
        }
        Ok(Increment::new(picks))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo() -> SmcInstance {
        // Rows: {0,1,2} demanding 2; {2,3} demanding 1.
        SmcInstance::new(4, vec![vec![0, 1, 2], vec![2, 3]], vec![2, 1]).unwrap()
    }

    #[test]
    fn deficiency_counts_distinct_bought_support() {
        let inst = demo();
        let mut z = Solution::new(4);
        assert_eq!(inst.deficiency(&z, 0), 2);
        z.raise_to(1, 1, Money::from_units(1));
        assert_eq!(inst.deficiency(&z, 0), 1);
        z.raise_to(3, 1, Money::from_units(1));
        assert_eq!(inst.deficiency(&z, 0), 1); // column 3 is outside row 0's support
        assert_eq!(inst.deficiency(&z, 1), 0);
        z.raise_to(0, 1, Money::from_units(1));
        assert!(inst.satisfied(&z, Request::Row(0)).unwrap());
    }

    #[test]
    fn augmentation_is_residual_demand_at_unit_cost() {
        let inst = demo();
        let z = Solution::new(4);
        assert_eq!(
            inst.augmentation_cost(Request::Row(0), &z, &[]).unwrap(),
            Cost::Finite(Money::from_units(2))
        );
        let w = inst.backup(Request::Row(0), &z, &[]).unwrap();
        // Lowest-indexed unbought support columns win ties.
        assert_eq!(w.raises(), &[(0, 1), (1, 1)]);
    }

    #[test]
    fn rejects_demands_beyond_support() {
        assert!(matches!(
            SmcInstance::new(3, vec![vec![0, 1]], vec![3]),
            Err(Error::InfeasibleRow(0))
        ));
        assert!(matches!(
            SmcInstance::new(3, vec![vec![0]], vec![0]),
            Err(Error::InfeasibleRow(0))
        ));
    }

    #[test]
    fn unit_set_cover_embeds_as_demand_one_rows() {
        let sc = SetCoverInstance::new(
            3,
            vec![vec![0, 1], vec![1, 2]],
            vec![Money::from_units(1), Money::from_units(1)],
        )
        .unwrap();
        let smc = SmcInstance::from_unit_set_cover(&sc).unwrap();
        assert_eq!(smc.num_rows(), 3);
        assert_eq!(smc.row_support(1), &[0, 1]);
        assert_eq!(smc.demand(1), 1);

        let weighted = SetCoverInstance::new(
            1,
            vec![vec![0]],
            vec![Money::from_units(2)],
        )
        .unwrap();
        assert!(SmcInstance::from_unit_set_cover(&weighted).is_err());
    }
}
