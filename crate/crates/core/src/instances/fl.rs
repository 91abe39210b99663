//! Facility location instances (metric or arbitrary connection costs).

use serde::{Deserialize, Serialize};

use crate::covering::{CoveringProblem, Increment, Request, Solution};
use crate::error::{Error, Result};
use crate::money::{Cost, Money};

use super::SetCoverInstance;

/// Fixed-point slack (in micro-units) allowed when checking the triangle
/// inequality: rounding real distances to micro-units perturbs each of the
/// four costs in a path comparison by at most half a micro-unit.
const TRIANGLE_SLACK_MICROS: u128 = 4;

/// A facility location instance: `m` facilities with opening costs and an
/// `m × n` connection-cost matrix over `n` clients.
///
/// Connection costs may be [`Cost::Infinite`] (serialized as the string
/// `"inf"`), marking pairs that can never be connected. Instances flagged
/// `metric` must have all-finite connection costs satisfying the facility/
/// client path inequality `c(f,v) ≤ c(f,v') + c(f',v') + c(f',v)`; this is
/// checked at construction and on load.
///
/// Decision coordinates: `0..m` are facility openings; coordinate
/// `m + v·m + f` buys the connection between client `v` and facility `f`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FlInstance {
    /// Number of clients.
    n: usize,
    /// Number of facilities.
    m: usize,
    /// Facility opening costs.
    opening_costs: Vec<Money>,
    /// `connection_costs[f][v]` is the cost of connecting client `v` to `f`.
    connection_costs: Vec<Vec<Cost>>,
    /// Whether the connection costs form a (bipartite) metric.
    metric: bool,
}

impl FlInstance {
    pub fn new(
        n: usize,
        opening_costs: Vec<Money>,
        connection_costs: Vec<Vec<Cost>>,
        metric: bool,
    ) -> Result<FlInstance> {
        let m = opening_costs.len();
        let mut instance = FlInstance {
            n,
            m,
            opening_costs,
            connection_costs,
            metric,
        };
        instance.validate(false)?;
        Ok(instance)
    }

    pub(crate) fn validate(&mut self, reject_unservable: bool) -> Result<()> {
        if self.opening_costs.len() != self.m {
            return Err(Error::InvalidInstance(format!(
                "declared m={} but {} opening costs present",
                self.m,
                self.opening_costs.len()
            )));
        }
        if self.connection_costs.len() != self.m {
            return Err(Error::InvalidInstance(format!(
                "{} facilities but {} connection-cost rows",
                self.m,
                self.connection_costs.len()
            )));
        }
        for (f, row) in self.connection_costs.iter().enumerate() {
            if row.len() != self.n {
                return Err(Error::InvalidInstance(format!(
                    "connection-cost row {f} has {} entries, expected {}",
                    row.len(),
                    self.n
                )));
            }
        }
        if self.metric {
            self.check_metric()?;
        }
        if reject_unservable {
            let unservable = self.unservable_clients();
            if !unservable.is_empty() {
                return Err(Error::InvalidInstance(format!(
                    "clients with no finite connection cost: {unservable:?}"
                )));
            }
        }
        Ok(())
    }

    /// Verify the bipartite triangle inequality
    /// `c(f,v) ≤ c(f,v') + c(f',v') + c(f',v)` for all pairs, in exact
    /// micro-unit arithmetic with fixed rounding slack. Infinite entries are
    /// rejected for metric instances.
    fn check_metric(&self) -> Result<()> {
        let micros = |c: Cost, f: usize, v: usize| -> Result<u128> {
            match c {
                Cost::Finite(m) => Ok(m.micros() as u128),
                Cost::Infinite => Err(Error::InvalidInstance(format!(
                    "metric instance has infinite connection cost at facility {f}, client {v}"
                ))),
            }
        };
        // d[f][f'] = min over v' of c(f,v') + c(f',v'): the cheapest relay
        // between two facilities through any client.
        let mut relay = vec![vec![u128::MAX; self.m]; self.m];
        for f in 0..self.m {
            for fp in 0..self.m {
                let mut best = u128::MAX;
                for vp in 0..self.n {
                    let through = micros(self.connection_costs[f][vp], f, vp)?
                        + micros(self.connection_costs[fp][vp], fp, vp)?;
                    best = best.min(through);
                }
                relay[f][fp] = best;
            }
        }
        for f in 0..self.m {
            for v in 0..self.n {
                let direct = micros(self.connection_costs[f][v], f, v)?;
                let via = (0..self.m)
                    .map(|fp| relay[f][fp].saturating_add(micros(self.connection_costs[fp][v], fp, v).unwrap_or(u128::MAX)))
                    .min()
                    .unwrap_or(u128::MAX);
                if direct > via + TRIANGLE_SLACK_MICROS {
                    return Err(Error::InvalidInstance(format!(
                        "triangle inequality violated at facility {f}, client {v}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Embed weighted set cover: one facility per set (opening = set cost),
    /// one client per element, connection cost 0 inside the set and infinite
    /// outside. Feasible solutions correspond exactly and cost the same.
    pub fn from_set_cover(sc: &SetCoverInstance) -> FlInstance {
        let m = sc.num_sets();
        let n = sc.num_elements();
        let connection_costs = (0..m)
            .map(|j| {
                (0..n)
                    .map(|e| {
                        if sc.contains(j, e) {
                            Cost::Finite(Money::ZERO)
                        } else {
                            Cost::Infinite
                        }
                    })
                    .collect()
            })
            .collect();
        FlInstance {
            n,
            m,
            opening_costs: (0..m).map(|j| sc.cost(j)).collect(),
            connection_costs,
            metric: false,
        }
    }

    pub fn num_clients(&self) -> usize {
        self.n
    }

    pub fn num_facilities(&self) -> usize {
        self.m
    }

    pub fn is_metric(&self) -> bool {
        self.metric
    }

    pub fn opening_cost(&self, f: usize) -> Money {
        self.opening_costs[f]
    }

    pub fn connection_cost(&self, f: usize, v: usize) -> Cost {
        self.connection_costs[f][v]
    }

    /// Clients with no finite connection cost to any facility.
    pub fn unservable_clients(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&v| (0..self.m).all(|f| !self.connection_costs[f][v].is_finite()))
            .collect()
    }

    /// Decision coordinate opening facility `f`.
    pub fn facility_coord(&self, f: usize) -> usize {
        debug_assert!(f < self.m);
        f
    }

    /// Decision coordinate connecting client `v` to facility `f`.
    pub fn connection_coord(&self, v: usize, f: usize) -> usize {
        debug_assert!(v < self.n && f < self.m);
        self.m + v * self.m + f
    }

    /// The facility client `v` is connected to in `z`, if any (lowest id when
    /// several connections were bought).
    pub fn connected_facility(&self, z: &Solution, v: usize) -> Option<usize> {
        (0..self.m).find(|&f| z.level(self.connection_coord(v, f)) >= 1 && z.level(f) >= 1)
    }

    fn client_of(&self, request: Request) -> Result<usize> {
        match request {
            Request::Client(v) if v < self.n => Ok(v),
            Request::Client(v) => Err(Error::Dimension(format!(
                "client {v} out of range ({} clients)",
                self.n
            ))),
            other => Err(Error::Dimension(format!(
                "facility location instance cannot serve {other}"
            ))),
        }
    }

    /// Marginal cost of serving client `v` given the open facilities in `z`:
    /// `min_f (opening if closed) + connection`, with the minimizing facility.
    /// `None` when no facility has a finite connection to `v`.
    pub(crate) fn cheapest_service(&self, z: &Solution, v: usize) -> Option<(Money, usize)> {
        let mut best: Option<(Money, usize)> = None;
        for f in 0..self.m {
            let conn = match self.connection_costs[f][v] {
                Cost::Finite(c) => c,
                Cost::Infinite => continue,
            };
            let open = if z.level(f) >= 1 {
                Money::ZERO
            } else {
                self.opening_costs[f]
            };
            let total = open + conn;
            if best.is_none_or(|(b, _)| total < b) {
                best = Some((total, f));
            }
        }
        best
    }
}

impl CoveringProblem for FlInstance {
    fn num_coords(&self) -> usize {
        self.m + self.n * self.m
    }

    fn coord_cost(&self, coord: usize) -> Cost {
        if coord < self.m {
            Cost::Finite(self.opening_costs[coord])
        } else {
            let rest = coord - self.m;
            let (v, f) = (rest / self.m, rest % self.m);
            self.connection_costs[f][v]
        }
    }

    fn request_universe(&self) -> Vec<Request> {
        (0..self.n).map(Request::Client).collect()
    }

    fn validate_request(&self, request: Request) -> Result<()> {
        self.client_of(request).map(|_| ())
    }

    fn satisfied(&self, z: &Solution, request: Request) -> Result<bool> {
        self.check_dims(z)?;
        let v = self.client_of(request)?;
        Ok(self.connected_facility(z, v).is_some())
    }

    /// Feasibility also demands the structural constraint that every bought
    /// connection points at an open facility.
    fn is_feasible(&self, z: &Solution, requests: &[Request]) -> Result<bool> {
        self.check_dims(z)?;
        for (coord, _) in z.support() {
            if coord >= self.m {
                let f = (coord - self.m) % self.m;
                if z.level(f) == 0 {
                    return Ok(false);
                }
            }
        }
        for &r in requests {
            if !self.satisfied(z, r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn augmentation_cost(&self, request: Request, z: &Solution, _context: &[Request]) -> Result<Cost> {
        if self.satisfied(z, request)? {
            return Ok(Cost::ZERO);
        }
        let v = self.client_of(request)?;
        Ok(self
            .cheapest_service(z, v)
            .map_or(Cost::Infinite, |(c, _)| Cost::Finite(c)))
    }

    fn backup(&self, request: Request, z: &Solution, _context: &[Request]) -> Result<Increment> {
        if self.satisfied(z, request)? {
            return Ok(Increment::empty());
        }
        let v = self.client_of(request)?;
        let (_, f) = self.cheapest_service(z, v).ok_or(Error::NoAugmentation)?;
        let mut raises = vec![(self.connection_coord(v, f), 1)];
        if z.level(f) == 0 {
            raises.push((f, 1));
        }
        Ok(Increment::new(raises))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two facilities, one client: f0 costs 5 with connection 1, f1 costs 3
    /// with connection 4.
    pub(crate) fn two_facility_instance() -> FlInstance {
        FlInstance::new(
            1,
            vec![Money::from_units(5), Money::from_units(3)],
            vec![
                vec![Cost::Finite(Money::from_units(1))],
                vec![Cost::Finite(Money::from_units(4))],
            ],
            false,
        )
        .unwrap()
    }

    #[test]
    fn augmentation_opens_and_connects() {
        let inst = two_facility_instance();
        let mut z = Solution::new(inst.num_coords());
        // Closed facilities: min(5+1, 3+4) = 6 via facility 0.
        assert_eq!(
            inst.augmentation_cost(Request::Client(0), &z, &[]).unwrap(),
            Cost::Finite(Money::from_units(6))
        );
        let w = inst.backup(Request::Client(0), &z, &[]).unwrap();
        assert_eq!(
            w.raises(),
            &[(inst.facility_coord(0), 1), (inst.connection_coord(0, 0), 1)]
        );
        let paid = z.apply_max(&w, &inst).unwrap();
        assert_eq!(paid, Money::from_units(6));
        assert!(inst.satisfied(&z, Request::Client(0)).unwrap());
        assert!(inst.is_feasible(&z, &[Request::Client(0)]).unwrap());
    }

    #[test]
    fn open_facilities_only_pay_connection() {
        let inst = two_facility_instance();
        let mut z = Solution::new(inst.num_coords());
        z.raise_to(inst.facility_coord(0), 1, inst.opening_cost(0));
        assert_eq!(
            inst.augmentation_cost(Request::Client(0), &z, &[]).unwrap(),
            Cost::Finite(Money::from_units(1))
        );
        let w = inst.backup(Request::Client(0), &z, &[]).unwrap();
        assert_eq!(w.raises(), &[(inst.connection_coord(0, 0), 1)]);
    }

    #[test]
    fn disconnected_client_is_infeasible() {
        let inst = FlInstance::new(
            1,
            vec![Money::from_units(1)],
            vec![vec![Cost::Infinite]],
            false,
        )
        .unwrap();
        assert_eq!(inst.unservable_clients(), vec![0]);
        let z = Solution::new(inst.num_coords());
        assert_eq!(
            inst.augmentation_cost(Request::Client(0), &z, &[]).unwrap(),
            Cost::Infinite
        );
        assert!(matches!(
            inst.backup(Request::Client(0), &z, &[]),
            Err(Error::NoAugmentation)
        ));
    }

    #[test]
    fn dangling_connection_breaks_feasibility() {
        let inst = two_facility_instance();
        let mut z = Solution::new(inst.num_coords());
        z.raise_to(inst.connection_coord(0, 0), 1, Money::from_units(1));
        // Connection bought but the facility is closed.
        assert!(!inst.is_feasible(&z, &[]).unwrap());
    }

    #[test]
    fn metric_validation_accepts_triangles_and_rejects_violations() {
        // A valid 1-dimensional metric: facilities at 0 and 10, clients at 3 and 7.
        let ok = FlInstance::new(
            2,
            vec![Money::from_units(1), Money::from_units(1)],
            vec![
                vec![Cost::Finite(Money::from_units(3)), Cost::Finite(Money::from_units(7))],
                vec![Cost::Finite(Money::from_units(7)), Cost::Finite(Money::from_units(3))],
            ],
            true,
        );
        assert!(ok.is_ok());
        // Breaking one entry far beyond any relay path must be rejected.
        let bad = FlInstance::new(
            2,
            vec![Money::from_units(1), Money::from_units(1)],
            vec![
                vec![Cost::Finite(Money::from_units(100)), Cost::Finite(Money::from_units(7))],
                vec![Cost::Finite(Money::from_units(7)), Cost::Finite(Money::from_units(3))],
            ],
            true,
        );
        assert!(bad.is_err());
        // Infinite entries cannot be metric.
        let inf = FlInstance::new(
            1,
            vec![Money::from_units(1)],
            vec![vec![Cost::Infinite]],
            true,
        );
        assert!(inf.is_err());
    }

    #[test]
    fn set_cover_embedding_preserves_costs() {
        let sc = SetCoverInstance::new(
            3,
            vec![vec![0, 1], vec![1, 2], vec![2]],
            vec![Money::from_units(2), Money::from_units(2), Money::from_units(1)],
        )
        .unwrap();
        let fl = FlInstance::from_set_cover(&sc);
        assert_eq!(fl.num_facilities(), 3);
        assert_eq!(fl.num_clients(), 3);
        assert_eq!(fl.connection_cost(0, 1), Cost::Finite(Money::ZERO));
        assert_eq!(fl.connection_cost(0, 2), Cost::Infinite);
        // Serving element 2 from scratch costs exactly the cheapest covering set.
        let z = Solution::new(fl.num_coords());
        assert_eq!(
            fl.augmentation_cost(Request::Client(2), &z, &[]).unwrap(),
            Cost::Finite(Money::from_units(1))
        );
    }
}
