//! Random-order metric facility location, Meyerson style: each arriving
//! client flips one coin — its nearest facility opens with probability
//! (distance to the nearest open facility) / (that facility's opening cost) —
//! and then the client connects to the nearest open facility. The first
//! client deterministically opens its cheapest open-plus-connect choice.
//!
//! This is the classic single-coin rule; it serves as the pluggable
//! random-order black box for the metric reduction corollaries.

use rand::Rng;

use crate::covering::{CoveringProblem, Request, Solution};
use crate::error::{Error, Result};
use crate::instances::FlInstance;
use crate::money::Money;
use crate::rng::SubRng;

/// What one arrival did.
#[derive(Clone, Copy, Debug)]
pub struct MflRound {
    /// Round number, starting at 1.
    pub round: u64,
    /// The client was already connected (repeat arrival).
    pub connected_on_arrival: bool,
    /// Money spent this round.
    pub spend: Money,
    /// Facility opened this round, if any.
    pub opened: Option<usize>,
}

/// Meyerson's online facility-location rule. Requires a metric instance.
#[derive(Clone, Debug)]
pub struct MeyersonMfl {
    instance: FlInstance,
    solution: Solution,
    rounds: u64,
}

impl MeyersonMfl {
    pub fn new(instance: FlInstance) -> Result<MeyersonMfl> {
        if !instance.is_metric() {
            return Err(Error::Unsupported(
                "the single-coin opening rule needs a metric instance".into(),
            ));
        }
        let solution = Solution::new(instance.num_coords());
        Ok(MeyersonMfl {
            instance,
            solution,
            rounds: 0,
        })
    }

    pub fn instance(&self) -> &FlInstance {
        &self.instance
    }

    pub fn solution(&self) -> &Solution {
        &self.solution
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    fn connection(&self, f: usize, v: usize) -> Money {
        self.instance
            .connection_cost(f, v)
            .expect_finite("metric instances have finite connection costs")
    }

    /// Nearest facility to `v` among those passing `keep`, ties toward the
    /// lowest id.
    fn nearest(&self, v: usize, keep: impl Fn(usize) -> bool) -> Option<(Money, usize)> {
        (0..self.instance.num_facilities())
            .filter(|&f| keep(f))
            .map(|f| (self.connection(f, v), f))
            .min()
    }

    /// Process one arriving client.
    pub fn process(&mut self, request: Request, rng: &mut SubRng) -> Result<MflRound> {
        self.instance.validate_request(request)?;
        let Request::Client(v) = request else {
            unreachable!("validated facility-location requests are clients")
        };
        self.rounds += 1;
        let round = self.rounds;

        if self.instance.connected_facility(&self.solution, v).is_some() {
            return Ok(MflRound {
                round,
                connected_on_arrival: true,
                spend: Money::ZERO,
                opened: None,
            });
        }

        let mut spend = Money::ZERO;
        let mut opened = None;
        let any_open = self.solution.support().any(|(coord, _)| {
            coord < self.instance.num_facilities()
        });
        if !any_open {
            // First client: open the cheapest open-plus-connect facility.
            let (_, f) = (0..self.instance.num_facilities())
                .map(|f| (self.instance.opening_cost(f) + self.connection(f, v), f))
                .min()
                .expect("instances have at least one facility");
            spend += self
                .solution
                .raise_to(f, 1, self.instance.opening_cost(f));
            opened = Some(f);
        } else {
            // One coin: the nearest facility opens with probability
            // min(δ/c_f, 1), where δ is the distance to the nearest open one.
            let (delta, _) = self
                .nearest(v, |f| self.solution.level(f) >= 1)
                .expect("some facility is open");
            let (_, f_near) = self.nearest(v, |_| true).expect("facilities exist");
            if self.solution.level(f_near) == 0 {
                let c_f = self.instance.opening_cost(f_near);
                let p = if delta.is_zero() {
                    0.0
                } else if c_f.is_zero() {
                    1.0
                } else {
                    (delta.as_f64() / c_f.as_f64()).min(1.0)
                };
                if p > 0.0 && rng.gen_bool(p) {
                    spend += self.solution.raise_to(f_near, 1, c_f);
                    opened = Some(f_near);
                }
            }
        }

        // Connect to the nearest open facility.
        let (conn, f) = self
            .nearest(v, |f| self.solution.level(f) >= 1)
            .expect("an open facility exists by now");
        spend += self
            .solution
            .raise_to(self.instance.connection_coord(v, f), 1, conn);

        Ok(MflRound {
            round,
            connected_on_arrival: false,
            spend,
            opened,
        })
    }
}

impl crate::reductions::RandomOrderAlgorithm for MeyersonMfl {
    fn feed(&mut self, request: Request, rng: &mut SubRng) -> Result<Money> {
        self.process(request, rng).map(|round| round.spend)
    }

    fn solution(&self) -> &Solution {
        &self.solution
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_random_fl, FlCostModel};
    use crate::money::Cost;
    use crate::rng::{substream, Stream};

    fn rng() -> SubRng {
        substream(3, Stream::Algorithm)
    }

    fn line_instance() -> FlInstance {
        // Two facilities on a line with two clients sitting on them.
        let fin = |u: u64| Cost::Finite(Money::from_units(u));
        FlInstance::new(
            2,
            vec![Money::from_units(4), Money::from_units(10)],
            vec![vec![fin(0), fin(3)], vec![fin(3), fin(0)]],
            true,
        )
        .unwrap()
    }

    #[test]
    fn refuses_non_metric_instances() {
        let inst = gen_random_fl(
            2,
            4,
            6,
            &FlCostModel::NonMetric {
                opening: (1.0, 2.0),
                connection: (0.1, 9.0),
                inf_fraction: 0.4,
            },
        )
        .unwrap();
        assert!(matches!(
            MeyersonMfl::new(inst),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn first_client_opens_cheapest_total_deterministically() {
        let inst = line_instance();
        let mut algo = MeyersonMfl::new(inst).unwrap();
        let mut r = rng();
        // Client 0: f0 costs 4+0, f1 costs 10+3 → f0 opens, free connection.
        let out = algo.process(Request::Client(0), &mut r).unwrap();
        assert!(!out.connected_on_arrival);
        assert_eq!(out.opened, Some(0));
        assert_eq!(out.spend, Money::from_units(4));
        assert_eq!(algo.solution().level(0), 1);
    }

    #[test]
    fn zero_distance_never_opens_again() {
        // f0 (cheap id, expensive price) and f1 sit on client 1; client 0 is
        // 3 away from both. Client 0 opens f1 (1+3 beats 10+3). Client 1 then
        // sits at distance 0 from open f1, its nearest facility is the closed
        // f0 (tie at 0, lowest id) — but δ = 0 means the coin never fires.
        let fin = |u: u64| Cost::Finite(Money::from_units(u));
        let inst = FlInstance::new(
            2,
            vec![Money::from_units(10), Money::from_units(1)],
            vec![vec![fin(3), fin(0)], vec![fin(3), fin(0)]],
            true,
        )
        .unwrap();
        let mut algo = MeyersonMfl::new(inst).unwrap();
        let mut r = rng();
        let first = algo.process(Request::Client(0), &mut r).unwrap();
        assert_eq!(first.opened, Some(1));
        assert_eq!(first.spend, Money::from_units(4));
        let second = algo.process(Request::Client(1), &mut r).unwrap();
        assert_eq!(second.opened, None);
        assert_eq!(second.spend, Money::ZERO);
        assert_eq!(algo.solution().level(0), 0);
    }

    #[test]
    fn every_client_connects_and_costs_are_exact() {
        let inst = gen_random_fl(9, 10, 40, &FlCostModel::Metric { opening: (0.5, 3.0) })
            .unwrap();
        let mut algo = MeyersonMfl::new(inst.clone()).unwrap();
        let mut r = rng();
        let mut total = Money::ZERO;
        for v in 0..inst.num_clients() {
            let out = algo.process(Request::Client(v), &mut r).unwrap();
            total += out.spend;
            assert!(inst.connected_facility(algo.solution(), v).is_some());
        }
        assert_eq!(total, algo.solution().cost());
        let all: Vec<Request> = (0..inst.num_clients()).map(Request::Client).collect();
        assert!(inst.is_feasible(algo.solution(), &all).unwrap());
    }
}
