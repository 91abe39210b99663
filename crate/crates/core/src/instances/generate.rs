//! Seeded random instance generators.
//!
//! All generators are deterministic functions of their seed: iteration order is
//! fixed, costs are drawn directly in integer micro-units, and repairs (making
//! every request satisfiable) run in a fixed pass after the random draw.

use rand::Rng;

use crate::error::{Error, Result};
use crate::money::{Cost, Money, MONEY_SCALE};
use crate::rng::{substream, Stream, SubRng};

use super::{FlInstance, SetCoverInstance, SmcInstance};

/// How [`gen_random_fl`] draws its costs.
#[derive(Clone, PartialEq, Debug)]
pub enum FlCostModel {
    /// Facilities and clients embedded uniformly in the unit square; connection
    /// costs are Euclidean distances, opening costs uniform in `opening`.
    Metric { opening: (f64, f64) },
    /// Arbitrary costs: connection costs uniform in `connection` except that
    /// each entry is independently infinite with probability `inf_fraction`
    /// (clients left with no finite edge are repaired with one finite draw).
    NonMetric {
        opening: (f64, f64),
        connection: (f64, f64),
        inf_fraction: f64,
    },
}

fn check_range(name: &str, range: (f64, f64)) -> Result<()> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || hi < lo {
        return Err(Error::InvalidInstance(format!(
            "{name} range ({lo}, {hi}) must satisfy 0 ≤ lo ≤ hi, finite"
        )));
    }
    Ok(())
}

fn check_unit_interval(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidInstance(format!(
            "{name} {x} must lie in [0, 1]"
        )));
    }
    Ok(())
}

/// Uniform money in `[lo, hi]`, drawn in exact micro-units.
fn money_in(rng: &mut SubRng, range: (f64, f64)) -> Money {
    let lo = (range.0 * MONEY_SCALE as f64).round() as u64;
    let hi = (range.1 * MONEY_SCALE as f64).round() as u64;
    Money::from_micros(rng.gen_range(lo..=hi))
}

/// Random weighted set cover: membership is i.i.d. Bernoulli(`density`); costs
/// are uniform in `cost_range`. Elements left uncovered are repaired by adding
/// them to one uniformly random set, so every element is coverable.
pub fn gen_random_setcover(
    seed: u64,
    n_elements: usize,
    m: usize,
    density: f64,
    cost_range: (f64, f64),
) -> Result<SetCoverInstance> {
    if n_elements == 0 || m == 0 {
        return Err(Error::InvalidInstance(
            "set cover generator needs n ≥ 1 and m ≥ 1".into(),
        ));
    }
    check_unit_interval("density", density)?;
    check_range("cost", cost_range)?;
    let mut rng = substream(seed, Stream::Generate);
    let mut sets: Vec<Vec<usize>> = (0..m)
        .map(|_| {
            (0..n_elements)
                .filter(|_| rng.gen_bool(density))
                .collect()
        })
        .collect();
    // Repair pass: every element must appear somewhere.
    let mut covered = vec![false; n_elements];
    for set in &sets {
        for &e in set {
            covered[e] = true;
        }
    }
    for e in 0..n_elements {
        if !covered[e] {
            let j = rng.gen_range(0..m);
            sets[j].push(e);
        }
    }
    let costs: Vec<Money> = (0..m).map(|_| money_in(&mut rng, cost_range)).collect();
    SetCoverInstance::new(n_elements, sets, costs)
}

/// Random unit-cost set multicover: row membership is i.i.d.
/// Bernoulli(`density`) (empty rows are repaired with one random column) and
/// demands are uniform in `1..=min(b_max, |support|)`.
pub fn gen_random_smc(
    seed: u64,
    n_rows: usize,
    m: usize,
    density: f64,
    b_max: u32,
) -> Result<SmcInstance> {
    if n_rows == 0 || m == 0 || b_max == 0 {
        return Err(Error::InvalidInstance(
            "multicover generator needs n ≥ 1, m ≥ 1, b_max ≥ 1".into(),
        ));
    }
    check_unit_interval("density", density)?;
    let mut rng = substream(seed, Stream::Generate);
    let mut rows: Vec<Vec<usize>> = Vec::with_capacity(n_rows);
    let mut demands: Vec<u32> = Vec::with_capacity(n_rows);
    for _ in 0..n_rows {
        let mut support: Vec<usize> = (0..m).filter(|_| rng.gen_bool(density)).collect();
        if support.is_empty() {
            support.push(rng.gen_range(0..m));
        }
        let cap = b_max.min(support.len() as u32);
        demands.push(rng.gen_range(1..=cap));
        rows.push(support);
    }
    SmcInstance::new(m, rows, demands)
}

/// Random facility location under the given cost model. Metric instances are
/// Euclidean by construction (and still validated); non-metric instances are
/// repaired so every client keeps at least one finite connection.
pub fn gen_random_fl(
    seed: u64,
    m: usize,
    n_clients: usize,
    model: &FlCostModel,
) -> Result<FlInstance> {
    if m == 0 || n_clients == 0 {
        return Err(Error::InvalidInstance(
            "facility location generator needs m ≥ 1 and n ≥ 1".into(),
        ));
    }
    let mut rng = substream(seed, Stream::Generate);
    match model {
        FlCostModel::Metric { opening } => {
            check_range("opening", *opening)?;
            let facilities: Vec<(f64, f64)> =
                (0..m).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
            let clients: Vec<(f64, f64)> = (0..n_clients)
                .map(|_| (rng.gen::<f64>(), rng.gen::<f64>()))
                .collect();
            let connection_costs: Vec<Vec<Cost>> = facilities
                .iter()
                .map(|&(fx, fy)| {
                    clients
                        .iter()
                        .map(|&(cx, cy)| {
                            let dist = ((fx - cx).powi(2) + (fy - cy).powi(2)).sqrt();
                            Cost::Finite(Money::from_f64(dist).expect("unit-square distance"))
                        })
                        .collect()
                })
                .collect();
            let opening_costs: Vec<Money> = (0..m).map(|_| money_in(&mut rng, *opening)).collect();
            FlInstance::new(n_clients, opening_costs, connection_costs, true)
        }
        FlCostModel::NonMetric {
            opening,
            connection,
            inf_fraction,
        } => {
            check_range("opening", *opening)?;
            check_range("connection", *connection)?;
            check_unit_interval("inf_fraction", *inf_fraction)?;
            let mut connection_costs: Vec<Vec<Cost>> = (0..m)
                .map(|_| {
                    (0..n_clients)
                        .map(|_| {
                            if rng.gen_bool(*inf_fraction) {
                                Cost::Infinite
                            } else {
                                Cost::Finite(money_in(&mut rng, *connection))
                            }
                        })
                        .collect()
                })
                .collect();
            // Repair pass: every client needs a finite edge somewhere.
            for v in 0..n_clients {
                if (0..m).all(|f| !connection_costs[f][v].is_finite()) {
                    let f = rng.gen_range(0..m);
                    connection_costs[f][v] = Cost::Finite(money_in(&mut rng, *connection));
                }
            }
            let opening_costs: Vec<Money> = (0..m).map(|_| money_in(&mut rng, *opening)).collect();
            FlInstance::new(n_clients, opening_costs, connection_costs, false)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic_in_the_seed() {
        let a = gen_random_setcover(11, 20, 8, 0.2, (0.5, 3.0)).unwrap();
        let b = gen_random_setcover(11, 20, 8, 0.2, (0.5, 3.0)).unwrap();
        assert_eq!(a, b);
        let c = gen_random_setcover(12, 20, 8, 0.2, (0.5, 3.0)).unwrap();
        assert_ne!(a, c);

        let s1 = gen_random_smc(5, 30, 12, 0.3, 3).unwrap();
        let s2 = gen_random_smc(5, 30, 12, 0.3, 3).unwrap();
        assert_eq!(s1, s2);

        let f1 = gen_random_fl(9, 6, 10, &FlCostModel::Metric { opening: (0.2, 1.0) }).unwrap();
        let f2 = gen_random_fl(9, 6, 10, &FlCostModel::Metric { opening: (0.2, 1.0) }).unwrap();
        assert_eq!(f1, f2);
    }

    #[test]
    fn set_cover_repair_leaves_no_uncoverable_elements() {
        // Density zero forces the repair pass to cover everything.
        let inst = gen_random_setcover(3, 15, 4, 0.0, (1.0, 1.0)).unwrap();
        assert!(inst.uncoverable_elements().is_empty());
    }

    #[test]
    fn smc_demands_respect_support_and_cap() {
        let inst = gen_random_smc(7, 40, 10, 0.15, 3).unwrap();
        for i in 0..inst.num_rows() {
            let b = inst.demand(i);
            assert!((1..=3).contains(&b));
            assert!((b as usize) <= inst.row_support(i).len());
        }
    }

    #[test]
    fn metric_instances_validate_and_nonmetric_repair_serves_all() {
        let metric = gen_random_fl(2, 8, 12, &FlCostModel::Metric { opening: (0.1, 0.9) }).unwrap();
        assert!(metric.is_metric());

        let nm = gen_random_fl(
            4,
            5,
            20,
            &FlCostModel::NonMetric {
                opening: (0.5, 2.0),
                connection: (0.1, 4.0),
                inf_fraction: 0.95,
            },
        )
        .unwrap();
        assert!(nm.unservable_clients().is_empty());
        assert!(!nm.is_metric());
    }
}
