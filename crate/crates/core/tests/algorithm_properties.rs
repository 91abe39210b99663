//! Statistical and structural properties of the online algorithms themselves:
//! per-round expected-spend envelopes, monotonicity of the marginal service
//! cost, and exact replayability.

use std::f64::consts::E;

use rocover_core::covering::{CoveringProblem, Request};
use rocover_core::instances::{gen_random_fl, gen_random_smc, FlCostModel, Instance};
use rocover_core::nmfl::{LearnOrCoverNmfl, NmflConfig};
use rocover_core::rng::{fisher_yates, substream, trial_seed, Stream};
use rocover_core::smc::{LearnOrCoverSmc, SmcConfig};

fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let k = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / k;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// In rounds where the learn-or-cover branch fires, the algorithm's expected
/// spend (sampling plus the marginal connection) is at most 2κ. Pooled over
/// states, the mean of (spend − 2κ) must sit at or below zero.
#[test]
fn nmfl_learn_rounds_spend_at_most_twice_kappa_in_expectation() {
    let fl = gen_random_fl(
        901,
        8,
        20,
        &FlCostModel::NonMetric {
            opening: (0.5, 5.0),
            connection: (0.2, 4.0),
            inf_fraction: 0.2,
        },
    )
    .unwrap();
    let universe = Instance::Fl(fl.clone()).request_universe();

    let mut gaps = Vec::new();
    for trial in 0..60u32 {
        let seed = trial_seed(31_337, trial);
        let mut order = universe.clone();
        fisher_yates(&mut order, &mut substream(seed, Stream::Shuffle));
        let mut rng = substream(seed, Stream::Algorithm);
        let mut algo = LearnOrCoverNmfl::new(fl.clone(), NmflConfig::default()).unwrap();
        for &request in &order {
            let round = algo.process(request, &mut rng).unwrap();
            if round.xi_event && !round.connected_on_arrival {
                gaps.push(round.spend.as_f64() - 2.0 * round.kappa.as_f64());
            }
        }
    }
    assert!(gaps.len() > 100, "too few learn rounds to test");
    let (mean, se) = mean_and_se(&gaps);
    assert!(
        mean <= 3.0 * se,
        "mean spend−2κ = {mean:.4} exceeds 3·SE = {:.4} over {} rounds",
        3.0 * se,
        gaps.len()
    );
}

/// Per uncovered arrival, the multicover algorithm's expected spend (sampling
/// + buys + backup) is at most (e+2)·d, d the deficiency on arrival.
#[test]
fn smc_rounds_spend_at_most_e_plus_two_deficiencies_in_expectation() {
    let smc = gen_random_smc(907, 30, 12, 0.4, 3).unwrap();
    let universe = Instance::Smc(smc.clone()).request_universe();

    let mut gaps = Vec::new();
    for trial in 0..60u32 {
        let seed = trial_seed(41_414, trial);
        let mut order = universe.clone();
        fisher_yates(&mut order, &mut substream(seed, Stream::Shuffle));
        let mut rng = substream(seed, Stream::Algorithm);
        let mut algo = LearnOrCoverSmc::new(smc.clone(), SmcConfig::default()).unwrap();
        for &request in &order {
            let round = algo.process(request, &mut rng).unwrap();
            if !round.covered_on_arrival {
                gaps.push(round.spend.as_f64() - (E + 2.0) * round.deficiency as f64);
            }
        }
    }
    assert!(gaps.len() > 200, "too few uncovered arrivals to test");
    let (mean, se) = mean_and_se(&gaps);
    assert!(
        mean <= 3.0 * se,
        "mean spend−(e+2)d = {mean:.4} exceeds 3·SE = {:.4} over {} rounds",
        3.0 * se,
        gaps.len()
    );
}

/// The marginal service cost of any fixed client never increases as the
/// solution grows: opening more facilities only helps.
#[test]
fn marginal_service_cost_is_non_increasing_as_the_solution_grows() {
    let fl = gen_random_fl(
        911,
        10,
        15,
        &FlCostModel::NonMetric {
            opening: (0.5, 5.0),
            connection: (0.2, 4.0),
            inf_fraction: 0.25,
        },
    )
    .unwrap();
    let universe = Instance::Fl(fl.clone()).request_universe();

    for trial in 0..20u32 {
        let seed = trial_seed(51_515, trial);
        let mut order = universe.clone();
        fisher_yates(&mut order, &mut substream(seed, Stream::Shuffle));
        let mut rng = substream(seed, Stream::Algorithm);
        let mut algo = LearnOrCoverNmfl::new(fl.clone(), NmflConfig::default()).unwrap();
        let mut last: Vec<_> = (0..fl.num_clients())
            .map(|v| algo.marginal_service(v).unwrap().0)
            .collect();
        for &request in &order {
            algo.process(request, &mut rng).unwrap();
            for (v, prev) in last.iter_mut().enumerate() {
                let now = algo.marginal_service(v).unwrap().0;
                assert!(
                    now <= *prev,
                    "client {v}: marginal service rose from {prev} to {now}"
                );
                *prev = now;
            }
        }
    }
}

/// Identical seeds replay identical trajectories: solutions, spends, budgets.
#[test]
fn algorithms_replay_exactly_under_a_fixed_seed() {
    let fl = gen_random_fl(
        917,
        7,
        12,
        &FlCostModel::NonMetric {
            opening: (0.5, 5.0),
            connection: (0.2, 4.0),
            inf_fraction: 0.2,
        },
    )
    .unwrap();
    let smc = gen_random_smc(919, 15, 9, 0.5, 2).unwrap();

    let fl_universe = Instance::Fl(fl.clone()).request_universe();
    let smc_universe = Instance::Smc(smc.clone()).request_universe();

    let run_fl = || {
        let mut order = fl_universe.clone();
        fisher_yates(&mut order, &mut substream(7, Stream::Shuffle));
        let mut rng = substream(7, Stream::Algorithm);
        let mut algo = LearnOrCoverNmfl::new(fl.clone(), NmflConfig::default()).unwrap();
        let spends: Vec<_> = order
            .iter()
            .map(|&r| algo.process(r, &mut rng).unwrap().spend)
            .collect();
        (spends, algo.solution().clone(), algo.budget(), algo.phases())
    };
    let run_smc = || {
        let mut order = smc_universe.clone();
        fisher_yates(&mut order, &mut substream(7, Stream::Shuffle));
        let mut rng = substream(7, Stream::Algorithm);
        let mut algo = LearnOrCoverSmc::new(smc.clone(), SmcConfig::default()).unwrap();
        let spends: Vec<_> = order
            .iter()
            .map(|&r| algo.process(r, &mut rng).unwrap().spend)
            .collect();
        (spends, algo.solution().clone(), algo.budget(), algo.phases())
    };

    assert_eq!(run_fl(), run_fl());
    assert_eq!(run_smc(), run_smc());
}

/// Feasibility across every algorithm and a batch of seeds: whatever the coin
/// flips, the final solution serves the whole universe; solutions only grow.
#[test]
fn solutions_grow_monotonically_and_end_feasible() {
    let fl = gen_random_fl(
        923,
        8,
        14,
        &FlCostModel::NonMetric {
            opening: (0.5, 5.0),
            connection: (0.2, 4.0),
            inf_fraction: 0.2,
        },
    )
    .unwrap();
    let instance = Instance::Fl(fl.clone());
    let universe = instance.request_universe();

    for trial in 0..25u32 {
        let seed = trial_seed(61_616, trial);
        let mut order = universe.clone();
        fisher_yates(&mut order, &mut substream(seed, Stream::Shuffle));
        let mut rng = substream(seed, Stream::Algorithm);
        let mut algo = LearnOrCoverNmfl::new(fl.clone(), NmflConfig::default()).unwrap();
        let mut prev = algo.solution().clone();
        for &request in &order {
            algo.process(request, &mut rng).unwrap();
            assert!(prev.dominated_by(algo.solution()), "solution shrank");
            assert!(instance.satisfied(algo.solution(), request).unwrap());
            prev = algo.solution().clone();
        }
        assert!(instance.is_feasible(algo.solution(), &universe).unwrap());
    }
}

/// A request the algorithm has already served is a free no-op forever after
/// (idempotence under repeats), for both learn-or-cover algorithms.
#[test]
fn repeated_requests_cost_nothing_more() {
    let smc = gen_random_smc(929, 12, 8, 0.5, 2).unwrap();
    let universe = Instance::Smc(smc.clone()).request_universe();
    let mut rng = substream(11, Stream::Algorithm);
    let mut algo = LearnOrCoverSmc::new(smc, SmcConfig::default()).unwrap();
    let mut sequence: Vec<Request> = universe.clone();
    sequence.extend_from_slice(&universe); // every row twice
    let mut seen = std::collections::HashSet::new();
    for &request in &sequence {
        let round = algo.process(request, &mut rng).unwrap();
        if !seen.insert(request) {
            assert!(round.covered_on_arrival);
            assert!(round.spend.is_zero());
        }
    }
}
