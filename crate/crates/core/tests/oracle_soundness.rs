//! Cross-checks of the exact oracles against independent brute-force search,
//! plus the structural properties every monotone covering program here must
//! satisfy: subadditivity and monotonicity of augmentation costs.

use rand::Rng;
use rocover_core::covering::{CoveringProblem, Request, Solution};
use rocover_core::instances::{
    gen_random_fl, gen_random_setcover, gen_random_smc, FlCostModel, Instance,
};
use rocover_core::money::{Cost, Money};
use rocover_core::oracles::{exact_augmentation, exact_opt, greedy_bound};
use rocover_core::rng::{substream, Stream, SubRng};

/// Brute force over every 0/1 column vector, reading coverage straight off
/// the instance structure (independent of the library's search and of its
/// feasibility predicate).
fn naive_cover_opt(instance: &Instance, requests: &[Request]) -> Cost {
    // (support, demand) per requested row, straight from the raw matrices.
    let rows: Vec<(Vec<usize>, u32)> = requests
        .iter()
        .map(|&r| match (instance, r) {
            (Instance::SetCover(sc), Request::Element(e)) => {
                let support = (0..sc.num_sets()).filter(|&j| sc.contains(j, e)).collect();
                (support, 1)
            }
            (Instance::Smc(smc), Request::Row(i)) => {
                (smc.row_support(i).to_vec(), smc.demand(i))
            }
            _ => panic!("request kind does not match instance kind"),
        })
        .collect();
    let m = instance.num_objects();
    assert!(m <= 20, "brute force wants small m");
    let mut best = Cost::Infinite;
    for mask in 0u32..(1u32 << m) {
        let satisfied = rows.iter().all(|(support, demand)| {
            let coverage = support.iter().filter(|&&j| mask >> j & 1 == 1).count();
            coverage as u32 >= *demand
        });
        if !satisfied {
            continue;
        }
        let mut total = Money::ZERO;
        for j in 0..m {
            if mask >> j & 1 == 1 {
                match instance.coord_cost(j) {
                    Cost::Finite(c) => total += c,
                    Cost::Infinite => unreachable!("columns always have finite cost"),
                }
            }
        }
        best = best.min(Cost::Finite(total));
    }
    best
}

/// Brute force over every facility subset; each client then takes its
/// cheapest finite connection to an open facility.
fn naive_fl_opt(instance: &Instance, requests: &[Request]) -> Cost {
    let Instance::Fl(fl) = instance else {
        panic!("facility brute force needs a facility instance")
    };
    let mut clients: Vec<usize> = requests
        .iter()
        .map(|&r| match r {
            Request::Client(v) => v,
            _ => panic!("request kind does not match instance kind"),
        })
        .collect();
    clients.sort_unstable();
    clients.dedup();
    let m = fl.num_facilities();
    assert!(m <= 16, "brute force wants small m");
    let mut best = Cost::Infinite;
    'mask: for mask in 0u32..(1u32 << m) {
        let mut total = Money::ZERO;
        for f in 0..m {
            if mask >> f & 1 == 1 {
                total += fl.opening_cost(f);
            }
        }
        for &v in &clients {
            let mut cheapest: Option<Money> = None;
            for f in 0..m {
                if mask >> f & 1 == 0 {
                    continue;
                }
                if let Cost::Finite(c) = fl.connection_cost(f, v) {
                    cheapest = Some(cheapest.map_or(c, |b: Money| b.min(c)));
                }
            }
            match cheapest {
                Some(c) => total += c,
                None => continue 'mask,
            }
        }
        best = best.min(Cost::Finite(total));
    }
    best
}

fn naive_opt(instance: &Instance, requests: &[Request]) -> Cost {
    match instance {
        Instance::Fl(_) => naive_fl_opt(instance, requests),
        _ => naive_cover_opt(instance, requests),
    }
}

/// A small random instance of the family indexed by `family % 3`.
fn random_small_instance(family: usize, seed: u64, rng: &mut SubRng) -> Instance {
    match family % 3 {
        0 => {
            let n = rng.gen_range(2..=9);
            let m = rng.gen_range(2..=12);
            let density = rng.gen_range(0.2..0.8);
            Instance::SetCover(gen_random_setcover(seed, n, m, density, (0.5, 8.0)).unwrap())
        }
        1 => {
            let n = rng.gen_range(2..=8);
            let m = rng.gen_range(2..=12);
            let density = rng.gen_range(0.3..0.9);
            let b_max = rng.gen_range(1..=3);
            Instance::Smc(gen_random_smc(seed, n, m, density, b_max).unwrap())
        }
        _ => {
            let m = rng.gen_range(2..=9);
            let n = rng.gen_range(2..=8);
            Instance::Fl(
                gen_random_fl(
                    seed,
                    m,
                    n,
                    &FlCostModel::NonMetric {
                        opening: (0.5, 6.0),
                        connection: (0.1, 4.0),
                        inf_fraction: 0.3,
                    },
                )
                .unwrap(),
            )
        }
    }
}

/// A random non-empty subset of the request universe.
fn random_requests(instance: &Instance, rng: &mut SubRng) -> Vec<Request> {
    let universe = instance.request_universe();
    let mut picked: Vec<Request> = universe
        .iter()
        .copied()
        .filter(|_| rng.gen_bool(0.7))
        .collect();
    if picked.is_empty() {
        picked.push(universe[rng.gen_range(0..universe.len())]);
    }
    picked
}

/// A random partial solution: some objects bought; facility instances also
/// connect a few clients to open facilities so service credit is exercised.
fn random_partial_solution(instance: &Instance, rng: &mut SubRng) -> Solution {
    let mut z = Solution::new(instance.num_coords());
    let m = instance.num_objects();
    for j in 0..m {
        if rng.gen_bool(0.3) {
            if let Cost::Finite(c) = instance.coord_cost(j) {
                z.raise_to(j, 1, c);
            }
        }
    }
    if let Instance::Fl(fl) = instance {
        for v in 0..fl.num_clients() {
            if !rng.gen_bool(0.3) {
                continue;
            }
            // Connect to the cheapest open finite facility, if any.
            let open_edge = (0..m)
                .filter(|&f| z.level(f) >= 1)
                .filter_map(|f| match fl.connection_cost(f, v) {
                    Cost::Finite(c) => Some((c, f)),
                    Cost::Infinite => None,
                })
                .min();
            if let Some((c, f)) = open_edge {
                z.raise_to(fl.connection_coord(v, f), 1, c);
            }
        }
    }
    z
}

#[test]
fn exact_opt_matches_brute_force_on_small_instances() {
    let mut rng = substream(0xB0BA, Stream::Generate);
    for i in 0..180usize {
        let instance = random_small_instance(i, 40_000 + i as u64, &mut rng);
        let requests = random_requests(&instance, &mut rng);
        let exact = exact_opt(&instance, &requests).unwrap();
        let naive = naive_opt(&instance, &requests);
        assert_eq!(
            exact.value, naive,
            "instance {i} ({}): exact {:?} vs brute force {:?}",
            instance.kind(),
            exact.value,
            naive
        );
        if let Some(witness) = &exact.solution {
            assert!(instance.is_feasible(witness, &requests).unwrap());
            assert_eq!(Cost::Finite(witness.cost()), exact.value);
        } else {
            assert_eq!(exact.value, Cost::Infinite);
        }
    }
}

#[test]
fn augmentation_is_subadditive() {
    let mut rng = substream(0x5AB, Stream::Generate);
    for i in 0..240usize {
        let instance = random_small_instance(i, 50_000 + i as u64, &mut rng);
        let z = random_partial_solution(&instance, &mut rng);
        let a = random_requests(&instance, &mut rng);
        let b = random_requests(&instance, &mut rng);
        let mut union = a.clone();
        union.extend_from_slice(&b);
        let aug_union = exact_augmentation(&instance, &union, &z, &[]).unwrap();
        let aug_a = exact_augmentation(&instance, &a, &z, &[]).unwrap();
        let aug_b = exact_augmentation(&instance, &b, &z, &[]).unwrap();
        assert!(
            aug_union <= aug_a + aug_b,
            "instance {i} ({}): aug(A∪B)={:?} exceeds aug(A)+aug(B)={:?}+{:?}",
            instance.kind(),
            aug_union,
            aug_a,
            aug_b
        );
    }
}

#[test]
fn augmentation_is_monotone_in_the_solution_and_ignores_context() {
    let mut rng = substream(0xA46, Stream::Generate);
    for i in 0..300usize {
        let instance = random_small_instance(i, 60_000 + i as u64, &mut rng);
        let z = random_partial_solution(&instance, &mut rng);
        // Grow z into z' by buying more.
        let mut z_grown = z.clone();
        for j in 0..instance.num_objects() {
            if rng.gen_bool(0.3) {
                if let Cost::Finite(c) = instance.coord_cost(j) {
                    z_grown.raise_to(j, 1, c);
                }
            }
        }
        assert!(z.dominated_by(&z_grown));
        let w = random_requests(&instance, &mut rng);
        let before = exact_augmentation(&instance, &w, &z, &[]).unwrap();
        let after = exact_augmentation(&instance, &w, &z_grown, &[]).unwrap();
        assert!(
            after <= before,
            "instance {i} ({}): growing the solution raised aug from {:?} to {:?}",
            instance.kind(),
            before,
            after
        );
        // The context parameter is inert for these monotone problems.
        let ctx = random_requests(&instance, &mut rng);
        let with_ctx = exact_augmentation(&instance, &w, &z, &ctx).unwrap();
        assert_eq!(before, with_ctx);
    }
}

#[test]
fn greedy_bounds_exact_within_the_classical_factor() {
    let mut rng = substream(0x96EE, Stream::Generate);
    for i in 0..150usize {
        let instance = random_small_instance(i, 70_000 + i as u64, &mut rng);
        let requests = random_requests(&instance, &mut rng);
        let exact = exact_opt(&instance, &requests).unwrap();
        let greedy = greedy_bound(&instance, &requests).unwrap();
        assert!(
            exact.value <= greedy.value,
            "greedy fell below the optimum on instance {i}"
        );
        if let Some(witness) = &greedy.solution {
            assert!(instance.is_feasible(witness, &requests).unwrap());
        }
        let (Cost::Finite(opt), Cost::Finite(upper)) = (exact.value, greedy.value) else {
            assert_eq!(exact.value, greedy.value);
            continue;
        };
        if opt.is_zero() {
            assert!(upper.is_zero());
            continue;
        }
        // Classical guarantees: H(total demand) for density greedy on covers,
        // H(#clients) for star greedy on facility location.
        let units = match &instance {
            Instance::SetCover(_) => requests.len() as f64,
            Instance::Smc(smc) => requests
                .iter()
                .map(|&r| match r {
                    Request::Row(row) => smc.demand(row) as f64,
                    _ => unreachable!(),
                })
                .sum(),
            Instance::Fl(_) => requests.len() as f64,
        };
        let factor = 1.0 + units.max(1.0).ln();
        assert!(
            upper.as_f64() <= factor * opt.as_f64() + 1e-9,
            "instance {i} ({}): greedy {} vs {} × exact {}",
            instance.kind(),
            upper,
            factor,
            opt
        );
    }
}
