//! Meta-algorithms that convert any random-order covering algorithm into
//! algorithms for harder arrival models, treating it as a black box:
//!
//! * [`prophet_single_sample`] — one extra sample per distribution is fed to
//!   the black box as a mock run; the real arrivals are then patched with
//!   backup purchases wherever the mock solution falls short.
//! * [`two_stage_prophet`] — λ mock runs are fed up front at cheap stage-one
//!   prices; stage-two backups pay a ×λ markup.
//! * [`online_with_a_sample`] — an α-fraction of an adversarial request set
//!   is revealed as a sample, fed to the black box, and the whole set is then
//!   streamed with backups.
//!
//! Each reduction draws from its own named random streams (mock draws,
//! shuffling, real draws, the algorithm's own coins) so that paired and
//! mate-swapped experiments are possible.

use crate::covering::{CoveringProblem, Request, Solution};
use crate::error::Result;
use crate::instances::{DiscreteDistribution, Instance};
use crate::money::Money;
use crate::rng::{fisher_yates, sample_indices, substream, Stream, SubRng};

/// A sequential covering algorithm consuming one request at a time. The
/// reductions treat implementors as black boxes: they feed requests, read the
/// running solution, and never touch internals.
pub trait RandomOrderAlgorithm {
    /// Consume one request, returning the money spent on it.
    fn feed(&mut self, request: Request, rng: &mut SubRng) -> Result<Money>;

    /// The solution built so far. Must be monotone across feeds.
    fn solution(&self) -> &Solution;

    /// Free-order hook: given the requests not yet revealed, pick the index
    /// to reveal next. `None` (the default) follows the ambient uniformly
    /// random order — random-order algorithms are exactly the 0-sample
    /// free-order ones.
    fn preferred_next(&self, _pending: &[Request]) -> Option<usize> {
        None
    }
}

/// The named random streams a reduction consumes. Building them through
/// [`ReductionRngs::from_seed`] gives the canonical assignment; paired
/// experiments can swap roles explicitly.
#[derive(Clone, Debug)]
pub struct ReductionRngs {
    /// Draws the mock (sample) requests.
    pub mock_draw: SubRng,
    /// Shuffles the order in which mocks are fed.
    pub shuffle: SubRng,
    /// Draws the real arrivals.
    pub real_draw: SubRng,
    /// Coins for the inner algorithm.
    pub algorithm: SubRng,
}

impl ReductionRngs {
    /// The canonical stream assignment for a trial seed.
    pub fn from_seed(seed: u64) -> ReductionRngs {
        ReductionRngs {
            mock_draw: substream(seed, Stream::MockDraw),
            shuffle: substream(seed, Stream::Shuffle),
            real_draw: substream(seed, Stream::RealDraw),
            algorithm: substream(seed, Stream::Algorithm),
        }
    }

    /// Mock and real draws exchanged, everything else identical — the mates
    /// v̂ and v are exchangeable, so costs must be distributed identically.
    pub fn mate_swapped(seed: u64) -> ReductionRngs {
        ReductionRngs {
            mock_draw: substream(seed, Stream::RealDraw),
            shuffle: substream(seed, Stream::Shuffle),
            real_draw: substream(seed, Stream::MockDraw),
            algorithm: substream(seed, Stream::Algorithm),
        }
    }
}

/// Cost breakdown of one reduction run.
#[derive(Clone, Debug)]
pub struct ReductionReport {
    /// The model's objective: mock cost plus (marked-up) backup cost.
    pub total: Money,
    /// Cost of the solution the black box built from the mock feed.
    pub mock_cost: Money,
    /// Backup cost as the objective counts it (×λ for the two-stage model).
    pub backup_cost: Money,
    /// Backup cost before markup.
    pub backup_raw: Money,
    /// Number of arrivals that needed a backup.
    pub backups: u32,
    /// The final solution; feasible for every real arrival.
    pub solution: Solution,
    /// The black box's solution alone.
    pub mock_solution: Solution,
    /// The realized real arrivals, in the order they were streamed.
    pub arrivals: Vec<Request>,
}

/// Feed `pool` to the algorithm: pre-shuffled into a uniformly random order,
/// but the algorithm's free-order hook may override which request comes next.
fn feed_free_order<A: RandomOrderAlgorithm + ?Sized>(
    algo: &mut A,
    mut pool: Vec<Request>,
    shuffle_rng: &mut SubRng,
    algo_rng: &mut SubRng,
) -> Result<()> {
    fisher_yates(&mut pool, shuffle_rng);
    while !pool.is_empty() {
        let next = match algo.preferred_next(&pool) {
            Some(idx) if idx < pool.len() => idx,
            _ => 0,
        };
        let request = pool.remove(next);
        algo.feed(request, algo_rng)?;
    }
    Ok(())
}

/// Run the real arrivals over `z`, buying a backup whenever `z` misses one.
/// The commitment context passed to the backup oracle is the mock set plus
/// the arrivals seen so far. Returns (backup spend, backup count).
fn stream_with_backups(
    instance: &Instance,
    z: &mut Solution,
    also_into: Option<&mut Solution>,
    arrivals: &[Request],
    mut context: Vec<Request>,
) -> Result<(Money, u32)> {
    let mut spent = Money::ZERO;
    let mut events = 0;
    let mut side = also_into;
    for &v in arrivals {
        if !instance.satisfied(z, v)? {
            let increment = instance.backup(v, z, &context)?;
            if let Some(side) = side.as_deref_mut() {
                side.apply_max(&increment, instance)?;
            }
            spent += z.apply_max(&increment, instance)?;
            events += 1;
        }
        context.push(v);
    }
    Ok((spent, events))
}

/// Single-sample prophet: draw one mock from every per-arrival distribution,
/// feed the mocks to the black box in random order, then patch its solution
/// with backups along the real arrival sequence (fixed order 1..n).
pub fn prophet_single_sample<A: RandomOrderAlgorithm + ?Sized>(
    algo: &mut A,
    instance: &Instance,
    distributions: &[DiscreteDistribution],
    rngs: &mut ReductionRngs,
) -> Result<ReductionReport> {
    let mock: Vec<Request> = distributions
        .iter()
        .map(|d| d.sample(&mut rngs.mock_draw))
        .collect();
    feed_free_order(algo, mock.clone(), &mut rngs.shuffle, &mut rngs.algorithm)?;
    let mock_solution = algo.solution().clone();
    let mock_cost = mock_solution.cost();

    let arrivals: Vec<Request> = distributions
        .iter()
        .map(|d| d.sample(&mut rngs.real_draw))
        .collect();
    let mut solution = mock_solution.clone();
    let (backup_cost, backups) =
        stream_with_backups(instance, &mut solution, None, &arrivals, mock)?;

    Ok(ReductionReport {
        total: mock_cost + backup_cost,
        mock_cost,
        backup_cost,
        backup_raw: backup_cost,
        backups,
        solution,
        mock_solution,
        arrivals,
    })
}

/// Two-stage prophet: λ mock draws per distribution are fed (one shuffle over
/// the whole union) and bought at stage-one prices as z₀; stage-two backups
/// accumulate in z₁ and the objective pays λ·c(z₁) for them. With λ = 1 this
/// is exactly the single-sample prophet, stream for stream.
pub fn two_stage_prophet<A: RandomOrderAlgorithm + ?Sized>(
    algo: &mut A,
    instance: &Instance,
    distributions: &[DiscreteDistribution],
    lambda: u32,
    rngs: &mut ReductionRngs,
) -> Result<ReductionReport> {
    assert!(lambda >= 1, "the stage-two markup must be at least 1");
    let mut mock: Vec<Request> = Vec::with_capacity(distributions.len() * lambda as usize);
    for _ in 0..lambda {
        for d in distributions {
            mock.push(d.sample(&mut rngs.mock_draw));
        }
    }
    feed_free_order(algo, mock.clone(), &mut rngs.shuffle, &mut rngs.algorithm)?;
    let stage_one = algo.solution().clone();
    let stage_one_cost = stage_one.cost();

    let arrivals: Vec<Request> = distributions
        .iter()
        .map(|d| d.sample(&mut rngs.real_draw))
        .collect();
    let mut combined = stage_one.clone();
    let mut stage_two = Solution::new(instance.num_coords());
    let (_, backups) = stream_with_backups(
        instance,
        &mut combined,
        Some(&mut stage_two),
        &arrivals,
        mock,
    )?;
    let backup_raw = stage_two.cost();
    let backup_cost = backup_raw.scaled(lambda);

    Ok(ReductionReport {
        total: stage_one_cost + backup_cost,
        mock_cost: stage_one_cost,
        backup_cost,
        backup_raw,
        backups,
        solution: combined,
        mock_solution: stage_one,
        arrivals,
    })
}

/// Online with a sample: reveal a uniformly random ⌊αn⌉-subset of an
/// adversarially ordered request set, feed it to the black box in random
/// order, then stream the full set in the adversary's order with backups
/// (sampled requests arrive already satisfied).
pub fn online_with_a_sample<A: RandomOrderAlgorithm + ?Sized>(
    algo: &mut A,
    instance: &Instance,
    requests: &[Request],
    alpha: f64,
    rngs: &mut ReductionRngs,
) -> Result<ReductionReport> {
    assert!(
        alpha > 0.0 && alpha <= 1.0,
        "the sample fraction must lie in (0, 1]"
    );
    let n = requests.len();
    let k = ((alpha * n as f64).round() as usize).min(n);
    let sampled = sample_indices(n, k, &mut rngs.mock_draw);
    let sample: Vec<Request> = sampled.iter().map(|&i| requests[i]).collect();

    feed_free_order(algo, sample.clone(), &mut rngs.shuffle, &mut rngs.algorithm)?;
    let mock_solution = algo.solution().clone();
    let mock_cost = mock_solution.cost();

    let mut solution = mock_solution.clone();
    let (backup_cost, backups) =
        stream_with_backups(instance, &mut solution, None, requests, sample)?;

    Ok(ReductionReport {
        total: mock_cost + backup_cost,
        mock_cost,
        backup_cost,
        backup_raw: backup_cost,
        backups,
        solution,
        mock_solution,
        arrivals: requests.to_vec(),
    })
}
