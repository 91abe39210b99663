//! Ground-truth oracles: exact optima for small instances, greedy baselines
//! for large ones, batch augmentation costs, and exact expected optima under
//! product request distributions.
//!
//! These are the independent referees the rest of the crate is judged against:
//! competitive ratios divide algorithm spend by [`exact_opt`] (or
//! [`greedy_bound`] above the size guards, flagged non-exact), and the
//! structural properties of augmentation (monotonicity, subadditivity,
//! backup-equals-augmentation) are tested by comparing the per-problem
//! implementations against [`exact_augmentation`], which recomputes everything
//! by search over raw coordinate space.
//!
//! Exactness discipline: all optimum values are computed in integer micro-units
//! (never floats), and [`expected_opt_product`] returns a fully reduced big
//! rational, so equalities like "the expected optimum is exactly 5/4" are
//! decidable in tests.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::covering::{CoveringProblem, Request, Solution};
use crate::error::{Error, Result};
use crate::instances::{DiscreteDistribution, Instance};
use crate::money::{Cost, Money, MONEY_SCALE};
use crate::rng::{substream, Stream};

/// Exact cover search is limited to this many columns.
pub const EXACT_COVER_GUARD: usize = 30;
/// Exact facility-location search is limited to this many facilities.
pub const EXACT_FL_GUARD: usize = 20;
/// Product-distribution enumeration is limited to this many outcomes.
pub const PRODUCT_ENUMERATION_GUARD: u128 = 1_000_000;
/// Monte-Carlo sample count used above the enumeration guard.
const MONTE_CARLO_SAMPLES: u32 = 50_000;

/// The result of an optimum (or baseline) computation.
#[derive(Clone, Debug)]
pub struct OptResult {
    /// The optimum value; `Infinite` when no feasible solution exists.
    pub value: Cost,
    /// A minimizing solution when one exists.
    pub solution: Option<Solution>,
    /// True for exact searches, false for greedy baselines.
    pub exact: bool,
}

/// Exact optimum for serving `requests` from scratch. Dispatches to
/// branch-and-bound (covers, guard [`EXACT_COVER_GUARD`]) or subset
/// enumeration (facility location, guard [`EXACT_FL_GUARD`]).
pub fn exact_opt(instance: &Instance, requests: &[Request]) -> Result<OptResult> {
    for &r in requests {
        instance.validate_request(r)?;
    }
    match instance {
        Instance::SetCover(_) | Instance::Smc(_) => {
            guard_cover(instance.num_objects())?;
            let matrix = CoverMatrix::build(instance, requests, None)?;
            let (value, cols) = matrix.branch_and_bound();
            Ok(finish_cover(instance, value, cols))
        }
        Instance::Fl(fl) => {
            guard_fl(fl.num_facilities())?;
            let (value, solution) = fl_subset_search(instance, requests, None)?;
            Ok(OptResult {
                value,
                solution,
                exact: true,
            })
        }
    }
}

/// Greedy baseline (an upper bound on the optimum, flagged `exact: false`):
/// density greedy for covers, star greedy for facility location.
pub fn greedy_bound(instance: &Instance, requests: &[Request]) -> Result<OptResult> {
    for &r in requests {
        instance.validate_request(r)?;
    }
    match instance {
        Instance::SetCover(_) | Instance::Smc(_) => greedy_cover(instance, requests),
        Instance::Fl(_) => greedy_fl(instance, requests),
    }
}

/// Exact optimum when the instance is within the guards, greedy baseline
/// otherwise. This is what trial reports divide by.
pub fn reference_value(instance: &Instance, requests: &[Request]) -> Result<OptResult> {
    let within = match instance {
        Instance::SetCover(_) | Instance::Smc(_) => instance.num_objects() <= EXACT_COVER_GUARD,
        Instance::Fl(fl) => fl.num_facilities() <= EXACT_FL_GUARD,
    };
    if within {
        exact_opt(instance, requests)
    } else {
        greedy_bound(instance, requests)
    }
}

/// Exact batch augmentation cost
/// `min { c(w) : max(w, z) feasible for context ∪ additions }`, by full search
/// with `z` credited (bought columns/open facilities contribute for free).
/// The context is inert for these monotone problems but kept in the signature.
pub fn exact_augmentation(
    instance: &Instance,
    additions: &[Request],
    z: &Solution,
    _context: &[Request],
) -> Result<Cost> {
    for &r in additions {
        instance.validate_request(r)?;
    }
    instance.check_dims(z)?;
    match instance {
        Instance::SetCover(_) | Instance::Smc(_) => {
            guard_cover(instance.num_objects())?;
            let matrix = CoverMatrix::build(instance, additions, Some(z))?;
            let (value, _) = matrix.branch_and_bound();
            Ok(value)
        }
        Instance::Fl(_) => {
            guard_fl(instance.num_objects())?;
            let (value, _) = fl_subset_search(instance, additions, Some(z))?;
            Ok(value)
        }
    }
}

fn guard_cover(m: usize) -> Result<()> {
    if m > EXACT_COVER_GUARD {
        Err(Error::SizeGuard(format!(
            "exact cover search supports at most {EXACT_COVER_GUARD} columns, instance has {m}"
        )))
    } else {
        Ok(())
    }
}

fn guard_fl(m: usize) -> Result<()> {
    if m > EXACT_FL_GUARD {
        Err(Error::SizeGuard(format!(
            "exact facility search supports at most {EXACT_FL_GUARD} facilities, instance has {m}"
        )))
    } else {
        Ok(())
    }
}

fn finish_cover(instance: &Instance, value: Cost, cols: Option<Vec<usize>>) -> OptResult {
    let solution = cols.map(|cols| {
        let mut z = Solution::new(instance.num_coords());
        for j in cols {
            let unit = instance
                .coord_cost(j)
                .expect_finite("cover columns have finite cost");
            z.raise_to(j, 1, unit);
        }
        z
    });
    OptResult {
        value,
        solution,
        exact: true,
    }
}

// ---------------------------------------------------------------------------
// Cover branch and bound
// ---------------------------------------------------------------------------

/// The residual covering problem: deduplicated requested rows with positive
/// residual demand, plus per-column costs and row lists.
struct CoverMatrix {
    /// Candidate column ids (unbought, covering at least one residual row).
    columns: Vec<usize>,
    /// Cost of each candidate column, micro-units.
    col_cost: Vec<u64>,
    /// Rows each candidate column helps (indices into `rows`).
    col_rows: Vec<Vec<usize>>,
    /// Residual demand per row.
    demands: Vec<u32>,
    /// Candidate columns per row (indices into `columns`), ascending.
    row_cols: Vec<Vec<usize>>,
}

impl CoverMatrix {
    fn build(instance: &Instance, requests: &[Request], z: Option<&Solution>) -> Result<CoverMatrix> {
        let m = instance.num_objects();
        let bought = |j: usize| z.is_some_and(|z| z.level(j) >= 1);

        // Deduplicate requests and keep rows with positive residual demand.
        let mut seen = std::collections::BTreeSet::new();
        let mut raw_rows: Vec<(Vec<usize>, u32)> = Vec::new();
        for &r in requests {
            if !seen.insert(r) {
                continue;
            }
            let (support, demand): (Vec<usize>, u32) = match (instance, r) {
                (Instance::SetCover(sc), Request::Element(e)) => (sc.covering_sets(e), 1),
                (Instance::Smc(smc), Request::Row(i)) => {
                    (smc.row_support(i).to_vec(), smc.demand(i))
                }
                _ => unreachable!("validated requests match the instance kind"),
            };
            let covered = support.iter().filter(|&&j| bought(j)).count() as u32;
            let residual = demand.saturating_sub(covered);
            if residual == 0 {
                continue;
            }
            let open_support: Vec<usize> =
                support.into_iter().filter(|&j| !bought(j)).collect();
            raw_rows.push((open_support, residual));
        }

        let mut in_use = vec![false; m];
        for (support, _) in &raw_rows {
            for &j in support {
                in_use[j] = true;
            }
        }
        let columns: Vec<usize> = (0..m).filter(|&j| in_use[j]).collect();
        let col_pos: HashMap<usize, usize> =
            columns.iter().enumerate().map(|(p, &j)| (j, p)).collect();
        let col_cost: Vec<u64> = columns
            .iter()
            .map(|&j| {
                instance
                    .coord_cost(j)
                    .expect_finite("cover columns have finite cost")
                    .micros()
            })
            .collect();

        let mut row_cols = Vec::with_capacity(raw_rows.len());
        let mut demands = Vec::with_capacity(raw_rows.len());
        let mut col_rows = vec![Vec::new(); columns.len()];
        for (row_idx, (support, residual)) in raw_rows.into_iter().enumerate() {
            let cols: Vec<usize> = support.iter().map(|j| col_pos[j]).collect();
            for &c in &cols {
                col_rows[c].push(row_idx);
            }
            row_cols.push(cols);
            demands.push(residual);
        }

        Ok(CoverMatrix {
            columns,
            col_cost,
            col_rows,
            demands,
            row_cols,
        })
    }

    /// Exact minimum: branch on the first deficient row's candidate columns
    /// (each branch fixes the lowest-index chosen column and excludes the
    /// earlier ones), pruning with an exact density lower bound.
    fn branch_and_bound(&self) -> (Cost, Option<Vec<usize>>) {
        let mut residual = self.demands.clone();
        if residual.iter().all(|&d| d == 0) {
            return (Cost::ZERO, Some(Vec::new()));
        }
        let mut state = SearchState {
            matrix: self,
            chosen: Vec::new(),
            excluded: vec![false; self.columns.len()],
            residual: &mut residual,
            cost: 0,
            best_cost: u64::MAX,
            best_choice: None,
        };
        state.search();
        match state.best_choice {
            Some(cols) => (
                Cost::Finite(Money::from_micros(state.best_cost)),
                Some(cols.iter().map(|&c| self.columns[c]).collect()),
            ),
            None => (Cost::Infinite, None),
        }
    }
}

struct SearchState<'a> {
    matrix: &'a CoverMatrix,
    chosen: Vec<usize>,
    excluded: Vec<bool>,
    residual: &'a mut Vec<u32>,
    cost: u64,
    best_cost: u64,
    best_choice: Option<Vec<usize>>,
}

impl SearchState<'_> {
    fn search(&mut self) {
        // Feasibility and branching target: first row with positive residual.
        let mut target = None;
        for (i, &d) in self.residual.iter().enumerate() {
            if d == 0 {
                continue;
            }
            let available = self.matrix.row_cols[i]
                .iter()
                .filter(|&&c| !self.excluded[c])
                .count();
            if available < d as usize {
                return; // dead branch: this row can no longer be covered
            }
            if target.is_none() {
                target = Some(i);
            }
        }
        let Some(row) = target else {
            // Everything covered: candidate solution.
            if self.cost < self.best_cost {
                self.best_cost = self.cost;
                self.best_choice = Some(self.chosen.clone());
            }
            return;
        };
        if self.cost.saturating_add(self.lower_bound()) >= self.best_cost {
            return;
        }

        // Branch over which candidate of `row` is the lowest-index column we
        // buy next; excluding the earlier ones partitions the search space.
        let candidates: Vec<usize> = self.matrix.row_cols[row]
            .iter()
            .copied()
            .filter(|&c| !self.excluded[c])
            .collect();
        let mut newly_excluded = Vec::new();
        for &c in &candidates {
            // Include column c; remember exactly which rows it decremented so
            // saturated-at-zero rows revert correctly.
            self.chosen.push(c);
            self.excluded[c] = true;
            self.cost += self.matrix.col_cost[c];
            let mut decremented = Vec::new();
            for &r in &self.matrix.col_rows[c] {
                if self.residual[r] > 0 {
                    self.residual[r] -= 1;
                    decremented.push(r);
                }
            }
            self.search();
            for r in decremented {
                self.residual[r] += 1;
            }
            self.cost -= self.matrix.col_cost[c];
            self.chosen.pop();
            // Keep c excluded for the remaining branches of this node.
            newly_excluded.push(c);
        }
        for c in newly_excluded {
            self.excluded[c] = false;
        }
    }

    /// Admissible lower bound on the remaining cost: total residual demand
    /// times the best cost-per-unit-coverage among usable columns, in exact
    /// integer arithmetic (floored, hence admissible).
    fn lower_bound(&self) -> u64 {
        let total: u64 = self.residual.iter().map(|&d| d as u64).sum();
        if total == 0 {
            return 0;
        }
        // min over columns of cost/coverage, coverage counted against rows
        // that still need units.
        let mut best: Option<(u64, u64)> = None; // (cost, coverage) of min ratio
        for c in 0..self.matrix.columns.len() {
            if self.excluded[c] {
                continue;
            }
            let coverage = self.matrix.col_rows[c]
                .iter()
                .filter(|&&r| self.residual[r] > 0)
                .count() as u64;
            if coverage == 0 {
                continue;
            }
            let cost = self.matrix.col_cost[c];
            let better = match best {
                None => true,
                // cost/coverage < b_cost/b_cov  ⇔  cost·b_cov < b_cost·coverage
                Some((b_cost, b_cov)) => {
                    (cost as u128) * (b_cov as u128) < (b_cost as u128) * (coverage as u128)
                }
            };
            if better {
                best = Some((cost, coverage));
            }
        }
        match best {
            // floor(total · cost / coverage) never overestimates.
            Some((cost, coverage)) => {
                ((total as u128) * (cost as u128) / (coverage as u128)) as u64
            }
            None => u64::MAX, // nothing can cover: force the dead-branch path
        }
    }
}

// ---------------------------------------------------------------------------
// Facility location subset search
// ---------------------------------------------------------------------------

/// Exact facility-location optimum by dynamic programming over open-facility
/// subsets: for every mask, the cheapest connection per client is built
/// incrementally from the mask minus its lowest bit, then opening costs are
/// added and the global minimum taken. With `z`, open facilities cost nothing
/// extra, already-connected clients drop out, and the result is the exact
/// batch augmentation cost.
fn fl_subset_search(
    instance: &Instance,
    requests: &[Request],
    z: Option<&Solution>,
) -> Result<(Cost, Option<Solution>)> {
    let Instance::Fl(fl) = instance else {
        unreachable!("fl_subset_search is only called on facility instances")
    };
    let m = fl.num_facilities();
    const INF: u128 = u128::MAX / 4;

    // Clients still needing service, deduplicated.
    let mut seen = std::collections::BTreeSet::new();
    let mut clients = Vec::new();
    for &r in requests {
        if let Request::Client(v) = r {
            if seen.insert(v) {
                let served = match z {
                    Some(z) => fl.connected_facility(z, v).is_some(),
                    None => false,
                };
                if !served {
                    clients.push(v);
                }
            }
        }
    }
    if clients.is_empty() {
        return Ok((Cost::ZERO, Some(Solution::new(fl.num_coords()))));
    }

    let opening: Vec<u64> = (0..m)
        .map(|f| {
            if z.is_some_and(|z| z.level(f) >= 1) {
                0
            } else {
                fl.opening_cost(f).micros()
            }
        })
        .collect();

    let size = 1usize << m;
    // total[mask] = opening(mask) + Σ_v cheapest connection within mask.
    let mut total: Vec<u128> = vec![0; size];
    for mask in 1..size {
        let low = mask & mask.wrapping_neg();
        let f = low.trailing_zeros() as usize;
        total[mask] = total[mask ^ low] + opening[f] as u128;
    }
    let mut g: Vec<u128> = vec![0; size];
    for &v in &clients {
        g[0] = INF;
        for mask in 1..size {
            let low = mask & mask.wrapping_neg();
            let f = low.trailing_zeros() as usize;
            let direct = match fl.connection_cost(f, v) {
                Cost::Finite(c) => c.micros() as u128,
                Cost::Infinite => INF,
            };
            g[mask] = g[mask ^ low].min(direct);
        }
        for mask in 0..size {
            total[mask] = total[mask].saturating_add(g[mask]).min(INF);
        }
    }
    total[0] = INF; // at least one facility must open when clients exist

    let (best_mask, &best) = total
        .iter()
        .enumerate()
        .min_by_key(|&(mask, &cost)| (cost, mask))
        .expect("nonempty table");
    if best >= INF {
        return Ok((Cost::Infinite, None));
    }

    // Rebuild the witness: open the mask, connect each client to its cheapest
    // open facility (lowest id on ties).
    let mut solution = Solution::new(fl.num_coords());
    for f in 0..m {
        if best_mask >> f & 1 == 1 {
            solution.raise_to(f, 1, Money::from_micros(opening[f]));
        }
    }
    for &v in &clients {
        let assigned = (0..m)
            .filter(|&f| best_mask >> f & 1 == 1)
            .filter_map(|f| fl.connection_cost(f, v).finite().map(|c| (c, f)))
            .min()
            .expect("finite-cost witness must serve every client");
        solution.raise_to(fl.connection_coord(v, assigned.1), 1, assigned.0);
    }
    debug_assert_eq!(best as u64, solution.cost().micros(), "witness cost mismatch");
    Ok((Cost::Finite(Money::from_micros(best as u64)), Some(solution)))
}

// ---------------------------------------------------------------------------
// Greedy baselines
// ---------------------------------------------------------------------------

fn greedy_cover(instance: &Instance, requests: &[Request]) -> Result<OptResult> {
    let matrix = CoverMatrix::build(instance, requests, None)?;
    let mut residual = matrix.demands.clone();
    let mut bought = vec![false; matrix.columns.len()];
    let mut chosen = Vec::new();
    loop {
        let deficient: u64 = residual.iter().map(|&d| d as u64).sum();
        if deficient == 0 {
            break;
        }
        // Best density: maximize coverage/cost, i.e. minimize cost/coverage,
        // exact fraction comparison; ties toward the lowest column id.
        let mut best: Option<(usize, u64, u64)> = None; // (col, cost, coverage)
        for c in 0..matrix.columns.len() {
            if bought[c] {
                continue;
            }
            let coverage = matrix.col_rows[c]
                .iter()
                .filter(|&&r| residual[r] > 0)
                .count() as u64;
            if coverage == 0 {
                continue;
            }
            let cost = matrix.col_cost[c];
            let better = match best {
                None => true,
                Some((_, b_cost, b_cov)) => {
                    (cost as u128) * (b_cov as u128) < (b_cost as u128) * (coverage as u128)
                }
            };
            if better {
                best = Some((c, cost, coverage));
            }
        }
        let Some((c, _, _)) = best else {
            return Ok(OptResult {
                value: Cost::Infinite,
                solution: None,
                exact: false,
            });
        };
        bought[c] = true;
        chosen.push(matrix.columns[c]);
        for &r in &matrix.col_rows[c] {
            residual[r] = residual[r].saturating_sub(1);
        }
    }
    let result = finish_cover(instance, Cost::ZERO, Some(chosen));
    let solution = result.solution.unwrap();
    Ok(OptResult {
        value: Cost::Finite(solution.cost()),
        solution: Some(solution),
        exact: false,
    })
}

/// Star greedy for facility location: repeatedly buy the best-density star
/// (one facility plus a prefix of its nearest unserved clients), re-treating
/// already-open facilities as free.
fn greedy_fl(instance: &Instance, requests: &[Request]) -> Result<OptResult> {
    let Instance::Fl(fl) = instance else {
        unreachable!("greedy_fl is only called on facility instances")
    };
    let m = fl.num_facilities();
    let mut seen = std::collections::BTreeSet::new();
    let mut unserved: Vec<usize> = Vec::new();
    for &r in requests {
        if let Request::Client(v) = r {
            if seen.insert(v) {
                unserved.push(v);
            }
        }
    }
    let mut solution = Solution::new(fl.num_coords());
    while !unserved.is_empty() {
        // (cost_micros, size) of the best star, fraction-compared.
        let mut best: Option<(u64, usize, usize, Vec<usize>)> = None; // cost, k, f, clients
        for f in 0..m {
            let open_cost = if solution.level(f) >= 1 {
                0
            } else {
                fl.opening_cost(f).micros()
            };
            let mut reachable: Vec<(u64, usize)> = unserved
                .iter()
                .filter_map(|&v| fl.connection_cost(f, v).finite().map(|c| (c.micros(), v)))
                .collect();
            reachable.sort_unstable();
            let mut run_cost = open_cost;
            let mut members = Vec::new();
            for (k, &(conn, v)) in reachable.iter().enumerate() {
                run_cost += conn;
                members.push(v);
                let size = k + 1;
                let better = match &best {
                    None => true,
                    Some((b_cost, b_k, b_f, _)) => {
                        let lhs = run_cost as u128 * *b_k as u128;
                        let rhs = *b_cost as u128 * size as u128;
                        lhs < rhs || (lhs == rhs && (f, std::cmp::Reverse(size)) < (*b_f, std::cmp::Reverse(*b_k)))
                    }
                };
                if better {
                    best = Some((run_cost, size, f, members.clone()));
                }
            }
        }
        let Some((_, _, f, members)) = best else {
            return Ok(OptResult {
                value: Cost::Infinite,
                solution: None,
                exact: false,
            });
        };
        solution.raise_to(f, 1, fl.opening_cost(f));
        for v in members {
            let conn = fl
                .connection_cost(f, v)
                .expect_finite("star members are reachable");
            solution.raise_to(fl.connection_coord(v, f), 1, conn);
            unserved.retain(|&u| u != v);
        }
    }
    Ok(OptResult {
        value: Cost::Finite(solution.cost()),
        solution: Some(solution),
        exact: false,
    })
}

// ---------------------------------------------------------------------------
// Expected optima under product distributions
// ---------------------------------------------------------------------------

/// The expected optimum, exact or estimated.
#[derive(Clone, Debug)]
pub enum IidExpectation {
    /// Exact rational expectation, in whole money units.
    Exact(BigRational),
    /// Monte-Carlo estimate with its standard error.
    Estimate {
        mean: f64,
        std_error: f64,
        samples: u32,
    },
}

impl IidExpectation {
    /// The value as a real number.
    pub fn as_f64(&self) -> f64 {
        match self {
            IidExpectation::Exact(q) => rational_to_f64(q),
            IidExpectation::Estimate { mean, .. } => *mean,
        }
    }
}

fn rational_to_f64(q: &BigRational) -> f64 {
    // Adequate for reporting: micro-unit optima are far below 2^53.
    let numer = q.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
    let denom = q.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
    numer / denom
}

/// Exact expectation of `opt(drawn set)` when slot `t` draws independently
/// from `slots[t]`: full enumeration of the product support (guarded by
/// [`PRODUCT_ENUMERATION_GUARD`]), optima memoized per distinct request set,
/// result an exactly reduced rational in whole money units.
pub fn expected_opt_product(
    instance: &Instance,
    slots: &[&DiscreteDistribution],
) -> Result<BigRational> {
    let mut outcomes: u128 = 1;
    for d in slots {
        outcomes = outcomes
            .checked_mul(d.support_size() as u128)
            .filter(|&o| o <= PRODUCT_ENUMERATION_GUARD)
            .ok_or_else(|| {
                Error::SizeGuard(format!(
                    "product enumeration exceeds {PRODUCT_ENUMERATION_GUARD} outcomes"
                ))
            })?;
    }
    if slots.is_empty() {
        return Ok(BigRational::from_integer(BigInt::from(0)));
    }

    let mut opt_cache: HashMap<Vec<Request>, u64> = HashMap::new();
    let mut numerator = BigInt::from(0);
    let mut denominator = BigInt::from(1);
    for d in slots {
        denominator *= BigInt::from(d.total_weight());
    }

    // Odometer over per-slot support indices.
    let mut idx = vec![0usize; slots.len()];
    loop {
        let mut weight = BigInt::from(1);
        let mut drawn: Vec<Request> = Vec::with_capacity(slots.len());
        for (t, d) in slots.iter().enumerate() {
            let (r, w) = d.entries()[idx[t]];
            weight *= BigInt::from(w);
            drawn.push(r);
        }
        drawn.sort_unstable();
        drawn.dedup();
        let opt_micros = match opt_cache.get(&drawn) {
            Some(&v) => v,
            None => {
                let result = exact_opt(instance, &drawn)?;
                let v = result
                    .value
                    .finite()
                    .ok_or(Error::NoAugmentation)?
                    .micros();
                opt_cache.insert(drawn.clone(), v);
                v
            }
        };
        numerator += weight * BigInt::from(opt_micros);

        // Advance the odometer.
        let mut t = 0;
        loop {
            if t == slots.len() {
                let denom = denominator * BigInt::from(MONEY_SCALE);
                return Ok(BigRational::new(numerator, denom));
            }
            idx[t] += 1;
            if idx[t] < slots[t].support_size() {
                break;
            }
            idx[t] = 0;
            t += 1;
        }
    }
}

/// Expected optimum of `n_draws` i.i.d. draws from `d`: exact enumeration via
/// [`expected_opt_product`] within the guard, Monte-Carlo with a reported
/// standard error beyond it (`mc_seed` drives the fallback's randomness).
pub fn expected_opt_iid(
    instance: &Instance,
    d: &DiscreteDistribution,
    n_draws: usize,
    mc_seed: u64,
) -> Result<IidExpectation> {
    if n_draws == 0 {
        return Ok(IidExpectation::Exact(BigRational::from_integer(
            BigInt::from(0),
        )));
    }
    let slots: Vec<&DiscreteDistribution> = std::iter::repeat_n(d, n_draws).collect();
    match expected_opt_product(instance, &slots) {
        Ok(exact) => Ok(IidExpectation::Exact(exact)),
        Err(Error::SizeGuard(_)) => {
            let mut rng = substream(mc_seed, Stream::MockDraw);
            let mut opt_cache: HashMap<Vec<Request>, f64> = HashMap::new();
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..MONTE_CARLO_SAMPLES {
                let mut drawn: Vec<Request> =
                    (0..n_draws).map(|_| d.sample(&mut rng)).collect();
                drawn.sort_unstable();
                drawn.dedup();
                let value = match opt_cache.get(&drawn) {
                    Some(&v) => v,
                    None => {
                        let v = exact_opt(instance, &drawn)?
                            .value
                            .finite()
                            .ok_or(Error::NoAugmentation)?
                            .as_f64();
                        opt_cache.insert(drawn.clone(), v);
                        v
                    }
                };
                sum += value;
                sum_sq += value * value;
            }
            let n = MONTE_CARLO_SAMPLES as f64;
            let mean = sum / n;
            let variance = (sum_sq / n - mean * mean).max(0.0);
            Ok(IidExpectation::Estimate {
                mean,
                std_error: (variance / n).sqrt(),
                samples: MONTE_CARLO_SAMPLES,
            })
        }
        Err(e) => Err(e),
    }
}
