//! Random-order set multicover by learn-or-cover: maintain a weight vector
//! over columns summing to the budget guess β, and on every uncovered arrival
//! either *cover* (sample columns proportionally to their weights, scaled by
//! the row's deficiency) or *learn* (multiplicatively boost the weights of the
//! columns that could have helped, then renormalize) — plus a deficiency-sized
//! backup purchase so every row is satisfied the moment it arrives. A
//! guess-and-double wrapper grows β when a phase overspends its budget.
//!
//! Costs are unit (one per column), so the weight invariant is `Σ x = β`.

use rand::Rng;

use crate::covering::{CoveringProblem, Request, Solution};
use crate::error::{Error, Result};
use crate::instances::SmcInstance;
use crate::money::Money;
use crate::rng::SubRng;

/// Default phase-budget constant: a phase ends when it has spent more than
/// `K·β·(1 + ln(m·n))`.
pub const DEFAULT_DOUBLING_CONSTANT: f64 = 8.0;

/// Tuning knobs for [`LearnOrCoverSmc`].
#[derive(Clone, Debug)]
pub struct SmcConfig {
    /// Initial budget guess; defaults to one unit (the cheapest nonzero
    /// spend under unit costs).
    pub initial_budget: Option<Money>,
    /// Restrict sampling to the arriving row's unbought support instead of
    /// all unbought columns.
    pub sample_support_only: bool,
    /// The `K` in the phase-budget threshold `K·β·(1 + ln(m·n))`.
    pub doubling_constant: f64,
}

impl Default for SmcConfig {
    fn default() -> Self {
        SmcConfig {
            initial_budget: None,
            sample_support_only: false,
            doubling_constant: DEFAULT_DOUBLING_CONSTANT,
        }
    }
}

/// What one arrival did, for reporting and diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct SmcRound {
    /// Round number, starting at 1.
    pub round: u64,
    /// The arriving row was already covered, so nothing happened.
    pub covered_on_arrival: bool,
    /// Weight mass on the row's unbought support before sampling (X).
    pub support_mass: f64,
    /// Deficiency on arrival (d).
    pub deficiency: u32,
    /// Columns bought this round.
    pub bought: u32,
    /// Money spent this round (= `bought` in units).
    pub spend: Money,
    /// Whether the multiplicative update branch ran (X ≤ d).
    pub updated: bool,
}

/// Numerical health counters accumulated over a run.
#[derive(Clone, Copy, Debug, Default)]
pub struct SmcHealth {
    /// Rounds where a sampling probability had to be clamped to 1.
    pub clamp_saturations: u64,
    /// Worst relative deviation of `Σ x` from β observed after any round.
    pub max_budget_drift: f64,
    /// Worst excess of an unbought support weight above 1 right after an
    /// update round (the analysis promises none).
    pub max_weight_excess: f64,
}

/// The learn-or-cover set multicover algorithm.
#[derive(Clone, Debug)]
pub struct LearnOrCoverSmc {
    instance: SmcInstance,
    config: SmcConfig,
    beta: Money,
    x: Vec<f64>,
    solution: Solution,
    rounds: u64,
    phases: u32,
    phase_spend: Money,
    health: SmcHealth,
}

impl LearnOrCoverSmc {
    pub fn new(instance: SmcInstance, config: SmcConfig) -> Result<LearnOrCoverSmc> {
        if let Some(b) = config.initial_budget {
            if b.is_zero() {
                return Err(Error::InvalidInstance(
                    "initial budget must be positive".into(),
                ));
            }
        }
        if !(config.doubling_constant.is_finite() && config.doubling_constant > 0.0) {
            return Err(Error::InvalidInstance(
                "doubling constant must be positive and finite".into(),
            ));
        }
        let beta = config.initial_budget.unwrap_or(Money::from_units(1));
        let m = instance.num_columns();
        let x = vec![beta.as_f64() / m as f64; m];
        let solution = Solution::new(m);
        Ok(LearnOrCoverSmc {
            instance,
            config,
            beta,
            x,
            solution,
            rounds: 0,
            phases: 1,
            phase_spend: Money::ZERO,
            health: SmcHealth::default(),
        })
    }

    pub fn instance(&self) -> &SmcInstance {
        &self.instance
    }

    pub fn solution(&self) -> &Solution {
        &self.solution
    }

    pub fn weights(&self) -> &[f64] {
        &self.x
    }

    pub fn budget(&self) -> Money {
        self.beta
    }

    pub fn phases(&self) -> u32 {
        self.phases
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn health(&self) -> SmcHealth {
        self.health
    }

    fn double(&mut self) {
        self.beta = self.beta.scaled(2);
        let m = self.instance.num_columns();
        self.x = vec![self.beta.as_f64() / m as f64; m];
        self.phase_spend = Money::ZERO;
        self.phases += 1;
    }

    /// The phase budget `K·β·(1 + ln(m·n))`.
    fn phase_budget(&self) -> f64 {
        let m = self.instance.num_columns() as f64;
        let n = self.instance.num_rows() as f64;
        self.config.doubling_constant * self.beta.as_f64() * (1.0 + (m * n).ln())
    }

    fn buy(&mut self, j: usize) -> Money {
        self.solution.raise_to(j, 1, Money::from_units(1))
    }

    /// Process one arriving row.
    pub fn process(&mut self, request: Request, rng: &mut SubRng) -> Result<SmcRound> {
        self.instance.validate_request(request)?;
        let Request::Row(i) = request else {
            unreachable!("validated multicover requests are rows")
        };
        self.rounds += 1;
        let round = self.rounds;

        let d = self.instance.deficiency(&self.solution, i);
        if d == 0 {
            return Ok(SmcRound {
                round,
                covered_on_arrival: true,
                support_mass: 0.0,
                deficiency: 0,
                bought: 0,
                spend: Money::ZERO,
                updated: false,
            });
        }

        // The analysis needs d ≤ β; a bigger deficiency proves the guess low.
        while Money::from_units(d as u64) > self.beta {
            self.double();
        }
        let beta_units = self.beta.as_f64();

        // Snapshot the decision quantities before any randomness.
        let support: Vec<usize> = self.instance.row_support(i).to_vec();
        let unbought_support: Vec<usize> = support
            .iter()
            .copied()
            .filter(|&j| self.solution.level(j) == 0)
            .collect();
        let support_mass: f64 = unbought_support.iter().map(|&j| self.x[j]).sum();

        let mut spend = Money::ZERO;

        // Cover step: sample every unbought column (or only the row's
        // unbought support) with probability d·x_j/β, clamped into [0,1].
        let mut clamped = false;
        let universe: Vec<usize> = if self.config.sample_support_only {
            unbought_support.clone()
        } else {
            (0..self.instance.num_columns())
                .filter(|&j| self.solution.level(j) == 0)
                .collect()
        };
        for j in universe {
            let raw = d as f64 * self.x[j] / beta_units;
            let p = if raw > 1.0 {
                clamped = true;
                1.0
            } else {
                raw.max(0.0)
            };
            if rng.gen_bool(p) {
                spend += self.buy(j);
            }
        }
        if clamped {
            self.health.clamp_saturations += 1;
        }

        // Learn step: when the support mass was no bigger than the
        // deficiency, the weights underrate this row — buy the heavy support
        // columns outright, boost the whole support by e, renormalize.
        let updated = support_mass <= d as f64;
        if updated {
            let threshold = std::f64::consts::E.recip();
            for &j in &unbought_support {
                if self.x[j] >= threshold {
                    spend += self.buy(j);
                }
            }
            for &j in &unbought_support {
                self.x[j] *= std::f64::consts::E;
            }
            let total: f64 = self.x.iter().sum();
            let scale = beta_units / total;
            for w in &mut self.x {
                *w *= scale;
            }
            for &j in &unbought_support {
                if self.solution.level(j) == 0 {
                    let excess = self.x[j] - 1.0;
                    if excess > self.health.max_weight_excess {
                        self.health.max_weight_excess = excess;
                    }
                }
            }
        }

        // Backup step: whatever is still missing is bought outright, largest
        // weight first (ties toward the lowest column id).
        let residual = self.instance.deficiency(&self.solution, i);
        if residual > 0 {
            let mut candidates: Vec<usize> = support
                .iter()
                .copied()
                .filter(|&j| self.solution.level(j) == 0)
                .collect();
            if candidates.len() < residual as usize {
                return Err(Error::InfeasibleRow(i));
            }
            candidates.sort_by(|&a, &b| {
                self.x[b]
                    .partial_cmp(&self.x[a])
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.cmp(&b))
            });
            for &j in candidates.iter().take(residual as usize) {
                spend += self.buy(j);
            }
        }

        let drift = {
            let total: f64 = self.x.iter().sum();
            (total - beta_units).abs() / beta_units
        };
        if drift > self.health.max_budget_drift {
            self.health.max_budget_drift = drift;
        }

        self.phase_spend += spend;
        if self.phase_spend.as_f64() > self.phase_budget() {
            self.double();
        }

        Ok(SmcRound {
            round,
            covered_on_arrival: false,
            support_mass,
            deficiency: d,
            bought: (spend.micros() / crate::money::MONEY_SCALE) as u32,
            spend,
            updated,
        })
    }
}

/// One diagnostics row: the round's decision quantities plus the potentials
/// measured right after it, against an integral reference solution.
#[derive(Clone, Copy, Debug)]
pub struct SmcDiagnostic {
    pub round: u64,
    pub covered_on_arrival: bool,
    /// Weight mass on the arriving row's unbought support (X).
    pub support_mass: f64,
    /// Deficiency on arrival (d).
    pub deficiency: u32,
    /// Columns bought this round.
    pub bought: u32,
    /// Learning potential KL(x*‖x) after the round.
    pub phi_l: f64,
    /// Covering potential β·ln(ρ/β + 1/m) after the round, ρ the total
    /// deficiency of rows that have not arrived yet.
    pub phi_c: f64,
}

/// Aggregates of one full sequence run.
#[derive(Clone, Debug)]
pub struct SmcRunStats {
    pub total_spend: Money,
    pub beta_final: Money,
    pub phases: u32,
    pub rounds: u64,
    pub health: SmcHealth,
    /// Potentials (phi_l, phi_c) of the initial state, when diagnostics ran.
    pub initial_potentials: Option<(f64, f64)>,
    /// Per-round diagnostics; empty unless a reference solution was given.
    pub diagnostics: Vec<SmcDiagnostic>,
}

/// Run the algorithm over a whole arrival sequence. With `reference` (an
/// integral feasible solution, ideally an optimum), per-round potentials are
/// recorded: the learning part compares the weights against the reference,
/// the covering part tracks the deficiency mass of rows yet to arrive.
pub fn run_smc(
    instance: &SmcInstance,
    sequence: &[Request],
    config: SmcConfig,
    rng: &mut SubRng,
    reference: Option<&Solution>,
) -> Result<(Solution, SmcRunStats)> {
    let mut algo = LearnOrCoverSmc::new(instance.clone(), config)?;
    let m = instance.num_columns();
    let x_star: Option<Vec<f64>> = reference.map(|z| {
        (0..m).map(|j| if z.level(j) >= 1 { 1.0 } else { 0.0 }).collect()
    });
    let ones = vec![1.0; m];
    let mut arrived = vec![false; instance.num_rows()];

    let potentials = |algo: &LearnOrCoverSmc,
                      arrived: &[bool],
                      x_star: &[f64]|
     -> Result<(f64, f64)> {
        let phi_l = crate::covering::weighted_kl(&ones, x_star, algo.weights())?;
        let rho: f64 = (0..instance.num_rows())
            .filter(|&i| !arrived[i])
            .map(|i| instance.deficiency(algo.solution(), i) as f64)
            .sum();
        let beta = algo.budget().as_f64();
        let phi_c = beta * (rho / beta + 1.0 / m as f64).ln();
        Ok((phi_l, phi_c))
    };

    let initial_potentials = match &x_star {
        Some(xs) => Some(potentials(&algo, &arrived, xs)?),
        None => None,
    };

    let mut diagnostics = Vec::new();
    for &request in sequence {
        let round = algo.process(request, rng)?;
        if let Request::Row(i) = request {
            arrived[i] = true;
        }
        if let Some(xs) = &x_star {
            let (phi_l, phi_c) = potentials(&algo, &arrived, xs)?;
            diagnostics.push(SmcDiagnostic {
                round: round.round,
                covered_on_arrival: round.covered_on_arrival,
                support_mass: round.support_mass,
                deficiency: round.deficiency,
                bought: round.bought,
                phi_l,
                phi_c,
            });
        }
    }

    let stats = SmcRunStats {
        total_spend: algo.solution().cost(),
        beta_final: algo.budget(),
        phases: algo.phases(),
        rounds: algo.rounds(),
        health: algo.health(),
        initial_potentials,
        diagnostics,
    };
    Ok((algo.solution().clone(), stats))
}

impl crate::reductions::RandomOrderAlgorithm for LearnOrCoverSmc {
    fn feed(&mut self, request: Request, rng: &mut SubRng) -> Result<Money> {
        self.process(request, rng).map(|round| round.spend)
    }

    fn solution(&self) -> &Solution {
        &self.solution
    }
}
