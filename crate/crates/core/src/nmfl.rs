//! Random-order non-metric facility location by learn-or-cover: keep a
//! fractional weight vector over facilities whose cost mass equals the budget
//! guess β, and on each arriving client either *cover* (sample facilities
//! with probability proportional to κ·x_f, where κ is the client's marginal
//! service cost) or *learn* (exponentially boost the facilities that would
//! have halved the client's service cost, then renormalize the cost mass back
//! to β). Every client is connected at arrival to the facility that was
//! cheapest before sampling, so feasibility never waits on luck. A
//! guess-and-double wrapper grows β whenever a phase overspends or the
//! marginal cost of a client exceeds the guess.
//!
//! Weighted set cover is served by the same algorithm through instances whose
//! connection costs are 0 (member) or ∞ (non-member).

use rand::Rng;

use crate::covering::{CoveringProblem, Request, Solution};
use crate::error::{Error, Result};
use crate::instances::FlInstance;
use crate::money::Money;
use crate::rng::SubRng;
use crate::smc::DEFAULT_DOUBLING_CONSTANT;

/// Weight floor used only when reporting potentials, so that KL terms against
/// facilities outside the current phase support stay finite. Within a phase
/// those weights are constant (zero), so the floor cancels in differences.
pub const POTENTIAL_WEIGHT_FLOOR: f64 = 1e-12;

/// Tuning knobs for [`LearnOrCoverNmfl`].
#[derive(Clone, Debug)]
pub struct NmflConfig {
    /// Initial budget guess; defaults to the first client's marginal service
    /// cost (or the smallest representable amount if that is zero).
    pub initial_budget: Option<Money>,
    /// Recompute the backup facility after sampling instead of connecting to
    /// the pre-sampling choice. Default off: the pre-sampling choice is the
    /// faithful one, recomputation can only be cheaper.
    pub recompute_backup: bool,
    /// The `K` in the phase-budget threshold `K·β·(1 + ln(m·n))`.
    pub doubling_constant: f64,
}

impl Default for NmflConfig {
    fn default() -> Self {
        NmflConfig {
            initial_budget: None,
            recompute_backup: false,
            doubling_constant: DEFAULT_DOUBLING_CONSTANT,
        }
    }
}

/// What one arrival did.
#[derive(Clone, Copy, Debug)]
pub struct NmflRound {
    /// Round number, starting at 1.
    pub round: u64,
    /// The client was already connected (repeat arrival): nothing happened.
    pub connected_on_arrival: bool,
    /// The client's marginal service cost on arrival (κ).
    pub kappa: Money,
    /// Whether the sample-and-learn branch ran (κ ≥ β/t).
    pub xi_event: bool,
    /// Money spent this round (sampled openings + backup service).
    pub spend: Money,
    /// Whether the multiplicative update ran (Ξ and the halving facilities
    /// carried less than unit weight).
    pub updated: bool,
}

/// Numerical health counters accumulated over a run.
#[derive(Clone, Copy, Debug, Default)]
pub struct NmflHealth {
    /// Rounds where a sampling probability had to be clamped to 1.
    pub clamp_saturations: u64,
    /// Worst relative deviation of ⟨c,x⟩ from β observed after any round.
    pub max_budget_drift: f64,
}

/// Per-phase weight state: the support and the fractional weights.
#[derive(Clone, Debug)]
struct PhaseWeights {
    /// x_f per facility; zero outside the phase support.
    x: Vec<f64>,
    /// Whether any facility carries weight (false only when every opening
    /// cost is zero, where the weight vector is irrelevant).
    live: bool,
}

/// The learn-or-cover facility-location algorithm.
#[derive(Clone, Debug)]
pub struct LearnOrCoverNmfl {
    instance: FlInstance,
    config: NmflConfig,
    /// None until the first client fixes the default budget.
    beta: Option<Money>,
    weights: PhaseWeights,
    solution: Solution,
    rounds: u64,
    phases: u32,
    phase_spend: Money,
    health: NmflHealth,
}

impl LearnOrCoverNmfl {
    pub fn new(instance: FlInstance, config: NmflConfig) -> Result<LearnOrCoverNmfl> {
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
        let solution = Solution::new(instance.num_coords());
        let beta = config.initial_budget;
        let mut algo = LearnOrCoverNmfl {
            instance,
            config,
            beta: None,
            weights: PhaseWeights {
                x: Vec::new(),
                live: false,
            },
            solution,
            rounds: 0,
            phases: 0,
            phase_spend: Money::ZERO,
            health: NmflHealth::default(),
        };
        if let Some(b) = beta {
            algo.start_first_phase(b);
        }
        Ok(algo)
    }

    pub fn instance(&self) -> &FlInstance {
        &self.instance
    }

    pub fn solution(&self) -> &Solution {
        &self.solution
    }

    /// Facility weights; zero outside the current phase support. Empty until
    /// the first client arrives (the default budget is derived from it).
    pub fn weights(&self) -> &[f64] {
        &self.weights.x
    }

    /// Current budget guess; None until the first client arrives.
    pub fn budget(&self) -> Option<Money> {
        self.beta
    }

    pub fn phases(&self) -> u32 {
        self.phases
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn health(&self) -> NmflHealth {
        self.health
    }

    fn start_first_phase(&mut self, beta0: Money) {
        self.beta = Some(beta0);
        self.phases = 1;
        self.phase_spend = Money::ZERO;
        self.reset_weights();
    }

    fn double(&mut self) {
        let beta = self.beta.expect("doubling requires an initialized budget");
        self.beta = Some(beta.scaled(2));
        self.phases += 1;
        self.phase_spend = Money::ZERO;
        self.reset_weights();
    }

    /// Rebuild the phase support and weights for the current β: facilities
    /// with β/m ≤ c_f ≤ β, each given weight β/(m'·c_f) so the cost mass is
    /// exactly β. Falls back to every positively-priced affordable facility
    /// when that band is empty, doubling β until some facility qualifies. If
    /// no facility has a positive opening cost at all, weights stay zero (the
    /// cost-mass invariant is vacuous: sampling is free).
    fn reset_weights(&mut self) {
        let m = self.instance.num_facilities();
        let any_positive = (0..m).any(|f| !self.instance.opening_cost(f).is_zero());
        if !any_positive {
            self.weights = PhaseWeights {
                x: vec![0.0; m],
                live: false,
            };
            return;
        }
        loop {
            let beta = self.beta.expect("weights require an initialized budget");
            let band: Vec<usize> = (0..m)
                .filter(|&f| {
                    let c = self.instance.opening_cost(f);
                    !c.is_zero()
                        && c <= beta
                        && (c.micros() as u128) * (m as u128) >= beta.micros() as u128
                })
                .collect();
            let support = if band.is_empty() {
                (0..m)
                    .filter(|&f| {
                        let c = self.instance.opening_cost(f);
                        !c.is_zero() && c <= beta
                    })
                    .collect()
            } else {
                band
            };
            if support.is_empty() {
                // Every positively-priced facility costs more than β: this
                // phase could never open anything, skip it.
                self.beta = Some(beta.scaled(2));
                self.phases += 1;
                continue;
            }
            let mut x = vec![0.0; m];
            let m_prime = support.len() as f64;
            for &f in &support {
                x[f] = beta.as_f64() / (m_prime * self.instance.opening_cost(f).as_f64());
            }
            self.weights = PhaseWeights { x, live: true };
            return;
        }
    }

    /// The phase budget `K·β·(1 + ln(m·n))`.
    fn phase_budget(&self) -> f64 {
        let m = self.instance.num_facilities() as f64;
        let n = self.instance.num_clients() as f64;
        let beta = self.beta.expect("initialized").as_f64();
        self.config.doubling_constant * beta * (1.0 + (m * n).ln())
    }

    /// The marginal cost of serving `v` now: cheapest (opening if closed) +
    /// connection over facilities with finite edges, ties to the lowest id.
    pub fn marginal_service(&self, v: usize) -> Result<(Money, usize)> {
        self.instance
            .cheapest_service(&self.solution, v)
            .ok_or(Error::InfeasibleClient(v))
    }

    fn open_if_closed(&mut self, f: usize) -> Money {
        self.solution.raise_to(f, 1, self.instance.opening_cost(f))
    }

    /// Process one arriving client.
    pub fn process(&mut self, request: Request, rng: &mut SubRng) -> Result<NmflRound> {
        self.instance.validate_request(request)?;
        let Request::Client(v) = request else {
            unreachable!("validated facility-location requests are clients")
        };
        self.rounds += 1;
        let round = self.rounds;

        if self.instance.connected_facility(&self.solution, v).is_some() {
            return Ok(NmflRound {
                round,
                connected_on_arrival: true,
                kappa: Money::ZERO,
                xi_event: false,
                spend: Money::ZERO,
                updated: false,
            });
        }

        let (kappa, backup_f) = self.marginal_service(v)?;
        if self.beta.is_none() {
            let beta0 = if kappa.is_zero() {
                Money::EPSILON
            } else {
                kappa
            };
            self.start_first_phase(beta0);
        }
        // A marginal cost above β proves the guess low.
        while kappa > self.beta.expect("initialized") {
            self.double();
        }
        let beta = self.beta.expect("initialized");

        // Ξ test: κ ≥ β/t, exactly, in integer micro-units.
        let xi_event =
            kappa.micros() as u128 * self.rounds as u128 >= beta.micros() as u128;

        let mut spend = Money::ZERO;
        let mut updated = false;
        if xi_event {
            // Cover step: sample each facility with probability κ·x_f/β.
            let kappa_units = kappa.as_f64();
            let beta_units = beta.as_f64();
            let mut clamped = false;
            for f in 0..self.instance.num_facilities() {
                let raw = kappa_units * self.weights.x[f] / beta_units;
                let p = if raw > 1.0 {
                    clamped = true;
                    1.0
                } else {
                    raw.max(0.0)
                };
                if p > 0.0 && rng.gen_bool(p) {
                    spend += self.open_if_closed(f);
                }
            }
            if clamped {
                self.health.clamp_saturations += 1;
            }

            // Learn step: the halving set is the facilities that would cut
            // this client's service cost at least in half. If it carries
            // less than unit weight, the weights underrate it: boost each
            // member by exp(κ/c_f) and renormalize the cost mass to β.
            if !kappa.is_zero() && self.weights.live {
                let halving: Vec<usize> = (0..self.instance.num_facilities())
                    .filter(|&f| match self.instance.connection_cost(f, v).finite() {
                        Some(c) => 2 * (c.micros() as u128) <= kappa.micros() as u128,
                        None => false,
                    })
                    .collect();
                let halving_mass: f64 = halving.iter().map(|&f| self.weights.x[f]).sum();
                if halving_mass < 1.0 {
                    updated = true;
                    for &f in &halving {
                        let c_f = self.instance.opening_cost(f).as_f64();
                        let exponent = kappa_units / c_f;
                        if exponent > 2.0 + 1e-9 {
                            return Err(Error::Invariant(format!(
                                "halving-set exponent {exponent} exceeds 2 for facility {f}"
                            )));
                        }
                        self.weights.x[f] *= exponent.exp();
                    }
                    let mass: f64 = (0..self.instance.num_facilities())
                        .map(|f| self.instance.opening_cost(f).as_f64() * self.weights.x[f])
                        .sum();
                    let scale = beta_units / mass;
                    for w in &mut self.weights.x {
                        *w *= scale;
                    }
                }
            }
        }

        // Backup step: connect to the facility that was cheapest before
        // sampling (or re-derived after it, under the improved variant),
        // paying its opening only if it is still closed.
        let connect_f = if self.config.recompute_backup {
            self.marginal_service(v)?.1
        } else {
            backup_f
        };
        spend += self.open_if_closed(connect_f);
        let conn = self
            .instance
            .connection_cost(connect_f, v)
            .expect_finite("backup facility has a finite edge");
        spend += self
            .solution
            .raise_to(self.instance.connection_coord(v, connect_f), 1, conn);

        if self.weights.live {
            let beta_units = self.beta.expect("initialized").as_f64();
            let mass: f64 = (0..self.instance.num_facilities())
                .map(|f| self.instance.opening_cost(f).as_f64() * self.weights.x[f])
                .sum();
            let drift = (mass - beta_units).abs() / beta_units;
            if drift > self.health.max_budget_drift {
                self.health.max_budget_drift = drift;
            }
        }

        self.phase_spend += spend;
        if self.phase_spend.as_f64() > self.phase_budget() {
            self.double();
        }

        Ok(NmflRound {
            round,
            connected_on_arrival: false,
            kappa,
            xi_event,
            spend,
            updated,
        })
    }
}

/// One diagnostics row: the round's decision quantities plus the potentials
/// measured right after it, against an integral reference solution.
#[derive(Clone, Copy, Debug)]
pub struct NmflDiagnostic {
    pub round: u64,
    pub connected_on_arrival: bool,
    /// Marginal service cost of the arriving client (κ).
    pub kappa: Money,
    /// Whether the preemptive-connection test κ ≥ β/t fired.
    pub xi_event: bool,
    /// Amount spent this round.
    pub spend: Money,
    /// Learning potential: cost-weighted KL of the reference openings against
    /// the current weights, plus twice the reference service cost of clients
    /// yet to arrive.
    pub phi_l: f64,
    /// Covering potential β·ln(ρ/β + 1/n), ρ the total marginal service cost
    /// of unconnected clients that have not arrived yet.
    pub phi_c: f64,
}

/// Aggregates of one full sequence run.
#[derive(Clone, Debug)]
pub struct NmflRunStats {
    pub total_spend: Money,
    pub beta_final: Money,
    pub phases: u32,
    pub rounds: u64,
    pub health: NmflHealth,
    /// Potentials (phi_l, phi_c) of the initial state, when diagnostics ran.
    pub initial_potentials: Option<(f64, f64)>,
    /// Per-round diagnostics; empty unless a reference solution was given.
    pub diagnostics: Vec<NmflDiagnostic>,
}

/// Run the algorithm over a whole arrival sequence. With `reference` (an
/// integral feasible solution, ideally an optimum), per-round potentials are
/// recorded. Diagnostics need a budget that exists before the first arrival,
/// so they require an explicit initial budget in the config.
pub fn run_nmfl(
    instance: &FlInstance,
    sequence: &[Request],
    config: NmflConfig,
    rng: &mut SubRng,
    reference: Option<&Solution>,
) -> Result<(Solution, NmflRunStats)> {
    if reference.is_some() && config.initial_budget.is_none() {
        return Err(Error::Unsupported(
            "potential diagnostics need an explicit initial budget".into(),
        ));
    }
    let mut algo = LearnOrCoverNmfl::new(instance.clone(), config)?;
    let m = instance.num_facilities();
    let n = instance.num_clients();
    let costs: Vec<f64> = (0..m).map(|f| instance.opening_cost(f).as_f64()).collect();
    let x_star: Option<Vec<f64>> = reference.map(|z| {
        (0..m).map(|f| if z.level(f) >= 1 { 1.0 } else { 0.0 }).collect()
    });
    // Reference service cost per client, for the unlearned part of phi_l.
    let ref_service: Option<Vec<f64>> = reference.map(|z| {
        (0..n)
            .map(|v| match instance.connected_facility(z, v) {
                Some(f) => instance
                    .connection_cost(f, v)
                    .finite()
                    .map_or(0.0, |c| c.as_f64()),
                None => 0.0,
            })
            .collect()
    });
    let mut arrived = vec![false; n];

    let potentials = |algo: &LearnOrCoverNmfl,
                      arrived: &[bool],
                      x_star: &[f64],
                      ref_service: &[f64]|
     -> Result<(f64, f64)> {
        // Zero weights with a positive reference level would put the KL
        // outside its domain; the floor is constant within a phase, so
        // round-to-round deltas are unaffected.
        let floored: Vec<f64> = algo
            .weights()
            .iter()
            .zip(x_star)
            .map(|(&w, &xs)| if xs > 0.0 { w.max(POTENTIAL_WEIGHT_FLOOR) } else { w })
            .collect();
        let mut phi_l = crate::covering::weighted_kl(&costs, x_star, &floored)?;
        let mut rho = 0.0;
        for v in 0..n {
            if arrived[v] {
                continue;
            }
            phi_l += 2.0 * ref_service[v];
            if instance.connected_facility(algo.solution(), v).is_none() {
                rho += algo.marginal_service(v)?.0.as_f64();
            }
        }
        let beta = algo
            .budget()
            .expect("diagnostics require an initial budget")
            .as_f64();
        let phi_c = beta * (rho / beta + 1.0 / n as f64).ln();
        Ok((phi_l, phi_c))
    };

    let initial_potentials = match (&x_star, &ref_service) {
        (Some(xs), Some(rs)) => Some(potentials(&algo, &arrived, xs, rs)?),
        _ => None,
    };

    let mut diagnostics = Vec::new();
    for &request in sequence {
        let round = algo.process(request, rng)?;
        if let Request::Client(v) = request {
            arrived[v] = true;
        }
        if let (Some(xs), Some(rs)) = (&x_star, &ref_service) {
            let (phi_l, phi_c) = potentials(&algo, &arrived, xs, rs)?;
            diagnostics.push(NmflDiagnostic {
                round: round.round,
                connected_on_arrival: round.connected_on_arrival,
                kappa: round.kappa,
                xi_event: round.xi_event,
                spend: round.spend,
                phi_l,
                phi_c,
            });
        }
    }

    let stats = NmflRunStats {
        total_spend: algo.solution().cost(),
        beta_final: algo.budget().unwrap_or(Money::ZERO),
        phases: algo.phases(),
        rounds: algo.rounds(),
        health: algo.health(),
        initial_potentials,
        diagnostics,
    };
    Ok((algo.solution().clone(), stats))
}

impl crate::reductions::RandomOrderAlgorithm for LearnOrCoverNmfl {
    fn feed(&mut self, request: Request, rng: &mut SubRng) -> Result<Money> {
        self.process(request, rng).map(|round| round.spend)
    }

    fn solution(&self) -> &Solution {
        &self.solution
    }
}
