//! Trial orchestration: arrival models × algorithms × instances.
//!
//! A run takes one instance, an arrival model, an algorithm, and a base seed,
//! and produces one [`TrialReport`] per trial. Every trial derives all of its
//! randomness from its own seed, so output is byte-identical for a given base
//! seed regardless of the `jobs` parallelism setting.

use rayon::prelude::*;

use crate::covering::{CoveringProblem, Request};
use crate::error::{Error, Result};
use crate::instances::{DiscreteDistribution, FlInstance, Instance, SmcInstance};
use crate::mfl::MeyersonMfl;
use crate::money::Money;
use crate::nmfl::{run_nmfl, LearnOrCoverNmfl, NmflConfig, NmflDiagnostic};
use crate::oracles::{reference_value, OptResult};
use crate::reductions::{
    online_with_a_sample, prophet_single_sample, two_stage_prophet, RandomOrderAlgorithm,
    ReductionReport, ReductionRngs,
};
use crate::report::TrialReport;
use crate::rng::{fisher_yates, sample_indices, substream, trial_seed, Stream};
use crate::smc::{run_smc, LearnOrCoverSmc, SmcConfig, SmcDiagnostic};

/// Which online algorithm runs inside the harness.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AlgorithmKind {
    /// Learn-or-cover for non-metric facility location.
    Nmfl,
    /// Learn-or-cover for set multicover.
    Smc,
    /// The classic coin-flip algorithm for metric facility location.
    Mfl,
}

impl AlgorithmKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmKind::Nmfl => "nmfl",
            AlgorithmKind::Smc => "smc",
            AlgorithmKind::Mfl => "mfl",
        }
    }
}

impl std::str::FromStr for AlgorithmKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<AlgorithmKind> {
        match s {
            "nmfl" => Ok(AlgorithmKind::Nmfl),
            "smc" => Ok(AlgorithmKind::Smc),
            "mfl" => Ok(AlgorithmKind::Mfl),
            other => Err(Error::Unsupported(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// How requests arrive.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ArrivalModel {
    /// The full universe in a uniformly random order.
    RandomOrder,
    /// One known distribution per arrival slot; a single sample from each is
    /// available up front.
    Prophet,
    /// Like prophet, but λ samples per slot are bought at stage-one prices
    /// and late fixes pay a ×λ markup.
    TwoStage,
    /// Adversarial order, with a uniformly random α-fraction revealed first.
    Was,
}

impl ArrivalModel {
    pub fn as_str(self) -> &'static str {
        match self {
            ArrivalModel::RandomOrder => "random-order",
            ArrivalModel::Prophet => "prophet",
            ArrivalModel::TwoStage => "2stage",
            ArrivalModel::Was => "was",
        }
    }
}

impl std::str::FromStr for ArrivalModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<ArrivalModel> {
        match s {
            "random-order" => Ok(ArrivalModel::RandomOrder),
            "prophet" => Ok(ArrivalModel::Prophet),
            "2stage" => Ok(ArrivalModel::TwoStage),
            "was" => Ok(ArrivalModel::Was),
            other => Err(Error::Unsupported(format!("unknown arrival model '{other}'"))),
        }
    }
}

/// Everything one experiment needs besides the instance itself.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub trials: u32,
    /// Worker threads; 0 picks the machine default, 1 runs inline.
    pub jobs: u32,
    pub model: ArrivalModel,
    pub algorithm: AlgorithmKind,
    /// Sample fraction for the sampled-adversary model.
    pub alpha: f64,
    /// Stage-two markup for the two-stage model.
    pub lambda: u32,
    /// Collapse the per-slot distributions into one common distribution.
    pub iid: bool,
    /// Facility location: recompute the backup target after sampling.
    pub recompute_backup: bool,
    /// Multicover: sample only columns covering the arrived row.
    pub sample_support_only: bool,
    /// Record per-round potentials (random-order model only).
    pub diagnostics: bool,
    /// Label copied into every report row.
    pub instance_id: String,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            seed: 0,
            trials: 1,
            jobs: 1,
            model: ArrivalModel::RandomOrder,
            algorithm: AlgorithmKind::Smc,
            alpha: 1.0,
            lambda: 1,
            iid: false,
            recompute_backup: false,
            sample_support_only: false,
            diagnostics: false,
            instance_id: "instance".into(),
        }
    }
}

/// Per-round potentials recorded during a diagnostics run.
#[derive(Clone, Debug)]
pub enum DiagnosticsBatch {
    Smc {
        initial: (f64, f64),
        rows: Vec<SmcDiagnostic>,
    },
    Nmfl {
        initial: (f64, f64),
        rows: Vec<NmflDiagnostic>,
    },
}

/// The outcome of a whole run: reports sorted by trial index, plus any
/// diagnostics batches keyed by trial index.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub reports: Vec<TrialReport>,
    pub diagnostics: Vec<(u32, DiagnosticsBatch)>,
}

/// The instance the chosen algorithm actually runs on. Set-cover instances
/// embed losslessly into multicover (unit costs) and facility location
/// (opening = set cost, connections 0/∞); other cross-kind pairings are
/// refused rather than silently reinterpreted.
pub fn effective_instance(instance: &Instance, algorithm: AlgorithmKind) -> Result<Instance> {
    match (algorithm, instance) {
        (AlgorithmKind::Smc, Instance::Smc(_)) => Ok(instance.clone()),
        (AlgorithmKind::Smc, Instance::SetCover(sc)) => {
            Ok(Instance::Smc(SmcInstance::from_unit_set_cover(sc)?))
        }
        (AlgorithmKind::Smc, Instance::Fl(_)) => Err(Error::Unsupported(
            "the multicover algorithm cannot run facility-location instances".into(),
        )),
        (AlgorithmKind::Nmfl, Instance::Fl(_)) => Ok(instance.clone()),
        (AlgorithmKind::Nmfl, Instance::SetCover(sc)) => {
            Ok(Instance::Fl(FlInstance::from_set_cover(sc)))
        }
        (AlgorithmKind::Nmfl, Instance::Smc(_)) => Err(Error::Unsupported(
            "facility-location algorithms cannot run multicover instances".into(),
        )),
        (AlgorithmKind::Mfl, Instance::Fl(fl)) => {
            if fl.is_metric() {
                Ok(instance.clone())
            } else {
                Err(Error::Unsupported(
                    "the coin-flip algorithm requires metric connection costs".into(),
                ))
            }
        }
        (AlgorithmKind::Mfl, _) => Err(Error::Unsupported(
            "the coin-flip algorithm only runs facility-location instances".into(),
        )),
    }
}

/// Build the per-slot arrival distributions for the prophet models: one
/// uniform distribution over a random quarter of the universe per slot
/// (`iid` reuses the first slot's distribution everywhere). Deterministic in
/// the base seed — distributions are part of the experiment, not the trial.
pub fn prophet_distributions(
    universe: &[Request],
    base_seed: u64,
    iid: bool,
) -> Result<Vec<DiscreteDistribution>> {
    let n = universe.len();
    let support = n.div_ceil(4).max(1);
    let mut rng = substream(base_seed, Stream::Generate);
    let slot = |rng: &mut crate::rng::SubRng| -> Result<DiscreteDistribution> {
        let picked = sample_indices(n, support, rng);
        let requests: Vec<Request> = picked.iter().map(|&i| universe[i]).collect();
        DiscreteDistribution::uniform(&requests)
    };
    if iid {
        let common = slot(&mut rng)?;
        Ok(vec![common; n])
    } else {
        (0..n).map(|_| slot(&mut rng)).collect()
    }
}

struct TrialOutcome {
    report: TrialReport,
    diagnostics: Option<DiagnosticsBatch>,
}

fn ratio_of(alg: Money, opt: Money) -> f64 {
    if opt.is_zero() {
        if alg.is_zero() {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        alg.as_f64() / opt.as_f64()
    }
}

fn finite_reference(reference: &OptResult) -> Result<Money> {
    reference.value.finite().ok_or_else(|| {
        Error::Invariant("instance admits no feasible reference solution".into())
    })
}

/// Run a full experiment. The instance is embedded for the chosen algorithm
/// first; reports then describe the embedded instance.
pub fn run(instance: &Instance, config: &RunConfig) -> Result<RunOutput> {
    let effective = effective_instance(instance, config.algorithm)?;
    let universe = effective.request_universe();
    let reference = reference_value(&effective, &universe)?;
    let opt_universe = finite_reference(&reference)?;

    let distributions = match config.model {
        ArrivalModel::Prophet | ArrivalModel::TwoStage => {
            prophet_distributions(&universe, config.seed, config.iid)?
        }
        _ => Vec::new(),
    };

    let ctx = TrialContext {
        config,
        effective: &effective,
        universe: &universe,
        reference: &reference,
        opt_universe,
        distributions: &distributions,
    };

    let outcomes: Vec<TrialOutcome> = if config.jobs == 1 {
        (0..config.trials)
            .map(|t| ctx.run_trial(t))
            .collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs as usize)
            .build()
            .map_err(|e| Error::Invariant(format!("thread pool: {e}")))?;
        pool.install(|| {
            (0..config.trials)
                .into_par_iter()
                .map(|t| ctx.run_trial(t))
                .collect::<Result<_>>()
        })?
    };

    let mut reports = Vec::with_capacity(outcomes.len());
    let mut diagnostics = Vec::new();
    for outcome in outcomes {
        if let Some(batch) = outcome.diagnostics {
            diagnostics.push((outcome.report.trial, batch));
        }
        reports.push(outcome.report);
    }
    Ok(RunOutput {
        reports,
        diagnostics,
    })
}

/// Shared, read-only state for all trials of one run.
struct TrialContext<'a> {
    config: &'a RunConfig,
    effective: &'a Instance,
    universe: &'a [Request],
    reference: &'a OptResult,
    opt_universe: Money,
    distributions: &'a [DiscreteDistribution],
}

impl TrialContext<'_> {
    fn smc_config(&self, budget: Option<Money>) -> SmcConfig {
        SmcConfig {
            initial_budget: budget,
            sample_support_only: self.config.sample_support_only,
            ..SmcConfig::default()
        }
    }

    fn nmfl_config(&self, budget: Option<Money>) -> NmflConfig {
        NmflConfig {
            initial_budget: budget,
            recompute_backup: self.config.recompute_backup,
            ..NmflConfig::default()
        }
    }

    fn run_trial(&self, trial: u32) -> Result<TrialOutcome> {
        let seed = trial_seed(self.config.seed, trial);
        match self.config.model {
            ArrivalModel::RandomOrder => self.random_order_trial(trial, seed),
            ArrivalModel::Prophet | ArrivalModel::TwoStage | ArrivalModel::Was => {
                self.reduction_trial(trial, seed)
            }
        }
    }

    #[allow(clippy::too_many_arguments)] // one parameter per report column
    fn report_row(
        &self,
        trial: u32,
        seed: u64,
        alg_cost: Money,
        mock_cost: Money,
        backup_cost: Money,
        opt_value: Money,
        opt_exact: bool,
        beta_final: Money,
        phases: u32,
    ) -> TrialReport {
        TrialReport {
            trial,
            model: self.config.model.as_str().into(),
            algorithm: self.config.algorithm.as_str().into(),
            instance_id: self.config.instance_id.clone(),
            n: self.effective.num_requests(),
            m: self.effective.num_objects(),
            alg_cost,
            mock_cost,
            backup_cost,
            opt_value,
            opt_exact,
            ratio: ratio_of(alg_cost, opt_value),
            beta_final,
            phases,
            seed,
        }
    }

    fn random_order_trial(&self, trial: u32, seed: u64) -> Result<TrialOutcome> {
        let mut order = self.universe.to_vec();
        fisher_yates(&mut order, &mut substream(seed, Stream::Shuffle));
        let mut algo_rng = substream(seed, Stream::Algorithm);

        // Diagnostics compare against the reference solution and pin the
        // initial budget to the reference value so potentials are defined
        // from the first arrival on.
        let witness = if self.config.diagnostics {
            self.reference.solution.as_ref()
        } else {
            None
        };
        let pinned_budget = witness.map(|_| self.opt_universe.max(Money::EPSILON));

        let (solution, beta_final, phases, diag) = match self.config.algorithm {
            AlgorithmKind::Smc => {
                let Instance::Smc(smc) = self.effective else {
                    unreachable!("embedding fixed the instance kind")
                };
                let (solution, stats) = run_smc(
                    smc,
                    &order,
                    self.smc_config(pinned_budget),
                    &mut algo_rng,
                    witness,
                )?;
                let diag = stats.initial_potentials.map(|initial| DiagnosticsBatch::Smc {
                    initial,
                    rows: stats.diagnostics,
                });
                (solution, stats.beta_final, stats.phases, diag)
            }
            AlgorithmKind::Nmfl => {
                let Instance::Fl(fl) = self.effective else {
                    unreachable!("embedding fixed the instance kind")
                };
                let (solution, stats) = run_nmfl(
                    fl,
                    &order,
                    self.nmfl_config(pinned_budget),
                    &mut algo_rng,
                    witness,
                )?;
                let diag = stats.initial_potentials.map(|initial| DiagnosticsBatch::Nmfl {
                    initial,
                    rows: stats.diagnostics,
                });
                (solution, stats.beta_final, stats.phases, diag)
            }
            AlgorithmKind::Mfl => {
                let Instance::Fl(fl) = self.effective else {
                    unreachable!("embedding fixed the instance kind")
                };
                let mut algo = MeyersonMfl::new(fl.clone())?;
                for &request in &order {
                    algo.process(request, &mut algo_rng)?;
                }
                (algo.solution().clone(), Money::ZERO, 0, None)
            }
        };

        let report = self.report_row(
            trial,
            seed,
            solution.cost(),
            Money::ZERO,
            Money::ZERO,
            self.opt_universe,
            self.reference.exact,
            beta_final,
            phases,
        );
        Ok(TrialOutcome {
            report,
            diagnostics: diag,
        })
    }

    fn run_reduction<A: RandomOrderAlgorithm>(
        &self,
        algo: &mut A,
        rngs: &mut ReductionRngs,
    ) -> Result<ReductionReport> {
        match self.config.model {
            ArrivalModel::Prophet => {
                prophet_single_sample(algo, self.effective, self.distributions, rngs)
            }
            ArrivalModel::TwoStage => two_stage_prophet(
                algo,
                self.effective,
                self.distributions,
                self.config.lambda,
                rngs,
            ),
            ArrivalModel::Was => online_with_a_sample(
                algo,
                self.effective,
                self.universe,
                self.config.alpha,
                rngs,
            ),
            ArrivalModel::RandomOrder => unreachable!("not a reduction model"),
        }
    }

    fn reduction_trial(&self, trial: u32, seed: u64) -> Result<TrialOutcome> {
        let mut rngs = ReductionRngs::from_seed(seed);
        let (rep, beta_final, phases) = match self.config.algorithm {
            AlgorithmKind::Smc => {
                let Instance::Smc(smc) = self.effective else {
                    unreachable!("embedding fixed the instance kind")
                };
                let mut algo = LearnOrCoverSmc::new(smc.clone(), self.smc_config(None))?;
                let rep = self.run_reduction(&mut algo, &mut rngs)?;
                (rep, algo.budget(), algo.phases())
            }
            AlgorithmKind::Nmfl => {
                let Instance::Fl(fl) = self.effective else {
                    unreachable!("embedding fixed the instance kind")
                };
                let mut algo = LearnOrCoverNmfl::new(fl.clone(), self.nmfl_config(None))?;
                let rep = self.run_reduction(&mut algo, &mut rngs)?;
                (rep, algo.budget().unwrap_or(Money::ZERO), algo.phases())
            }
            AlgorithmKind::Mfl => {
                let Instance::Fl(fl) = self.effective else {
                    unreachable!("embedding fixed the instance kind")
                };
                let mut algo = MeyersonMfl::new(fl.clone())?;
                let rep = self.run_reduction(&mut algo, &mut rngs)?;
                (rep, Money::ZERO, 0)
            }
        };

        // For the sampled-adversary model the realized set is the whole
        // universe, whose reference value is already computed; the prophet
        // models realize a fresh multiset per trial.
        let (opt_value, opt_exact) = match self.config.model {
            ArrivalModel::Was => (self.opt_universe, self.reference.exact),
            _ => {
                let realized = reference_value(self.effective, &rep.arrivals)?;
                (finite_reference(&realized)?, realized.exact)
            }
        };

        let report = self.report_row(
            trial,
            seed,
            rep.total,
            rep.mock_cost,
            rep.backup_cost,
            opt_value,
            opt_exact,
            beta_final,
            phases,
        );
        Ok(TrialOutcome {
            report,
            diagnostics: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_random_fl, gen_random_setcover, gen_random_smc, FlCostModel};
    use crate::report::write_trial_csv;

    fn smc_instance() -> Instance {
        Instance::Smc(gen_random_smc(11, 12, 8, 0.45, 2).unwrap())
    }

    fn fl_instance() -> Instance {
        Instance::Fl(gen_random_fl(
            13,
            6,
            10,
            &FlCostModel::NonMetric {
                opening: (0.5, 4.0),
                connection: (0.1, 5.0),
                inf_fraction: 0.2,
            },
        ).unwrap())
    }

    fn config(model: ArrivalModel, algorithm: AlgorithmKind, trials: u32) -> RunConfig {
        RunConfig {
            seed: 7,
            trials,
            model,
            algorithm,
            ..RunConfig::default()
        }
    }

    #[test]
    fn random_order_smc_reports_are_sound() {
        let instance = smc_instance();
        let out = run(&instance, &config(ArrivalModel::RandomOrder, AlgorithmKind::Smc, 6)).unwrap();
        assert_eq!(out.reports.len(), 6);
        for r in &out.reports {
            assert!(r.ratio >= 1.0 - 1e-12, "alg beat the optimum: {}", r.ratio);
            assert!(r.opt_exact);
            assert_eq!(r.mock_cost, Money::ZERO);
            assert_eq!(r.model, "random-order");
            assert_eq!(r.algorithm, "smc");
            assert!(r.phases >= 1);
        }
        // Distinct trials draw distinct seeds.
        assert_ne!(out.reports[0].seed, out.reports[1].seed);
    }

    #[test]
    fn jobs_setting_does_not_change_bytes() {
        let instance = fl_instance();
        let base = config(ArrivalModel::RandomOrder, AlgorithmKind::Nmfl, 8);
        let sequential = run(&instance, &base).unwrap();
        let parallel = run(
            &instance,
            &RunConfig {
                jobs: 4,
                ..base.clone()
            },
        )
        .unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_trial_csv(&mut a, &sequential.reports).unwrap();
        write_trial_csv(&mut b, &parallel.reports).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn set_cover_embeds_for_both_learn_or_cover_algorithms() {
        let sc = Instance::SetCover(gen_random_setcover(5, 9, 6, 0.5, (1.0, 1.0)).unwrap());
        let smc_run = run(&sc, &config(ArrivalModel::RandomOrder, AlgorithmKind::Smc, 2)).unwrap();
        let nmfl_run = run(&sc, &config(ArrivalModel::RandomOrder, AlgorithmKind::Nmfl, 2)).unwrap();
        for r in smc_run.reports.iter().chain(&nmfl_run.reports) {
            assert!(r.ratio.is_finite());
            assert_eq!((r.n, r.m), (9, 6));
        }
        // The embeddings preserve cost, so both reference values agree.
        assert_eq!(smc_run.reports[0].opt_value, nmfl_run.reports[0].opt_value);
        // Metric it is not: the coin-flip algorithm must refuse.
        assert!(run(&sc, &config(ArrivalModel::RandomOrder, AlgorithmKind::Mfl, 1)).is_err());
    }

    #[test]
    fn prophet_models_report_cost_splits() {
        let instance = smc_instance();
        let out = run(&instance, &config(ArrivalModel::Prophet, AlgorithmKind::Smc, 5)).unwrap();
        for r in &out.reports {
            assert_eq!(r.alg_cost, r.mock_cost + r.backup_cost);
            assert!(r.opt_value > Money::ZERO);
        }
        // λ = 1 two-stage is the same model, stream for stream.
        let ts = run(&instance, &config(ArrivalModel::TwoStage, AlgorithmKind::Smc, 5)).unwrap();
        for (a, b) in out.reports.iter().zip(&ts.reports) {
            assert_eq!(a.alg_cost, b.alg_cost);
            assert_eq!(a.mock_cost, b.mock_cost);
            assert_eq!(a.backup_cost, b.backup_cost);
        }
    }

    #[test]
    fn was_full_sample_needs_no_backups() {
        let instance = fl_instance();
        let mut cfg = config(ArrivalModel::Was, AlgorithmKind::Nmfl, 4);
        cfg.alpha = 1.0;
        let out = run(&instance, &cfg).unwrap();
        for r in &out.reports {
            assert_eq!(r.backup_cost, Money::ZERO);
            assert_eq!(r.alg_cost, r.mock_cost);
        }
    }

    #[test]
    fn diagnostics_rows_cover_every_round() {
        let instance = smc_instance();
        let mut cfg = config(ArrivalModel::RandomOrder, AlgorithmKind::Smc, 2);
        cfg.diagnostics = true;
        let out = run(&instance, &cfg).unwrap();
        assert_eq!(out.diagnostics.len(), 2);
        let n = instance.num_requests();
        for (_, batch) in &out.diagnostics {
            let DiagnosticsBatch::Smc { initial, rows } = batch else {
                panic!("wrong diagnostics kind")
            };
            assert_eq!(rows.len(), n);
            assert!(initial.0 >= 0.0, "KL is nonnegative");
            // After the last arrival no rows remain, so ρ = 0 and the
            // covering potential sits at its floor β·ln(1/m) < 0.
            let last = rows.last().unwrap();
            assert!(
                last.phi_c < 0.0,
                "final covering potential must sit at β·ln(1/m), got {}",
                last.phi_c
            );
        }
    }

    #[test]
    fn nmfl_diagnostics_require_exactness_and_exist() {
        let instance = fl_instance();
        let mut cfg = config(ArrivalModel::RandomOrder, AlgorithmKind::Nmfl, 1);
        cfg.diagnostics = true;
        let out = run(&instance, &cfg).unwrap();
        let (_, batch) = &out.diagnostics[0];
        let DiagnosticsBatch::Nmfl { initial, rows } = batch else {
            panic!("wrong diagnostics kind")
        };
        assert_eq!(rows.len(), instance.num_requests());
        assert!(initial.0.is_finite());
        assert!(rows.iter().all(|r| r.phi_l.is_finite() && r.phi_c.is_finite()));
    }
}
