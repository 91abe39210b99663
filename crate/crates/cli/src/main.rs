//! rocover — a command-line laboratory for online covering under randomly
//! ordered (and related) arrival models.
//!
//! Subcommands: `gen` writes random instances as JSON, `run` executes seeded
//! trials and emits a CSV report, `eval` prints reference values for an
//! instance, and `counterexample` verifies the exact gap between the
//! per-slot-distribution benchmark and its i.i.d. average.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use rocover_core::instances::io::{load_instance, save_instance};
use rocover_core::instances::{
    counterexample_fixture, gen_random_fl, gen_random_setcover, gen_random_smc, FlCostModel,
    Instance,
};
use rocover_core::oracles::{expected_opt_product, greedy_bound, reference_value, IidExpectation};
use rocover_core::report::{
    summarize, write_nmfl_diagnostics, write_smc_diagnostics, write_trial_csv,
};
use rocover_core::runner::{self, AlgorithmKind, ArrivalModel, DiagnosticsBatch, RunConfig};
use rocover_core::CoveringProblem;

#[derive(Parser)]
#[command(
    name = "rocover",
    version,
    about = "Random-order online covering: algorithms, reductions, and exact baselines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance and write it as JSON.
    Gen(GenArgs),
    /// Run seeded trials of an algorithm under an arrival model.
    Run(RunArgs),
    /// Print reference values (exact optimum or greedy bound) for an instance.
    Eval(EvalArgs),
    /// Verify the exact gap between per-slot and averaged-i.i.d. benchmarks.
    Counterexample,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Family {
    /// Weighted set cover.
    SetCover,
    /// Unit-cost set multicover.
    Smc,
    /// Facility location with Euclidean (metric) connections.
    FlMetric,
    /// Facility location with arbitrary finite/infinite connections.
    FlNonmetric,
}

#[derive(Args)]
struct GenArgs {
    /// Instance family to draw from.
    #[arg(long, value_enum)]
    family: Family,
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of requests (elements / rows / clients).
    #[arg(long, default_value_t = 20)]
    n: usize,
    /// Number of objects (sets / columns / facilities).
    #[arg(long, default_value_t = 10)]
    m: usize,
    /// Membership density for cover families.
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    /// Maximum row demand (multicover only).
    #[arg(long, default_value_t = 3)]
    b_max: u32,
    /// Lower bound of the object cost range.
    #[arg(long, default_value_t = 1.0)]
    cost_min: f64,
    /// Upper bound of the object cost range.
    #[arg(long, default_value_t = 10.0)]
    cost_max: f64,
    /// Lower bound of the connection cost range (non-metric facility location).
    #[arg(long, default_value_t = 0.5)]
    conn_min: f64,
    /// Upper bound of the connection cost range (non-metric facility location).
    #[arg(long, default_value_t = 5.0)]
    conn_max: f64,
    /// Fraction of connections that are impossible (non-metric facility location).
    #[arg(long, default_value_t = 0.25)]
    inf_fraction: f64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum ModelArg {
    RandomOrder,
    Prophet,
    #[value(name = "2stage")]
    TwoStage,
    Was,
}

impl From<ModelArg> for ArrivalModel {
    fn from(m: ModelArg) -> ArrivalModel {
        match m {
            ModelArg::RandomOrder => ArrivalModel::RandomOrder,
            ModelArg::Prophet => ArrivalModel::Prophet,
            ModelArg::TwoStage => ArrivalModel::TwoStage,
            ModelArg::Was => ArrivalModel::Was,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum AlgoArg {
    Nmfl,
    Smc,
    Mfl,
}

impl From<AlgoArg> for AlgorithmKind {
    fn from(a: AlgoArg) -> AlgorithmKind {
        match a {
            AlgoArg::Nmfl => AlgorithmKind::Nmfl,
            AlgoArg::Smc => AlgorithmKind::Smc,
            AlgoArg::Mfl => AlgorithmKind::Mfl,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Instance file (JSON).
    #[arg(long)]
    instance: PathBuf,
    /// Base seed; every per-trial stream derives from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of trials.
    #[arg(long, default_value_t = 10)]
    trials: u32,
    /// Worker threads (0 = machine default, 1 = inline). Output bytes do not
    /// depend on this.
    #[arg(long, default_value_t = 1)]
    jobs: u32,
    /// Arrival model.
    #[arg(long, value_enum, default_value_t = ModelArg::RandomOrder)]
    model: ModelArg,
    /// Algorithm.
    #[arg(long, value_enum)]
    algo: AlgoArg,
    /// Sample fraction for the sampled-adversary model.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Stage-two markup for the two-stage model.
    #[arg(long, default_value_t = 2)]
    lambda: u32,
    /// Report CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record per-round potentials (random-order model; needs --out).
    #[arg(long)]
    diagnostics: bool,
    /// Collapse the per-slot prophet distributions into one distribution.
    #[arg(long)]
    iid: bool,
    /// Facility location: recompute the backup target after sampling.
    #[arg(long)]
    recompute_backup: bool,
    /// Multicover: sample only columns covering the arrived row.
    #[arg(long)]
    sample_support_only: bool,
}

#[derive(Args)]
struct EvalArgs {
    /// Instance file (JSON).
    #[arg(long)]
    instance: PathBuf,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen(args) => gen(args),
        Command::Run(args) => run(args),
        Command::Eval(args) => eval(args),
        Command::Counterexample => counterexample(),
    }
}

fn gen(args: GenArgs) -> Result<()> {
    let costs = (args.cost_min, args.cost_max);
    let instance = match args.family {
        Family::SetCover => Instance::SetCover(gen_random_setcover(
            args.seed,
            args.n,
            args.m,
            args.density,
            costs,
        )?),
        Family::Smc => Instance::Smc(gen_random_smc(
            args.seed,
            args.n,
            args.m,
            args.density,
            args.b_max,
        )?),
        Family::FlMetric => Instance::Fl(gen_random_fl(
            args.seed,
            args.m,
            args.n,
            &FlCostModel::Metric { opening: costs },
        )?),
        Family::FlNonmetric => Instance::Fl(gen_random_fl(
            args.seed,
            args.m,
            args.n,
            &FlCostModel::NonMetric {
                opening: costs,
                connection: (args.conn_min, args.conn_max),
                inf_fraction: args.inf_fraction,
            },
        )?),
    };
    match &args.out {
        Some(path) => {
            save_instance(path, &instance)?;
            eprintln!(
                "wrote {} ({} requests, {} objects) to {}",
                instance.kind(),
                instance.num_requests(),
                instance.num_objects(),
                path.display()
            );
        }
        None => println!("{}", rocover_core::instances::io::instance_to_json(&instance)),
    }
    Ok(())
}

fn instance_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".into())
}

fn run(args: RunArgs) -> Result<()> {
    if args.diagnostics && args.out.is_none() {
        bail!("--diagnostics needs --out to know where to write the potential stream");
    }
    let instance = load_instance(&args.instance)
        .with_context(|| format!("loading {}", args.instance.display()))?;
    let config = RunConfig {
        seed: args.seed,
        trials: args.trials,
        jobs: args.jobs,
        model: args.model.into(),
        algorithm: args.algo.into(),
        alpha: args.alpha,
        lambda: args.lambda,
        iid: args.iid,
        recompute_backup: args.recompute_backup,
        sample_support_only: args.sample_support_only,
        diagnostics: args.diagnostics,
        instance_id: instance_label(&args.instance),
    };
    let output = runner::run(&instance, &config)?;

    match &args.out {
        Some(path) => {
            let file = File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            write_trial_csv(BufWriter::new(file), &output.reports)?;
        }
        None => {
            let stdout = io::stdout();
            write_trial_csv(stdout.lock(), &output.reports)?;
        }
    }

    if args.diagnostics {
        let path = args
            .out
            .as_ref()
            .expect("checked above")
            .with_extension("diagnostics.csv");
        let file = File::create(&path)
            .with_context(|| format!("creating {}", path.display()))?;
        write_diagnostics(BufWriter::new(file), &output.diagnostics)?;
        eprintln!("diagnostics written to {}", path.display());
    }

    if let Some(summary) = summarize(&output.reports) {
        eprintln!(
            "trials={} finite={} mean_ratio={:.4} se={:.4} max_ratio={:.4} mean/ln(mn)={:.4}",
            summary.trials,
            summary.finite,
            summary.mean_ratio,
            summary.std_error,
            summary.max_ratio,
            summary.mean_over_log_mn
        );
    }
    Ok(())
}

/// Concatenate the per-trial diagnostic batches (rounds restart at 1 per
/// trial); the pre-arrival state is encoded as a round-0 row so potential
/// deltas can be read off consecutive rows.
fn write_diagnostics<W: Write>(mut w: W, batches: &[(u32, DiagnosticsBatch)]) -> Result<()> {
    match batches.first() {
        Some((_, DiagnosticsBatch::Smc { .. })) => {
            let mut all = Vec::new();
            for (_, batch) in batches {
                let DiagnosticsBatch::Smc { initial, rows } = batch else {
                    bail!("mixed diagnostics kinds in one run");
                };
                all.push(rocover_core::smc::SmcDiagnostic {
                    round: 0,
                    covered_on_arrival: false,
                    support_mass: 0.0,
                    deficiency: 0,
                    bought: 0,
                    phi_l: initial.0,
                    phi_c: initial.1,
                });
                all.extend_from_slice(rows);
            }
            write_smc_diagnostics(&mut w, &all)?;
        }
        Some((_, DiagnosticsBatch::Nmfl { .. })) => {
            let mut all = Vec::new();
            for (_, batch) in batches {
                let DiagnosticsBatch::Nmfl { initial, rows } = batch else {
                    bail!("mixed diagnostics kinds in one run");
                };
                all.push(rocover_core::nmfl::NmflDiagnostic {
                    round: 0,
                    connected_on_arrival: false,
                    kappa: rocover_core::Money::ZERO,
                    xi_event: false,
                    spend: rocover_core::Money::ZERO,
                    phi_l: initial.0,
                    phi_c: initial.1,
                });
                all.extend_from_slice(rows);
            }
            write_nmfl_diagnostics(&mut w, &all)?;
        }
        None => {}
    }
    Ok(())
}

fn eval(args: EvalArgs) -> Result<()> {
    let instance = load_instance(&args.instance)
        .with_context(|| format!("loading {}", args.instance.display()))?;
    let universe = instance.request_universe();
    let reference = reference_value(&instance, &universe)?;
    let greedy = greedy_bound(&instance, &universe)?;
    println!(
        "instance: {} ({}), {} requests, {} objects",
        instance_label(&args.instance),
        instance.kind(),
        instance.num_requests(),
        instance.num_objects()
    );
    println!(
        "reference: {} ({})",
        reference.value,
        if reference.exact {
            "exact optimum"
        } else {
            "greedy upper bound"
        }
    );
    println!("greedy: {}", greedy.value);
    Ok(())
}

fn counterexample() -> Result<()> {
    let start = Instant::now();
    let fx = counterexample_fixture();
    let instance = Instance::SetCover(fx.instance.clone());

    let slots: Vec<_> = fx.slot_distributions.iter().collect();
    let product_outcomes: usize = slots.iter().map(|d| d.support_size()).product();
    let pht = expected_opt_product(&instance, &slots)?;

    let iid_slots: Vec<_> = (0..fx.num_slots()).map(|_| &fx.average).collect();
    let iid_outcomes: usize = iid_slots.iter().map(|d| d.support_size()).product();
    let iid = expected_opt_product(&instance, &iid_slots)?;

    let ratio = &iid / &pht;
    println!(
        "2x2 grid: {} elements, {} unit-cost sets, {} arrival slots",
        fx.instance.num_elements(),
        fx.instance.num_sets(),
        fx.num_slots()
    );
    println!(
        "per-slot draws ({product_outcomes} outcomes): opt_pht = {} = {}",
        pht,
        IidExpectation::Exact(pht.clone()).as_f64()
    );
    println!(
        "i.i.d. draws from the average ({iid_outcomes} outcomes): E[opt_iid] = {} = {}",
        iid,
        IidExpectation::Exact(iid.clone()).as_f64()
    );
    let ratio_decimal = IidExpectation::Exact(ratio.clone()).as_f64();
    println!("gap: E[opt_iid] / opt_pht = {ratio} = {ratio_decimal}");
    eprintln!("verified in {:?}", start.elapsed());
    Ok(())
}
