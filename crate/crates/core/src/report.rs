//! Per-trial result records, CSV serialization, and summary statistics.
//!
//! Every run of the harness produces one [`TrialReport`] per trial. The CSV
//! schema is stable: downstream tooling may rely on the exact header and on
//! byte-identical output for identical seeds.

use std::io::{self, Write};

use crate::money::Money;
use crate::nmfl::NmflDiagnostic;
use crate::smc::SmcDiagnostic;

/// Stable column set of the per-trial CSV.
pub const TRIAL_CSV_HEADER: &str = "trial,model,algorithm,instance_id,n,m,alg_cost,mock_cost,backup_cost,opt_value,opt_exact,ratio,beta_final,phases,seed";

/// Stable column set of the set-multicover diagnostics CSV.
pub const SMC_DIAGNOSTICS_HEADER: &str = "round,covered_on_arrival,X,d,bought,phi_l,phi_c";

/// Stable column set of the facility-location diagnostics CSV.
pub const NMFL_DIAGNOSTICS_HEADER: &str = "round,kappa,xi_event,spend,phi_l,phi_c";

/// Outcome of a single trial.
#[derive(Clone, Debug)]
pub struct TrialReport {
    pub trial: u32,
    pub model: String,
    pub algorithm: String,
    pub instance_id: String,
    /// Requests in the instance universe.
    pub n: usize,
    /// Purchasable objects (sets, columns, or facilities).
    pub m: usize,
    /// Total cost of the solution the algorithm committed to.
    pub alg_cost: Money,
    /// Cost incurred while consuming sampled/mock arrivals (reductions only).
    pub mock_cost: Money,
    /// Cost of backup purchases charged to the final answer (reductions only).
    pub backup_cost: Money,
    /// Reference value the ratio is measured against.
    pub opt_value: Money,
    /// Whether `opt_value` came from an exact oracle (else a greedy bound).
    pub opt_exact: bool,
    pub ratio: f64,
    /// Final phase budget (zero when the algorithm has no budget notion).
    pub beta_final: Money,
    pub phases: u32,
    pub seed: u64,
}

impl TrialReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.trial,
            self.model,
            self.algorithm,
            self.instance_id,
            self.n,
            self.m,
            self.alg_cost,
            self.mock_cost,
            self.backup_cost,
            self.opt_value,
            self.opt_exact,
            self.ratio,
            self.beta_final,
            self.phases,
            self.seed,
        )
    }
}

/// Write header plus one row per report.
pub fn write_trial_csv<W: Write>(mut w: W, reports: &[TrialReport]) -> io::Result<()> {
    writeln!(w, "{TRIAL_CSV_HEADER}")?;
    for report in reports {
        writeln!(w, "{}", report.csv_row())?;
    }
    Ok(())
}

/// Write the set-multicover diagnostics stream.
pub fn write_smc_diagnostics<W: Write>(mut w: W, rows: &[SmcDiagnostic]) -> io::Result<()> {
    writeln!(w, "{SMC_DIAGNOSTICS_HEADER}")?;
    for row in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            row.round,
            row.covered_on_arrival,
            row.support_mass,
            row.deficiency,
            row.bought,
            row.phi_l,
            row.phi_c,
        )?;
    }
    Ok(())
}

/// Write the facility-location diagnostics stream.
pub fn write_nmfl_diagnostics<W: Write>(mut w: W, rows: &[NmflDiagnostic]) -> io::Result<()> {
    writeln!(w, "{NMFL_DIAGNOSTICS_HEADER}")?;
    for row in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            row.round, row.kappa, row.xi_event, row.spend, row.phi_l, row.phi_c,
        )?;
    }
    Ok(())
}

/// Aggregate statistics over the finite ratios of a batch of trials.
#[derive(Clone, Copy, Debug)]
pub struct Summary {
    /// Total trials in the batch.
    pub trials: usize,
    /// Trials with a finite ratio, used for the statistics below.
    pub finite: usize,
    pub mean_ratio: f64,
    /// Standard error of the mean ratio (0 for a single trial).
    pub std_error: f64,
    pub max_ratio: f64,
    /// Mean ratio divided by ln(m·n) — the natural scale of the guarantee.
    pub mean_over_log_mn: f64,
}

/// Summarize a batch; `None` when no trial produced a finite ratio.
pub fn summarize(reports: &[TrialReport]) -> Option<Summary> {
    let ratios: Vec<f64> = reports
        .iter()
        .map(|r| r.ratio)
        .filter(|r| r.is_finite())
        .collect();
    if ratios.is_empty() {
        return None;
    }
    let k = ratios.len() as f64;
    let mean = ratios.iter().sum::<f64>() / k;
    let var = if ratios.len() > 1 {
        ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let first = &reports[0];
    let log_mn = ((first.m * first.n).max(2) as f64).ln();
    Some(Summary {
        trials: reports.len(),
        finite: ratios.len(),
        mean_ratio: mean,
        std_error: (var / k).sqrt(),
        max_ratio: max,
        mean_over_log_mn: mean / log_mn,
    })
}
