//! Experiment runner: replicated CLT simulations, rescaled-bootstrap
//! studies, and flat-file reports (stats, KDE, Q-Q, KS) reproducing the
//! reference figures as data.
//!
//! # Seed lattice
//!
//! Replication `r` at the `i`-th sample size derives
//! `child_seed = mix64(master_seed, i * replications + r)`; from the child,
//! stream 0 seeds the first sample, stream 1 the second, stream 2 the
//! functional's direction draw. Every statistic row records its child seed,
//! so it can be recomputed from `(model, n, child_seed)` alone. Bootstrap
//! experiments use the dedicated stream offsets in [`config`].
//!
//! # Output files
//!
//! Per `(experiment, n)`: `<tag>_n<n>_stats.csv` with columns
//! `replication,child_seed,statistic`; `<tag>_n<n>_kde.csv` with
//! `x,density`; `<tag>_n<n>_qq.csv` with `theoretical_q,empirical_q`.
//! Bootstrap runs add `<tag>_n<n>_l<l>_replicates.csv` with `b,replicate`.
//! One JSON summary per experiment aggregates KS distances, variances, the
//! config echo, and seeds. Numeric CSV cells use the shortest decimal form
//! that parses back to the same float.

pub mod config;
pub mod reference;
pub mod stats;

pub use config::{BootstrapConfig, ExperimentConfig, FamilyMemberSpec, FunctionalSpec};

use crate::samplers::sample;
use crate::{inference, par, seed, Error, Result};
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

const SCHEMA_VERSION: &str = "swot-report-v1";

/// One successful replication.
#[derive(Debug, Clone, Serialize)]
pub struct StatRow {
    pub replication: usize,
    pub child_seed: u64,
    pub statistic: f64,
}

/// One failed replication, kept out of the summaries but never dropped
/// silently.
#[derive(Debug, Clone, Serialize)]
pub struct ExcludedRow {
    pub replication: usize,
    pub child_seed: u64,
    pub error: String,
}

/// Per-sample-size results of a CLT simulation.
#[derive(Debug, Clone, Serialize)]
pub struct SizeReport {
    pub n: usize,
    pub rows: Vec<StatRow>,
    pub excluded: Vec<ExcludedRow>,
    pub sample_mean: f64,
    pub sample_variance: f64,
    /// KS distance of the statistics to `N(0, sigma2_theory)`, when that
    /// variance is configured.
    pub ks_to_theory: Option<f64>,
}

/// How the population reference value was obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RefKind {
    Analytic,
    PlugIn { n_ref: usize },
    Override,
}

/// Full result of a CLT simulation run.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub schema_version: String,
    pub experiment: String,
    pub f_ref: f64,
    pub f_ref_kind: RefKind,
    pub per_n: Vec<SizeReport>,
    /// Files written, relative to the configured output directory.
    pub files: Vec<PathBuf>,
    pub config: ExperimentConfig,
}

/// Per `(n, l)` bootstrap results.
#[derive(Debug, Clone, Serialize)]
pub struct BootstrapCell {
    pub n: usize,
    pub l: usize,
    pub exponent: f64,
    pub replicates: Vec<f64>,
    /// Two-sample KS distance between bootstrap replicates and the
    /// finite-sample Monte-Carlo statistics at the same `n`.
    pub ks_to_finite_sample: f64,
    /// One-sample KS distance to `N(0, sigma2_theory)`, when configured.
    pub ks_to_theory: Option<f64>,
}

/// Full result of a bootstrap study.
#[derive(Debug, Clone, Serialize)]
pub struct BootstrapReport {
    pub schema_version: String,
    pub experiment: String,
    pub f_ref: f64,
    pub f_ref_kind: RefKind,
    /// Finite-sample Monte-Carlo bank per n (same statistic as the CLT sim).
    pub mc_banks: Vec<SizeReport>,
    pub cells: Vec<BootstrapCell>,
    pub files: Vec<PathBuf>,
    pub config: ExperimentConfig,
}

fn reference_value(cfg: &ExperimentConfig) -> Result<(f64, RefKind)> {
    if let Some(v) = cfg.f_ref_override {
        return Ok((v, RefKind::Override));
    }
    if let Some(v) =
        reference::analytic_reference(&cfg.model_p, &cfg.model_q, &cfg.functional, cfg.p, cfg.delta)
    {
        return Ok((v, RefKind::Analytic));
    }
    // Oversampled plug-in: one large draw, flagged in the report.
    let n_ref = 20 * cfg.n_list.iter().copied().max().unwrap();
    let functional = cfg.resolve_functional()?;
    let base = seed::mix64(cfg.master_seed, config::STREAM_PLUGIN_REF);
    let p_ref = sample(&cfg.model_p.with_n_seed(n_ref, seed::mix64(base, 0)))?;
    let q_ref = sample(&cfg.model_q.with_n_seed(n_ref, seed::mix64(base, 1)))?;
    // Monte-Carlo functionals get a quadrupled direction budget for the
    // reference so its own noise is small against the replication scale.
    let functional = match functional {
        config::ResolvedFunctional::Sliced { n_dirs } => {
            config::ResolvedFunctional::Sliced { n_dirs: n_dirs * 4 }
        }
        other => other,
    };
    let v = functional.eval(&p_ref, &q_ref, cfg.p, cfg.delta, seed::mix64(base, 2))?;
    Ok((v, RefKind::PlugIn { n_ref }))
}

fn summarize_rows(rows: &[StatRow]) -> (f64, f64) {
    if rows.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = rows.len() as f64;
    let mean = rows.iter().map(|r| r.statistic).sum::<f64>() / n;
    let var = if rows.len() < 2 {
        0.0
    } else {
        rows.iter()
            .map(|r| (r.statistic - mean) * (r.statistic - mean))
            .sum::<f64>()
            / (n - 1.0)
    };
    (mean, var)
}

/// Run one batch of replications at sample size `n`. Statistic index `r`
/// uses child seed `mix64(master, index_offset + r)`.
fn replicate_batch(
    cfg: &ExperimentConfig,
    functional: &config::ResolvedFunctional,
    n: usize,
    f_ref: f64,
    index_offset: u64,
) -> (Vec<StatRow>, Vec<ExcludedRow>) {
    let sqrt_n = (n as f64).sqrt();
    let results: Vec<(usize, u64, Result<f64>)> = par::map_indices(cfg.replications, |r| {
        let child = seed::mix64(cfg.master_seed, index_offset + r as u64);
        let run = || -> Result<f64> {
            let p_n = sample(&cfg.model_p.with_n_seed(n, seed::mix64(child, 0)))?;
            let q_n = sample(&cfg.model_q.with_n_seed(n, seed::mix64(child, 1)))?;
            let val = functional.eval(&p_n, &q_n, cfg.p, cfg.delta, seed::mix64(child, 2))?;
            let stat = sqrt_n * (val - f_ref);
            if !stat.is_finite() {
                return Err(Error::Numerical(format!("non-finite statistic {stat}")));
            }
            Ok(stat)
        };
        (r, child, run())
    });
    let mut rows = Vec::with_capacity(cfg.replications);
    let mut excluded = Vec::new();
    for (r, child, res) in results {
        match res {
            Ok(statistic) => rows.push(StatRow {
                replication: r,
                child_seed: child,
                statistic,
            }),
            Err(e) => excluded.push(ExcludedRow {
                replication: r,
                child_seed: child,
                error: e.to_string(),
            }),
        }
    }
    (rows, excluded)
}

fn size_report(cfg: &ExperimentConfig, n: usize, rows: Vec<StatRow>, excluded: Vec<ExcludedRow>) -> SizeReport {
    let (sample_mean, sample_variance) = summarize_rows(&rows);
    let stats: Vec<f64> = rows.iter().map(|r| r.statistic).collect();
    let ks_to_theory = cfg
        .sigma2_theory
        .filter(|_| !stats.is_empty())
        .map(|s2| stats::ks_distance(&stats, s2.sqrt()).expect("nonempty stats"));
    SizeReport {
        n,
        rows,
        excluded,
        sample_mean,
        sample_variance,
        ks_to_theory,
    }
}

/// Replicated CLT simulation: for every `n` in `n_list` and every
/// replication, draw fresh samples from both models, evaluate the
/// functional, and record `sqrt(n) (F(W_n) - F_ref)`. Writes the per-size
/// stats/KDE/QQ files and a JSON summary, and returns everything in memory.
pub fn run_clt_sim(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let functional = cfg.resolve_functional()?;
    let (f_ref, f_ref_kind) = reference_value(cfg)?;

    let mut per_n = Vec::with_capacity(cfg.n_list.len());
    for (i, &n) in cfg.n_list.iter().enumerate() {
        let offset = (i * cfg.replications) as u64;
        let (rows, excluded) = replicate_batch(cfg, &functional, n, f_ref, offset);
        per_n.push(size_report(cfg, n, rows, excluded));
    }

    let mut report = ExperimentReport {
        schema_version: SCHEMA_VERSION.to_string(),
        experiment: "clt-sim".to_string(),
        f_ref,
        f_ref_kind,
        per_n,
        files: Vec::new(),
        config: cfg.clone(),
    };
    write_clt_files(cfg, &mut report)?;
    Ok(report)
}

/// Rescaled-bootstrap study: one base sample per `n`, one
/// [`inference::BootstrapSample`] per resample exponent, plus a
/// finite-sample Monte-Carlo bank at the same `n` for comparison. Reports
/// two-sample KS distances (bootstrap vs. finite-sample) and, when the
/// limit variance is configured, one-sample KS distances to the Gaussian
/// limit.
pub fn run_bootstrap_sim(cfg: &ExperimentConfig) -> Result<BootstrapReport> {
    cfg.validate()?;
    let boot_cfg = cfg.bootstrap.clone().ok_or_else(|| {
        Error::InvalidInput("bootstrap-sim needs a bootstrap section in the config".into())
    })?;
    let functional = cfg.resolve_functional()?;
    let boot_functional = functional.to_bootstrap()?;
    let (f_ref, f_ref_kind) = reference_value(cfg)?;

    let mut mc_banks = Vec::new();
    let mut cells = Vec::new();
    for (i, &n) in cfg.n_list.iter().enumerate() {
        // Finite-sample Monte-Carlo bank (the CLT-sim statistic law at n).
        let offset = config::STREAM_BOOT_MC + (i * cfg.replications) as u64;
        let (rows, excluded) = replicate_batch(cfg, &functional, n, f_ref, offset);
        let bank = size_report(cfg, n, rows, excluded);
        let bank_stats: Vec<f64> = bank.rows.iter().map(|r| r.statistic).collect();

        // One base sample for all resample sizes at this n.
        let base_child = seed::mix64(cfg.master_seed, config::STREAM_BOOT_BASE + i as u64);
        let p_n = sample(&cfg.model_p.with_n_seed(n, seed::mix64(base_child, 0)))?;
        let q_n = sample(&cfg.model_q.with_n_seed(n, seed::mix64(base_child, 1)))?;

        for (k, &beta) in boot_cfg.l_exponents.iter().enumerate() {
            let l = ((n as f64).powf(beta).ceil() as usize).clamp(1, n);
            let bs_seed = seed::mix64(
                cfg.master_seed,
                config::STREAM_BOOT_DRAW + (i * boot_cfg.l_exponents.len() + k) as u64,
            );
            let bs = inference::bootstrap_distribution(
                &p_n,
                &q_n,
                &boot_functional,
                cfg.p,
                cfg.delta,
                l,
                boot_cfg.b,
                bs_seed,
            )?;
            let ks_to_finite_sample = if bank_stats.is_empty() {
                f64::NAN
            } else {
                stats::ks_two_sample(&bs.replicates, &bank_stats)?
            };
            let ks_to_theory = match cfg.sigma2_theory {
                Some(s2) => Some(stats::ks_distance(&bs.replicates, s2.sqrt())?),
                None => None,
            };
            cells.push(BootstrapCell {
                n,
                l,
                exponent: beta,
                replicates: bs.replicates,
                ks_to_finite_sample,
                ks_to_theory,
            });
        }
        mc_banks.push(bank);
    }

    let mut report = BootstrapReport {
        schema_version: SCHEMA_VERSION.to_string(),
        experiment: "bootstrap-sim".to_string(),
        f_ref,
        f_ref_kind,
        mc_banks,
        cells,
        files: Vec::new(),
        config: cfg.clone(),
    };
    write_bootstrap_files(cfg, &mut report)?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// file output

/// Shortest decimal that round-trips to the same f64 (std's Display).
fn fmt(v: f64) -> String {
    format!("{v}")
}

fn write_lines(path: &Path, header: &str, lines: impl Iterator<Item = String>) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{header}")?;
    for line in lines {
        writeln!(f, "{line}")?;
    }
    f.flush()?;
    Ok(())
}

fn write_stat_rows(path: &Path, rows: &[StatRow]) -> Result<()> {
    write_lines(
        path,
        "replication,child_seed,statistic",
        rows.iter()
            .map(|r| format!("{},{},{}", r.replication, r.child_seed, fmt(r.statistic))),
    )
}

/// KDE and QQ files for a batch of statistics. The QQ axis uses the
/// configured limit sigma when present, else the sample standard deviation.
fn write_density_files(
    dir: &Path,
    stem: &str,
    statistics: &[f64],
    sigma2_theory: Option<f64>,
    files: &mut Vec<PathBuf>,
) -> Result<()> {
    if statistics.len() >= 2 {
        let grid = stats::default_kde_grid(statistics, 256)?;
        if let Ok(curve) = stats::kde(statistics, grid) {
            let path = dir.join(format!("{stem}_kde.csv"));
            write_lines(
                &path,
                "x,density",
                curve.iter().map(|(x, y)| format!("{},{}", fmt(*x), fmt(*y))),
            )?;
            files.push(PathBuf::from(format!("{stem}_kde.csv")));
        }
        let (_, var) = {
            let n = statistics.len() as f64;
            let m = statistics.iter().sum::<f64>() / n;
            (
                m,
                statistics.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0),
            )
        };
        let sigma = sigma2_theory.unwrap_or(var).sqrt();
        if sigma > 0.0 {
            let qq = stats::qq_points(statistics, sigma)?;
            let path = dir.join(format!("{stem}_qq.csv"));
            write_lines(
                &path,
                "theoretical_q,empirical_q",
                qq.iter().map(|(x, y)| format!("{},{}", fmt(*x), fmt(*y))),
            )?;
            files.push(PathBuf::from(format!("{stem}_qq.csv")));
        }
    }
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Numerical(format!("json serialization failed: {e}")))?;
    std::fs::write(path, text)?;
    Ok(())
}

fn write_clt_files(cfg: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    let dir = &cfg.output_dir;
    let tag = format!("clt_{}", cfg.functional_tag());
    for size in &report.per_n {
        let stem = format!("{tag}_n{}", size.n);
        let stats_name = format!("{stem}_stats.csv");
        write_stat_rows(&dir.join(&stats_name), &size.rows)?;
        report.files.push(PathBuf::from(stats_name));
        let statistics: Vec<f64> = size.rows.iter().map(|r| r.statistic).collect();
        write_density_files(dir, &stem, &statistics, cfg.sigma2_theory, &mut report.files)?;
    }
    let summary_name = format!("{tag}_summary.json");
    report.files.push(PathBuf::from(summary_name.clone()));
    write_json(&dir.join(summary_name), &report)?;
    Ok(())
}

fn write_bootstrap_files(cfg: &ExperimentConfig, report: &mut BootstrapReport) -> Result<()> {
    let dir = &cfg.output_dir;
    let tag = format!("bootstrap_{}", cfg.functional_tag());
    for bank in &report.mc_banks {
        let stem = format!("{tag}_n{}_mc", bank.n);
        let name = format!("{stem}_stats.csv");
        write_stat_rows(&dir.join(&name), &bank.rows)?;
        report.files.push(PathBuf::from(name));
        let statistics: Vec<f64> = bank.rows.iter().map(|r| r.statistic).collect();
        write_density_files(dir, &stem, &statistics, cfg.sigma2_theory, &mut report.files)?;
    }
    for cell in &report.cells {
        let stem = format!("{tag}_n{}_l{}", cell.n, cell.l);
        let name = format!("{stem}_replicates.csv");
        write_lines(
            &dir.join(&name),
            "b,replicate",
            cell.replicates
                .iter()
                .enumerate()
                .map(|(b, r)| format!("{b},{}", fmt(*r))),
        )?;
        report.files.push(PathBuf::from(name));
        write_density_files(dir, &stem, &cell.replicates, cfg.sigma2_theory, &mut report.files)?;
    }
    let summary_name = format!("{tag}_summary.json");
    report.files.push(PathBuf::from(summary_name.clone()));
    write_json(&dir.join(summary_name), &report)?;
    Ok(())
}
