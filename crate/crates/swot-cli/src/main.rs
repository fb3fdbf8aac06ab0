//! `swot` — sliced Wasserstein distances and inference experiments from the
//! command line.
//!
//! Subcommands:
//! - `dist`: one-shot sliced / max-sliced / amplitude / distributional
//!   distance between two CSV point clouds or two configured models;
//! - `potential`: dump the 1D Kantorovich potential along a direction as a
//!   knot/target/offset CSV;
//! - `cov`: covariance estimates on a direction grid;
//! - `clt-sim`: replicated CLT simulation (stats, KDE, QQ, KS reports);
//! - `bootstrap-sim`: rescaled-bootstrap study against the finite-sample
//!   Monte-Carlo distribution.
//!
//! Experiment configs are TOML files whose keys mirror the `ExperimentConfig`
//! fields (`model_P`, `model_Q`, `functional`, `p`, `delta`, `n_list`,
//! `replications`, `bootstrap`, `master_seed`, `output_dir`, ...).

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use swot::harness::{run_bootstrap_sim, run_clt_sim, ExperimentConfig};
use swot::inference::{covariance_grid, SampleRatio};
use swot::measures::{Direction, EmpiricalMeasure};
use swot::ot1d::{kantorovich_potential, sign_potential};
use swot::samplers::sample;
use swot::sliced::{
    amplitude_stat, max_sliced, sliced_wasserstein, uniform_directions,
    AscentOptions,
};

#[derive(Parser)]
#[command(name = "swot", version, about = "sliced Wasserstein distances and inference")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for data-parallel loops (0 = library default).
    /// Results are identical at any worker count.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    /// Output format for one-shot results printed to stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// One-shot distance between two point clouds or configured models.
    Dist(DistArgs),
    /// Dump a 1D Kantorovich potential along a direction.
    Potential(PotentialArgs),
    /// Covariance estimates on a direction grid.
    Cov(CovArgs),
    /// Replicated CLT simulation from a config file.
    CltSim(SimArgs),
    /// Rescaled-bootstrap study from a config file.
    BootstrapSim(SimArgs),
}

#[derive(Args)]
struct CloudArgs {
    /// First point cloud: headerless CSV, one point per row.
    #[arg(long)]
    p_csv: Option<PathBuf>,
    /// Second point cloud CSV.
    #[arg(long)]
    q_csv: Option<PathBuf>,
    /// Experiment config supplying model_P/model_Q when CSVs are absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sample size per model when sampling from a config.
    #[arg(long)]
    n: Option<usize>,
    /// Seed for model sampling and random directions.
    #[arg(long)]
    seed: Option<u64>,
}

impl CloudArgs {
    fn load(&self) -> Result<(EmpiricalMeasure, EmpiricalMeasure, Option<ExperimentConfig>), String> {
        match (&self.p_csv, &self.q_csv) {
            (Some(p), Some(q)) => {
                let pm = EmpiricalMeasure::from_csv(p).map_err(|e| e.to_string())?;
                let qm = EmpiricalMeasure::from_csv(q).map_err(|e| e.to_string())?;
                Ok((pm, qm, None))
            }
            (None, None) => {
                let path = self
                    .config
                    .as_ref()
                    .ok_or("either --p-csv/--q-csv or --config is required")?;
                let cfg = read_config(path)?;
                let n = self
                    .n
                    .or(cfg.n_list.last().copied())
                    .ok_or("config has an empty n_list; pass --n")?;
                let seed = self.seed.unwrap_or(cfg.master_seed);
                let pm = sample(&cfg.model_p.with_n_seed(n, swot::seed::mix64(seed, 0)))
                    .map_err(|e| e.to_string())?;
                let qm = sample(&cfg.model_q.with_n_seed(n, swot::seed::mix64(seed, 1)))
                    .map_err(|e| e.to_string())?;
                Ok((pm, qm, Some(cfg)))
            }
            _ => Err("--p-csv and --q-csv must be given together".into()),
        }
    }
}

#[derive(Args)]
struct DistArgs {
    #[command(flatten)]
    clouds: CloudArgs,
    /// Which functional to evaluate (CSV mode; config mode uses the config's
    /// functional).
    #[arg(long, value_enum, default_value_t = DistKind::Sliced)]
    functional: DistKind,
    /// Cost exponent p.
    #[arg(long, default_value_t = 2.0)]
    exponent: f64,
    /// Trim level in [0, 0.5).
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Random directions for the sliced / amplitude functionals.
    #[arg(long, default_value_t = 500)]
    n_dirs: usize,
}

#[derive(Copy, Clone, ValueEnum)]
enum DistKind {
    Sliced,
    MaxSliced,
    Amplitude,
}

#[derive(Args)]
struct PotentialArgs {
    #[command(flatten)]
    clouds: CloudArgs,
    /// Projection direction, comma-separated coordinates (normalized).
    #[arg(long)]
    direction: String,
    #[arg(long, default_value_t = 2.0)]
    exponent: f64,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CovArgs {
    #[command(flatten)]
    clouds: CloudArgs,
    #[arg(long, default_value_t = 2.0)]
    exponent: f64,
    /// Number of grid directions.
    #[arg(long, default_value_t = 25)]
    grid_size: usize,
    /// Output directory for cov_dirs.csv and cov_grid.csv.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    /// Experiment config (TOML; keys mirror the ExperimentConfig fields).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's output_dir.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn read_config(path: &Path) -> Result<ExperimentConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => serde_json::from_str(&text).map_err(|e| format!("bad JSON config: {e}")),
        _ => toml::from_str(&text).map_err(|e| format!("bad TOML config: {e}")),
    }
}

fn apply_overrides(cfg: &mut ExperimentConfig, args: &SimArgs) {
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(dir) = &args.out_dir {
        cfg.output_dir = dir.clone();
    }
}

fn parse_direction(text: &str, dim: usize) -> Result<Direction, String> {
    let coords: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let coords = coords.map_err(|e| format!("bad direction {text:?}: {e}"))?;
    if coords.len() != dim {
        return Err(format!(
            "direction has {} coordinates, point clouds live in R^{dim}",
            coords.len()
        ));
    }
    Direction::from_vector(coords).map_err(|e| e.to_string())
}

/// One-shot result record, printable as CSV or JSON.
struct Record {
    fields: Vec<(&'static str, String)>,
}

impl Record {
    fn print(&self, format: Format) {
        match format {
            Format::Csv => {
                let header: Vec<&str> = self.fields.iter().map(|(k, _)| *k).collect();
                let row: Vec<&str> = self.fields.iter().map(|(_, v)| v.as_str()).collect();
                println!("{}", header.join(","));
                println!("{}", row.join(","));
            }
            Format::Json => {
                let map: serde_json::Map<String, serde_json::Value> = self
                    .fields
                    .iter()
                    .map(|(k, v)| {
                        let val = v
                            .parse::<f64>()
                            .map(|x| {
                                serde_json::Number::from_f64(x)
                                    .map(serde_json::Value::Number)
                                    .unwrap_or(serde_json::Value::String(v.clone()))
                            })
                            .unwrap_or(serde_json::Value::String(v.clone()));
                        (k.to_string(), val)
                    })
                    .collect();
                println!("{}", serde_json::Value::Object(map));
            }
        }
    }
}

fn cmd_dist(args: &DistArgs, format: Format) -> Result<(), String> {
    let (pm, qm, _) = args.clouds.load()?;
    let seed = args.clouds.seed.unwrap_or(0);
    let p = args.exponent;
    let record = match args.functional {
        DistKind::Sliced => {
            let (value, stderr) = sliced_wasserstein(&pm, &qm, p, args.n_dirs, args.delta, seed)
                .map_err(|e| e.to_string())?;
            Record {
                fields: vec![
                    ("functional", "sliced".into()),
                    ("value", format!("{value}")),
                    ("mc_stderr", format!("{stderr}")),
                ],
            }
        }
        DistKind::MaxSliced => {
            let res = max_sliced(&pm, &qm, p, &AscentOptions::default(), seed)
                .map_err(|e| e.to_string())?;
            let argmax = res
                .argmax
                .coords()
                .iter()
                .map(|c| format!("{c}"))
                .collect::<Vec<_>>()
                .join(";");
            Record {
                fields: vec![
                    ("functional", "max-sliced".into()),
                    ("value", format!("{}", res.value)),
                    ("argmax", argmax),
                    ("restarts_used", format!("{}", res.restarts_used)),
                ],
            }
        }
        DistKind::Amplitude => {
            let dirs = uniform_directions(pm.dim(), args.n_dirs, seed);
            let (amp, hi, lo) =
                amplitude_stat(&pm, &qm, p, &dirs).map_err(|e| e.to_string())?;
            let fmt_dir = |d: &Direction| {
                d.coords()
                    .iter()
                    .map(|c| format!("{c}"))
                    .collect::<Vec<_>>()
                    .join(";")
            };
            Record {
                fields: vec![
                    ("functional", "amplitude".into()),
                    ("value", format!("{amp}")),
                    ("arg_sup", fmt_dir(&hi)),
                    ("arg_inf", fmt_dir(&lo)),
                ],
            }
        }
    };
    record.print(format);
    Ok(())
}

fn cmd_potential(args: &PotentialArgs, format: Format) -> Result<(), String> {
    let (pm, qm, _) = args.clouds.load()?;
    let dir = parse_direction(&args.direction, pm.dim())?;
    let a = pm.project(&dir).map_err(|e| e.to_string())?;
    let b = qm.project(&dir).map_err(|e| e.to_string())?;
    let radius = pm.radius_bound().max(qm.radius_bound());
    let pot = if args.exponent == 1.0 {
        sign_potential(&a, &b, radius)
    } else {
        kantorovich_potential(&a, &b, args.exponent, radius)
    }
    .map_err(|e| e.to_string())?;

    let mut lines = vec!["knot,target,offset".to_string()];
    for (k, &s) in pot.knots().iter().enumerate() {
        let target = pot
            .targets()
            .get(k)
            .map(|t| format!("{t}"))
            .unwrap_or_default();
        lines.push(format!("{s},{target},{}", pot.offsets()[k]));
    }
    let text = lines.join("\n") + "\n";
    match &args.out {
        Some(path) => {
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|e| e.to_string())?;
            }
            std::fs::write(path, text).map_err(|e| e.to_string())?;
            let record = Record {
                fields: vec![
                    ("written", path.display().to_string()),
                    ("segments", format!("{}", pot.targets().len())),
                    ("simulation_compat", format!("{}", pot.is_simulation_compat())),
                ],
            };
            record.print(format);
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_cov(args: &CovArgs, format: Format) -> Result<(), String> {
    let (pm, qm, cfg) = args.clouds.load()?;
    let p = cfg.as_ref().map(|c| c.p).unwrap_or(args.exponent);
    let seed = args.clouds.seed.unwrap_or(0);
    let dirs = uniform_directions(pm.dim(), args.grid_size, seed);
    let ratio = SampleRatio::new(pm.len(), qm.len()).map_err(|e| e.to_string())?;
    let grid = covariance_grid(&pm, &qm, p, &dirs, ratio).map_err(|e| e.to_string())?;

    let out_dir = args.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir).map_err(|e| e.to_string())?;
    let dirs_path = out_dir.join("cov_dirs.csv");
    let grid_path = out_dir.join("cov_grid.csv");

    let mut dir_lines = vec!["index,coords".to_string()];
    for (i, d) in dirs.iter().enumerate() {
        let coords = d
            .coords()
            .iter()
            .map(|c| format!("{c}"))
            .collect::<Vec<_>>()
            .join(";");
        dir_lines.push(format!("{i},{coords}"));
    }
    std::fs::write(&dirs_path, dir_lines.join("\n") + "\n").map_err(|e| e.to_string())?;

    let mut lines = vec!["i,j,value,sqrt_n_value,p_term,q_term".to_string()];
    for cell in &grid {
        lines.push(format!(
            "{},{},{},{},{},{}",
            cell.i,
            cell.j,
            cell.value(),
            cell.sqrt_n_scaled(),
            cell.p_term,
            cell.q_term
        ));
    }
    std::fs::write(&grid_path, lines.join("\n") + "\n").map_err(|e| e.to_string())?;

    Record {
        fields: vec![
            ("grid_size", format!("{}", args.grid_size)),
            ("pairs", format!("{}", grid.len())),
            ("dirs_file", dirs_path.display().to_string()),
            ("grid_file", grid_path.display().to_string()),
        ],
    }
    .print(format);
    Ok(())
}

fn cmd_clt_sim(args: &SimArgs, format: Format) -> Result<(), String> {
    let mut cfg = read_config(&args.config)?;
    apply_overrides(&mut cfg, args);
    let report = run_clt_sim(&cfg).map_err(|e| e.to_string())?;
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?
        ),
        Format::Csv => {
            println!("file");
            for f in &report.files {
                println!("{}", cfg.output_dir.join(f).display());
            }
        }
    }
    Ok(())
}

fn cmd_bootstrap_sim(args: &SimArgs, format: Format) -> Result<(), String> {
    let mut cfg = read_config(&args.config)?;
    apply_overrides(&mut cfg, args);
    let report = run_bootstrap_sim(&cfg).map_err(|e| e.to_string())?;
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?
        ),
        Format::Csv => {
            println!("file");
            for f in &report.files {
                println!("{}", cfg.output_dir.join(f).display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    let workers = cli.workers;
    let run = || match &cli.command {
        Command::Dist(args) => cmd_dist(args, format),
        Command::Potential(args) => cmd_potential(args, format),
        Command::Cov(args) => cmd_cov(args, format),
        Command::CltSim(args) => cmd_clt_sim(args, format),
        Command::BootstrapSim(args) => cmd_bootstrap_sim(args, format),
    };
    match swot::par::with_workers(workers, run) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
