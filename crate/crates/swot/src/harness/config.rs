//! Experiment configuration: models, functional, sizes, replication and
//! bootstrap parameters. The on-disk format is TOML (or JSON) with keys
//! matching the field names below.

use crate::measures::Direction;
use crate::samplers::ModelSpec;
use crate::sliced::{AscentOptions, DirectionDistribution};
use crate::sliced::uniform_directions;
use crate::{seed, Error, Result};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Which functional of the slice field an experiment studies.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionalSpec {
    /// Monte-Carlo sliced statistic over `n_dirs` random directions.
    Sliced { n_dirs: usize },
    /// Average over an explicit direction grid.
    Discrete { dirs: Vec<Vec<f64>> },
    /// Max-sliced statistic via sphere ascent.
    MaxSliced {
        #[serde(default)]
        opts: AscentOptions,
    },
    /// Amplitude (sup - inf) of the slice field over a grid: either an
    /// explicit `dirs` list or a seeded grid of `n_dirs` directions drawn
    /// once per experiment.
    Amplitude {
        #[serde(default)]
        dirs: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        n_dirs: Option<usize>,
    },
    /// Distributional sliced statistic over a finite family of
    /// direction measures.
    Distributional { family: Vec<FamilyMemberSpec> },
}

/// Weighted direction atoms of one family member.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyMemberSpec {
    pub atoms: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

/// Rescaled-bootstrap section: resample sizes `l = ceil(n^beta)` for each
/// exponent, `B` replicates each.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub l_exponents: Vec<f64>,
    #[serde(rename = "B")]
    pub b: usize,
}

/// Full experiment description. `model_P.n`/`.seed` are overridden per
/// replication by the runner; the seed lattice is derived from
/// `master_seed` alone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(rename = "model_P")]
    pub model_p: ModelSpec,
    #[serde(rename = "model_Q")]
    pub model_q: ModelSpec,
    pub functional: FunctionalSpec,
    pub p: f64,
    #[serde(default)]
    pub delta: f64,
    pub n_list: Vec<usize>,
    pub replications: usize,
    #[serde(default)]
    pub bootstrap: Option<BootstrapConfig>,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    /// Variance of the Gaussian limit, when known: enables KS-to-theory
    /// summaries and theoretical Q-Q axes.
    #[serde(default)]
    pub sigma2_theory: Option<f64>,
    /// Population value override. When absent the runner uses the built-in
    /// closed form if one exists, else an oversampled plug-in estimate.
    #[serde(default)]
    pub f_ref_override: Option<f64>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidInput("replications must be >= 1".into()));
        }
        if self.n_list.is_empty() {
            return Err(Error::InvalidInput("n_list must be nonempty".into()));
        }
        if self.n_list.iter().any(|&n| n < 2) {
            return Err(Error::InvalidInput("sample sizes must be >= 2".into()));
        }
        if !(self.p >= 1.0) {
            return Err(Error::InvalidInput(format!("p must be >= 1, got {}", self.p)));
        }
        if !(0.0..0.5).contains(&self.delta) {
            return Err(Error::InvalidInput(format!(
                "delta {} outside [0, 0.5)",
                self.delta
            )));
        }
        if self.model_p.dim != self.model_q.dim {
            return Err(Error::DimensionMismatch(format!(
                "model_P dim {} != model_Q dim {}",
                self.model_p.dim, self.model_q.dim
            )));
        }
        if let Some(bs) = &self.bootstrap {
            if bs.b == 0 {
                return Err(Error::InvalidInput("bootstrap B must be >= 1".into()));
            }
            if bs.l_exponents.is_empty() {
                return Err(Error::InvalidInput("bootstrap l_exponents empty".into()));
            }
            if bs.l_exponents.iter().any(|&b| !(0.0 < b && b <= 1.0)) {
                return Err(Error::InvalidInput(
                    "bootstrap exponents must lie in (0, 1]".into(),
                ));
            }
        }
        match &self.functional {
            FunctionalSpec::Sliced { n_dirs } => {
                if *n_dirs == 0 {
                    return Err(Error::InvalidInput("n_dirs must be >= 1".into()));
                }
            }
            FunctionalSpec::Discrete { dirs } => {
                if dirs.is_empty() {
                    return Err(Error::InvalidInput("discrete functional needs dirs".into()));
                }
            }
            FunctionalSpec::Amplitude { dirs, n_dirs } => match (dirs, n_dirs) {
                (Some(d), None) if !d.is_empty() => {}
                (None, Some(k)) if *k > 0 => {}
                _ => {
                    return Err(Error::InvalidInput(
                        "amplitude functional needs exactly one of dirs or n_dirs".into(),
                    ))
                }
            },
            FunctionalSpec::Distributional { family } => {
                if family.is_empty() {
                    return Err(Error::InvalidInput("distributional family empty".into()));
                }
            }
            FunctionalSpec::MaxSliced { .. } => {}
        }
        Ok(())
    }

    /// Resolve direction lists once per experiment. Seeded grids derive from
    /// the master seed so the functional is the same across replications.
    pub(crate) fn resolve_functional(&self) -> Result<ResolvedFunctional> {
        let dim = self.model_p.dim;
        let to_dirs = |vs: &Vec<Vec<f64>>| -> Result<Vec<Direction>> {
            vs.iter()
                .map(|v| {
                    if v.len() != dim {
                        return Err(Error::DimensionMismatch(format!(
                            "direction has length {}, models live in R^{dim}",
                            v.len()
                        )));
                    }
                    Direction::new(v.clone())
                })
                .collect()
        };
        Ok(match &self.functional {
            FunctionalSpec::Sliced { n_dirs } => ResolvedFunctional::Sliced { n_dirs: *n_dirs },
            FunctionalSpec::Discrete { dirs } => ResolvedFunctional::Discrete {
                dirs: to_dirs(dirs)?,
            },
            FunctionalSpec::MaxSliced { opts } => ResolvedFunctional::MaxSliced {
                opts: opts.clone(),
            },
            FunctionalSpec::Amplitude { dirs, n_dirs } => {
                let resolved = match (dirs, n_dirs) {
                    (Some(d), _) => to_dirs(d)?,
                    (None, Some(k)) => {
                        uniform_directions(dim, *k, seed::mix64(self.master_seed, STREAM_AMP_GRID))
                    }
                    (None, None) => {
                        return Err(Error::InvalidInput(
                            "amplitude functional needs dirs or n_dirs".into(),
                        ))
                    }
                };
                ResolvedFunctional::Amplitude { dirs: resolved }
            }
            FunctionalSpec::Distributional { family } => {
                let members = family
                    .iter()
                    .map(|m| DirectionDistribution::new(to_dirs(&m.atoms)?, m.weights.clone()))
                    .collect::<Result<Vec<_>>>()?;
                ResolvedFunctional::Distributional { family: members }
            }
        })
    }

    /// Short tag used in output file names.
    pub fn functional_tag(&self) -> &'static str {
        match &self.functional {
            FunctionalSpec::Sliced { .. } => "sliced",
            FunctionalSpec::Discrete { .. } => "discrete",
            FunctionalSpec::MaxSliced { .. } => "max_sliced",
            FunctionalSpec::Amplitude { .. } => "amplitude",
            FunctionalSpec::Distributional { .. } => "distributional",
        }
    }
}

/// Seed streams (offsets into the `mix64(master_seed, .)` lattice).
/// Documented so every report row is recomputable from its child seed.
pub(crate) const STREAM_AMP_GRID: u64 = 0x414D_5047; // amplitude grid
pub(crate) const STREAM_PLUGIN_REF: u64 = 0x5245_4600; // plug-in reference
pub(crate) const STREAM_BOOT_BASE: u64 = 0xB007_0000; // bootstrap base samples
pub(crate) const STREAM_BOOT_DRAW: u64 = 0xB007_4000; // bootstrap replicate seeds
pub(crate) const STREAM_BOOT_MC: u64 = 0xB007_8000; // bootstrap MC bank

/// Functional with its direction grids materialized.
#[derive(Debug, Clone)]
pub(crate) enum ResolvedFunctional {
    Sliced { n_dirs: usize },
    Discrete { dirs: Vec<Direction> },
    MaxSliced { opts: AscentOptions },
    Amplitude { dirs: Vec<Direction> },
    Distributional { family: Vec<DirectionDistribution> },
}

impl ResolvedFunctional {
    /// Evaluate the functional on a measure pair. `dirs_seed` feeds the
    /// random-direction draw of the Monte-Carlo sliced variant and the
    /// ascent restarts of the max-sliced variant; grid functionals ignore
    /// it.
    pub(crate) fn eval(
        &self,
        p_meas: &crate::measures::EmpiricalMeasure,
        q_meas: &crate::measures::EmpiricalMeasure,
        p: f64,
        trim: f64,
        dirs_seed: u64,
    ) -> Result<f64> {
        use crate::sliced as sl;
        match self {
            ResolvedFunctional::Sliced { n_dirs } => {
                Ok(sl::sliced_wasserstein(p_meas, q_meas, p, *n_dirs, trim, dirs_seed)?.0)
            }
            ResolvedFunctional::Discrete { dirs } => {
                sl::discrete_sliced(p_meas, q_meas, p, dirs, trim)
            }
            ResolvedFunctional::MaxSliced { opts } => {
                Ok(sl::max_sliced(p_meas, q_meas, p, opts, dirs_seed)?.value)
            }
            ResolvedFunctional::Amplitude { dirs } => {
                Ok(sl::amplitude_stat(p_meas, q_meas, p, dirs)?.0)
            }
            ResolvedFunctional::Distributional { family } => {
                Ok(sl::distributional_sliced(p_meas, q_meas, p, family, trim)?.0)
            }
        }
    }

    /// The bootstrap counterpart, when one exists (the distributional
    /// variant is not a bootstrap target).
    pub(crate) fn to_bootstrap(&self) -> Result<crate::inference::BootstrapFunctional> {
        use crate::inference::BootstrapFunctional as BF;
        Ok(match self {
            ResolvedFunctional::Sliced { n_dirs } => BF::Sliced { n_dirs: *n_dirs },
            ResolvedFunctional::Discrete { dirs } => BF::Discrete { dirs: dirs.clone() },
            ResolvedFunctional::MaxSliced { opts } => BF::MaxSliced { opts: opts.clone() },
            ResolvedFunctional::Amplitude { dirs } => BF::Amplitude { dirs: dirs.clone() },
            ResolvedFunctional::Distributional { .. } => {
                return Err(Error::UnsupportedConfiguration(
                    "bootstrap is not wired for the distributional functional".into(),
                ))
            }
        })
    }
}
