//! Experiment configuration: CLI flags merged over an optional JSON config
//! file (flags win), parameter parsing and per-family validation.

use anyhow::{bail, Context, Result};
use clap::Args;
use qclab_core::dyadic::Dyadic;
use serde::Deserialize;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Sgp,
    Box,
    Lp,
    PerturbedLp,
    PerturbedBox,
}

impl Family {
    pub fn parse(s: &str) -> Result<Family> {
        Ok(match s {
            "sgp" => Family::Sgp,
            "box" => Family::Box,
            "lp" => Family::Lp,
            "perturbed-lp" => Family::PerturbedLp,
            "perturbed-box" => Family::PerturbedBox,
            _ => bail!("unknown family `{s}` (sgp|box|lp|perturbed-lp|perturbed-box)"),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Sgp => "sgp",
            Family::Box => "box",
            Family::Lp => "lp",
            Family::PerturbedLp => "perturbed-lp",
            Family::PerturbedBox => "perturbed-box",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutFormat {
    Csv,
    Json,
}

/// Flags shared by every subcommand. Every field is optional here;
/// [`ExperimentConfig::resolve`] fills defaults after merging the config
/// file.
#[derive(Debug, Clone, Args, Default)]
pub struct CommonOpts {
    /// Instance family (sgp|box|lp|perturbed-lp|perturbed-box)
    #[arg(long)]
    pub family: Option<String>,
    /// Dimension (box: coordinates; lp: ambient dimension, defaults to M)
    #[arg(long)]
    pub n: Option<usize>,
    /// Norm exponent p in [1, inf)
    #[arg(long)]
    pub p: Option<f64>,
    /// Accuracy; accepts decimals, fractions (1/512) and powers (2^-9)
    #[arg(long)]
    pub eps: Option<String>,
    /// Depth / string length override
    #[arg(long)]
    pub m: Option<usize>,
    /// Algorithm or strategy name
    #[arg(long)]
    pub algo: Option<String>,
    /// Monte Carlo trials
    #[arg(long)]
    pub trials: Option<usize>,
    /// RNG seed; trial k draws from stream (seed, k)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Error budget P_e in [0, 1)
    #[arg(long)]
    pub pe: Option<f64>,
    /// Output directory for CSV/JSON/JSONL files
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// What to print on stdout (csv|json)
    #[arg(long)]
    pub format: Option<String>,
    /// Worker threads for trial parallelism
    #[arg(long)]
    pub jobs: Option<usize>,
    /// JSON file with the same keys as the flags; flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// JSON mirror of [`CommonOpts`].
#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileOpts {
    family: Option<String>,
    n: Option<usize>,
    p: Option<f64>,
    eps: Option<String>,
    m: Option<usize>,
    algo: Option<String>,
    trials: Option<usize>,
    seed: Option<u64>,
    pe: Option<f64>,
    out: Option<PathBuf>,
    format: Option<String>,
    jobs: Option<usize>,
}

/// Fully resolved experiment parameters.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub family: Family,
    pub n: usize,
    pub p: f64,
    pub eps_text: Option<String>,
    pub m_override: Option<usize>,
    pub algo: Option<String>,
    pub trials: usize,
    pub seed: u64,
    pub pe: f64,
    pub out: Option<PathBuf>,
    pub format: OutFormat,
    pub jobs: Option<usize>,
}

impl ExperimentConfig {
    pub fn resolve(opts: &CommonOpts, default_family: Family) -> Result<ExperimentConfig> {
        let file: FileOpts = match &opts.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                serde_json::from_str(&text).context("parsing config JSON")?
            }
            None => FileOpts::default(),
        };
        let family = match opts.family.as_deref().or(file.family.as_deref()) {
            Some(f) => Family::parse(f)?,
            None => default_family,
        };
        let p = opts.p.or(file.p).unwrap_or(2.0);
        if !(1.0..f64::INFINITY).contains(&p) {
            bail!("p must be in [1, inf)");
        }
        let pe = opts.pe.or(file.pe).unwrap_or(0.0);
        if !(0.0..1.0).contains(&pe) {
            bail!("pe must be in [0, 1)");
        }
        let format = match opts
            .format
            .as_deref()
            .or(file.format.as_deref())
            .unwrap_or("json")
        {
            "csv" => OutFormat::Csv,
            "json" => OutFormat::Json,
            other => bail!("unknown format `{other}` (csv|json)"),
        };
        Ok(ExperimentConfig {
            family,
            n: opts.n.or(file.n).unwrap_or(1),
            p,
            eps_text: opts.eps.clone().or(file.eps),
            m_override: opts.m.or(file.m),
            algo: opts.algo.clone().or(file.algo),
            trials: opts.trials.or(file.trials).unwrap_or(100),
            seed: opts.seed.or(file.seed).unwrap_or(0),
            pe,
            out: opts.out.clone().or(file.out),
            format,
            jobs: opts.jobs.or(file.jobs),
        })
    }

    pub fn eps_f64(&self) -> Result<f64> {
        match &self.eps_text {
            Some(t) => parse_eps_f64(t),
            None => bail!("--eps is required for this subcommand"),
        }
    }

    pub fn eps_dyadic(&self) -> Result<Dyadic> {
        match &self.eps_text {
            Some(t) => parse_eps_dyadic(t),
            None => bail!("--eps is required for this subcommand"),
        }
    }

    /// Runs `f` inside a rayon pool sized by `--jobs` (results do not
    /// depend on the pool size; trials use per-index RNG streams).
    pub fn with_pool<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.jobs {
            None => Ok(f()),
            Some(jobs) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(jobs.max(1))
                    .build()
                    .context("building worker pool")?;
                Ok(pool.install(f))
            }
        }
    }
}

/// Accepts `0.125`, `1/512`, `2^-9`.
pub fn parse_eps_f64(text: &str) -> Result<f64> {
    if let Some(exp) = text.strip_prefix("2^") {
        let e: i32 = exp.parse().context("parsing power-of-two accuracy")?;
        return Ok(2f64.powi(e));
    }
    if let Some((num, den)) = text.split_once('/') {
        let num: f64 = num.parse().context("parsing accuracy numerator")?;
        let den: f64 = den.parse().context("parsing accuracy denominator")?;
        if den <= 0.0 {
            bail!("accuracy denominator must be positive");
        }
        return Ok(num / den);
    }
    let v: f64 = text.parse().context("parsing accuracy")?;
    Ok(v)
}

/// Exact accuracies for the dyadic families; the denominator must be a
/// power of two.
pub fn parse_eps_dyadic(text: &str) -> Result<Dyadic> {
    if let Some(exp) = text.strip_prefix("2^") {
        let e: i64 = exp.parse().context("parsing power-of-two accuracy")?;
        return Ok(Dyadic::pow2(e));
    }
    text.parse::<Dyadic>()
        .map_err(|e| anyhow::anyhow!("accuracy must be dyadic for this family: {e}"))
}
