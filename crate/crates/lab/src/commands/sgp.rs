//! `lab sgp`: Monte Carlo statistics for the guessing strategies, checked
//! against the expectation lower bound `((1 - P_e) M - 1) / 2`.

use anyhow::Result;
use qclab_core::sgp::Strategy;
use serde_json::json;

use crate::config::{CommonOpts, ExperimentConfig, Family};
use crate::output::{emit, Csv};
use crate::runs::sgp_stats;
use crate::{EXIT_CHECK_FAILED, EXIT_OK};

pub fn run(opts: &CommonOpts) -> Result<i32> {
    let cfg = ExperimentConfig::resolve(opts, Family::Sgp)?;
    let m = cfg.m_override.unwrap_or(32);
    let strategies: Vec<Strategy> = match &cfg.algo {
        Some(name) => vec![Strategy::parse(name).map_err(|e| anyhow::anyhow!("{e}"))?],
        None => vec![Strategy::GuessFull, Strategy::GuessOne, Strategy::RandomGuess],
    };
    let stats = cfg.with_pool(|| {
        strategies
            .iter()
            .map(|&s| sgp_stats(s, m, cfg.trials, cfg.seed, cfg.pe))
            .collect::<Vec<_>>()
    })?;

    let mut csv = Csv::new("strategy,m,pe,trial,queries");
    for s in &stats {
        for (trial, q) in s.counts.iter().enumerate() {
            csv.row([
                s.strategy.name().to_string(),
                m.to_string(),
                format!("{}", cfg.pe),
                trial.to_string(),
                q.to_string(),
            ]);
        }
    }

    let mut all_pass = true;
    let mut per_strategy = serde_json::Map::new();
    for s in &stats {
        all_pass &= s.meets_bound();
        per_strategy.insert(
            s.strategy.name().to_string(),
            json!({
                "mean": s.mean,
                "stderr": s.stderr,
                "bound": s.bound,
                "meets_bound": s.meets_bound(),
                "truncated": s.truncated,
                "errors": s.errors,
                "tail_histogram": histogram(&s.counts),
            }),
        );
    }
    let summary = json!({
        "command": "sgp",
        "m": m,
        "pe": cfg.pe,
        "trials": cfg.trials,
        "seed": cfg.seed,
        "strategies": per_strategy,
        "pass": all_pass,
    });
    emit(&cfg, "sgp_trials", Some(&csv), &summary)?;
    Ok(if all_pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn histogram(counts: &[usize]) -> Vec<usize> {
    let max = counts.iter().copied().max().unwrap_or(0);
    let mut hist = vec![0usize; max + 1];
    for &c in counts {
        hist[c] += 1;
    }
    hist
}
