//! `lab scaling`: long-format query-count grids for both regimes —
//! `n log(1/eps)` for the box, `1/eps^max(p,2)` for the Lp ball — with the
//! information floor alongside every row, plot-ready.

use anyhow::{bail, Context, Result};
use serde_json::json;

use crate::config::{parse_eps_dyadic, CommonOpts, ExperimentConfig, Family};
use crate::output::{emit, Csv};
use crate::runs::{box_scaling, lp_scaling, relative_lsq_fit, ScalingCell};
use crate::{EXIT_CHECK_FAILED, EXIT_OK};

pub fn run(opts: &CommonOpts, grid_n: Option<&str>, grid_eps: Option<&str>) -> Result<i32> {
    let cfg = ExperimentConfig::resolve(opts, Family::Box)?;
    match cfg.family {
        Family::Box => box_grid(&cfg, grid_n, grid_eps),
        Family::Lp => lp_grid(&cfg, grid_eps),
        other => bail!("scaling supports box|lp, got {}", other.name()),
    }
}

fn box_grid(cfg: &ExperimentConfig, grid_n: Option<&str>, grid_eps: Option<&str>) -> Result<i32> {
    let ns: Vec<usize> = match grid_n {
        Some(text) => text
            .split(',')
            .map(|t| t.trim().parse::<usize>().context("parsing --grid-n"))
            .collect::<Result<_>>()?,
        None => vec![1, 2, 4, 8],
    };
    let eps_texts: Vec<String> = match grid_eps {
        Some(text) => text.split(',').map(|t| t.trim().to_string()).collect(),
        None => vec!["2^-6".into(), "2^-9".into(), "2^-12".into()],
    };
    let eps_grid: Vec<(String, qclab_core::dyadic::Dyadic)> = eps_texts
        .iter()
        .map(|t| Ok((t.clone(), parse_eps_dyadic(t)?)))
        .collect::<Result<_>>()?;
    let cells =
        cfg.with_pool(|| box_scaling(&ns, &eps_grid, cfg.trials, cfg.seed))??;

    let csv = cells_csv(&cells);
    // fit mean ~ a * n * log2(1/eps), relative residuals per cell
    let points: Vec<(f64, f64)> =
        cells.iter().map(|c| (c.n as f64 * c.log2_inv_eps, c.mean)).collect();
    let (slope, residuals) = relative_lsq_fit(&points);
    let max_residual = residuals.iter().cloned().fold(0.0f64, f64::max);
    let bounds_ok = cells.iter().all(|c| c.mean >= c.bound - 3.0 * c.stderr);
    let pass = bounds_ok && max_residual <= 0.25;
    let summary = json!({
        "command": "scaling",
        "family": "box",
        "trials": cfg.trials,
        "seed": cfg.seed,
        "cells": cells.len(),
        "fit": {
            "model": "mean ~ a * n * log2(1/eps)",
            "a": slope,
            "relative_residuals": residuals,
            "max_relative_residual": max_residual,
        },
        "bounds_ok": bounds_ok,
        "pass": pass,
    });
    emit(cfg, "scaling", Some(&csv), &summary)?;
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn lp_grid(cfg: &ExperimentConfig, grid_eps: Option<&str>) -> Result<i32> {
    let eps_texts: Vec<String> = match grid_eps {
        Some(text) => text.split(',').map(|t| t.trim().to_string()).collect(),
        None => vec!["1/4".into(), "1/8".into(), "1/16".into()],
    };
    let cells = cfg.with_pool(|| lp_scaling(cfg.p, &eps_texts, cfg.trials, cfg.seed))??;
    let csv = cells_csv(&cells);
    let bounds_ok = cells.iter().all(|c| c.mean >= c.bound - 3.0 * c.stderr);
    let summary = json!({
        "command": "scaling",
        "family": "lp",
        "p": cfg.p,
        "trials": cfg.trials,
        "seed": cfg.seed,
        "cells": cells.len(),
        "bounds_ok": bounds_ok,
        "pass": bounds_ok,
    });
    emit(cfg, "scaling", Some(&csv), &summary)?;
    Ok(if bounds_ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cells_csv(cells: &[ScalingCell]) -> Csv {
    let mut csv = Csv::new("family,n,eps,m,bits,trials,mean_queries,stderr,bound");
    for c in cells {
        csv.row([
            c.family.to_string(),
            c.n.to_string(),
            c.eps_text.clone(),
            c.m.to_string(),
            c.bits.to_string(),
            c.trials.to_string(),
            format!("{}", c.mean),
            format!("{}", c.stderr),
            format!("{}", c.bound),
        ]);
    }
    csv
}
