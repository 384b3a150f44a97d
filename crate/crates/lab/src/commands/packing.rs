//! `lab packing`: exhaustive disjointness of eps-minima for the box
//! family; sampled identification round-trips for the Lp family.

use anyhow::{bail, Result};
use qclab_core::family_box::packing_check;
use serde_json::json;

use crate::config::{CommonOpts, ExperimentConfig, Family};
use crate::output::emit;
use crate::runs::{lp_basis, lp_identification_feasible, lp_packing_roundtrip};
use crate::{EXIT_CHECK_FAILED, EXIT_OK};

pub fn run(opts: &CommonOpts) -> Result<i32> {
    let cfg = ExperimentConfig::resolve(opts, Family::Box)?;
    match cfg.family {
        Family::Box => box_packing(&cfg),
        Family::Lp => lp_packing(&cfg),
        other => bail!("packing supports box|lp, got {}", other.name()),
    }
}

fn box_packing(cfg: &ExperimentConfig) -> Result<i32> {
    let eps = cfg.eps_dyadic()?;
    let depth = match cfg.m_override {
        Some(m) => m,
        None => qclab_core::family_1d::Family1d::from_accuracy(&eps)?.depth(),
    };
    let report = packing_check(cfg.n, depth, &eps)?;
    let summary = json!({
        "command": "packing",
        "family": "box",
        "n": cfg.n,
        "m": depth,
        "eps": cfg.eps_text,
        "instances": report.instances,
        "pairs_checked": report.pairs_checked,
        "disjoint": report.disjoint,
        "witness": report.witness,
        "pass": report.disjoint,
    });
    emit(cfg, "packing", None, &summary)?;
    println!(
        "packing {}: {} instances, {} pairs",
        if report.disjoint { "pass" } else { "FAIL" },
        report.instances,
        report.pairs_checked
    );
    Ok(if report.disjoint { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn lp_packing(cfg: &ExperimentConfig) -> Result<i32> {
    let eps = cfg.eps_f64()?;
    let basis = lp_basis(cfg.p, eps, cfg.m_override)?;
    if !lp_identification_feasible(&basis, eps) {
        bail!("identification needs M < 1/eps^r; lower M or eps");
    }
    let checked = cfg.with_pool(|| lp_packing_roundtrip(&basis, eps, cfg.trials, cfg.seed))??;
    let summary = json!({
        "command": "packing",
        "family": "lp",
        "p": cfg.p,
        "m": basis.m(),
        "eps": eps,
        "trials": checked,
        "seed": cfg.seed,
        "pass": true,
    });
    emit(cfg, "packing", None, &summary)?;
    Ok(EXIT_OK)
}
