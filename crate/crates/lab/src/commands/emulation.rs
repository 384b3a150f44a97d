//! `lab emulation-check`: the string-guessing route against the direct
//! single-coordinate oracle, exact for the box family and to 1e-12 on
//! values (discrete parts exact) for the Lp family.

use anyhow::{bail, Result};
use serde_json::json;

use crate::config::{CommonOpts, ExperimentConfig, Family};
use crate::output::emit;
use crate::runs::{box_emulation_check, box_emulation_exhaustive, lp_emulation_check};
use crate::{EXIT_CHECK_FAILED, EXIT_OK};

pub const LP_VALUE_TOL: f64 = 1e-12;

pub fn run(opts: &CommonOpts, exhaustive: bool) -> Result<i32> {
    let cfg = ExperimentConfig::resolve(opts, Family::Box)?;
    match cfg.family {
        Family::Box => {
            let random = cfg.with_pool(|| box_emulation_check(cfg.trials, cfg.seed))??;
            let sweep = if exhaustive { Some(box_emulation_exhaustive()?) } else { None };
            let pass = random.passed(0.0) && sweep.as_ref().map_or(true, |s| s.passed(0.0));
            let summary = json!({
                "command": "emulation-check",
                "family": "box",
                "random_cases": random.cases,
                "random_mismatches": random.mismatches,
                "query_counts_equal": random.query_counts_equal,
                "exhaustive": sweep.map(|s| json!({
                    "cases": s.cases,
                    "mismatches": s.mismatches,
                })),
                "comparison": "exact",
                "pass": pass,
            });
            emit(&cfg, "emulation_check", None, &summary)?;
            Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Family::Lp => {
            let check = cfg.with_pool(|| lp_emulation_check(cfg.trials, cfg.seed))??;
            let pass = check.passed(LP_VALUE_TOL);
            let summary = json!({
                "command": "emulation-check",
                "family": "lp",
                "cases": check.cases,
                "discrete_mismatches": check.mismatches,
                "max_value_diff": check.max_value_diff,
                "value_tolerance": LP_VALUE_TOL,
                "pass": pass,
            });
            emit(&cfg, "emulation_check", None, &summary)?;
            Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        other => bail!("emulation-check supports box|lp, got {}", other.name()),
    }
}
