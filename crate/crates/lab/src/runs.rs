//! Monte Carlo drivers shared by the CLI subcommands and the acceptance
//! suite. Trials parallelize over rayon; every trial draws from its own
//! `(seed, trial)` RNG stream, so results are independent of scheduling.

use anyhow::{bail, Result};
use rayon::prelude::*;

use qclab_core::bitstr::BitString;
use qclab_core::dyadic::Dyadic;
use qclab_core::family_1d::Family1d;
use qclab_core::family_box::{
    emulated_oracle as box_emulated, eval_box, reference_oracle as box_reference, BoxInstance,
};
use qclab_core::family_lp::{
    self, choose_m, emulated_oracle as lp_emulated, eval_lp, packing_witness,
    reference_oracle as lp_reference, witness_value, LpInstance, WorkingBasis,
};
use qclab_core::opt::{
    box_f64_oracle, lp_f64_oracle, projected_subgradient, random_search, tailored_box_learner,
    tailored_lp_learner, Domain, Identified,
};
use qclab_core::perturbed::{
    audit_box_trajectory, audit_lp_trajectory, PerturbedBoxInstance, PerturbedBoxParams,
    PerturbedLp,
};
use qclab_core::rng::trial_rng;
use qclab_core::sgp::{self, Strategy};
use rand::Rng;

pub fn mean_stderr(counts: &[usize]) -> (f64, f64) {
    let n = counts.len() as f64;
    if counts.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = counts.iter().sum::<usize>() as f64 / n;
    let var = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

// ---------------------------------------------------------------------------
// String guessing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SgpStats {
    pub strategy: Strategy,
    pub m: usize,
    pub p_e: f64,
    pub counts: Vec<usize>,
    pub mean: f64,
    pub stderr: f64,
    pub truncated: usize,
    pub errors: usize,
    /// `((1 - p_e) m - 1) / 2`.
    pub bound: f64,
}

impl SgpStats {
    pub fn meets_bound(&self) -> bool {
        self.mean >= self.bound - 3.0 * self.stderr
    }
}

pub fn sgp_stats(strategy: Strategy, m: usize, trials: usize, seed: u64, p_e: f64) -> SgpStats {
    let outcomes: Vec<sgp::TrialOutcome> = (0..trials as u64)
        .into_par_iter()
        .map(|t| sgp::run_trial(strategy, m, seed, t, p_e))
        .collect();
    let counts: Vec<usize> = outcomes.iter().map(|o| o.queries).collect();
    let (mean, stderr) = mean_stderr(&counts);
    SgpStats {
        strategy,
        m,
        p_e,
        mean,
        stderr,
        truncated: outcomes.iter().filter(|o| o.truncated).count(),
        errors: outcomes.iter().filter(|o| o.error).count(),
        bound: ((1.0 - p_e) * m as f64 - 1.0) / 2.0,
        counts,
    }
}

// ---------------------------------------------------------------------------
// Optimization trials
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptAlgo {
    Tailored,
    Subgradient,
    Random,
}

impl OptAlgo {
    pub fn parse(s: &str) -> Result<OptAlgo> {
        Ok(match s {
            "tailored" => OptAlgo::Tailored,
            "subgradient" => OptAlgo::Subgradient,
            "random" => OptAlgo::Random,
            _ => bail!("unknown algorithm `{s}` (tailored|subgradient|random)"),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            OptAlgo::Tailored => "tailored",
            OptAlgo::Subgradient => "subgradient",
            OptAlgo::Random => "random",
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptTrial {
    pub trial: usize,
    pub queries: usize,
    pub success: bool,
    pub identified: bool,
}

#[derive(Debug, Clone)]
pub struct OptBatch {
    pub trials: Vec<OptTrial>,
    pub mean: f64,
    pub stderr: f64,
    /// Information floor `(H - 1) / 2` for the family's bit count `H`.
    pub bound: f64,
    pub bits: usize,
}

impl OptBatch {
    fn from_trials(trials: Vec<OptTrial>, bits: usize) -> OptBatch {
        let counts: Vec<usize> = trials.iter().map(|t| t.queries).collect();
        let (mean, stderr) = mean_stderr(&counts);
        OptBatch { trials, mean, stderr, bound: (bits as f64 - 1.0) / 2.0, bits }
    }

    pub fn all_identified(&self) -> bool {
        self.trials.iter().all(|t| t.identified)
    }

    pub fn all_succeeded(&self) -> bool {
        self.trials.iter().all(|t| t.success)
    }

    pub fn meets_bound(&self) -> bool {
        self.mean >= self.bound - 3.0 * self.stderr
    }
}

/// Runs `trials` independent box-family trials: a fresh uniform instance
/// per trial, the chosen algorithm against the exact single-coordinate
/// oracle, success judged by exact evaluation of the returned point.
pub fn box_trials(
    family: &Family1d,
    n: usize,
    eps: &Dyadic,
    algo: OptAlgo,
    trials: usize,
    seed: u64,
    budget: usize,
) -> Result<Vec<OptTrial>> {
    let threshold = &family.min_value() + eps;
    let out: Vec<Result<OptTrial>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial as u64);
            let inst = BoxInstance::random(n, family.depth(), &mut rng);
            let run = match algo {
                OptAlgo::Tailored => {
                    let mut oracle = |x: &[Dyadic]| box_reference(family, &inst, x).unwrap();
                    tailored_box_learner(family, n, &mut oracle)?
                }
                OptAlgo::Subgradient => {
                    let mut oracle = box_f64_oracle(family, &inst);
                    let t = threshold.to_f64();
                    projected_subgradient(Domain::Cube { n }, budget, 1.0, &mut oracle, |v| v < t)
                }
                OptAlgo::Random => {
                    let mut oracle = box_f64_oracle(family, &inst);
                    let t = threshold.to_f64();
                    random_search(Domain::Cube { n }, budget, &mut rng, |x| oracle(x).0, |v| v < t)
                }
            };
            let identified = match &run.identified {
                Some(Identified::Strings(s)) => s.as_slice() == inst.strings(),
                _ => false,
            };
            // harness-side success: evaluate the returned point exactly
            let point: Vec<Dyadic> = run
                .final_point
                .iter()
                .map(|&c| Dyadic::from_f64_snapped(c.clamp(-1.0, 1.0), 48))
                .collect();
            let success = eval_box(family, &inst, &point)? < threshold;
            Ok(OptTrial { trial, queries: run.queries_used, success, identified })
        })
        .collect();
    let trials: Vec<OptTrial> = out.into_iter().collect::<Result<_>>()?;
    Ok(trials)
}

pub fn box_batch(
    family: &Family1d,
    n: usize,
    eps: &Dyadic,
    algo: OptAlgo,
    trials: usize,
    seed: u64,
    budget: usize,
) -> Result<OptBatch> {
    let rows = box_trials(family, n, eps, algo, trials, seed, budget)?;
    Ok(OptBatch::from_trials(rows, n * family.depth()))
}

/// Lp-family trials; success uses the sublevel certificate
/// `f(x) < f(x*) + eps`.
pub fn lp_trials(
    basis: &WorkingBasis,
    eps: f64,
    algo: OptAlgo,
    trials: usize,
    seed: u64,
    budget: usize,
) -> Result<Vec<OptTrial>> {
    let threshold = witness_value(basis) + eps;
    let m = basis.m();
    let out: Vec<Result<OptTrial>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial as u64);
            let inst = LpInstance::random(basis.clone(), &mut rng);
            let run = match algo {
                OptAlgo::Tailored => {
                    let mut oracle = |x: &[f64]| lp_reference(&inst, x).unwrap();
                    tailored_lp_learner(basis, &mut oracle)?
                }
                OptAlgo::Subgradient => {
                    let lipschitz = match basis.mode() {
                        family_lp::BasisMode::Standard => 1.0,
                        family_lp::BasisMode::Tensor => {
                            (m as f64).sqrt() / (m as f64).powf(1.0 - 1.0 / basis.p())
                        }
                    };
                    let mut oracle = lp_f64_oracle(&inst);
                    projected_subgradient(
                        Domain::Ball { p: basis.p(), n: m },
                        budget,
                        lipschitz,
                        &mut oracle,
                        |v| v < threshold,
                    )
                }
                OptAlgo::Random => {
                    let mut oracle = lp_f64_oracle(&inst);
                    random_search(
                        Domain::Ball { p: basis.p(), n: m },
                        budget,
                        &mut rng,
                        |x| oracle(x).0,
                        |v| v < threshold,
                    )
                }
            };
            let identified = match &run.identified {
                Some(Identified::Signs(s)) => s.as_slice() == inst.signs(),
                _ => false,
            };
            let success = eval_lp(&inst, &run.final_point)? < threshold;
            Ok(OptTrial { trial, queries: run.queries_used, success, identified })
        })
        .collect();
    let trials: Vec<OptTrial> = out.into_iter().collect::<Result<_>>()?;
    Ok(trials)
}

pub fn lp_batch(
    basis: &WorkingBasis,
    eps: f64,
    algo: OptAlgo,
    trials: usize,
    seed: u64,
    budget: usize,
) -> Result<OptBatch> {
    let rows = lp_trials(basis, eps, algo, trials, seed, budget)?;
    Ok(OptBatch::from_trials(rows, basis.m()))
}

/// Builds the working basis for an accuracy, honoring an `m` override.
pub fn lp_basis(p: f64, eps: f64, m_override: Option<usize>) -> Result<WorkingBasis> {
    let m = match m_override {
        Some(m) => m,
        None => choose_m(p, eps)?,
    };
    Ok(WorkingBasis::new(p, m)?)
}

// ---------------------------------------------------------------------------
// Scaling grids
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ScalingCell {
    pub family: &'static str,
    pub n: usize,
    pub eps_text: String,
    pub log2_inv_eps: f64,
    pub m: usize,
    pub bits: usize,
    pub trials: usize,
    pub mean: f64,
    pub stderr: f64,
    pub bound: f64,
}

/// Tailored-learner scaling over an `n x eps` grid of box families.
pub fn box_scaling(
    ns: &[usize],
    eps_grid: &[(String, Dyadic)],
    trials: usize,
    seed: u64,
) -> Result<Vec<ScalingCell>> {
    let mut cells = Vec::new();
    for &n in ns {
        for (text, eps) in eps_grid {
            let family = Family1d::from_accuracy(eps)?;
            let batch = box_batch(&family, n, eps, OptAlgo::Tailored, trials, seed, 0)?;
            if !batch.all_identified() {
                bail!("tailored learner failed to identify in cell n={n} eps={text}");
            }
            cells.push(ScalingCell {
                family: "box",
                n,
                eps_text: text.clone(),
                log2_inv_eps: -eps.to_f64().log2(),
                m: family.depth(),
                bits: n * family.depth(),
                trials,
                mean: batch.mean,
                stderr: batch.stderr,
                bound: batch.bound,
            });
        }
    }
    Ok(cells)
}

/// Tailored-learner scaling over an eps grid of Lp families.
pub fn lp_scaling(
    p: f64,
    eps_grid: &[String],
    trials: usize,
    seed: u64,
) -> Result<Vec<ScalingCell>> {
    let mut cells = Vec::new();
    for text in eps_grid {
        let eps = crate::config::parse_eps_f64(text)?;
        let basis = lp_basis(p, eps, None)?;
        let batch = lp_batch(&basis, eps, OptAlgo::Tailored, trials, seed, 0)?;
        if !batch.all_identified() {
            bail!("tailored learner failed to identify in cell eps={text}");
        }
        cells.push(ScalingCell {
            family: "lp",
            n: basis.m(),
            eps_text: text.clone(),
            log2_inv_eps: -eps.log2(),
            m: basis.m(),
            bits: basis.m(),
            trials,
            mean: batch.mean,
            stderr: batch.stderr,
            bound: batch.bound,
        });
    }
    Ok(cells)
}

/// Zero-intercept least-squares fit `mean ~ a * x` minimizing squared
/// relative residuals; returns the slope and the per-cell relative
/// residuals `|mean - a x| / mean`.
pub fn relative_lsq_fit(points: &[(f64, f64)]) -> (f64, Vec<f64>) {
    let us: Vec<f64> = points.iter().map(|(x, y)| x / y).collect();
    let a = us.iter().sum::<f64>() / us.iter().map(|u| u * u).sum::<f64>();
    let residuals = points.iter().map(|(x, y)| (y - a * x).abs() / y).collect();
    (a, residuals)
}

// ---------------------------------------------------------------------------
// Audits
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct AuditOutcome {
    pub trajectories: usize,
    pub steps: usize,
    pub violations: usize,
    pub lower_bound_steps: usize,
    pub near_ties: usize,
    /// The engineered degenerate control must be flagged.
    pub control_detected: bool,
}

impl AuditOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.control_detected
    }
}

/// Random-trajectory unpredictability audit for the perturbed Lp family,
/// plus the delta = 0 degenerate control.
pub fn perturbed_lp_audit(
    p: f64,
    m: usize,
    eps: f64,
    k_const: f64,
    trajectories: usize,
    steps_per: usize,
    seed: u64,
) -> Result<AuditOutcome> {
    let basis = WorkingBasis::new(p, m)?;
    let reports: Vec<Result<(usize, usize, usize)>> = (0..trajectories)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let inst = LpInstance::random(basis.clone(), &mut rng);
            let pinst = PerturbedLp::sample(inst, eps, k_const, &mut rng)?;
            let trajectory: Vec<Vec<f64>> =
                (0..steps_per).map(|_| ball_point(&basis, &mut rng)).collect();
            let report = audit_lp_trajectory(&pinst, &trajectory)?;
            Ok((report.steps, report.violations.len(), report.near_ties))
        })
        .collect();
    let mut steps = 0;
    let mut violations = 0;
    let mut near_ties = 0;
    for r in reports {
        let (s, v, nt) = r?;
        steps += s;
        violations += v;
        near_ties += nt;
    }
    // control: all perturbations zero, query at the origin ties every term
    let mut rng = trial_rng(seed, trajectories as u64 + 1);
    let inst = LpInstance::random(basis.clone(), &mut rng);
    let control = PerturbedLp::new(inst, vec![0.0; m], eps, k_const)?;
    let control_report = audit_lp_trajectory(&control, &[vec![0.0; m]])?;
    Ok(AuditOutcome {
        trajectories,
        steps,
        violations,
        lower_bound_steps: 0,
        near_ties,
        control_detected: !control_report.passed(),
    })
}

/// Random-trajectory unpredictability audit for the perturbed box family,
/// plus an engineered equal-perturbation symmetric-query control.
pub fn perturbed_box_audit(
    params: PerturbedBoxParams,
    max_n: usize,
    trajectories: usize,
    steps_per: usize,
    seed: u64,
) -> Result<AuditOutcome> {
    let reports: Vec<Result<(usize, usize, usize)>> = (0..trajectories)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let n = 1 + (t % max_n);
            let inst = PerturbedBoxInstance::sample(params, n, &mut rng);
            let trajectory: Vec<Vec<f64>> = (0..steps_per)
                .map(|_| (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect())
                .collect();
            let report = audit_box_trajectory(&inst, &trajectory)?;
            Ok((report.steps, report.violations.len(), report.lower_bound_steps))
        })
        .collect();
    let mut steps = 0;
    let mut violations = 0;
    let mut lower_bound_steps = 0;
    for r in reports {
        let (s, v, lb) = r?;
        steps += s;
        violations += v;
        lower_bound_steps += lb;
    }
    // control: identical strings and perturbations across two coordinates,
    // symmetric query
    let mut rng = trial_rng(seed, trajectories as u64 + 1);
    let s = BitString::random(params.depth, &mut rng);
    let control = PerturbedBoxInstance::degenerate_control(
        params,
        vec![s.clone(), s],
        params.delta_bar / 2.0,
    );
    let control_report = audit_box_trajectory(&control, &[vec![0.4, 0.4]])?;
    Ok(AuditOutcome {
        trajectories,
        steps,
        violations,
        lower_bound_steps,
        near_ties: 0,
        control_detected: !control_report.passed(),
    })
}

// ---------------------------------------------------------------------------
// Emulation checks
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct EmulationCheck {
    pub cases: u64,
    pub mismatches: u64,
    pub max_value_diff: f64,
    pub query_counts_equal: bool,
}

impl EmulationCheck {
    pub fn passed(&self, value_tol: f64) -> bool {
        self.mismatches == 0 && self.max_value_diff <= value_tol && self.query_counts_equal
    }
}

/// Random box cases (exact comparison) over mixed `n <= 3`, `M <= 4`.
pub fn box_emulation_check(cases: usize, seed: u64) -> Result<EmulationCheck> {
    let outcomes: Vec<Result<bool>> = (0..cases)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let n = 1 + rng.random_range(0..3usize);
            let depth = 1 + rng.random_range(0..4usize);
            let family = Family1d::new(depth)?;
            let inst = BoxInstance::random(n, depth, &mut rng);
            let x: Vec<Dyadic> = (0..n)
                .map(|_| Dyadic::from_parts(rng.random_range(-256..=256i64), -8))
                .collect();
            let r = box_reference(&family, &inst, &x)?;
            let e = box_emulated(&family, &inst, &x)?;
            Ok(r == e && r.value == eval_box(&family, &inst, &x)?)
        })
        .collect();
    let mut mismatches = 0;
    for o in outcomes {
        if !o? {
            mismatches += 1;
        }
    }
    Ok(EmulationCheck {
        cases: cases as u64,
        mismatches,
        max_value_diff: 0.0,
        query_counts_equal: box_query_counts_hold(seed)?,
    })
}

/// Exhaustive n = 2, M = 2 sweep over a dyadic grid.
pub fn box_emulation_exhaustive() -> Result<EmulationCheck> {
    let depth = 2;
    let family = Family1d::new(depth)?;
    let grid: Vec<Dyadic> = (-16..=16).map(|i| Dyadic::from_parts(i, -4)).collect();
    let mut cases = 0u64;
    let mut mismatches = 0u64;
    for v in 0..(1u64 << (2 * depth)) {
        let inst = BoxInstance::from_index(v, 2, depth);
        for a in &grid {
            for b in &grid {
                let x = [a.clone(), b.clone()];
                let r = box_reference(&family, &inst, &x)?;
                let e = box_emulated(&family, &inst, &x)?;
                cases += 1;
                if r != e || r.value != eval_box(&family, &inst, &x)? {
                    mismatches += 1;
                }
            }
        }
    }
    Ok(EmulationCheck {
        cases,
        mismatches,
        max_value_diff: 0.0,
        query_counts_equal: true,
    })
}

fn box_query_counts_hold(seed: u64) -> Result<bool> {
    use qclab_core::family_box::BoxSgpEmulation;
    use qclab_core::oracle::{Emulated, Oracle, Recorder};
    use qclab_core::sgp::StringOracle;
    let family = Family1d::new(3)?;
    let mut rng = trial_rng(seed, u64::MAX / 2);
    for _ in 0..20 {
        let inst = BoxInstance::random(2, 3, &mut rng);
        let inner = StringOracle::new(inst.concatenated());
        let inner_rec = Recorder::new(&inner);
        let emulation = BoxSgpEmulation { family };
        let outer = Emulated::new(&emulation, &inner_rec);
        let outer_rec = Recorder::new(&outer);
        let k = 1 + rng.random_range(0..12usize);
        for _ in 0..k {
            let x: Vec<Dyadic> =
                (0..2).map(|_| Dyadic::from_parts(rng.random_range(-64..=64i64), -6)).collect();
            outer_rec.answer(&x);
        }
        if outer_rec.count() != k || inner_rec.count() != k {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Random Lp cases over `p in {1, 1.5, 2, 3}`: axes and signs exact,
/// values tracked to their maximum discrepancy.
pub fn lp_emulation_check(cases: usize, seed: u64) -> Result<EmulationCheck> {
    let ps = [1.0, 1.5, 2.0, 3.0];
    let outcomes: Vec<Result<(bool, f64)>> = (0..cases)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let p = ps[t % ps.len()];
            let m = if p < 2.0 { 16 } else { 11 };
            let basis = WorkingBasis::new(p, m)?;
            let inst = LpInstance::random(basis.clone(), &mut rng);
            let x = ball_point(&basis, &mut rng);
            let r = lp_reference(&inst, &x)?;
            let e = lp_emulated(&inst, &x)?;
            let discrete_ok = r.axis == e.axis && r.slope == e.slope;
            Ok((discrete_ok, (r.value - e.value).abs()))
        })
        .collect();
    let mut mismatches = 0;
    let mut max_value_diff: f64 = 0.0;
    for o in outcomes {
        let (ok, diff) = o?;
        if !ok {
            mismatches += 1;
        }
        max_value_diff = max_value_diff.max(diff);
    }
    Ok(EmulationCheck {
        cases: cases as u64,
        mismatches,
        max_value_diff,
        query_counts_equal: true,
    })
}

pub fn ball_point(basis: &WorkingBasis, rng: &mut qclab_core::rng::TrialRng) -> Vec<f64> {
    let m = basis.m();
    let raw: Vec<f64> = (0..m).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    let norm = basis.norm_p(&raw).max(1e-9);
    let radius: f64 = rng.random();
    raw.iter().map(|v| v / norm * radius).collect()
}

// ---------------------------------------------------------------------------
// Packing
// ---------------------------------------------------------------------------

/// Sampled identification round-trip for the Lp family: points drawn from
/// the certified sublevel set must recover their instance's signs.
pub fn lp_packing_roundtrip(
    basis: &WorkingBasis,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<usize> {
    let m = basis.m();
    let failures: usize = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let inst = LpInstance::random(basis.clone(), &mut rng);
            // random point near the witness staying inside the certificate
            let witness = packing_witness(&inst);
            let shrink = 1.0 - 0.2 * rng.random::<f64>();
            let x: Vec<f64> = witness.iter().map(|v| v * shrink).collect();
            let value = eval_lp(&inst, &x).unwrap();
            if value >= witness_value(basis) + eps {
                return 0; // outside the certified set; nothing to check
            }
            match family_lp::identify_from_eps_min(&inst, &x, eps) {
                Ok(signs) if signs.as_slice() == inst.signs() => 0,
                _ => 1,
            }
        })
        .sum();
    if failures > 0 {
        bail!("{failures} identification round-trips failed out of {trials}");
    }
    let _ = m;
    Ok(trials)
}

/// Context for the threshold the check certifies against.
pub fn lp_identification_feasible(basis: &WorkingBasis, eps: f64) -> bool {
    (basis.m() as f64) < (1.0 / eps).powf(basis.r())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_batch_tailored_identifies() {
        let eps = Dyadic::pow2(-6);
        let family = Family1d::from_accuracy(&eps).unwrap();
        assert_eq!(family.depth(), 2);
        let batch = box_batch(&family, 2, &eps, OptAlgo::Tailored, 50, 3, 0).unwrap();
        assert!(batch.all_identified());
        assert!(batch.all_succeeded());
        assert!(batch.meets_bound());
    }

    #[test]
    fn relative_fit_recovers_exact_line() {
        let pts: Vec<(f64, f64)> = (1..6).map(|i| (i as f64, 2.5 * i as f64)).collect();
        let (a, res) = relative_lsq_fit(&pts);
        assert!((a - 2.5).abs() < 1e-12);
        assert!(res.iter().all(|r| *r < 1e-12));
    }

    #[test]
    fn sgp_stats_parallel_matches_core() {
        let stats = sgp_stats(Strategy::GuessFull, 16, 200, 5, 0.0);
        let core = qclab_core::sgp::estimate_queries(Strategy::GuessFull, 16, 200, 5, 0.0);
        assert_eq!(stats.mean, core.mean);
        assert_eq!(stats.stderr, core.stderr);
    }

    #[test]
    fn deterministic_across_pool_sizes() {
        let a = sgp_stats(Strategy::RandomGuess, 12, 100, 9, 0.0);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| sgp_stats(Strategy::RandomGuess, 12, 100, 9, 0.0));
        assert_eq!(a.counts, b.counts);
    }
}
