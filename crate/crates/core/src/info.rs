//! Entropy and Fano arithmetic, plus exact per-query information audits
//! for string-guessing runs.
//!
//! The knowledge state before a query determines the exact distribution of
//! `K`, the number of bits the answer will pin down: scanning the guess in
//! preference order, each undetermined position halts the scan with
//! probability 1/2, a determined-and-wrong position halts it surely, and a
//! full scan confirms everything. All probabilities are dyadic, so the
//! audits compare exactly in binary64. Entropies are in bits throughout.

use alloc::string::String;
use alloc::vec::Vec;

use crate::math;
use crate::sgp::{Posterior, SgpQuery, StrategyRun};
use crate::{Error, Result};

/// `h(p) = -p log2 p - (1-p) log2 (1-p)` with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter("probability must be in [0, 1]"));
    }
    let term = |q: f64| if q == 0.0 { 0.0 } else { -q * math::log2(q) };
    Ok(term(p) + term(1.0 - p))
}

/// Lower bound on the expected number of queries when each answer carries
/// at most `c` bits: `(H(F) - h(P_e) - P_e log2|F|) / c`.
pub fn fano_expectation_bound(
    entropy_bits: f64,
    p_e: f64,
    log2_family_size: f64,
    c: f64,
) -> Result<f64> {
    if c <= 0.0 {
        return Err(Error::InvalidParameter("per-answer information bound must be positive"));
    }
    Ok((entropy_bits - binary_entropy(p_e)? - p_e * log2_family_size) / c)
}

/// Upper bound on `P(T < t)`: `(h(P_e) + P_e log2|F| + c t) / H(F)`,
/// clamped to `[0, 1]`.
pub fn tail_bound(
    entropy_bits: f64,
    p_e: f64,
    log2_family_size: f64,
    c: f64,
    t: f64,
) -> Result<f64> {
    if entropy_bits <= 0.0 {
        return Err(Error::InvalidParameter("entropy must be positive"));
    }
    let raw = (binary_entropy(p_e)? + p_e * log2_family_size + c * t) / entropy_bits;
    Ok(raw.clamp(0.0, 1.0))
}

/// Exact distribution of the number of newly determined bits for one query
/// against one knowledge state.
#[derive(Debug, Clone, PartialEq)]
pub struct KDistribution {
    /// `probs[k] = P(K = k)`; dyadic values, exact in binary64.
    pub probs: Vec<f64>,
}

impl KDistribution {
    pub fn expectation(&self) -> f64 {
        self.probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    /// `P(K >= k)`.
    pub fn tail(&self, k: usize) -> f64 {
        self.probs.iter().skip(k).sum()
    }

    /// Largest excess of `P(K >= k)` over `2^(1-k)` for `k >= 1`; the
    /// per-answer information premise holds iff this is not positive.
    pub fn max_tail_excess(&self) -> f64 {
        (1..self.probs.len())
            .map(|k| self.tail(k) - math::exp2(1.0 - k as f64))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Closed-form scan: walks the guess once, branching only on undetermined
/// positions.
pub fn k_distribution(posterior: &Posterior, query: &SgpQuery) -> Result<KDistribution> {
    query.validate(posterior.m())?;
    let len = query.guess.len();
    let mut probs = alloc::vec![0.0; len + 1];
    let mut reach = 1.0; // P(scan reaches the current position)
    let mut fresh = 0usize; // undetermined positions passed so far
    for pos in 1..=len {
        let target = query.sigma[pos - 1];
        let guessed = query.guess.bit(pos)?;
        match posterior.determined(target) {
            Some(stored) => {
                if stored != guessed {
                    // halts here surely; earlier fresh bits get determined
                    probs[fresh] += reach;
                    return Ok(KDistribution { probs });
                }
            }
            None => {
                // halts here with probability 1/2, revealing fresh+1 bits
                probs[fresh + 1] += reach * 0.5;
                reach *= 0.5;
                fresh += 1;
            }
        }
    }
    probs[fresh] += reach; // full scan confirmed
    Ok(KDistribution { probs })
}

/// Brute-force oracle for the same distribution: enumerates every
/// assignment of the undetermined bits touched by the query.
pub fn k_distribution_enumerated(
    posterior: &Posterior,
    query: &SgpQuery,
) -> Result<KDistribution> {
    query.validate(posterior.m())?;
    let len = query.guess.len();
    let fresh_positions: Vec<usize> = (1..=len)
        .filter(|&pos| posterior.determined(query.sigma[pos - 1]).is_none())
        .collect();
    let u = fresh_positions.len();
    if u > 24 {
        return Err(Error::InvalidParameter("enumeration needs at most 24 fresh bits"));
    }
    let weight = math::exp2(-(u as f64));
    let mut probs = alloc::vec![0.0; len + 1];
    for mask in 0..1u64 << u {
        // simulate the oracle on this assignment of fresh bits
        let mut k = len; // if the scan completes: all fresh positions revealed
        let mut fresh_before = 0usize;
        let mut halted = false;
        for pos in 1..=len {
            let target = query.sigma[pos - 1];
            let guessed = query.guess.bit(pos)?;
            let actual = match posterior.determined(target) {
                Some(stored) => stored,
                None => {
                    let idx = fresh_positions.iter().position(|&p| p == pos).unwrap();
                    (mask >> idx) & 1 == 1
                }
            };
            let is_fresh = posterior.determined(target).is_none();
            if actual != guessed {
                k = fresh_before + usize::from(is_fresh);
                halted = true;
                break;
            }
            fresh_before += usize::from(is_fresh);
        }
        if !halted {
            k = fresh_before;
        }
        probs[k] += weight;
    }
    Ok(KDistribution { probs })
}

/// Per-step record of an information audit.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerStep {
    pub t: usize,
    /// Posterior entropy in bits before/after the answer.
    pub entropy_before: usize,
    pub entropy_after: usize,
    /// Bits the answer determined.
    pub k: usize,
    /// Exact conditional `E[K | posterior, query]`.
    pub expected_k: f64,
    /// Exact `max_k (P(K >= k) - 2^(1-k))`.
    pub tail_excess: f64,
}

/// Ledger of one audited run.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoLedger {
    pub steps: Vec<LedgerStep>,
    pub violations: Vec<String>,
}

impl InfoLedger {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Audits a recorded strategy run: per step, the exact conditional
/// expectation of `K` must not exceed 2 and the exact conditional tail must
/// obey `P(K >= k) <= 2^(1-k)`.
pub fn audit_run(run: &StrategyRun) -> Result<InfoLedger> {
    use alloc::format;
    let mut steps = Vec::with_capacity(run.steps.len());
    let mut violations = Vec::new();
    for (i, step) in run.steps.iter().enumerate() {
        let posterior = &step.posterior_before;
        let dist = k_distribution(posterior, &step.query)?;
        let expected_k = dist.expectation();
        let tail_excess = dist.max_tail_excess();
        let entropy_before = posterior.entropy_bits();
        let entropy_after = entropy_before - step.newly_determined;
        if expected_k > 2.0 {
            violations.push(format!("step {}: E[K] = {} exceeds 2", i + 1, expected_k));
        }
        if tail_excess > 0.0 {
            violations.push(format!(
                "step {}: P(K >= k) exceeds 2^(1-k) by {}",
                i + 1,
                tail_excess
            ));
        }
        steps.push(LedgerStep {
            t: i + 1,
            entropy_before,
            entropy_after,
            k: step.newly_determined,
            expected_k,
            tail_excess,
        });
    }
    Ok(InfoLedger { steps, violations })
}

/// Both sides of the information split identity, computed by exhausting a
/// deterministic strategy over every hidden string of length `m`:
/// `H(F) = H(F | transcript) + sum_t E[K_t] P(T >= t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitReport {
    pub m: usize,
    pub entropy: f64,
    pub conditional_entropy: f64,
    pub information_sum: f64,
    pub defect: f64,
}

/// Runs the strategy on all `2^m` strings (it must be deterministic: the
/// rng is fixed and never consulted by deterministic strategies), groups
/// runs by transcript for the conditional entropy, and accumulates the
/// per-step revealed bits for the information sum.
pub fn split_identity_exhaustive(
    m: usize,
    strategy: crate::sgp::Strategy,
) -> Result<SplitReport> {
    use alloc::collections::BTreeMap;
    use alloc::format;
    if m > 16 {
        return Err(Error::InvalidParameter("exhaustive split needs m <= 16"));
    }
    let total = 1u64 << m;
    let mut by_transcript: BTreeMap<String, u64> = BTreeMap::new();
    let mut k_sums: Vec<f64> = Vec::new();
    for v in 0..total {
        let hidden = crate::bitstr::BitString::from_index(v, m);
        let mut rng = crate::rng::trial_rng(0, v);
        let run = crate::sgp::run_strategy(strategy, &hidden, &mut rng);
        let mut key = String::new();
        for step in &run.steps {
            key.push_str(&format!("{}|{:?};", step.query.guess, step.answer));
        }
        *by_transcript.entry(key).or_insert(0) += 1;
        for (t, step) in run.steps.iter().enumerate() {
            if k_sums.len() <= t {
                k_sums.push(0.0);
            }
            k_sums[t] += step.newly_determined as f64;
        }
    }
    let entropy = m as f64;
    // H(F | Pi) = sum over transcript groups of (|g|/N) log2 |g|
    let conditional_entropy = by_transcript
        .values()
        .map(|&g| (g as f64 / total as f64) * math::log2(g as f64))
        .sum();
    // sum_t E[K_t 1{T >= t}] over the uniform family
    let information_sum: f64 = k_sums.iter().map(|s| s / total as f64).sum();
    let defect = entropy - conditional_entropy - information_sum;
    Ok(SplitReport { m, entropy, conditional_entropy, information_sum, defect })
}

/// Mean, standard error and tail histogram of a query-count sample.
pub fn distributional_estimate<F: FnMut(u64) -> usize>(
    trials: u64,
    mut run_trial: F,
) -> crate::sgp::QueryStats {
    let counts: Vec<usize> = (0..trials).map(&mut run_trial).collect();
    crate::sgp::QueryStats::from_counts(&counts, 0, 0)
}
