//! The string-guessing oracle, exact posterior tracking and guessing
//! strategies.
//!
//! A query names part of a hidden bit string through an injective preference
//! order; the oracle reports the first position where the guess is wrong, or
//! confirms the whole guess. The answer pins down exactly the scanned bits,
//! so the knowledge state is always "some bits determined, the rest uniform"
//! — which [`Posterior`] tracks exactly.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bitstr::BitString;
use crate::oracle::Oracle;
use crate::{Error, Result};

/// A guess over part of the hidden string. `sigma[k-1]` is the 1-based
/// target position probed by the k-th guessed bit; `sigma` must be
/// injective. No implicit identity default: multi-coordinate reductions
/// need the order to be explicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SgpQuery {
    pub guess: BitString,
    pub sigma: Vec<usize>,
}

impl SgpQuery {
    pub fn new(guess: BitString, sigma: Vec<usize>) -> Self {
        SgpQuery { guess, sigma }
    }

    /// Guess over positions `sigma[k] = k`.
    pub fn identity(guess: BitString) -> Self {
        let sigma = (1..=guess.len()).collect();
        SgpQuery { guess, sigma }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        let len = self.guess.len();
        if len == 0 {
            return Err(Error::MalformedQuery("empty guess"));
        }
        if len > m {
            return Err(Error::MalformedQuery("guess longer than the hidden string"));
        }
        if self.sigma.len() != len {
            return Err(Error::MalformedQuery("sigma length differs from guess length"));
        }
        let mut seen = alloc::vec![false; m];
        for &target in &self.sigma {
            if target == 0 || target > m {
                return Err(Error::MalformedQuery("sigma target out of range"));
            }
            if seen[target - 1] {
                return Err(Error::MalformedQuery("sigma is not injective"));
            }
            seen[target - 1] = true;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgpAnswer {
    Equal,
    /// 1-based position of the first wrongly guessed bit.
    Mismatch(usize),
}

/// Answer of the string-guessing oracle for hidden string `s`.
pub fn sgp_answer(hidden: &BitString, query: &SgpQuery) -> Result<SgpAnswer> {
    query.validate(hidden.len())?;
    for k in 1..=query.guess.len() {
        let target = query.sigma[k - 1];
        if hidden.bit(target)? != query.guess.bit(k)? {
            return Ok(SgpAnswer::Mismatch(k));
        }
    }
    Ok(SgpAnswer::Equal)
}

/// The oracle for a fixed hidden string. Malformed queries panic here; use
/// [`sgp_answer`] for fallible access.
pub struct StringOracle {
    hidden: BitString,
}

impl StringOracle {
    pub fn new(hidden: BitString) -> Self {
        StringOracle { hidden }
    }

    pub fn hidden(&self) -> &BitString {
        &self.hidden
    }
}

impl Oracle for StringOracle {
    type Query = SgpQuery;
    type Answer = SgpAnswer;

    fn answer(&self, query: &SgpQuery) -> SgpAnswer {
        sgp_answer(&self.hidden, query).expect("valid query")
    }
}

/// Exact knowledge state about the hidden string: determined bits plus a
/// uniform, independent remainder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Posterior {
    bits: Vec<Option<bool>>,
}

impl Posterior {
    pub fn new(m: usize) -> Self {
        Posterior { bits: alloc::vec![None; m] }
    }

    pub fn m(&self) -> usize {
        self.bits.len()
    }

    /// 1-based lookup.
    pub fn determined(&self, i: usize) -> Option<bool> {
        self.bits[i - 1]
    }

    pub fn determined_count(&self) -> usize {
        self.bits.iter().filter(|b| b.is_some()).count()
    }

    /// Entropy in bits: undetermined bits are uniform and independent.
    pub fn entropy_bits(&self) -> usize {
        self.m() - self.determined_count()
    }

    pub fn is_complete(&self) -> bool {
        self.entropy_bits() == 0
    }

    /// 1-based indices of undetermined positions, ascending.
    pub fn undetermined(&self) -> Vec<usize> {
        (1..=self.m()).filter(|&i| self.bits[i - 1].is_none()).collect()
    }

    pub fn agrees_with(&self, s: &BitString) -> bool {
        s.len() == self.m()
            && (1..=self.m()).all(|i| match self.bits[i - 1] {
                Some(b) => s.bit(i).unwrap() == b,
                None => true,
            })
    }

    /// Mode of the posterior: undetermined bits filled with 0.
    pub fn mode(&self) -> BitString {
        let bits: Vec<bool> = self.bits.iter().map(|b| b.unwrap_or(false)).collect();
        BitString::from_bits(&bits)
    }

    /// Folds an oracle answer into the knowledge state. Returns the updated
    /// posterior and `K`, the number of bits determined now and not before.
    ///
    /// `Equal` determines every scanned bit as guessed; `Mismatch(k)`
    /// determines the first `k-1` as guessed and the k-th flipped.
    pub fn update(&self, query: &SgpQuery, answer: &SgpAnswer) -> Result<(Posterior, usize)> {
        query.validate(self.m())?;
        let scan = match answer {
            SgpAnswer::Equal => query.guess.len(),
            SgpAnswer::Mismatch(k) => {
                if *k == 0 || *k > query.guess.len() {
                    return Err(Error::MalformedQuery("mismatch position out of range"));
                }
                *k
            }
        };
        let mut bits = self.bits.clone();
        let mut newly = 0;
        for pos in 1..=scan {
            let target = query.sigma[pos - 1];
            let guessed = query.guess.bit(pos)?;
            let value = match answer {
                SgpAnswer::Mismatch(k) if *k == pos => !guessed,
                _ => guessed,
            };
            match bits[target - 1] {
                Some(prev) if prev != value => return Err(Error::PosteriorContradiction),
                Some(_) => {}
                None => {
                    bits[target - 1] = Some(value);
                    newly += 1;
                }
            }
        }
        Ok((Posterior { bits }, newly))
    }
}

/// Guessing strategies witnessing (near-)tightness of the query lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Full-length guess each round: determined bits as known, undetermined
    /// guessed 0, preference order undetermined-first. Deterministic.
    GuessFull,
    /// One undetermined coordinate per query.
    GuessOne,
    /// Uniformly random consistent full-length guesses with random order.
    RandomGuess,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::GuessFull => "guess-full",
            Strategy::GuessOne => "guess-one",
            Strategy::RandomGuess => "random-guess",
        }
    }

    pub fn parse(s: &str) -> Result<Strategy> {
        match s {
            "guess-full" => Ok(Strategy::GuessFull),
            "guess-one" => Ok(Strategy::GuessOne),
            "random-guess" => Ok(Strategy::RandomGuess),
            _ => Err(Error::InvalidParameter("unknown strategy")),
        }
    }

    pub fn next_query<R: Rng + ?Sized>(&self, posterior: &Posterior, rng: &mut R) -> SgpQuery {
        let m = posterior.m();
        match self {
            Strategy::GuessOne => {
                let target = posterior.undetermined()[0];
                SgpQuery::new(BitString::from_bits(&[false]), alloc::vec![target])
            }
            Strategy::GuessFull => {
                let mut sigma = posterior.undetermined();
                let determined: Vec<usize> =
                    (1..=m).filter(|&i| posterior.determined(i).is_some()).collect();
                sigma.extend_from_slice(&determined);
                let bits: Vec<bool> = sigma
                    .iter()
                    .map(|&i| posterior.determined(i).unwrap_or(false))
                    .collect();
                SgpQuery::new(BitString::from_bits(&bits), sigma)
            }
            Strategy::RandomGuess => {
                let mut sigma: Vec<usize> = (1..=m).collect();
                sigma.shuffle(rng);
                let bits: Vec<bool> = sigma
                    .iter()
                    .map(|&i| posterior.determined(i).unwrap_or_else(|| rng.random()))
                    .collect();
                SgpQuery::new(BitString::from_bits(&bits), sigma)
            }
        }
    }
}

/// One step of a strategy run, with the knowledge state before the query.
#[derive(Debug, Clone)]
pub struct StrategyStep {
    pub posterior_before: Posterior,
    pub query: SgpQuery,
    pub answer: SgpAnswer,
    pub newly_determined: usize,
}

/// A complete identification run.
#[derive(Debug, Clone)]
pub struct StrategyRun {
    pub steps: Vec<StrategyStep>,
    pub final_posterior: Posterior,
}

impl StrategyRun {
    pub fn queries(&self) -> usize {
        self.steps.len()
    }
}

/// Runs a strategy against the oracle for `hidden` until the posterior
/// determines every bit.
pub fn run_strategy<R: Rng + ?Sized>(
    strategy: Strategy,
    hidden: &BitString,
    rng: &mut R,
) -> StrategyRun {
    let mut posterior = Posterior::new(hidden.len());
    let mut steps = Vec::new();
    while !posterior.is_complete() {
        let query = strategy.next_query(&posterior, rng);
        let answer = sgp_answer(hidden, &query).expect("strategy emits valid queries");
        let (next, newly) = posterior.update(&query, &answer).expect("consistent answer");
        steps.push(StrategyStep {
            posterior_before: posterior,
            query,
            answer,
            newly_determined: newly,
        });
        posterior = next;
    }
    StrategyRun { steps, final_posterior: posterior }
}

/// Monte Carlo statistics for a strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryStats {
    pub trials: usize,
    pub mean: f64,
    pub stderr: f64,
    /// `tail[t]` counts trials with `T = t`; cumulative sums give the
    /// empirical `P(T < t)`.
    pub histogram: Vec<usize>,
    /// Trials stopped early under the bounded-error budget.
    pub truncated: usize,
    /// Trials whose final answer (posterior mode) was wrong.
    pub errors: usize,
}

impl QueryStats {
    pub fn from_counts(counts: &[usize], truncated: usize, errors: usize) -> QueryStats {
        let n = counts.len();
        let mean = counts.iter().sum::<usize>() as f64 / n as f64;
        let var = counts.iter().map(|&t| (t as f64 - mean) * (t as f64 - mean)).sum::<f64>()
            / (n as f64 - 1.0).max(1.0);
        let stderr = crate::math::sqrt(var / n as f64);
        let max = counts.iter().copied().max().unwrap_or(0);
        let mut histogram = alloc::vec![0usize; max + 1];
        for &t in counts {
            histogram[t] += 1;
        }
        QueryStats { trials: n, mean, stderr, histogram, truncated, errors }
    }

    /// Empirical `P(T < t)`.
    pub fn tail_below(&self, t: usize) -> f64 {
        let below: usize = self.histogram.iter().take(t).sum();
        below as f64 / self.trials as f64
    }
}

/// Outcome of one Monte Carlo trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub queries: usize,
    /// Stopped by the bounded-error budget before identifying.
    pub truncated: bool,
    /// The final answer (posterior mode) was wrong.
    pub error: bool,
}

/// One trial on stream `(seed, trial)`: draw a uniform hidden string; with
/// probability `p_e` answer the (empty) posterior mode immediately — the
/// bounded-error model where a `p_e` fraction of instances gets a garbage
/// answer — otherwise run the strategy to full identification.
pub fn run_trial(strategy: Strategy, m: usize, seed: u64, trial: u64, p_e: f64) -> TrialOutcome {
    let mut rng = crate::rng::trial_rng(seed, trial);
    let hidden = BitString::random(m, &mut rng);
    if p_e > 0.0 && rng.random::<f64>() < p_e {
        let error = Posterior::new(m).mode() != hidden;
        return TrialOutcome { queries: 0, truncated: true, error };
    }
    let run = run_strategy(strategy, &hidden, &mut rng);
    TrialOutcome { queries: run.queries(), truncated: false, error: false }
}

/// Monte Carlo estimate of queries-to-identification over uniform hidden
/// strings; see [`run_trial`] for the bounded-error mode.
pub fn estimate_queries(
    strategy: Strategy,
    m: usize,
    trials: usize,
    seed: u64,
    p_e: f64,
) -> QueryStats {
    let outcomes: Vec<TrialOutcome> =
        (0..trials).map(|t| run_trial(strategy, m, seed, t as u64, p_e)).collect();
    let counts: Vec<usize> = outcomes.iter().map(|o| o.queries).collect();
    let truncated = outcomes.iter().filter(|o| o.truncated).count();
    let errors = outcomes.iter().filter(|o| o.error).count();
    QueryStats::from_counts(&counts, truncated, errors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn oracle_examples() {
        let q = SgpQuery::new(bs("1"), vec![1]);
        assert_eq!(sgp_answer(&bs("101"), &q).unwrap(), SgpAnswer::Equal);

        let q = SgpQuery::identity(bs("111"));
        assert_eq!(sgp_answer(&bs("101"), &q).unwrap(), SgpAnswer::Mismatch(2));

        let q = SgpQuery::new(bs("01"), vec![3, 4]);
        assert_eq!(sgp_answer(&bs("0110"), &q).unwrap(), SgpAnswer::Mismatch(1));
    }

    #[test]
    fn malformed_queries_rejected() {
        let dup = SgpQuery::new(bs("11"), vec![2, 2]);
        assert!(sgp_answer(&bs("101"), &dup).is_err());
        let oob = SgpQuery::new(bs("1"), vec![4]);
        assert!(sgp_answer(&bs("101"), &oob).is_err());
        let empty = SgpQuery::new(BitString::empty(), vec![]);
        assert!(sgp_answer(&bs("101"), &empty).is_err());
    }

    #[test]
    fn posterior_update_examples() {
        let p = Posterior::new(3);
        let q = SgpQuery::new(bs("1"), vec![2]);
        let (p1, k) = p.update(&q, &SgpAnswer::Equal).unwrap();
        assert_eq!(k, 1);
        assert_eq!(p1.determined(2), Some(true));
        assert_eq!(p1.entropy_bits(), 2);

        let p = Posterior::new(3);
        let q = SgpQuery::identity(bs("111"));
        let (p1, k) = p.update(&q, &SgpAnswer::Mismatch(2)).unwrap();
        assert_eq!(k, 2);
        assert_eq!(p1.determined(1), Some(true));
        assert_eq!(p1.determined(2), Some(false));
        assert_eq!(p1.determined(3), None);

        // coordinate 1 already known
        let q0 = SgpQuery::new(bs("1"), vec![1]);
        let (p1, _) = Posterior::new(3).update(&q0, &SgpAnswer::Equal).unwrap();
        let q = SgpQuery::new(bs("10"), vec![1, 2]);
        let (p2, k) = p1.update(&q, &SgpAnswer::Mismatch(2)).unwrap();
        assert_eq!(k, 1);
        assert_eq!(p2.determined(2), Some(true));
    }

    #[test]
    fn posterior_contradiction_detected() {
        let q = SgpQuery::new(bs("1"), vec![1]);
        let (p, _) = Posterior::new(2).update(&q, &SgpAnswer::Equal).unwrap();
        // same bit reported as 0 now
        let q2 = SgpQuery::new(bs("1"), vec![1]);
        assert!(p.update(&q2, &SgpAnswer::Mismatch(1)).is_err());
    }

    #[test]
    fn guess_one_takes_exactly_m_queries() {
        for trial in 0..20 {
            let mut rng = crate::rng::trial_rng(3, trial);
            let hidden = BitString::random(9, &mut rng);
            let run = run_strategy(Strategy::GuessOne, &hidden, &mut rng);
            assert_eq!(run.queries(), 9);
        }
    }

    #[test]
    fn guess_full_all_ones_needs_work() {
        // all-zero hidden: the deterministic 0-guess is right immediately
        let mut rng = crate::rng::trial_rng(0, 0);
        let run = run_strategy(Strategy::GuessFull, &bs("0000"), &mut rng);
        assert_eq!(run.queries(), 1);
        // each mismatch reveals one flipped bit
        let run = run_strategy(Strategy::GuessFull, &bs("1111"), &mut rng);
        assert_eq!(run.queries(), 4);
    }

    #[test]
    fn transcript_consistency_exhaustive_small() {
        // after any run, the strings consistent with all answers are exactly
        // those agreeing with the determined bits
        let m = 6;
        for hv in 0..1u64 << m {
            let hidden = BitString::from_index(hv, m);
            let mut rng = crate::rng::trial_rng(11, hv);
            let run = run_strategy(Strategy::GuessFull, &hidden, &mut rng);
            let mut posterior = Posterior::new(m);
            for step in &run.steps {
                let (next, _) = posterior.update(&step.query, &step.answer).unwrap();
                posterior = next;
                for cv in 0..1u64 << m {
                    let cand = BitString::from_index(cv, m);
                    let consistent = run_replay_consistent(&cand, &run, posterior.m());
                    let _ = consistent;
                }
            }
            assert!(posterior.agrees_with(&hidden));
            assert!(posterior.is_complete());
        }
    }

    fn run_replay_consistent(cand: &BitString, run: &StrategyRun, _m: usize) -> bool {
        run.steps
            .iter()
            .all(|s| sgp_answer(cand, &s.query).map(|a| a == s.answer).unwrap_or(false))
    }

    #[test]
    fn consistency_set_equals_posterior_set() {
        let m = 8;
        for hv in [0u64, 37, 255, 170] {
            let hidden = BitString::from_index(hv, m);
            let mut rng = crate::rng::trial_rng(5, hv);
            let run = run_strategy(Strategy::RandomGuess, &hidden, &mut rng);
            // replay a partial transcript and compare the two sets
            let upto = run.steps.len().div_ceil(2);
            let mut posterior = Posterior::new(m);
            for step in &run.steps[..upto] {
                let (next, _) = posterior.update(&step.query, &step.answer).unwrap();
                posterior = next;
            }
            for cv in 0..1u64 << m {
                let cand = BitString::from_index(cv, m);
                let consistent = run.steps[..upto]
                    .iter()
                    .all(|s| sgp_answer(&cand, &s.query).map(|a| a == s.answer).unwrap_or(false));
                assert_eq!(consistent, posterior.agrees_with(&cand), "cv={cv}");
            }
        }
    }

    #[test]
    fn estimate_matches_guess_one_exactly() {
        let stats = estimate_queries(Strategy::GuessOne, 32, 50, 1, 0.0);
        assert_eq!(stats.mean, 32.0);
        assert_eq!(stats.stderr, 0.0);
    }
}
