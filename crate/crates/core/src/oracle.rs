//! Generic oracle plumbing: transcript recording, emulation of one oracle
//! by another, and a locality check for finite families.

use alloc::vec::Vec;
use core::cell::RefCell;

/// A deterministic oracle: a pure function of (instance, query). Algorithm
/// randomness lives in the algorithm, never here.
pub trait Oracle {
    type Query;
    type Answer;

    fn answer(&self, query: &Self::Query) -> Self::Answer;
}

/// First-order answer with the subgradient supported on a single axis:
/// value plus `slope * e_axis`. Axes are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirstOrder<T> {
    pub value: T,
    pub axis: usize,
    pub slope: T,
}

/// Wraps an oracle and records every query-answer pair, in order.
/// Single-writer per run; runs are independent.
pub struct Recorder<'a, O: Oracle> {
    inner: &'a O,
    log: RefCell<Vec<(O::Query, O::Answer)>>,
}

impl<'a, O: Oracle> Recorder<'a, O>
where
    O::Query: Clone,
    O::Answer: Clone,
{
    pub fn new(inner: &'a O) -> Self {
        Recorder { inner, log: RefCell::new(Vec::new()) }
    }

    /// Number of queries answered so far.
    pub fn count(&self) -> usize {
        self.log.borrow().len()
    }

    pub fn transcript(&self) -> Vec<(O::Query, O::Answer)> {
        self.log.borrow().clone()
    }
}

impl<O: Oracle> Oracle for Recorder<'_, O>
where
    O::Query: Clone,
    O::Answer: Clone,
{
    type Query = O::Query;
    type Answer = O::Answer;

    fn answer(&self, query: &Self::Query) -> Self::Answer {
        let a = self.inner.answer(query);
        self.log.borrow_mut().push((query.clone(), a.clone()));
        a
    }
}

/// A reduction between oracle interfaces: a query map into the inner
/// oracle's language and an answer map back. Sound when the emulated oracle
/// equals the oracle it stands in for, on every query.
pub trait Emulation {
    type OuterQuery;
    type OuterAnswer;
    type InnerQuery;
    type InnerAnswer;

    fn map_query(&self, q: &Self::OuterQuery) -> Self::InnerQuery;
    fn map_answer(&self, q: &Self::OuterQuery, a: &Self::InnerAnswer) -> Self::OuterAnswer;
}

/// The oracle induced by an emulation over an inner oracle. Each outer query
/// issues exactly one inner query, so transcript lengths agree by
/// construction; tests assert this on recorded runs as well.
pub struct Emulated<'a, E, O> {
    pub emulation: &'a E,
    pub inner: &'a O,
}

impl<'a, E, O> Emulated<'a, E, O> {
    pub fn new(emulation: &'a E, inner: &'a O) -> Self {
        Emulated { emulation, inner }
    }
}

impl<E, O> Oracle for Emulated<'_, E, O>
where
    E: Emulation,
    O: Oracle<Query = E::InnerQuery, Answer = E::InnerAnswer>,
{
    type Query = E::OuterQuery;
    type Answer = E::OuterAnswer;

    fn answer(&self, query: &Self::Query) -> Self::Answer {
        let inner_q = self.emulation.map_query(query);
        let inner_a = self.inner.answer(&inner_q);
        self.emulation.map_answer(query, &inner_a)
    }
}

/// Outcome of a locality check over a finite family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalityReport {
    pub pairs_checked: usize,
    /// (query index, instance index, instance index) triples where two
    /// instances agree near the query but the oracle answered differently.
    pub failures: Vec<(usize, usize, usize)>,
}

impl LocalityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that instances equal near a query get equal answers. The family
/// module supplies the "agree near x" decider.
pub fn locality_check<F, Q, A, OracleFn, AgreeFn>(
    family: &[F],
    queries: &[Q],
    oracle: OracleFn,
    agree_near: AgreeFn,
) -> LocalityReport
where
    A: PartialEq,
    OracleFn: Fn(&F, &Q) -> A,
    AgreeFn: Fn(&F, &F, &Q) -> bool,
{
    let mut pairs_checked = 0;
    let mut failures = Vec::new();
    for (qi, q) in queries.iter().enumerate() {
        for i in 0..family.len() {
            for j in i + 1..family.len() {
                if agree_near(&family[i], &family[j], q) {
                    pairs_checked += 1;
                    if oracle(&family[i], q) != oracle(&family[j], q) {
                        failures.push((qi, i, j));
                    }
                }
            }
        }
    }
    LocalityReport { pairs_checked, failures }
}
