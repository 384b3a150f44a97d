//! Algorithms that consume the oracles: a projected subgradient baseline,
//! tailored learners that extract one string bit (or sign) per answer, and
//! random search. The tailored learners witness that the query lower
//! bounds are near-tight: their counts are within small constant factors
//! of the information floor.

use alloc::vec::Vec;

use rand::Rng;

use crate::bitstr::BitString;
use crate::dyadic::Dyadic;
use crate::family_1d::Family1d;
use crate::family_box::{BoxInstance, QueryPlan};
use crate::family_lp::{packing_witness, LpInstance, WorkingBasis};
use crate::math;
use crate::oracle::FirstOrder;
use crate::{Error, Result};

/// What a run recovered about the hidden instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Identified {
    Strings(Vec<BitString>),
    Signs(Vec<i8>),
}

/// Outcome of one algorithm run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub queries_used: usize,
    pub final_point: Vec<f64>,
    pub identified: Option<Identified>,
    pub success: bool,
}

/// Exact first-order oracle over the box family.
pub trait BoxOracle {
    fn query(&mut self, x: &[Dyadic]) -> FirstOrder<Dyadic>;
}

impl<F: FnMut(&[Dyadic]) -> FirstOrder<Dyadic>> BoxOracle for F {
    fn query(&mut self, x: &[Dyadic]) -> FirstOrder<Dyadic> {
        self(x)
    }
}

/// Learns every hidden string through the single-coordinate oracle by
/// querying the midpoint of the current best guess extended with zeros.
///
/// At such a point every coordinate's query string is exactly the guess, so
/// a mismatch answer names one fresh bit (the flip) and confirms every
/// label ahead of it, while the answer value hitting the family minimum
/// certifies the whole guess. Expected queries: about half the total bit
/// count plus one.
pub fn tailored_box_learner<O: BoxOracle>(
    family: &Family1d,
    n: usize,
    oracle: &mut O,
) -> Result<RunResult> {
    let depth = family.depth();
    let min_value = family.min_value();
    let mut prefixes = alloc::vec![BitString::empty(); n];
    let mut queries = 0usize;
    let max_queries = 2 * n * depth + 2;
    loop {
        let guesses: Vec<BitString> = prefixes
            .iter()
            .map(|p| {
                let mut g = p.clone();
                while g.len() < depth {
                    g = g.append(false);
                }
                g
            })
            .collect();
        let x: Vec<Dyadic> = guesses
            .iter()
            .map(|g| Ok(family.interval_of(g)?.midpoint()))
            .collect::<Result<_>>()?;
        let plan = QueryPlan::build(family, &x)?;
        let ans = oracle.query(&x);
        queries += 1;
        if ans.value == min_value {
            prefixes = guesses;
            break;
        }
        let pos = plan
            .labels
            .iter()
            .position(|(l, v)| l.coord == ans.axis && *v == ans.value)
            .ok_or(Error::MalformedQuery("answer does not name a surviving label"))?;
        for (label, _) in &plan.labels[..pos] {
            let c = label.coord - 1;
            if label.depth > prefixes[c].len() {
                prefixes[c] = guesses[c].prefix(label.depth)?;
            }
        }
        let (label, _) = &plan.labels[pos];
        prefixes[label.coord - 1] = guesses[label.coord - 1].flip_cut(label.depth)?;
        if prefixes.iter().all(|p| p.len() == depth) {
            break;
        }
        if queries > max_queries {
            return Err(Error::MalformedQuery("learner exceeded its query budget"));
        }
    }
    let inst = BoxInstance::new(prefixes.clone(), depth)?;
    let final_point: Vec<f64> =
        inst.minimizer(family)?.iter().map(|d| d.to_f64()).collect();
    Ok(RunResult {
        queries_used: queries,
        final_point,
        identified: Some(Identified::Strings(prefixes)),
        success: true,
    })
}

/// First-order oracle over the Lp family (working-coordinate answers).
pub trait LpOracle {
    fn query(&mut self, x: &[f64]) -> FirstOrder<f64>;
}

impl<F: FnMut(&[f64]) -> FirstOrder<f64>> LpOracle for F {
    fn query(&mut self, x: &[f64]) -> FirstOrder<f64> {
        self(x)
    }
}

/// Learns every hidden sign by querying points whose working coordinates
/// have strictly decreasing magnitudes, unknown coordinates first. Each
/// answer either confirms a prefix of guesses and flips one sign, or
/// confirms everything scanned.
pub fn tailored_lp_learner<O: LpOracle>(
    basis: &WorkingBasis,
    oracle: &mut O,
) -> Result<RunResult> {
    let m = basis.m();
    let mut known: Vec<Option<i8>> = alloc::vec![None; m];
    let mut queries = 0usize;
    let max_queries = 2 * m + 2;
    while known.iter().any(|s| s.is_none()) {
        let mut order: Vec<usize> = (1..=m).filter(|&i| known[i - 1].is_none()).collect();
        order.extend((1..=m).filter(|&i| known[i - 1].is_some()));
        // strictly decreasing magnitudes in (1/2, 1] along the order
        let mut c = alloc::vec![0.0f64; m];
        for (rank, &i) in order.iter().enumerate() {
            let mag = 1.0 - rank as f64 / (2.0 * m as f64);
            let guess = known[i - 1].unwrap_or(1) as f64;
            c[i - 1] = -guess * mag;
        }
        let x_raw = basis.point_from_working(&c);
        let norm = match basis.mode() {
            crate::family_lp::BasisMode::Standard => basis.norm_p(&x_raw),
            crate::family_lp::BasisMode::Tensor => {
                math::sqrt(c.iter().map(|v| v * v).sum::<f64>())
            }
        };
        let x: Vec<f64> = x_raw.iter().map(|v| v / norm).collect();
        let ans = oracle.query(&x);
        queries += 1;
        let guess_at_axis = known[ans.axis - 1].unwrap_or(1) as f64;
        if ans.slope == -guess_at_axis {
            // mismatch: guesses ahead of the axis confirmed, axis flipped
            let pos = order.iter().position(|&i| i == ans.axis).expect("axis in order");
            for &i in &order[..pos] {
                known[i - 1].get_or_insert(1);
            }
            known[ans.axis - 1] = Some(-(guess_at_axis as i8));
        } else {
            // full confirmation
            for &i in &order {
                known[i - 1].get_or_insert(1);
            }
        }
        if queries > max_queries {
            return Err(Error::MalformedQuery("learner exceeded its query budget"));
        }
    }
    let signs: Vec<i8> = known.into_iter().map(|s| s.expect("all known")).collect();
    let inst = LpInstance::new(basis.clone(), signs.clone())?;
    Ok(RunResult {
        queries_used: queries,
        final_point: packing_witness(&inst),
        identified: Some(Identified::Signs(signs)),
        success: true,
    })
}

/// Feasible regions for the float-level methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// `[-1, 1]^n`.
    Cube { n: usize },
    /// Unit Lp ball; iterates are kept in the largest inscribed L2 ball
    /// (radius `min(1, n^(1/2 - 1/p))`), a documented simplification: the
    /// methods are demonstrators and only their query counts matter.
    Ball { p: f64, n: usize },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Cube { n } | Domain::Ball { n, .. } => *n,
        }
    }

    fn inscribed_radius(&self) -> f64 {
        match self {
            Domain::Cube { .. } => 1.0,
            Domain::Ball { p, n } => {
                if *p >= 2.0 {
                    1.0
                } else {
                    math::powf(*n as f64, 0.5 - 1.0 / p)
                }
            }
        }
    }

    pub fn project(&self, x: &mut [f64]) {
        match self {
            Domain::Cube { .. } => {
                for v in x {
                    *v = v.clamp(-1.0, 1.0);
                }
            }
            Domain::Ball { .. } => {
                let r = self.inscribed_radius();
                let norm = math::sqrt(x.iter().map(|v| v * v).sum::<f64>());
                if norm > r {
                    for v in x {
                        *v *= r / norm;
                    }
                }
            }
        }
    }

    /// L2 diameter of the region the iterates live in.
    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Cube { n } => 2.0 * math::sqrt(*n as f64),
            Domain::Ball { .. } => 2.0 * self.inscribed_radius(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let n = self.dim();
        let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        match self {
            Domain::Cube { .. } => raw,
            Domain::Ball { .. } => {
                let r = self.inscribed_radius();
                let norm = math::sqrt(raw.iter().map(|v| v * v).sum::<f64>()).max(1e-12);
                let u: f64 = rng.random();
                let radius = r * math::powf(u, 1.0 / n as f64);
                raw.iter().map(|v| v / norm * radius).collect()
            }
        }
    }
}

/// Standard projected subgradient iteration `x <- Proj(x - eta_t g)` with
/// `eta_t = D / (G sqrt(t))`. The oracle returns the value and an ambient
/// subgradient; `target` decides when a queried point counts as solved
/// (the harness passes the sublevel threshold).
pub fn projected_subgradient<OracleFn, TargetFn>(
    domain: Domain,
    steps: usize,
    lipschitz: f64,
    mut oracle: OracleFn,
    target: TargetFn,
) -> RunResult
where
    OracleFn: FnMut(&[f64]) -> (f64, Vec<f64>),
    TargetFn: Fn(f64) -> bool,
{
    let n = domain.dim();
    let mut x = alloc::vec![0.0; n];
    domain.project(&mut x);
    let d = domain.diameter();
    let g_scale = lipschitz.max(1e-12);
    let mut best_point = x.clone();
    let mut best_value = f64::INFINITY;
    for t in 1..=steps {
        let (value, grad) = oracle(&x);
        if value < best_value {
            best_value = value;
            best_point = x.clone();
        }
        if target(value) {
            return RunResult {
                queries_used: t,
                final_point: x,
                identified: None,
                success: true,
            };
        }
        let eta = d / (g_scale * math::sqrt(t as f64));
        for (xi, gi) in x.iter_mut().zip(&grad) {
            *xi -= eta * gi;
        }
        domain.project(&mut x);
        // divergence guard: the projection keeps iterates in the domain,
        // but reject non-finite coordinates outright
        if x.iter().any(|v| !v.is_finite()) {
            break;
        }
    }
    RunResult {
        queries_used: steps,
        final_point: best_point,
        identified: None,
        success: false,
    }
}

/// Uniform random queries, best seen point.
pub fn random_search<OracleFn, TargetFn, R>(
    domain: Domain,
    budget: usize,
    rng: &mut R,
    mut oracle: OracleFn,
    target: TargetFn,
) -> RunResult
where
    OracleFn: FnMut(&[f64]) -> f64,
    TargetFn: Fn(f64) -> bool,
    R: Rng + ?Sized,
{
    let mut best_point = alloc::vec![0.0; domain.dim()];
    let mut best_value = f64::INFINITY;
    for t in 1..=budget {
        let x = domain.sample(rng);
        let value = oracle(&x);
        if value < best_value {
            best_value = value;
            best_point = x.clone();
        }
        if target(value) {
            return RunResult { queries_used: t, final_point: x, identified: None, success: true };
        }
    }
    RunResult { queries_used: budget, final_point: best_point, identified: None, success: false }
}

/// Float adapter over the exact box reference oracle: snaps queries to the
/// dyadic grid and returns the ambient subgradient.
pub fn box_f64_oracle<'a>(
    family: &'a Family1d,
    inst: &'a BoxInstance,
) -> impl FnMut(&[f64]) -> (f64, Vec<f64>) + 'a {
    move |x: &[f64]| {
        let xd: Vec<Dyadic> = x
            .iter()
            .map(|&c| Dyadic::from_f64_snapped(c.clamp(-1.0, 1.0), 48))
            .collect();
        let ans = crate::family_box::reference_oracle(family, inst, &xd).expect("valid query");
        let mut grad = alloc::vec![0.0; inst.n()];
        grad[ans.axis - 1] = ans.slope.to_f64();
        (ans.value.to_f64(), grad)
    }
}

/// Float adapter over the Lp reference oracle, yielding ambient
/// subgradients in the standard basis.
pub fn lp_f64_oracle<'a>(inst: &'a LpInstance) -> impl FnMut(&[f64]) -> (f64, Vec<f64>) + 'a {
    move |x: &[f64]| {
        let ans = crate::family_lp::reference_oracle(inst, x).expect("valid query");
        (ans.value, inst.basis.ambient_subgradient(ans.axis, ans.slope))
    }
}
