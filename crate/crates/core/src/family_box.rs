//! The n-dimensional box family: the max of per-coordinate instances from
//! [`crate::family_1d`], its single-coordinate local oracle, and the
//! reduction of that oracle to string guessing on the concatenated string.
//!
//! A query point induces, per coordinate, the 1D query string and its
//! flip-cut values. Labels `(coordinate, depth)` are ordered by decreasing
//! value with ties broken toward the smaller coordinate (the confidence
//! order), and labels valued below the candidate maximum are dropped — they
//! cannot influence the answer. The surviving labels, read in order, form
//! one string-guessing query over the concatenation of the hidden strings.

use alloc::vec::Vec;

use crate::bitstr::BitString;
use crate::dyadic::Dyadic;
use crate::family_1d::{Family1d, Interval};
use crate::oracle::FirstOrder;
use crate::sgp::{SgpAnswer, SgpQuery};
use crate::{Error, Result};

/// One hard instance: `n` strings of equal full depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxInstance {
    strings: Vec<BitString>,
    depth: usize,
}

impl BoxInstance {
    pub fn new(strings: Vec<BitString>, depth: usize) -> Result<Self> {
        if strings.is_empty() {
            return Err(Error::InvalidParameter("instance needs at least one coordinate"));
        }
        if strings.iter().any(|s| s.len() != depth) {
            return Err(Error::InvalidParameter("all strings must have the family depth"));
        }
        Ok(BoxInstance { strings, depth })
    }

    pub fn random<R: rand::Rng + ?Sized>(n: usize, depth: usize, rng: &mut R) -> Self {
        let strings = (0..n).map(|_| BitString::random(depth, rng)).collect();
        BoxInstance { strings, depth }
    }

    /// Instance index `v` interpreted as `n` concatenated strings.
    pub fn from_index(v: u64, n: usize, depth: usize) -> Self {
        let strings =
            (0..n).map(|i| BitString::from_index(v >> (i * depth), depth)).collect();
        BoxInstance { strings, depth }
    }

    pub fn n(&self) -> usize {
        self.strings.len()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn strings(&self) -> &[BitString] {
        &self.strings
    }

    pub fn string(&self, coord: usize) -> &BitString {
        &self.strings[coord - 1]
    }

    /// Concatenation of the per-coordinate strings, coordinate 1 first.
    pub fn concatenated(&self) -> BitString {
        let mut out = BitString::empty();
        for s in &self.strings {
            out = out.concat(s);
        }
        out
    }

    /// The unique minimizer: every coordinate at its interval midpoint.
    pub fn minimizer(&self, family: &Family1d) -> Result<Vec<Dyadic>> {
        self.strings.iter().map(|s| Ok(family.interval_of(s)?.midpoint())).collect()
    }
}

fn check_box_point(n: usize, x: &[Dyadic]) -> Result<()> {
    if x.len() != n {
        return Err(Error::InvalidParameter("query dimension mismatch"));
    }
    if x.iter().any(|c| c.abs() > Dyadic::one()) {
        return Err(Error::OutOfDomain);
    }
    Ok(())
}

/// `max_i f_{s_i}(x_i)`, exactly.
pub fn eval_box(family: &Family1d, inst: &BoxInstance, x: &[Dyadic]) -> Result<Dyadic> {
    check_box_point(inst.n(), x)?;
    let mut best: Option<Dyadic> = None;
    for (s, xi) in inst.strings.iter().zip(x) {
        let v = family.eval(s, xi)?;
        best = Some(match best {
            Some(b) if b >= v => b,
            _ => v,
        });
    }
    Ok(best.expect("non-empty instance"))
}

/// A label in the confidence order: depth `h` of coordinate `coord`
/// (both 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Label {
    pub coord: usize,
    pub depth: usize,
}

/// Everything the emulation derives from a query point alone: per-coordinate
/// query strings, their values, and the surviving labels in confidence
/// order. Instance-independent, so both the emulated and the reference
/// oracle may share it.
#[derive(Debug, Clone)]
pub struct QueryPlan {
    depth: usize,
    pub coord_strings: Vec<BitString>,
    pub coord_values: Vec<Dyadic>,
    pub max_value: Dyadic,
    /// Surviving labels, sorted by decreasing value then coordinate, with
    /// their flip-cut values.
    pub labels: Vec<(Label, Dyadic)>,
}

impl QueryPlan {
    pub fn build(family: &Family1d, x: &[Dyadic]) -> Result<QueryPlan> {
        if x.is_empty() {
            return Err(Error::InvalidParameter("empty query point"));
        }
        check_box_point(x.len(), x)?;
        let mut coord_strings = Vec::with_capacity(x.len());
        let mut coord_values = Vec::with_capacity(x.len());
        for xi in x {
            let q = family.query_string(xi)?;
            coord_values.push(family.eval(&q, xi)?);
            coord_strings.push(q);
        }
        let max_value = coord_values.iter().cloned().max().expect("non-empty point");
        let mut labels = Vec::new();
        for (ci, (q, xi)) in coord_strings.iter().zip(x).enumerate() {
            for h in 1..=q.len() {
                let v = family.eval(&q.flip_cut(h)?, xi)?;
                if v >= max_value {
                    labels.push((Label { coord: ci + 1, depth: h }, v));
                }
            }
        }
        // decreasing value, ties toward the smaller coordinate; within one
        // coordinate the values are strictly decreasing in depth
        labels.sort_by(|(la, va), (lb, vb)| {
            vb.cmp(va).then(la.coord.cmp(&lb.coord)).then(la.depth.cmp(&lb.depth))
        });
        Ok(QueryPlan { depth: family.depth(), coord_strings, coord_values, max_value, labels })
    }

    /// The string-guessing query over the concatenated hidden string: guess
    /// bit `m` is the label's bit of the coordinate query string, and the
    /// preference order maps it to the flat index `(coord-1)*M + depth`.
    pub fn sgp_query(&self) -> Result<SgpQuery> {
        if self.labels.is_empty() {
            return Err(Error::MalformedQuery("no surviving labels"));
        }
        let mut bits = Vec::with_capacity(self.labels.len());
        let mut sigma = Vec::with_capacity(self.labels.len());
        for (label, _) in &self.labels {
            bits.push(self.coord_strings[label.coord - 1].bit(label.depth)?);
            sigma.push((label.coord - 1) * self.depth + label.depth);
        }
        Ok(SgpQuery::new(BitString::from_bits(&bits), sigma))
    }

    /// Coordinates attaining the candidate maximum; the answer coordinate on
    /// a fully confirmed guess is the least of them.
    fn equal_case_coord(&self) -> usize {
        self.coord_values
            .iter()
            .position(|v| *v == self.max_value)
            .map(|i| i + 1)
            .expect("max attained")
    }

    /// Translates a string-guessing answer into the revealed coordinate,
    /// the revealed prefix of that coordinate's hidden string, and the
    /// first-order answer.
    pub fn emulate(
        &self,
        family: &Family1d,
        x: &[Dyadic],
        answer: &SgpAnswer,
    ) -> Result<(usize, BitString, FirstOrder<Dyadic>)> {
        let (coord, prefix) = match answer {
            SgpAnswer::Equal => {
                let coord = self.equal_case_coord();
                (coord, self.coord_strings[coord - 1].clone())
            }
            SgpAnswer::Mismatch(m) => {
                let (label, _) = self
                    .labels
                    .get(*m - 1)
                    .ok_or(Error::MalformedQuery("mismatch position out of range"))?;
                (label.coord, self.coord_strings[label.coord - 1].flip_cut(label.depth)?)
            }
        };
        let xi = &x[coord - 1];
        let ans = FirstOrder {
            value: family.eval(&prefix, xi)?,
            axis: coord,
            slope: family.slope(&prefix, xi)?,
        };
        Ok((coord, prefix, ans))
    }
}

/// Single-coordinate first-order answer computed directly from the hidden
/// instance: the value is the true maximum by direct evaluation, and the
/// axis/prefix come from scanning the confidence order against the actual
/// bits. Serves as the independent side of the emulation-equivalence tests.
pub fn reference_oracle(
    family: &Family1d,
    inst: &BoxInstance,
    x: &[Dyadic],
) -> Result<FirstOrder<Dyadic>> {
    let plan = QueryPlan::build(family, x)?;
    let mut revealed: Option<Label> = None;
    for (label, _) in &plan.labels {
        let guessed = plan.coord_strings[label.coord - 1].bit(label.depth)?;
        if inst.string(label.coord).bit(label.depth)? != guessed {
            revealed = Some(*label);
            break;
        }
    }
    let coord = match revealed {
        Some(label) => label.coord,
        None => plan.equal_case_coord(),
    };
    let q = &plan.coord_strings[coord - 1];
    let prefix = family.determining_prefix(q, inst.string(coord))?;
    let xi = &x[coord - 1];
    Ok(FirstOrder {
        value: eval_box(family, inst, x)?,
        axis: coord,
        slope: family.slope(&prefix, xi)?,
    })
}

/// Answer of the emulated single-coordinate oracle, produced by running the
/// string-guessing oracle on the plan's query.
pub fn emulated_oracle(
    family: &Family1d,
    inst: &BoxInstance,
    x: &[Dyadic],
) -> Result<FirstOrder<Dyadic>> {
    let plan = QueryPlan::build(family, x)?;
    let query = plan.sgp_query()?;
    let hidden = inst.concatenated();
    let answer = crate::sgp::sgp_answer(&hidden, &query)?;
    let (_, _, ans) = plan.emulate(family, x, &answer)?;
    Ok(ans)
}

/// The box-to-string-guessing reduction as a generic [`Emulation`]: outer
/// queries are box points, the inner oracle is the string-guessing oracle
/// over the concatenated hidden string. One inner query per outer query.
///
/// [`Emulation`]: crate::oracle::Emulation
#[derive(Debug, Clone)]
pub struct BoxSgpEmulation {
    pub family: Family1d,
}

impl crate::oracle::Emulation for BoxSgpEmulation {
    type OuterQuery = Vec<Dyadic>;
    type OuterAnswer = FirstOrder<Dyadic>;
    type InnerQuery = SgpQuery;
    type InnerAnswer = SgpAnswer;

    fn map_query(&self, x: &Vec<Dyadic>) -> SgpQuery {
        QueryPlan::build(&self.family, x)
            .and_then(|p| p.sgp_query())
            .expect("valid box query")
    }

    fn map_answer(&self, x: &Vec<Dyadic>, a: &SgpAnswer) -> FirstOrder<Dyadic> {
        let plan = QueryPlan::build(&self.family, x).expect("valid box query");
        let (_, _, ans) = plan.emulate(&self.family, x, a).expect("consistent answer");
        ans
    }
}

/// Report of an exhaustive packing check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingReport {
    pub instances: u64,
    pub pairs_checked: u64,
    pub disjoint: bool,
    /// A pair of instance indices sharing an eps-minimum, if any.
    pub witness: Option<(u64, u64)>,
}

/// Exhaustively verifies that no two instances share an eps-minimum.
/// The eps-minima of an instance form the open box of its per-coordinate
/// sublevel intervals, so two instances collide only if the intervals
/// overlap in every coordinate.
pub fn packing_check(n: usize, depth: usize, eps: &Dyadic) -> Result<PackingReport> {
    if n * depth > 24 {
        return Err(Error::InvalidParameter("packing check is exhaustive; need n*M <= 24"));
    }
    let family = Family1d::new(depth)?;
    if eps.signum() <= 0 || *eps > Dyadic::pow2(-3 * depth as i64) {
        return Err(Error::AccuracyTooCoarse("packing needs 0 < eps <= 2^-3M"));
    }
    // per-string open sublevel intervals
    let per_string: Vec<Interval> = BitString::enumerate(depth)
        .map(|s| family.eps_minima(&s, eps))
        .collect::<Result<_>>()?;
    let strings_per_coord = 1u64 << depth;
    let total = strings_per_coord.pow(n as u32);
    let mut pairs = 0;
    let mut witness = None;
    'outer: for a in 0..total {
        for b in a + 1..total {
            pairs += 1;
            let mut all_overlap = true;
            for c in 0..n {
                let sa = (a / strings_per_coord.pow(c as u32)) % strings_per_coord;
                let sb = (b / strings_per_coord.pow(c as u32)) % strings_per_coord;
                let ia = &per_string[sa as usize];
                let ib = &per_string[sb as usize];
                // open intervals: touching endpoints do not overlap
                let overlap = ia.lo < ib.hi && ib.lo < ia.hi;
                if !overlap {
                    all_overlap = false;
                    break;
                }
            }
            if all_overlap {
                witness = Some((a, b));
                break 'outer;
            }
        }
    }
    Ok(PackingReport {
        instances: total,
        pairs_checked: pairs,
        disjoint: witness.is_none(),
        witness,
    })
}

/// The box family inscribed in an Lp ball by rescaling: queries in the unit
/// ball are scaled up by `n^(1/p)` into the box, values scaled down by the
/// same factor. Slopes are unchanged (the two scale factors cancel), and
/// the wrapped family is 1-Lipschitz in the Lp norm. Float-level interface;
/// inner queries are snapped to the dyadic grid.
#[derive(Debug, Clone)]
pub struct ScaledBox {
    pub family: Family1d,
    pub n: usize,
    pub input_scale: f64,
    pub output_scale: f64,
}

impl ScaledBox {
    /// Builds the wrapper for accuracy `eps` on the n-dimensional unit Lp
    /// ball; the inner family depth comes from the effective accuracy
    /// `eps * n^(1/p)`.
    pub fn new(p: f64, n: usize, eps: f64) -> Result<ScaledBox> {
        if !(1.0..f64::INFINITY).contains(&p) {
            return Err(Error::InvalidParameter("p must be in [1, inf)"));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive"));
        }
        let input_scale = crate::math::powf(n as f64, 1.0 / p);
        let effective = eps * input_scale;
        if effective >= 1.0 || effective <= 0.0 {
            return Err(Error::AccuracyTooCoarse("eps * n^(1/p) must be below 1"));
        }
        let depth = (crate::math::log2(1.0 / effective) / 3.0) as usize;
        if depth == 0 {
            return Err(Error::AccuracyTooCoarse("effective accuracy above 1/8"));
        }
        Ok(ScaledBox {
            family: Family1d::new(depth)?,
            n,
            input_scale,
            output_scale: 1.0 / input_scale,
        })
    }

    pub fn depth(&self) -> usize {
        self.family.depth()
    }

    fn snap(&self, y: &[f64]) -> Vec<Dyadic> {
        y.iter()
            .map(|&c| Dyadic::from_f64_snapped((c * self.input_scale).clamp(-1.0, 1.0), 48))
            .collect()
    }

    /// Evaluates the wrapped instance at a float point of the unit Lp ball.
    pub fn eval(&self, inst: &BoxInstance, y: &[f64]) -> Result<f64> {
        let x = self.snap(y);
        Ok(eval_box(&self.family, inst, &x)?.to_f64() * self.output_scale)
    }

    /// First-order answer at a float point; the slope needs no rescaling.
    pub fn reference_oracle(&self, inst: &BoxInstance, y: &[f64]) -> Result<FirstOrder<f64>> {
        let x = self.snap(y);
        let ans = reference_oracle(&self.family, inst, &x)?;
        Ok(FirstOrder {
            value: ans.value.to_f64() * self.output_scale,
            axis: ans.axis,
            slope: ans.slope.to_f64(),
        })
    }
}
