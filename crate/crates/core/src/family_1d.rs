//! The recursive one-dimensional hard family on `[-1, 1]`.
//!
//! Instances are indexed by bit strings. Appending a bit narrows the active
//! interval to a quarter-length subinterval and overlays a shallower V whose
//! kink sits at the subinterval's midpoint. All quantities are dyadic, so
//! evaluation, subgradients and the reduction to string guessing are exact.
//!
//! Bit 0 selects the `[-1/2, 0]` subinterval (patch active on `[-1/2, 1]`),
//! bit 1 the mirrored `[0, 1/2]` subinterval (patch active on `[-1, 1/2]`).
//! Both patches use the depth value drop `8^-(l+1)`: the mirrored extension
//! is the exact reflection of the other, which keeps the on-interval closed
//! form and the continuity identities valid verbatim.

use alloc::vec::Vec;

use crate::bitstr::BitString;
use crate::dyadic::Dyadic;
use crate::oracle::FirstOrder;
use crate::sgp::{SgpAnswer, SgpQuery};
use crate::{Error, Result};

/// Closed dyadic interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        debug_assert!(lo < hi);
        Interval { lo, hi }
    }

    pub fn unit() -> Self {
        Interval::new(Dyadic::from(-1), Dyadic::from(1))
    }

    /// The `t`-point: `lo + (1 + t)(hi - lo)/2` for `t` in `[-1, 1]`.
    pub fn point_at(&self, t: &Dyadic) -> Dyadic {
        let half_len = (&self.hi - &self.lo).half();
        &self.lo + &(&(&Dyadic::one() + t) * &half_len)
    }

    pub fn midpoint(&self) -> Dyadic {
        self.point_at(&Dyadic::zero())
    }

    /// Subinterval `[point_at(t1), point_at(t2)]`.
    pub fn sub(&self, t1: i64, t2: i64, denom_pow2: i64) -> Interval {
        let t1 = Dyadic::from_parts(t1, -denom_pow2);
        let t2 = Dyadic::from_parts(t2, -denom_pow2);
        Interval::new(self.point_at(&t1), self.point_at(&t2))
    }

    pub fn length(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn contains_interior(&self, x: &Dyadic) -> bool {
        self.lo < *x && *x < self.hi
    }

    /// Child interval for one appended bit.
    pub fn child(&self, bit: bool) -> Interval {
        if bit {
            self.sub(0, 1, 1) // [I(0), I(1/2)]
        } else {
            self.sub(-1, 0, 1) // [I(-1/2), I(0)]
        }
    }
}

/// Value at the endpoints of every depth-`k` interval: `b_0 = 1`,
/// `b_{k+1} = b_k - 2^-(3k+1)`.
pub fn breakpoint(k: usize) -> Dyadic {
    let mut b = Dyadic::one();
    for l in 0..k {
        b = &b - &Dyadic::pow2(-(3 * l as i64 + 1));
    }
    b
}

/// The family at depth `M`; instances are strings of length up to `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Family1d {
    depth: usize,
}

/// Patch geometry for appending one bit at level `l` below interval `parent`.
struct Patch {
    region_lo: Dyadic,
    region_hi: Dyadic,
    center: Dyadic,
}

fn patch(parent: &Interval, bit: bool) -> Patch {
    let quarter = |t: i64| parent.point_at(&Dyadic::from_parts(t, -2));
    if bit {
        Patch {
            region_lo: parent.point_at(&Dyadic::from(-1)),
            region_hi: parent.point_at(&Dyadic::from_parts(1, -1)),
            center: quarter(1),
        }
    } else {
        Patch {
            region_lo: parent.point_at(&Dyadic::from_parts(-1, -1)),
            region_hi: parent.point_at(&Dyadic::from(1)),
            center: quarter(-1),
        }
    }
}

impl Family1d {
    pub fn new(depth: usize) -> Result<Self> {
        if depth == 0 || depth > 1 << 12 {
            return Err(Error::InvalidParameter("depth must be in 1..=4096"));
        }
        Ok(Family1d { depth })
    }

    /// Depth from an accuracy: largest `M` with `eps <= 2^-3M` (at least 1).
    pub fn from_accuracy(eps: &Dyadic) -> Result<Self> {
        if eps.signum() <= 0 || *eps > Dyadic::pow2(-3) {
            return Err(Error::AccuracyTooCoarse("depth formula needs 0 < eps <= 1/8"));
        }
        let mut m = 1;
        while *eps <= Dyadic::pow2(-3 * (m as i64 + 1)) && m < 1 << 12 {
            m += 1;
        }
        Family1d::new(m)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Minimum value of any depth-`M` instance: `b_M - 8^-M`, attained at
    /// the midpoint of its interval.
    pub fn min_value(&self) -> Dyadic {
        &breakpoint(self.depth) - &Dyadic::pow2(-3 * self.depth as i64)
    }

    /// The nested interval of a string.
    pub fn interval_of(&self, s: &BitString) -> Result<Interval> {
        if s.len() > self.depth {
            return Err(Error::DepthExceeded { len: s.len(), depth: self.depth });
        }
        let mut iv = Interval::unit();
        for &bit in s.bits() {
            iv = iv.child(bit);
        }
        Ok(iv)
    }

    fn check_point(&self, x: &Dyadic) -> Result<()> {
        if x.abs() > Dyadic::one() {
            return Err(Error::OutOfDomain);
        }
        Ok(())
    }

    /// Exact value of the instance indexed by `s` at `x`.
    pub fn eval(&self, s: &BitString, x: &Dyadic) -> Result<Dyadic> {
        self.check_point(x)?;
        if s.len() > self.depth {
            return Err(Error::DepthExceeded { len: s.len(), depth: self.depth });
        }
        let mut value = x.abs();
        let mut parent = Interval::unit();
        for (l, &bit) in s.bits().iter().enumerate() {
            let p = patch(&parent, bit);
            if p.region_lo <= *x && *x <= p.region_hi {
                let level = l as i64 + 1;
                value = &(&breakpoint(l + 1) - &Dyadic::pow2(-3 * level))
                    + &(x - &p.center).abs().mul_pow2(-level);
            }
            parent = parent.child(bit);
        }
        Ok(value)
    }

    /// A subgradient of the instance at `x`: the slope of the active linear
    /// piece, with 0 at kinks (valid since the two branch slopes bracket it).
    pub fn slope(&self, s: &BitString, x: &Dyadic) -> Result<Dyadic> {
        self.check_point(x)?;
        if s.len() > self.depth {
            return Err(Error::DepthExceeded { len: s.len(), depth: self.depth });
        }
        let sign = |d: &Dyadic| Dyadic::from(d.signum() as i64);
        let mut slope = sign(x);
        let mut parent = Interval::unit();
        for (l, &bit) in s.bits().iter().enumerate() {
            let p = patch(&parent, bit);
            if p.region_lo <= *x && *x <= p.region_hi {
                let level = l as i64 + 1;
                slope = sign(&(x - &p.center)).mul_pow2(-level);
            }
            parent = parent.child(bit);
        }
        Ok(slope)
    }

    /// The query string for a point: the longest interval interior
    /// containing `x` (of length below `M`), extended by the bit whose
    /// instance has the smaller value at `x` (ties append 0).
    pub fn query_string(&self, x: &Dyadic) -> Result<BitString> {
        self.check_point(x)?;
        let mut s0 = BitString::empty();
        let mut iv = Interval::unit();
        while s0.len() + 1 < self.depth {
            let c0 = iv.child(false);
            let c1 = iv.child(true);
            if c0.contains_interior(x) {
                s0 = s0.append(false);
                iv = c0;
            } else if c1.contains_interior(x) {
                s0 = s0.append(true);
                iv = c1;
            } else {
                break;
            }
        }
        let f0 = self.eval(&s0.append(false), x)?;
        let f1 = self.eval(&s0.append(true), x)?;
        Ok(s0.append(f1 < f0))
    }

    /// SGP query corresponding to a point: the query string with identity
    /// preference order.
    pub fn sgp_query(&self, x: &Dyadic) -> Result<SgpQuery> {
        Ok(SgpQuery::identity(self.query_string(x)?))
    }

    /// Translates a string-guessing answer into a first-order answer. `q`
    /// must be `query_string(x)`. Returns the revealed prefix and the
    /// oracle answer `(f_p(x), slope of f_p at x)`.
    pub fn emulate_first_order(
        &self,
        x: &Dyadic,
        q: &BitString,
        answer: &SgpAnswer,
    ) -> Result<(BitString, FirstOrder<Dyadic>)> {
        let p = match answer {
            SgpAnswer::Equal => q.clone(),
            SgpAnswer::Mismatch(k) => q.flip_cut(*k)?,
        };
        let ans = FirstOrder { value: self.eval(&p, x)?, axis: 1, slope: self.slope(&p, x)? };
        Ok((p, ans))
    }

    /// Determining prefix of a hidden string for the query string `q`: the
    /// unique prefix of `hidden` among the flip-cuts of `q` and `q` itself.
    pub fn determining_prefix(&self, q: &BitString, hidden: &BitString) -> Result<BitString> {
        match q.first_mismatch(hidden) {
            Some(k) => q.flip_cut(k),
            None if q.len() <= hidden.len() => Ok(q.clone()),
            None => Err(Error::MalformedQuery("hidden string shorter than query string")),
        }
    }

    /// Open sublevel interval `{x : f_s(x) < f_s^* + eps}` for a full-depth
    /// string; contained in the interior of the string's interval.
    pub fn eps_minima(&self, s: &BitString, eps: &Dyadic) -> Result<Interval> {
        if s.len() != self.depth {
            return Err(Error::DepthExceeded { len: s.len(), depth: self.depth });
        }
        if eps.signum() <= 0 || *eps > Dyadic::pow2(-3 * self.depth as i64) {
            return Err(Error::AccuracyTooCoarse("eps must be in (0, 2^-3M] for the packing regime"));
        }
        let center = self.interval_of(s)?.midpoint();
        let radius = eps.mul_pow2(self.depth as i64);
        Ok(Interval::new(&center - &radius, &center + &radius))
    }

    /// All instance values `f_t(x)` for `t` of full depth equal within each
    /// determining-prefix class; exposed for exhaustive soundness tests.
    pub fn all_values_at(&self, x: &Dyadic) -> Result<Vec<(BitString, Dyadic)>> {
        let mut out = Vec::new();
        for t in BitString::enumerate(self.depth) {
            let v = self.eval(&t, x)?;
            out.push((t, v));
        }
        Ok(out)
    }
}
