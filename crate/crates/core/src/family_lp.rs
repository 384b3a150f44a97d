//! The large-scale hard family on the unit Lp ball: the max of signed
//! working coordinates, `f_s(x) = max_i s_i c_i(x)`.
//!
//! For `p >= 2` the working coordinates are the standard ones. For
//! `1 <= p < 2` they are the functionals `c_i(x) = <nu_i, x> / M^(1/q)`
//! over the orthogonal ±1 basis obtained by tensoring `(1,1), (1,-1)`,
//! which maximizes the Lp/L2 norm ratio; `q` is the conjugate exponent, so
//! each functional is 1-Lipschitz in the Lp norm.
//!
//! Computations here are binary64; the exactness budget of this family is
//! discrete (axes and signs), with values compared at 1e-12.

use alloc::vec::Vec;

use crate::math;
use crate::oracle::FirstOrder;
use crate::sgp::{SgpAnswer, SgpQuery};
use crate::{bitstr::BitString, Error, Result};

/// Norm tolerance for domain membership checks.
pub const BALL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisMode {
    /// Standard coordinates (`p >= 2`).
    Standard,
    /// Scaled ±1 tensor basis (`1 <= p < 2`, `M` a power of two).
    Tensor,
}

/// The working basis for the first `M` coordinates.
#[derive(Debug, Clone)]
pub struct WorkingBasis {
    p: f64,
    m: usize,
    mode: BasisMode,
}

/// Depth choice: `M = floor(1/eps^p) - 1` for `p >= 2`, and the largest
/// power of two below `1/eps^2` for `p < 2`.
pub fn choose_m(p: f64, eps: f64) -> Result<usize> {
    if !(1.0..f64::INFINITY).contains(&p) {
        return Err(Error::InvalidParameter("p must be in [1, inf)"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter("eps must be in (0, 1)"));
    }
    let m = if p >= 2.0 {
        let raw = math::floor(math::powf(1.0 / eps, p)) - 1.0;
        if raw < 1.0 {
            return Err(Error::AccuracyTooFine("1/eps^p - 1 below 1"));
        }
        raw as usize
    } else {
        let bound = 1.0 / (eps * eps);
        if bound <= 2.0 {
            return Err(Error::AccuracyTooFine("no power of two below 1/eps^2"));
        }
        let mut m = 1usize;
        while ((m * 2) as f64) < bound {
            m *= 2;
        }
        m
    };
    Ok(m)
}

impl WorkingBasis {
    pub fn new(p: f64, m: usize) -> Result<Self> {
        if !(1.0..f64::INFINITY).contains(&p) {
            return Err(Error::InvalidParameter("p must be in [1, inf)"));
        }
        if m == 0 {
            return Err(Error::InvalidParameter("M must be positive"));
        }
        let mode = if p >= 2.0 { BasisMode::Standard } else { BasisMode::Tensor };
        if mode == BasisMode::Tensor && !m.is_power_of_two() {
            return Err(Error::InvalidParameter("tensor basis needs M = 2^l"));
        }
        Ok(WorkingBasis { p, m, mode })
    }

    /// Basis for accuracy `eps`, with `M` from [`choose_m`].
    pub fn from_accuracy(p: f64, eps: f64) -> Result<Self> {
        WorkingBasis::new(p, choose_m(p, eps)?)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn mode(&self) -> BasisMode {
        self.mode
    }

    /// Conjugate exponent `q` with `1/p + 1/q = 1` (`inf` for `p = 1`).
    pub fn q(&self) -> f64 {
        if self.p == 1.0 {
            f64::INFINITY
        } else {
            self.p / (self.p - 1.0)
        }
    }

    /// `r = max(p, 2)`.
    pub fn r(&self) -> f64 {
        self.p.max(2.0)
    }

    /// `M^(1/q)`, the scaling of the tensor functionals (1 for `p = 1`).
    fn tensor_scale(&self) -> f64 {
        if self.p == 1.0 {
            1.0
        } else {
            math::powf(self.m as f64, 1.0 - 1.0 / self.p)
        }
    }

    /// Entry `j` of the ±1 basis vector `nu_i` (0-based indices): the
    /// Sylvester pattern `(-1)^popcount(i & j)`.
    pub fn nu_entry(&self, i: usize, j: usize) -> f64 {
        if (i & j).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Working coordinate `i` (1-based) of `x`.
    pub fn working_coordinate(&self, i: usize, x: &[f64]) -> f64 {
        match self.mode {
            BasisMode::Standard => x[i - 1],
            BasisMode::Tensor => {
                let dot: f64 =
                    x.iter().enumerate().map(|(j, &v)| self.nu_entry(i - 1, j) * v).sum();
                dot / self.tensor_scale()
            }
        }
    }

    /// All working coordinates; the tensor mode uses the fast transform.
    pub fn working_coordinates(&self, x: &[f64]) -> Vec<f64> {
        match self.mode {
            BasisMode::Standard => x.to_vec(),
            BasisMode::Tensor => {
                let mut c = x.to_vec();
                fwht(&mut c);
                let scale = self.tensor_scale();
                for v in &mut c {
                    *v /= scale;
                }
                c
            }
        }
    }

    /// The point whose working coordinates are `c` (minimum-norm preimage in
    /// tensor mode, using `H^2 = M I`).
    pub fn point_from_working(&self, c: &[f64]) -> Vec<f64> {
        match self.mode {
            BasisMode::Standard => c.to_vec(),
            BasisMode::Tensor => {
                let mut x: Vec<f64> = c.iter().map(|&v| v * self.tensor_scale()).collect();
                fwht(&mut x);
                for v in &mut x {
                    *v /= self.m as f64;
                }
                x
            }
        }
    }

    /// Ambient subgradient vector for a signed axis: `sign * xi_axis`.
    pub fn ambient_subgradient(&self, axis: usize, sign: f64) -> Vec<f64> {
        match self.mode {
            BasisMode::Standard => {
                let mut g = alloc::vec![0.0; self.m];
                g[axis - 1] = sign;
                g
            }
            BasisMode::Tensor => {
                let scale = self.tensor_scale();
                (0..self.m).map(|j| sign * self.nu_entry(axis - 1, j) / scale).collect()
            }
        }
    }

    pub fn norm_p(&self, x: &[f64]) -> f64 {
        if self.p.is_infinite() {
            return x.iter().fold(0.0, |a, &v| a.max(math::abs(v)));
        }
        let s: f64 = x.iter().map(|&v| math::powf(math::abs(v), self.p)).sum();
        math::powf(s, 1.0 / self.p)
    }

    pub fn check_in_ball(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.m {
            return Err(Error::InvalidParameter("query dimension mismatch"));
        }
        if self.norm_p(x) > 1.0 + BALL_TOL {
            return Err(Error::OutOfDomain);
        }
        Ok(())
    }
}

/// In-place fast Walsh–Hadamard transform (Sylvester order).
fn fwht(data: &mut [f64]) {
    debug_assert!(data.len().is_power_of_two());
    let n = data.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(h * 2) {
            for j in block..block + h {
                let (a, b) = (data[j], data[j + h]);
                data[j] = a + b;
                data[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// One hard instance: a sign per working coordinate.
#[derive(Debug, Clone)]
pub struct LpInstance {
    pub basis: WorkingBasis,
    signs: Vec<i8>,
}

impl LpInstance {
    pub fn new(basis: WorkingBasis, signs: Vec<i8>) -> Result<Self> {
        if signs.len() != basis.m() {
            return Err(Error::InvalidParameter("need one sign per working coordinate"));
        }
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::InvalidParameter("signs must be +1 or -1"));
        }
        Ok(LpInstance { basis, signs })
    }

    pub fn random<R: rand::Rng + ?Sized>(basis: WorkingBasis, rng: &mut R) -> Self {
        let signs = (0..basis.m()).map(|_| if rng.random() { 1 } else { -1 }).collect();
        LpInstance { basis, signs }
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn sign(&self, i: usize) -> f64 {
        self.signs[i - 1] as f64
    }

    /// Bits of the hidden string under the sign mapping `+1 -> 1, -1 -> 0`.
    pub fn as_bits(&self) -> BitString {
        let bits: Vec<bool> = self.signs.iter().map(|&s| s > 0).collect();
        BitString::from_bits(&bits)
    }

    pub fn m(&self) -> usize {
        self.basis.m()
    }
}

/// `f_s(x) = max_i s_i c_i(x)`.
pub fn eval_lp(inst: &LpInstance, x: &[f64]) -> Result<f64> {
    inst.basis.check_in_ball(x)?;
    let c = inst.basis.working_coordinates(x);
    Ok(signed_max(inst, &c).0)
}

fn signed_max(inst: &LpInstance, c: &[f64]) -> (f64, usize) {
    let mut best = f64::NEG_INFINITY;
    let mut arg = 1;
    for i in 1..=inst.m() {
        let v = inst.sign(i) * c[i - 1];
        if v > best {
            best = v;
            arg = i;
        }
    }
    (best, arg)
}

/// The preference order on coordinates at a query: decreasing `|c_i|`,
/// ties toward the smaller index. Returns 1-based coordinate indices.
pub fn preference_order(c: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (1..=c.len()).collect();
    idx.sort_by(|&a, &b| {
        let fa = math::abs(c[a - 1]);
        let fb = math::abs(c[b - 1]);
        fb.partial_cmp(&fa).expect("finite coordinates").then(a.cmp(&b))
    });
    idx
}

/// The string-guessing query for a point: scan coordinates in preference
/// order, guessing the sign opposite to the coordinate (and `+1` at the
/// first zero coordinate, where the scan stops).
pub fn lp_sgp_query(basis: &WorkingBasis, x: &[f64]) -> Result<(SgpQuery, Vec<f64>)> {
    basis.check_in_ball(x)?;
    let c = basis.working_coordinates(x);
    let order = preference_order(&c);
    let mut bits = Vec::new();
    let mut sigma = Vec::new();
    for &i in &order {
        let ci = c[i - 1];
        sigma.push(i);
        if ci == 0.0 {
            bits.push(true); // guess +1 at the first zero coordinate
            break;
        }
        // guess -sign(c_i); bit true encodes +1
        bits.push(ci < 0.0);
    }
    Ok((SgpQuery::new(BitString::from_bits(&bits), sigma), c))
}

/// Translates a string-guessing answer back into the first-order answer
/// `(p * c_J, p * e_J)` in working coordinates.
pub fn lp_emulate(query: &SgpQuery, c: &[f64], answer: &SgpAnswer) -> FirstOrder<f64> {
    let (pos, flip) = match answer {
        SgpAnswer::Equal => (query.guess.len(), false),
        SgpAnswer::Mismatch(k) => (*k, true),
    };
    let axis = query.sigma[pos - 1];
    let guessed = if query.guess.bit(pos).expect("in range") { 1.0 } else { -1.0 };
    let sign = if flip { -guessed } else { guessed };
    FirstOrder { value: sign * c[axis - 1], axis, slope: sign }
}

/// The emulated single-coordinate oracle: query map, string-guessing
/// oracle, answer map.
pub fn emulated_oracle(inst: &LpInstance, x: &[f64]) -> Result<FirstOrder<f64>> {
    let (query, c) = lp_sgp_query(&inst.basis, x)?;
    let answer = crate::sgp::sgp_answer(&inst.as_bits(), &query)?;
    Ok(lp_emulate(&query, &c, &answer))
}

/// Direct single-coordinate oracle: value by direct evaluation; the axis is
/// the coordinate the preference-order scan commits to, which for a
/// positive maximum is the least index attaining it. Independent of the
/// string-guessing path.
pub fn reference_oracle(inst: &LpInstance, x: &[f64]) -> Result<FirstOrder<f64>> {
    inst.basis.check_in_ball(x)?;
    let c = inst.basis.working_coordinates(x);
    let (value, _) = signed_max(inst, &c);
    let order = preference_order(&c);
    let axis = if value > 0.0 {
        // least index among sign-agreeing coordinates of maximal magnitude
        *order
            .iter()
            .find(|&&i| inst.sign(i) * c[i - 1] == value)
            .expect("max attained")
    } else if value == 0.0 {
        // first zero coordinate in preference order
        *order.iter().find(|&&i| c[i - 1] == 0.0).expect("zero coordinate exists")
    } else {
        // all coordinates sign-opposed: the scan ends at the preference-last
        *order.last().expect("non-empty")
    };
    Ok(FirstOrder { value, axis, slope: inst.sign(axis) })
}

/// The Lp-to-string-guessing reduction as a generic [`Emulation`].
///
/// [`Emulation`]: crate::oracle::Emulation
#[derive(Debug, Clone)]
pub struct LpSgpEmulation {
    pub basis: WorkingBasis,
}

impl crate::oracle::Emulation for LpSgpEmulation {
    type OuterQuery = Vec<f64>;
    type OuterAnswer = FirstOrder<f64>;
    type InnerQuery = SgpQuery;
    type InnerAnswer = SgpAnswer;

    fn map_query(&self, x: &Vec<f64>) -> SgpQuery {
        lp_sgp_query(&self.basis, x).expect("valid ball query").0
    }

    fn map_answer(&self, x: &Vec<f64>, a: &SgpAnswer) -> FirstOrder<f64> {
        let (query, c) = lp_sgp_query(&self.basis, x).expect("valid ball query");
        lp_emulate(&query, &c, a)
    }
}

/// The packing witness `x*`: working coordinates `-s_i / M^(1/r)`.
pub fn packing_witness(inst: &LpInstance) -> Vec<f64> {
    let m = inst.m() as f64;
    let scale = math::powf(m, -1.0 / inst.basis.r());
    let c: Vec<f64> = inst.signs().iter().map(|&s| -(s as f64) * scale).collect();
    inst.basis.point_from_working(&c)
}

/// Sublevel certificate threshold `f(x*) = -M^(-1/r)`: any point strictly
/// below `f(x*) + eps` pins down every sign. This is the computable
/// surrogate for eps-minimality used by the identification round-trip.
pub fn witness_value(basis: &WorkingBasis) -> f64 {
    -math::powf(basis.m() as f64, -1.0 / basis.r())
}

/// Recovers the sign vector from a certified point: requires
/// `f(x) < f(x*) + eps` and `M < 1/eps^r`, which force every signed
/// coordinate negative.
pub fn identify_from_eps_min(inst: &LpInstance, x: &[f64], eps: f64) -> Result<Vec<i8>> {
    if (inst.m() as f64) >= math::powf(1.0 / eps, inst.basis.r()) {
        return Err(Error::InvalidParameter("need M < 1/eps^r for identification"));
    }
    let value = eval_lp(inst, x)?;
    if value >= witness_value(&inst.basis) + eps {
        return Err(Error::NotEpsMinimum);
    }
    let c = inst.basis.working_coordinates(x);
    let mut signs = Vec::with_capacity(inst.m());
    for ci in c {
        if ci == 0.0 {
            return Err(Error::NotEpsMinimum);
        }
        signs.push(if ci < 0.0 { 1 } else { -1 });
    }
    Ok(signs)
}

/// Uniform-ish point of the unit ball, for tests.
#[cfg(test)]
pub(crate) fn random_ball_point(
    basis: &WorkingBasis,
    rng: &mut crate::rng::TrialRng,
) -> Vec<f64> {
    use rand::Rng;
    let m = basis.m();
    let raw: Vec<f64> = (0..m).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    let norm = basis.norm_p(&raw).max(1e-9);
    let radius: f64 = rng.random::<f64>();
    raw.iter().map(|v| v / norm * radius).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn choose_m_examples() {
        assert_eq!(choose_m(2.0, 1.0 / 16.0).unwrap(), 255);
        assert_eq!(choose_m(3.0, 0.25).unwrap(), 63);
        assert_eq!(choose_m(1.0, 0.1).unwrap(), 64);
        assert!(choose_m(2.0, 0.95).is_err());
    }

    #[test]
    fn tensor_basis_is_orthogonal_pm_one() {
        let basis = WorkingBasis::new(1.0, 8).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let dot: i64 = (0..8)
                    .map(|k| (basis.nu_entry(i, k) * basis.nu_entry(j, k)) as i64)
                    .sum();
                assert_eq!(dot, if i == j { 8 } else { 0 });
            }
        }
    }

    #[test]
    fn tensor_l1_example() {
        // l = 1: basis (1,1), (1,-1); p = 1 has scale 1
        let basis = WorkingBasis::new(1.0, 2).unwrap();
        let x = [0.25, -0.5];
        assert_eq!(basis.working_coordinate(1, &x), -0.25);
        assert_eq!(basis.working_coordinate(2, &x), 0.75);
        let c = basis.working_coordinates(&x);
        assert_eq!(c, vec![-0.25, 0.75]);
    }

    #[test]
    fn standard_unit_vector() {
        let basis = WorkingBasis::new(3.0, 4).unwrap();
        let e2 = [0.0, 1.0, 0.0, 0.0];
        assert_eq!(basis.working_coordinate(2, &e2), 1.0);
    }

    #[test]
    fn working_roundtrip() {
        let basis = WorkingBasis::new(1.5, 8).unwrap();
        let c = [0.1, -0.2, 0.05, 0.0, 0.3, -0.1, 0.02, -0.25];
        let x = basis.point_from_working(&c);
        let c2 = basis.working_coordinates(&x);
        for (a, b) in c.iter().zip(&c2) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn eval_and_reference_examples() {
        let basis = WorkingBasis::new(2.0, 2).unwrap();
        let inst = LpInstance::new(basis, vec![1, -1]).unwrap();
        let x = [0.3, 0.2];
        assert_eq!(eval_lp(&inst, &x).unwrap(), 0.3);
        let r = reference_oracle(&inst, &x).unwrap();
        assert_eq!((r.value, r.axis, r.slope), (0.3, 1, 1.0));

        // zero point: axis is the preference-first coordinate, sign +1 when
        // the hidden sign there is +1
        let basis = WorkingBasis::new(2.0, 3).unwrap();
        let inst = LpInstance::new(basis, vec![1, -1, 1]).unwrap();
        let r = reference_oracle(&inst, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!((r.value, r.axis), (0.0, 1));
        let e = emulated_oracle(&inst, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!((e.value, e.axis, e.slope), (r.value, r.axis, r.slope));
    }

    #[test]
    fn witness_examples() {
        let basis = WorkingBasis::new(2.0, 4).unwrap();
        let inst = LpInstance::new(basis, vec![1, -1, 1, 1]).unwrap();
        let x = packing_witness(&inst);
        assert_eq!(x, vec![-0.5, 0.5, -0.5, -0.5]);
        let n2: f64 = x.iter().map(|v| v * v).sum::<f64>();
        assert!((n2 - 1.0).abs() < 1e-12);
        assert!((eval_lp(&inst, &x).unwrap() - witness_value(&inst.basis)).abs() < 1e-12);

        // tensor mode M = 2, p = 1
        let basis = WorkingBasis::new(1.0, 2).unwrap();
        for signs in [[1i8, 1], [1, -1], [-1, 1], [-1, -1]] {
            let inst = LpInstance::new(basis.clone(), signs.to_vec()).unwrap();
            let x = packing_witness(&inst);
            assert!(inst.basis.norm_p(&x) <= 1.0 + 1e-12);
            let v = eval_lp(&inst, &x).unwrap();
            assert!((v - witness_value(&inst.basis)).abs() < 1e-12);
        }
    }

    #[test]
    fn identification_roundtrip() {
        let basis = WorkingBasis::new(2.0, 8).unwrap();
        let mut rng = crate::rng::trial_rng(9, 0);
        let eps = 0.3; // M = 8 < 1/eps^2 ≈ 11.1
        for _ in 0..50 {
            let inst = LpInstance::random(basis.clone(), &mut rng);
            let x = packing_witness(&inst);
            let got = identify_from_eps_min(&inst, &x, eps).unwrap();
            assert_eq!(got, inst.signs());
        }
        // a non-minimum errors
        let inst = LpInstance::new(basis, vec![1; 8]).unwrap();
        let origin = [0.0; 8];
        assert!(matches!(
            identify_from_eps_min(&inst, &origin, eps),
            Err(Error::NotEpsMinimum)
        ));
    }

    #[test]
    fn emulation_equals_reference_randomized() {
        let mut rng = crate::rng::trial_rng(31, 0);
        for &p in &[1.0, 1.5, 2.0, 3.0] {
            let m = if p < 2.0 { 8 } else { 7 };
            let basis = WorkingBasis::new(p, m).unwrap();
            for _ in 0..200 {
                let inst = LpInstance::random(basis.clone(), &mut rng);
                let x = super::random_ball_point(&basis, &mut rng);
                let r = reference_oracle(&inst, &x).unwrap();
                let e = emulated_oracle(&inst, &x).unwrap();
                assert_eq!(r.axis, e.axis);
                assert_eq!(r.slope, e.slope);
                assert!((r.value - e.value).abs() < 1e-12);
            }
        }
    }

}
