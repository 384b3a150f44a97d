//! Emulation soundness: the string-guessing route must reproduce the
//! direct single-coordinate oracle exactly (box, dyadic) or to 1e-12 with
//! exact discrete parts (Lp), with query counts preserved, locality
//! intact, and the revealed prefix correct against exhaustive enumeration.

use qclab_core::bitstr::BitString;
use qclab_core::dyadic::Dyadic;
use qclab_core::family_1d::Family1d;
use qclab_core::family_box::{
    emulated_oracle, eval_box, reference_oracle, BoxInstance, BoxSgpEmulation, QueryPlan,
};
use qclab_core::family_lp::{self, LpInstance, LpSgpEmulation, WorkingBasis};
use qclab_core::oracle::{Emulated, Oracle, Recorder};
use qclab_core::rng::trial_rng;
use qclab_core::sgp::StringOracle;
use rand::Rng;

#[test]
fn one_dim_prefix_value_exhaustive() {
    // every full-depth string's value at x equals the value of its unique
    // prefix among the query string's flip-cuts, exhaustively for M <= 5
    for depth in 1..=5 {
        let fam = Family1d::new(depth).unwrap();
        let xs: Vec<Dyadic> = (-32..=32).map(|i| Dyadic::from_parts(i, -5)).collect();
        for x in xs {
            let q = fam.query_string(&x).unwrap();
            let mut candidates: Vec<BitString> =
                (1..=q.len()).map(|h| q.flip_cut(h).unwrap()).collect();
            candidates.push(q.clone());
            for t in BitString::enumerate(depth) {
                let prefixes: Vec<&BitString> =
                    candidates.iter().filter(|c| c.is_prefix_of(&t)).collect();
                assert_eq!(prefixes.len(), 1, "prefix not unique for t={t} x={x:?}");
                let p = prefixes[0];
                assert_eq!(
                    fam.eval(&t, &x).unwrap(),
                    fam.eval(p, &x).unwrap(),
                    "value mismatch for t={t} at {x:?}"
                );
                assert_eq!(fam.determining_prefix(&q, &t).unwrap(), *p);
            }
        }
    }
}

#[test]
fn box_equivalence_exhaustive_small() {
    // n = 2, M = 2: all 256 instances on a dyadic grid
    let depth = 2;
    let fam = Family1d::new(depth).unwrap();
    let grid: Vec<Dyadic> = (-16..=16).map(|i| Dyadic::from_parts(i, -4)).collect();
    let mut cases = 0u64;
    for v in 0..(1u64 << (2 * depth)) {
        let inst = BoxInstance::from_index(v, 2, depth);
        for a in &grid {
            for b in &grid {
                let x = [a.clone(), b.clone()];
                let r = reference_oracle(&fam, &inst, &x).unwrap();
                let e = emulated_oracle(&fam, &inst, &x).unwrap();
                assert_eq!(r, e, "inst={v} x=({a:?},{b:?})");
                assert_eq!(r.value, eval_box(&fam, &inst, &x).unwrap());
                cases += 1;
            }
        }
    }
    // 2^(n*M) = 16 instances times a 33x33 grid
    assert_eq!(cases, 16 * 33 * 33);
}

#[test]
fn box_query_count_preservation() {
    // running an algorithm through the emulation issues exactly one inner
    // string-guessing query per outer box query
    let depth = 3;
    let fam = Family1d::new(depth).unwrap();
    let mut rng = trial_rng(7, 0);
    for _ in 0..50 {
        let inst = BoxInstance::random(2, depth, &mut rng);
        let inner = StringOracle::new(inst.concatenated());
        let inner_rec = Recorder::new(&inner);
        let emulation = BoxSgpEmulation { family: fam };
        let outer = Emulated::new(&emulation, &inner_rec);
        let outer_rec = Recorder::new(&outer);
        let queries = rng.random_range(1..20usize);
        for _ in 0..queries {
            let x: Vec<Dyadic> =
                (0..2).map(|_| Dyadic::from_parts(rng.random_range(-64..=64i64), -6)).collect();
            let ans = outer_rec.answer(&x);
            assert_eq!(ans, reference_oracle(&fam, &inst, &x).unwrap());
        }
        assert_eq!(outer_rec.count(), queries);
        assert_eq!(inner_rec.count(), queries, "query counts must match");
    }
}

#[test]
fn box_locality_flipping_later_bits() {
    // flipping any bit strictly after the answered label (in confidence
    // order) leaves the answer unchanged; exhaustive for n*M <= 10
    let depth = 2;
    let n = 2;
    let fam = Family1d::new(depth).unwrap();
    let grid: Vec<Dyadic> = (-8..=8).map(|i| Dyadic::from_parts(i, -3)).collect();
    for v in 0..(1u64 << (n * depth)) {
        let inst = BoxInstance::from_index(v, n, depth);
        for a in &grid {
            for b in &grid {
                let x = [a.clone(), b.clone()];
                let plan = QueryPlan::build(&fam, &x).unwrap();
                let query = plan.sgp_query().unwrap();
                let hidden = inst.concatenated();
                let answer = qclab_core::sgp::sgp_answer(&hidden, &query).unwrap();
                let answered_pos = match answer {
                    qclab_core::sgp::SgpAnswer::Equal => query.guess.len(),
                    qclab_core::sgp::SgpAnswer::Mismatch(k) => k,
                };
                let scanned: Vec<usize> = query.sigma[..answered_pos].to_vec();
                let base = reference_oracle(&fam, &inst, &x).unwrap();
                for flat in 1..=(n * depth) {
                    if scanned.contains(&flat) {
                        continue;
                    }
                    let flipped = BoxInstance::from_index(v ^ (1 << (flat - 1)), n, depth);
                    let other = reference_oracle(&fam, &flipped, &x).unwrap();
                    assert_eq!(base, other, "non-local answer: inst={v} flat={flat}");
                }
            }
        }
    }
}

#[test]
fn lp_equivalence_randomized_all_p() {
    let mut rng = trial_rng(8, 0);
    for &p in &[1.0, 1.5, 2.0, 3.0] {
        let m = if p < 2.0 { 16 } else { 11 };
        let basis = WorkingBasis::new(p, m).unwrap();
        for _ in 0..500 {
            let inst = LpInstance::random(basis.clone(), &mut rng);
            let x = random_ball_point(&basis, &mut rng);
            let r = family_lp::reference_oracle(&inst, &x).unwrap();
            let e = family_lp::emulated_oracle(&inst, &x).unwrap();
            assert_eq!(r.axis, e.axis, "p={p}");
            assert_eq!(r.slope, e.slope, "p={p}");
            assert!((r.value - e.value).abs() < 1e-12, "p={p}");
        }
    }
}

#[test]
fn lp_query_count_preservation() {
    let basis = WorkingBasis::new(2.0, 6).unwrap();
    let mut rng = trial_rng(9, 0);
    let inst = LpInstance::random(basis.clone(), &mut rng);
    let inner = StringOracle::new(inst.as_bits());
    let inner_rec = Recorder::new(&inner);
    let emulation = LpSgpEmulation { basis: basis.clone() };
    let outer = Emulated::new(&emulation, &inner_rec);
    let outer_rec = Recorder::new(&outer);
    for _ in 0..25 {
        let x = random_ball_point(&basis, &mut rng);
        outer_rec.answer(&x);
    }
    assert_eq!(outer_rec.count(), 25);
    assert_eq!(inner_rec.count(), 25);
}

#[test]
fn lp_lipschitz_and_convexity() {
    let mut rng = trial_rng(10, 0);
    for &p in &[1.0, 1.5, 2.0, 3.0] {
        let m = if p < 2.0 { 8 } else { 9 };
        let basis = WorkingBasis::new(p, m).unwrap();
        for _ in 0..250 {
            let inst = LpInstance::random(basis.clone(), &mut rng);
            let x = random_ball_point(&basis, &mut rng);
            let y = random_ball_point(&basis, &mut rng);
            let fx = family_lp::eval_lp(&inst, &x).unwrap();
            let fy = family_lp::eval_lp(&inst, &y).unwrap();
            let diff: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            assert!((fx - fy).abs() <= basis.norm_p(&diff) + 1e-9, "p={p}");
            let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| (a + b) / 2.0).collect();
            let fmid = family_lp::eval_lp(&inst, &mid).unwrap();
            assert!(fmid <= (fx + fy) / 2.0 + 1e-12, "p={p}");
        }
    }
}

#[test]
fn lp_subgradient_validity() {
    // f(y) >= f(x) + <g, y - x> with g the ambient subgradient
    let mut rng = trial_rng(11, 0);
    for &p in &[1.0, 2.0, 3.0] {
        let m = if p < 2.0 { 8 } else { 7 };
        let basis = WorkingBasis::new(p, m).unwrap();
        for _ in 0..120 {
            let inst = LpInstance::random(basis.clone(), &mut rng);
            let x = random_ball_point(&basis, &mut rng);
            let a = family_lp::reference_oracle(&inst, &x).unwrap();
            let g = inst.basis.ambient_subgradient(a.axis, a.slope);
            for _ in 0..6 {
                let y = random_ball_point(&basis, &mut rng);
                let fy = family_lp::eval_lp(&inst, &y).unwrap();
                let lin: f64 =
                    a.value + g.iter().zip(y.iter().zip(&x)).map(|(gi, (yi, xi))| gi * (yi - xi)).sum::<f64>();
                assert!(fy >= lin - 1e-9, "p={p}");
            }
        }
    }
}

#[test]
fn scaled_box_is_lipschitz_in_lp() {
    use qclab_core::family_box::ScaledBox;
    let mut rng = trial_rng(12, 0);
    for &(p, n) in &[(2.0, 4), (1.5, 3), (3.0, 2)] {
        let sb = ScaledBox::new(p, n, 1.0 / 512.0).unwrap();
        let inst = BoxInstance::random(n, sb.depth(), &mut rng);
        for _ in 0..200 {
            let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let norm = raw.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p);
            let y: Vec<f64> = raw.iter().map(|v| v / norm * rng.random::<f64>()).collect();
            let z: Vec<f64> = {
                let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
                let norm = raw.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p);
                raw.iter().map(|v| v / norm * rng.random::<f64>()).collect()
            };
            let fy = sb.eval(&inst, &y).unwrap();
            let fz = sb.eval(&inst, &z).unwrap();
            let dist = y
                .iter()
                .zip(&z)
                .map(|(a, b)| (a - b).abs().powf(p))
                .sum::<f64>()
                .powf(1.0 / p);
            assert!((fy - fz).abs() <= dist + 1e-9, "p={p} n={n}");
        }
    }
}

fn random_ball_point(basis: &WorkingBasis, rng: &mut qclab_core::rng::TrialRng) -> Vec<f64> {
    let m = basis.m();
    let raw: Vec<f64> = (0..m).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    let norm = basis.norm_p(&raw).max(1e-9);
    let radius: f64 = rng.random();
    raw.iter().map(|v| v / norm * radius).collect()
}
