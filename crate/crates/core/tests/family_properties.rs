//! Structural properties of the recursive 1D family, checked in exact
//! arithmetic: interval lengths and nesting, monotone prefixes, the
//! on-interval closed form, level sets, patch-boundary continuity,
//! convexity and the Lipschitz bound.

use qclab_core::bitstr::{BitString, Relation};
use qclab_core::dyadic::Dyadic;
use qclab_core::family_1d::{breakpoint, Family1d, Interval};
use qclab_core::rng::trial_rng;
use rand::Rng;

const DEPTH: usize = 6;

fn family() -> Family1d {
    Family1d::new(DEPTH).unwrap()
}

fn all_strings() -> Vec<BitString> {
    (0..=DEPTH).flat_map(BitString::enumerate).collect()
}

/// Dyadic probes: a fixed fine grid plus random grid points.
fn probes() -> Vec<Dyadic> {
    let mut xs: Vec<Dyadic> = (-64..=64).map(|i| Dyadic::from_parts(i, -6)).collect();
    let mut rng = trial_rng(2024, 0);
    for _ in 0..400 {
        let num = rng.random_range(-(1i64 << 14)..=(1i64 << 14));
        xs.push(Dyadic::from_parts(num, -14));
    }
    xs
}

#[test]
fn f1_interval_lengths() {
    let fam = family();
    for s in all_strings() {
        let iv = fam.interval_of(&s).unwrap();
        assert_eq!(iv.length(), Dyadic::pow2(1 - 2 * s.len() as i64), "s={s}");
    }
}

#[test]
fn f2_nesting_and_disjointness() {
    let fam = family();
    let strings: Vec<BitString> = (0..=4).flat_map(BitString::enumerate).collect();
    for s in &strings {
        for t in &strings {
            let is_ = fam.interval_of(s).unwrap();
            let it = fam.interval_of(t).unwrap();
            match s.relate(t) {
                Relation::Parallel => {
                    // interiors disjoint: allow touching endpoints
                    assert!(
                        is_.hi <= it.lo || it.hi <= is_.lo,
                        "interiors of I_{s} and I_{t} intersect"
                    );
                }
                Relation::PrefixOfSecond | Relation::Equal => {
                    assert!(is_.lo <= it.lo && it.hi <= is_.hi, "I_{t} not inside I_{s}");
                }
                Relation::PrefixOfFirst => {
                    assert!(it.lo <= is_.lo && is_.hi <= it.hi);
                }
            }
        }
    }
}

#[test]
fn f3_prefix_monotone_with_equality_outside() {
    let fam = family();
    let xs = probes();
    for s in all_strings() {
        for l in 0..s.len() {
            let p = s.prefix(l).unwrap();
            let ip = fam.interval_of(&p).unwrap();
            for x in &xs {
                let fs = fam.eval(&s, x).unwrap();
                let fp = fam.eval(&p, x).unwrap();
                assert!(fs >= fp, "f_{s} < f_{p} at {x:?}");
                if !ip.contains_interior(x) {
                    assert_eq!(fs, fp, "f_{s} != f_{p} outside int I_{p} at {x:?}");
                }
            }
            // endpoint probes: equality must hold exactly at the boundary
            for endpoint in [&ip.lo, &ip.hi] {
                assert_eq!(
                    fam.eval(&s, endpoint).unwrap(),
                    fam.eval(&p, endpoint).unwrap()
                );
            }
        }
    }
}

#[test]
fn f4_closed_form_on_own_interval() {
    let fam = family();
    let mut rng = trial_rng(2024, 1);
    for s in all_strings() {
        let iv = fam.interval_of(&s).unwrap();
        let center = iv.midpoint();
        let level = s.len() as i64;
        let base = &breakpoint(s.len()) - &Dyadic::pow2(-3 * level);
        // endpoints, midpoint, and random interior points of I_s
        let mut points = vec![iv.lo.clone(), iv.hi.clone(), center.clone()];
        for _ in 0..8 {
            let t = Dyadic::from_parts(rng.random_range(-256..=256i64), -8);
            points.push(iv.point_at(&t));
        }
        for x in points {
            let expect = &base + &(&x - &center).abs().mul_pow2(-level);
            assert_eq!(fam.eval(&s, &x).unwrap(), expect, "s={s} x={x:?}");
        }
        // b_|s| is the endpoint value
        assert_eq!(fam.eval(&s, &iv.lo).unwrap(), breakpoint(s.len()));
        assert_eq!(fam.eval(&s, &iv.hi).unwrap(), breakpoint(s.len()));
    }
}

#[test]
fn f5_level_sets_encode_prefixes() {
    let fam = family();
    for s in all_strings() {
        for l in 0..=s.len() {
            let t = s.prefix(l).unwrap();
            let it = fam.interval_of(&t).unwrap();
            let bt = breakpoint(l);
            // probe: endpoints, interior points, exterior points
            let mut points = vec![it.lo.clone(), it.hi.clone(), it.midpoint()];
            points.push(it.point_at(&Dyadic::from_parts(-1, -1)));
            points.push(it.point_at(&Dyadic::from_parts(1, -2)));
            if it.lo > Dyadic::from(-1) {
                points.push(&it.lo - &Dyadic::pow2(-10));
            }
            if it.hi < Dyadic::from(1) {
                points.push(&it.hi + &Dyadic::pow2(-10));
            }
            for x in points {
                let inside = it.contains_interior(&x);
                let below = fam.eval(&s, &x).unwrap() < bt;
                assert_eq!(inside, below, "s={s} t={t} x={x:?}");
            }
        }
    }
}

#[test]
fn patch_boundary_continuity() {
    // the two branch formulas of each modification agree where they meet
    let fam = family();
    for s in all_strings() {
        if s.is_empty() {
            continue;
        }
        let parent = s.prefix(s.len() - 1).unwrap();
        let ip = fam.interval_of(&parent).unwrap();
        let bit = s.bit(s.len()).unwrap();
        // patch region boundaries in parent coordinates
        let (lo_t, hi_t) = if bit { (-4, 2) } else { (-2, 4) };
        for t in [lo_t, hi_t] {
            let x = ip.point_at(&Dyadic::from_parts(t, -2));
            if x.abs() > Dyadic::one() {
                continue;
            }
            let f_child = fam.eval(&s, &x).unwrap();
            let f_parent = fam.eval(&parent, &x).unwrap();
            assert_eq!(f_child, f_parent, "discontinuity for {s} at t={t}/4");
        }
    }
}

#[test]
fn convexity_and_lipschitz_exact() {
    let fam = family();
    let xs = probes();
    let mut rng = trial_rng(2024, 2);
    for s in all_strings() {
        for _ in 0..60 {
            let x = &xs[rng.random_range(0..xs.len())];
            let y = &xs[rng.random_range(0..xs.len())];
            let fx = fam.eval(&s, x).unwrap();
            let fy = fam.eval(&s, y).unwrap();
            // midpoint convexity, exact dyadic arithmetic
            let mid = (x + y).half();
            let fmid = fam.eval(&s, &mid).unwrap();
            assert!((&fx + &fy).half() >= fmid, "convexity fails for {s}");
            // 1-Lipschitz, exactly
            assert!((&fx - &fy).abs() <= (x - y).abs(), "Lipschitz fails for {s}");
        }
    }
}

#[test]
fn subgradient_inequality_random_probes() {
    let fam = family();
    let xs = probes();
    let mut rng = trial_rng(2024, 3);
    for s in all_strings() {
        for _ in 0..30 {
            let x = &xs[rng.random_range(0..xs.len())];
            let g = fam.slope(&s, x).unwrap();
            let fx = fam.eval(&s, x).unwrap();
            for _ in 0..4 {
                let y = &xs[rng.random_range(0..xs.len())];
                let fy = fam.eval(&s, y).unwrap();
                assert!(fy >= &fx + &(&g * &(y - x)), "subgradient invalid for {s}");
            }
        }
    }
}

#[test]
fn eps_minima_inside_interior() {
    let fam = family();
    let eps = Dyadic::pow2(-(3 * DEPTH as i64));
    for s in BitString::enumerate(DEPTH) {
        let iv = fam.interval_of(&s).unwrap();
        let em = fam.eps_minima(&s, &eps).unwrap();
        assert!(iv.lo <= em.lo && em.hi <= iv.hi);
        // sublevel test: just inside the open interval the value is below
        // f* + eps; at its endpoints it reaches exactly f* + eps
        let fstar = fam.min_value();
        assert_eq!(fam.eval(&s, &em.lo).unwrap(), &fstar + &eps);
        assert_eq!(fam.eval(&s, &em.hi).unwrap(), &fstar + &eps);
        let inner = Interval::new(em.lo.clone(), em.hi.clone()).midpoint();
        assert!(fam.eval(&s, &inner).unwrap() < &fstar + &eps);
    }
}

#[test]
fn query_string_chain() {
    // the flip-cut values interleave the breakpoints along the query string
    let fam = family();
    let xs = probes();
    for x in xs.iter().take(300) {
        let q = fam.query_string(x).unwrap();
        let l = q.len();
        for h in 1..=l {
            let v = fam.eval(&q.flip_cut(h).unwrap(), x).unwrap();
            assert!(v >= breakpoint(h) || h == l, "chain lower bound fails at {x:?}");
            if h >= 2 {
                assert!(v < breakpoint(h - 1), "chain upper bound fails at {x:?}");
            }
        }
        let fq = fam.eval(&q, x).unwrap();
        assert!(fam.eval(&q.flip_cut(l).unwrap(), x).unwrap() >= fq);
        if l < DEPTH {
            assert!(fq >= breakpoint(l));
        }
    }
}
