//! Structural checks for the perturbed recursive family: the on-interval
//! closed form, level sets, strict anchor inequalities, hiding of deeper
//! perturbations outside the shrunk interval, and endpoint smoothness.
//!
//! Difference-quotient probes must stay inside windows whose width scales
//! with the per-level perturbation, so these tests draw perturbations from
//! the upper half of their range and use step sizes tied to them.

use qclab_core::bitstr::BitString;
use qclab_core::perturbed::{
    active_interval, audit_box_trajectory, audit_lp_trajectory, eval_perturbed_1d,
    PerturbedBoxInstance, PerturbedBoxParams, PerturbedLp,
};
use qclab_core::rng::trial_rng;
use rand::Rng;

/// Parameters with a generous `1 - alpha`, so perturbation windows clear
/// float noise by orders of magnitude.
fn params_m3() -> PerturbedBoxParams {
    PerturbedBoxParams::new(1e-5, 5e-4).unwrap()
}

fn params_m4() -> PerturbedBoxParams {
    PerturbedBoxParams::new(3e-6, 5e-4).unwrap()
}

fn sample_upper_half(
    params: &PerturbedBoxParams,
    rng: &mut qclab_core::rng::TrialRng,
) -> (BitString, Vec<f64>) {
    let s = BitString::random(params.depth, rng);
    let delta = (0..params.depth)
        .map(|_| params.delta_bar * (0.5 + 0.5 * rng.random::<f64>()))
        .collect();
    (s, delta)
}

struct FloatIv {
    lo: f64,
    hi: f64,
}

impl FloatIv {
    fn point_at(&self, t: f64) -> f64 {
        self.lo + (1.0 + t) * (self.hi - self.lo) / 2.0
    }

    fn child(&self, bit: bool) -> FloatIv {
        if bit {
            FloatIv { lo: self.point_at(0.0), hi: self.point_at(0.5) }
        } else {
            FloatIv { lo: self.point_at(-0.5), hi: self.point_at(0.0) }
        }
    }
}

fn interval_of(s: &BitString) -> FloatIv {
    let mut iv = FloatIv { lo: -1.0, hi: 1.0 };
    for &b in s.bits() {
        iv = iv.child(b);
    }
    iv
}

#[test]
fn depths_are_as_expected() {
    assert_eq!(params_m3().depth, 3);
    assert_eq!(params_m4().depth, 4);
}

#[test]
fn g4_closed_form_on_own_interval() {
    for params in [params_m3(), params_m4()] {
        let mut rng = trial_rng(100, params.depth as u64);
        for _ in 0..250 {
            let (s, delta) = sample_upper_half(&params, &mut rng);
            let b = params.breakpoints(&delta);
            for l in 0..=params.depth {
                let prefix = s.prefix(l).unwrap();
                let iv = interval_of(&prefix);
                let center = iv.point_at(0.0);
                for _ in 0..5 {
                    let t = rng.random::<f64>() * 2.0 - 1.0;
                    let x = iv.point_at(t);
                    let expect = b[l] - (params.alpha / 8.0).powi(l as i32)
                        + (params.alpha / 2.0).powi(l as i32) * (x - center).abs();
                    let got = eval_perturbed_1d(&prefix, &delta, x, &params).unwrap();
                    assert!(
                        (got - expect).abs() < 1e-12,
                        "G-4 fails at level {l}: got {got} expect {expect}"
                    );
                }
            }
        }
    }
}

#[test]
fn g5_level_sets() {
    for params in [params_m3(), params_m4()] {
        let mut rng = trial_rng(101, params.depth as u64);
        for _ in 0..250 {
            let (s, delta) = sample_upper_half(&params, &mut rng);
            let b = params.breakpoints(&delta);
            for l in 0..=params.depth {
                let t = s.prefix(l).unwrap();
                let iv = interval_of(&t);
                let width = iv.hi - iv.lo;
                // interior, endpoints, exterior probes
                let probes = [
                    (iv.point_at(0.0), true),
                    (iv.point_at(-0.5), true),
                    (iv.point_at(0.7), true),
                    (iv.lo, false),
                    (iv.hi, false),
                    ((iv.lo - width / 8.0).max(-1.0), false),
                    ((iv.hi + width / 8.0).min(1.0), false),
                ];
                for (x, inside) in probes {
                    let inside = inside && iv.lo < x && x < iv.hi;
                    let v = eval_perturbed_1d(&s, &delta, x, &params).unwrap();
                    assert_eq!(
                        v < b[l],
                        inside,
                        "G-5 fails at level {l}, x={x}, v={v}, b={}",
                        b[l]
                    );
                }
            }
        }
    }
}

#[test]
fn strict_anchor_inequalities_500_instances() {
    // at the child's endpoints (parent's -1/2 and midpoint for bit 0,
    // mirrored for bit 1) the extension value is exactly b_{l+1} and
    // strictly above the parent
    let mut count = 0;
    for params in [params_m3(), params_m4()] {
        let mut rng = trial_rng(102, params.depth as u64);
        for _ in 0..250 {
            let (s, delta) = sample_upper_half(&params, &mut rng);
            let b = params.breakpoints(&delta);
            for l in 0..params.depth {
                let parent = s.prefix(l).unwrap();
                let child = s.prefix(l + 1).unwrap();
                let iv = interval_of(&parent);
                let bit = s.bit(l + 1).unwrap();
                let half_t = if bit { 0.5 } else { -0.5 };
                for t in [half_t, 0.0] {
                    let x = iv.point_at(t);
                    let child_v = eval_perturbed_1d(&child, &delta, x, &params).unwrap();
                    let parent_v = eval_perturbed_1d(&parent, &delta, x, &params).unwrap();
                    assert!(
                        (child_v - b[l + 1]).abs() < 1e-12,
                        "anchor value off: {child_v} vs {}",
                        b[l + 1]
                    );
                    assert!(child_v > parent_v, "anchor inequality not strict");
                }
            }
            count += 1;
        }
    }
    assert_eq!(count, 500);
}

#[test]
fn deeper_extensions_hidden_outside_shrunk_interval() {
    // outside the shrunk interval of a prefix, the full instance equals the
    // prefix instance: deeper perturbations are invisible there
    for params in [params_m3(), params_m4()] {
        let mut rng = trial_rng(103, params.depth as u64);
        for _ in 0..200 {
            let (s, delta) = sample_upper_half(&params, &mut rng);
            for l in 0..params.depth {
                let prefix = s.prefix(l).unwrap();
                let next_bit = s.bit(l + 1).unwrap();
                let (lo, hi) = active_interval(&prefix, next_bit, &delta, &params);
                let iv = interval_of(&prefix);
                assert!(iv.lo < lo && hi < iv.hi);
                // probe strictly inside the shells: at the crossing itself
                // the two linear pieces agree in value but round along
                // different paths
                let outside = [
                    iv.lo + (lo - iv.lo) * 0.25,
                    iv.lo + (lo - iv.lo) * 0.9,
                    iv.hi - (iv.hi - hi) * 0.9,
                    iv.hi - (iv.hi - hi) * 0.25,
                    (iv.lo - 0.01).max(-1.0),
                    (iv.hi + 0.01).min(1.0),
                ];
                for x in outside {
                    let full = eval_perturbed_1d(&s, &delta, x, &params).unwrap();
                    let pref = eval_perturbed_1d(&prefix, &delta, x, &params).unwrap();
                    assert_eq!(full, pref, "hiding fails at level {l}, x={x}");
                }
                // strictly inside the shrunk interval the extension shows:
                // it rises strictly above the parent at the child anchor
                let mid = interval_of(&s.prefix(l + 1).unwrap()).point_at(0.0);
                assert!(lo < mid && mid < hi, "child midpoint inside the shrunk interval");
                let full = eval_perturbed_1d(&s.prefix(l + 1).unwrap(), &delta, mid, &params)
                    .unwrap();
                let pref = eval_perturbed_1d(&prefix, &delta, mid, &params).unwrap();
                assert!(full > pref, "extension must rise above the parent at its kink");
            }
        }
    }
}

#[test]
fn endpoint_smoothness_500_instances() {
    // The unperturbed extension would kink exactly at the patch's outer
    // endpoint (the parent's +1 end for bit 0, -1 for bit 1); the strictly
    // positive push-down moves the hand-off inside, so the full instance
    // passes through that endpoint with matching one-sided slopes whenever
    // the parent itself runs through it smoothly (repeated bit). Step sizes
    // must sit inside the perturbation-sized window.
    let mut instances = 0usize;
    let mut checked = 0usize;
    for params in [params_m3(), params_m4()] {
        let mut rng = trial_rng(104, params.depth as u64);
        for _ in 0..250 {
            let (s, delta) = sample_upper_half(&params, &mut rng);
            instances += 1;
            for l in 1..params.depth {
                let bit = s.bit(l + 1).unwrap();
                if s.bit(l).unwrap() != bit {
                    continue;
                }
                let parent = s.prefix(l).unwrap();
                let iv = interval_of(&parent);
                let x = if bit { iv.lo } else { iv.hi };
                // the patch tail crosses the parent at absolute distance
                // (2/alpha)^l delta/(1 - alpha/2); stay a factor 8 inside
                let slope = (params.alpha / 2.0).powi(l as i32);
                let h = delta[l] / slope / 8.0;
                let f = |p: f64| eval_perturbed_1d(&s, &delta, p, &params).unwrap();
                let right = (f(x + h) - f(x)) / h;
                let left = (f(x) - f(x - h)) / h;
                assert!(
                    (right - left).abs() < 1e-8,
                    "kink at patch endpoint: level {l}, left {left}, right {right}"
                );
                checked += 1;
            }
        }
    }
    assert_eq!(instances, 500);
    assert!(checked >= 400, "checked {checked} smooth endpoints");
}

#[test]
fn perturbed_convexity_continuity_lipschitz() {
    for params in [params_m3(), params_m4()] {
        let mut rng = trial_rng(105, params.depth as u64);
        for _ in 0..60 {
            let (s, delta) = sample_upper_half(&params, &mut rng);
            let f = |x: f64| eval_perturbed_1d(&s, &delta, x, &params).unwrap();
            for _ in 0..60 {
                let x = rng.random::<f64>() * 2.0 - 1.0;
                let y = rng.random::<f64>() * 2.0 - 1.0;
                let (fx, fy) = (f(x), f(y));
                assert!(f((x + y) / 2.0) <= (fx + fy) / 2.0 + 1e-12, "convexity");
                assert!((fx - fy).abs() <= (x - y).abs() + 1e-12, "Lipschitz");
            }
            // continuity at patch boundaries of every level
            for l in 0..params.depth {
                let iv = interval_of(&s.prefix(l).unwrap());
                let bit = s.bit(l + 1).unwrap();
                let boundary = if bit { iv.point_at(0.5) } else { iv.point_at(-0.5) };
                let eps = 1e-11;
                assert!(
                    (f(boundary + eps) - f(boundary - eps)).abs() < 1e-10,
                    "discontinuity at level {l}"
                );
            }
        }
    }
}

#[test]
fn lp_audit_random_trajectories_clean() {
    use qclab_core::family_lp::{LpInstance, WorkingBasis};
    let mut rng = trial_rng(106, 0);
    let mut total_steps = 0;
    for trial in 0..300 {
        let p = [1.0, 1.5, 2.0, 3.0][trial % 4];
        let m = if p < 2.0 { 16 } else { 12 };
        let basis = WorkingBasis::new(p, m).unwrap();
        let inst = LpInstance::random(basis.clone(), &mut rng);
        let pinst = PerturbedLp::sample(inst, 0.25, 100.0, &mut rng).unwrap();
        let trajectory: Vec<Vec<f64>> = (0..10)
            .map(|_| {
                let raw: Vec<f64> = (0..m).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
                let norm = basis.norm_p(&raw).max(1e-9);
                let r: f64 = rng.random();
                raw.iter().map(|v| v / norm * r).collect()
            })
            .collect();
        let report = audit_lp_trajectory(&pinst, &trajectory).unwrap();
        assert!(report.passed(), "violation in trial {trial}");
        total_steps += report.steps;
    }
    assert_eq!(total_steps, 3000);
}

#[test]
fn box_audit_random_trajectories_clean() {
    let params = params_m4();
    let mut rng = trial_rng(107, 0);
    for trial in 0..100 {
        let n = 1 + trial % 3;
        let inst = PerturbedBoxInstance::sample(params, n, &mut rng);
        let trajectory: Vec<Vec<f64>> = (0..10)
            .map(|_| (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect())
            .collect();
        let report = audit_box_trajectory(&inst, &trajectory).unwrap();
        assert!(report.passed(), "violation in trial {trial}");
    }
}
