mod common;

use cone_walk::harmonic::{estimate_v, estimate_v_prime, harmonic_residual, ConvergenceFlag};
use cone_walk::{Rational, WindowPolicy};
use common::*;
use num_bigint::BigInt;
use num_traits::Zero;

fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

fn identity(p: &[i64]) -> f64 {
    p[0] as f64
}

/// `E[u(x + S(n)); tau > n]` by enumeration.
fn enumerated_mean(model: &cone_walk::WalkModel, x: &[i64], n: usize, u: impl Fn(&[i64]) -> Rational) -> Rational {
    enumerate(model, x, n).surviving.iter().fold(Rational::zero(), |acc, (p, w)| acc + w * u(p))
}

#[test]
fn half_line_sequence_is_constant() {
    let e = estimate_v(&half_line(), &[1], identity, &[1, 2, 3, 4, 5, 6], 1e-9, WindowPolicy::unbounded()).unwrap();
    for (n, v) in &e.sequence {
        let exact = enumerated_mean(&half_line(), &[1], *n, |p| int(p[0]));
        assert_eq!(*v, cone_walk::Scalar::to_f64(&exact));
        assert_eq!(*v, 1.0);
    }
    assert_eq!(e.convergence_flag, ConvergenceFlag::Converged);
}

#[test]
fn quadrant_sequence_is_constant() {
    let u = |p: &[i64]| (p[0] * p[1]) as f64;
    let e = estimate_v(&quadrant(), &[1, 1], u, &[2, 10, 50], 1e-9, WindowPolicy::unbounded()).unwrap();
    for (_, v) in &e.sequence {
        assert!((v - 1.0).abs() < 1e-12);
    }
}

#[test]
fn non_harmonic_u_matches_enumeration() {
    // u(x) = x^2 is not harmonic, so the sequence moves; enumeration fixes it
    let u = |p: &[i64]| (p[0] * p[0]) as f64;
    let e = estimate_v(&half_line(), &[1], u, &[1, 3, 5], 1e-9, WindowPolicy::unbounded()).unwrap();
    for (n, v) in &e.sequence {
        let exact = enumerated_mean(&half_line(), &[1], *n, |p| int(p[0] * p[0]));
        assert!((v - cone_walk::Scalar::to_f64(&exact)).abs() < 1e-12, "n = {n}");
    }
}

#[test]
fn residual_examples() {
    let r = harmonic_residual(&quadrant(), |p| int(p[0] * p[1]), &[2, 3]);
    assert!(r.is_zero());
    let r = harmonic_residual(&half_line(), |p| int(p[0]), &[1]);
    assert!(r.is_zero());
    // constant 1 next to the boundary loses exactly the killed mass
    let r = harmonic_residual(&quadrant(), |_| int(1), &[1, 5]);
    assert_eq!(r, cone_walk::rational(-1, 4));
    let r = harmonic_residual(&quadrant(), |_| int(1), &[1, 1]);
    assert_eq!(r, cone_walk::rational(-1, 2));
}

#[test]
fn v_prime_symmetric_and_asymmetric() {
    let s = [50, 100];
    let v = estimate_v(&half_line(), &[4], identity, &s, 1e-9, WindowPolicy::unbounded()).unwrap();
    let vp = estimate_v_prime(&half_line(), &[4], identity, &s, 1e-9, WindowPolicy::unbounded()).unwrap();
    assert_eq!(v.sequence, vp.sequence);

    let m = asymmetric();
    let v = estimate_v(&m, &[1], identity, &[1, 2, 3, 4], 1e-3, WindowPolicy::unbounded()).unwrap();
    let vp = estimate_v_prime(&m, &[1], identity, &[1, 2, 3, 4], 1e-3, WindowPolicy::unbounded()).unwrap();
    assert_ne!(v.sequence, vp.sequence);
    for (n, val) in &vp.sequence {
        let exact = enumerated_mean(&m.reverse(), &[1], *n, |p| int(p[0]));
        assert!((val - cone_walk::Scalar::to_f64(&exact)).abs() < 1e-12, "n = {n}");
    }
}

#[test]
fn doob_invariance_and_positivity() {
    // V from the catalogued reduite, estimated at a point and its neighbours
    let model = quadrant();
    let schedule = [200, 400];
    let tol = 1e-3;
    let v = |x: &[i64]| {
        if x.iter().any(|&c| c <= 0) {
            return 0.0;
        }
        let e = estimate_v(&model, x, |p| (p[0] * p[1]) as f64, &schedule, tol, WindowPolicy::unbounded()).unwrap();
        assert_eq!(e.convergence_flag, ConvergenceFlag::Converged);
        e.limit
    };
    for x in [[1, 1], [3, 2], [6, 9]] {
        let vx = v(&x);
        assert!(vx > 0.0);
        let mean: f64 = [[1, 0], [-1, 0], [0, 1], [0, -1]]
            .iter()
            .map(|s| 0.25 * v(&[x[0] + s[0], x[1] + s[1]]))
            .sum();
        assert!((mean - vx).abs() <= 10.0 * tol * vx, "{x:?}");
    }
}

#[test]
fn uniqueness_ratios_with_other_test_function() {
    // a different positive u that agrees with x1 x2 at infinity to leading
    // order still yields the same harmonic function up to scale
    let model = quadrant();
    let u = |p: &[i64]| (p[0] * p[1]) as f64 * (1.0 + 1.0 / (1.0 + (p[0] + p[1]) as f64));
    let v = |x: &[i64]| estimate_v(&model, x, u, &[300, 600], 1e-2, WindowPolicy::unbounded()).unwrap().limit;
    let v0 = v(&[1, 1]);
    for x in [[2, 3], [4, 1], [5, 5]] {
        let ratio = v(&x) / v0;
        let expected = (x[0] * x[1]) as f64;
        assert!((ratio / expected - 1.0).abs() < 0.02, "{x:?}: {ratio}");
    }
}
