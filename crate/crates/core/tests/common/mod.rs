//! Independent reference values for the integration tests.
//!
//! Nothing here uses the mass-evolution engine: path enumeration walks
//! every sequence of steps explicitly, and the Green function references
//! come from closed forms or from the potential kernel of the planar
//! simple random walk evaluated by quadrature.
#![allow(dead_code)]

use std::collections::BTreeMap;

use cone_walk::{rational, ConeSpec, IncrementDistribution, Rational, WalkModel};
use num_traits::Zero;

pub fn half_line() -> WalkModel {
    WalkModel::new(IncrementDistribution::simple_random_walk(1), ConeSpec::orthant(1)).unwrap()
}

pub fn quadrant() -> WalkModel {
    WalkModel::new(IncrementDistribution::simple_random_walk(2), ConeSpec::orthant(2)).unwrap()
}

pub fn half_plane() -> WalkModel {
    WalkModel::new(
        IncrementDistribution::simple_random_walk(2),
        ConeSpec::half_space(vec![0.0, 1.0]).unwrap(),
    )
    .unwrap()
}

/// Zero-drift law on Z: -1 with probability 2/3, +2 with probability 1/3.
pub fn asymmetric() -> WalkModel {
    let law = IncrementDistribution::from_pairs(1, &[(&[-1], (2, 3)), (&[2], (1, 3))]).unwrap();
    WalkModel::new(law, ConeSpec::orthant(1)).unwrap()
}

pub fn corpus() -> Vec<(&'static str, WalkModel, Vec<i64>)> {
    vec![
        ("half-line SRW", half_line(), vec![1]),
        ("quadrant SRW", quadrant(), vec![1, 1]),
        ("half-plane SRW", half_plane(), vec![0, 1]),
        ("asymmetric 1-D", asymmetric(), vec![1]),
    ]
}

/// Law of `x + S(n)` on `{tau_x > n}` by enumerating all step sequences.
pub struct Enumeration {
    pub surviving: BTreeMap<Vec<i64>, Rational>,
    pub killed: Rational,
}

pub fn enumerate(model: &WalkModel, x: &[i64], n: usize) -> Enumeration {
    let steps: Vec<(Vec<i64>, Rational)> = model
        .effective_increments()
        .atoms()
        .iter()
        .map(|a| (a.step.clone(), a.prob.clone()))
        .collect();
    let mut out = Enumeration {
        surviving: BTreeMap::new(),
        killed: Rational::zero(),
    };
    fn go(
        model: &WalkModel,
        steps: &[(Vec<i64>, Rational)],
        p: Vec<i64>,
        weight: Rational,
        left: usize,
        out: &mut Enumeration,
    ) {
        if left == 0 {
            *out.surviving.entry(p).or_insert_with(Rational::zero) += weight;
            return;
        }
        for (s, q) in steps {
            let next: Vec<i64> = p.iter().zip(s).map(|(a, b)| a + b).collect();
            let w = &weight * q;
            if model.cone.contains_lattice(&next) {
                go(model, steps, next, w, left - 1, out);
            } else {
                out.killed += w;
            }
        }
    }
    go(model, &steps, x.to_vec(), rational(1, 1), n, &mut out);
    out
}

/// `E[u(y + S(theta)); tau > theta, theta <= h]` where `theta` is the first
/// time `n >= 1` with `y + S(n)` in `stop`, by enumeration.
pub fn enumerate_stopped(
    model: &WalkModel,
    y: &[i64],
    h: usize,
    stop: &dyn Fn(&[i64]) -> bool,
    u: &dyn Fn(&[i64]) -> f64,
) -> (f64, f64) {
    let steps: Vec<(Vec<i64>, f64)> = model
        .effective_increments()
        .atoms()
        .iter()
        .map(|a| (a.step.clone(), cone_walk::Scalar::to_f64(&a.prob)))
        .collect();
    // (value, unstopped mass)
    #[allow(clippy::too_many_arguments)]
    fn go(
        model: &WalkModel,
        steps: &[(Vec<i64>, f64)],
        p: &[i64],
        w: f64,
        left: usize,
        stop: &dyn Fn(&[i64]) -> bool,
        u: &dyn Fn(&[i64]) -> f64,
        acc: &mut (f64, f64),
    ) {
        if left == 0 {
            acc.1 += w;
            return;
        }
        for (s, q) in steps {
            let next: Vec<i64> = p.iter().zip(s).map(|(a, b)| a + b).collect();
            if !model.cone.contains_lattice(&next) {
                continue;
            }
            if stop(&next) {
                acc.0 += w * q * u(&next);
            } else {
                go(model, steps, &next, w * q, left - 1, stop, u, acc);
            }
        }
    }
    let mut acc = (0.0, 0.0);
    go(model, &steps, y, 1.0, h, stop, u, &mut acc);
    acc
}

/// Half-line SRW Green function `G(x, y) = 2 min(x, y)`.
pub fn half_line_green(x: i64, y: i64) -> f64 {
    if x <= 0 || y <= 0 {
        0.0
    } else {
        2.0 * x.min(y) as f64
    }
}

/// Potential kernel of the planar simple random walk,
/// `a(x) = (2/pi) int_0^pi [1 - cos(x1 t) e^{-|x2| b(t)}] / sinh b(t) dt`
/// with `cosh b = 2 - cos t`, written in cancellation-free form.
pub fn potential_kernel(x1: i64, x2: i64) -> f64 {
    if x1 == 0 && x2 == 0 {
        return 0.0;
    }
    let (x1, x2) = (x1 as f64, x2.abs() as f64);
    let f = |t: f64| {
        if t == 0.0 {
            // limit t -> 0: numerator ~ |x2| t, sinh b ~ t
            return x2;
        }
        let s = (0.5 * t).sin();
        let sinh_b = 2.0 * s * (1.0 + s * s).sqrt();
        let b = sinh_b.asinh();
        let h = (0.5 * x1 * t).sin();
        (2.0 * h * h - (x1 * t).cos() * (-x2 * b).exp_m1()) / sinh_b
    };
    // split at the oscillation scale to keep the adaptive rule efficient
    let pieces = ((x1.abs().max(x2) + 1.0) * 4.0).ceil() as usize;
    let h = std::f64::consts::PI / pieces as f64;
    let total: f64 = (0..pieces).map(|i| adaptive_simpson(&f, i as f64 * h, (i + 1) as f64 * h, 1e-14, 30)).sum();
    2.0 / std::f64::consts::PI * total
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Half-plane `{x2 > 0}` Green function by reflection: `a(y - x') - a(y - x)`.
pub fn half_plane_green(x: &[i64], y: &[i64]) -> f64 {
    potential_kernel(y[0] - x[0], y[1] + x[1]) - potential_kernel(y[0] - x[0], y[1] - x[1])
}

/// Quadrant Green function by reflection across both axes.
pub fn quadrant_green(x: &[i64], y: &[i64]) -> f64 {
    let a = |p: i64, q: i64| potential_kernel(y[0] - p, y[1] - q);
    -a(x[0], x[1]) + a(-x[0], x[1]) + a(x[0], -x[1]) - a(-x[0], -x[1])
}

/// Deterministic pseudo-random triples for sweeps that must not depend on
/// the crate's samplers.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next() % (hi - lo + 1) as u64) as i64
    }
}
