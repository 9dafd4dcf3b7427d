//! The positive harmonic function `V(x) = lim E[u(x + S(n)); tau_x > n]`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{Evolver, WindowPolicy};
use crate::model::WalkModel;
use crate::scalar::{CompensatedSum, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergenceFlag {
    Converged,
    Oscillating,
    Diverging,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicEstimate {
    pub point: Vec<i64>,
    /// `(n, E[u(x + S(n)); tau_x > n])` for each scheduled `n`.
    pub sequence: Vec<(usize, f64)>,
    /// Last value of the sequence.
    pub limit: f64,
    pub convergence_flag: ConvergenceFlag,
}

/// Evaluates `E[u(x + S(n)); tau_x > n]` along `schedule` with one forward run.
///
/// The result is flagged converged when the last two values agree to the
/// relative tolerance `tol`, and diverging when the last value exceeds ten
/// times the median of the sequence.
pub fn estimate_v(
    model: &WalkModel,
    x: &[i64],
    u: impl Fn(&[i64]) -> f64,
    schedule: &[usize],
    tol: f64,
    window: WindowPolicy,
) -> Result<HarmonicEstimate> {
    if schedule.is_empty() {
        return Err(Error::InvalidSchedule("empty schedule".into()));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSchedule(format!("not strictly increasing: {schedule:?}")));
    }
    let mut ev = Evolver::<f64>::new(model, x, window)?;
    let mut sequence = Vec::with_capacity(schedule.len());
    for &n in schedule {
        ev.advance_to(n)?;
        sequence.push((n, ev.view().expectation(&u)));
    }
    let limit = sequence.last().unwrap().1;
    Ok(HarmonicEstimate {
        point: x.to_vec(),
        convergence_flag: classify(&sequence, tol),
        sequence,
        limit,
    })
}

/// `estimate_v` for the reversed walk, giving `V'`.
pub fn estimate_v_prime(
    model: &WalkModel,
    y: &[i64],
    u: impl Fn(&[i64]) -> f64,
    schedule: &[usize],
    tol: f64,
    window: WindowPolicy,
) -> Result<HarmonicEstimate> {
    estimate_v(&model.reverse(), y, u, schedule, tol, window)
}

fn classify(sequence: &[(usize, f64)], tol: f64) -> ConvergenceFlag {
    let values: Vec<f64> = sequence.iter().map(|s| s.1).collect();
    let last = *values.last().unwrap();
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    if last > 10.0 * median.abs() && last > 0.0 {
        return ConvergenceFlag::Diverging;
    }
    match values.len() {
        1 => ConvergenceFlag::Converged,
        k => {
            let prev = values[k - 2];
            if (last - prev).abs() <= tol * last.abs().max(prev.abs()).max(f64::MIN_POSITIVE) {
                ConvergenceFlag::Converged
            } else {
                ConvergenceFlag::Oscillating
            }
        }
    }
}

/// `E[f(x + X); x + X in K] - f(x)` for one step `X` of the walk.
pub fn harmonic_residual<S: Scalar>(model: &WalkModel, f: impl Fn(&[i64]) -> S, x: &[i64]) -> S {
    let mut acc = CompensatedSum::new();
    let mut y = x.to_vec();
    for (step, p) in model.steps::<S>() {
        for i in 0..y.len() {
            y[i] = x[i] + step[i];
        }
        if model.cone.contains_lattice(&y) {
            acc.add(p * f(&y));
        }
    }
    acc.value() - f(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConeSpec;
    use crate::model::IncrementDistribution;
    use crate::scalar::{rational, Rational};
    use num_bigint::BigInt;

    fn quadrant() -> WalkModel {
        WalkModel::new(IncrementDistribution::simple_random_walk(2), ConeSpec::orthant(2)).unwrap()
    }

    #[test]
    fn product_is_harmonic_in_quadrant() {
        let f = |p: &[i64]| Rational::from_integer(BigInt::from(p[0] * p[1]));
        assert_eq!(harmonic_residual(&quadrant(), f, &[2, 3]), rational(0, 1));
        assert_eq!(harmonic_residual(&quadrant(), f, &[1, 1]), rational(0, 1));
    }

    #[test]
    fn constant_residual_is_minus_killed_mass() {
        let r = harmonic_residual(&quadrant(), |_| 1.0, &[1, 4]);
        assert_eq!(r, -0.25);
    }

    #[test]
    fn product_sequence_is_constant() {
        let e = estimate_v(&quadrant(), &[1, 1], |p| (p[0] * p[1]) as f64, &[1, 2, 5, 20], 1e-9, WindowPolicy::unbounded()).unwrap();
        assert!(e.sequence.iter().all(|(_, v)| (v - 1.0).abs() < 1e-12));
        assert_eq!(e.convergence_flag, ConvergenceFlag::Converged);
    }

    #[test]
    fn schedule_must_increase() {
        let r = estimate_v(&quadrant(), &[1, 1], |_| 1.0, &[3, 3], 1e-9, WindowPolicy::unbounded());
        assert!(matches!(r, Err(Error::InvalidSchedule(_))));
    }

    #[test]
    fn flags() {
        assert_eq!(classify(&[(1, 1.0), (2, 1.0), (3, 30.0)], 1e-3), ConvergenceFlag::Diverging);
        assert_eq!(classify(&[(1, 1.0), (2, 2.0), (3, 1.0)], 1e-3), ConvergenceFlag::Oscillating);
    }
}
