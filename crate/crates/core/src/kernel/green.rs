//! Truncated Green functions with power-law tail extrapolation.

use nalgebra::{DMatrix, DVector};
use num_integer::Integer;
use serde::Serialize;

use super::{Evolver, WindowPolicy};
use crate::error::{Error, Result};
use crate::model::WalkModel;
use crate::scalar::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailMethod {
    PowerLawExtrapolation,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GreenErrorFlag {
    Converged,
    TailDominated,
    HorizonTooSmall,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreenConfig {
    pub horizon: usize,
    pub tail: bool,
    pub window: WindowPolicy,
    /// Required margin `delta` in `exponent <= -(1 + delta)`.
    pub decay_margin: f64,
    /// Tail share of the truncated sum above which the result is flagged.
    pub tail_dominated_fraction: f64,
    /// Minimum number of nonzero terms in the fitted decade.
    pub min_fit_points: usize,
    pub parallel: bool,
}

impl GreenConfig {
    pub fn new(horizon: usize) -> Self {
        Self {
            horizon,
            tail: true,
            window: WindowPolicy::unbounded(),
            decay_margin: 0.05,
            tail_dominated_fraction: 0.05,
            min_fit_points: 8,
            parallel: false,
        }
    }

    pub fn without_tail(mut self) -> Self {
        self.tail = false;
        self
    }

    pub fn with_window(mut self, window: WindowPolicy) -> Self {
        self.window = window;
        self
    }

    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreenResult {
    pub target: Vec<i64>,
    /// `sum_{n < horizon} P(x + S(n) = y, tau_x > n)`
    pub truncated_sum: f64,
    pub horizon: usize,
    pub tail_estimate: f64,
    pub tail_method: TailMethod,
    /// Fitted `alpha` in `P_n ~ C n^alpha`; `None` when no fit was made.
    pub fitted_decay_exponent: Option<f64>,
    /// Spacing of the nonzero terms (2 for bipartite walks).
    pub period: usize,
    pub error_flag: GreenErrorFlag,
    /// Mass discarded by the window policy during the run.
    pub clipped_mass: f64,
}

impl GreenResult {
    pub fn value(&self) -> f64 {
        self.truncated_sum + self.tail_estimate
    }
}

/// `G_K(x, y)` truncated at `cfg.horizon`, optionally with an extrapolated tail.
pub fn green(model: &WalkModel, x: &[i64], y: &[i64], cfg: &GreenConfig) -> Result<GreenResult> {
    Ok(green_many(model, x, &[y.to_vec()], cfg)?.remove(0))
}

/// Green values for several targets from a single forward run.
pub fn green_many(model: &WalkModel, x: &[i64], targets: &[Vec<i64>], cfg: &GreenConfig) -> Result<Vec<GreenResult>> {
    let mut ev = Evolver::<f64>::new(model, x, cfg.window.clone())?.parallel(cfg.parallel);
    let mut series: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.horizon); targets.len()];
    for n in 0..cfg.horizon {
        if n > 0 {
            ev.advance()?;
        }
        for (s, y) in series.iter_mut().zip(targets) {
            s.push(ev.get(y));
        }
        if ev.support().is_none() {
            break;
        }
    }
    let clipped = ev.clipped_mass();
    targets
        .iter()
        .zip(series)
        .map(|(y, mut s)| {
            s.resize(cfg.horizon, 0.0);
            let live = ev.support().is_some();
            let mut r = summarize(y, &s, cfg, live)?;
            r.clipped_mass = clipped;
            Ok(r)
        })
        .collect()
}

/// Green function `G_K(x, .)` truncated at `horizon` over every visited point,
/// in row-major order.
pub fn green_table(model: &WalkModel, x: &[i64], horizon: usize, window: WindowPolicy) -> Result<Vec<(Vec<i64>, f64)>> {
    let mut ev = Evolver::<f64>::new(model, x, window)?;
    let mut acc: std::collections::BTreeMap<Vec<i64>, CompensatedSum<f64>> = Default::default();
    for n in 0..horizon {
        if n > 0 {
            ev.advance()?;
        }
        ev.view().for_each_nonzero(|p, v| acc.entry(p.to_vec()).or_default().add(*v));
        if ev.support().is_none() {
            break;
        }
    }
    Ok(acc.into_iter().map(|(p, s)| (p, s.value())).collect())
}

/// Builds a result from the raw term sequence `P_0, ..., P_{N-1}`.
pub fn summarize(target: &[i64], terms: &[f64], cfg: &GreenConfig, mass_remaining: bool) -> Result<GreenResult> {
    let horizon = terms.len();
    let truncated_sum: f64 = terms.iter().copied().collect::<CompensatedSum<f64>>().value();
    let mut result = GreenResult {
        target: target.to_vec(),
        truncated_sum,
        horizon,
        tail_estimate: 0.0,
        tail_method: TailMethod::None,
        fitted_decay_exponent: None,
        period: 1,
        error_flag: GreenErrorFlag::Converged,
        clipped_mass: 0.0,
    };
    if !cfg.tail || !mass_remaining {
        return Ok(result);
    }
    let start = horizon / 10;
    let points: Vec<(usize, f64)> = (start.max(1)..horizon)
        .filter(|&n| terms[n] > 0.0)
        .map(|n| (n, terms[n]))
        .collect();
    if points.is_empty() {
        result.error_flag = if truncated_sum > 0.0 {
            GreenErrorFlag::Converged
        } else {
            GreenErrorFlag::HorizonTooSmall
        };
        return Ok(result);
    }
    let period = points.windows(2).fold(0usize, |g, w| g.gcd(&(w[1].0 - w[0].0))).max(1);
    result.period = period;
    let rising = points.last().unwrap().1 >= points[0].1;
    if points.len() < cfg.min_fit_points || rising {
        result.error_flag = GreenErrorFlag::HorizonTooSmall;
        return Ok(result);
    }
    let fit = fit_decay(&points, horizon as f64);
    result.fitted_decay_exponent = Some(fit.alpha);
    let bound = -(1.0 + cfg.decay_margin);
    if fit.alpha > bound {
        return Err(Error::NonSummableTailFit {
            exponent: fit.alpha,
            bound,
        });
    }
    let last = points.last().unwrap().0;
    let first = last + (horizon - last).div_ceil(period) * period;
    result.tail_estimate = fit.tail_sum(first, period).max(0.0);
    result.tail_method = TailMethod::PowerLawExtrapolation;
    if result.tail_estimate > cfg.tail_dominated_fraction * truncated_sum {
        result.error_flag = GreenErrorFlag::TailDominated;
    }
    Ok(result)
}

/// `log P_n = a + alpha log n + beta / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl DecayFit {
    pub fn eval(&self, n: f64) -> f64 {
        (self.a + self.alpha * n.ln() + self.beta / n).exp()
    }

    /// `sum_{k >= 0} f(first + k * period)`: explicit terms, then an
    /// integral remainder expanded in powers of `beta / t`.
    pub fn tail_sum(&self, first: usize, period: usize) -> f64 {
        const EXPLICIT: usize = 4096;
        let mut acc = CompensatedSum::<f64>::new();
        let mut n = first;
        for _ in 0..EXPLICIT {
            acc.add(self.eval(n as f64));
            n += period;
        }
        let m = n as f64 - period as f64 / 2.0;
        let mut coef = 1.0;
        let mut rest = 0.0;
        for k in 0..40 {
            if k > 0 {
                coef *= self.beta / k as f64;
            }
            let e = self.alpha + 1.0 - k as f64;
            let term = coef * m.powf(e) / -e;
            rest += term;
            if term.abs() < 1e-17 * rest.abs() {
                break;
            }
        }
        acc.add(self.a.exp() * rest / period as f64);
        acc.value()
    }
}

/// Least-squares fit of `log P_n` against `(1, log n, 1/n)`.
pub fn fit_decay(points: &[(usize, f64)], scale: f64) -> DecayFit {
    let rows = points.len();
    let mut a = DMatrix::<f64>::zeros(rows, 3);
    let mut b = DVector::<f64>::zeros(rows);
    for (i, (n, v)) in points.iter().enumerate() {
        let n = *n as f64;
        a[(i, 0)] = 1.0;
        a[(i, 1)] = (n / scale).ln();
        a[(i, 2)] = scale / n;
        b[i] = v.ln();
    }
    let sol = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .unwrap_or_else(|_| DVector::zeros(3));
    DecayFit {
        a: sol[0] - sol[1] * scale.ln(),
        alpha: sol[1],
        beta: sol[2] * scale,
    }
}
