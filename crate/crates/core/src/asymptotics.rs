//! Ratio series for the large-`|y|` behaviour of the Green function, and
//! the fits used to judge them.
//!
//! Paths and directions are given in the lattice frame; norms, distances
//! and the reduite are evaluated in the metric frame of the cone.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{to_f64, ConeSpec, ReduiteEntry};
use crate::harmonic::{estimate_v, ConvergenceFlag, HarmonicEstimate};
use crate::kernel::{
    green_many, stopped_functional, GreenConfig, GreenErrorFlag, GreenResult, StoppedConfig, WindowPolicy,
};
use crate::model::WalkModel;

/// How `V` (or `V'`) is evaluated by the harnesses.
#[derive(Debug, Clone, PartialEq)]
pub struct VSettings {
    pub schedule: Vec<usize>,
    pub tol: f64,
    pub window: WindowPolicy,
}

impl Default for VSettings {
    fn default() -> Self {
        Self {
            schedule: vec![50, 100, 200],
            tol: 1e-3,
            window: WindowPolicy::unbounded(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarnessConfig {
    pub green: GreenConfig,
    pub v: VSettings,
    /// Number of trailing points used for the plateau.
    pub k_last: usize,
    /// Multiplier applied to the reduite wherever it enters a ratio.
    pub u_scale: f64,
    /// Stopped-functional settings (`R`, `rho`, horizon).
    pub stopped: StoppedConfig,
    /// Largest admissible unstopped mass per boundary point.
    pub unstopped_limit: f64,
}

impl HarnessConfig {
    pub fn new(green: GreenConfig) -> Self {
        let mut stopped = StoppedConfig::new(1.0, 0.25, 20_000);
        stopped.early_stop = 1e-4;
        Self {
            green,
            v: VSettings::default(),
            k_last: 4,
            u_scale: 1.0,
            stopped,
            unstopped_limit: 0.05,
        }
    }
}

/// One point of a ratio series with the quantities that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioPoint {
    pub y: Vec<i64>,
    pub scale: f64,
    pub ratio: f64,
    pub green: f64,
    pub green_tail: f64,
    pub green_flag: GreenErrorFlag,
    pub u: Option<f64>,
    pub v_prime: Option<f64>,
    pub stopped_value: Option<f64>,
    pub unstopped_mass: Option<f64>,
    /// Lattice offset added after rounding, when one was needed.
    pub offset: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioSeries {
    pub scales: Vec<f64>,
    pub ratios: Vec<f64>,
    pub fitted_limit: f64,
    pub fitted_rate: f64,
    pub plateau_spread: f64,
    /// `V(x)` used in the normalization (or `V(x)/V(x0)` for Martin series).
    pub v_x: f64,
    /// Independent value the limit should match, when one exists.
    pub reference: Option<f64>,
    pub points: Vec<RatioPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlateauFit {
    pub limit: f64,
    pub rate: f64,
    pub spread: f64,
}

/// Differences smaller than this (relative to the series mean) are
/// treated as zero by the rate estimate.
const RATE_CLAMP: f64 = 1e-10;

/// Plateau of a series: `limit` is the mean of the last `k_last` values,
/// `spread` their `(max - min) / mean`.
///
/// `rate` is the exponent `r` in `value ~ limit + b scale^r`, read off the
/// log-log slope of successive differences (`d value / d scale ~ scale^(r-1)`,
/// placed at the geometric mean of each pair of scales).
/// A series whose differences all vanish has rate 0.
pub fn fit_plateau(scales: &[f64], values: &[f64], k_last: usize) -> Result<PlateauFit> {
    let needed = k_last + 2;
    if values.len() < needed || scales.len() != values.len() || k_last == 0 {
        return Err(Error::TooFewPoints {
            needed,
            got: values.len().min(scales.len()),
        });
    }
    let tail = &values[values.len() - k_last..];
    let limit = tail.iter().sum::<f64>() / k_last as f64;
    let max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = if limit != 0.0 { (max - min) / limit.abs() } else { f64::INFINITY };
    let floor = RATE_CLAMP * limit.abs().max(f64::MIN_POSITIVE);
    let pts: Vec<(f64, f64)> = scales
        .windows(2)
        .zip(values.windows(2))
        .filter_map(|(s, v)| {
            let dv = (v[1] - v[0]).abs();
            (dv > floor).then(|| ((s[0] * s[1]).sqrt().ln(), (dv / (s[1] - s[0])).ln()))
        })
        .collect();
    let rate = if pts.len() >= 2 { linear_fit(&pts).slope + 1.0 } else { 0.0 };
    Ok(PlateauFit { limit, rate, spread })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y = intercept + slope x`.
pub fn linear_fit(points: &[(f64, f64)]) -> LinearFit {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let r_squared = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    }
}

fn reduite_of(model: &WalkModel) -> Result<ReduiteEntry> {
    model.cone.reduite()
}

fn v_at(model: &WalkModel, x: &[i64], u: &ReduiteEntry, cfg: &HarnessConfig) -> Result<HarmonicEstimate> {
    let scale = cfg.u_scale;
    let est = estimate_v(model, x, |p| scale * u.eval_lattice(p), &cfg.v.schedule, cfg.v.tol, cfg.v.window.clone())?;
    if est.limit <= 0.0 || est.convergence_flag == ConvergenceFlag::Diverging {
        return Err(Error::InvalidSchedule(format!(
            "V({x:?}) estimate {} flagged {:?}",
            est.limit, est.convergence_flag
        )));
    }
    Ok(est)
}

/// Rounds `s * direction` to the lattice and, when that lands outside the
/// cone, adds the smallest offset moving it inside.
pub fn lattice_point_on_ray(cone: &ConeSpec, direction: &[f64], s: f64) -> Result<(Vec<i64>, Option<Vec<i64>>)> {
    let base: Vec<i64> = direction.iter().map(|c| (s * c).round() as i64).collect();
    if cone.contains_lattice(&base) {
        return Ok((base, None));
    }
    let off = cone.lattice_offset_into(&base).ok_or_else(|| Error::PathLeavesRegime {
        point: base.clone(),
        reason: "no small lattice offset moves the rounded point into the cone".into(),
    })?;
    let y = base.iter().zip(&off).map(|(a, b)| a + b).collect();
    Ok((y, Some(off)))
}

fn series(points: Vec<RatioPoint>, k_last: usize, v_x: f64, reference: Option<f64>) -> Result<RatioSeries> {
    let scales: Vec<f64> = points.iter().map(|p| p.scale).collect();
    if scales.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSchedule(format!("path scales must increase: {scales:?}")));
    }
    let ratios: Vec<f64> = points.iter().map(|p| p.ratio).collect();
    let fit = fit_plateau(&scales, &ratios, k_last)?;
    Ok(RatioSeries {
        scales,
        ratios,
        fitted_limit: fit.limit,
        fitted_rate: fit.rate,
        plateau_spread: fit.spread,
        v_x,
        reference,
        points,
    })
}

fn point(y: Vec<i64>, scale: f64, ratio: f64, g: &GreenResult) -> RatioPoint {
    RatioPoint {
        y,
        scale,
        ratio,
        green: g.value(),
        green_tail: g.tail_estimate,
        green_flag: g.error_flag,
        u: None,
        v_prime: None,
        stopped_value: None,
        unstopped_mass: None,
        offset: None,
    }
}

/// Interior regime: `G(x, y) |y|^(2p + d - 2) / (V(x) u(y))` along
/// `y_k = round(s_k * direction)`, each point at distance at least
/// `alpha |y|` from the boundary.
pub fn verify_interior(
    model: &WalkModel,
    x: &[i64],
    direction: &[f64],
    scales: &[f64],
    alpha: f64,
    cfg: &HarnessConfig,
) -> Result<RatioSeries> {
    let cone = &model.cone;
    let u = reduite_of(model)?;
    let mut ys = Vec::with_capacity(scales.len());
    for &s in scales {
        let (y, off) = lattice_point_on_ray(cone, direction, s)?;
        let dist = cone.dist_boundary(&to_f64(&y))?;
        let norm = cone.metric_norm_lattice(&y);
        if dist < alpha * norm {
            return Err(Error::PathLeavesRegime {
                point: y,
                reason: format!("distance {dist:.4} to the boundary is below {alpha} * |y| = {:.4}", alpha * norm),
            });
        }
        ys.push((y, off));
    }
    let v = v_at(model, x, &u, cfg)?.limit;
    let targets: Vec<Vec<i64>> = ys.iter().map(|(y, _)| y.clone()).collect();
    let greens = green_many(model, x, &targets, &cfg.green)?;
    let power = 2.0 * u.exponent + model.dimension() as f64 - 2.0;
    let points = ys
        .into_iter()
        .zip(&greens)
        .map(|((y, off), g)| {
            let norm = cone.metric_norm_lattice(&y);
            let uy = cfg.u_scale * u.eval_lattice(&y);
            let mut p = point(y, norm, g.value() * norm.powf(power) / (v * uy), g);
            p.u = Some(uy);
            p.offset = off;
            p
        })
        .collect();
    series(points, cfg.k_last, v, None)
}

/// Points `(k, 0, ..., 0, ceil(k^gamma))` approaching the boundary of the
/// upper half-space tangentially.
pub fn boundary_hugging_path(dimension: usize, ks: &[i64], gamma: f64) -> Vec<Vec<i64>> {
    ks.iter()
        .map(|&k| {
            let mut y = vec![0; dimension];
            if dimension > 1 {
                y[0] = k;
            }
            y[dimension - 1] = ((k.abs() as f64).powf(gamma).ceil() as i64).max(1);
            y
        })
        .collect()
}

/// Half-space regime: `G(x, y) |y|^d / (V(x) V'(y))` along `path`.
pub fn verify_halfspace(model: &WalkModel, x: &[i64], path: &[Vec<i64>], cfg: &HarnessConfig) -> Result<RatioSeries> {
    let cone = &model.cone;
    if cone.normals().len() != 1 {
        return Err(Error::WrongConeVariant);
    }
    let u = reduite_of(model)?;
    let v = v_at(model, x, &u, cfg)?.limit;
    let reversed = model.reverse();
    let greens = green_many(model, x, path, &cfg.green)?;
    let d = model.dimension() as f64;
    let mut points = Vec::with_capacity(path.len());
    for (y, g) in path.iter().zip(&greens) {
        let vp = v_at(&reversed, y, &u, cfg)?.limit;
        let norm = cone.metric_norm_lattice(y);
        let mut p = point(y.clone(), norm, g.value() * norm.powf(d) / (v * vp), g);
        p.v_prime = Some(vp);
        points.push(p);
    }
    series(points, cfg.k_last, v, None)
}

/// Boundary regime: `G(x, y) |y|^(p + q + d - 2) / (V(x) E[u_sigma(y_rho); tau'_y > theta_y])`
/// along `y_k = round(s_k * sigma)` shifted into the cone.
///
/// `u_sigma` is the reduite of the tangent cone at `sigma` and `q` its
/// exponent. Near `sigma` the reduite of the whole cone behaves like
/// `|y|^(p - q) u_sigma(y)`, which is what makes this normalization match
/// the interior one.
pub fn verify_boundary(
    model: &WalkModel,
    x: &[i64],
    sigma: &[f64],
    scales: &[f64],
    cfg: &HarnessConfig,
) -> Result<RatioSeries> {
    let cone = &model.cone;
    let u = reduite_of(model)?;
    let metric_sigma = cone.to_metric(sigma);
    let tangent = cone.tangent_cone(&metric_sigma)?;
    let q = tangent.exponent;
    let u_sigma = tangent.cone.reduite()?;
    let mut ys = Vec::with_capacity(scales.len());
    for &s in scales {
        ys.push(lattice_point_on_ray(cone, sigma, s)?);
    }
    let v = v_at(model, x, &u, cfg)?.limit;
    let targets: Vec<Vec<i64>> = ys.iter().map(|(y, _)| y.clone()).collect();
    let greens = green_many(model, x, &targets, &cfg.green)?;
    let power = u.exponent + q + model.dimension() as f64 - 2.0;
    let reversed = model.reverse();
    let mut points = Vec::with_capacity(ys.len());
    for ((y, off), g) in ys.into_iter().zip(&greens) {
        let (us, frame) = (u_sigma.clone(), cone.clone());
        let scale = cfg.u_scale;
        let weight = move |p: &[i64]| scale * us.eval_metric(&frame.to_metric(&to_f64(p)));
        let st = stopped_functional(&reversed, &y, weight, &cfg.stopped)?;
        if st.unstopped_mass > cfg.unstopped_limit {
            return Err(Error::UnstoppedMassTooLarge {
                point: y,
                mass: st.unstopped_mass,
                limit: cfg.unstopped_limit,
            });
        }
        let norm = cone.metric_norm_lattice(&y);
        let mut p = point(y, norm, g.value() * norm.powf(power) / (v * st.value), g);
        p.stopped_value = Some(st.value);
        p.unstopped_mass = Some(st.unstopped_mass);
        p.offset = off;
        points.push(p);
    }
    series(points, cfg.k_last, v, None)
}

/// Martin kernel ratios `G(x, y_n) / G(x0, y_n)`; the reference is
/// `V(x) / V(x0)`.
pub fn martin_kernel(
    model: &WalkModel,
    x: &[i64],
    x0: &[i64],
    path: &[Vec<i64>],
    cfg: &HarnessConfig,
) -> Result<RatioSeries> {
    let cone = &model.cone;
    let gx = green_many(model, x, path, &cfg.green)?;
    let g0 = if x == x0 { gx.clone() } else { green_many(model, x0, path, &cfg.green)? };
    let mut points = Vec::with_capacity(path.len());
    for ((y, a), b) in path.iter().zip(&gx).zip(&g0) {
        if b.value() == 0.0 {
            return Err(Error::ZeroDenominator(y.clone()));
        }
        let ratio = if x == x0 { 1.0 } else { a.value() / b.value() };
        points.push(point(y.clone(), cone.metric_norm_lattice(y), ratio, a));
    }
    let reference = match reduite_of(model) {
        Ok(u) => {
            let vx = v_at(model, x, &u, cfg)?.limit;
            let v0 = v_at(model, x0, &u, cfg)?.limit;
            Some(vx / v0)
        }
        Err(Error::NotCatalogued(_)) => None,
        Err(e) => return Err(e),
    };
    series(points, cfg.k_last, reference.unwrap_or(f64::NAN), reference)
}

/// Profile `t -> G(x, base + t * inward) |y|^(p + d - 1) / V(x)` near a
/// half-space boundary, with a linear fit over the given distances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryProfile {
    pub distances: Vec<i64>,
    pub values: Vec<f64>,
    pub fit: LinearFit,
}

pub fn boundary_profile(
    model: &WalkModel,
    x: &[i64],
    base: &[i64],
    inward: &[i64],
    distances: &[i64],
    cfg: &HarnessConfig,
) -> Result<BoundaryProfile> {
    let cone = &model.cone;
    if cone.normals().len() != 1 {
        return Err(Error::WrongConeVariant);
    }
    let u = reduite_of(model)?;
    let v = v_at(model, x, &u, cfg)?.limit;
    let targets: Vec<Vec<i64>> = distances
        .iter()
        .map(|t| base.iter().zip(inward).map(|(b, i)| b + t * i).collect())
        .collect();
    let greens = green_many(model, x, &targets, &cfg.green)?;
    let power = u.exponent + model.dimension() as f64 - 1.0;
    let values: Vec<f64> = targets
        .iter()
        .zip(&greens)
        .map(|(y, g)| g.value() * cone.metric_norm_lattice(y).powf(power) / v)
        .collect();
    let pts: Vec<(f64, f64)> = distances.iter().zip(&values).map(|(t, v)| (*t as f64, *v)).collect();
    Ok(BoundaryProfile {
        distances: distances.to_vec(),
        values,
        fit: linear_fit(&pts),
    })
}

/// Log-log slope of a survival curve `P(tau > n)`, `n = 0..`, over `[n_lo, n_hi]`.
pub fn survival_exponent(curve: &[f64], n_lo: usize, n_hi: usize) -> LinearFit {
    let hi = n_hi.min(curve.len().saturating_sub(1));
    let pts: Vec<(f64, f64)> = (n_lo.max(1)..=hi)
        .filter(|&n| curve[n] > 0.0)
        .map(|n| ((n as f64).ln(), curve[n].ln()))
        .collect();
    linear_fit(&pts)
}

/// `n^(q/2) P(tau > n)` over `[n_lo, n_hi]` as `(n, value)` pairs.
pub fn scaled_survival(curve: &[f64], q: f64, n_lo: usize, n_hi: usize) -> Vec<(usize, f64)> {
    let hi = n_hi.min(curve.len().saturating_sub(1));
    (n_lo.max(1)..=hi).map(|n| (n, (n as f64).powf(q / 2.0) * curve[n])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_of_inverse_law() {
        let s: Vec<f64> = (1..=20).map(|k| 10.0 * k as f64).collect();
        let v: Vec<f64> = s.iter().map(|x| 3.0 + 5.0 / x).collect();
        let f = fit_plateau(&s, &v, 4).unwrap();
        assert!((f.limit - 3.0).abs() < 0.05);
        assert!((f.rate + 1.0).abs() < 1e-3, "{f:?}");
    }

    #[test]
    fn plateau_of_constant() {
        let s = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let f = fit_plateau(&s, &[2.0; 6], 4).unwrap();
        assert_eq!(f.spread, 0.0);
        assert_eq!(f.rate, 0.0);
        assert_eq!(f.limit, 2.0);
    }

    #[test]
    fn growing_series_has_positive_rate() {
        let s: Vec<f64> = (1..=10).map(|k| k as f64 * 10.0).collect();
        let v: Vec<f64> = s.iter().map(|x| 2.0 * x.powf(0.1)).collect();
        let f = fit_plateau(&s, &v, 4).unwrap();
        assert!((f.rate - 0.1).abs() < 1e-2, "{f:?}");
        let short = fit_plateau(&s[..5], &v[..5], 4);
        assert!(matches!(short, Err(Error::TooFewPoints { needed: 6, got: 5 })));
    }

    #[test]
    fn hugging_path() {
        assert_eq!(boundary_hugging_path(2, &[16, 17], 0.5), vec![vec![16, 4], vec![17, 5]]);
    }

    #[test]
    fn line_fit() {
        let f = linear_fit(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]);
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }
}
