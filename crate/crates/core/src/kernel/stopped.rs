//! Stopped functional `E[u(y + S'(theta_y)); tau'_y > theta_y, theta_y <= H]`
//! where `theta_y` is the first time `n >= 1` the walk enters `K_rho`.

use serde::Serialize;

use super::{Evolver, WindowPolicy};
use crate::error::Result;
use crate::geometry::to_f64;
use crate::model::WalkModel;

#[derive(Debug, Clone, PartialEq)]
pub struct StoppedConfig {
    pub r: f64,
    pub rho: f64,
    pub horizon: usize,
    pub window: WindowPolicy,
    /// Stop early once the live mass drops below this value.
    pub early_stop: f64,
    pub parallel: bool,
}

impl StoppedConfig {
    pub fn new(r: f64, rho: f64, horizon: usize) -> Self {
        Self {
            r,
            rho,
            horizon,
            window: WindowPolicy::unbounded(),
            early_stop: 0.0,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StoppedFunctionalResult {
    pub value: f64,
    /// Mass neither killed nor stopped after the last evolved step.
    pub unstopped_mass: f64,
    pub stopped_mass: f64,
    pub killed_mass: f64,
    pub clipped_mass: f64,
    /// Number of steps actually evolved (at most the configured horizon).
    pub horizon: usize,
}

/// Runs `walk` from `y`, absorbing mass on entry to `K_rho` and weighting it
/// by `u`. Pass the reversed model to obtain the functional for `S'`.
pub fn stopped_functional<F>(walk: &WalkModel, y: &[i64], u: F, cfg: &StoppedConfig) -> Result<StoppedFunctionalResult>
where
    F: Fn(&[i64]) -> f64 + Send + Sync + 'static,
{
    let cone = walk.cone.clone();
    let (r, rho) = (cfg.r, cfg.rho);
    let rule = Box::new(move |p: &[i64]| cone.in_k_rho(&to_f64(p), r, rho).then(|| u(p)));
    let mut ev = Evolver::<f64>::with_stop_rule(walk, y, cfg.window.clone(), rule)?.parallel(cfg.parallel);
    let mut live = 1.0;
    while ev.step_index() < cfg.horizon && live > cfg.early_stop && ev.support().is_some() {
        ev.advance()?;
        live = ev.total_mass();
    }
    Ok(StoppedFunctionalResult {
        value: ev.stopped_value(),
        unstopped_mass: live,
        stopped_mass: ev.stopped_mass(),
        killed_mass: ev.killed_mass(),
        clipped_mass: ev.clipped_mass(),
        horizon: ev.step_index(),
    })
}
