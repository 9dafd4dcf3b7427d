//! Monte Carlo estimates of survival probabilities and Green functions,
//! independent of the mass-evolution engine.
//!
//! Samples are drawn in fixed-size blocks. Block `b` uses the ChaCha8
//! stream `b` of the seed, so the estimate does not depend on how blocks
//! are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::model::WalkModel;

const BLOCK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub rng_seed: u64,
    /// Path length used for each sample.
    pub horizon: usize,
}

struct StepTable {
    steps: Vec<Vec<i64>>,
    cumulative: Vec<f64>,
}

impl StepTable {
    fn new(model: &WalkModel) -> Self {
        let raw = model.steps::<f64>();
        let mut acc = 0.0;
        let mut cumulative = Vec::with_capacity(raw.len());
        for (_, p) in &raw {
            acc += p;
            cumulative.push(acc);
        }
        Self {
            steps: raw.into_iter().map(|(s, _)| s).collect(),
            cumulative,
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> &[i64] {
        let u: f64 = rng.random::<f64>() * self.cumulative.last().unwrap();
        let i = self.cumulative.partition_point(|c| *c <= u).min(self.steps.len() - 1);
        &self.steps[i]
    }
}

/// Runs `samples` independent paths, reducing per-block `(sum, sum of squares)`
/// in block order.
fn run_blocks(samples: usize, seed: u64, parallel: bool, sample: impl Fn(&mut ChaCha8Rng) -> f64 + Sync) -> (f64, f64) {
    let blocks = samples.div_ceil(BLOCK);
    let block = |b: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let count = BLOCK.min(samples - b * BLOCK);
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..count {
            let v = sample(&mut rng);
            s += v;
            s2 += v * v;
        }
        (s, s2)
    };
    let parts: Vec<(f64, f64)> = if parallel {
        (0..blocks).into_par_iter().map(block).collect()
    } else {
        (0..blocks).map(block).collect()
    };
    let s = parts.iter().map(|p| p.0).collect::<crate::scalar::CompensatedSum<f64>>().value();
    let s2 = parts.iter().map(|p| p.1).collect::<crate::scalar::CompensatedSum<f64>>().value();
    (s, s2)
}

fn estimate(sum: f64, sum_sq: f64, n: usize, seed: u64, horizon: usize) -> McEstimate {
    let nf = n as f64;
    let mean = sum / nf;
    let var = if n > 1 {
        ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    McEstimate {
        mean,
        std_error: (var / nf).sqrt(),
        n_samples: n,
        rng_seed: seed,
        horizon,
    }
}

/// Options shared by the samplers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
    pub parallel: bool,
}

impl McConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples: samples.max(1),
            seed,
            parallel: false,
        }
    }
}

/// Fraction of paths with `x + S(1..n)` all inside the cone.
pub fn mc_survival(model: &WalkModel, x: &[i64], n: usize, cfg: McConfig) -> McEstimate {
    let cone = &model.cone;
    if !cone.contains_lattice(x) {
        return estimate(0.0, 0.0, cfg.samples, cfg.seed, n);
    }
    let table = StepTable::new(model);
    let (s, s2) = run_blocks(cfg.samples, cfg.seed, cfg.parallel, |rng| {
        let mut p = x.to_vec();
        for _ in 0..n {
            for (c, d) in p.iter_mut().zip(table.draw(rng)) {
                *c += d;
            }
            if !cone.contains_lattice(&p) {
                return 0.0;
            }
        }
        1.0
    });
    let mut e = estimate(s, s2, cfg.samples, cfg.seed, n);
    // binomial standard error
    e.std_error = (e.mean * (1.0 - e.mean) / cfg.samples as f64).max(0.0).sqrt();
    e
}

/// Mean number of visits to `y` at times `0..horizon` before exit.
pub fn mc_green(model: &WalkModel, x: &[i64], y: &[i64], horizon: usize, cfg: McConfig) -> McEstimate {
    let cone = &model.cone;
    if !cone.contains_lattice(x) || !cone.contains_lattice(y) {
        return estimate(0.0, 0.0, cfg.samples, cfg.seed, horizon);
    }
    let table = StepTable::new(model);
    let (s, s2) = run_blocks(cfg.samples, cfg.seed, cfg.parallel, |rng| {
        let mut p = x.to_vec();
        let mut visits = 0.0;
        for n in 0..horizon {
            if n > 0 {
                for (c, d) in p.iter_mut().zip(table.draw(rng)) {
                    *c += d;
                }
                if !cone.contains_lattice(&p) {
                    break;
                }
            }
            if p == y {
                visits += 1.0;
            }
        }
        visits
    });
    estimate(s, s2, cfg.samples, cfg.seed, horizon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConeSpec;
    use crate::model::IncrementDistribution;

    fn half_line() -> WalkModel {
        WalkModel::new(IncrementDistribution::simple_random_walk(1), ConeSpec::orthant(1)).unwrap()
    }

    #[test]
    fn zero_steps_survive_surely() {
        let e = mc_survival(&half_line(), &[1], 0, McConfig::new(100, 1));
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn one_step_half_line() {
        let e = mc_survival(&half_line(), &[1], 1, McConfig::new(100_000, 7));
        assert!((e.mean - 0.5).abs() < 4.0 * e.std_error);
    }

    #[test]
    fn outside_target_is_zero() {
        let e = mc_green(&half_line(), &[1], &[-1], 100, McConfig::new(1000, 3));
        assert_eq!(e.mean, 0.0);
    }

    #[test]
    fn isolated_point_visits_once() {
        // a thin cone around the diagonal: every neighbour of (1,1) is outside
        let cone = ConeSpec::polyhedral(vec![vec![1.0, -0.9], vec![-0.9, 1.0]]).unwrap();
        let m = WalkModel::new(IncrementDistribution::simple_random_walk(2), cone).unwrap();
        let e = mc_green(&m, &[1, 1], &[1, 1], 1000, McConfig::new(500, 5));
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn seeds_are_reproducible_and_schedule_independent() {
        let m = half_line();
        let mut cfg = McConfig::new(20_000, 42);
        let a = mc_green(&m, &[1], &[3], 200, cfg);
        cfg.parallel = true;
        let b = mc_green(&m, &[1], &[3], 200, cfg);
        assert_eq!(a, b);
        let c = mc_green(&m, &[1], &[3], 200, McConfig::new(20_000, 43));
        assert_ne!(a.mean, c.mean);
    }
}
