//! Time-slice evolution of the killed walk.
//!
//! Slice `n` of a run started at `x` holds `P(x + S(n) = y, tau_x > n)` for
//! every `y`. One step convolves the live mass with the increment law and
//! moves whatever lands outside the (open) cone into `killed_mass`.
//!
//! Storage is a dense box around the support, regrown on demand. The
//! optional window cap and pruning threshold bound memory; any mass they
//! discard is accounted as `clipped_mass` and the run errors once it
//! exceeds the policy's tolerance.

mod green;
mod stopped;

pub use green::{fit_decay, green, green_many, green_table, summarize, DecayFit, GreenConfig, GreenErrorFlag, GreenResult, TailMethod};
pub use stopped::{stopped_functional, StoppedConfig, StoppedFunctionalResult};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::ConeSpec;
use crate::model::WalkModel;
use crate::scalar::{CompensatedSum, Scalar};

const LIVE: u8 = 0;
const KILLED: u8 = 1;
const CLIPPED: u8 = 2;
const STOPPED: u8 = 3;

/// Memory policy for the evolving support.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowPolicy {
    /// Inclusive per-coordinate bounds; mass stepping outside is clipped.
    pub bounds: Option<(Vec<i64>, Vec<i64>)>,
    /// Entries below this value are dropped (counted as clipped).
    pub prune_below: f64,
    /// Maximum total clipped mass before the run is refused.
    pub tolerance: f64,
}

impl Default for WindowPolicy {
    fn default() -> Self {
        Self::unbounded()
    }
}

impl WindowPolicy {
    /// No clipping at all: the support grows by the step radius every step.
    pub fn unbounded() -> Self {
        Self {
            bounds: None,
            prune_below: 0.0,
            tolerance: f64::INFINITY,
        }
    }

    pub fn capped(lower: Vec<i64>, upper: Vec<i64>, tolerance: f64) -> Self {
        Self {
            bounds: Some((lower, upper)),
            prune_below: 0.0,
            tolerance,
        }
    }

    /// Cube of half-width `radius` around `center`.
    pub fn cube(center: &[i64], radius: i64, tolerance: f64) -> Self {
        Self::capped(
            center.iter().map(|c| c - radius).collect(),
            center.iter().map(|c| c + radius).collect(),
            tolerance,
        )
    }

    pub fn with_pruning(mut self, threshold: f64, tolerance: f64) -> Self {
        self.prune_below = threshold;
        self.tolerance = tolerance;
        self
    }

    fn contains(&self, p: &[i64]) -> bool {
        match &self.bounds {
            None => true,
            Some((lo, hi)) => p.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| l <= v && v <= h),
        }
    }
}

/// Inclusive integer box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl Region {
    fn expand(&self, lo: &[i64], hi: &[i64]) -> Region {
        Region {
            lo: self.lo.iter().zip(lo).map(|(a, b)| a + b).collect(),
            hi: self.hi.iter().zip(hi).map(|(a, b)| a + b).collect(),
        }
    }

    fn intersect(&self, bounds: &Option<(Vec<i64>, Vec<i64>)>) -> Option<Region> {
        let Some((lo, hi)) = bounds else {
            return Some(self.clone());
        };
        let r = Region {
            lo: self.lo.iter().zip(lo).map(|(a, b)| *a.max(b)).collect(),
            hi: self.hi.iter().zip(hi).map(|(a, b)| *a.min(b)).collect(),
        };
        r.lo.iter().zip(&r.hi).all(|(l, h)| l <= h).then_some(r)
    }

    fn contains_region(&self, other: &Region) -> bool {
        (0..self.lo.len()).all(|i| self.lo[i] <= other.lo[i] && other.hi[i] <= self.hi[i])
    }

    pub fn cells(&self) -> usize {
        self.lo.iter().zip(&self.hi).map(|(l, h)| (h - l + 1) as usize).product()
    }
}

/// Row-major dense layout over a region.
#[derive(Debug, Clone, PartialEq)]
struct Layout {
    region: Region,
    shape: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl Layout {
    fn new(region: Region) -> Self {
        let shape: Vec<usize> = region.lo.iter().zip(&region.hi).map(|(l, h)| (h - l + 1) as usize).collect();
        let mut strides = vec![1; shape.len()];
        for i in (0..shape.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * shape[i + 1];
        }
        let len = shape.iter().product();
        Self {
            region,
            shape,
            strides,
            len,
        }
    }

    fn index(&self, p: &[i64]) -> Option<usize> {
        let mut idx = 0;
        for i in 0..p.len() {
            let off = p[i] - self.region.lo[i];
            if off < 0 || off as usize >= self.shape[i] {
                return None;
            }
            idx += off as usize * self.strides[i];
        }
        Some(idx)
    }

    fn point(&self, mut idx: usize, out: &mut [i64]) {
        for i in 0..self.shape.len() {
            out[i] = self.region.lo[i] + (idx / self.strides[i]) as i64;
            idx %= self.strides[i];
        }
    }

    fn offset(&self, step: &[i64]) -> isize {
        step.iter().zip(&self.strides).map(|(s, st)| *s as isize * *st as isize).sum()
    }
}

/// Read-only view of one time slice.
#[derive(Debug, Clone, Copy)]
pub struct SliceView<'a, S> {
    layout: &'a Layout,
    values: &'a [S],
    support: Option<&'a Region>,
}

impl<'a, S: Scalar> SliceView<'a, S> {
    pub fn get(&self, p: &[i64]) -> S {
        match self.support {
            Some(sup) if sup.lo.iter().zip(&sup.hi).zip(p).all(|((l, h), v)| l <= v && v <= h) => {
                self.layout.index(p).map(|i| self.values[i].clone()).unwrap_or_else(S::zero)
            }
            _ => S::zero(),
        }
    }

    pub fn support(&self) -> Option<&'a Region> {
        self.support
    }

    /// Visits nonzero entries in row-major order.
    pub fn for_each_nonzero(&self, mut f: impl FnMut(&[i64], &S)) {
        let Some(sup) = self.support else { return };
        let d = sup.lo.len();
        let mut p = sup.lo.clone();
        loop {
            let base = self.layout.index(&p).expect("support inside layout");
            let mut q = p.clone();
            for j in 0..(sup.hi[d - 1] - sup.lo[d - 1] + 1) as usize {
                let v = &self.values[base + j];
                if !v.is_zero() {
                    q[d - 1] = sup.lo[d - 1] + j as i64;
                    f(&q, v);
                }
            }
            // advance outer index
            let mut k = d - 1;
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                if p[k] < sup.hi[k] {
                    p[k] += 1;
                    break;
                }
                p[k] = sup.lo[k];
            }
        }
    }

    pub fn total_mass(&self) -> S {
        let mut acc = CompensatedSum::new();
        self.for_each_nonzero(|_, v| acc.add(v.clone()));
        acc.value()
    }

    /// Sum of `f(y) * mass(y)` over the slice, in f64.
    pub fn expectation(&self, mut f: impl FnMut(&[i64]) -> f64) -> f64 {
        let mut acc = CompensatedSum::<f64>::new();
        self.for_each_nonzero(|p, v| acc.add(f(p) * v.to_f64()));
        acc.value()
    }

    pub fn to_table(&self, step: usize, origin: &[i64], killed: S, clipped: S, stopped: S) -> MassTable<S> {
        let mut entries = Vec::new();
        self.for_each_nonzero(|p, v| entries.push((p.to_vec(), v.clone())));
        MassTable {
            step,
            origin: origin.to_vec(),
            entries,
            killed_mass: killed,
            clipped_mass: clipped,
            stopped_mass: stopped,
        }
    }
}

/// One time slice: sparse map from lattice points to surviving mass.
#[derive(Debug, Clone, PartialEq)]
pub struct MassTable<S> {
    pub step: usize,
    pub origin: Vec<i64>,
    /// Nonzero entries in row-major order.
    pub entries: Vec<(Vec<i64>, S)>,
    pub killed_mass: S,
    pub clipped_mass: S,
    pub stopped_mass: S,
}

impl<S: Scalar> MassTable<S> {
    pub fn get(&self, p: &[i64]) -> S {
        self.entries
            .binary_search_by(|(q, _)| q.as_slice().cmp(p))
            .map(|i| self.entries[i].1.clone())
            .unwrap_or_else(|_| S::zero())
    }

    pub fn total_mass(&self) -> S {
        crate::scalar::compensated_sum(self.entries.iter().map(|(_, v)| v.clone()))
    }

    /// `|stored + killed + clipped + stopped - 1|`
    pub fn conservation_defect(&self) -> f64 {
        let total = self.total_mass() + self.killed_mass.clone() + self.clipped_mass.clone() + self.stopped_mass.clone();
        (total - S::one()).abs().to_f64()
    }
}

/// Stop region: returns `Some(weight)` for points where mass is absorbed
/// (contributing `weight * mass` to the stopped value).
pub type StopRule = Box<dyn Fn(&[i64]) -> Option<f64> + Send + Sync>;

struct CellPlan<S> {
    mask: Vec<u8>,
    /// (cell, killed weight, clipped weight) for cells with exits.
    exits: Vec<(usize, S, S)>,
    stop_weight: Vec<f64>,
}

struct RowStats<S> {
    discarded: CompensatedSum<S>,
    stopped: CompensatedSum<S>,
    stopped_value: CompensatedSum<f64>,
    first: Option<usize>,
    last: usize,
}

/// Streaming evolution of `P(x + S(n) = ., tau_x > n)`.
pub struct Evolver<S: Scalar> {
    cone: ConeSpec,
    steps: Vec<(Vec<i64>, S)>,
    reach: Vec<i64>,
    step_lo: Vec<i64>,
    step_hi: Vec<i64>,
    window: WindowPolicy,
    stop: Option<StopRule>,
    layout: Layout,
    offsets: Vec<(isize, S)>,
    plan: CellPlan<S>,
    cur: Vec<S>,
    next: Vec<S>,
    support: Option<Region>,
    origin: Vec<i64>,
    step: usize,
    killed: CompensatedSum<S>,
    clipped: CompensatedSum<S>,
    stopped: CompensatedSum<S>,
    stopped_value: CompensatedSum<f64>,
    parallel: bool,
}

impl<S: Scalar> Evolver<S> {
    pub fn new(model: &WalkModel, x: &[i64], window: WindowPolicy) -> Result<Self> {
        Self::build(model, x, window, None)
    }

    /// Evolver whose mass is absorbed on entering the stop region.
    pub fn with_stop_rule(model: &WalkModel, x: &[i64], window: WindowPolicy, stop: StopRule) -> Result<Self> {
        Self::build(model, x, window, Some(stop))
    }

    fn build(model: &WalkModel, x: &[i64], window: WindowPolicy, stop: Option<StopRule>) -> Result<Self> {
        let d = model.dimension();
        if x.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: x.len(),
            });
        }
        if !model.cone.contains_lattice(x) || !window.contains(x) {
            return Err(Error::StartOutsideCone(x.to_vec()));
        }
        if let Some((lo, hi)) = &window.bounds {
            if lo.len() != d || hi.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: lo.len(),
                });
            }
        }
        let steps = model.steps::<S>();
        let (mut step_lo, mut step_hi) = (vec![0; d], vec![0; d]);
        for (s, _) in &steps {
            for i in 0..d {
                step_lo[i] = step_lo[i].min(s[i]);
                step_hi[i] = step_hi[i].max(s[i]);
            }
        }
        let reach: Vec<i64> = (0..d).map(|i| step_hi[i] - step_lo[i]).collect();
        let support = Region {
            lo: x.to_vec(),
            hi: x.to_vec(),
        };
        let layout = Layout::new(support.expand(&neg(&reach), &reach));
        let mut ev = Self {
            cone: model.cone.clone(),
            steps,
            reach,
            step_lo,
            step_hi,
            window,
            stop,
            offsets: Vec::new(),
            plan: CellPlan {
                mask: Vec::new(),
                exits: Vec::new(),
                stop_weight: Vec::new(),
            },
            cur: vec![S::zero(); layout.len],
            next: vec![S::zero(); layout.len],
            layout,
            support: Some(support),
            origin: x.to_vec(),
            step: 0,
            killed: CompensatedSum::new(),
            clipped: CompensatedSum::new(),
            stopped: CompensatedSum::new(),
            stopped_value: CompensatedSum::new(),
            parallel: false,
        };
        let i = ev.layout.index(x).unwrap();
        ev.cur[i] = S::one();
        ev.rebuild_plan();
        Ok(ev)
    }

    /// Process rows on the rayon pool. Results are bitwise identical to the
    /// sequential mode: every cell is computed the same way and row
    /// statistics are reduced in row order.
    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn origin(&self) -> &[i64] {
        &self.origin
    }

    pub fn view(&self) -> SliceView<'_, S> {
        SliceView {
            layout: &self.layout,
            values: &self.cur,
            support: self.support.as_ref(),
        }
    }

    pub fn get(&self, p: &[i64]) -> S {
        self.view().get(p)
    }

    pub fn total_mass(&self) -> S {
        self.view().total_mass()
    }

    pub fn killed_mass(&self) -> S {
        self.killed.value()
    }

    pub fn clipped_mass(&self) -> S {
        self.clipped.value()
    }

    pub fn stopped_mass(&self) -> S {
        self.stopped.value()
    }

    /// Accumulated `sum weight(y) * mass` over absorbed mass.
    pub fn stopped_value(&self) -> f64 {
        self.stopped_value.value()
    }

    pub fn table(&self) -> MassTable<S> {
        self.view().to_table(
            self.step,
            &self.origin,
            self.killed_mass(),
            self.clipped_mass(),
            self.stopped_mass(),
        )
    }

    pub fn support(&self) -> Option<&Region> {
        self.support.as_ref()
    }

    fn rebuild_plan(&mut self) {
        let d = self.layout.shape.len();
        let n = self.layout.len;
        let mut mask = vec![LIVE; n];
        let mut stop_weight = if self.stop.is_some() { vec![0.0; n] } else { Vec::new() };
        let mut p = vec![0i64; d];
        for (i, m) in mask.iter_mut().enumerate() {
            self.layout.point(i, &mut p);
            *m = if !self.cone.contains_lattice(&p) {
                KILLED
            } else if !self.window.contains(&p) {
                CLIPPED
            } else if let Some(w) = self.stop.as_ref().and_then(|f| f(&p)) {
                stop_weight[i] = w;
                STOPPED
            } else {
                LIVE
            };
        }
        self.offsets = self
            .steps
            .iter()
            .map(|(s, prob)| (self.layout.offset(s), prob.clone()))
            .collect();
        let inner = Region {
            lo: self.layout.region.lo.iter().zip(&self.step_lo).map(|(a, b)| a - b).collect(),
            hi: self.layout.region.hi.iter().zip(&self.step_hi).map(|(a, b)| a - b).collect(),
        };
        let mut exits = Vec::new();
        for i in 0..n {
            if mask[i] != LIVE {
                continue;
            }
            self.layout.point(i, &mut p);
            if !(0..d).all(|k| inner.lo[k] <= p[k] && p[k] <= inner.hi[k]) {
                continue;
            }
            let mut kw = S::zero();
            let mut cw = S::zero();
            for (off, prob) in &self.offsets {
                match mask[(i as isize + off) as usize] {
                    KILLED => kw = kw + prob.clone(),
                    CLIPPED => cw = cw + prob.clone(),
                    _ => {}
                }
            }
            if !kw.is_zero() || !cw.is_zero() {
                exits.push((i, kw, cw));
            }
        }
        self.plan = CellPlan {
            mask,
            exits,
            stop_weight,
        };
    }

    fn relayout(&mut self, sup: &Region) {
        let slack: Vec<i64> = (0..sup.lo.len())
            .map(|i| ((sup.hi[i] - sup.lo[i]) / 4).max(4))
            .collect();
        let mut region = sup.expand(&neg(&self.reach), &self.reach).expand(&neg(&slack), &slack);
        if let Some((lo, hi)) = &self.window.bounds {
            for i in 0..region.lo.len() {
                region.lo[i] = region.lo[i].max(lo[i] - self.reach[i]);
                region.hi[i] = region.hi[i].min(hi[i] + self.reach[i]);
            }
        }
        let layout = Layout::new(region);
        let mut values = vec![S::zero(); layout.len];
        let old = self.view();
        old.for_each_nonzero(|p, v| {
            values[layout.index(p).expect("support inside new layout")] = v.clone();
        });
        self.cur = values;
        self.next = vec![S::zero(); layout.len];
        self.layout = layout;
        self.rebuild_plan();
    }

    /// Advances one step.
    pub fn advance(&mut self) -> Result<()> {
        self.step += 1;
        let Some(sup) = self.support.clone() else {
            return Ok(());
        };
        let needed = sup.expand(&neg(&self.reach), &self.reach);
        let needed = match &self.window.bounds {
            None => needed,
            Some((lo, hi)) => Region {
                lo: (0..lo.len()).map(|i| needed.lo[i].max(lo[i] - self.reach[i])).collect(),
                hi: (0..hi.len()).map(|i| needed.hi[i].min(hi[i] + self.reach[i])).collect(),
            },
        };
        if !self.layout.region.contains_region(&needed) {
            self.relayout(&sup);
        }

        // exits from the current slice
        let mut killed_step = CompensatedSum::new();
        let mut clipped_step = CompensatedSum::new();
        let sup_lo = self.layout.index(&sup.lo).unwrap();
        let sup_hi = self.layout.index(&sup.hi).unwrap();
        for (i, kw, cw) in &self.plan.exits {
            if *i < sup_lo || *i > sup_hi {
                continue;
            }
            let v = &self.cur[*i];
            if v.is_zero() {
                continue;
            }
            if !kw.is_zero() {
                killed_step.add(v.clone() * kw.clone());
            }
            if !cw.is_zero() {
                clipped_step.add(v.clone() * cw.clone());
            }
        }

        let targets = sup.expand(&self.step_lo, &self.step_hi).intersect(&self.window.bounds);
        let stats = match &targets {
            Some(t) => self.compute_rows(t),
            None => Vec::new(),
        };

        // clear the old slice so `cur` becomes the zeroed scratch buffer
        let d = sup.lo.len();
        {
            let layout = &self.layout;
            let cur = &mut self.cur;
            for_each_row(&sup, |outer_lo| {
                let base = layout.index(outer_lo).unwrap();
                let len = (sup.hi[d - 1] - sup.lo[d - 1] + 1) as usize;
                cur[base..base + len].iter_mut().for_each(|v| *v = S::zero());
            });
        }
        std::mem::swap(&mut self.cur, &mut self.next);

        let mut new_sup: Option<Region> = None;
        if let Some(t) = &targets {
            let mut outer = t.lo.clone();
            for st in &stats {
                clipped_step.merge(&st.discarded);
                self.stopped.merge(&st.stopped);
                self.stopped_value.merge(&st.stopped_value);
                if let Some(first) = st.first {
                    let mut lo = outer.clone();
                    let mut hi = outer.clone();
                    lo[d - 1] = t.lo[d - 1] + first as i64;
                    hi[d - 1] = t.lo[d - 1] + st.last as i64;
                    new_sup = Some(match new_sup {
                        None => Region { lo, hi },
                        Some(r) => Region {
                            lo: r.lo.iter().zip(&lo).map(|(a, b)| *a.min(b)).collect(),
                            hi: r.hi.iter().zip(&hi).map(|(a, b)| *a.max(b)).collect(),
                        },
                    });
                }
                advance_outer(&mut outer, t);
            }
        }
        self.killed.merge(&killed_step);
        self.clipped.merge(&clipped_step);
        self.support = new_sup;

        let clipped = self.clipped.value().to_f64();
        if clipped > self.window.tolerance {
            return Err(Error::WindowOverflow {
                step: self.step,
                clipped,
                tolerance: self.window.tolerance,
            });
        }
        Ok(())
    }

    pub fn advance_to(&mut self, n: usize) -> Result<()> {
        while self.step < n {
            self.advance()?;
        }
        Ok(())
    }

    fn compute_rows(&mut self, t: &Region) -> Vec<RowStats<S>> {
        let d = t.lo.len();
        let row_len = (t.hi[d - 1] - t.lo[d - 1] + 1) as usize;
        let threshold = match S::flush_threshold() {
            None => None,
            Some(f) => Some(if self.window.prune_below > 0.0 {
                let p = S::from_f64(self.window.prune_below);
                if p > f {
                    p
                } else {
                    f
                }
            } else {
                f
            }),
        };
        let layout = &self.layout;
        let mut bases = Vec::new();
        for_each_row(t, |p| bases.push(layout.index(p).unwrap()));
        let ctx = RowContext {
            cur: &self.cur,
            mask: &self.plan.mask,
            stop_weight: &self.plan.stop_weight,
            offsets: &self.offsets,
            threshold,
            row_len,
        };
        // Split `next` into disjoint row segments.
        let mut segments: Vec<(usize, &mut [S])> = Vec::with_capacity(bases.len());
        let mut rest: &mut [S] = &mut self.next;
        let mut consumed = 0;
        for &b in &bases {
            let (_, tail) = rest.split_at_mut(b - consumed);
            let (seg, tail) = tail.split_at_mut(row_len);
            segments.push((b, seg));
            rest = tail;
            consumed = b + row_len;
        }
        if self.parallel {
            segments.into_par_iter().map(|(b, seg)| ctx.row(b, seg)).collect()
        } else {
            segments.into_iter().map(|(b, seg)| ctx.row(b, seg)).collect()
        }
    }
}

struct RowContext<'a, S> {
    cur: &'a [S],
    mask: &'a [u8],
    stop_weight: &'a [f64],
    offsets: &'a [(isize, S)],
    threshold: Option<S>,
    row_len: usize,
}

impl<S: Scalar> RowContext<'_, S> {
    #[inline]
    fn row(&self, base: usize, out: &mut [S]) -> RowStats<S> {
        let mut st = RowStats {
            discarded: CompensatedSum::new(),
            stopped: CompensatedSum::new(),
            stopped_value: CompensatedSum::new(),
            first: None,
            last: 0,
        };
        for j in 0..self.row_len {
            let i = base + j;
            let m = self.mask[i];
            if m == KILLED || m == CLIPPED {
                continue;
            }
            let mut v = S::zero();
            for (off, p) in self.offsets {
                v.mul_add_assign(p, &self.cur[(i as isize - off) as usize]);
            }
            if v.is_zero() {
                continue;
            }
            if let Some(thr) = &self.threshold {
                if v < *thr {
                    st.discarded.add(v);
                    continue;
                }
            }
            if m == STOPPED {
                st.stopped_value.add(self.stop_weight[i] * v.to_f64());
                st.stopped.add(v);
                continue;
            }
            if st.first.is_none() {
                st.first = Some(j);
            }
            st.last = j;
            out[j] = v;
        }
        st
    }
}

fn neg(v: &[i64]) -> Vec<i64> {
    v.iter().map(|x| -x).collect()
}

/// Calls `f` with the first point of every row (last coordinate at `lo`).
fn for_each_row(r: &Region, mut f: impl FnMut(&[i64])) {
    let mut p = r.lo.clone();
    loop {
        f(&p);
        if !advance_outer(&mut p, r) {
            return;
        }
    }
}

fn advance_outer(p: &mut [i64], r: &Region) -> bool {
    let d = p.len();
    let mut k = d - 1;
    loop {
        if k == 0 {
            return false;
        }
        k -= 1;
        if p[k] < r.hi[k] {
            p[k] += 1;
            return true;
        }
        p[k] = r.lo[k];
    }
}

/// All slices `0..=n_max` of a run from `x`.
pub fn evolve<S: Scalar>(model: &WalkModel, x: &[i64], n_max: usize, window: WindowPolicy) -> Result<Vec<MassTable<S>>> {
    let mut ev = Evolver::<S>::new(model, x, window)?;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(ev.table());
    for _ in 0..n_max {
        ev.advance()?;
        out.push(ev.table());
    }
    Ok(out)
}

/// `P(tau_x > n)`; zero when `x` is not in the cone.
pub fn survival<S: Scalar>(model: &WalkModel, x: &[i64], n: usize) -> Result<S> {
    if !model.cone.contains_lattice(x) {
        return Ok(S::zero());
    }
    let mut ev = Evolver::<S>::new(model, x, WindowPolicy::unbounded())?;
    ev.advance_to(n)?;
    Ok(ev.total_mass())
}

/// Survival probabilities `P(tau_x > n)` for `n = 0..=n_max` under a window policy.
pub fn survival_curve(model: &WalkModel, x: &[i64], n_max: usize, window: WindowPolicy) -> Result<Vec<f64>> {
    let mut ev = Evolver::<f64>::new(model, x, window)?;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    for _ in 0..n_max {
        ev.advance()?;
        out.push(ev.total_mass());
    }
    Ok(out)
}

/// `P(x + S(n) = y, tau_x > n)`.
pub fn local_prob<S: Scalar>(model: &WalkModel, x: &[i64], y: &[i64], n: usize) -> Result<S> {
    if !model.cone.contains_lattice(x) || !model.cone.contains_lattice(y) {
        return Ok(S::zero());
    }
    let mut ev = Evolver::<S>::new(model, x, WindowPolicy::unbounded())?;
    ev.advance_to(n)?;
    Ok(ev.get(y))
}

/// `(P(x + S(n) = y, tau_x > n), P(y + S'(n) = x, tau'_y > n))`.
pub fn time_reversal_check<S: Scalar>(model: &WalkModel, x: &[i64], y: &[i64], n: usize) -> Result<(S, S)> {
    Ok((local_prob(model, x, y, n)?, local_prob(&model.reverse(), y, x, n)?))
}
