//! Walk models: increment laws on Z^d bound to a cone, with exact moment
//! bookkeeping and machine checks of the standing hypotheses.

use std::collections::{HashMap, HashSet, VecDeque};
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::ConeSpec;
use crate::lattice;
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub step: Vec<i64>,
    pub prob: Rational,
}

/// Finitely supported law on Z^d with exact rational probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementDistribution {
    dimension: usize,
    atoms: Vec<Atom>,
}

impl IncrementDistribution {
    pub fn new(dimension: usize, atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptySupport);
        }
        if dimension == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        let mut seen = HashSet::new();
        let mut total = Rational::zero();
        for (i, atom) in atoms.iter().enumerate() {
            if atom.step.len() != dimension {
                return Err(Error::InvalidAtom {
                    atom: i,
                    message: format!("step has {} coordinates, expected {dimension}", atom.step.len()),
                });
            }
            if !atom.prob.is_positive() {
                return Err(Error::InvalidAtom {
                    atom: i,
                    message: format!("probability {} is not strictly positive", atom.prob),
                });
            }
            if !seen.insert(atom.step.clone()) {
                return Err(Error::InvalidAtom {
                    atom: i,
                    message: format!("duplicate step {:?}", atom.step),
                });
            }
            total += &atom.prob;
        }
        if !total.is_one() {
            return Err(Error::NotNormalized {
                total: total.to_string(),
            });
        }
        Ok(Self { dimension, atoms })
    }

    /// Nearest-neighbour walk on Z^d, each of the 2d steps with probability 1/(2d).
    pub fn simple_random_walk(d: usize) -> Self {
        let p = BigRational::new(BigInt::one(), BigInt::from(2 * d));
        let atoms = (0..d)
            .flat_map(|i| {
                [1i64, -1].into_iter().map(move |s| {
                    let mut step = vec![0; d];
                    step[i] = s;
                    step
                })
            })
            .map(|step| Atom {
                step,
                prob: p.clone(),
            })
            .collect();
        Self::new(d, atoms).expect("simple random walk is valid")
    }

    pub fn from_pairs(dimension: usize, pairs: &[(&[i64], (i64, i64))]) -> Result<Self> {
        let atoms = pairs
            .iter()
            .map(|(s, (n, d))| Atom {
                step: s.to_vec(),
                prob: BigRational::new(BigInt::from(*n), BigInt::from(*d)),
            })
            .collect();
        Self::new(dimension, atoms)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn negated(&self) -> Self {
        Self {
            dimension: self.dimension,
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    step: a.step.iter().map(|v| -v).collect(),
                    prob: a.prob.clone(),
                })
                .collect(),
        }
    }

    /// `sum z p_z`
    pub fn drift(&self) -> Vec<Rational> {
        (0..self.dimension)
            .map(|i| {
                self.atoms
                    .iter()
                    .map(|a| &a.prob * BigInt::from(a.step[i]))
                    .fold(Rational::zero(), |acc, v| acc + v)
            })
            .collect()
    }

    /// `sum z z^T p_z - m m^T`
    pub fn covariance(&self) -> Vec<Vec<Rational>> {
        let m = self.drift();
        let d = self.dimension;
        let mut cov = vec![vec![Rational::zero(); d]; d];
        for a in &self.atoms {
            for i in 0..d {
                for j in 0..d {
                    cov[i][j] += &a.prob * BigInt::from(a.step[i] * a.step[j]);
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                cov[i][j] -= &m[i] * &m[j];
            }
        }
        cov
    }

    /// Per-coordinate extremes of the support.
    pub fn step_bounds(&self) -> (Vec<i64>, Vec<i64>) {
        let d = self.dimension;
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        for a in &self.atoms {
            for i in 0..d {
                lo[i] = lo[i].min(a.step[i]);
                hi[i] = hi[i].max(a.step[i]);
            }
        }
        (lo, hi)
    }
}

/// A random walk `S(n)` on Z^d together with the cone it is killed outside of.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkModel {
    pub increments: IncrementDistribution,
    pub cone: ConeSpec,
    /// When set, the walk uses increments distributed as `-X` (the walk S').
    pub reversed: bool,
}

impl WalkModel {
    pub fn new(increments: IncrementDistribution, cone: ConeSpec) -> Result<Self> {
        if increments.dimension() != cone.dimension() {
            return Err(Error::DimensionMismatch {
                expected: increments.dimension(),
                got: cone.dimension(),
            });
        }
        Ok(Self {
            increments,
            cone,
            reversed: false,
        })
    }

    pub fn dimension(&self) -> usize {
        self.increments.dimension()
    }

    /// The same walk with time reversed: increments `-X`.
    pub fn reverse(&self) -> Self {
        Self {
            reversed: !self.reversed,
            ..self.clone()
        }
    }

    /// Law of the increments actually taken by this walk.
    pub fn effective_increments(&self) -> IncrementDistribution {
        if self.reversed {
            self.increments.negated()
        } else {
            self.increments.clone()
        }
    }

    /// Steps and probabilities converted to the scalar type `S`.
    pub fn steps<S: Scalar>(&self) -> Vec<(Vec<i64>, S)> {
        let sign = if self.reversed { -1 } else { 1 };
        self.increments
            .atoms()
            .iter()
            .map(|a| (a.step.iter().map(|v| sign * v).collect(), S::from_ratio(&a.prob)))
            .collect()
    }

    pub fn transform(&self) -> Option<&Vec<Vec<f64>>> {
        self.cone.transform()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        doc.into_model()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ModelDocument::from_model(self)).expect("model serializes")
    }
}

/// JSON form of a [`WalkModel`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub dimension: usize,
    pub atoms: Vec<AtomDocument>,
    pub cone: serde_json::Value,
    #[serde(default)]
    pub reversed: bool,
    /// Attach the symmetric decorrelating transform after parsing.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub decorrelate: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDocument {
    pub step: Vec<i64>,
    pub prob: String,
}

impl ModelDocument {
    pub fn into_model(self) -> Result<WalkModel> {
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for (i, a) in self.atoms.into_iter().enumerate() {
            let prob = parse_probability(&a.prob).map_err(|message| Error::InvalidAtom { atom: i, message })?;
            atoms.push(Atom { step: a.step, prob });
        }
        let increments = IncrementDistribution::new(self.dimension, atoms)?;
        let cone: ConeSpec =
            serde_json::from_value(self.cone).map_err(|e| Error::Parse(format!("cone: {e}")))?;
        let mut model = WalkModel::new(increments, cone)?;
        model.reversed = self.reversed;
        if self.decorrelate {
            model = decorrelate(&model)?;
        }
        Ok(model)
    }

    pub fn from_model(model: &WalkModel) -> Self {
        Self {
            dimension: model.dimension(),
            atoms: model
                .increments
                .atoms()
                .iter()
                .map(|a| AtomDocument {
                    step: a.step.clone(),
                    prob: a.prob.to_string(),
                })
                .collect(),
            cone: serde_json::to_value(&model.cone).expect("cone serializes"),
            reversed: model.reversed,
            decorrelate: false,
        }
    }
}

/// Parses `"num/den"` or a plain decimal such as `"0.25"` or `"1e-3"` into
/// an exact rational.
pub fn parse_probability(text: &str) -> std::result::Result<Rational, String> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| format!("bad numerator in {text:?}"))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| format!("bad denominator in {text:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {text:?}"));
        }
        return Ok(BigRational::new(n, d));
    }
    parse_decimal(t).ok_or_else(|| format!("cannot parse probability {text:?}"))
}

fn parse_decimal(t: &str) -> Option<Rational> {
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        BigRational::from_integer(num * ten.pow(scale as u32))
    } else {
        BigRational::new(num, ten.pow((-scale) as u32))
    })
}

/// Attaches the symmetric inverse square root `M = cov^{-1/2}` so that the
/// walk `M S(n)` has identity covariance. The cone keeps its lattice
/// description; metric queries see `M K`.
pub fn decorrelate(model: &WalkModel) -> Result<WalkModel> {
    let d = model.dimension();
    let cov = model.increments.covariance();
    let c = DMatrix::from_fn(d, d, |i, j| Scalar::to_f64(&cov[i][j]));
    let eig = SymmetricEigen::new(c);
    let max = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || min <= 1e-12 * max {
        return Err(Error::SingularCovariance(d));
    }
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    let m = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.transpose();
    let rows: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| m[(i, j)]).collect()).collect();
    let cone = model.cone.without_transform().with_transform(rows)?;
    Ok(WalkModel {
        cone,
        ..model.clone()
    })
}

/// `p + q + d - 2 + (2 - p)^+`
pub fn moment_threshold(p: f64, q: f64, d: usize) -> f64 {
    p + q + d as f64 - 2.0 + (2.0 - p).max(0.0)
}

fn ratio_vec<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

fn ratio_mat<S: Serializer>(v: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|row| row.iter().map(|r| r.to_string()).collect::<Vec<_>>()))
}

#[derive(Debug, Clone, Serialize)]
pub struct AperiodicityEvidence {
    pub aperiodic: bool,
    /// Whether the support generates Z^d.
    pub support_generates_lattice: bool,
    /// Index of the lattice generated by differences `A - A` in Z^d.
    pub difference_index: Option<u64>,
    /// Echelon basis of the difference lattice.
    pub witness_basis: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PathWitness {
    pub point: Vec<i64>,
    /// Positive-probability path from a point of `z + K` to `z`, inside `K ∩ B(z, R)`.
    pub path: Option<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IrreducibilityEvidence {
    pub irreducible: bool,
    pub radius: f64,
    pub evidence: &'static str,
    pub witnesses: Vec<PathWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisFlags {
    pub zero_drift: bool,
    pub identity_covariance: bool,
    pub strongly_aperiodic: bool,
    pub convex_cone: bool,
    pub strongly_irreducible: bool,
    pub moments: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    #[serde(serialize_with = "ratio_vec")]
    pub drift: Vec<Rational>,
    #[serde(serialize_with = "ratio_mat")]
    pub covariance: Vec<Vec<Rational>>,
    /// Covariance in the metric frame, `M cov M^T` (equals `covariance` without a transform).
    pub metric_covariance: Vec<Vec<f64>>,
    pub aperiodic: AperiodicityEvidence,
    pub irreducible: IrreducibilityEvidence,
    pub reduite_exponent: Option<f64>,
    pub tangent_exponent_sup: Option<f64>,
    pub moment_threshold_r: Option<f64>,
    pub satisfied: HypothesisFlags,
}

/// Tolerance on `M cov M^T - I` per entry.
pub const IDENTITY_COVARIANCE_TOL: f64 = 1e-12;

pub fn validate_hypotheses(
    model: &WalkModel,
    irreducibility_radius: f64,
    sample_points: &[Vec<i64>],
) -> Result<HypothesisReport> {
    let d = model.dimension();
    for z in sample_points {
        if z.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: z.len(),
            });
        }
        if !model.cone.contains_lattice(z) {
            return Err(Error::SampleOutsideCone(z.clone()));
        }
        let n = model.cone.metric_norm_lattice(z);
        if n < irreducibility_radius {
            return Err(Error::SampleTooClose {
                point: z.clone(),
                norm: n,
                radius: irreducibility_radius,
            });
        }
    }
    let law = model.effective_increments();
    let drift = law.drift();
    let covariance = law.covariance();
    let metric_covariance = metric_covariance(model, &covariance);
    let identity = metric_covariance.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(j, v)| (v - if i == j { 1.0 } else { 0.0 }).abs() <= IDENTITY_COVARIANCE_TOL)
    });

    let aperiodic = aperiodicity(&law);
    let witnesses: Vec<PathWitness> = sample_points
        .iter()
        .map(|z| PathWitness {
            point: z.clone(),
            path: irreducibility_path(model, z, irreducibility_radius),
        })
        .collect();
    let irreducible = witnesses.iter().all(|w| w.path.is_some());

    let reduite_exponent = model.cone.reduite().ok().map(|r| r.exponent);
    let tangent_exponent_sup = model.cone.boundary_exponent_sup().ok();
    let moment_threshold_r = match (reduite_exponent, tangent_exponent_sup) {
        (Some(p), Some(q)) => Some(moment_threshold(p, q, d)),
        _ => None,
    };

    Ok(HypothesisReport {
        satisfied: HypothesisFlags {
            zero_drift: drift.iter().all(|m| m.is_zero()),
            identity_covariance: identity,
            strongly_aperiodic: aperiodic.aperiodic,
            convex_cone: true,
            strongly_irreducible: irreducible,
            // finite support: every moment is finite
            moments: true,
        },
        drift,
        covariance,
        metric_covariance,
        aperiodic,
        irreducible: IrreducibilityEvidence {
            irreducible,
            radius: irreducibility_radius,
            evidence: "sampled",
            witnesses,
        },
        reduite_exponent,
        tangent_exponent_sup,
        moment_threshold_r,
    })
}

fn metric_covariance(model: &WalkModel, cov: &[Vec<Rational>]) -> Vec<Vec<f64>> {
    let d = cov.len();
    let c = DMatrix::from_fn(d, d, |i, j| Scalar::to_f64(&cov[i][j]));
    let out = match model.transform() {
        None => c,
        Some(m) => {
            let m = DMatrix::from_fn(d, d, |i, j| m[i][j]);
            &m * c * m.transpose()
        }
    };
    (0..d).map(|i| (0..d).map(|j| out[(i, j)]).collect()).collect()
}

/// `z + A` generates Z^d for every z iff the differences `A - A` do.
fn aperiodicity(law: &IncrementDistribution) -> AperiodicityEvidence {
    let d = law.dimension();
    let steps: Vec<Vec<i64>> = law.atoms().iter().map(|a| a.step.clone()).collect();
    let support_index = lattice::index_in_zd(&steps, d);
    let diffs: Vec<Vec<i64>> = steps[1..]
        .iter()
        .map(|s| s.iter().zip(&steps[0]).map(|(a, b)| a - b).collect())
        .collect();
    let difference_index = lattice::index_in_zd(&diffs, d);
    AperiodicityEvidence {
        aperiodic: difference_index == Some(1),
        support_generates_lattice: support_index == Some(1),
        difference_index,
        witness_basis: lattice::echelon_basis(&diffs, d),
    }
}

/// Breadth-first search backwards from `z` inside `K ∩ B(z, R)` for a point
/// of `z + K`; returns the forward path ending at `z`.
fn irreducibility_path(model: &WalkModel, z: &[i64], radius: f64) -> Option<Vec<Vec<i64>>> {
    let steps: Vec<Vec<i64>> = model.steps::<f64>().into_iter().map(|(s, _)| s).collect();
    let in_ball = |p: &[i64]| {
        let diff: Vec<i64> = p.iter().zip(z).map(|(a, b)| a - b).collect();
        model.cone.metric_norm_lattice(&diff) <= radius
    };
    let mut next: HashMap<Vec<i64>, Vec<i64>> = HashMap::new();
    let mut queue = VecDeque::from([z.to_vec()]);
    let mut seen = HashSet::from([z.to_vec()]);
    while let Some(q) = queue.pop_front() {
        for a in &steps {
            let p: Vec<i64> = q.iter().zip(a).map(|(x, s)| x - s).collect();
            if seen.contains(&p) || !model.cone.contains_lattice(&p) || !in_ball(&p) {
                continue;
            }
            seen.insert(p.clone());
            next.insert(p.clone(), q.clone());
            let rel: Vec<i64> = p.iter().zip(z).map(|(a, b)| a - b).collect();
            if model.cone.contains_lattice(&rel) {
                let mut path = vec![p.clone()];
                let mut cur = p;
                while let Some(n) = next.get(&cur) {
                    path.push(n.clone());
                    cur = n.clone();
                }
                return Some(path);
            }
            queue.push_back(p);
        }
    }
    None
}
