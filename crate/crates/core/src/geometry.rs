//! Cones, boundary distances, the reduite catalog and tangent cones.
//!
//! Every cone handled here is an intersection of finitely many open
//! half-spaces `{x : <x, n_i> > 0}` (a wedge of opening at most pi is one
//! too). Membership is decided in lattice coordinates so that lattice points
//! on the boundary are classified exactly whenever the normals are integral.
//! Metric quantities (distances, norms, the reduite) live in the
//! decorrelated frame `y = M x` when the cone carries a transform `M`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ORTHOGONALITY_TOL: f64 = 1e-12;
const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum ConeShape {
    #[serde(rename = "orthant")]
    Orthant { d: usize },
    #[serde(rename = "halfspace")]
    HalfSpace { normal: Vec<f64> },
    #[serde(rename = "wedge2d")]
    Wedge2d { beta: f64 },
    #[serde(rename = "polyhedral")]
    Polyhedral { normals: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawConeSpec {
    #[serde(flatten)]
    shape: ConeShape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    transform: Option<Vec<Vec<f64>>>,
}

/// An open convex cone, optionally carrying the decorrelating transform of
/// the walk that lives in it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConeSpec", into = "RawConeSpec")]
pub struct ConeSpec {
    shape: ConeShape,
    transform: Option<Vec<Vec<f64>>>,
    dim: usize,
    normals: Vec<Vec<f64>>,
    metric_normals: Vec<Vec<f64>>,
}

impl TryFrom<RawConeSpec> for ConeSpec {
    type Error = Error;

    fn try_from(raw: RawConeSpec) -> Result<Self> {
        let cone = ConeSpec::new(raw.shape)?;
        match raw.transform {
            Some(m) => cone.with_transform(m),
            None => Ok(cone),
        }
    }
}

impl From<ConeSpec> for RawConeSpec {
    fn from(c: ConeSpec) -> Self {
        RawConeSpec {
            shape: c.shape,
            transform: c.transform,
        }
    }
}

impl ConeSpec {
    pub fn new(shape: ConeShape) -> Result<Self> {
        let (dim, normals) = match &shape {
            ConeShape::Orthant { d } => {
                if *d == 0 {
                    return Err(Error::InvalidCone("orthant dimension must be positive".into()));
                }
                let normals = (0..*d)
                    .map(|i| (0..*d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                    .collect();
                (*d, normals)
            }
            ConeShape::HalfSpace { normal } => {
                if normal.is_empty() || norm(normal) == 0.0 || !normal.iter().all(|v| v.is_finite()) {
                    return Err(Error::InvalidCone("half-space normal must be a nonzero finite vector".into()));
                }
                (normal.len(), vec![normal.clone()])
            }
            ConeShape::Wedge2d { beta } => {
                let beta = *beta;
                if !(beta > 0.0 && beta < 2.0 * PI) {
                    return Err(Error::InvalidCone(format!("wedge opening {beta} outside (0, 2pi)")));
                }
                if beta > PI {
                    return Err(Error::InvalidCone(format!("wedge opening {beta} > pi is not convex")));
                }
                let normals = if beta == PI {
                    vec![vec![0.0, 1.0]]
                } else {
                    vec![vec![0.0, 1.0], vec![beta.sin(), -beta.cos()]]
                };
                (2, normals)
            }
            ConeShape::Polyhedral { normals } => {
                let d = normals.first().map(|n| n.len()).unwrap_or(0);
                if d == 0 {
                    return Err(Error::InvalidCone("polyhedral cone needs at least one normal".into()));
                }
                if normals.iter().any(|n| n.len() != d || norm(n) == 0.0) {
                    return Err(Error::InvalidCone("normals must be nonzero and of equal length".into()));
                }
                (d, normals.clone())
            }
        };
        let metric_normals = normals.iter().map(|n| unit(n)).collect();
        let cone = ConeSpec {
            shape,
            transform: None,
            dim,
            normals,
            metric_normals,
        };
        cone.interior_witness()?;
        Ok(cone)
    }

    pub fn orthant(d: usize) -> Self {
        Self::new(ConeShape::Orthant { d }).expect("orthant is valid")
    }

    pub fn half_space(normal: Vec<f64>) -> Result<Self> {
        Self::new(ConeShape::HalfSpace { normal })
    }

    pub fn wedge(beta: f64) -> Result<Self> {
        Self::new(ConeShape::Wedge2d { beta })
    }

    pub fn polyhedral(normals: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(ConeShape::Polyhedral { normals })
    }

    /// Attaches the lattice-to-metric transform `M`. Membership is unchanged;
    /// metric queries see the image cone `M K`, whose inward normals are
    /// `M^{-T} n`.
    pub fn with_transform(mut self, m: Vec<Vec<f64>>) -> Result<Self> {
        let d = self.dim;
        if m.len() != d || m.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: m.len(),
            });
        }
        let mat = DMatrix::from_fn(d, d, |i, j| m[i][j]);
        let inv = mat
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidCone("transform is singular".into()))?;
        let inv_t = inv.transpose();
        self.metric_normals = self
            .normals
            .iter()
            .map(|n| {
                let v = &inv_t * nalgebra::DVector::from_column_slice(n);
                unit(v.as_slice())
            })
            .collect();
        self.transform = Some(m);
        Ok(self)
    }

    pub fn without_transform(&self) -> Self {
        let mut c = self.clone();
        c.transform = None;
        c.metric_normals = c.normals.iter().map(|n| unit(n)).collect();
        c
    }

    pub fn shape(&self) -> &ConeShape {
        &self.shape
    }

    pub fn transform(&self) -> Option<&Vec<Vec<f64>>> {
        self.transform.as_ref()
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Inward normals in lattice coordinates.
    pub fn normals(&self) -> &[Vec<f64>] {
        &self.normals
    }

    /// Unit inward normals of the image cone in the metric frame.
    pub fn metric_normals(&self) -> &[Vec<f64>] {
        &self.metric_normals
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.dim);
        self.normals.iter().all(|n| dot(n, x) > 0.0)
    }

    pub fn contains_lattice(&self, x: &[i64]) -> bool {
        self.normals
            .iter()
            .all(|n| n.iter().zip(x).map(|(a, &b)| a * b as f64).sum::<f64>() > 0.0)
    }

    /// Maps lattice coordinates to the metric frame.
    pub fn to_metric(&self, x: &[f64]) -> Vec<f64> {
        match &self.transform {
            None => x.to_vec(),
            Some(m) => m.iter().map(|row| dot(row, x)).collect(),
        }
    }

    pub fn metric_norm(&self, x: &[f64]) -> f64 {
        norm(&self.to_metric(x))
    }

    pub fn metric_norm_lattice(&self, x: &[i64]) -> f64 {
        self.metric_norm(&to_f64(x))
    }

    /// Euclidean distance (metric frame) from `x` to the boundary.
    pub fn dist_boundary(&self, x: &[f64]) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::OutsideCone(x.to_vec()));
        }
        let y = self.to_metric(x);
        Ok(self
            .metric_normals
            .iter()
            .map(|n| dot(n, &y))
            .fold(f64::INFINITY, f64::min))
    }

    /// Closed test `dist(y, boundary) >= r |y|^(1 - rho)`; false outside the cone.
    pub fn in_k_rho(&self, y: &[f64], r: f64, rho: f64) -> bool {
        match self.dist_boundary(y) {
            Ok(dist) => dist >= r * self.metric_norm(y).powf(1.0 - rho),
            Err(_) => false,
        }
    }

    pub fn reduite(&self) -> Result<ReduiteEntry> {
        let form = match (&self.shape, &self.transform) {
            (ConeShape::Wedge2d { beta }, None) if *beta < PI => ReduiteForm::Wedge {
                ray: vec![1.0, 0.0],
                inward: vec![0.0, 1.0],
                beta: *beta,
            },
            _ => classify(&self.metric_normals, self.dim)?,
        };
        Ok(ReduiteEntry {
            exponent: form.exponent(),
            closed_form: true,
            form,
            transform: self.transform.clone(),
        })
    }

    /// Supremum of the tangent-cone exponents over the boundary of the section.
    pub fn boundary_exponent_sup(&self) -> Result<f64> {
        match classify(&self.metric_normals, self.dim)? {
            ReduiteForm::Linear { .. } | ReduiteForm::Wedge { .. } => Ok(1.0),
            ReduiteForm::Product { normals } => {
                let k = normals.len();
                Ok(if k < self.dim { k as f64 } else { (k - 1).max(1) as f64 })
            }
        }
    }

    /// Tangent cone at the boundary direction `sigma` (a unit vector in the
    /// metric frame).
    pub fn tangent_cone(&self, sigma: &[f64]) -> Result<TangentCone> {
        if sigma.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: sigma.len(),
            });
        }
        if (norm(sigma) - 1.0).abs() > BOUNDARY_TOL {
            return Err(Error::NotOnBoundary(sigma.to_vec()));
        }
        let products: Vec<f64> = self.metric_normals.iter().map(|n| dot(n, sigma)).collect();
        if products.iter().any(|&v| v < -BOUNDARY_TOL) {
            return Err(Error::NotOnBoundary(sigma.to_vec()));
        }
        let active: Vec<Vec<f64>> = self
            .metric_normals
            .iter()
            .zip(&products)
            .filter(|(_, &v)| v.abs() <= BOUNDARY_TOL)
            .map(|(n, _)| n.clone())
            .collect();
        if active.is_empty() {
            return Err(Error::NotOnBoundary(sigma.to_vec()));
        }
        let cone = ConeSpec::polyhedral(active)?;
        let exponent = cone.reduite()?.exponent;
        Ok(TangentCone {
            base: sigma.to_vec(),
            cone,
            exponent,
        })
    }

    /// A point strictly inside the cone (lattice frame), found by the
    /// perceptron iteration on the normals.
    pub fn interior_witness(&self) -> Result<Vec<f64>> {
        let units: Vec<Vec<f64>> = self.normals.iter().map(|n| unit(n)).collect();
        let mut x = vec![0.0; self.dim];
        for n in &units {
            axpy(1.0, n, &mut x);
        }
        for _ in 0..100_000 {
            match units.iter().find(|n| dot(n, &x) <= 1e-9 * norm(&x).max(1.0)) {
                None => return Ok(x),
                Some(n) => axpy(1.0, n, &mut x),
            }
        }
        Err(Error::InvalidCone("no interior point found; normals are contradictory".into()))
    }

    /// Smallest lattice vector (by norm, then lexicographically) whose
    /// addition moves `base` inside the cone.
    pub fn lattice_offset_into(&self, base: &[i64]) -> Option<Vec<i64>> {
        if self.contains_lattice(base) {
            return Some(vec![0; self.dim]);
        }
        let mut candidates = small_vectors(self.dim, 3);
        candidates.sort_by(|a, b| {
            let na: i64 = a.iter().map(|v| v * v).sum();
            let nb: i64 = b.iter().map(|v| v * v).sum();
            na.cmp(&nb).then_with(|| b.cmp(a))
        });
        candidates.into_iter().find(|o| {
            let p: Vec<i64> = base.iter().zip(o).map(|(a, b)| a + b).collect();
            self.contains_lattice(&p)
        })
    }
}

fn small_vectors(d: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (-r..=r).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out
}

fn classify(normals: &[Vec<f64>], d: usize) -> Result<ReduiteForm> {
    if normals.len() == 1 {
        return Ok(ReduiteForm::Linear {
            normal: normals[0].clone(),
        });
    }
    let orthogonal = normals.iter().enumerate().all(|(i, a)| {
        normals[i + 1..]
            .iter()
            .all(|b| dot(a, b).abs() < ORTHOGONALITY_TOL)
    });
    if orthogonal && normals.len() <= d {
        return Ok(ReduiteForm::Product {
            normals: normals.to_vec(),
        });
    }
    if d == 2 && normals.len() == 2 {
        let (n1, n2) = (&normals[0], &normals[1]);
        let beta = PI - dot(n1, n2).clamp(-1.0, 1.0).acos();
        // ray on face 1, oriented into the half-plane of face 2
        let mut ray = vec![-n1[1], n1[0]];
        if dot(&ray, n2) < 0.0 {
            ray = vec![n1[1], -n1[0]];
        }
        return Ok(ReduiteForm::Wedge {
            ray,
            inward: n1.clone(),
            beta,
        });
    }
    Err(Error::NotCatalogued(format!(
        "{} non-orthogonal normals in dimension {d}",
        normals.len()
    )))
}

/// Closed-form reduite, evaluated in the metric frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ReduiteForm {
    /// `<y, n>`, exponent 1.
    Linear { normal: Vec<f64> },
    /// `prod_i <y, n_i>` over orthonormal normals, exponent = count.
    Product { normals: Vec<Vec<f64>> },
    /// `r^(pi/beta) sin(pi phi / beta)`, `phi` the angle from `ray`.
    Wedge {
        ray: Vec<f64>,
        inward: Vec<f64>,
        beta: f64,
    },
}

impl ReduiteForm {
    pub fn exponent(&self) -> f64 {
        match self {
            ReduiteForm::Linear { .. } => 1.0,
            ReduiteForm::Product { normals } => normals.len() as f64,
            ReduiteForm::Wedge { beta, .. } => PI / beta,
        }
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        match self {
            ReduiteForm::Linear { normal } => dot(normal, y),
            ReduiteForm::Product { normals } => normals.iter().map(|n| dot(n, y)).product(),
            ReduiteForm::Wedge { ray, inward, beta } => {
                let phi = dot(inward, y).atan2(dot(ray, y));
                let r = norm(y);
                r.powf(PI / beta) * (PI * phi / beta).sin()
            }
        }
    }
}

/// Reduite `u` of a catalogued cone together with its homogeneity exponent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReduiteEntry {
    pub exponent: f64,
    pub closed_form: bool,
    pub form: ReduiteForm,
    #[serde(skip)]
    transform: Option<Vec<Vec<f64>>>,
}

impl ReduiteEntry {
    /// `u` at a lattice-frame point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.transform {
            None => self.form.eval(x),
            Some(m) => {
                let y: Vec<f64> = m.iter().map(|row| dot(row, x)).collect();
                self.form.eval(&y)
            }
        }
    }

    pub fn eval_lattice(&self, x: &[i64]) -> f64 {
        self.eval(&to_f64(x))
    }

    /// `u` at a point already in the metric frame.
    pub fn eval_metric(&self, y: &[f64]) -> f64 {
        self.form.eval(y)
    }

    /// Same reduite multiplied by `c` (for normalization checks).
    pub fn scaled(&self, c: f64) -> ScaledReduite<'_> {
        ScaledReduite { inner: self, scale: c }
    }
}

pub struct ScaledReduite<'a> {
    inner: &'a ReduiteEntry,
    scale: f64,
}

impl ScaledReduite<'_> {
    pub fn eval_lattice(&self, x: &[i64]) -> f64 {
        self.scale * self.inner.eval_lattice(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangentCone {
    /// Boundary direction in the metric frame.
    pub base: Vec<f64>,
    /// Tangent cone, expressed in the metric frame.
    pub cone: ConeSpec,
    pub exponent: f64,
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn unit(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    a.iter().map(|v| v / n).collect()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn to_f64(x: &[i64]) -> Vec<f64> {
    x.iter().map(|&v| v as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn membership() {
        let q = ConeSpec::orthant(2);
        assert!(q.contains(&[1.0, 2.0]));
        assert!(!q.contains(&[0.0, 1.0]));
        let h = ConeSpec::half_space(vec![0.0, 1.0]).unwrap();
        assert!(!h.contains(&[3.0, -1.0]));
        let w = ConeSpec::wedge(PI / 2.0).unwrap();
        assert!(w.contains_lattice(&[1, 1]));
        assert!(!w.contains_lattice(&[0, 5]));
        assert!(!w.contains_lattice(&[5, 0]));
    }

    #[test]
    fn boundary_distances() {
        assert_eq!(ConeSpec::orthant(2).dist_boundary(&[3.0, 5.0]).unwrap(), 3.0);
        let h = ConeSpec::half_space(vec![0.0, 0.0, 1.0]).unwrap();
        assert_eq!(h.dist_boundary(&[7.0, -2.0, 4.0]).unwrap(), 4.0);
        let w = ConeSpec::wedge(PI / 2.0).unwrap();
        assert!(close(w.dist_boundary(&[1.0, 1.0]).unwrap(), 1.0, 1e-15));
        assert!(matches!(
            ConeSpec::orthant(2).dist_boundary(&[-1.0, 1.0]),
            Err(Error::OutsideCone(_))
        ));
    }

    #[test]
    fn wedge_validation() {
        assert!(ConeSpec::wedge(0.0).is_err());
        assert!(ConeSpec::wedge(1.5 * PI).is_err());
        assert!(ConeSpec::wedge(2.0 * PI).is_err());
        assert!(ConeSpec::wedge(PI).is_ok());
    }

    #[test]
    fn contradictory_normals_rejected() {
        let err = ConeSpec::polyhedral(vec![vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::InvalidCone(_)));
    }

    #[test]
    fn catalog_half_space() {
        let h = ConeSpec::half_space(vec![0.0, 1.0]).unwrap();
        let r = h.reduite().unwrap();
        assert_eq!(r.exponent, 1.0);
        assert_eq!(r.eval(&[5.0, 3.0]), 3.0);
    }

    #[test]
    fn catalog_quadrant_wedge() {
        let w = ConeSpec::wedge(PI / 2.0).unwrap();
        let r = w.reduite().unwrap();
        assert!(close(r.exponent, 2.0, 1e-15));
        // r^2 sin(2 theta) = 2xy
        for (x, y) in [(1.0, 1.0), (2.0, 5.0), (7.0, 0.5)] {
            assert!(close(r.eval(&[x, y]), 2.0 * x * y, 1e-12));
        }
    }

    #[test]
    fn catalog_orthant3() {
        let r = ConeSpec::orthant(3).reduite().unwrap();
        assert_eq!(r.exponent, 3.0);
        assert_eq!(r.eval(&[2.0, 3.0, 4.0]), 24.0);
    }

    #[test]
    fn general_wedge_from_normals() {
        let beta = PI / 3.0;
        let w = ConeSpec::wedge(beta).unwrap();
        let as_poly = ConeSpec::polyhedral(w.normals().to_vec()).unwrap();
        let a = w.reduite().unwrap();
        let b = as_poly.reduite().unwrap();
        assert!(close(a.exponent, 3.0, 1e-12));
        assert!(close(b.exponent, 3.0, 1e-12));
        for p in [[2.0, 0.5], [1.0, 1.0], [3.0, 0.1]] {
            assert!(close(a.eval(&p), b.eval(&p), 1e-12));
        }
    }

    #[test]
    fn non_catalogued() {
        let c = ConeSpec::polyhedral(vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![1.0, 1.0, 1.0],
        ])
        .unwrap();
        assert!(matches!(c.reduite(), Err(Error::NotCatalogued(_))));
    }

    #[test]
    fn tangent_cones() {
        let q = ConeSpec::orthant(2).tangent_cone(&[1.0, 0.0]).unwrap();
        assert_eq!(q.exponent, 1.0);
        assert!(q.cone.contains(&[-5.0, 1.0]));
        assert!(!q.cone.contains(&[5.0, -1.0]));

        let o = ConeSpec::orthant(3).tangent_cone(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(o.exponent, 2.0);
        assert!(o.cone.contains(&[-9.0, 1.0, 1.0]));

        let h = ConeSpec::half_space(vec![0.0, 1.0]).unwrap();
        let t = h.tangent_cone(&[-1.0, 0.0]).unwrap();
        assert_eq!(t.exponent, 1.0);
        assert!(t.cone.contains(&[3.0, 2.0]));

        assert!(matches!(
            ConeSpec::orthant(2).tangent_cone(&[0.6, 0.8]),
            Err(Error::NotOnBoundary(_))
        ));
        assert!(matches!(
            ConeSpec::orthant(2).tangent_cone(&[1.0, 1.0]),
            Err(Error::NotOnBoundary(_))
        ));
    }

    #[test]
    fn k_rho_region() {
        let h = ConeSpec::half_space(vec![0.0, 1.0]).unwrap();
        assert!(h.in_k_rho(&[0.0, 100.0], 1.0, 0.5));
        let q = ConeSpec::orthant(2);
        assert!(!q.in_k_rho(&[1.0, 100.0], 1.0, 0.5));
        // |y| = 5, 5^(1/2) ... choose y with dist exactly R |y|^(1-rho): y=(4,3)? dist 3, |y|=5
        // R = 3/5^(1-rho) with rho = 0.5 gives equality
        let r = 3.0 / 5f64.sqrt();
        assert!(q.in_k_rho(&[4.0, 3.0], r, 0.5));
        assert!(!q.in_k_rho(&[4.0, 3.0], r * (1.0 + 1e-12), 0.5));
    }

    #[test]
    fn transform_maps_cone() {
        let s = 2f64.sqrt();
        let q = ConeSpec::orthant(2)
            .with_transform(vec![vec![s, 0.0], vec![0.0, s]])
            .unwrap();
        let r = q.reduite().unwrap();
        assert_eq!(r.exponent, 2.0);
        assert!(close(r.eval(&[1.0, 3.0]), 6.0, 1e-12));
        assert!(close(q.dist_boundary(&[3.0, 5.0]).unwrap(), 3.0 * s, 1e-12));
        // shear: orthant becomes a wedge of different opening
        let sheared = ConeSpec::orthant(2)
            .with_transform(vec![vec![1.0, 0.5], vec![0.0, 1.0]])
            .unwrap();
        let r = sheared.reduite().unwrap();
        assert!(r.exponent != 2.0);
        assert!(r.eval(&[1.0, 1.0]) > 0.0);
        assert!(r.eval(&[1.0, 0.0]).abs() < 1e-12);
        assert!(r.eval(&[0.0, 1.0]).abs() < 1e-12);
    }

    #[test]
    fn json_shapes() {
        let c: ConeSpec = serde_json::from_str(r#"{"variant":"orthant","d":2}"#).unwrap();
        assert_eq!(c, ConeSpec::orthant(2));
        let c: ConeSpec = serde_json::from_str(r#"{"variant":"halfspace","normal":[0,1]}"#).unwrap();
        assert_eq!(c.dimension(), 2);
        let c: ConeSpec =
            serde_json::from_str(r#"{"variant":"wedge2d","beta":1.5707963267948966}"#).unwrap();
        assert!(c.contains(&[1.0, 1.0]));
        let c: ConeSpec =
            serde_json::from_str(r#"{"variant":"polyhedral","normals":[[1,0],[0,1]]}"#).unwrap();
        assert!(c.contains(&[1.0, 1.0]));
        assert!(serde_json::from_str::<ConeSpec>(r#"{"variant":"wedge2d","beta":4.0}"#).is_err());
        let back = serde_json::to_string(&ConeSpec::orthant(3)).unwrap();
        assert_eq!(back, r#"{"variant":"orthant","d":3}"#);
    }
}
