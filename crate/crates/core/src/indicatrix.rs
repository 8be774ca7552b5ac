//! Ellipsoid indicatrices and the Riemannian metric they induce.
//!
//! An [`EllipsoidSpec`] describes the fire-spread ellipsoid at a point:
//! semi-axes `(a, b, c)` along the rotated coordinate axes, and Euler angles
//! `(α, β, θ)` applied extrinsically about x, then y, then z, so that
//! `P = R_z(θ) R_y(β) R_x(α)` and the metric matrix is `ℏ = Pᵀ D P` with
//! `D = diag(1/a², 1/b², 1/c²)`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{Mat3, Point3, SpdMatrix3, Vec3};
use crate::math::{cos, sin, sqrt, PI, TAU};
use crate::{Error, Result};

/// A scalar that is either constant or a smooth function of position.
#[derive(Clone)]
pub enum Param {
    Constant(f64),
    Field(Arc<dyn Fn(Point3) -> f64 + Send + Sync>),
}

impl Param {
    pub fn field(f: impl Fn(Point3) -> f64 + Send + Sync + 'static) -> Self {
        Param::Field(Arc::new(f))
    }

    #[inline]
    pub fn at(&self, p: Point3) -> f64 {
        match self {
            Param::Constant(v) => *v,
            Param::Field(f) => f(p),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Param::Constant(_))
    }
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Param::Constant(v)
    }
}

impl fmt::Debug for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Constant(v) => write!(f, "{v}"),
            Param::Field(_) => f.write_str("<field>"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EllipsoidSpec {
    pub a: Param,
    pub b: Param,
    pub c: Param,
    pub alpha: Param,
    pub beta: Param,
    pub theta: Param,
}

impl EllipsoidSpec {
    /// Axis-aligned ellipsoid with constant semi-axes.
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        EllipsoidSpec {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            alpha: 0.0.into(),
            beta: 0.0.into(),
            theta: 0.0.into(),
        }
    }

    pub fn with_angles(mut self, alpha: impl Into<Param>, beta: impl Into<Param>, theta: impl Into<Param>) -> Self {
        self.alpha = alpha.into();
        self.beta = beta.into();
        self.theta = theta.into();
        self
    }

    pub fn is_constant(&self) -> bool {
        [&self.a, &self.b, &self.c, &self.alpha, &self.beta, &self.theta]
            .iter()
            .all(|p| p.is_constant())
    }

    /// Semi-axes and rotation at `p`.
    pub fn resolve(&self, p: Point3) -> Result<([f64; 3], Mat3)> {
        let axes = [self.a.at(p), self.b.at(p), self.c.at(p)];
        if axes.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidParameter("ellipsoid semi-axes must be positive and finite"));
        }
        let (al, be, th) = (self.alpha.at(p), self.beta.at(p), self.theta.at(p));
        if !(al.is_finite() && be.is_finite() && th.is_finite()) {
            return Err(Error::InvalidParameter("ellipsoid angles must be finite"));
        }
        Ok((axes, rotation_matrix(al, be, th)))
    }

    /// `Pᵀ diag(a, b, c)`: maps the unit sphere onto the ellipsoid `{Q_h = 1}`.
    pub fn axis_frame(&self, p: Point3) -> Result<Mat3> {
        let (axes, rot) = self.resolve(p)?;
        Ok(rot.transpose() * Mat3::diag(axes))
    }
}

pub fn rot_x(a: f64) -> Mat3 {
    let (s, c) = (sin(a), cos(a));
    Mat3([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
}

pub fn rot_y(a: f64) -> Mat3 {
    let (s, c) = (sin(a), cos(a));
    Mat3([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
}

pub fn rot_z(a: f64) -> Mat3 {
    let (s, c) = (sin(a), cos(a));
    Mat3([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
}

/// `P = R_z(θ) R_y(β) R_x(α)`.
pub fn rotation_matrix(alpha: f64, beta: f64, theta: f64) -> Mat3 {
    rot_z(theta) * rot_y(beta) * rot_x(alpha)
}

/// `ℏ = Pᵀ diag(1/a², 1/b², 1/c²) P` at `p`.
pub fn metric_from_spec(spec: &EllipsoidSpec, p: Point3) -> Result<SpdMatrix3> {
    let ([a, b, c], rot) = spec.resolve(p)?;
    SpdMatrix3::from_rotation_diag(&rot, [1.0 / (a * a), 1.0 / (b * b), 1.0 / (c * c)])
}

/// `Q_h(V) = Vᵀ ℏ V`.
pub fn quadratic_eval(spec: &EllipsoidSpec, p: Point3, v: Vec3) -> Result<f64> {
    Ok(metric_from_spec(spec, p)?.quad(v))
}

/// Latitude/longitude sampling of the unit sphere.
///
/// Rings sit at `θ_i = π(i + ½)/n_lat`, so there are no pole samples unless
/// `poles` is set (then two extra points are appended). The equator belongs
/// to the grid iff `n_lat` is odd. Longitudes are `φ_j = 2πj/n_lon`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SphereGrid {
    pub n_lat: usize,
    pub n_lon: usize,
    pub poles: bool,
}

impl Default for SphereGrid {
    fn default() -> Self {
        SphereGrid { n_lat: 33, n_lon: 64, poles: false }
    }
}

impl SphereGrid {
    pub fn new(n_lat: usize, n_lon: usize) -> Self {
        SphereGrid { n_lat, n_lon, poles: false }
    }

    pub fn with_poles(mut self) -> Self {
        self.poles = true;
        self
    }

    /// A grid of exactly `n` points with an odd number of rings, so the
    /// equator and the `φ = 0` meridian are always sampled.
    pub fn with_count(n: usize) -> Self {
        let mut n_lat = (sqrt(n as f64 / 2.0) as usize).max(1);
        if n_lat % 2 == 0 {
            n_lat += 1;
        }
        let n_lon = n.div_ceil(n_lat).max(1);
        SphereGrid { n_lat, n_lon, poles: false }
    }

    pub fn len(&self) -> usize {
        self.n_lat * self.n_lon + if self.poles { 2 } else { 0 }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Angular spacing between neighbouring samples (largest of the two directions).
    pub fn resolution(&self) -> f64 {
        (PI / self.n_lat.max(1) as f64).max(TAU / self.n_lon.max(1) as f64)
    }

    /// `(θ, φ)` of sample `k` (ring-major).
    pub fn angles(&self, k: usize) -> (f64, f64) {
        let ring = self.n_lat * self.n_lon;
        if k >= ring {
            return if k == ring { (0.0, 0.0) } else { (PI, 0.0) };
        }
        let (i, j) = (k / self.n_lon, k % self.n_lon);
        (PI * (i as f64 + 0.5) / self.n_lat as f64, TAU * j as f64 / self.n_lon as f64)
    }

    pub fn point(&self, k: usize) -> Vec3 {
        let (t, p) = self.angles(k);
        sphere_point(t, p)
    }

    pub fn points(&self) -> Vec<Vec3> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }
}

#[inline]
pub fn sphere_point(theta: f64, phi: f64) -> Vec3 {
    Vec3::new(sin(theta) * cos(phi), sin(theta) * sin(phi), cos(theta))
}

/// Sampled Randers sphere `𝓘_F^τ` (translated to `center`).
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatrixSample {
    pub center: Point3,
    pub radius: f64,
    pub points: Vec<Point3>,
}

/// `n` points `p + τ(u + W)` with `u` on `{Q_h = 1}`, taken from a
/// latitude/longitude grid pushed through the ellipsoid axes.
pub fn sample_randers_indicatrix(
    spec: &EllipsoidSpec,
    wind: Vec3,
    p: Point3,
    tau: f64,
    n: usize,
) -> Result<IndicatrixSample> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidParameter("indicatrix radius must be positive"));
    }
    if n < 4 {
        return Err(Error::InvalidParameter("indicatrix sample needs at least 4 points"));
    }
    let frame = spec.axis_frame(p)?;
    let grid = SphereGrid::with_count(n);
    let points = (0..n).map(|k| p + (frame * grid.point(k) + wind) * tau).collect();
    Ok(IndicatrixSample { center: p, radius: tau, points })
}
