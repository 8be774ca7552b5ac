//! Wind fields, their flows, and the Killing test.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{Mat3, Point3, Vec3};
use crate::math::sqrt;
use crate::metric::MetricField;
use crate::{Error, Result};

/// A time-independent wind `p ↦ W(p)`.
#[derive(Clone)]
pub enum WindField {
    Constant(Vec3),
    /// `W(p) = A p + b`; the flow is the affine exponential.
    Affine { a: Mat3, b: Vec3 },
    /// Any smooth field, optionally with its flow in closed form.
    Analytic {
        field: Arc<dyn Fn(Point3) -> Vec3 + Send + Sync>,
        flow: Option<Arc<dyn Fn(f64, Point3) -> Point3 + Send + Sync>>,
    },
    Grid(Arc<WindGrid>),
}

impl WindField {
    pub fn zero() -> Self {
        WindField::Constant(Vec3::ZERO)
    }

    pub fn constant(w: Vec3) -> Self {
        WindField::Constant(w)
    }

    pub fn affine(a: Mat3, b: Vec3) -> Self {
        WindField::Affine { a, b }
    }

    pub fn analytic(f: impl Fn(Point3) -> Vec3 + Send + Sync + 'static) -> Self {
        WindField::Analytic { field: Arc::new(f), flow: None }
    }

    /// Attaches a closed-form flow to an analytic field (ignored for other kinds).
    pub fn with_flow(self, phi: impl Fn(f64, Point3) -> Point3 + Send + Sync + 'static) -> Self {
        match self {
            WindField::Analytic { field, .. } => WindField::Analytic { field, flow: Some(Arc::new(phi)) },
            other => other,
        }
    }

    pub fn grid(g: WindGrid) -> Self {
        WindField::Grid(Arc::new(g))
    }

    #[inline]
    pub fn at(&self, p: Point3) -> Vec3 {
        match self {
            WindField::Constant(w) => *w,
            WindField::Affine { a, b } => *a * p + *b,
            WindField::Analytic { field, .. } => field(p),
            WindField::Grid(g) => g.sample(p),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            WindField::Constant(_) => true,
            WindField::Affine { a, .. } => *a == Mat3::ZERO,
            _ => false,
        }
    }

    /// Jacobian `J_ki = ∂_i W^k`, exact for constant and affine fields.
    pub fn jacobian(&self, p: Point3) -> Mat3 {
        match self {
            WindField::Constant(_) => Mat3::ZERO,
            WindField::Affine { a, .. } => *a,
            _ => {
                let d = fd_step(p);
                let cols: Vec<Vec3> =
                    (0..3).map(|i| (self.at(p + Vec3::axis(i) * d) - self.at(p - Vec3::axis(i) * d)) / (2.0 * d)).collect();
                Mat3::from_cols(cols[0], cols[1], cols[2])
            }
        }
    }
}

impl fmt::Debug for WindField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindField::Constant(w) => f.debug_tuple("Constant").field(w).finish(),
            WindField::Affine { a, b } => f.debug_struct("Affine").field("a", a).field("b", b).finish(),
            WindField::Analytic { flow, .. } => write!(f, "Analytic {{ closed_form_flow: {} }}", flow.is_some()),
            WindField::Grid(g) => write!(f, "Grid({:?})", g.dims),
        }
    }
}

pub(crate) fn fd_step(p: Point3) -> f64 {
    1e-5 * p.max_abs().max(1.0)
}

/// Wind vectors on a regular lattice, trilinearly interpolated and clamped at the edges.
#[derive(Debug, Clone, PartialEq)]
pub struct WindGrid {
    pub origin: Point3,
    pub spacing: Vec3,
    pub dims: [usize; 3],
    /// x-fastest ordering: index `i + nx (j + ny k)`.
    pub values: Vec<Vec3>,
}

impl WindGrid {
    pub fn new(origin: Point3, spacing: Vec3, dims: [usize; 3], values: Vec<Vec3>) -> Result<Self> {
        if dims.contains(&0) || values.len() != dims[0] * dims[1] * dims[2] {
            return Err(Error::InvalidParameter("wind grid dimensions do not match the values"));
        }
        for i in 0..3 {
            if dims[i] > 1 && !(spacing[i] > 0.0) {
                return Err(Error::InvalidParameter("wind grid spacing must be positive"));
            }
        }
        if !values.iter().all(|v| v.is_finite()) || !origin.is_finite() {
            return Err(Error::InvalidParameter("wind grid values must be finite"));
        }
        Ok(WindGrid { origin, spacing, dims, values })
    }

    /// Builds a grid from scattered `(point, wind)` rows that cover a full regular lattice.
    pub fn from_samples(rows: &[(Point3, Vec3)]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidParameter("wind grid is empty"));
        }
        let mut axes: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for (i, axis) in axes.iter_mut().enumerate() {
            let mut c: Vec<f64> = rows.iter().map(|(p, _)| p[i]).collect();
            c.sort_by(f64::total_cmp);
            c.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + b.abs()));
            *axis = c;
        }
        let dims = [axes[0].len(), axes[1].len(), axes[2].len()];
        if dims[0] * dims[1] * dims[2] != rows.len() {
            return Err(Error::InvalidParameter("wind grid rows do not form a full lattice"));
        }
        let mut spacing = Vec3::ZERO;
        for i in 0..3 {
            if dims[i] > 1 {
                let h = (axes[i][dims[i] - 1] - axes[i][0]) / (dims[i] - 1) as f64;
                let regular = axes[i].windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-6 * h);
                if !regular {
                    return Err(Error::InvalidParameter("wind grid spacing is not uniform"));
                }
                spacing[i] = h;
            }
        }
        let origin = Vec3::new(axes[0][0], axes[1][0], axes[2][0]);
        let mut values = alloc::vec![Vec3::ZERO; rows.len()];
        let mut seen = alloc::vec![false; rows.len()];
        for (p, w) in rows {
            let mut idx = [0usize; 3];
            for i in 0..3 {
                idx[i] = if dims[i] > 1 { libm::round((p[i] - origin[i]) / spacing[i]) as usize } else { 0 };
            }
            let k = idx[0] + dims[0] * (idx[1] + dims[1] * idx[2]);
            if seen[k] {
                return Err(Error::InvalidParameter("wind grid has duplicate nodes"));
            }
            seen[k] = true;
            values[k] = *w;
        }
        WindGrid::new(origin, spacing, dims, values)
    }

    fn node(&self, i: usize, j: usize, k: usize) -> Vec3 {
        self.values[i + self.dims[0] * (j + self.dims[1] * k)]
    }

    pub fn sample(&self, p: Point3) -> Vec3 {
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for i in 0..3 {
            let n = self.dims[i];
            if n == 1 {
                continue;
            }
            let s = ((p[i] - self.origin[i]) / self.spacing[i]).clamp(0.0, (n - 1) as f64);
            let b = (libm::floor(s) as usize).min(n - 2);
            base[i] = b;
            frac[i] = s - b as f64;
        }
        let mut out = Vec3::ZERO;
        for corner in 0..8 {
            let mut w = 1.0;
            let mut idx = [0usize; 3];
            for i in 0..3 {
                let up = (corner >> i) & 1 == 1;
                if self.dims[i] == 1 {
                    if up {
                        w = 0.0;
                    }
                    continue;
                }
                idx[i] = base[i] + up as usize;
                w *= if up { frac[i] } else { 1.0 - frac[i] };
            }
            if w != 0.0 {
                out += self.node(idx[0], idx[1], idx[2]) * w;
            }
        }
        out
    }
}

/// Axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    pub fn new(min: Point3, max: Point3) -> Self {
        Aabb { min, max }
    }

    pub fn around(p: Point3, half: f64) -> Self {
        let d = Vec3::new(half, half, half);
        Aabb { min: p - d, max: p + d }
    }

    pub fn from_points<'a>(pts: impl IntoIterator<Item = &'a Point3>) -> Option<Self> {
        let mut it = pts.into_iter();
        let first = *it.next()?;
        Some(it.fold(Aabb { min: first, max: first }, |b, p| b.include(*p)))
    }

    pub fn include(mut self, p: Point3) -> Self {
        for i in 0..3 {
            self.min[i] = self.min[i].min(p[i]);
            self.max[i] = self.max[i].max(p[i]);
        }
        self
    }

    pub fn padded(mut self, d: f64) -> Self {
        self.min -= Vec3::new(d, d, d);
        self.max += Vec3::new(d, d, d);
        self
    }

    pub fn center(&self) -> Point3 {
        (self.min + self.max) * 0.5
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn contains(&self, p: Point3) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    /// `n` samples per non-degenerate axis.
    pub fn grid_points(&self, n: usize) -> Vec<Point3> {
        let ticks = |i: usize| -> Vec<f64> {
            if self.max[i] <= self.min[i] || n < 2 {
                alloc::vec![0.5 * (self.min[i] + self.max[i])]
            } else {
                (0..n).map(|k| self.min[i] + (self.max[i] - self.min[i]) * k as f64 / (n - 1) as f64).collect()
            }
        };
        let (xs, ys, zs) = (ticks(0), ticks(1), ticks(2));
        let mut out = Vec::with_capacity(xs.len() * ys.len() * zs.len());
        for &z in &zs {
            for &y in &ys {
                for &x in &xs {
                    out.push(Vec3::new(x, y, z));
                }
            }
        }
        out
    }
}

/// Integrator settings for the flow `φ(t, p)` of a wind.
#[derive(Debug, Clone)]
pub struct FlowMap {
    pub field: WindField,
    /// Largest RK4 sub-step for fields without a closed-form flow.
    pub max_step: f64,
    pub horizon: f64,
}

impl FlowMap {
    pub fn new(field: WindField) -> Self {
        FlowMap { field, max_step: 1e-2, horizon: f64::INFINITY }
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    fn check(&self, t: f64) -> Result<()> {
        if !t.is_finite() || t.abs() > self.horizon {
            return Err(Error::FlowHorizon { t, horizon: self.horizon });
        }
        Ok(())
    }

    pub fn flow(&self, t: f64, p: Point3) -> Result<Point3> {
        self.check(t)?;
        if t == 0.0 {
            return Ok(p);
        }
        match &self.field {
            WindField::Constant(w) => Ok(p + *w * t),
            WindField::Affine { a, b } => Ok(affine_flow(a, *b, t, p)),
            WindField::Analytic { flow: Some(phi), .. } => {
                let q = phi(t, p);
                if q.is_finite() {
                    Ok(q)
                } else {
                    Err(Error::StepFailure { t })
                }
            }
            _ => self.rk4(t, p),
        }
    }

    fn rk4(&self, t: f64, p: Point3) -> Result<Point3> {
        let n = libm::ceil(t.abs() / self.max_step).max(1.0) as usize;
        let h = t / n as f64;
        let w = &self.field;
        let mut x = p;
        for i in 0..n {
            let k1 = w.at(x);
            let k2 = w.at(x + k1 * (h / 2.0));
            let k3 = w.at(x + k2 * (h / 2.0));
            let k4 = w.at(x + k3 * h);
            x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            if !x.is_finite() {
                return Err(Error::StepFailure { t: h * (i + 1) as f64 });
            }
        }
        Ok(x)
    }

    /// `dφ_t(p)·u`.
    pub fn differential(&self, t: f64, p: Point3, u: Vec3) -> Result<Vec3> {
        self.check(t)?;
        if t == 0.0 {
            return Ok(u);
        }
        match &self.field {
            WindField::Constant(_) => Ok(u),
            WindField::Affine { a, .. } => Ok(expm3(&(*a * t)) * u),
            _ => {
                let n = u.norm();
                if n == 0.0 {
                    return Ok(Vec3::ZERO);
                }
                let d = 1e-6 * p.max_abs().max(1.0);
                let e = u / n;
                let fwd = self.flow(t, p + e * d)?;
                let bwd = self.flow(t, p - e * d)?;
                Ok((fwd - bwd) * (n / (2.0 * d)))
            }
        }
    }
}

/// `φ(t, p)` with default settings.
pub fn flow(field: &WindField, t: f64, p: Point3) -> Result<Point3> {
    FlowMap::new(field.clone()).flow(t, p)
}

/// `dφ_t(p)·u` with default settings.
pub fn flow_differential(field: &WindField, t: f64, p: Point3, u: Vec3) -> Result<Vec3> {
    FlowMap::new(field.clone()).differential(t, p, u)
}

type Mat4 = [[f64; 4]; 4];

fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut m = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    m
}

/// Matrix exponential by scaling and squaring with a Taylor core.
fn expm4(a: &Mat4) -> Mat4 {
    let norm = a.iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let mut s = *a;
    s.iter_mut().flatten().for_each(|x| *x *= scale);
    let mut result = [[0.0; 4]; 4];
    let mut term = [[0.0; 4]; 4];
    for i in 0..4 {
        result[i][i] = 1.0;
        term[i][i] = 1.0;
    }
    for k in 1..=20 {
        term = mat4_mul(&term, &s);
        term.iter_mut().flatten().for_each(|x| *x /= k as f64);
        for i in 0..4 {
            for j in 0..4 {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = mat4_mul(&result, &result);
    }
    result
}

fn expm3(a: &Mat3) -> Mat3 {
    let mut m = [[0.0; 4]; 4];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a.0[i]);
    }
    let e = expm4(&m);
    Mat3([[e[0][0], e[0][1], e[0][2]], [e[1][0], e[1][1], e[1][2]], [e[2][0], e[2][1], e[2][2]]])
}

fn affine_flow(a: &Mat3, b: Vec3, t: f64, p: Point3) -> Point3 {
    let mut m = [[0.0; 4]; 4];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = a.0[i][j] * t;
        }
        m[i][3] = b[i] * t;
    }
    let e = expm4(&m);
    let x = [p.x, p.y, p.z, 1.0];
    let row = |i: usize| (0..4).map(|k| e[i][k] * x[k]).sum::<f64>();
    Vec3::new(row(0), row(1), row(2))
}

/// `(𝓛_W h)_ij = W^k ∂_k h_ij + h_kj ∂_i W^k + h_ik ∂_j W^k` by central differences.
pub fn lie_derivative_h(field: &WindField, metric: &MetricField, p: Point3) -> Result<Mat3> {
    let h = *metric.at(p)?.matrix();
    let w = field.at(p);
    let jac = field.jacobian(p);
    let transport = if metric.is_constant() {
        Mat3::ZERO
    } else {
        let d = fd_step(p);
        let mut acc = Mat3::ZERO;
        for k in 0..3 {
            if w[k] == 0.0 {
                continue;
            }
            let e = Vec3::axis(k) * d;
            let dh = (*metric.at(p + e)?.matrix() - *metric.at(p - e)?.matrix()) * (1.0 / (2.0 * d));
            acc = acc + dh * w[k];
        }
        acc
    };
    Ok((transport + jac.transpose() * h + h * jac).symmetrized())
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KillingReport {
    pub killing: bool,
    /// Largest Frobenius norm of `𝓛_W h` over the samples.
    pub max_residual: f64,
    /// Largest ratio `|𝓛_W h| / |h|`.
    pub max_relative: f64,
    pub worst_point: Point3,
}

/// Default relative Killing tolerance.
pub const KILLING_TOL: f64 = 1e-6;

/// Samples `𝓛_W h` on a 5×5×5 grid over `region`; Killing iff every sample
/// satisfies `|𝓛_W h|_F ≤ tol·|h|_F`.
pub fn is_killing(field: &WindField, metric: &MetricField, region: &Aabb, tol: f64) -> Result<KillingReport> {
    is_killing_at(field, metric, &region.grid_points(5), tol)
}

pub(crate) fn is_killing_at(field: &WindField, metric: &MetricField, points: &[Point3], tol: f64) -> Result<KillingReport> {
    let mut report = KillingReport { killing: true, max_residual: 0.0, max_relative: 0.0, worst_point: Point3::ZERO };
    if field.is_constant() && metric.is_constant() {
        return Ok(report);
    }
    for &p in points {
        let l = lie_derivative_h(field, metric, p)?.frobenius();
        let rel = l / metric.at(p)?.matrix().frobenius();
        if rel > report.max_relative {
            report.max_relative = rel;
            report.worst_point = p;
        }
        report.max_residual = report.max_residual.max(l);
    }
    report.killing = report.max_relative <= tol;
    Ok(report)
}

/// A wind that holds on `[start, end)`.
#[derive(Debug, Clone)]
pub struct WindSegment {
    pub start: f64,
    pub end: f64,
    pub wind: WindField,
}

/// Piecewise time-independent wind over a partition of `[0, horizon]`.
#[derive(Debug, Clone)]
pub struct WindSchedule {
    segments: Vec<WindSegment>,
}

impl WindSchedule {
    /// Requires contiguous, non-overlapping segments starting at 0.
    pub fn new(segments: Vec<WindSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParameter("wind schedule has no segments"));
        }
        if segments[0].start != 0.0 {
            return Err(Error::InvalidParameter("wind schedule must start at t = 0"));
        }
        for s in &segments {
            if !(s.end > s.start) || !s.end.is_finite() {
                return Err(Error::InvalidParameter("wind segment has an empty or infinite interval"));
            }
        }
        for w in segments.windows(2) {
            if w[1].start < w[0].end {
                return Err(Error::InvalidParameter("wind segments overlap"));
            }
            if w[1].start > w[0].end {
                return Err(Error::InvalidParameter("wind segments leave a gap"));
            }
        }
        Ok(WindSchedule { segments })
    }

    pub fn single(wind: WindField, horizon: f64) -> Result<Self> {
        WindSchedule::new(alloc::vec![WindSegment { start: 0.0, end: horizon, wind }])
    }

    pub fn segments(&self) -> &[WindSegment] {
        &self.segments
    }

    pub fn horizon(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.end)
    }

    /// Index of the segment active at `t` (the last one also owns its end point).
    pub fn segment_index(&self, t: f64) -> Option<usize> {
        if t < 0.0 || t > self.horizon() {
            return None;
        }
        self.segments.iter().position(|s| t < s.end).or(Some(self.segments.len() - 1))
    }
}

/// `|W|_h` at `p`, handy for navigability scans.
pub fn wind_h_norm(field: &WindField, metric: &MetricField, p: Point3) -> Result<f64> {
    let w = field.at(p);
    Ok(sqrt(metric.at(p)?.quad(w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indicatrix::{EllipsoidSpec, Param};

    fn example2_wind(k: f64) -> WindField {
        WindField::affine(Mat3([[0.0, k, 0.0], [0.0; 3], [0.0; 3]]), Vec3::ZERO)
    }

    fn example2_metric() -> MetricField {
        EllipsoidSpec::new(1.0, 0.5, 2.0).with_angles(0.0, Param::field(|p| p.y), 0.0).into()
    }

    #[test]
    fn constant_and_zero_flows() {
        let w = Vec3::new(0.1, -0.2, 0.3);
        let p = Point3::new(1.0, 2.0, 3.0);
        assert_eq!(flow(&WindField::constant(w), 2.0, p).unwrap(), p + w * 2.0);
        assert_eq!(flow(&WindField::zero(), 5.0, p).unwrap(), p);
        assert_eq!(flow_differential(&WindField::constant(w), 3.0, p, Vec3::Y).unwrap(), Vec3::Y);
    }

    #[test]
    fn example2_flow_is_a_shear() {
        let k = 0.1;
        let w = example2_wind(k);
        let p = Point3::new(0.5, 2.0, -1.0);
        let t = 3.0;
        let q = flow(&w, t, p).unwrap();
        assert!((q - Point3::new(0.5 + k * t * 2.0, 2.0, -1.0)).norm() < 1e-14);
        let d = flow_differential(&w, t, p, Vec3::Y).unwrap();
        assert!((d - Vec3::new(k * t, 1.0, 0.0)).norm() < 1e-14);
        // The same field without the closed form goes through RK4 and finite differences.
        let generic = WindField::analytic(move |p| Vec3::new(k * p.y, 0.0, 0.0));
        assert!((flow(&generic, t, p).unwrap() - q).norm() < 1e-12);
        assert!((flow_differential(&generic, t, p, Vec3::Y).unwrap() - d).norm() < 1e-8);
    }

    #[test]
    fn rotation_flow_group_property() {
        let w = WindField::analytic(|p| Vec3::new(-p.y, p.x, 0.3));
        let p = Point3::new(1.0, 0.5, 0.0);
        let a = flow(&w, 0.7, flow(&w, 0.4, p).unwrap()).unwrap();
        let b = flow(&w, 1.1, p).unwrap();
        assert!((a - b).norm() < 1e-10);
        let aff = WindField::affine(Mat3([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0; 3]]), Vec3::new(0.0, 0.0, 0.3));
        assert!((flow(&aff, 1.1, p).unwrap() - b).norm() < 1e-9);
    }

    #[test]
    fn differential_at_zero_is_identity() {
        let w = WindField::analytic(|p| Vec3::new(p.y * p.z, p.x.sin(), 0.1));
        let u = Vec3::new(0.3, -1.0, 2.0);
        assert_eq!(flow_differential(&w, 0.0, Point3::new(1.0, 2.0, 3.0), u).unwrap(), u);
    }

    #[test]
    fn horizon_is_enforced() {
        let m = FlowMap::new(WindField::zero()).with_horizon(1.0);
        assert!(matches!(m.flow(2.0, Point3::ZERO), Err(Error::FlowHorizon { .. })));
    }

    #[test]
    fn grid_wind_interpolates_and_clamps() {
        let mut rows = Vec::new();
        for k in 0..2 {
            for j in 0..3 {
                for i in 0..4 {
                    let p = Point3::new(i as f64 * 0.5, j as f64, k as f64 * 2.0);
                    rows.push((p, Vec3::new(p.x + 2.0 * p.y - p.z, 0.1, 0.0)));
                }
            }
        }
        rows.reverse();
        let g = WindGrid::from_samples(&rows).unwrap();
        assert_eq!(g.dims, [4, 3, 2]);
        let p = Point3::new(0.7, 1.3, 0.4);
        assert!((g.sample(p).x - (0.7 + 2.6 - 0.4)).abs() < 1e-12);
        let far = g.sample(Point3::new(10.0, -5.0, 1.0));
        assert!((far.x - (1.5 - 1.0)).abs() < 1e-12);
        assert!(WindGrid::from_samples(&rows[1..]).is_err());
    }

    #[test]
    fn lie_derivative_examples() {
        let e = MetricField::euclidean();
        let l = lie_derivative_h(&WindField::constant(Vec3::X), &e, Point3::new(1.0, 2.0, 3.0)).unwrap();
        assert_eq!(l, Mat3::ZERO);
        let k = 0.7;
        let rot = WindField::analytic(move |p| Vec3::new(-p.y * k, p.x * k, 0.0));
        let l = lie_derivative_h(&rot, &e, Point3::new(1.0, -2.0, 0.5)).unwrap();
        assert!(l.max_abs() < 1e-8);
    }

    #[test]
    fn example2_wind_is_not_killing() {
        let k = 0.1;
        let m = example2_metric();
        let p = Point3::new(0.3, 0.8, -0.2);
        let l = lie_derivative_h(&example2_wind(k), &m, p).unwrap();
        // Only the shear term survives: (𝓛_W h)_xy = k h_xx.
        let hxx = m.at(p).unwrap().matrix().0[0][0];
        assert!((l.0[0][1] - k * hxx).abs() < 1e-9);
        let r = is_killing(&example2_wind(k), &m, &Aabb::around(Point3::ZERO, 1.0), KILLING_TOL).unwrap();
        assert!(!r.killing);
        assert!(r.max_relative > 1e-2);
        let r = is_killing(&WindField::constant(Vec3::new(k, 0.0, 0.0)), &m, &Aabb::around(Point3::ZERO, 1.0), KILLING_TOL)
            .unwrap();
        assert!(r.killing, "{r:?}");
    }

    #[test]
    fn schedule_validation() {
        let seg = |a: f64, b: f64| WindSegment { start: a, end: b, wind: WindField::zero() };
        assert!(WindSchedule::new(alloc::vec![seg(0.0, 1.0), seg(1.0, 2.0)]).is_ok());
        assert!(WindSchedule::new(alloc::vec![seg(0.0, 1.5), seg(1.0, 2.0)]).is_err());
        assert!(WindSchedule::new(alloc::vec![seg(0.0, 1.0), seg(1.5, 2.0)]).is_err());
        let s = WindSchedule::new(alloc::vec![seg(0.0, 1.0), seg(1.0, 2.0)]).unwrap();
        assert_eq!(s.segment_index(1.0), Some(1));
        assert_eq!(s.segment_index(2.0), Some(1));
        assert_eq!(s.segment_index(2.5), None);
    }
}
