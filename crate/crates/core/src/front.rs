//! Initial fronts: points, parametric curves and surfaces, and sampled fronts.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{Point3, SpdMatrix3, Vec3};
use crate::math::TAU;
use crate::{Error, Result};

/// Which side of a front the fire burns into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Side {
    #[default]
    Outward,
    Inward,
    Both,
}

type CurveFn = Arc<dyn Fn(f64) -> Vec3 + Send + Sync>;
type SurfaceFn = Arc<dyn Fn(f64, f64) -> Vec3 + Send + Sync>;

/// A parametric curve `s ↦ C(s)` on `range`.
#[derive(Clone)]
pub struct CurveFront {
    f: CurveFn,
    tangent: Option<CurveFn>,
    outward: Option<CurveFn>,
    pub range: (f64, f64),
    pub closed: bool,
    centroid: Point3,
}

impl CurveFront {
    pub fn new(f: impl Fn(f64) -> Point3 + Send + Sync + 'static, range: (f64, f64), closed: bool) -> Self {
        let f: CurveFn = Arc::new(f);
        let n = 512;
        let centroid = (0..n).fold(Vec3::ZERO, |acc, i| acc + f(lerp(range, i as f64 / n as f64))) / n as f64;
        CurveFront { f, tangent: None, outward: None, range, closed, centroid }
    }

    /// Supplies `C'(s)`; otherwise central differences are used.
    pub fn with_tangent(mut self, t: impl Fn(f64) -> Vec3 + Send + Sync + 'static) -> Self {
        self.tangent = Some(Arc::new(t));
        self
    }

    /// Supplies an outward reference direction; closed curves default to `C(s) − centroid`.
    pub fn with_outward(mut self, n: impl Fn(f64) -> Vec3 + Send + Sync + 'static) -> Self {
        self.outward = Some(Arc::new(n));
        self
    }

    pub fn point(&self, s: f64) -> Point3 {
        (self.f)(s)
    }

    pub fn tangent(&self, s: f64) -> Vec3 {
        match &self.tangent {
            Some(t) => t(s),
            None => {
                let d = 1e-6 * (self.range.1 - self.range.0).abs().max(1e-3);
                (self.point(s + d) - self.point(s - d)) / (2.0 * d)
            }
        }
    }

    pub fn outward(&self, s: f64) -> Option<Vec3> {
        match &self.outward {
            Some(n) => Some(n(s)),
            None if self.closed => Some(self.point(s) - self.centroid),
            None => None,
        }
    }

    pub fn centroid(&self) -> Point3 {
        self.centroid
    }

    /// `n` parameters; a closed curve omits the duplicated end point.
    pub fn parameters(&self, n: usize) -> Vec<f64> {
        grid_1d(self.range, n, self.closed)
    }
}

impl fmt::Debug for CurveFront {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurveFront").field("range", &self.range).field("closed", &self.closed).finish_non_exhaustive()
    }
}

/// A parametric surface `(s1, s2) ↦ S(s1, s2)`.
#[derive(Clone)]
pub struct SurfaceFront {
    f: SurfaceFn,
    tangents: Option<[SurfaceFn; 2]>,
    outward: Option<SurfaceFn>,
    pub range1: (f64, f64),
    pub range2: (f64, f64),
    pub periodic1: bool,
    pub periodic2: bool,
    centroid: Point3,
}

impl SurfaceFront {
    pub fn new(
        f: impl Fn(f64, f64) -> Point3 + Send + Sync + 'static,
        range1: (f64, f64),
        range2: (f64, f64),
        periodic: [bool; 2],
    ) -> Self {
        let f: SurfaceFn = Arc::new(f);
        let n = 64;
        let mut c = Vec3::ZERO;
        for i in 0..n {
            for j in 0..n {
                c += f(lerp(range1, (i as f64 + 0.5) / n as f64), lerp(range2, (j as f64 + 0.5) / n as f64));
            }
        }
        let centroid = c / (n * n) as f64;
        SurfaceFront {
            f,
            tangents: None,
            outward: None,
            range1,
            range2,
            periodic1: periodic[0],
            periodic2: periodic[1],
            centroid,
        }
    }

    pub fn with_tangents(
        mut self,
        t1: impl Fn(f64, f64) -> Vec3 + Send + Sync + 'static,
        t2: impl Fn(f64, f64) -> Vec3 + Send + Sync + 'static,
    ) -> Self {
        self.tangents = Some([Arc::new(t1), Arc::new(t2)]);
        self
    }

    /// Outward reference field; defaults to `S − centroid`.
    pub fn with_outward(mut self, n: impl Fn(f64, f64) -> Vec3 + Send + Sync + 'static) -> Self {
        self.outward = Some(Arc::new(n));
        self
    }

    pub fn point(&self, s1: f64, s2: f64) -> Point3 {
        (self.f)(s1, s2)
    }

    pub fn tangents(&self, s1: f64, s2: f64) -> (Vec3, Vec3) {
        match &self.tangents {
            Some([a, b]) => (a(s1, s2), b(s1, s2)),
            None => {
                let d1 = 1e-6 * (self.range1.1 - self.range1.0).abs().max(1e-3);
                let d2 = 1e-6 * (self.range2.1 - self.range2.0).abs().max(1e-3);
                (
                    (self.point(s1 + d1, s2) - self.point(s1 - d1, s2)) / (2.0 * d1),
                    (self.point(s1, s2 + d2) - self.point(s1, s2 - d2)) / (2.0 * d2),
                )
            }
        }
    }

    pub fn outward(&self, s1: f64, s2: f64) -> Vec3 {
        match &self.outward {
            Some(n) => n(s1, s2),
            None => self.point(s1, s2) - self.centroid,
        }
    }

    pub fn centroid(&self) -> Point3 {
        self.centroid
    }

    pub fn parameters(&self, n: [usize; 2]) -> (Vec<f64>, Vec<f64>) {
        (grid_1d(self.range1, n[0], self.periodic1), grid_1d(self.range2, n[1], self.periodic2))
    }
}

impl fmt::Debug for SurfaceFront {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceFront")
            .field("range1", &self.range1)
            .field("range2", &self.range2)
            .field("periodic", &[self.periodic1, self.periodic2])
            .finish_non_exhaustive()
    }
}

/// Local geometry attached to a sample of a sampled front.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TangentFrame {
    /// The sample was reached by a wave ray with this velocity; rays continue along it.
    Velocity(Vec3),
    Curve { tangent: Vec3, outward: Option<Vec3> },
    Surface { t1: Vec3, t2: Vec3, outward: Option<Vec3> },
}

/// A front given by samples, typically the output of an earlier propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFront {
    pub points: Vec<Point3>,
    pub frames: Vec<TangentFrame>,
    /// Source parameters carried along for provenance.
    pub params: Vec<[f64; 2]>,
    pub layout: crate::propagation::Layout,
}

impl SampledFront {
    pub fn new(points: Vec<Point3>, frames: Vec<TangentFrame>) -> Result<Self> {
        if points.len() != frames.len() {
            return Err(Error::InvalidParameter("sampled front needs one frame per point"));
        }
        let params = (0..points.len()).map(|i| [i as f64, 0.0]).collect();
        Ok(SampledFront { points, frames, params, layout: crate::propagation::Layout::Scattered })
    }
}

#[derive(Debug, Clone)]
pub enum FrontGeometry {
    Point(Point3),
    Curve(CurveFront),
    Surface(SurfaceFront),
    Sampled(SampledFront),
}

impl FrontGeometry {
    /// Representative points, used for bounding boxes and mode selection.
    pub fn probe_points(&self) -> Vec<Point3> {
        match self {
            FrontGeometry::Point(p) => alloc::vec![*p],
            FrontGeometry::Curve(c) => c.parameters(64).into_iter().map(|s| c.point(s)).collect(),
            FrontGeometry::Surface(s) => {
                let (a, b) = s.parameters([16, 8]);
                a.iter().flat_map(|&u| b.iter().map(move |&v| (u, v))).map(|(u, v)| s.point(u, v)).collect()
            }
            FrontGeometry::Sampled(s) => s.points.clone(),
        }
    }
}

/// Location on a front.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrontParam {
    Point,
    Curve(f64),
    Surface(f64, f64),
    Sample(usize),
}

pub(crate) fn lerp(range: (f64, f64), t: f64) -> f64 {
    range.0 + (range.1 - range.0) * t
}

pub(crate) fn grid_1d(range: (f64, f64), n: usize, periodic: bool) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lerp(range, 0.5)],
        _ if periodic => (0..n).map(|i| lerp(range, i as f64 / n as f64)).collect(),
        _ => (0..n).map(|i| lerp(range, i as f64 / (n - 1) as f64)).collect(),
    }
}

/// An `h`-orthonormal pair `(e1, e2)` spanning the `h`-orthogonal complement of `t`,
/// with `e1` the projection of `reference` when one is given.
pub(crate) fn normal_plane(h: &SpdMatrix3, t: Vec3, reference: Option<Vec3>) -> Result<(Vec3, Vec3)> {
    let tt = h.quad(t);
    if !(tt > 0.0) || !t.is_finite() {
        return Err(Error::DegenerateTangent);
    }
    let project = |r: Vec3| r - t * (h.inner(r, t) / tt);
    let mut e1 = reference.and_then(|r| {
        let e = project(r);
        (h.norm(e) > 1e-9 * h.norm(r)).then_some(e)
    });
    if e1.is_none() {
        let tn = t / t.norm();
        let axis = (0..3).min_by(|&a, &b| tn[a].abs().total_cmp(&tn[b].abs())).unwrap();
        e1 = Some(project(Vec3::axis(axis)));
    }
    let e1 = e1.unwrap();
    let e1 = e1 / h.norm(e1);
    let c = t.cross(e1);
    let e2 = h.inverse()? * c;
    let e2 = e2 / h.norm(e2);
    Ok((e1, e2))
}

/// The `h`-unit normal of a surface with tangents `t1, t2`, oriented along `reference`.
pub(crate) fn surface_normal(h: &SpdMatrix3, t1: Vec3, t2: Vec3, reference: Option<Vec3>) -> Result<Vec3> {
    let c = t1.cross(t2);
    if !(c.norm() > 1e-12 * t1.norm() * t2.norm()) || !c.is_finite() {
        return Err(Error::DegenerateTangent);
    }
    let n = h.inverse()? * c;
    let n = n / h.norm(n);
    Ok(match reference {
        Some(r) if h.inner(n, r) < 0.0 => -n,
        _ => n,
    })
}

/// The parameter range `[0, 2π]`.
pub fn full_turn() -> (f64, f64) {
    (0.0, TAU)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat3;
    use crate::math::{cos, sin};

    #[test]
    fn curve_samples_and_tangents() {
        let c = CurveFront::new(|s| Point3::new(cos(s), sin(s), 0.0), full_turn(), true);
        let s = c.parameters(4);
        assert_eq!(s.len(), 4);
        assert!((s[1] - TAU / 4.0).abs() < 1e-15);
        assert!((c.tangent(0.3) - Vec3::new(-sin(0.3), cos(0.3), 0.0)).norm() < 1e-8);
        assert!(c.centroid().norm() < 1e-12);
        let o = c.outward(0.0).unwrap();
        assert!((o - Vec3::X).norm() < 1e-12);
    }

    #[test]
    fn normal_plane_is_h_orthonormal() {
        let h = SpdMatrix3::new(Mat3([[4.0, 0.5, 0.0], [0.5, 1.0, 0.2], [0.0, 0.2, 0.5]])).unwrap();
        let t = Vec3::new(0.3, 1.0, -0.2);
        let (e1, e2) = normal_plane(&h, t, Some(Vec3::X)).unwrap();
        assert!(h.inner(e1, t).abs() < 1e-14);
        assert!(h.inner(e2, t).abs() < 1e-14);
        assert!(h.inner(e1, e2).abs() < 1e-14);
        assert!((h.quad(e1) - 1.0).abs() < 1e-14 && (h.quad(e2) - 1.0).abs() < 1e-14);
        assert!(h.inner(e1, Vec3::X) > 0.0);
        assert_eq!(normal_plane(&h, Vec3::ZERO, None), Err(Error::DegenerateTangent));
    }

    #[test]
    fn surface_normal_orientation() {
        let h = SpdMatrix3::identity();
        let n = surface_normal(&h, Vec3::X, Vec3::Y, Some(-Vec3::Z)).unwrap();
        assert_eq!(n, -Vec3::Z);
        assert_eq!(surface_normal(&h, Vec3::X, Vec3::X * 2.0, None), Err(Error::DegenerateTangent));
    }
}
