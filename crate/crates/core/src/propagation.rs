//! Wavefronts by ray shooting.

use alloc::vec::Vec;

use crate::contour::{marching_squares, Grid2};
use crate::fan::{self, Launch};
use crate::front::{FrontGeometry, FrontParam, SampledFront, Side, TangentFrame};
use crate::geodesic::Mode;
use crate::indicatrix::SphereGrid;
use crate::lattice::Plane;
use crate::linalg::{Point3, Vec3};
use crate::metric::ZermeloData;
use crate::wind::KILLING_TOL;
use crate::{Error, Result};

/// Sampling resolution and ray options.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct Sampling {
    /// Samples along a curve front.
    pub curve: usize,
    /// Samples along the two parameters of a surface front.
    pub surface: [usize; 2],
    /// Launch directions around a point source.
    pub fan: SphereGrid,
    /// Directions in the normal plane of a curve front.
    pub psi: usize,
    pub side: Side,
    /// Ray step; `horizon / 1000` when unset.
    pub dt: Option<f64>,
    /// Forces a geodesic mode instead of selecting one.
    pub mode: Option<Mode>,
    pub killing_tol: f64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            curve: 256,
            surface: [64, 32],
            fan: SphereGrid::default(),
            psi: 33,
            side: Side::Outward,
            dt: None,
            mode: None,
            killing_tol: KILLING_TOL,
        }
    }
}

/// A run of consecutive wavefront samples forming one polyline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Span {
    pub start: usize,
    pub len: usize,
    pub closed: bool,
}

/// How wavefront samples are connected.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Layout {
    #[default]
    Scattered,
    /// Sample `i + nu·j` sits at node `(i, j)` of a parameter grid.
    Grid { nu: usize, nv: usize, periodic_u: bool, periodic_v: bool },
    Polylines(Vec<Span>),
}

/// Where a wavefront sample came from.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Provenance {
    /// Index of the source sample on the initial front.
    pub source_index: usize,
    /// Front parameters and launch angle.
    pub params: [f64; 2],
    pub origin: Point3,
    pub velocity0: Vec3,
    /// Ray velocity on arrival.
    pub velocity: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Polyline {
    pub points: Vec<Point3>,
    pub closed: bool,
}

impl Polyline {
    /// Segments, including the closing one.
    pub fn segments(&self) -> impl Iterator<Item = (Point3, Point3)> + '_ {
        let n = self.points.len();
        let m = if self.closed && n > 2 { n } else { n.saturating_sub(1) };
        (0..m).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }
}

/// Sampled front at time `time`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Wavefront {
    pub time: f64,
    pub points: Vec<Point3>,
    pub provenance: Vec<Provenance>,
    pub layout: Layout,
    pub mode: Mode,
}

impl Wavefront {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn centroid(&self) -> Point3 {
        let n = self.points.len().max(1) as f64;
        self.points.iter().fold(Point3::ZERO, |a, &p| a + p) / n
    }

    /// Polylines where the front meets `plane`.
    pub fn slice(&self, plane: &Plane) -> Vec<Polyline> {
        match &self.layout {
            Layout::Scattered => Vec::new(),
            Layout::Grid { nu, nv, periodic_u, periodic_v } => {
                let d: Vec<f64> = self.points.iter().map(|&p| plane.signed_distance(p)).collect();
                let grid = Grid2 { nu: *nu, nv: *nv, periodic_u: *periodic_u, periodic_v: *periodic_v };
                marching_squares(grid, &d, 0.0)
                    .into_iter()
                    .map(|c| {
                        let mut points: Vec<Point3> =
                            c.vertices.iter().map(|x| self.points[x.a].lerp(self.points[x.b], x.t)).collect();
                        if c.closed {
                            points.push(points[0]);
                        }
                        Polyline { points, closed: c.closed }
                    })
                    .collect()
            }
            Layout::Polylines(spans) => {
                let scale = self.points.iter().map(|p| (*p - plane.point).norm()).fold(1.0, f64::max);
                spans
                    .iter()
                    .filter_map(|s| {
                        let pts = &self.points[s.start..s.start + s.len];
                        pts.iter().all(|&p| plane.signed_distance(p).abs() <= 1e-9 * scale).then(|| {
                            let mut points = pts.to_vec();
                            if s.closed && !points.is_empty() {
                                points.push(points[0]);
                            }
                            Polyline { points, closed: s.closed }
                        })
                    })
                    .collect()
            }
        }
    }

    /// Restart front: each sample continues along its arrival velocity.
    pub fn to_front(&self) -> FrontGeometry {
        FrontGeometry::Sampled(SampledFront {
            points: self.points.clone(),
            frames: self.provenance.iter().map(|p| TangentFrame::Velocity(p.velocity)).collect(),
            params: self.provenance.iter().map(|p| p.params).collect(),
            layout: self.layout.clone(),
        })
    }
}

/// Launch velocities at one location of `front`: `F`-unit, and `F`-orthogonal to it.
pub fn launch_directions(data: &ZermeloData, front: &FrontGeometry, at: FrontParam, s: &Sampling) -> Result<Vec<Vec3>> {
    let bad = Error::InvalidParameter("front parameter does not match the front kind");
    match (front, at) {
        (FrontGeometry::Point(p), FrontParam::Point) => {
            Ok(fan::point_velocities(&data.at(*p)?, &s.fan).into_iter().map(|(_, v)| v).collect())
        }
        (FrontGeometry::Curve(c), FrontParam::Curve(t)) => {
            let side = if c.outward(t).is_none() { Side::Both } else { s.side };
            let psi = fan::psi_values(s.psi, side);
            let vs = fan::curve_velocities(&data.at(c.point(t))?, c.tangent(t), c.outward(t), &psi, side)?;
            Ok(vs.into_iter().map(|(_, v)| v).collect())
        }
        (FrontGeometry::Surface(sf), FrontParam::Surface(a, b)) => {
            let (t1, t2) = sf.tangents(a, b);
            fan::surface_velocities(&data.at(sf.point(a, b))?, t1, t2, Some(sf.outward(a, b)), s.side)
        }
        (FrontGeometry::Sampled(sf), FrontParam::Sample(i)) => {
            let single = SampledFront {
                points: alloc::vec![*sf.points.get(i).ok_or(bad)?],
                frames: alloc::vec![sf.frames[i]],
                params: alloc::vec![sf.params[i]],
                layout: Layout::Scattered,
            };
            let (l, _) = fan::launches(data, &FrontGeometry::Sampled(single), s)?;
            Ok(l.into_iter().map(|l| l.velocity).collect())
        }
        _ => Err(bad),
    }
}

fn assemble(time: f64, mode: Mode, launches: &[Launch], states: &[Vec<(Point3, Vec3)>], k: usize, layout: &Layout) -> Wavefront {
    let mut points = Vec::with_capacity(launches.len());
    let mut provenance = Vec::with_capacity(launches.len());
    for (l, st) in launches.iter().zip(states) {
        let (x, v) = st[k];
        points.push(x);
        provenance.push(Provenance {
            source_index: l.source_index,
            params: l.params,
            origin: l.origin,
            velocity0: l.velocity,
            velocity: v,
        });
    }
    Wavefront { time, points, provenance, layout: layout.clone(), mode }
}

/// Fronts at each time in `taus`, tracing every ray once.
pub fn propagate_front_at(data: &ZermeloData, front: &FrontGeometry, taus: &[f64], s: &Sampling) -> Result<Vec<Wavefront>> {
    if taus.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(Error::InvalidParameter("propagation times must be finite and non-negative"));
    }
    let horizon = taus.iter().copied().fold(0.0, f64::max);
    let (launches, layout) = fan::launches(data, front, s)?;
    let mode = fan::resolve_mode(data, front, horizon, s)?;
    let states = fan::states_at(data, mode, &launches, taus, fan::step(horizon, s))?;
    Ok((0..taus.len()).map(|k| assemble(taus[k], mode, &launches, &states, k, &layout)).collect())
}

/// The front at time `tau`.
pub fn propagate_front(data: &ZermeloData, front: &FrontGeometry, tau: f64, s: &Sampling) -> Result<Wavefront> {
    Ok(propagate_front_at(data, front, &[tau], s)?.remove(0))
}

/// The `n`-sample wavefront of a point source at time `tau`.
pub fn spherical_wavefront(data: &ZermeloData, p: Point3, tau: f64, n: usize) -> Result<Wavefront> {
    if n < 4 {
        return Err(Error::InvalidParameter("wavefront sample needs at least 4 points"));
    }
    let s = Sampling { fan: SphereGrid::with_count(n), ..Sampling::default() };
    let mut w = propagate_front(data, &FrontGeometry::Point(p), tau, &s)?;
    if w.points.len() != n {
        w.points.truncate(n);
        w.provenance.truncate(n);
        w.layout = Layout::Scattered;
    }
    Ok(w)
}

/// Symmetric Hausdorff distance between point clouds.
pub fn hausdorff_points(a: &[Point3], b: &[Point3]) -> f64 {
    let one = |x: &[Point3], y: &[Point3]| {
        x.iter()
            .map(|p| y.iter().map(|q| (*p - *q).norm_sq()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    libm::sqrt(one(a, b).max(one(b, a)))
}

fn point_segment(p: Point3, a: Point3, b: Point3) -> f64 {
    let d = b - a;
    let l = d.norm_sq();
    let t = if l > 0.0 { ((p - a).dot(d) / l).clamp(0.0, 1.0) } else { 0.0 };
    (p - (a + d * t)).norm()
}

/// Symmetric Hausdorff distance between polyline sets, vertex to segment.
pub fn hausdorff_polylines(a: &[Polyline], b: &[Polyline]) -> f64 {
    let one = |x: &[Polyline], y: &[Polyline]| {
        x.iter()
            .flat_map(|l| l.points.iter())
            .map(|&p| {
                y.iter()
                    .flat_map(|l| l.segments())
                    .map(|(s, e)| point_segment(p, s, e))
                    .chain(y.iter().filter(|l| l.points.len() == 1).map(|l| (p - l.points[0]).norm()))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::front::{full_turn, CurveFront};
    use crate::indicatrix::{sample_randers_indicatrix, EllipsoidSpec};
    use crate::linalg::SpdMatrix3;
    use crate::math::{cos, sin, PI};
    use crate::metric::MetricField;
    use crate::wind::WindField;

    fn example1() -> (EllipsoidSpec, Vec3) {
        (EllipsoidSpec::new(0.5, 1.0, 2.0).with_angles(PI / 6.0, 0.0, 0.0), Vec3::new(0.0, 1.0 / 3.0, 1.0 / 6.0))
    }

    #[test]
    fn constant_point_source_is_the_indicatrix() {
        let (spec, w) = example1();
        let data = ZermeloData::new(spec.clone(), WindField::constant(w));
        let p = Point3::new(1.0, -2.0, 0.5);
        let front = spherical_wavefront(&data, p, 1.5, 500).unwrap();
        let ind = sample_randers_indicatrix(&spec, w, p, 1.5, 500).unwrap();
        assert_eq!(front.mode, Mode::Constant);
        for (a, b) in front.points.iter().zip(&ind.points) {
            assert!((*a - *b).norm() < 1e-12);
        }
        let r = data.at(p).unwrap();
        for q in &front.points {
            assert!((r.f(*q - p) - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_time_returns_sources_and_velocities_are_unit() {
        let data = ZermeloData::new(SpdMatrix3::identity(), WindField::constant(Vec3::new(0.3, 0.1, 0.0)));
        let c = CurveFront::new(|s| Point3::new(cos(s), sin(s), 0.0), full_turn(), true);
        let front = FrontGeometry::Curve(c);
        let s = Sampling { curve: 16, psi: 5, ..Sampling::default() };
        let w = propagate_front(&data, &front, 0.0, &s).unwrap();
        assert_eq!(w.len(), 80);
        let r = data.at(Point3::ZERO).unwrap();
        for (x, pr) in w.points.iter().zip(&w.provenance) {
            assert_eq!(*x, pr.origin);
            assert!((r.f(pr.velocity0) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn launches_are_orthogonal_to_a_curve() {
        let (spec, w) = example1();
        let data = ZermeloData::new(spec, WindField::constant(w));
        let c = CurveFront::new(|s| Point3::new(cos(s), sin(s), 0.3 * s), full_turn(), false);
        let t = c.tangent(1.1);
        let front = FrontGeometry::Curve(c);
        let vs = launch_directions(&data, &front, FrontParam::Curve(1.1), &Sampling::default()).unwrap();
        let r = data.at(Point3::ZERO).unwrap();
        for v in vs {
            assert!((r.f(v) - 1.0).abs() < 1e-12);
            assert!(r.orthogonality_residual(t, v).unwrap() < 1e-10);
        }
        assert!(launch_directions(&data, &front, FrontParam::Point, &Sampling::default()).is_err());
    }

    #[test]
    fn circle_front_slices_into_a_larger_circle() {
        let data = ZermeloData::new(MetricField::euclidean(), WindField::zero());
        let c = CurveFront::new(|s| Point3::new(cos(s), sin(s), 0.0), full_turn(), true);
        let s = Sampling { curve: 64, psi: 9, ..Sampling::default() };
        let w = propagate_front(&data, &FrontGeometry::Curve(c), 0.5, &s).unwrap();
        let cut = w.slice(&Plane::z(0.0));
        let outer: Vec<_> = cut.iter().filter(|l| l.closed).collect();
        assert!(!outer.is_empty());
        for l in outer {
            for p in &l.points {
                assert!((p.norm() - 1.5).abs() < 2e-3);
            }
        }
    }

    #[test]
    fn restart_continues_rays() {
        let data = ZermeloData::new(MetricField::euclidean(), WindField::constant(Vec3::new(0.2, 0.0, 0.0)));
        let p = Point3::ZERO;
        let s = Sampling { fan: SphereGrid::new(5, 8), ..Sampling::default() };
        let w1 = propagate_front(&data, &FrontGeometry::Point(p), 1.0, &s).unwrap();
        let w2 = propagate_front(&data, &w1.to_front(), 0.5, &s).unwrap();
        let w = propagate_front(&data, &FrontGeometry::Point(p), 1.5, &s).unwrap();
        assert!(hausdorff_points(&w2.points, &w.points) < 1e-12);
    }

    #[test]
    fn hausdorff_of_polylines() {
        let a = Polyline { points: alloc::vec![Point3::ZERO, Point3::X], closed: false };
        let b = Polyline { points: alloc::vec![Point3::new(0.0, 0.1, 0.0), Point3::new(1.0, 0.1, 0.0)], closed: false };
        assert!((hausdorff_polylines(std::slice::from_ref(&a), &[b]) - 0.1).abs() < 1e-15);
        assert_eq!(hausdorff_polylines(std::slice::from_ref(&a), std::slice::from_ref(&a)), 0.0);
    }
}
