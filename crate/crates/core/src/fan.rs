//! Ray fans: launch data for every sample of a front, and batch tracing.

use alloc::vec::Vec;

use crate::front::{normal_plane, surface_normal, FrontGeometry, Side, TangentFrame};
use crate::geodesic::{select_mode, trace_wave_ray, GeodesicProblem, Mode, Trajectory};
use crate::indicatrix::SphereGrid;
use crate::linalg::{Point3, Vec3};
use crate::math::{cos, sin, PI, TAU};
use crate::metric::{RandersEval, ZermeloData};
use crate::propagation::{Layout, Sampling};
use crate::wind::Aabb;
use crate::{par, Error, Result};

/// One wave ray to be traced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Launch {
    pub source_index: usize,
    pub params: [f64; 2],
    pub origin: Point3,
    pub velocity: Vec3,
}

/// `ψ` samples on the circle of unit normals to a curve.
pub(crate) fn psi_values(n: usize, side: Side) -> Vec<f64> {
    match side {
        Side::Both => (0..n).map(|j| TAU * j as f64 / n as f64).collect(),
        Side::Outward | Side::Inward => (0..n).map(|j| -PI / 2.0 + PI * (j as f64 + 0.5) / n as f64).collect(),
    }
}

/// Launch velocities at a curve point with tangent `t`.
pub(crate) fn curve_velocities(
    r: &RandersEval,
    t: Vec3,
    outward: Option<Vec3>,
    psi: &[f64],
    side: Side,
) -> Result<Vec<(f64, Vec3)>> {
    let reference = match (side, outward) {
        (Side::Inward, Some(o)) => Some(-o),
        (_, o) => o,
    };
    let (e1, e2) = normal_plane(&r.h, t, reference)?;
    Ok(psi.iter().map(|&p| (p, r.w + e1 * cos(p) + e2 * sin(p))).collect())
}

/// Launch velocities at a surface point with tangents `t1, t2`.
pub(crate) fn surface_velocities(r: &RandersEval, t1: Vec3, t2: Vec3, outward: Option<Vec3>, side: Side) -> Result<Vec<Vec3>> {
    let n = surface_normal(&r.h, t1, t2, outward)?;
    Ok(match side {
        Side::Outward => alloc::vec![r.w + n],
        Side::Inward => alloc::vec![r.w - n],
        Side::Both => alloc::vec![r.w + n, r.w - n],
    })
}

/// Launch velocities `W + M s` for a point source, `M` the aligned unit frame of `h`.
pub(crate) fn point_velocities(r: &RandersEval, grid: &SphereGrid) -> Vec<((f64, f64), Vec3)> {
    let m = r.h.aligned_unit_frame();
    (0..grid.len()).map(|k| (grid.angles(k), r.w + m * grid.point(k))).collect()
}

fn frame_velocities(r: &RandersEval, frame: &TangentFrame, s: &Sampling) -> Result<Vec<([f64; 2], Vec3)>> {
    match *frame {
        TangentFrame::Velocity(v) => {
            let f = r.f(v);
            if !(f > 0.0) {
                return Err(Error::ZeroDirection);
            }
            Ok(alloc::vec![([0.0, 0.0], v / f)])
        }
        TangentFrame::Curve { tangent, outward } => {
            let side = if outward.is_none() { Side::Both } else { s.side };
            let psi = psi_values(s.psi, side);
            Ok(curve_velocities(r, tangent, outward, &psi, side)?.into_iter().map(|(p, v)| ([0.0, p], v)).collect())
        }
        TangentFrame::Surface { t1, t2, outward } => {
            Ok(surface_velocities(r, t1, t2, outward, s.side)?.into_iter().map(|v| ([0.0, 0.0], v)).collect())
        }
    }
}

/// All launches for `front`, with the parameter-grid layout of the resulting samples.
pub(crate) fn launches(data: &ZermeloData, front: &FrontGeometry, s: &Sampling) -> Result<(Vec<Launch>, Layout)> {
    let mut out = Vec::new();
    let layout = match front {
        FrontGeometry::Point(p) => {
            if s.fan.is_empty() {
                return Err(Error::EmptyFan);
            }
            let r = data.at(*p)?;
            for ((theta, phi), v) in point_velocities(&r, &s.fan) {
                out.push(Launch { source_index: 0, params: [theta, phi], origin: *p, velocity: v });
            }
            if s.fan.poles {
                Layout::Scattered
            } else {
                Layout::Grid { nu: s.fan.n_lon, nv: s.fan.n_lat, periodic_u: true, periodic_v: false }
            }
        }
        FrontGeometry::Curve(c) => {
            let params = c.parameters(s.curve);
            let side = if c.outward(params[0]).is_none() { Side::Both } else { s.side };
            let psi = psi_values(s.psi, side);
            let per_sample = par::try_map(params.len(), |i| {
                let p = c.point(params[i]);
                curve_velocities(&data.at(p)?, c.tangent(params[i]), c.outward(params[i]), &psi, side)
            })?;
            for j in 0..psi.len() {
                for (i, vs) in per_sample.iter().enumerate() {
                    let (ps, v) = vs[j];
                    out.push(Launch { source_index: i, params: [params[i], ps], origin: c.point(params[i]), velocity: v });
                }
            }
            Layout::Grid { nu: params.len(), nv: psi.len(), periodic_u: c.closed, periodic_v: side == Side::Both }
        }
        FrontGeometry::Surface(sf) => {
            let (a, b) = sf.parameters(s.surface);
            let mut both = Vec::new();
            for (j, &s2) in b.iter().enumerate() {
                for (i, &s1) in a.iter().enumerate() {
                    let p = sf.point(s1, s2);
                    let (t1, t2) = sf.tangents(s1, s2);
                    let vs = surface_velocities(&data.at(p)?, t1, t2, Some(sf.outward(s1, s2)), s.side)?;
                    let idx = i + a.len() * j;
                    out.push(Launch { source_index: idx, params: [s1, s2], origin: p, velocity: vs[0] });
                    if let Some(v) = vs.get(1) {
                        both.push(Launch { source_index: idx, params: [s1, s2], origin: p, velocity: *v });
                    }
                }
            }
            let grid = Layout::Grid { nu: a.len(), nv: b.len(), periodic_u: sf.periodic1, periodic_v: sf.periodic2 };
            if both.is_empty() {
                grid
            } else {
                out.extend(both);
                Layout::Scattered
            }
        }
        FrontGeometry::Sampled(sf) => {
            let mut multi = false;
            for (i, (p, frame)) in sf.points.iter().zip(&sf.frames).enumerate() {
                let vs = frame_velocities(&data.at(*p)?, frame, s)?;
                multi |= vs.len() != 1;
                for (extra, v) in vs {
                    let params = if extra == [0.0, 0.0] { sf.params[i] } else { [sf.params[i][0], extra[1]] };
                    out.push(Launch { source_index: i, params, origin: *p, velocity: v });
                }
            }
            if multi {
                Layout::Scattered
            } else {
                sf.layout.clone()
            }
        }
    };
    if out.is_empty() {
        return Err(Error::EmptyFan);
    }
    Ok((out, layout))
}

/// Bounding box of everything the rays can reach within `horizon`.
pub(crate) fn reach_region(data: &ZermeloData, points: &[Point3], horizon: f64) -> Result<Aabb> {
    let b = Aabb::from_points(points).ok_or(Error::EmptyFan)?;
    let speed = data.at(b.center())?.max_unit_speed();
    Ok(b.padded(horizon * speed))
}

pub(crate) fn resolve_mode(data: &ZermeloData, front: &FrontGeometry, horizon: f64, s: &Sampling) -> Result<Mode> {
    if let Some(m) = s.mode {
        return Ok(m);
    }
    if data.is_constant() {
        return Ok(Mode::Constant);
    }
    let region = reach_region(data, &front.probe_points(), horizon.max(1e-3))?;
    select_mode(data, &region, s.killing_tol)
}

pub(crate) fn step(horizon: f64, s: &Sampling) -> f64 {
    s.dt.unwrap_or(horizon / 1000.0).min(horizon.max(f64::MIN_POSITIVE))
}

pub(crate) fn trace(data: &ZermeloData, mode: Mode, l: &Launch, horizon: f64, dt: f64) -> Result<Trajectory> {
    if horizon == 0.0 {
        return Ok(Trajectory { t: alloc::vec![0.0], x: alloc::vec![l.origin], v: alloc::vec![l.velocity] });
    }
    trace_wave_ray(&GeodesicProblem::new(mode, data, l.origin, l.velocity, horizon).with_dt(dt))
}

/// States `(x, v)` of every launch at every time in `taus` (`result[i][k]` for launch `i`, time `k`).
pub(crate) fn states_at(
    data: &ZermeloData,
    mode: Mode,
    launches: &[Launch],
    taus: &[f64],
    dt: f64,
) -> Result<Vec<Vec<(Point3, Vec3)>>> {
    let horizon = taus.iter().copied().fold(0.0, f64::max);
    par::try_map(launches.len(), |i| {
        let l = &launches[i];
        if mode == Mode::Constant {
            return Ok(taus.iter().map(|&t| (l.origin + l.velocity * t, l.velocity)).collect());
        }
        let tr = trace(data, mode, l, horizon, dt)?;
        taus.iter().map(|&t| tr.sample(t)).collect()
    })
}
