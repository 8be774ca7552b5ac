//! Invariant checks on a finished run.

use serde::{Deserialize, Serialize};
use wildfront_core::{
    hausdorff_points, hausdorff_polylines, huygens_step, launch_directions, metric_from_spec, propagate_front,
    select_mode, spherical_wavefront, trace_wave_ray, FrontGeometry, FrontParam, GeodesicProblem, Mode, Plane,
    Point3, Polyline, Vec3, ZermeloData, KILLING_TOL,
};

use crate::build::Model;
use crate::config::{CheckKind, ConstantSet, Scenario};
use crate::fixtures;
use crate::run::{sweep_region, RunReport};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: CheckKind,
    pub passed: bool,
    /// The measured quantity the check compares against `tolerance`.
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckOutcome {
    fn new(check: CheckKind, passed: bool, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        CheckOutcome { check, passed, value, tolerance, detail: detail.into() }
    }

    fn failed(check: CheckKind, e: Error) -> Self {
        CheckOutcome::new(check, false, f64::NAN, f64::NAN, format!("error: {e}"))
    }
}

pub fn run_checks(s: &Scenario, model: &Model, report: &RunReport, which: &[CheckKind]) -> Vec<CheckOutcome> {
    which
        .iter()
        .map(|&c| {
            let r = match c {
                CheckKind::Nesting => Ok(nesting(report, &model.plane)),
                CheckKind::Drift => drift(model, report),
                CheckKind::StraightPath => Ok(straight_path(report)),
                CheckKind::Semigroup => semigroup(s, model),
                CheckKind::Envelope => envelope(s, model),
                CheckKind::Orthogonality => orthogonality(s, model),
                CheckKind::Geodesic => geodesic(s, model),
                CheckKind::Constants => constants(s, model),
            };
            r.unwrap_or_else(|e| CheckOutcome::failed(c, e))
        })
        .collect()
}

type Poly2 = Vec<[f64; 2]>;

fn closed_2d(lines: &[Polyline], plane: &Plane) -> Vec<Poly2> {
    lines.iter().filter(|l| l.closed).map(|l| l.points.iter().map(|&p| plane.to_2d(p)).collect()).collect()
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segments_cross(p: [f64; 2], q: [f64; 2], r: [f64; 2], s: [f64; 2]) -> bool {
    let (d1, d2) = (cross(r, s, p), cross(r, s, q));
    let (d3, d4) = (cross(p, q, r), cross(p, q, s));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

fn inside(polys: &[Poly2], p: [f64; 2]) -> bool {
    let mut c = false;
    for poly in polys {
        for w in poly.windows(2) {
            let (a, b) = (w[0], w[1]);
            if (a[1] > p[1]) != (b[1] > p[1]) && p[0] < a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]) {
                c = !c;
            }
        }
    }
    c
}

fn crossings(a: &[Poly2], b: &[Poly2]) -> usize {
    let mut n = 0;
    for pa in a {
        for sa in pa.windows(2) {
            let (lo, hi) = bbox(sa[0], sa[1]);
            for pb in b {
                for sb in pb.windows(2) {
                    let (lo2, hi2) = bbox(sb[0], sb[1]);
                    if lo[0] > hi2[0] || lo2[0] > hi[0] || lo[1] > hi2[1] || lo2[1] > hi[1] {
                        continue;
                    }
                    if segments_cross(sa[0], sa[1], sb[0], sb[1]) {
                        n += 1;
                    }
                }
            }
        }
    }
    n
}

fn bbox(a: [f64; 2], b: [f64; 2]) -> ([f64; 2], [f64; 2]) {
    ([a[0].min(b[0]), a[1].min(b[1])], [a[0].max(b[0]), a[1].max(b[1])])
}

/// Closed slice contours of the fronts at positive times, in plane coordinates.
pub fn slice_contours(report: &RunReport, plane: &Plane) -> Vec<(f64, Vec<Poly2>)> {
    report.fronts.iter().filter(|w| w.time > 0.0).map(|w| (w.time, closed_2d(&w.slice(plane), plane))).collect()
}

/// Every slice lies strictly inside the next one and no two slices cross.
pub fn nesting(report: &RunReport, plane: &Plane) -> CheckOutcome {
    let c = CheckKind::Nesting;
    let slices = slice_contours(report, plane);
    if slices.len() < 2 || slices.iter().any(|(_, p)| p.is_empty()) {
        let empty = slices.iter().filter(|(_, p)| p.is_empty()).count();
        return CheckOutcome::new(c, false, empty as f64, 0.0, format!("{} slices, {empty} without a closed contour", slices.len()));
    }
    let mut bad = 0;
    let mut cross_total = 0;
    for i in 0..slices.len() {
        for j in i + 1..slices.len() {
            let x = crossings(&slices[i].1, &slices[j].1);
            cross_total += x;
            let out = slices[i].1.iter().flatten().filter(|&&p| !inside(&slices[j].1, p)).count();
            if x > 0 || out > 0 {
                bad += 1;
            }
        }
    }
    CheckOutcome::new(
        c,
        bad == 0,
        bad as f64,
        0.0,
        format!("{} fronts, {bad} pairs not nested, {cross_total} crossings", slices.len()),
    )
}

/// Front centroids advance along the wind between consecutive times.
pub fn drift(model: &Model, report: &RunReport) -> Result<CheckOutcome, Error> {
    let c = CheckKind::Drift;
    let fronts: Vec<_> = report.fronts.iter().filter(|w| w.time > 0.0).collect();
    if fronts.len() < 2 {
        return Ok(CheckOutcome::new(c, false, 0.0, 0.0, "needs at least two fronts"));
    }
    let mut worst = f64::INFINITY;
    for w in fronts.windows(2) {
        let (a, b) = (w[0].centroid(), w[1].centroid());
        let k = model.schedule.segment_index(w[0].time).unwrap_or(0);
        let wind = model.data(k).wind.at(a);
        if wind.norm() == 0.0 {
            return Ok(CheckOutcome::new(c, true, 0.0, 0.0, "no wind"));
        }
        worst = worst.min((b - a).dot(wind) / wind.norm());
    }
    Ok(CheckOutcome::new(c, worst > 0.0, worst, 0.0, "smallest centroid advance along the wind"))
}

/// Constant-mode strategic paths are straight segments.
pub fn straight_path(report: &RunReport) -> CheckOutcome {
    let c = CheckKind::StraightPath;
    let tol = 1e-9;
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for r in &report.strategies {
        if r.mode != Some(Mode::Constant) || r.path.len() < 2 {
            continue;
        }
        n += 1;
        let (a, b) = (r.path[0], *r.path.last().unwrap());
        let d = b - a;
        let len = d.norm();
        for &p in &r.path {
            let t = if len > 0.0 { (p - a).dot(d) / (len * len) } else { 0.0 };
            worst = worst.max((p - (a + d * t)).norm() / len.max(1e-300));
        }
    }
    if n == 0 {
        return CheckOutcome::new(c, false, f64::NAN, tol, "no constant-mode strategic path");
    }
    CheckOutcome::new(c, worst <= tol, worst, tol, format!("{n} paths, largest relative deviation from the chord"))
}

fn cell(model: &Model) -> f64 {
    model.lattice.as_ref().map_or(0.0, |l| l.spacing())
}

/// Propagating by `h` equals propagating twice by `h/2`.
pub fn semigroup(s: &Scenario, model: &Model) -> Result<CheckOutcome, Error> {
    let seg = &model.schedule.segments()[0];
    let h = (seg.end - seg.start).min(2.0);
    let data = model.data(0);
    let direct = propagate_front(&data, &model.front, h, &s.sampling)?;
    let half = propagate_front(&data, &model.front, h / 2.0, &s.sampling)?;
    let twice = propagate_front(&data, &half.to_front(), h / 2.0, &s.sampling)?;
    let d = hausdorff_points(&direct.points, &twice.points);
    let tol = (2.0 * cell(model)).max(1e-3);
    Ok(CheckOutcome::new(CheckKind::Semigroup, d <= tol, d, tol, format!("Hausdorff distance at t = {h}")))
}

/// Huygens envelope of radius 1 against ray shooting to `t = 1`, on the slice.
pub fn envelope(s: &Scenario, model: &Model) -> Result<CheckOutcome, Error> {
    let lattice = model.lattice.as_ref().expect("validated: envelope needs a grid");
    let data = model.data(0);
    let r = 1.0_f64.min(model.schedule.segments()[0].end);
    let initial = propagate_front(&data, &model.front, 0.0, &s.sampling)?;
    let env = huygens_step(&data, &initial, r, lattice, &s.sampling)?;
    let rays = propagate_front(&data, &model.front, r, &s.sampling)?;
    let outer: Vec<Polyline> = rays.slice(&model.plane).into_iter().filter(|p| p.closed).collect();
    let got = env.slice(&model.plane);
    let tol = 2.0 * lattice.spacing();
    if outer.is_empty() || got.is_empty() {
        return Ok(CheckOutcome::new(CheckKind::Envelope, false, f64::NAN, tol, "empty slice"));
    }
    let d = hausdorff_polylines(&got, &outer);
    Ok(CheckOutcome::new(CheckKind::Envelope, d <= tol, d, tol, format!("Hausdorff distance at r = {r}")))
}

/// Sample locations on the front with their tangents.
fn front_samples(front: &FrontGeometry) -> Vec<(FrontParam, Point3, Vec<Vec3>)> {
    match front {
        FrontGeometry::Point(p) => vec![(FrontParam::Point, *p, vec![])],
        FrontGeometry::Curve(c) => {
            c.parameters(7).into_iter().map(|s| (FrontParam::Curve(s), c.point(s), vec![c.tangent(s)])).collect()
        }
        FrontGeometry::Surface(sf) => {
            let (a, b) = sf.parameters([5, 3]);
            a.iter()
                .flat_map(|&u| b.iter().map(move |&v| (u, v)))
                .map(|(u, v)| {
                    let (t1, t2) = sf.tangents(u, v);
                    (FrontParam::Surface(u, v), sf.point(u, v), vec![t1, t2])
                })
                .collect()
        }
        FrontGeometry::Sampled(sp) => {
            (0..sp.points.len()).step_by((sp.points.len() / 7).max(1)).map(|i| (FrontParam::Sample(i), sp.points[i], vec![])).collect()
        }
    }
}

/// Launch velocities are `F`-unit and `F`-orthogonal to the front.
pub fn orthogonality(s: &Scenario, model: &Model) -> Result<CheckOutcome, Error> {
    let data = model.data(0);
    let tol = 1e-8;
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for (at, p, tangents) in front_samples(&model.front) {
        let e = data.at(p)?;
        for v in launch_directions(&data, &model.front, at, &s.sampling)? {
            n += 1;
            worst = worst.max((e.f(v) - 1.0).abs());
            for &t in &tangents {
                worst = worst.max(e.orthogonality_residual(t, v)?.abs() / e.h.norm(t));
            }
        }
    }
    Ok(CheckOutcome::new(CheckKind::Orthogonality, worst <= tol, worst, tol, format!("{n} launch velocities")))
}

/// `F`-speed drift over `T = 1` and the RK4 self-convergence factor on halved steps.
pub fn geodesic(s: &Scenario, model: &Model) -> Result<CheckOutcome, Error> {
    let data = model.data(0);
    let region = sweep_region(&model.front, &data, 1.0)?;
    let mode = match s.sampling.mode {
        Some(m) => m,
        None => select_mode(&data, &region, s.sampling.killing_tol)?,
    };
    let mut all: Vec<(Point3, Vec3)> = Vec::new();
    for (at, p, _) in front_samples(&model.front) {
        all.extend(launch_directions(&data, &model.front, at, &s.sampling)?.into_iter().map(|v| (p, v)));
    }
    let step = all.len().div_ceil(12).max(1);
    let launches: Vec<(Point3, Vec3)> = all.into_iter().step_by(step).collect();
    let (drift, factor) = ray_integrity(&data, mode, &launches)?;
    let passed = drift <= 1e-5 && factor >= 8.0;
    Ok(CheckOutcome::new(
        CheckKind::Geodesic,
        passed,
        drift,
        1e-5,
        format!("{mode:?} mode, {} rays, F-speed drift {drift:.3e}, worst self-convergence factor {factor:.2}", launches.len()),
    ))
}

/// Largest `|F(γ') − 1|` at `dt = 1/1000` and the smallest ratio
/// `|x₁₆ − x₃₂| / |x₃₂ − x₆₄|` of endpoints at `dt = 1/16, 1/32, 1/64`.
/// Straight rays are exact and report an infinite factor.
pub fn ray_integrity(data: &ZermeloData, mode: Mode, launches: &[(Point3, Vec3)]) -> Result<(f64, f64), Error> {
    let mut drift: f64 = 0.0;
    let mut factor = f64::INFINITY;
    for &(p, v) in launches {
        let tr = trace_wave_ray(&GeodesicProblem::new(mode, data, p, v, 1.0))?;
        for (x, u) in tr.x.iter().zip(&tr.v) {
            drift = drift.max((data.at(*x)?.f(*u) - 1.0).abs());
        }
        let end = |n: f64| trace_wave_ray(&GeodesicProblem::new(mode, data, p, v, 1.0).with_dt(1.0 / n)).map(|t| t.end().0);
        let (a, b, c) = (end(16.0)?, end(32.0)?, end(64.0)?);
        let (e1, e2) = ((a - b).norm(), (b - c).norm());
        if e1 > 1e-13 {
            factor = factor.min(e1 / e2.max(1e-300));
        }
    }
    Ok((drift, factor))
}

/// Closed-form constants of the worked example named in `[reference]`.
pub fn constants(s: &Scenario, model: &Model) -> Result<CheckOutcome, Error> {
    let c = CheckKind::Constants;
    let r = s.reference.expect("validated: constants need a reference");
    let data = model.data(0);
    let mut notes = Vec::new();
    let mut worst: f64 = 0.0;
    let tol = 1e-9;
    match r.example {
        1 => {
            let k = fixtures::example1_constants(r.constants);
            let h = metric_from_spec(&model.spec, Point3::ZERO)?;
            let d = (*h.matrix() - fixtures::example1_metric()).max_abs();
            notes.push(format!("metric {d:.1e}"));
            worst = worst.max(d);
            let sphere = spherical_wavefront(&data, Point3::ZERO, 1.0, 512)?;
            let q = sphere.points.iter().map(|&v| (k.quadric(v) - k.quadric_rhs).abs()).fold(0.0, f64::max);
            notes.push(format!("indicatrix quadric {q:.1e}"));
            worst = worst.max(q);
            if matches!(model.front, FrontGeometry::Curve(_)) {
                let mut t: f64 = 0.0;
                for sp in [0.4, 1.3, 2.9, 4.4] {
                    for v in launch_directions(&data, &model.front, FrontParam::Curve(sp), &s.sampling)? {
                        t = t.max(k.tangency(v, sp).abs());
                    }
                }
                notes.push(format!("tangency {t:.1e}"));
                worst = worst.max(t);
            }
        }
        _ => {
            let k = fixtures::example2_constants(r.constants);
            let h = metric_from_spec(&model.spec, Point3::ZERO)?;
            let d = (*h.matrix() - wildfront_core::Mat3::diag(k.d)).max_abs();
            notes.push(format!("D {d:.1e}"));
            worst = worst.max(d);
            let kk = s.vars()?.get("k").copied().unwrap_or(fixtures::EXAMPLE2_K);
            let e = fixtures::eq2_residual(r.constants, kk);
            notes.push(format!("closed-form rays {e:.1e}"));
            worst = worst.max(e);
            let region = sweep_region(&model.front, &data, 1.0)?;
            let kr = wildfront_core::is_killing(&data.wind, &data.metric, &region, KILLING_TOL)?;
            notes.push(format!("Killing {} (relative residual {:.2e})", kr.killing, kr.max_relative));
        }
    }
    let set = match r.constants {
        ConstantSet::Printed => "printed",
        ConstantSet::Derived => "derived",
    };
    Ok(CheckOutcome::new(c, worst <= tol, worst, tol, format!("{set} constants: {}", notes.join(", "))))
}
