//! Strategic paths: the wave rays that spread farthest, or that reach a
//! target point or region first, and strategic points along them.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::fan::{self, Launch};
use crate::front::{FrontGeometry, Side};
use crate::geodesic::{Mode, Trajectory};
use crate::indicatrix::sphere_point;
use crate::linalg::{Point3, Vec3};
use crate::math::{atan2, wrap, PI, TAU};
use crate::metric::ZermeloData;
use crate::propagation::Sampling;
use crate::{par, Error, Result};

/// A target region `B`.
#[derive(Clone)]
pub enum Region {
    /// `{g ≤ 0}` for a smooth `g`.
    Implicit(Arc<dyn Fn(Point3) -> f64 + Send + Sync>),
    Ball { center: Point3, radius: f64 },
    /// `{(x − point)·normal ≥ 0}`.
    HalfSpace { point: Point3, normal: Vec3 },
    /// A triangle soup; only crossings of its surface count as contact.
    Triangles(Vec<[Point3; 3]>),
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Implicit(_) => f.write_str("Implicit(..)"),
            Region::Ball { center, radius } => f.debug_struct("Ball").field("center", center).field("radius", radius).finish(),
            Region::HalfSpace { point, normal } => {
                f.debug_struct("HalfSpace").field("point", point).field("normal", normal).finish()
            }
            Region::Triangles(t) => write!(f, "Triangles({})", t.len()),
        }
    }
}

impl Region {
    pub fn implicit(g: impl Fn(Point3) -> f64 + Send + Sync + 'static) -> Self {
        Region::Implicit(Arc::new(g))
    }

    /// Signed function, negative inside; `None` for triangle soups.
    pub fn signed(&self, p: Point3) -> Option<f64> {
        match self {
            Region::Implicit(g) => Some(g(p)),
            Region::Ball { center, radius } => Some((p - *center).norm() - radius),
            Region::HalfSpace { point, normal } => Some((*point - p).dot(*normal) / normal.norm()),
            Region::Triangles(_) => None,
        }
    }

    fn gradient(&self, p: Point3) -> Option<Vec3> {
        match self {
            Region::Ball { center, .. } => (p - *center).normalized(),
            Region::HalfSpace { normal, .. } => Some(-*normal / normal.norm()),
            Region::Implicit(g) => {
                let h = crate::wind::fd_step(p);
                let d = |a: usize| (g(p + Vec3::axis(a) * h) - g(p - Vec3::axis(a) * h)) / (2.0 * h);
                Some(Vec3::new(d(0), d(1), d(2)))
            }
            Region::Triangles(_) => None,
        }
    }

    /// Pull `x` back onto `∂B`.
    fn retract(&self, x: Point3) -> Point3 {
        match self {
            Region::Ball { center, radius } => match (x - *center).normalized() {
                Some(n) => *center + n * *radius,
                None => x,
            },
            Region::HalfSpace { point, normal } => {
                let n = *normal / normal.norm();
                x - n * (x - *point).dot(n)
            }
            Region::Implicit(g) => {
                let mut y = x;
                for _ in 0..8 {
                    let Some(gr) = self.gradient(y) else { break };
                    let n2 = gr.norm_sq();
                    if !(n2 > 0.0) {
                        break;
                    }
                    y = y - gr * (g(y) / n2);
                }
                y
            }
            Region::Triangles(_) => x,
        }
    }

    /// First fraction `s ∈ [0, 1]` where segment `a → b` enters the region.
    fn segment_hit(&self, a: Point3, b: Point3) -> Option<f64> {
        match self {
            Region::Triangles(tris) => tris
                .iter()
                .filter_map(|t| segment_triangle(a, b, t))
                .min_by(|x, y| x.total_cmp(y)),
            Region::Ball { center, radius } => {
                let d = b - a;
                let m = a - *center;
                let (qa, qb, qc) = (d.norm_sq(), 2.0 * m.dot(d), m.norm_sq() - radius * radius);
                if qc <= 0.0 {
                    return Some(0.0);
                }
                let disc = qb * qb - 4.0 * qa * qc;
                if qa == 0.0 || disc < 0.0 {
                    return None;
                }
                let s = (-qb - libm::sqrt(disc)) / (2.0 * qa);
                (0.0..=1.0).contains(&s).then_some(s)
            }
            _ => {
                if self.signed(a)? <= 0.0 {
                    return Some(0.0);
                }
                // March to bracket the entry, then bisect.
                const MARCH: usize = 256;
                let k = (1..=MARCH).find(|&k| self.signed(a.lerp(b, k as f64 / MARCH as f64)).is_some_and(|g| g <= 0.0))?;
                let (mut lo, mut hi) = ((k - 1) as f64 / MARCH as f64, k as f64 / MARCH as f64);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if self.signed(a.lerp(b, mid))? <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                Some(hi)
            }
        }
    }
}

fn segment_triangle(a: Point3, b: Point3, t: &[Point3; 3]) -> Option<f64> {
    let d = b - a;
    let (e1, e2) = (t[1] - t[0], t[2] - t[0]);
    let p = d.cross(e2);
    let det = e1.dot(p);
    if det.abs() < 1e-300 {
        return None;
    }
    let s = a - t[0];
    let u = s.dot(p) / det;
    let q = s.cross(e1);
    let v = d.dot(q) / det;
    let w = e2.dot(q) / det;
    (u >= 0.0 && v >= 0.0 && u + v <= 1.0 && (0.0..=1.0).contains(&w)).then_some(w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyOptions {
    pub sampling: Sampling,
    /// Longest ray time considered by target queries.
    pub horizon: f64,
    /// How many runner-up rays to report.
    pub runner_ups: usize,
    /// Largest accepted miss distance for point targets.
    pub tol: f64,
}

impl Default for StrategyOptions {
    fn default() -> Self {
        StrategyOptions { sampling: Sampling::default(), horizon: 10.0, runner_ups: 3, tol: 1e-6 }
    }
}

/// A ray of the launch fan with its objective value.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Candidate {
    /// Position in the launch fan.
    pub index: usize,
    pub source_index: usize,
    pub params: [f64; 2],
    pub velocity0: Vec3,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StrategicResult {
    pub ray: Trajectory,
    /// Arrival time `τ*`.
    pub tau: f64,
    /// Contact point `q*`.
    pub contact: Point3,
    pub source_index: usize,
    pub params: [f64; 2],
    pub velocity0: Vec3,
    pub mode: Mode,
    pub runner_ups: Vec<Candidate>,
}

fn candidate(i: usize, l: &Launch, score: f64) -> Candidate {
    Candidate { index: i, source_index: l.source_index, params: l.params, velocity0: l.velocity, score }
}

/// Indices ordered by score (descending if `max`), ties by index.
fn ranking(scores: &[f64], max: bool) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).filter(|&i| !scores[i].is_nan()).collect();
    let key = |i: usize| if max { -scores[i] } else { scores[i] };
    idx.sort_by(|&a, &b| key(a).total_cmp(&key(b)).then(a.cmp(&b)));
    idx
}

/// The best index, preferring the smallest index among near-ties.
fn best_with_ties(scores: &[f64], order: &[usize], max: bool) -> Option<usize> {
    let &top = order.first()?;
    let best = scores[top];
    let tol = 1e-12 * best.abs().max(1e-300);
    order.iter().copied().filter(|&i| if max { scores[i] >= best - tol } else { scores[i] <= best + tol }).min()
}

fn runner_ups(launches: &[Launch], scores: &[f64], order: &[usize], chosen: usize, k: usize) -> Vec<Candidate> {
    order
        .iter()
        .copied()
        .filter(|&i| i != chosen && scores[i].is_finite())
        .take(k)
        .map(|i| candidate(i, &launches[i], scores[i]))
        .collect()
}

/// Of all wave rays of the fan, the one that spreads farthest by time `tau`.
///
/// Constant mode scores launches by `|V|`; the other modes by `|γ(τ) − γ(0)|`.
pub fn strategic_path_all_equal(
    data: &ZermeloData,
    front: &FrontGeometry,
    tau: f64,
    opts: &StrategyOptions,
) -> Result<StrategicResult> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidParameter("strategy horizon must be positive"));
    }
    let s = &opts.sampling;
    let (launches, _) = fan::launches(data, front, s)?;
    if launches.len() < 8 {
        return Err(Error::EmptyFan);
    }
    let mode = fan::resolve_mode(data, front, tau, s)?;
    let dt = fan::step(tau, s);
    let scores: Vec<f64> = if mode == Mode::Constant {
        launches.iter().map(|l| l.velocity.norm()).collect()
    } else {
        fan::states_at(data, mode, &launches, &[tau], dt)?
            .iter()
            .zip(&launches)
            .map(|(st, l)| (st[0].0 - l.origin).norm())
            .collect()
    };
    let order = ranking(&scores, true);
    let i = best_with_ties(&scores, &order, true).ok_or(Error::EmptyFan)?;
    let l = launches[i];
    let ray = fan::trace(data, mode, &l, tau, dt)?;
    let contact = ray.end().0;
    Ok(StrategicResult {
        ray,
        tau,
        contact,
        source_index: l.source_index,
        params: l.params,
        velocity0: l.velocity,
        mode,
        runner_ups: runner_ups(&launches, &scores, &order, i, opts.runner_ups),
    })
}

/// Launch for continuous front parameters; `branch` picks the side of a two-sided surface.
fn launch_at(data: &ZermeloData, front: &FrontGeometry, params: [f64; 2], branch: usize, s: &Sampling) -> Result<Launch> {
    match front {
        FrontGeometry::Point(p) => {
            let r = data.at(*p)?;
            let v = r.w + r.h.aligned_unit_frame() * sphere_point(params[0], params[1]);
            Ok(Launch { source_index: 0, params, origin: *p, velocity: v })
        }
        FrontGeometry::Curve(c) => {
            let t = clamp_param(params[0], c.range, c.closed);
            let p = c.point(t);
            let side = if c.outward(t).is_none() { Side::Both } else { s.side };
            let vs = fan::curve_velocities(&data.at(p)?, c.tangent(t), c.outward(t), &[params[1]], side)?;
            Ok(Launch { source_index: 0, params: [t, params[1]], origin: p, velocity: vs[0].1 })
        }
        FrontGeometry::Surface(sf) => {
            let a = clamp_param(params[0], sf.range1, sf.periodic1);
            let b = clamp_param(params[1], sf.range2, sf.periodic2);
            let p = sf.point(a, b);
            let (t1, t2) = sf.tangents(a, b);
            let vs = fan::surface_velocities(&data.at(p)?, t1, t2, Some(sf.outward(a, b)), s.side)?;
            Ok(Launch { source_index: 0, params: [a, b], origin: p, velocity: vs[branch.min(vs.len() - 1)] })
        }
        FrontGeometry::Sampled(_) => Err(Error::InvalidParameter("sampled fronts have no continuous parameters")),
    }
}

fn clamp_param(x: f64, range: (f64, f64), periodic: bool) -> f64 {
    let (lo, hi) = (range.0.min(range.1), range.0.max(range.1));
    if periodic {
        let w = hi - lo;
        lo + wrap(x - lo, w)
    } else {
        x.clamp(lo, hi)
    }
}

/// Initial pattern-search steps for the continuous parameters of `front`.
fn param_steps(front: &FrontGeometry, s: &Sampling) -> Option<[f64; 2]> {
    let psi_step = |side: Side| if side == Side::Both { TAU } else { PI } / s.psi.max(1) as f64;
    match front {
        FrontGeometry::Point(_) => Some([PI / s.fan.n_lat.max(1) as f64, TAU / s.fan.n_lon.max(1) as f64]),
        FrontGeometry::Curve(c) => Some([(c.range.1 - c.range.0).abs() / s.curve.max(1) as f64, psi_step(s.side)]),
        FrontGeometry::Surface(sf) => Some([
            (sf.range1.1 - sf.range1.0).abs() / s.surface[0].max(1) as f64,
            (sf.range2.1 - sf.range2.0).abs() / s.surface[1].max(1) as f64,
        ]),
        FrontGeometry::Sampled(_) => None,
    }
}

/// Hooke–Jeeves pattern search (minimization) over two parameters.
fn pattern_search(f: impl Fn([f64; 2]) -> f64, x0: [f64; 2], f0: f64, step: [f64; 2], max_evals: usize) -> ([f64; 2], f64) {
    let (mut x, mut fx) = (x0, f0);
    let mut h = step;
    let mut evals = 0;
    let min_step = [step[0] * 1e-12, step[1] * 1e-12];
    while evals < max_evals && (h[0] > min_step[0] || h[1] > min_step[1]) {
        let mut improved = false;
        for a in 0..2 {
            if h[a] <= min_step[a] {
                continue;
            }
            for sign in [1.0, -1.0] {
                let mut y = x;
                y[a] += sign * h[a];
                let fy = f(y);
                evals += 1;
                if fy < fx {
                    x = y;
                    fx = fy;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            h = [h[0] * 0.5, h[1] * 0.5];
        }
    }
    (x, fx)
}

/// Golden-section minimization on `[a, b]`.
fn golden(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (libm::sqrt(5.0) - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Closest approach of a ray to `q`: `(miss, t)`.
fn closest_approach(ray: &Trajectory, q: Point3) -> (f64, f64) {
    let d: Vec<f64> = ray.x.iter().map(|x| (*x - q).norm()).collect();
    let k = (0..d.len()).min_by(|&a, &b| d[a].total_cmp(&d[b])).unwrap_or(0);
    let lo = ray.t[k.saturating_sub(1)];
    let hi = ray.t[(k + 1).min(ray.len() - 1)];
    let dist = |t: f64| ray.sample(t).map(|(x, _)| (x - q).norm()).unwrap_or(f64::INFINITY);
    let (t, m) = golden(dist, lo, hi);
    if m < d[k] {
        (m, t)
    } else {
        (d[k], ray.t[k])
    }
}

/// First time a ray enters `region`.
fn first_hit(ray: &Trajectory, region: &Region) -> Option<(f64, Point3)> {
    for k in 1..ray.len() {
        let (a, b) = (ray.x[k - 1], ray.x[k]);
        if let Some(s) = region.segment_hit(a, b) {
            let (t0, t1) = (ray.t[k - 1], ray.t[k]);
            if ray.len() == 2 || matches!(region, Region::Triangles(_)) {
                let t = t0 + s * (t1 - t0);
                return Some((t, a.lerp(b, s)));
            }
            // Refine on the Hermite curve rather than the chord.
            let inside = |t: f64| ray.sample(t).ok().and_then(|(x, _)| region.signed(x)).is_some_and(|g| g <= 0.0);
            let (mut lo, mut hi) = (t0, t1);
            if inside(lo) {
                return Some((lo, a));
            }
            if !inside(hi) {
                hi = t0 + s * (t1 - t0);
                if !inside(hi) {
                    continue;
                }
            }
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if inside(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Some((hi, ray.sample(hi).ok()?.0));
        }
    }
    None
}

/// `ρ(q)` for constant data: `min F(q − A(s))` over the front, with the minimizing source.
struct Nearest {
    rho: f64,
    source: Point3,
    params: [f64; 2],
    source_index: usize,
}

fn rho_constant(data: &ZermeloData, front: &FrontGeometry, q: Point3, s: &Sampling) -> Result<Nearest> {
    let f = |p: Point3| data.at(p).map(|e| e.f(q - p)).unwrap_or(f64::INFINITY);
    Ok(match front {
        FrontGeometry::Point(p) => Nearest { rho: f(*p), source: *p, params: [0.0, 0.0], source_index: 0 },
        FrontGeometry::Curve(c) => {
            let ps = c.parameters(s.curve.max(2));
            let vals: Vec<f64> = ps.iter().map(|&t| f(c.point(t))).collect();
            let k = (0..vals.len()).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
            let step = (c.range.1 - c.range.0).abs() / s.curve.max(1) as f64;
            let (lo, hi) = (ps[k] - step, ps[k] + step);
            let (t, v) = golden(|t| f(c.point(clamp_param(t, c.range, c.closed))), lo, hi);
            let t = clamp_param(t, c.range, c.closed);
            if v < vals[k] {
                Nearest { rho: v, source: c.point(t), params: [t, 0.0], source_index: k }
            } else {
                Nearest { rho: vals[k], source: c.point(ps[k]), params: [ps[k], 0.0], source_index: k }
            }
        }
        FrontGeometry::Surface(sf) => {
            let (a, b) = sf.parameters(s.surface);
            let mut best = (f64::INFINITY, [0.0, 0.0], 0);
            for (j, &y) in b.iter().enumerate() {
                for (i, &x) in a.iter().enumerate() {
                    let v = f(sf.point(x, y));
                    if v < best.0 {
                        best = (v, [x, y], i + a.len() * j);
                    }
                }
            }
            let g = |u: [f64; 2]| {
                f(sf.point(clamp_param(u[0], sf.range1, sf.periodic1), clamp_param(u[1], sf.range2, sf.periodic2)))
            };
            let steps = param_steps(front, s).unwrap();
            let (u, v) = pattern_search(g, best.1, best.0, steps, 2000);
            let u = [clamp_param(u[0], sf.range1, sf.periodic1), clamp_param(u[1], sf.range2, sf.periodic2)];
            Nearest { rho: v, source: sf.point(u[0], u[1]), params: u, source_index: best.2 }
        }
        FrontGeometry::Sampled(sf) => {
            let vals: Vec<f64> = sf.points.iter().map(|&p| f(p)).collect();
            let k = (0..vals.len()).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).ok_or(Error::EmptyFan)?;
            Nearest { rho: vals[k], source: sf.points[k], params: sf.params[k], source_index: k }
        }
    })
}

/// Launch angles of the straight ray from `n.source` to `q` in the conventions of the fan.
fn straight_params(data: &ZermeloData, front: &FrontGeometry, n: &Nearest, v: Vec3, s: &Sampling) -> Result<[f64; 2]> {
    let r = data.at(n.source)?;
    Ok(match front {
        FrontGeometry::Point(_) => {
            let m = r.h.aligned_unit_frame().inverse().ok_or(Error::SingularMetric)?;
            let u = m * (v - r.w);
            [libm::acos(u.z.clamp(-1.0, 1.0)), wrap(atan2(u.y, u.x), TAU)]
        }
        FrontGeometry::Curve(c) => {
            let t = n.params[0];
            let (e1, e2) = crate::front::normal_plane(&r.h, c.tangent(t), match (s.side, c.outward(t)) {
                (Side::Inward, Some(o)) => Some(-o),
                (_, o) => o,
            })?;
            let u = v - r.w;
            [t, atan2(r.h.inner(u, e2), r.h.inner(u, e1))]
        }
        _ => n.params,
    })
}

fn constant_result(
    data: &ZermeloData,
    front: &FrontGeometry,
    q: Point3,
    n: &Nearest,
    s: &Sampling,
    runner: Vec<Candidate>,
) -> Result<StrategicResult> {
    let d = q - n.source;
    let v = if n.rho > 0.0 { d / n.rho } else { fan::launches(data, front, s)?.0[0].velocity };
    let params = straight_params(data, front, n, v, s).unwrap_or(n.params);
    Ok(StrategicResult {
        ray: Trajectory::line(n.source, v, n.rho),
        tau: n.rho,
        contact: q,
        source_index: n.source_index,
        params,
        velocity0: v,
        mode: Mode::Constant,
        runner_ups: runner,
    })
}

/// The wave ray that reaches `q`, and the time `τ*` at which the front arrives there.
pub fn strategic_path_to_point(
    data: &ZermeloData,
    front: &FrontGeometry,
    q: Point3,
    opts: &StrategyOptions,
) -> Result<StrategicResult> {
    let s = &opts.sampling;
    let mode = fan::resolve_mode(data, front, opts.horizon, s)?;
    let (launches, _) = fan::launches(data, front, s)?;
    if mode == Mode::Constant {
        let n = rho_constant(data, front, q, s)?;
        if !(n.rho <= opts.horizon) {
            let speed = (q - n.source).norm() / n.rho;
            return Err(Error::Unreachable { miss: (n.rho - opts.horizon) * speed });
        }
        let scores: Vec<f64> = launches
            .iter()
            .map(|l| {
                let (x, t) = closest_approach(&Trajectory::line(l.origin, l.velocity, opts.horizon), q);
                x + 1e-3 * t
            })
            .collect();
        let order = ranking(&scores, false);
        let runner = order.iter().take(opts.runner_ups).map(|&i| candidate(i, &launches[i], scores[i])).collect();
        return constant_result(data, front, q, &n, s, runner);
    }

    let dt = fan::step(opts.horizon, s);
    let approach = par::try_map(launches.len(), |i| {
        Ok(closest_approach(&fan::trace(data, mode, &launches[i], opts.horizon, dt)?, q))
    })?;
    let scores: Vec<f64> = approach.iter().map(|a| a.0).collect();
    let order = ranking(&scores, false);
    let i = *order.first().ok_or(Error::EmptyFan)?;
    let mut best = launches[i];
    let (mut miss, mut t) = approach[i];

    if let Some(steps) = param_steps(front, s) {
        let branch = usize::from(matches!(front, FrontGeometry::Surface(sf) if i >= sf_count(sf, s)));
        let eval = |p: [f64; 2]| -> Option<(Launch, f64, f64)> {
            let l = launch_at(data, front, p, branch, s).ok()?;
            let ray = fan::trace(data, mode, &l, opts.horizon, dt).ok()?;
            let (m, t) = closest_approach(&ray, q);
            Some((l, m, t))
        };
        let (p, m) = pattern_search(|p| eval(p).map_or(f64::INFINITY, |e| e.1), best.params, miss, steps, 600);
        if m < miss {
            if let Some((l, m2, t2)) = eval(p) {
                best = Launch { source_index: launches[i].source_index, ..l };
                miss = m2;
                t = t2;
            }
        }
    }
    if !(miss <= opts.tol) {
        return Err(Error::Unreachable { miss });
    }
    let ray = fan::trace(data, mode, &best, t, fan::step(t, s).min(dt))?;
    Ok(StrategicResult {
        contact: ray.end().0,
        ray,
        tau: t,
        source_index: best.source_index,
        params: best.params,
        velocity0: best.velocity,
        mode,
        runner_ups: runner_ups(&launches, &scores, &order, i, opts.runner_ups),
    })
}

fn sf_count(sf: &crate::front::SurfaceFront, s: &Sampling) -> usize {
    let (a, b) = sf.parameters(s.surface);
    a.len() * b.len()
}

/// The wave ray that first reaches `region`, with the contact point and time.
pub fn strategic_path_to_region(
    data: &ZermeloData,
    front: &FrontGeometry,
    region: &Region,
    opts: &StrategyOptions,
) -> Result<StrategicResult> {
    let s = &opts.sampling;
    let (launches, _) = fan::launches(data, front, s)?;
    let mode = fan::resolve_mode(data, front, opts.horizon, s)?;

    // A front that already touches B reaches it at time zero.
    let touching = launches
        .iter()
        .enumerate()
        .find(|(_, l)| region.signed(l.origin).is_some_and(|g| g <= 0.0))
        .map(|(_, l)| *l);
    if let Some(l) = touching {
        return Ok(StrategicResult {
            ray: Trajectory::line(l.origin, l.velocity, 0.0),
            tau: 0.0,
            contact: l.origin,
            source_index: l.source_index,
            params: l.params,
            velocity0: l.velocity,
            mode,
            runner_ups: Vec::new(),
        });
    }

    let dt = fan::step(opts.horizon, s);
    let hits = par::try_map(launches.len(), |i| {
        let l = &launches[i];
        let ray = if mode == Mode::Constant {
            Trajectory::line(l.origin, l.velocity, opts.horizon)
        } else {
            fan::trace(data, mode, l, opts.horizon, dt)?
        };
        Ok(first_hit(&ray, region))
    })?;
    let scores: Vec<f64> = hits.iter().map(|h| h.map_or(f64::INFINITY, |x| x.0)).collect();
    let order = ranking(&scores, false);
    let i = *order.first().ok_or(Error::EmptyFan)?;
    let Some((mut tau, mut contact)) = hits[i] else {
        return Err(Error::Unreachable { miss: f64::INFINITY });
    };
    let mut best = launches[i];
    let runner = runner_ups(&launches, &scores, &order, i, opts.runner_ups);

    if mode == Mode::Constant && !matches!(region, Region::Triangles(_)) {
        let (q, n) = descend_on_boundary(data, front, region, contact, s)?;
        if n.rho <= tau {
            return constant_result(data, front, q, &n, s, runner);
        }
    }

    if let Some(steps) = param_steps(front, s) {
        let branch = usize::from(matches!(front, FrontGeometry::Surface(sf) if i >= sf_count(sf, s)));
        let eval = |p: [f64; 2]| -> Option<(Launch, f64, Point3)> {
            let l = launch_at(data, front, p, branch, s).ok()?;
            let ray = if mode == Mode::Constant {
                Trajectory::line(l.origin, l.velocity, opts.horizon)
            } else {
                fan::trace(data, mode, &l, opts.horizon, dt).ok()?
            };
            let (t, x) = first_hit(&ray, region)?;
            Some((l, t, x))
        };
        let (p, t) = pattern_search(|p| eval(p).map_or(f64::INFINITY, |e| e.1), best.params, tau, steps, 600);
        if t < tau {
            if let Some((l, t2, x)) = eval(p) {
                best = Launch { source_index: launches[i].source_index, ..l };
                tau = t2;
                contact = x;
            }
        }
    }
    let ray = if mode == Mode::Constant {
        Trajectory::line(best.origin, best.velocity, tau)
    } else {
        fan::trace(data, mode, &best, tau, dt.min(tau))?
    };
    Ok(StrategicResult {
        ray,
        tau,
        contact,
        source_index: best.source_index,
        params: best.params,
        velocity0: best.velocity,
        mode,
        runner_ups: runner,
    })
}

/// Minimizes `ρ` over `∂B` by projected gradient descent from `q0`.
fn descend_on_boundary(
    data: &ZermeloData,
    front: &FrontGeometry,
    region: &Region,
    q0: Point3,
    s: &Sampling,
) -> Result<(Point3, Nearest)> {
    let tangential = |q: Point3, n: &Nearest| -> Result<Vec3> {
        let g = data.at(n.source)?.gradient(q - n.source)?;
        let m = region.gradient(q).and_then(|m| m.normalized()).ok_or(Error::ZeroVector)?;
        Ok(g - m * g.dot(m))
    };
    let mut q = region.retract(q0);
    let mut n = rho_constant(data, front, q, s)?;
    let mut tg = tangential(q, &n)?;
    let mut alpha = 0.5 * n.rho.max(1e-3);
    for _ in 0..2000 {
        let tn = tg.norm();
        if !(tn > 1e-15) || !(alpha > 1e-18) {
            break;
        }
        let q2 = region.retract(q - tg * alpha);
        let n2 = rho_constant(data, front, q2, s)?;
        let tg2 = tangential(q2, &n2)?;
        let flat = (n2.rho - n.rho).abs() <= 1e-14 * n.rho.max(1.0);
        if n2.rho < n.rho || (flat && tg2.norm() < tn) {
            q = q2;
            n = n2;
            tg = tg2;
            alpha *= 1.5;
        } else {
            alpha *= 0.5;
        }
    }
    Ok((q, n))
}

/// Positions along a strategic path at deployment times.
pub fn strategic_points(result: &StrategicResult, times: &[f64]) -> Result<Vec<Point3>> {
    times.iter().map(|&t| result.ray.sample(t).map(|(x, _)| x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::front::{full_turn, CurveFront};
    use crate::indicatrix::{EllipsoidSpec, SphereGrid};
    use crate::linalg::Mat3;
    use crate::math::{cos, sin};
    use crate::metric::MetricField;
    use crate::propagation::propagate_front;
    use crate::wind::WindField;

    fn euclid(w: Vec3) -> ZermeloData {
        ZermeloData::new(MetricField::euclidean(), WindField::constant(w))
    }

    fn example1() -> ZermeloData {
        let spec = EllipsoidSpec::new(0.5, 1.0, 2.0).with_angles(PI / 6.0, 0.0, 0.0);
        ZermeloData::new(spec, WindField::constant(Vec3::new(0.0, 1.0 / 3.0, 1.0 / 6.0)))
    }

    #[test]
    fn all_equal_follows_the_wind() {
        let w = 0.3;
        let r = strategic_path_all_equal(&euclid(Vec3::new(0.0, w, 0.0)), &FrontGeometry::Point(Point3::ZERO), 1.0, &Default::default())
            .unwrap();
        assert!((r.velocity0 - Vec3::new(0.0, 1.0 + w, 0.0)).max_abs() < 1e-12);
        assert_eq!(r.runner_ups.len(), 3);
        assert!(r.runner_ups.iter().all(|c| c.score <= r.velocity0.norm()));
    }

    #[test]
    fn all_equal_ties_pick_the_first_sample() {
        let data = euclid(Vec3::ZERO);
        let opts = StrategyOptions::default();
        let r = strategic_path_all_equal(&data, &FrontGeometry::Point(Point3::ZERO), 1.0, &opts).unwrap();
        let first = fan::launches(&data, &FrontGeometry::Point(Point3::ZERO), &opts.sampling).unwrap().0[0];
        assert_eq!(r.velocity0, first.velocity);
    }

    #[test]
    fn all_equal_is_tau_independent_for_constant_wind() {
        let data = example1();
        let opts = StrategyOptions::default();
        let a: Vec<Vec3> = [1.0, 5.0, 10.0]
            .iter()
            .map(|&t| strategic_path_all_equal(&data, &FrontGeometry::Point(Point3::ZERO), t, &opts).unwrap().velocity0)
            .collect();
        assert_eq!(a[0], a[1]);
        assert_eq!(a[1], a[2]);
    }

    #[test]
    fn all_equal_rejects_small_fans() {
        let opts = StrategyOptions { sampling: Sampling { fan: SphereGrid::new(1, 4), ..Sampling::default() }, ..Default::default() };
        let r = strategic_path_all_equal(&euclid(Vec3::ZERO), &FrontGeometry::Point(Point3::ZERO), 1.0, &opts);
        assert!(matches!(r, Err(Error::EmptyFan)));
    }

    #[test]
    fn point_target_straight() {
        let r = strategic_path_to_point(&euclid(Vec3::ZERO), &FrontGeometry::Point(Point3::ZERO), Point3::new(0.0, 0.0, 2.0), &Default::default())
            .unwrap();
        assert!((r.tau - 2.0).abs() < 1e-12);
        assert!((r.velocity0 - Vec3::Z).max_abs() < 1e-12);
        let pts = strategic_points(&r, &[0.0, 1.0]).unwrap();
        assert_eq!(pts[0], Point3::ZERO);
        assert!((pts[1] - Vec3::Z).max_abs() < 1e-12);
        assert!(matches!(strategic_points(&r, &[3.0]), Err(Error::OutOfHorizon { .. })));
    }

    #[test]
    fn point_target_satisfies_the_sphere_equation() {
        let data = example1();
        let q = Point3::new(0.7, 2.0, -0.4);
        let r = strategic_path_to_point(&data, &FrontGeometry::Point(Point3::ZERO), q, &Default::default()).unwrap();
        let e = data.at(Point3::ZERO).unwrap();
        let res = e.h.quad(q / r.tau - e.w) - 1.0;
        assert!(res.abs() <= 1e-6, "{res}");
        assert!((r.contact - q).norm() < 1e-12);
    }

    #[test]
    fn point_target_round_trip_through_a_front() {
        let data = example1();
        let c = CurveFront::new(|s| Point3::new(0.25 * cos(s) * (cos(s) + 6.0), 4.0 / 13.0 * sin(s) * (3.0 - sin(s)), 0.0), full_turn(), true);
        let front = FrontGeometry::Curve(c);
        let s = Sampling { curve: 128, psi: 9, ..Sampling::default() };
        let w = propagate_front(&data, &front, 5.0, &s).unwrap();
        let q = w.points[40 + 128 * 4];
        let r = strategic_path_to_point(&data, &front, q, &StrategyOptions { sampling: s, ..Default::default() }).unwrap();
        assert!((r.tau - 5.0).abs() < 1e-3, "{}", r.tau);
    }

    #[test]
    fn point_target_in_general_mode() {
        let a = Mat3([[0.0, -0.1, 0.0], [0.1, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        let data = ZermeloData::new(MetricField::euclidean(), WindField::affine(a, Vec3::ZERO));
        let s = Sampling { fan: SphereGrid::new(9, 16), mode: Some(Mode::General), dt: Some(0.01), ..Sampling::default() };
        let opts = StrategyOptions { sampling: s.clone(), horizon: 2.0, ..Default::default() };
        let target = fan::trace(&data, Mode::General, &fan::launches(&data, &FrontGeometry::Point(Point3::ZERO), &s).unwrap().0[37], 1.3, 0.01)
            .unwrap()
            .end()
            .0;
        let r = strategic_path_to_point(&data, &FrontGeometry::Point(Point3::ZERO), target, &opts).unwrap();
        assert!((r.tau - 1.3).abs() < 1e-4, "{}", r.tau);
        assert!((r.contact - target).norm() < 1e-6);
    }

    #[test]
    fn unreachable_point() {
        let opts = StrategyOptions { horizon: 1.0, ..Default::default() };
        let r = strategic_path_to_point(&euclid(Vec3::ZERO), &FrontGeometry::Point(Point3::ZERO), Point3::new(0.0, 0.0, 2.0), &opts);
        assert!(matches!(r, Err(Error::Unreachable { .. })));
    }

    #[test]
    fn ball_region_first_contact() {
        let region = Region::Ball { center: Point3::new(0.0, 0.0, 5.0), radius: 1.0 };
        let r = strategic_path_to_region(&euclid(Vec3::ZERO), &FrontGeometry::Point(Point3::ZERO), &region, &Default::default()).unwrap();
        assert!((r.tau - 4.0).abs() <= 1e-9, "{}", r.tau);
        assert!((r.contact - Point3::new(0.0, 0.0, 4.0)).max_abs() <= 1e-9, "{:?}", r.contact);
    }

    #[test]
    fn half_space_contact_maximizes_forward_speed() {
        let w = 0.4;
        let data = euclid(Vec3::new(0.0, w, 0.0));
        let region = Region::HalfSpace { point: Point3::new(0.0, 3.0, 0.0), normal: Vec3::Y };
        let r = strategic_path_to_region(&data, &FrontGeometry::Point(Point3::ZERO), &region, &Default::default()).unwrap();
        assert!((r.tau - 3.0 / (1.0 + w)).abs() < 1e-9);
        let dense = SphereGrid::new(201, 400);
        let best_vy = (0..dense.len()).map(|k| w + dense.point(k).y).fold(f64::MIN, f64::max);
        assert!(r.velocity0.y >= best_vy - 1e-9);
    }

    #[test]
    fn implicit_and_triangle_regions() {
        let data = euclid(Vec3::ZERO);
        let sphere = Region::implicit(|p| (p - Point3::new(3.0, 0.0, 0.0)).norm() - 1.0);
        let r = strategic_path_to_region(&data, &FrontGeometry::Point(Point3::ZERO), &sphere, &Default::default()).unwrap();
        assert!((r.tau - 2.0).abs() < 1e-7);
        let tri = Region::Triangles(alloc::vec![[
            Point3::new(-5.0, -5.0, 2.0),
            Point3::new(5.0, -5.0, 2.0),
            Point3::new(0.0, 5.0, 2.0)
        ]]);
        let r = strategic_path_to_region(&data, &FrontGeometry::Point(Point3::ZERO), &tri, &Default::default()).unwrap();
        assert!((r.tau - 2.0).abs() < 1e-6);
    }

    #[test]
    fn touching_region_gives_zero() {
        let region = Region::Ball { center: Point3::new(1.0, 0.0, 0.0), radius: 0.5 };
        let c = CurveFront::new(|s| Point3::new(cos(s), sin(s), 0.0), full_turn(), true);
        let r = strategic_path_to_region(&euclid(Vec3::ZERO), &FrontGeometry::Curve(c), &region, &Default::default()).unwrap();
        assert_eq!(r.tau, 0.0);
        assert!(region.signed(r.contact).unwrap() <= 0.0);
    }

    #[test]
    fn curve_region_query_is_orthogonal() {
        let data = example1();
        let c = CurveFront::new(|s| Point3::new(cos(s), sin(s), 0.0), full_turn(), true);
        let front = FrontGeometry::Curve(c.clone());
        let region = Region::Ball { center: Point3::new(0.0, 6.0, 0.0), radius: 1.0 };
        let r = strategic_path_to_region(&data, &front, &region, &Default::default()).unwrap();
        let e = data.at(Point3::ZERO).unwrap();
        let t = c.tangent(r.params[0]);
        assert!(e.orthogonality_residual(t, r.velocity0).unwrap().abs() < 1e-6);
        assert!((e.f(r.velocity0) - 1.0).abs() < 1e-12);
        assert!(region.signed(r.contact).unwrap().abs() < 1e-9);
    }
}
