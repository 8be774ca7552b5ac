//! Wave rays: unit-speed `F`-geodesics.
//!
//! Three integration modes are available. For constant data the rays are
//! straight lines `p + tV`. For a Killing wind they are flow-composed
//! `h`-geodesics `γ_F(t) = φ(t, γ_h(t))` with `γ_h'(0) = V − W(p)`. Otherwise
//! the Euler–Lagrange system of `E = F²` is integrated directly:
//!
//! ```text
//! 2 g_v(x) a = ∂_x E − (∂_x ∂_v E) v
//! ```
//!
//! with `∂_v E` in closed form and the `x`-derivatives by central differences.

use alloc::vec::Vec;

use crate::linalg::{Mat3, Point3, Vec3};
use crate::metric::{MetricField, ZermeloData};
use crate::wind::{fd_step, is_killing_at, Aabb, FlowMap, KILLING_TOL};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Mode {
    /// Constant metric and wind: straight rays.
    Constant,
    /// Killing wind: flow-composed Riemannian geodesics.
    Killing,
    /// Any wind: numerically integrated Randers geodesics.
    General,
}

/// Picks the simplest mode that is valid over `region`.
pub fn select_mode(data: &ZermeloData, region: &Aabb, tol: f64) -> Result<Mode> {
    if data.is_constant() {
        return Ok(Mode::Constant);
    }
    let report = is_killing_at(&data.wind, &data.metric, &region.grid_points(5), tol)?;
    Ok(if report.killing { Mode::Killing } else { Mode::General })
}

/// Christoffel symbols of the second kind, `Γ[i][j][k] = Γ^i_{jk}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Christoffel(pub [[[f64; 3]; 3]; 3]);

impl Christoffel {
    /// `−Γ^i_{jk} u^j u^k`.
    pub fn acceleration(&self, u: Vec3) -> Vec3 {
        let mut a = Vec3::ZERO;
        for i in 0..3 {
            let mut s = 0.0;
            for j in 0..3 {
                for k in 0..3 {
                    s += self.0[i][j][k] * u[j] * u[k];
                }
            }
            a[i] = -s;
        }
        a
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().flatten().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

/// `Γ^i_{jk} = ½ h^{il}(∂_j h_{lk} + ∂_k h_{lj} − ∂_l h_{jk})`.
pub fn christoffel(metric: &MetricField, p: Point3) -> Result<Christoffel> {
    let h = metric.at(p)?;
    let hinv = h.inverse()?;
    if metric.is_constant() {
        return Ok(Christoffel([[[0.0; 3]; 3]; 3]));
    }
    let d = fd_step(p);
    let mut dh = [Mat3::ZERO; 3];
    for (m, dm) in dh.iter_mut().enumerate() {
        let e = Vec3::axis(m) * d;
        *dm = (*metric.at(p + e)?.matrix() - *metric.at(p - e)?.matrix()) * (1.0 / (2.0 * d));
    }
    let mut first = [[[0.0; 3]; 3]; 3];
    for (l, row) in first.iter_mut().enumerate() {
        for j in 0..3 {
            for k in 0..3 {
                row[j][k] = 0.5 * (dh[j].0[l][k] + dh[k].0[l][j] - dh[l].0[j][k]);
            }
        }
    }
    let mut g = [[[0.0; 3]; 3]; 3];
    for (i, gi) in g.iter_mut().enumerate() {
        for j in 0..3 {
            for k in 0..3 {
                gi[j][k] = (0..3).map(|l| hinv.0[i][l] * first[l][j][k]).sum();
            }
        }
    }
    Ok(Christoffel(g))
}

/// Sampled curve with velocities.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub x: Vec<Point3>,
    pub v: Vec<Vec3>,
}

impl Trajectory {
    /// Straight line `p + tV` on `[0, horizon]`, stored as its two end samples.
    pub fn line(p: Point3, v: Vec3, horizon: f64) -> Self {
        Trajectory { t: alloc::vec![0.0, horizon], x: alloc::vec![p, p + v * horizon], v: alloc::vec![v, v] }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.t.last().copied().unwrap_or(0.0)
    }

    pub fn origin(&self) -> Point3 {
        self.x[0]
    }

    pub fn end(&self) -> (Point3, Vec3) {
        (*self.x.last().unwrap(), *self.v.last().unwrap())
    }

    /// Position and velocity at `t` by cubic Hermite interpolation.
    pub fn sample(&self, t: f64) -> Result<(Point3, Vec3)> {
        let horizon = self.horizon();
        let slack = 1e-12 * horizon.max(1.0);
        if self.is_empty() || !(t >= -slack && t <= horizon + slack) {
            return Err(Error::OutOfHorizon { t, horizon });
        }
        let t = t.clamp(0.0, horizon);
        let i = match self.t.binary_search_by(|s| s.total_cmp(&t)) {
            Ok(i) => return Ok((self.x[i], self.v[i])),
            Err(i) => i.clamp(1, self.len() - 1) - 1,
        };
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (p0, p1, m0, m1) = (self.x[i], self.x[i + 1], self.v[i] * h, self.v[i + 1] * h);
        let (s2, s3) = (s * s, s * s * s);
        let x = p0 * (2.0 * s3 - 3.0 * s2 + 1.0) + m0 * (s3 - 2.0 * s2 + s) + p1 * (-2.0 * s3 + 3.0 * s2) + m1 * (s3 - s2);
        let dx = (p0 * (6.0 * s2 - 6.0 * s) + m0 * (3.0 * s2 - 4.0 * s + 1.0) + p1 * (-6.0 * s2 + 6.0 * s) + m1 * (3.0 * s2 - 2.0 * s))
            / h;
        Ok((x, dx))
    }
}

/// Fixed-step RK4 for `x'' = acc(x, x')`.
pub(crate) fn rk4_second_order<A>(p: Point3, v0: Vec3, horizon: f64, steps: usize, acc: A) -> Result<Trajectory>
where
    A: Fn(Point3, Vec3) -> Result<Vec3>,
{
    let n = steps.max(1);
    let h = horizon / n as f64;
    let mut tr = Trajectory { t: Vec::with_capacity(n + 1), x: Vec::with_capacity(n + 1), v: Vec::with_capacity(n + 1) };
    let (mut x, mut v) = (p, v0);
    tr.t.push(0.0);
    tr.x.push(x);
    tr.v.push(v);
    for i in 0..n {
        let t = h * i as f64;
        let fail = |_| Error::StepFailure { t };
        let a1 = acc(x, v).map_err(fail)?;
        let (x2, v2) = (x + v * (h / 2.0), v + a1 * (h / 2.0));
        let a2 = acc(x2, v2).map_err(fail)?;
        let (x3, v3) = (x + v2 * (h / 2.0), v + a2 * (h / 2.0));
        let a3 = acc(x3, v3).map_err(fail)?;
        let (x4, v4) = (x + v3 * h, v + a3 * h);
        let a4 = acc(x4, v4).map_err(fail)?;
        x += (v + v2 * 2.0 + v3 * 2.0 + v4) * (h / 6.0);
        v += (a1 + a2 * 2.0 + a3 * 2.0 + a4) * (h / 6.0);
        if !x.is_finite() || !v.is_finite() {
            return Err(Error::StepFailure { t: t + h });
        }
        tr.t.push(if i + 1 == n { horizon } else { h * (i + 1) as f64 });
        tr.x.push(x);
        tr.v.push(v);
    }
    Ok(tr)
}

fn step_count(horizon: f64, dt: f64) -> Result<usize> {
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidParameter("horizon must be finite and non-negative"));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter("time step must be positive"));
    }
    Ok((libm::ceil(horizon / dt - 1e-9) as usize).max(1))
}

/// Riemannian geodesic `x''^i + Γ^i_{jk} x'^j x'^k = 0` by RK4 with step `≤ dt`.
pub fn integrate_h_geodesic(metric: &MetricField, p: Point3, u0: Vec3, horizon: f64, dt: f64) -> Result<Trajectory> {
    let speed = metric.at(p)?.norm(u0);
    if (speed - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnitSpeed { speed });
    }
    let n = step_count(horizon, dt)?;
    if metric.is_constant() {
        return rk4_second_order(p, u0, horizon, n, |_, _| Ok(Vec3::ZERO));
    }
    rk4_second_order(p, u0, horizon, n, |x, u| Ok(christoffel(metric, x)?.acceleration(u)))
}

/// Initial-value problem for one wave ray.
#[derive(Debug, Clone, Copy)]
pub struct GeodesicProblem<'a> {
    pub mode: Mode,
    pub data: &'a ZermeloData,
    pub p: Point3,
    /// `F`-unit initial velocity.
    pub v: Vec3,
    pub horizon: f64,
    pub dt: f64,
}

impl<'a> GeodesicProblem<'a> {
    /// Default step `horizon/1000`.
    pub fn new(mode: Mode, data: &'a ZermeloData, p: Point3, v: Vec3, horizon: f64) -> Self {
        GeodesicProblem { mode, data, p, v, horizon, dt: horizon / 1000.0 }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }
}

/// Euler–Lagrange acceleration of `E = F²` at `(x, v)`.
pub(crate) fn randers_acceleration(data: &ZermeloData, x: Point3, v: Vec3) -> Result<Vec3> {
    let r0 = data.at(x)?;
    if data.is_constant() {
        return Ok(Vec3::ZERO);
    }
    let d = fd_step(x);
    let mut de = Vec3::ZERO;
    let mut cols = [Vec3::ZERO; 3];
    for k in 0..3 {
        let e = Vec3::axis(k) * d;
        let rp = data.at(x + e)?;
        let rm = data.at(x - e)?;
        let (fp, fm) = (rp.f(v), rm.f(v));
        de[k] = (fp * fp - fm * fm) / (2.0 * d);
        let pp = rp.gradient(v)? * (2.0 * fp);
        let pm = rm.gradient(v)? * (2.0 * fm);
        cols[k] = (pp - pm) / (2.0 * d);
    }
    let mixed = Mat3::from_cols(cols[0], cols[1], cols[2]);
    let g = r0.fundamental_matrix(v)?;
    let ginv = g.inverse().ok_or(Error::SingularMetric)?;
    Ok(ginv * ((de - mixed * v) * 0.5))
}

/// Traces a wave ray on `[0, horizon]`.
pub fn trace_wave_ray(problem: &GeodesicProblem<'_>) -> Result<Trajectory> {
    let GeodesicProblem { mode, data, p, v, horizon, dt } = *problem;
    let r = data.at(p)?;
    let speed = r.f(v);
    if (speed - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnitSpeed { speed });
    }
    match mode {
        Mode::Constant => {
            step_count(horizon, dt)?;
            if !data.is_constant() {
                return Err(Error::ModeMismatch { requested: Mode::Constant, residual: f64::NAN });
            }
            Ok(Trajectory::line(p, v, horizon))
        }
        Mode::Killing => {
            let u0 = v - r.w;
            let gh = integrate_h_geodesic(&data.metric, p, u0, horizon, dt)?;
            let fm = FlowMap::new(data.wind.clone());
            let mut tr = Trajectory { t: gh.t.clone(), x: Vec::with_capacity(gh.len()), v: Vec::with_capacity(gh.len()) };
            for i in 0..gh.len() {
                let t = gh.t[i];
                let x = fm.flow(t, gh.x[i])?;
                let vel = data.wind.at(x) + fm.differential(t, gh.x[i], gh.v[i])?;
                tr.x.push(x);
                tr.v.push(vel);
            }
            let stride = (tr.len() / 10).max(1);
            let probes: Vec<Point3> = tr.x.iter().step_by(stride).copied().collect();
            let report = is_killing_at(&data.wind, &data.metric, &probes, KILLING_TOL)?;
            if !report.killing {
                return Err(Error::ModeMismatch { requested: Mode::Killing, residual: report.max_relative });
            }
            Ok(tr)
        }
        Mode::General => {
            let n = step_count(horizon, dt)?;
            rk4_second_order(p, v, horizon, n, |x, u| randers_acceleration(data, x, u))
        }
    }
}
