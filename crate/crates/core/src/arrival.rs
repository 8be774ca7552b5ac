//! Arrival-time fields `ρ`: the Randers distance from the initial front, on a lattice.

use alloc::vec::Vec;

use crate::contour::{marching_squares, Grid2};
use crate::fan;
use crate::front::FrontGeometry;
use crate::geodesic::Mode;
use crate::lattice::Lattice;
use crate::linalg::Point3;
use crate::metric::{RandersEval, ZermeloData};
use crate::propagation::{Polyline, Sampling};
use crate::{par, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalField {
    pub lattice: Lattice,
    /// `ρ` per node; `INFINITY` beyond the horizon.
    pub values: Vec<f64>,
    pub horizon: f64,
    /// Nodes nearest to a front sample, pinned to `ρ = 0`.
    pub sources: Vec<bool>,
    pub mode: Mode,
}

/// Outcome of the discrete Lipschitz test `ρ(b) − ρ(a) ≤ F_a(b − a)` on lattice edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzReport {
    pub edges: usize,
    pub violations: usize,
    pub worst_excess: f64,
}

impl ArrivalField {
    pub fn value(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    /// Multilinear interpolation; `None` outside the lattice. Planar lattices ignore the normal offset.
    pub fn interpolate(&self, p: Point3) -> Option<f64> {
        let c = self.lattice.coords(p);
        let dims = self.lattice.dims;
        let axes = if self.lattice.is_planar() { 2 } else { 3 };
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for a in 0..axes {
            let n = (dims[a] - 1) as f64;
            if !(c[a] >= -1e-12 && c[a] <= n + 1e-12) {
                return None;
            }
            let x = c[a].clamp(0.0, n);
            let i = (libm::floor(x) as usize).min(dims[a] - 2);
            base[a] = i;
            frac[a] = x - i as f64;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << axes) {
            let mut w = 1.0;
            let mut ijk = base;
            for a in 0..axes {
                if corner >> a & 1 == 1 {
                    ijk[a] += 1;
                    w *= frac[a];
                } else {
                    w *= 1.0 - frac[a];
                }
            }
            if w > 0.0 {
                acc += w * self.values[self.lattice.index(ijk[0], ijk[1], ijk[2])];
            }
        }
        Some(acc)
    }

    /// Closed and open contours `ρ = τ` of a planar field.
    pub fn level_set(&self, tau: f64) -> Vec<Polyline> {
        if !self.lattice.is_planar() {
            return Vec::new();
        }
        let l = &self.lattice;
        let grid = Grid2 { nu: l.dims[0], nv: l.dims[1], periodic_u: false, periodic_v: false };
        // Inside means ρ < τ; unreached nodes are clamped just past the level.
        let neg: Vec<f64> = self.values.iter().map(|&v| -v.min(self.horizon.max(tau) * 2.0 + 1.0)).collect();
        marching_squares(grid, &neg, -tau)
            .into_iter()
            .map(|c| {
                let mut points: Vec<Point3> =
                    c.vertices.iter().map(|x| l.node_at(x.a).lerp(l.node_at(x.b), x.t)).collect();
                if c.closed {
                    points.push(points[0]);
                }
                Polyline { points, closed: c.closed }
            })
            .collect()
    }

    /// Number of nodes with `ρ ≤ τ`.
    pub fn sublevel_count(&self, tau: f64) -> usize {
        self.values.iter().filter(|&&v| v <= tau).count()
    }

    /// Whether `{ρ ≤ τ₁} ⊂ {ρ ≤ τ₂}` holds node-wise for consecutive times.
    pub fn is_nested(&self, taus: &[f64]) -> bool {
        taus.windows(2).all(|w| {
            w[0] <= w[1] && self.values.iter().all(|&v| !(v <= w[0]) || v <= w[1])
        })
    }

    /// Smallest `ρ` over nodes where `pred` holds.
    pub fn min_where(&self, pred: impl Fn(Point3) -> bool) -> Option<(usize, f64)> {
        (0..self.lattice.len())
            .filter(|&i| pred(self.lattice.node_at(i)))
            .map(|i| (i, self.values[i]))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn lipschitz(&self, data: &ZermeloData, slack: f64) -> Result<LipschitzReport> {
        let l = &self.lattice;
        let mut rep = LipschitzReport { edges: 0, violations: 0, worst_excess: 0.0 };
        for a in 0..l.len() {
            let ra = self.values[a];
            if !ra.is_finite() || self.sources[a] {
                continue;
            }
            let eval = data.at(l.node_at(a))?;
            for b in l.neighbors(a) {
                let rb = self.values[b];
                if !rb.is_finite() || self.sources[b] {
                    continue;
                }
                rep.edges += 1;
                let excess = rb - ra - eval.f(l.node_at(b) - l.node_at(a));
                if excess > slack {
                    rep.violations += 1;
                }
                rep.worst_excess = rep.worst_excess.max(excess);
            }
        }
        Ok(rep)
    }
}

/// `ρ` on `lattice` up to `horizon`.
///
/// Constant data: `ρ(q) = min_p F(q − p)` over the sampled front, exactly.
/// Otherwise rays are traced from every launch and each ray sample `(t, x)`
/// offers `t + F_x(q − x)` to the nodes within two cells.
pub fn arrival_time_field(
    data: &ZermeloData,
    front: &FrontGeometry,
    lattice: &Lattice,
    horizon: f64,
    sampling: &Sampling,
) -> Result<ArrivalField> {
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidParameter("arrival horizon must be finite and non-negative"));
    }
    let (launches, _) = fan::launches(data, front, sampling)?;
    let mode = fan::resolve_mode(data, front, horizon, sampling)?;
    let mut origins: Vec<Point3> = Vec::new();
    for l in &launches {
        if origins.last() != Some(&l.origin) && !origins.contains(&l.origin) {
            origins.push(l.origin);
        }
    }

    let mut values = if mode == Mode::Constant {
        let evals: Vec<RandersEval> = origins.iter().map(|&p| data.at(p)).collect::<Result<_>>()?;
        par::try_map(lattice.len(), |i| {
            let q = lattice.node_at(i);
            Ok(origins.iter().zip(&evals).map(|(&p, e)| e.f(q - p)).fold(f64::INFINITY, f64::min))
        })?
    } else {
        splat(data, mode, lattice, &launches, horizon, sampling)?
    };

    let mut sources = alloc::vec![false; lattice.len()];
    let tol_normal = lattice.spacing() / 2.0;
    for p in &origins {
        if lattice.is_planar() && lattice.coords(*p)[2].abs() > tol_normal {
            continue;
        }
        if let Some(i) = lattice.nearest(*p) {
            sources[i] = true;
            values[i] = 0.0;
        }
    }
    for v in &mut values {
        if *v > horizon {
            *v = f64::INFINITY;
        }
    }
    Ok(ArrivalField { lattice: lattice.clone(), values, horizon, sources, mode })
}

fn splat(
    data: &ZermeloData,
    mode: Mode,
    lattice: &Lattice,
    launches: &[fan::Launch],
    horizon: f64,
    sampling: &Sampling,
) -> Result<Vec<f64>> {
    let speed = fan::reach_region(data, &launches.iter().map(|l| l.origin).collect::<Vec<_>>(), 0.0)
        .and_then(|b| Ok(data.at(b.center())?.max_unit_speed()))?;
    let dt_sample = (lattice.spacing() / speed.max(1e-12)).min(horizon.max(1e-12));
    let n_t = (libm::ceil(horizon / dt_sample) as usize).max(1);
    let taus: Vec<f64> = (0..=n_t).map(|m| horizon * m as f64 / n_t as f64).collect();
    let dt = fan::step(horizon, sampling);
    let chunks = launches.len().clamp(1, 32);
    let per = launches.len().div_ceil(chunks);
    let reach = 2.0;
    let fields = par::try_map(chunks, |c| {
        let mut field = alloc::vec![f64::INFINITY; lattice.len()];
        let slice = &launches[(c * per).min(launches.len())..((c + 1) * per).min(launches.len())];
        let states = fan::states_at(data, mode, slice, &taus, dt)?;
        for st in &states {
            for (k, &(x, _)) in st.iter().enumerate() {
                let e = data.at(x)?;
                let cx = lattice.coords(x);
                let mut lo = [0usize; 3];
                let mut hi = [0usize; 3];
                let mut skip = false;
                for a in 0..3 {
                    if lattice.dims[a] == 1 {
                        skip |= cx[a].abs() * lattice.steps[a].norm() > reach * lattice.spacing();
                        continue;
                    }
                    let l0 = libm::ceil(cx[a] - reach).max(0.0);
                    let l1 = libm::floor(cx[a] + reach).min((lattice.dims[a] - 1) as f64);
                    if l0 > l1 {
                        skip = true;
                    } else {
                        lo[a] = l0 as usize;
                        hi[a] = l1 as usize;
                    }
                }
                if skip {
                    continue;
                }
                for kk in lo[2]..=hi[2] {
                    for j in lo[1]..=hi[1] {
                        for i in lo[0]..=hi[0] {
                            let idx = lattice.index(i, j, kk);
                            let v = taus[k] + e.f(lattice.node(i, j, kk) - x);
                            if v < field[idx] {
                                field[idx] = v;
                            }
                        }
                    }
                }
            }
        }
        Ok(field)
    })?;
    let mut out = alloc::vec![f64::INFINITY; lattice.len()];
    for f in fields {
        for (o, v) in out.iter_mut().zip(f) {
            *o = o.min(v);
        }
    }
    Ok(out)
}
