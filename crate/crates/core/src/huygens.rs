//! Huygens steps: the next front as the outer boundary of a union of small
//! spherical wavefronts seeded on the current one.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::contour::{marching_squares, Grid2};
use crate::fan::{self, Launch};
use crate::geodesic::Mode;
use crate::lattice::Lattice;
use crate::linalg::Point3;
use crate::metric::{RandersEval, ZermeloData};
use crate::propagation::{Layout, Provenance, Sampling, Span, Wavefront};
use crate::{par, Error, Result};

struct Seed {
    point: Point3,
    prov: Provenance,
    eval: RandersEval,
}

fn unique_seeds(data: &ZermeloData, front: &Wavefront) -> Result<Vec<Seed>> {
    let mut seen = BTreeMap::new();
    let mut out = Vec::new();
    for (p, prov) in front.points.iter().zip(&front.provenance) {
        let key = [p.x.to_bits(), p.y.to_bits(), p.z.to_bits()];
        if seen.insert(key, ()).is_none() {
            out.push(Seed { point: *p, prov: *prov, eval: data.at(*p)? });
        }
    }
    Ok(out)
}

/// Inclusive index range on lattice axis `a` for the coordinate interval `[lo, hi]`.
fn axis_range(l: &Lattice, a: usize, lo: f64, hi: f64) -> Option<(usize, usize)> {
    let n = l.dims[a];
    let lo = libm::ceil(lo).max(0.0);
    let hi = libm::floor(hi).min((n - 1) as f64);
    (lo <= hi).then_some((lo as usize, hi as usize))
}

/// Nodes inside the exact ellipsoid `Q_h((q − p − rW)/r) ≤ 1`.
fn ellipsoid_nodes(l: &Lattice, s: &Seed, r: f64) -> Result<Vec<usize>> {
    let hinv = s.eval.h.inverse()?;
    let center = l.coords(s.point + s.eval.w * r);
    let mut lo = [0usize; 3];
    let mut hi = [0usize; 3];
    for a in 0..3 {
        let st = l.steps[a];
        let half = r * libm::sqrt(st.dot(hinv * st)) / st.norm_sq();
        if l.dims[a] == 1 {
            if center[a].abs() > half {
                return Ok(Vec::new());
            }
            continue;
        }
        match axis_range(l, a, center[a] - half, center[a] + half) {
            Some((a0, a1)) => {
                lo[a] = a0;
                hi[a] = a1;
            }
            None => return Ok(Vec::new()),
        }
    }
    let mut out = Vec::new();
    for k in lo[2]..=hi[2] {
        for j in lo[1]..=hi[1] {
            for i in lo[0]..=hi[0] {
                let q = l.node(i, j, k);
                let u = (q - s.point) / r - s.eval.w;
                if s.eval.h.quad(u) <= 1.0 {
                    out.push(l.index(i, j, k));
                }
            }
        }
    }
    Ok(out)
}

/// Triangles of a closed latitude/longitude mesh (`n_lat` rings of `n_lon`, then the two poles).
fn sphere_triangles(n_lat: usize, n_lon: usize) -> Vec<[usize; 3]> {
    let at = |i: usize, j: usize| i * n_lon + (j % n_lon);
    let (north, south) = (n_lat * n_lon, n_lat * n_lon + 1);
    let mut t = Vec::new();
    for j in 0..n_lon {
        t.push([north, at(0, j), at(0, j + 1)]);
        t.push([south, at(n_lat - 1, j + 1), at(n_lat - 1, j)]);
        for i in 0..n_lat - 1 {
            t.push([at(i, j), at(i + 1, j), at(i + 1, j + 1)]);
            t.push([at(i, j), at(i + 1, j + 1), at(i, j + 1)]);
        }
    }
    t
}

/// Nodes enclosed by a closed triangle mesh, by crossing parity along the third lattice axis.
fn enclosed_nodes(l: &Lattice, verts: &[Point3], tris: &[[usize; 3]]) -> Vec<usize> {
    // Irrational offsets keep columns off mesh edges and vertices.
    const DU: f64 = 3.141_592_653e-7;
    const DV: f64 = 2.718_281_828e-7;
    let c: Vec<[f64; 3]> = verts.iter().map(|&p| l.coords(p)).collect();
    let mut columns: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    for t in tris {
        let [a, b, d] = [c[t[0]], c[t[1]], c[t[2]]];
        let umin = a[0].min(b[0]).min(d[0]) - DU;
        let umax = a[0].max(b[0]).max(d[0]) - DU;
        let vmin = a[1].min(b[1]).min(d[1]) - DV;
        let vmax = a[1].max(b[1]).max(d[1]) - DV;
        let (Some((i0, i1)), Some((j0, j1))) = (axis_range(l, 0, umin, umax), axis_range(l, 1, vmin, vmax)) else {
            continue;
        };
        let det = (b[0] - a[0]) * (d[1] - a[1]) - (d[0] - a[0]) * (b[1] - a[1]);
        if det == 0.0 {
            continue;
        }
        for j in j0..=j1 {
            for i in i0..=i1 {
                let (u, v) = (i as f64 + DU, j as f64 + DV);
                let l1 = ((u - a[0]) * (d[1] - a[1]) - (d[0] - a[0]) * (v - a[1])) / det;
                let l2 = ((b[0] - a[0]) * (v - a[1]) - (u - a[0]) * (b[1] - a[1])) / det;
                if l1 < 0.0 || l2 < 0.0 || l1 + l2 > 1.0 {
                    continue;
                }
                let w = a[2] + l1 * (b[2] - a[2]) + l2 * (d[2] - a[2]);
                columns.entry((i, j)).or_default().push(w);
            }
        }
    }
    let mut out = Vec::new();
    for ((i, j), ws) in columns {
        for k in 0..l.dims[2] {
            if ws.iter().filter(|&&w| w > k as f64).count() % 2 == 1 {
                out.push(l.index(i, j, k));
            }
        }
    }
    out
}

fn traced_nodes(data: &ZermeloData, mode: Mode, l: &Lattice, s: &Seed, r: f64, sampling: &Sampling) -> Result<Vec<usize>> {
    let grid = crate::indicatrix::SphereGrid { poles: true, ..sampling.fan };
    let launches: Vec<Launch> = fan::point_velocities(&s.eval, &grid)
        .into_iter()
        .map(|((a, b), v)| Launch { source_index: 0, params: [a, b], origin: s.point, velocity: v })
        .collect();
    let dt = fan::step(r, sampling);
    let mut verts = Vec::with_capacity(launches.len());
    for l0 in &launches {
        verts.push(fan::trace(data, mode, l0, r, dt)?.end().0);
    }
    Ok(enclosed_nodes(l, &verts, &sphere_triangles(grid.n_lat, grid.n_lon)))
}

fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let orient = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Whether closed polylines (2-D lattice coordinates) cross themselves or each other.
fn self_intersecting(polys: &[Vec<[f64; 2]>]) -> bool {
    let mut buckets: BTreeMap<(i64, i64), Vec<(usize, usize)>> = BTreeMap::new();
    for (pi, p) in polys.iter().enumerate() {
        for si in 0..p.len() {
            let (a, b) = (p[si], p[(si + 1) % p.len()]);
            let key = (libm::floor((a[0] + b[0]) / 2.0) as i64, libm::floor((a[1] + b[1]) / 2.0) as i64);
            buckets.entry(key).or_default().push((pi, si));
        }
    }
    let seg = |(pi, si): (usize, usize)| (polys[pi][si], polys[pi][(si + 1) % polys[pi].len()]);
    let adjacent = |x: (usize, usize), y: (usize, usize)| {
        let n = polys[x.0].len();
        x.0 == y.0 && (x.1 == y.1 || (x.1 + 1) % n == y.1 || (y.1 + 1) % n == x.1)
    };
    for (&(bx, by), list) in &buckets {
        for dx in -1..=1 {
            for dy in -1..=1 {
                let Some(other) = buckets.get(&(bx + dx, by + dy)) else { continue };
                for &x in list {
                    for &y in other {
                        if x < y && !adjacent(x, y) {
                            let ((a, b), (c, d)) = (seg(x), seg(y));
                            if segments_cross(a, b, c, d) {
                                return true;
                            }
                        }
                    }
                }
            }
        }
    }
    false
}

/// The front at `front.time + r`: the outer boundary of the union of the radius-`r`
/// spherical wavefronts seeded at the samples of `front`, resolved on `lattice`.
///
/// Planar lattices yield closed polylines in the lattice plane; 3-D lattices
/// yield scattered points midway between covered and uncovered nodes.
pub fn huygens_step(data: &ZermeloData, front: &Wavefront, r: f64, lattice: &Lattice, sampling: &Sampling) -> Result<Wavefront> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter("Huygens radius must be positive"));
    }
    let seeds = unique_seeds(data, front)?;
    if seeds.is_empty() {
        return Err(Error::EmptyFan);
    }
    let points: Vec<Point3> = seeds.iter().map(|s| s.point).collect();
    let mode = match sampling.mode {
        Some(m) => m,
        None if data.is_constant() => Mode::Constant,
        None => {
            let region = fan::reach_region(data, &points, r)?;
            crate::geodesic::select_mode(data, &region, sampling.killing_tol)?
        }
    };

    let per_seed = par::try_map(seeds.len(), |i| match mode {
        Mode::Constant => ellipsoid_nodes(lattice, &seeds[i], r),
        _ => traced_nodes(data, mode, lattice, &seeds[i], r, sampling),
    })?;
    let mut covered = alloc::vec![false; lattice.len()];
    for idx in per_seed.into_iter().flatten() {
        covered[idx] = true;
    }
    let tol_normal = lattice.spacing() / 2.0;
    for s in &seeds {
        if lattice.is_planar() && lattice.coords(s.point)[2].abs() > tol_normal {
            continue;
        }
        covered[lattice.nearest(s.point).ok_or(Error::FrontOutsideGrid)?] = true;
    }

    // Everything not reachable from the lattice boundary through uncovered nodes is inside.
    let mut outside = alloc::vec![false; lattice.len()];
    let mut stack = Vec::new();
    for idx in 0..lattice.len() {
        if lattice.on_boundary(idx) {
            if covered[idx] {
                return Err(Error::FrontOutsideGrid);
            }
            outside[idx] = true;
            stack.push(idx);
        }
    }
    while let Some(idx) = stack.pop() {
        for n in lattice.neighbors(idx) {
            if !outside[n] && !covered[n] {
                outside[n] = true;
                stack.push(n);
            }
        }
    }

    let (new_points, layout) = if lattice.is_planar() {
        let grid = Grid2 { nu: lattice.dims[0], nv: lattice.dims[1], periodic_u: false, periodic_v: false };
        let ind: Vec<f64> = outside.iter().map(|&o| if o { 0.0 } else { 1.0 }).collect();
        let contours = marching_squares(grid, &ind, 0.5);
        let coords = |k: usize| {
            let [i, j, _] = lattice.ijk(k);
            [i as f64, j as f64]
        };
        let polys: Vec<Vec<[f64; 2]>> = contours
            .iter()
            .map(|c| {
                c.vertices
                    .iter()
                    .map(|x| {
                        let (a, b) = (coords(x.a), coords(x.b));
                        [a[0] + x.t * (b[0] - a[0]), a[1] + x.t * (b[1] - a[1])]
                    })
                    .collect()
            })
            .collect();
        if self_intersecting(&polys) {
            return Err(Error::GridTooCoarse("extracted front crosses itself"));
        }
        let mut pts = Vec::new();
        let mut spans = Vec::new();
        for (c, p) in contours.iter().zip(&polys) {
            spans.push(Span { start: pts.len(), len: p.len(), closed: c.closed });
            pts.extend(p.iter().map(|q| lattice.at([q[0], q[1], 0.0])));
        }
        (pts, Layout::Polylines(spans))
    } else {
        let mut pts = Vec::new();
        for idx in 0..lattice.len() {
            if outside[idx] {
                continue;
            }
            for n in lattice.neighbors(idx) {
                if outside[n] {
                    pts.push(lattice.node_at(idx).lerp(lattice.node_at(n), 0.5));
                }
            }
        }
        (pts, Layout::Scattered)
    };

    let provenance = par::try_map(new_points.len(), |k| {
        let q = new_points[k];
        let (mut best, mut fbest) = (0, f64::INFINITY);
        for (i, s) in seeds.iter().enumerate() {
            let f = s.eval.f(q - s.point);
            if f < fbest {
                best = i;
                fbest = f;
            }
        }
        let s = &seeds[best];
        let d = q - s.point;
        let velocity = if fbest > 0.0 { d / fbest } else { s.prov.velocity };
        Ok(Provenance { velocity, ..s.prov })
    })?;
    Ok(Wavefront { time: front.time + r, points: new_points, provenance, layout, mode })
}
