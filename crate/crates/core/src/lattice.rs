//! Regular evaluation lattices and slicing planes.

use alloc::vec::Vec;

use crate::linalg::{Point3, Vec3};
use crate::wind::Aabb;
use crate::{Error, Result};

/// An oriented plane with an in-plane orthonormal basis `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Plane {
    pub point: Point3,
    pub normal: Vec3,
    pub u: Vec3,
    pub v: Vec3,
}

impl Plane {
    pub fn new(point: Point3, normal: Vec3) -> Result<Self> {
        let n = normal.normalized().ok_or(Error::ZeroVector)?;
        let axis = (0..3).min_by(|&a, &b| n[a].abs().total_cmp(&n[b].abs())).unwrap();
        let u = (Vec3::axis(axis) - n * n[axis]).normalized().ok_or(Error::ZeroVector)?;
        let v = n.cross(u);
        Ok(Plane { point, normal: n, u, v })
    }

    /// The horizontal plane `z = c` with basis `(x, y)`.
    pub fn z(c: f64) -> Self {
        Plane { point: Point3::new(0.0, 0.0, c), normal: Vec3::Z, u: Vec3::X, v: Vec3::Y }
    }

    #[inline]
    pub fn signed_distance(&self, p: Point3) -> f64 {
        (p - self.point).dot(self.normal)
    }

    #[inline]
    pub fn to_2d(&self, p: Point3) -> [f64; 2] {
        let d = p - self.point;
        [d.dot(self.u), d.dot(self.v)]
    }

    #[inline]
    pub fn from_2d(&self, q: [f64; 2]) -> Point3 {
        self.point + self.u * q[0] + self.v * q[1]
    }
}

/// A regular lattice `origin + i·steps[0] + j·steps[1] + k·steps[2]` with
/// mutually orthogonal steps. `dims[2] == 1` makes it planar.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Lattice {
    pub origin: Point3,
    pub steps: [Vec3; 3],
    pub dims: [usize; 3],
}

impl Lattice {
    pub fn new(origin: Point3, steps: [Vec3; 3], dims: [usize; 3]) -> Result<Self> {
        if dims.iter().any(|&n| n < 2) && !(dims[2] == 1 && dims[0] >= 2 && dims[1] >= 2) {
            return Err(Error::InvalidParameter("lattice needs at least 2 nodes per axis"));
        }
        let active = if dims[2] == 1 { 2 } else { 3 };
        for i in 0..active {
            if !(steps[i].norm() > 0.0) || !steps[i].is_finite() {
                return Err(Error::InvalidParameter("lattice steps must be nonzero"));
            }
            for j in 0..i {
                if steps[i].dot(steps[j]).abs() > 1e-9 * steps[i].norm() * steps[j].norm() {
                    return Err(Error::InvalidParameter("lattice steps must be orthogonal"));
                }
            }
        }
        let mut steps = steps;
        if dims[2] == 1 {
            steps[2] = steps[0].cross(steps[1]).normalized().ok_or(Error::ZeroVector)?;
        }
        Ok(Lattice { origin, steps, dims })
    }

    /// `n_u × n_v` nodes covering the rectangle `[u0, u1] × [v0, v1]` of `plane`.
    pub fn planar(plane: &Plane, u: (f64, f64), v: (f64, f64), n: [usize; 2]) -> Result<Self> {
        if n[0] < 2 || n[1] < 2 || !(u.1 > u.0) || !(v.1 > v.0) {
            return Err(Error::InvalidParameter("planar lattice needs a non-empty rectangle and 2 nodes per axis"));
        }
        let du = plane.u * ((u.1 - u.0) / (n[0] - 1) as f64);
        let dv = plane.v * ((v.1 - v.0) / (n[1] - 1) as f64);
        Lattice::new(plane.from_2d([u.0, v.0]), [du, dv, plane.normal], [n[0], n[1], 1])
    }

    /// Axis-aligned box lattice.
    pub fn boxed(b: &Aabb, dims: [usize; 3]) -> Result<Self> {
        let e = b.extent();
        let steps = [0, 1, 2].map(|i| Vec3::axis(i) * (e[i] / (dims[i].max(2) - 1) as f64));
        Lattice::new(b.min, steps, dims)
    }

    pub fn is_planar(&self) -> bool {
        self.dims[2] == 1
    }

    pub fn plane(&self) -> Option<Plane> {
        self.is_planar().then(|| Plane {
            point: self.origin,
            normal: self.steps[2],
            u: self.steps[0] / self.steps[0].norm(),
            v: self.steps[1] / self.steps[1].norm(),
        })
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    #[inline]
    pub fn ijk(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.dims[0];
        let r = idx / self.dims[0];
        [i, r % self.dims[1], r / self.dims[1]]
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize, k: usize) -> Point3 {
        self.origin + self.steps[0] * i as f64 + self.steps[1] * j as f64 + self.steps[2] * k as f64
    }

    pub fn node_at(&self, idx: usize) -> Point3 {
        let [i, j, k] = self.ijk(idx);
        self.node(i, j, k)
    }

    /// Point at fractional lattice coordinates.
    pub fn at(&self, c: [f64; 3]) -> Point3 {
        self.origin + self.steps[0] * c[0] + self.steps[1] * c[1] + self.steps[2] * c[2]
    }

    /// Fractional lattice coordinates of `p` (the third is the normal offset in step units for planar lattices).
    pub fn coords(&self, p: Point3) -> [f64; 3] {
        let d = p - self.origin;
        [0, 1, 2].map(|i| d.dot(self.steps[i]) / self.steps[i].norm_sq())
    }

    /// Largest step length.
    pub fn spacing(&self) -> f64 {
        let n = if self.is_planar() { 2 } else { 3 };
        (0..n).map(|i| self.steps[i].norm()).fold(0.0, f64::max)
    }

    /// Nearest node index, if `p` projects inside the lattice.
    pub fn nearest(&self, p: Point3) -> Option<usize> {
        let c = self.coords(p);
        let mut ijk = [0usize; 3];
        for a in 0..3 {
            if self.dims[a] == 1 {
                continue;
            }
            let r = libm::round(c[a]);
            if r < 0.0 || r > (self.dims[a] - 1) as f64 {
                return None;
            }
            ijk[a] = r as usize;
        }
        Some(self.index(ijk[0], ijk[1], ijk[2]))
    }

    /// Node indices adjacent along the lattice axes.
    pub fn neighbors(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let c = self.ijk(idx);
        (0..3).flat_map(move |a| {
            let mut out: [Option<usize>; 2] = [None, None];
            if c[a] > 0 {
                let mut d = c;
                d[a] -= 1;
                out[0] = Some(self.index(d[0], d[1], d[2]));
            }
            if c[a] + 1 < self.dims[a] {
                let mut d = c;
                d[a] += 1;
                out[1] = Some(self.index(d[0], d[1], d[2]));
            }
            out.into_iter().flatten()
        })
    }

    pub fn on_boundary(&self, idx: usize) -> bool {
        let c = self.ijk(idx);
        (0..3).any(|a| self.dims[a] > 1 && (c[a] == 0 || c[a] + 1 == self.dims[a]))
    }

    pub fn nodes(&self) -> Vec<Point3> {
        (0..self.len()).map(|i| self.node_at(i)).collect()
    }

    pub fn bounds(&self) -> Aabb {
        let far = self.node(self.dims[0] - 1, self.dims[1] - 1, self.dims[2] - 1);
        Aabb::new(self.origin, self.origin).include(far)
    }
}
