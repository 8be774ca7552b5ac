//! Fixed-size 3-D vectors and matrices.

use core::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::math::sqrt;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Points and tangent vectors share a representation; the alias only marks intent.
pub type Point3 = Vec3;

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };
    pub const X: Vec3 = Vec3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: Vec3 = Vec3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 1.0 };

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    #[inline]
    pub fn from_array(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }

    #[inline]
    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Unit vector along coordinate axis `i`.
    pub fn axis(i: usize) -> Self {
        let mut v = Vec3::ZERO;
        v[i] = 1.0;
        v
    }

    #[inline]
    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        sqrt(self.norm_sq())
    }

    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self / n)
    }

    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn lerp(self, o: Vec3, t: f64) -> Vec3 {
        self + (o - self) * t
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    #[inline]
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    #[inline]
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    #[inline]
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    #[inline]
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl AddAssign for Vec3 {
    #[inline]
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl SubAssign for Vec3 {
    #[inline]
    fn sub_assign(&mut self, o: Vec3) {
        *self = *self - o;
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

impl IndexMut<usize> for Vec3 {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        match i {
            0 => &mut self.x,
            1 => &mut self.y,
            2 => &mut self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

/// Row-major 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    pub const ZERO: Mat3 = Mat3([[0.0; 3]; 3]);

    pub fn diag(d: [f64; 3]) -> Mat3 {
        Mat3([[d[0], 0.0, 0.0], [0.0, d[1], 0.0], [0.0, 0.0, d[2]]])
    }

    pub fn from_rows(r0: Vec3, r1: Vec3, r2: Vec3) -> Mat3 {
        Mat3([r0.to_array(), r1.to_array(), r2.to_array()])
    }

    pub fn from_cols(c0: Vec3, c1: Vec3, c2: Vec3) -> Mat3 {
        Mat3::from_rows(c0, c1, c2).transpose()
    }

    pub fn outer(a: Vec3, b: Vec3) -> Mat3 {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = a[i] * b[j];
            }
        }
        m
    }

    pub fn row(&self, i: usize) -> Vec3 {
        Vec3::from_array(self.0[i])
    }

    pub fn col(&self, j: usize) -> Vec3 {
        Vec3::new(self.0[0][j], self.0[1][j], self.0[2][j])
    }

    pub fn transpose(&self) -> Mat3 {
        let m = &self.0;
        Mat3([[m[0][0], m[1][0], m[2][0]], [m[0][1], m[1][1], m[2][1]], [m[0][2], m[1][2], m[2][2]]])
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Inverse by cofactors; `None` when the determinant vanishes relative to the entries.
    pub fn inverse(&self) -> Option<Mat3> {
        let d = self.det();
        let scale = self.max_abs();
        if !(d.abs() > 1e-300 && d.abs() > 1e-14 * scale * scale * scale) {
            return None;
        }
        let m = &self.0;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        let adj = Mat3([
            [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
            [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
            [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
        ]);
        Some(adj * (1.0 / d))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0_f64, |a, &x| a.max(x.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        sqrt(self.0.iter().flatten().map(|x| x * x).sum())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    /// Symmetric part `(M + Mᵀ)/2`.
    pub fn symmetrized(&self) -> Mat3 {
        (*self + self.transpose()) * 0.5
    }
}

impl Mul<Vec3> for Mat3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, v: Vec3) -> Vec3 {
        Vec3::new(self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v))
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, o: Mat3) -> Mat3 {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        m
    }
}

impl Mul<f64> for Mat3 {
    type Output = Mat3;
    fn mul(self, s: f64) -> Mat3 {
        let mut m = self;
        m.0.iter_mut().flatten().for_each(|x| *x *= s);
        m
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, o: Mat3) -> Mat3 {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] += o.0[i][j];
            }
        }
        m
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, o: Mat3) -> Mat3 {
        self + o * -1.0
    }
}

/// Symmetric positive-definite 3×3 matrix, the matrix `ℏ` of a Riemannian metric at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpdMatrix3(Mat3);

impl SpdMatrix3 {
    /// Checks symmetry (relative 1e-10) and positive definiteness via Cholesky.
    /// The stored matrix is exactly symmetric.
    pub fn new(m: Mat3) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonSpd);
        }
        let scale = m.max_abs();
        let asym = (m - m.transpose()).max_abs();
        if !(scale > 0.0) || asym > 1e-10 * scale {
            return Err(Error::NonSpd);
        }
        let s = SpdMatrix3(m.symmetrized());
        s.cholesky().ok_or(Error::NonSpd)?;
        Ok(s)
    }

    pub fn identity() -> Self {
        SpdMatrix3(Mat3::IDENTITY)
    }

    /// Builds `PᵀDP` from a rotation `P` and positive diagonal `D`; `P` must be orthogonal.
    pub fn from_rotation_diag(p: &Mat3, d: [f64; 3]) -> Result<Self> {
        if d.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
            return Err(Error::NonSpd);
        }
        Ok(SpdMatrix3((p.transpose() * Mat3::diag(d) * *p).symmetrized()))
    }

    #[inline]
    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    #[inline]
    pub fn apply(&self, v: Vec3) -> Vec3 {
        self.0 * v
    }

    /// `h(u, v)`.
    #[inline]
    pub fn inner(&self, u: Vec3, v: Vec3) -> f64 {
        u.dot(self.0 * v)
    }

    /// `h(v, v)`.
    #[inline]
    pub fn quad(&self, v: Vec3) -> f64 {
        self.inner(v, v)
    }

    /// `|v|_h`.
    #[inline]
    pub fn norm(&self, v: Vec3) -> f64 {
        sqrt(self.quad(v).max(0.0))
    }

    /// Lower-triangular `L` with `LLᵀ = self`.
    pub fn cholesky(&self) -> Option<Mat3> {
        let a = &self.0 .0;
        let mut l = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..=i {
                let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
                if i == j {
                    let d = a[i][i] - s;
                    if !(d > 1e-300) || d <= 1e-14 * a[i][i].abs() {
                        return None;
                    }
                    l[i][i] = sqrt(d);
                } else {
                    l[i][j] = (a[i][j] - s) / l[j][j];
                }
            }
        }
        Some(Mat3(l))
    }

    pub fn inverse(&self) -> Result<Mat3> {
        self.0.inverse().map(|m| m.symmetrized()).ok_or(Error::SingularMetric)
    }

    /// A frame `M` with `Mᵀ ℏ M = I` (`M = L⁻ᵀ`); maps the unit sphere onto `{h(u,u) = 1}`.
    pub fn unit_frame(&self) -> Mat3 {
        let l = self.cholesky().expect("SPD invariant");
        l.inverse().expect("Cholesky factor of an SPD matrix is invertible").transpose()
    }

    /// A frame `M` with `Mᵀ ℏ M = I` built from eigenvectors, each assigned to
    /// the coordinate axis it is most aligned with (sign made positive there).
    /// For diagonal or single-axis-rotated metrics the unit sphere's axis
    /// points map onto the ellipsoid's axis points.
    pub fn aligned_unit_frame(&self) -> Mat3 {
        let (vals, vecs) = self.eigen();
        let mut cols = [Vec3::ZERO; 3];
        let mut used = [false; 3];
        for axis in 0..3 {
            let best = (0..3)
                .filter(|&k| !used[k])
                .max_by(|&a, &b| vecs.col(a)[axis].abs().total_cmp(&vecs.col(b)[axis].abs()))
                .unwrap();
            used[best] = true;
            let mut v = vecs.col(best);
            if v[axis] < 0.0 {
                v = -v;
            }
            cols[axis] = v / sqrt(vals[best]);
        }
        Mat3::from_cols(cols[0], cols[1], cols[2])
    }

    /// Eigenvalues (ascending) and matching unit eigenvectors as columns, by cyclic Jacobi rotations.
    pub fn eigen(&self) -> ([f64; 3], Mat3) {
        symmetric_eigen(&self.0)
    }
}

/// Jacobi eigen-decomposition of a symmetric 3×3 matrix.
pub(crate) fn symmetric_eigen(m: &Mat3) -> ([f64; 3], Mat3) {
    let mut a = m.symmetrized().0;
    let mut v = Mat3::IDENTITY.0;
    let scale = m.frobenius().max(f64::MIN_POSITIVE);
    for _sweep in 0..64 {
        let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        if sqrt(off) <= 1e-17 * scale {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + sqrt(theta * theta + 1.0));
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / sqrt(t * t + 1.0);
            let s = t * c;
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let vkp = row[p];
                let vkq = row[q];
                row[p] = c * vkp - s * vkq;
                row[q] = s * vkp + c * vkq;
            }
        }
    }
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let vals = [a[idx[0]][idx[0]], a[idx[1]][idx[1]], a[idx[2]][idx[2]]];
    let vm = Mat3(v);
    let vecs = Mat3::from_cols(vm.col(idx[0]), vm.col(idx[1]), vm.col(idx[2]));
    (vals, vecs)
}
