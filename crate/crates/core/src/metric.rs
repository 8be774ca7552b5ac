//! The Randers norm induced by Zermelo data `(h, W)`.
//!
//! With `a = h(W, V)`, `b = h(V, V)` and `λ = 1 − h(W, W)`,
//!
//! ```text
//! F(V) = (√(a² + λ b) − a) / λ = α(V) + β(V)
//! ```
//!
//! where `α(V) = √(a² + λ b)/λ` and `β(V) = −a/λ`. `F(V) = 1` exactly when
//! `h(V − W, V − W) = 1`.

use alloc::sync::Arc;
use core::fmt;

use crate::indicatrix::{metric_from_spec, EllipsoidSpec};
use crate::linalg::{Mat3, Point3, SpdMatrix3, Vec3};
use crate::math::sqrt;
use crate::wind::WindField;
use crate::{Error, Result};

/// Smallest admissible `λ = 1 − h(W, W)`.
pub const MIN_LAMBDA: f64 = 1e-9;

/// Default relative tolerance for orthogonality tests.
pub const DEFAULT_TOL: f64 = 1e-8;

/// A Riemannian metric field `p ↦ ℏ(p)`.
#[derive(Clone)]
pub enum MetricField {
    Constant(SpdMatrix3),
    Ellipsoid(EllipsoidSpec),
    Custom(Arc<dyn Fn(Point3) -> Result<SpdMatrix3> + Send + Sync>),
}

impl MetricField {
    pub fn euclidean() -> Self {
        MetricField::Constant(SpdMatrix3::identity())
    }

    pub fn custom(f: impl Fn(Point3) -> Result<SpdMatrix3> + Send + Sync + 'static) -> Self {
        MetricField::Custom(Arc::new(f))
    }

    pub fn at(&self, p: Point3) -> Result<SpdMatrix3> {
        match self {
            MetricField::Constant(h) => Ok(*h),
            MetricField::Ellipsoid(spec) => metric_from_spec(spec, p),
            MetricField::Custom(f) => f(p),
        }
    }

    /// True when the field is known not to depend on position.
    pub fn is_constant(&self) -> bool {
        match self {
            MetricField::Constant(_) => true,
            MetricField::Ellipsoid(spec) => spec.is_constant(),
            MetricField::Custom(_) => false,
        }
    }
}

impl From<SpdMatrix3> for MetricField {
    fn from(h: SpdMatrix3) -> Self {
        MetricField::Constant(h)
    }
}

impl From<EllipsoidSpec> for MetricField {
    fn from(spec: EllipsoidSpec) -> Self {
        MetricField::Ellipsoid(spec)
    }
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricField::Constant(h) => f.debug_tuple("Constant").field(h).finish(),
            MetricField::Ellipsoid(s) => f.debug_tuple("Ellipsoid").field(s).finish(),
            MetricField::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Zermelo navigation data: a metric field and a wind with `h(W, W) < 1`.
#[derive(Debug, Clone)]
pub struct ZermeloData {
    pub metric: MetricField,
    pub wind: WindField,
}

impl ZermeloData {
    pub fn new(metric: impl Into<MetricField>, wind: WindField) -> Self {
        ZermeloData { metric: metric.into(), wind }
    }

    /// The Randers norm on the tangent space at `p`.
    pub fn at(&self, p: Point3) -> Result<RandersEval> {
        RandersEval::new(self.metric.at(p)?, self.wind.at(p), p)
    }

    pub fn is_constant(&self) -> bool {
        self.metric.is_constant() && self.wind.is_constant()
    }
}

/// The Randers norm at a single point, frozen from `(ℏ(p), W(p))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandersEval {
    pub h: SpdMatrix3,
    pub w: Vec3,
    hw: Vec3,
    lambda: f64,
}

impl RandersEval {
    pub fn new(h: SpdMatrix3, w: Vec3, point: Point3) -> Result<Self> {
        if !w.is_finite() {
            return Err(Error::InvalidParameter("wind must be finite"));
        }
        let hw = h.apply(w);
        let hww = hw.dot(w);
        let lambda = 1.0 - hww;
        if !(lambda > MIN_LAMBDA) {
            return Err(Error::NonNavigable { point, hww });
        }
        Ok(RandersEval { h, w, hw, lambda })
    }

    /// `λ = 1 − h(W, W)`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Riemannian part `α(V)`.
    pub fn alpha(&self, v: Vec3) -> f64 {
        let a = self.hw.dot(v);
        sqrt(a * a + self.lambda * self.h.quad(v)) / self.lambda
    }

    /// One-form part `β(V) = −h(W, V)/λ`.
    pub fn beta(&self, v: Vec3) -> f64 {
        -self.hw.dot(v) / self.lambda
    }

    /// `F(V)`, evaluated without cancellation for either sign of `h(W, V)`.
    pub fn f(&self, v: Vec3) -> f64 {
        let a = self.hw.dot(v);
        let b = self.h.quad(v);
        let s = sqrt(a * a + self.lambda * b);
        if a <= 0.0 {
            (s - a) / self.lambda
        } else if s + a > 0.0 {
            b / (s + a)
        } else {
            0.0
        }
    }

    /// `√(a² + λb) = λF + a`, the common denominator of the derivatives.
    fn root(&self, v: Vec3) -> f64 {
        let a = self.hw.dot(v);
        sqrt(a * a + self.lambda * self.h.quad(v))
    }

    /// `∇F(V) = (ℏV − F ℏW)/√(a² + λb)`.
    pub fn gradient(&self, v: Vec3) -> Result<Vec3> {
        let s = self.root(v);
        if !(s > 0.0) {
            return Err(Error::ZeroBaseVector);
        }
        Ok((self.h.apply(v) - self.hw * self.f(v)) / s)
    }

    /// Hessian of `F` at `V`.
    pub fn hessian(&self, v: Vec3) -> Result<Mat3> {
        let s = self.root(v);
        if !(s > 0.0) {
            return Err(Error::ZeroBaseVector);
        }
        let g = (self.h.apply(v) - self.hw * self.f(v)) / s;
        let m = *self.h.matrix() - Mat3::outer(self.hw, g) - Mat3::outer(g, self.hw) - Mat3::outer(g, g) * self.lambda;
        Ok(m * (1.0 / s))
    }

    /// Fundamental tensor `g_V = ½ Hess(F²)(V) = ∇F ∇Fᵀ + F ∇²F`.
    pub fn fundamental_matrix(&self, v: Vec3) -> Result<Mat3> {
        let g = self.gradient(v)?;
        let hess = self.hessian(v)?;
        Ok((Mat3::outer(g, g) + hess * self.f(v)).symmetrized())
    }

    /// `V = W + d/|d|_h`, the `F`-unit vector whose offset from the wind points along `d`.
    pub fn unit_direction(&self, d: Vec3) -> Result<Vec3> {
        let n = self.h.norm(d);
        if !(n > 0.0) || !d.is_finite() {
            return Err(Error::ZeroDirection);
        }
        Ok(self.w + d / n)
    }

    /// `h(U, V/F(V) − W)`, which vanishes iff `U` is `F`-orthogonal to `V`.
    pub fn orthogonality_residual(&self, u: Vec3, v: Vec3) -> Result<f64> {
        let fv = self.f(v);
        if !(fv > 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(self.h.inner(u, v / fv - self.w))
    }

    /// Largest Euclidean length of an `F`-unit vector: `|W| + 1/√λ_min(ℏ)`.
    pub fn max_unit_speed(&self) -> f64 {
        let (vals, _) = self.h.eigen();
        self.w.norm() + 1.0 / sqrt(vals[0])
    }
}

/// `F(V)` at `p`.
pub fn eval_randers(data: &ZermeloData, p: Point3, v: Vec3) -> Result<f64> {
    if !v.is_finite() {
        return Err(Error::InvalidParameter("vector must be finite"));
    }
    Ok(data.at(p)?.f(v))
}

/// `W(p) + d/|d|_h`; satisfies `F(V) = 1`.
pub fn unit_f_direction(data: &ZermeloData, p: Point3, d: Vec3) -> Result<Vec3> {
    data.at(p)?.unit_direction(d)
}

/// `g_V(U1, U2)` at `p`.
pub fn fundamental_tensor(data: &ZermeloData, p: Point3, v: Vec3, u1: Vec3, u2: Vec3) -> Result<f64> {
    if v == Vec3::ZERO {
        return Err(Error::ZeroBaseVector);
    }
    let g = data.at(p)?.fundamental_matrix(v)?;
    Ok(u1.dot(g * u2))
}

/// Whether `U` is `F`-orthogonal to `V`: `|h(U, V/F(V) − W)| ≤ tol·|U|_h`.
pub fn is_f_orthogonal(data: &ZermeloData, p: Point3, u: Vec3, v: Vec3, tol: f64) -> Result<bool> {
    if u == Vec3::ZERO || v == Vec3::ZERO {
        return Err(Error::ZeroVector);
    }
    let r = data.at(p)?;
    Ok(r.orthogonality_residual(u, v)?.abs() <= tol * r.h.norm(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indicatrix::rotation_matrix;
    use crate::math::PI;
    use proptest::prelude::*;

    fn example1() -> ZermeloData {
        let h = SpdMatrix3::from_rotation_diag(&rotation_matrix(PI / 6.0, 0.0, 0.0), [4.0, 1.0, 0.25]).unwrap();
        ZermeloData::new(h, WindField::constant(Vec3::new(0.0, 1.0 / 3.0, 1.0 / 6.0)))
    }

    fn euclid(w: Vec3) -> ZermeloData {
        ZermeloData::new(MetricField::euclidean(), WindField::constant(w))
    }

    #[test]
    fn norm_examples() {
        let f = eval_randers(&euclid(Vec3::ZERO), Point3::ZERO, Vec3::new(3.0, 4.0, 0.0)).unwrap();
        assert!((f - 5.0).abs() < 1e-15);
        let f = eval_randers(&example1(), Point3::ZERO, Vec3::new(0.5, 1.0 / 3.0, 1.0 / 6.0)).unwrap();
        assert!((f - 1.0).abs() < 1e-14);
        let d = ZermeloData::new(SpdMatrix3::new(Mat3::diag([4.0, 1.0, 1.0])).unwrap(), WindField::zero());
        assert!((eval_randers(&d, Point3::ZERO, Vec3::X).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(eval_randers(&example1(), Point3::ZERO, Vec3::ZERO).unwrap(), 0.0);
    }

    #[test]
    fn alpha_plus_beta() {
        let r = example1().at(Point3::ZERO).unwrap();
        let v = Vec3::new(0.3, -0.7, 1.1);
        assert!((r.alpha(v) + r.beta(v) - r.f(v)).abs() < 1e-14);
    }

    #[test]
    fn strong_wind_is_rejected() {
        let e = eval_randers(&euclid(Vec3::new(1.0, 0.0, 0.0)), Point3::ZERO, Vec3::X);
        assert!(matches!(e, Err(Error::NonNavigable { .. })));
        let e = eval_randers(&euclid(Vec3::new(1.0 - 1e-10, 0.0, 0.0)), Point3::ZERO, Vec3::X);
        assert!(matches!(e, Err(Error::NonNavigable { .. })));
    }

    #[test]
    fn unit_direction_examples() {
        let v = unit_f_direction(&euclid(Vec3::ZERO), Point3::ZERO, Vec3::new(0.0, 0.0, 7.0)).unwrap();
        assert_eq!(v, Vec3::Z);
        let v = unit_f_direction(&example1(), Point3::ZERO, Vec3::X).unwrap();
        assert!((v - Vec3::new(0.5, 1.0 / 3.0, 1.0 / 6.0)).norm() < 1e-15);
        assert_eq!(unit_f_direction(&example1(), Point3::ZERO, Vec3::ZERO), Err(Error::ZeroDirection));
    }

    #[test]
    fn riemannian_tensor_is_metric() {
        let d = ZermeloData::new(SpdMatrix3::new(Mat3::diag([4.0, 1.0, 2.0])).unwrap(), WindField::zero());
        let (u1, u2) = (Vec3::new(1.0, 2.0, -1.0), Vec3::new(0.5, -1.0, 3.0));
        for v in [Vec3::X, Vec3::new(0.3, -2.0, 0.7)] {
            let g = fundamental_tensor(&d, Point3::ZERO, v, u1, u2).unwrap();
            assert!((g - (4.0 * 0.5 - 2.0 - 6.0)).abs() < 1e-13);
        }
        assert_eq!(fundamental_tensor(&d, Point3::ZERO, Vec3::ZERO, u1, u2), Err(Error::ZeroBaseVector));
    }

    /// `∂²/∂t∂s F²(V + tU1 + sU2)` by central differences, halved.
    fn fd_tensor(r: &RandersEval, v: Vec3, u1: Vec3, u2: Vec3) -> f64 {
        let e = 1e-5 * v.norm();
        let f2 = |t: f64, s: f64| {
            let x = r.f(v + u1 * t + u2 * s);
            x * x
        };
        (f2(e, e) - f2(e, -e) - f2(-e, e) + f2(-e, -e)) / (4.0 * e * e) / 2.0
    }

    #[test]
    fn tensor_matches_finite_differences_on_example1() {
        let r = example1().at(Point3::ZERO).unwrap();
        let cases = [
            (Vec3::new(0.4, -0.2, 0.9), Vec3::new(1.0, 0.3, -0.5), Vec3::new(-0.2, 0.8, 0.1)),
            (Vec3::new(-1.3, 0.6, 0.2), Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.7, 0.7, -0.3)),
            (Vec3::new(0.05, 0.5, -0.4), Vec3::new(0.9, -0.1, 0.4), Vec3::new(0.9, -0.1, 0.4)),
        ];
        for (v, u1, u2) in cases {
            let g = r.fundamental_matrix(v).unwrap();
            assert!((u1.dot(g * u2) - fd_tensor(&r, v, u1, u2)).abs() < 1e-6);
        }
    }

    #[test]
    fn orthogonality_examples() {
        let d = euclid(Vec3::ZERO);
        assert!(is_f_orthogonal(&d, Point3::ZERO, Vec3::X, Vec3::Y, DEFAULT_TOL).unwrap());
        let e1 = example1();
        let r = e1.at(Point3::ZERO).unwrap();
        // u unit-h, U h-orthogonal to u.
        let u = Vec3::X * 0.5;
        let big_u = Vec3::new(0.0, 1.0, 2.0);
        assert!(is_f_orthogonal(&e1, Point3::ZERO, big_u, r.w + u, DEFAULT_TOL).unwrap());
        assert_eq!(is_f_orthogonal(&d, Point3::ZERO, Vec3::ZERO, Vec3::Y, 1e-8), Err(Error::ZeroVector));
    }

    fn arb_data() -> impl Strategy<Value = RandersEval> {
        (
            prop::array::uniform3(0.2f64..5.0),
            prop::array::uniform3(-PI..PI),
            prop::array::uniform3(-1.0f64..1.0),
            0.0f64..0.95,
        )
            .prop_map(|(d, ang, wd, r)| {
                let h = SpdMatrix3::from_rotation_diag(&rotation_matrix(ang[0], ang[1], ang[2]), d).unwrap();
                let wd = Vec3::from_array(wd);
                let n = h.norm(wd);
                let w = if n > 1e-6 { wd * (r / n) } else { Vec3::ZERO };
                RandersEval::new(h, w, Point3::ZERO).unwrap()
            })
    }

    fn arb_vec() -> impl Strategy<Value = Vec3> {
        prop::array::uniform3(-3.0f64..3.0)
            .prop_filter("nonzero", |a| Vec3::from_array(*a).norm() > 1e-3)
            .prop_map(Vec3::from_array)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn positive_homogeneity(r in arb_data(), v in arb_vec(), c in 0.01f64..100.0) {
            let (a, b) = (r.f(v * c), c * r.f(v));
            prop_assert!((a - b).abs() <= 1e-10 * b.max(1.0));
            prop_assert!(r.f(v) > 0.0);
        }

        #[test]
        fn zermelo_round_trip(r in arb_data(), d in arb_vec()) {
            let v = r.unit_direction(d).unwrap();
            prop_assert!((r.f(v) - 1.0).abs() <= 1e-10);
        }

        #[test]
        fn euler_identity(r in arb_data(), v in arb_vec()) {
            let g = r.fundamental_matrix(v).unwrap();
            let f = r.f(v);
            prop_assert!((v.dot(g * v) - f * f).abs() <= 1e-10 * f * f);
        }

        #[test]
        fn orthogonality_forms_agree(r in arb_data(), v in arb_vec(), u in arb_vec()) {
            // g_V(V, U) = F² h(U, V/F − W) / (λF + h(W, V)).
            let g = r.fundamental_matrix(v).unwrap();
            let f = r.f(v);
            let lhs = v.dot(g * u);
            let rhs = f * f * r.orthogonality_residual(u, v).unwrap() / (r.lambda() * f + r.hw.dot(v));
            prop_assert!((lhs - rhs).abs() <= 1e-7 * (1.0 + lhs.abs()));
            let tol = 1e-7;
            let ortho_g = lhs.abs() <= tol * f * r.h.norm(u) * f / (r.lambda() * f + r.hw.dot(v));
            let ortho_h = r.orthogonality_residual(u, v).unwrap().abs() <= tol * r.h.norm(u);
            prop_assert_eq!(ortho_g, ortho_h);
        }
    }
}
