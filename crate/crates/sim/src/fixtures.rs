//! The two worked examples as ready-made scenarios, with their closed-form constants.
//!
//! Example 1 has the constant wind `W = (0, 1/3, 1/6)` and the ellipsoid
//! `a = 1/2, b = 1, c = 2, α = π/6`; Example 2 has the shear wind
//! `W = k(y, 0, 0)` with `k = 0.1` and the ellipsoid `a = 1, b = 1/2, c = 2`
//! rotated about the `y` axis by `β = y`. Each comes with a point source
//! (case 1), the closed curve
//! `C(s) = (¼ cos s (cos s + 6), 4/13 sin s (3 − sin s), 0)` (case 2) and the
//! cylinder over `C` of height 2 (case 3).
//!
//! The closed-form constants come in two sets, selected by [`ConstantSet`].

use wildfront_core::{Mat3, Point3, Vec3};

use crate::config::{parse_scenario, ConstantSet, Scenario};

pub const EXAMPLE2_K: f64 = 0.1;

pub const NAMES: [&str; 6] =
    ["example1_case1", "example1_case2", "example1_case3", "example2_case1", "example2_case2", "example2_case3"];

const EXAMPLE1_HEAD: &str = r#"
schema = "wildfront.scenario/1"
times = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]

[metric]
a = 0.5
b = 1
c = 2
alpha = "pi/6"

[[wind]]
start = 0
end = 10
value = [0, "1/3", "1/6"]

[reference]
example = 1
"#;

const EXAMPLE1_CASE1: &str = r#"
name = "example1_case1"
description = "constant wind, point source"
checks = ["nesting", "drift", "straight_path", "semigroup", "envelope", "orthogonality", "constants"]

[front]
kind = "point"
position = [0, 0, 0]

[output]
arrival = true
grid = { u = [-1.5, 1.5], v = [-1.5, 2.0], n = [256, 256] }

[[strategy]]
kind = "all_equal"
tau = 10
points_at = [2.5, 5, 7.5]
"#;

const EXAMPLE1_CASE2: &str = r#"
name = "example1_case2"
description = "constant wind, closed curve"
checks = ["nesting", "drift", "straight_path", "semigroup", "envelope", "orthogonality", "constants"]

[front]
kind = "curve"
position = ["cos(s)*(cos(s) + 6)/4", "4/13*sin(s)*(3 - sin(s))", 0]
range = [0, "2*pi"]
closed = true

[output]
arrival = true
grid = { u = [-3.0, 3.5], v = [-3.0, 3.0], n = [256, 256] }

[[strategy]]
kind = "all_equal"
tau = 10
"#;

const EXAMPLE1_CASE3: &str = r#"
name = "example1_case3"
description = "constant wind, cylinder over the closed curve"
checks = ["straight_path", "semigroup", "orthogonality", "constants"]

[front]
kind = "surface"
position = ["cos(s1)*(cos(s1) + 6)/4", "4/13*sin(s1)*(3 - sin(s1))", "s2"]
range = [0, "2*pi"]
range2 = [0, 2]
periodic = [true, false]

[output]
slice = { point = [0, 0, 1], normal = [0, 0, 1] }

[[strategy]]
kind = "all_equal"
tau = 10
"#;

const EXAMPLE2_HEAD: &str = r#"
schema = "wildfront.scenario/1"
times = [1, 2, 3, 4, 5]

[vars]
k = 0.1

[metric]
a = 1
b = 0.5
c = 2
beta = "y"

[[wind]]
start = 0
end = 5
kind = "affine"
matrix = [[0, "k", 0], [0, 0, 0], [0, 0, 0]]

[reference]
example = 2
"#;

const EXAMPLE2_TAIL: &str = r#"
[output]
domain = { min = [-8, -8, -8], max = [8, 8, 8] }
"#;

const EXAMPLE2_CASE1: &str = r#"
name = "example2_case1"
description = "shear wind over a rotating ellipsoid, point source"
checks = ["semigroup", "orthogonality", "geodesic", "constants"]

[front]
kind = "point"
position = [0, 0, 0]

[sampling]
fan = { n_lat = 17, n_lon = 32, poles = false }
dt = 0.01

[[strategy]]
kind = "all_equal"
tau = 5
"#;

const EXAMPLE2_CASE2: &str = r#"
name = "example2_case2"
description = "shear wind over a rotating ellipsoid, closed curve"
checks = ["semigroup", "orthogonality", "geodesic", "constants"]

[front]
kind = "curve"
position = ["cos(s)*(cos(s) + 6)/4", "4/13*sin(s)*(3 - sin(s))", 0]
range = [0, "2*pi"]
closed = true

[sampling]
curve = 64
psi = 9
dt = 0.01
"#;

const EXAMPLE2_CASE3: &str = r#"
name = "example2_case3"
description = "shear wind over a rotating ellipsoid, cylinder over the closed curve"
checks = ["semigroup", "orthogonality", "constants"]

[front]
kind = "surface"
position = ["cos(s1)*(cos(s1) + 6)/4", "4/13*sin(s1)*(3 - sin(s1))", "s2"]
range = [0, "2*pi"]
range2 = [0, 2]
periodic = [true, false]

[sampling]
surface = [32, 8]
dt = 0.01
"#;

/// TOML text of a fixture.
pub fn fixture_text(name: &str) -> Option<String> {
    let (head, body, tail) = match name {
        "example1_case1" => (EXAMPLE1_HEAD, EXAMPLE1_CASE1, ""),
        "example1_case2" => (EXAMPLE1_HEAD, EXAMPLE1_CASE2, ""),
        "example1_case3" => (EXAMPLE1_HEAD, EXAMPLE1_CASE3, ""),
        "example2_case1" => (EXAMPLE2_HEAD, EXAMPLE2_CASE1, EXAMPLE2_TAIL),
        "example2_case2" => (EXAMPLE2_HEAD, EXAMPLE2_CASE2, EXAMPLE2_TAIL),
        "example2_case3" => (EXAMPLE2_HEAD, EXAMPLE2_CASE3, EXAMPLE2_TAIL),
        _ => return None,
    };
    // Top-level keys of the body must precede the head's tables.
    let (keys, tables) = body.split_once("\n[").map_or((body, String::new()), |(k, t)| (k, format!("\n[{t}")));
    let (schema, rest) = head.split_once("\n[").unwrap();
    Some(format!("{schema}{keys}\n[{rest}{tables}{tail}"))
}

pub fn fixture(name: &str) -> Option<Scenario> {
    fixture_text(name).map(|t| parse_scenario(&t).expect("fixtures are valid"))
}

/// The metric matrix of Example 1.
pub fn example1_metric() -> Mat3 {
    let r = 3.0 * 3f64.sqrt() / 16.0;
    Mat3([[4.0, 0.0, 0.0], [0.0, 13.0 / 16.0, -r], [0.0, -r, 7.0 / 16.0]])
}

/// Closed forms of Example 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example1Constants {
    /// Coefficients of `u², v², w², v, w, vw` in the expanded indicatrix equation.
    pub quadric_coeffs: [f64; 6],
    pub quadric_rhs: f64,
    /// Factor of `(−sin 2s + 3 cos s)` in the tangency equation of case 2.
    pub tangency_factor: f64,
}

impl Example1Constants {
    /// Left-hand side of the expanded indicatrix equation at `V = (u, v, w)`.
    pub fn quadric(&self, p: Vec3) -> f64 {
        let c = self.quadric_coeffs;
        let (u, v, w) = (p.x, p.y, p.z);
        c[0] * u * u + c[1] * v * v + c[2] * w * w + c[3] * v + c[4] * w + c[5] * v * w
    }

    /// Residual of the tangency condition `⟨V − W, C′(s)⟩_h = 0` as written out for case 2.
    pub fn tangency(&self, v: Vec3, s: f64) -> f64 {
        let (u2, u3) = (v.y - 1.0 / 3.0, v.z - 1.0 / 6.0);
        let r = 3.0 * 3f64.sqrt() / 16.0;
        -v.x * ((2.0 * s).sin() + 6.0 * s.sin())
            + (13.0 / 16.0 * u2 - r * u3) * self.tangency_factor * (-(2.0 * s).sin() + 3.0 * s.cos())
    }
}

pub fn example1_constants(set: ConstantSet) -> Example1Constants {
    let r3 = 3f64.sqrt();
    match set {
        ConstantSet::Printed => Example1Constants {
            quadric_coeffs: [64.0, 13.0, 7.0, -(26.0 / 3.0 + r3), 2.0 * r3 - 7.0 / 3.0, -6.0 * r3],
            quadric_rhs: r3 / 3.0 + 635.0 / 36.0,
            tangency_factor: 1.0 / 13.0,
        },
        ConstantSet::Derived => Example1Constants {
            quadric_coeffs: [64.0, 13.0, 7.0, -26.0 / 3.0 + r3, 2.0 * r3 - 7.0 / 3.0, -6.0 * r3],
            quadric_rhs: 517.0 / 36.0 + r3 / 3.0,
            tangency_factor: 4.0 / 13.0,
        },
    }
}

/// Constants of Example 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example2Constants {
    /// `h = R_y(y)ᵀ diag(d) R_y(y)`.
    pub d: [f64; 3],
}

pub fn example2_constants(set: ConstantSet) -> Example2Constants {
    match set {
        ConstantSet::Printed => Example2Constants { d: [1.0, 0.5, 2.0] },
        ConstantSet::Derived => Example2Constants { d: [1.0, 4.0, 0.25] },
    }
}

/// Closed-form solution of the reference system `x″ = −y′z′, y″ = 0, z″ = x′y′`
/// for a Randers velocity `v` at `p` (so `γ_h′(0) = (v₁ − k y, v₂, v₃)`), `v₂ ≠ 0`.
pub fn eq2_position(set: ConstantSet, p: Point3, v: Vec3, k: f64, t: f64) -> Point3 {
    let (a1, v2, v3) = (v.x - k * p.y, v.y, v.z);
    match set {
        ConstantSet::Printed => Point3::new(
            p.x - v3 / v2 + t * v3 / v2 * v2.cos() + t * a1 / v2 * v2.sin(),
            t * v2 + p.y,
            p.z - a1 / v2 - t * a1 / v2 * v2.cos() + t * v3 / v2 * v2.sin(),
        ),
        ConstantSet::Derived => Point3::new(
            p.x - v3 / v2 + v3 / v2 * (v2 * t).cos() + a1 / v2 * (v2 * t).sin(),
            t * v2 + p.y,
            p.z + a1 / v2 - a1 / v2 * (v2 * t).cos() + v3 / v2 * (v2 * t).sin(),
        ),
    }
}

/// Largest distance over `t ∈ [0, 1]` between [`eq2_position`] and an RK4
/// solution of the reference system, for a fixed generic initial state.
pub fn eq2_residual(set: ConstantSet, k: f64) -> f64 {
    let p = Point3::new(0.3, -0.2, 0.5);
    let v = Vec3::new(0.4, 0.9, -0.6);
    let acc = |u: Vec3| Vec3::new(-u.y * u.z, 0.0, u.x * u.y);
    let n = 1000;
    let h = 1.0 / n as f64;
    let (mut x, mut u) = (p, Vec3::new(v.x - k * p.y, v.y, v.z));
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let (k1x, k1v) = (u, acc(u));
        let (k2x, k2v) = (u + k1v * (h / 2.0), acc(u + k1v * (h / 2.0)));
        let (k3x, k3v) = (u + k2v * (h / 2.0), acc(u + k2v * (h / 2.0)));
        let (k4x, k4v) = (u + k3v * h, acc(u + k3v * h));
        x += (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
        u += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
        let t = (i + 1) as f64 * h;
        worst = worst.max((x - eq2_position(set, p, v, k, t)).norm());
    }
    worst
}
