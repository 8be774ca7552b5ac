use proptest::prelude::*;
use wildfront_core::*;

use std::f64::consts::{PI, TAU};

fn example1() -> ZermeloData {
    let spec = EllipsoidSpec::new(0.5, 1.0, 2.0).with_angles(PI / 6.0, 0.0, 0.0);
    ZermeloData::new(spec, WindField::constant(Vec3::new(0.0, 1.0 / 3.0, 1.0 / 6.0)))
}

fn c_curve(s: f64) -> Point3 {
    Point3::new(0.25 * s.cos() * (s.cos() + 6.0), 4.0 / 13.0 * s.sin() * (3.0 - s.sin()), 0.0)
}

fn curve_front() -> FrontGeometry {
    FrontGeometry::Curve(CurveFront::new(c_curve, full_turn(), true))
}

fn arb_data() -> impl Strategy<Value = ZermeloData> {
    (
        prop::array::uniform3(0.2f64..5.0),
        prop::array::uniform3(-PI..PI),
        prop::array::uniform3(-1.0f64..1.0),
        0.0f64..0.9,
    )
        .prop_map(|(d, ang, wd, r)| {
            let h = SpdMatrix3::from_rotation_diag(&rotation_matrix(ang[0], ang[1], ang[2]), d).unwrap();
            let wd = Vec3::from_array(wd);
            let n = h.norm(wd);
            let w = if n > 1e-6 { wd * (r / n) } else { Vec3::ZERO };
            ZermeloData::new(h, WindField::constant(w))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn curve_launches_are_f_orthogonal(data in arb_data(), s in 0.0f64..TAU, side in 0usize..3) {
        let side = [Side::Outward, Side::Inward, Side::Both][side];
        let sampling = Sampling { psi: 7, side, ..Sampling::default() };
        let c = CurveFront::new(c_curve, full_turn(), true);
        let t = c.tangent(s);
        let front = FrontGeometry::Curve(c);
        for v in launch_directions(&data, &front, FrontParam::Curve(s), &sampling).unwrap() {
            prop_assert!(is_f_orthogonal(&data, Point3::ZERO, t, v, 1e-8).unwrap());
            prop_assert!((eval_randers(&data, Point3::ZERO, v).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn surface_launches_are_f_orthogonal(data in arb_data(), a in 0.0f64..TAU, b in 0.0f64..2.0) {
        let sf = SurfaceFront::new(|u, w| c_curve(u) + Vec3::Z * w, full_turn(), (0.0, 2.0), [true, false]);
        let (t1, t2) = sf.tangents(a, b);
        let front = FrontGeometry::Surface(sf);
        let s = Sampling { side: Side::Both, ..Sampling::default() };
        let vs = launch_directions(&data, &front, FrontParam::Surface(a, b), &s).unwrap();
        prop_assert_eq!(vs.len(), 2);
        for v in vs {
            prop_assert!(is_f_orthogonal(&data, Point3::ZERO, t1, v, 1e-8).unwrap());
            prop_assert!(is_f_orthogonal(&data, Point3::ZERO, t2, v, 1e-8).unwrap());
        }
    }
}

#[test]
fn plane_launches_upward() {
    let data = ZermeloData::new(MetricField::euclidean(), WindField::zero());
    let sf = SurfaceFront::new(|u, w| Point3::new(u, w, 0.0), (-1.0, 1.0), (-1.0, 1.0), [false, false])
        .with_outward(|_, _| Vec3::Z);
    let vs = launch_directions(&data, &FrontGeometry::Surface(sf), FrontParam::Surface(0.2, 0.3), &Sampling::default()).unwrap();
    assert_eq!(vs.len(), 1);
    assert!((vs[0] - Vec3::Z).max_abs() < 1e-15);
}

/// Tangency equation of the curve case written out in components, with the
/// `C′` factor `k` multiplying `(−sin 2s + 3 cos s)`.
fn tangency(v: Vec3, s: f64, k: f64) -> f64 {
    let (u2, u3) = (v.y - 1.0 / 3.0, v.z - 1.0 / 6.0);
    -v.x * ((2.0 * s).sin() + 6.0 * s.sin()) + (13.0 / 16.0 * u2 - 3.0 * 3f64.sqrt() / 16.0 * u3) * k * (-(2.0 * s).sin() + 3.0 * s.cos())
}

#[test]
fn curve_launches_solve_the_tangency_system() {
    let data = example1();
    let front = curve_front();
    let s = Sampling::default();
    // At s = 0 the printed and the derived factor (4/13) agree.
    for v in launch_directions(&data, &front, FrontParam::Curve(0.0), &s).unwrap() {
        assert!(tangency(v, 0.0, 1.0 / 13.0).abs() <= 1e-9);
        let spec = EllipsoidSpec::new(0.5, 1.0, 2.0).with_angles(PI / 6.0, 0.0, 0.0);
        let q = quadratic_eval(&spec, Point3::ZERO, v - Vec3::new(0.0, 1.0 / 3.0, 1.0 / 6.0)).unwrap();
        assert!((q - 1.0).abs() < 1e-12);
    }
    for sp in [0.4, 1.3, 2.9, 4.4] {
        for v in launch_directions(&data, &front, FrontParam::Curve(sp), &s).unwrap() {
            assert!(tangency(v, sp, 4.0 / 13.0).abs() <= 1e-9);
        }
    }
}

#[test]
fn surface_launches_satisfy_the_vertical_equation() {
    let data = example1();
    let sf = SurfaceFront::new(|u, w| c_curve(u) + Vec3::Z * w, full_turn(), (0.0, 2.0), [true, false]);
    let front = FrontGeometry::Surface(sf);
    for (a, b) in [(0.3, 0.5), (2.0, 1.5), (5.0, 0.1)] {
        for v in launch_directions(&data, &front, FrontParam::Surface(a, b), &Sampling::default()).unwrap() {
            let lhs = 3.0 * 3f64.sqrt() / 7.0 * (v.y - 1.0 / 3.0);
            assert!((lhs - (v.z - 1.0 / 6.0)).abs() < 1e-12);
        }
    }
}

#[test]
fn point_launches_contain_the_reference_velocity() {
    let data = example1();
    let s = Sampling { fan: SphereGrid::new(33, 64), ..Sampling::default() };
    let vs = launch_directions(&data, &FrontGeometry::Point(Point3::ZERO), FrontParam::Point, &s).unwrap();
    let target = Vec3::new(0.5, 1.0 / 3.0, 1.0 / 6.0);
    assert!(vs.iter().any(|v| (*v - target).max_abs() < 1e-12));
}

#[test]
fn constant_sphere_equation() {
    let data = example1();
    let w = spherical_wavefront(&data, Point3::ZERO, 3.0, 512).unwrap();
    assert_eq!(w.len(), 512);
    let spec = EllipsoidSpec::new(0.5, 1.0, 2.0).with_angles(PI / 6.0, 0.0, 0.0);
    let wind = Vec3::new(0.0, 1.0 / 3.0, 1.0 / 6.0);
    for q in &w.points {
        assert!((quadratic_eval(&spec, Point3::ZERO, (*q - wind * 3.0) / 3.0).unwrap() - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn semigroup_for_the_curve_front() {
    let data = example1();
    let s = Sampling { curve: 128, psi: 15, ..Sampling::default() };
    let front = curve_front();
    let direct = propagate_front(&data, &front, 2.0, &s).unwrap();
    let first = propagate_front(&data, &front, 1.0, &s).unwrap();
    let second = propagate_front(&data, &first.to_front(), 1.0, &s).unwrap();
    assert!(hausdorff_points(&direct.points, &second.points) <= 1e-12);
    let plane = Plane::z(0.0);
    let d = hausdorff_polylines(&direct.slice(&plane), &second.slice(&plane));
    assert!(d <= 1e-3, "{d}");
}

#[test]
fn multi_time_propagation_matches_single_times() {
    let data = example1();
    let s = Sampling { curve: 32, psi: 5, ..Sampling::default() };
    let front = curve_front();
    let many = propagate_front_at(&data, &front, &[0.0, 1.0, 2.5], &s).unwrap();
    for w in &many {
        let one = propagate_front(&data, &front, w.time, &s).unwrap();
        assert_eq!(one.points, w.points);
    }
    assert_eq!(many[0].points[3], many[0].provenance[3].origin);
}

#[test]
fn huygens_matches_rays_for_the_curve_front() {
    let data = example1();
    let s = Sampling { curve: 256, psi: 33, ..Sampling::default() };
    let front = curve_front();
    let src = propagate_front(&data, &front, 0.0, &s).unwrap();
    let lattice = Lattice::planar(&Plane::z(0.0), (-3.0, 3.5), (-3.0, 3.0), [129, 129]).unwrap();
    let env = huygens_step(&data, &src, 1.0, &lattice, &s).unwrap();
    let rays = propagate_front(&data, &front, 1.0, &s).unwrap();
    let plane = Plane::z(0.0);
    let outer: Vec<Polyline> = rays.slice(&plane).into_iter().filter(|p| p.closed).collect();
    let d = hausdorff_polylines(&env.slice(&plane), &outer);
    assert!(d <= 2.0 * lattice.spacing(), "{d}");
}

#[test]
fn arrival_level_sets_are_nested() {
    let data = example1();
    let lattice = Lattice::planar(&Plane::z(0.0), (-4.0, 4.0), (-4.0, 6.0), [81, 101]).unwrap();
    let f = arrival_time_field(&data, &curve_front(), &lattice, 3.0, &Sampling::default()).unwrap();
    assert!(f.is_nested(&[0.5, 1.0, 2.0, 3.0]));
    let counts: Vec<usize> = [0.5, 1.0, 2.0, 3.0].iter().map(|&t| f.sublevel_count(t)).collect();
    assert!(counts.windows(2).all(|w| w[0] < w[1]));
    let rep = f.lipschitz(&data, 1e-9).unwrap();
    assert_eq!(rep.violations, 0, "{rep:?}");
}
