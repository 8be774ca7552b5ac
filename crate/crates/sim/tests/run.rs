use wildfront::checks::{nesting, straight_path};
use wildfront::output::{write_fronts_csv, write_outputs, write_report_json};
use wildfront::svg::slice_report;
use wildfront::windfile::write_wind_grid;
use wildfront::{fixtures, parse_scenario, render_slice, run_scenario, Error, Model};
use wildfront_core::{hausdorff_points, Plane, Point3, Vec3};

fn scenario(body: &str) -> wildfront::Scenario {
    parse_scenario(&format!("schema = \"wildfront.scenario/1\"\nname = \"t\"\n{body}")).unwrap()
}

const UNIT: &str = r#"
times = [1]

[metric]
a = 1
b = 1
c = 1

[front]
kind = "point"
position = [0, 0, 0]

[sampling]
fan = { n_lat = 9, n_lon = 16, poles = true }
"#;

const CALM: &str = "\n[[wind]]\nstart = 0\nend = 1\nvalue = [0, 0, 0]\n";

#[test]
fn zero_wind_euclidean_point_source_gives_the_unit_sphere() {
    let r = run_scenario(&scenario(&format!("{UNIT}{CALM}"))).unwrap();
    assert_eq!(r.fronts.len(), 1);
    assert_eq!(r.fronts[0].time, 1.0);
    for p in &r.fronts[0].points {
        assert!((p.norm() - 1.0).abs() < 1e-12, "{p:?}");
    }
    assert_eq!(r.segments.len(), 1);
}

fn chained(segments: &[(f64, f64)]) -> wildfront::Scenario {
    let mut text = String::from(
        r#"times = [2]

[metric]
a = 0.5
b = 1
c = 2
alpha = "pi/6"

[front]
kind = "curve"
position = ["cos(s)*(cos(s) + 6)/4", "4/13*sin(s)*(3 - sin(s))", 0]
range = [0, "2*pi"]
closed = true

[sampling]
curve = 64
psi = 9

[output]
grid = { u = [-4, 4], v = [-4, 6], n = [81, 101] }
"#,
    );
    for (a, b) in segments {
        text += &format!("\n[[wind]]\nstart = {a}\nend = {b}\nvalue = [0, \"1/3\", \"1/6\"]\n");
    }
    scenario(&text)
}

#[test]
fn chained_segments_match_a_single_segment() {
    let one = chained(&[(0.0, 2.0)]);
    let two = chained(&[(0.0, 1.0), (1.0, 2.0)]);
    let spacing = Model::new(&one).unwrap().lattice.unwrap().spacing();
    let a = run_scenario(&one).unwrap();
    let b = run_scenario(&two).unwrap();
    assert_eq!(b.segments.len(), 2);
    let d = hausdorff_points(&a.fronts[0].points, &b.fronts[0].points);
    assert!(d <= 2.0 * spacing, "{d} vs {spacing}");
}

#[test]
fn runs_are_bit_identical() {
    let s = fixtures::fixture("example1_case2").unwrap();
    let outputs = |r: &wildfront::RunReport| {
        let (mut csv, mut json) = (Vec::new(), Vec::new());
        write_fronts_csv(r, &mut csv).unwrap();
        write_report_json(r, &mut json).unwrap();
        (csv, json)
    };
    let a = outputs(&run_scenario(&s).unwrap());
    let b = outputs(&run_scenario(&s).unwrap());
    assert!(a == b);
    assert!(a.0.starts_with(b"# wildfront.fronts/1\ntau,sample_id,x,y,z,vx0,vy0,vz0\n"));
}

#[test]
fn output_directory_holds_every_file() {
    let dir = tempfile::tempdir().unwrap();
    let s = fixtures::fixture("example1_case1").unwrap();
    let mut r = run_scenario(&s).unwrap();
    let files = write_outputs(&mut r, dir.path()).unwrap();
    assert_eq!(files.len(), 4);
    assert!(r.errors.is_empty());
    let json = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(json.contains("\"schema\": \"wildfront.report/1\""));
    let rays = std::fs::read_to_string(dir.path().join("rays.csv")).unwrap();
    assert!(rays.starts_with("# wildfront.rays/1\nquery,t,x,y,z\n"));
    let back = wildfront::output::read_report_json(&dir.path().join("report.json")).unwrap();
    assert_eq!(back.fronts.len(), r.fronts.len());
}

#[test]
fn example1_slice_has_ten_nested_closed_contours_and_a_straight_path() {
    let s = fixtures::fixture("example1_case1").unwrap();
    let r = run_scenario(&s).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("slice.svg");
    let slices = render_slice(&r, &Plane::z(0.0), &out).unwrap();
    assert_eq!(slices.len(), 10);
    for s in &slices {
        assert_eq!(s.contours.len(), 1);
        let c = &s.contours[0];
        assert!(c.closed);
        assert_eq!(c.points.first(), c.points.last());
    }
    let svg = std::fs::read_to_string(&out).unwrap();
    assert!(svg.contains("data-schema=\"wildfront.slice/1\""));
    assert_eq!(svg.matches("<polygon").count(), 10);
    assert_eq!(svg.matches("class=\"strategic-path\"").count(), 1);
    assert!(nesting(&r, &Plane::z(0.0)).passed);
    assert!(straight_path(&r).passed);
}

#[test]
fn empty_reports_have_no_slice() {
    let s = fixtures::fixture("example1_case1").unwrap();
    let mut r = run_scenario(&s).unwrap();
    r.fronts.clear();
    assert!(matches!(slice_report(&r, &Plane::z(0.0)), Err(Error::EmptyIntersection)));
    let far = Plane::new(Point3::new(0.0, 0.0, 100.0), Vec3::Z).unwrap();
    let r = run_scenario(&s).unwrap();
    assert!(matches!(slice_report(&r, &far), Err(Error::EmptyIntersection)));
}

#[test]
fn missed_slices_are_recorded_as_errors() {
    let s = scenario(&format!("{UNIT}{CALM}\n[output]\nslice = {{ point = [0, 0, 5], normal = [0, 0, 1] }}\n"));
    let mut r = run_scenario(&s).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = write_outputs(&mut r, dir.path()).unwrap();
    assert_eq!(files.len(), 3);
    assert_eq!(r.errors.len(), 1);
}

#[test]
fn gridded_wind_matches_the_constant_wind() {
    let dir = tempfile::tempdir().unwrap();
    let w = Vec3::new(0.0, 0.3, 0.0);
    let f = std::fs::File::create(dir.path().join("wind.csv")).unwrap();
    write_wind_grid(f, Point3::new(-4.0, -4.0, -4.0), Vec3::new(1.0, 1.0, 1.0), [9, 9, 9], |_| w).unwrap();
    let body = |wind: &str| format!("{}\n{wind}", UNIT.replace("times = [1]", "times = [1, 2]"));
    let text = |wind: &str| format!("schema = \"wildfront.scenario/1\"\nname = \"t\"\n{}", body(wind));
    let file = wildfront::config::parse_scenario_in(
        &text("[[wind]]\nstart = 0\nend = 2\nkind = \"file\"\npath = \"wind.csv\"\n"),
        Some(dir.path()),
    )
    .unwrap();
    let constant = scenario(&body("[[wind]]\nstart = 0\nend = 2\nvalue = [0, 0.3, 0]\n"));
    let a = run_scenario(&file).unwrap();
    let b = run_scenario(&constant).unwrap();
    let d = hausdorff_points(&a.fronts[1].points, &b.fronts[1].points);
    assert!(d < 1e-6, "{d}");
}

#[test]
fn fixtures_pass_their_checks() {
    for name in ["example1_case1", "example1_case3", "example2_case3"] {
        let r = run_scenario(&fixtures::fixture(name).unwrap()).unwrap();
        for c in &r.checks {
            assert!(c.passed, "{name}: {c:?}");
        }
    }
}
