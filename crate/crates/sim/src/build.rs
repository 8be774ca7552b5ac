//! Turns a validated [`Scenario`] into core types.

use wildfront_core::{
    Aabb, CurveFront, EllipsoidSpec, FrontGeometry, Lattice, Mat3, MetricField, Param, Plane, Point3, Region,
    SurfaceFront, Vec3, WindField, WindSchedule, WindSegment, ZermeloData,
};

use crate::config::{
    ConfigError, FrontKind, Num, RegionConfig, RegionKind, Scenario, Vars, WindConfig, WindKind,
};
use crate::expr::Expr;
use crate::windfile;

const XYZ: [&str; 3] = ["x", "y", "z"];

fn invalid(invariant: &'static str, detail: impl Into<String>) -> ConfigError {
    ConfigError::Validation { invariant, detail: detail.into() }
}

fn param(n: &Num, vars: &Vars) -> Result<Param, ConfigError> {
    let e = n.compile(&XYZ, vars)?;
    if e.depends_on_args() {
        Ok(Param::field(move |p| e.eval(&[p.x, p.y, p.z])))
    } else {
        Ok(Param::Constant(n.value(vars)?))
    }
}

fn vec3(v: &[Num; 3], vars: &Vars) -> Result<Vec3, ConfigError> {
    Ok(Vec3::new(v[0].value(vars)?, v[1].value(vars)?, v[2].value(vars)?))
}

pub fn metric_spec(s: &Scenario, vars: &Vars) -> Result<EllipsoidSpec, ConfigError> {
    let m = &s.metric;
    Ok(EllipsoidSpec {
        a: param(&m.a, vars)?,
        b: param(&m.b, vars)?,
        c: param(&m.c, vars)?,
        alpha: param(&m.alpha, vars)?,
        beta: param(&m.beta, vars)?,
        theta: param(&m.theta, vars)?,
    })
}

fn wind_field(s: &Scenario, w: &WindConfig, vars: &Vars) -> Result<WindField, ConfigError> {
    match w.kind {
        WindKind::Field => {
            let v = w.value.as_ref().unwrap();
            let ex: Vec<Expr> = v.iter().map(|n| n.compile(&XYZ, vars)).collect::<Result<_, _>>()?;
            if ex.iter().any(Expr::depends_on_args) {
                Ok(WindField::analytic(move |p| {
                    let a = [p.x, p.y, p.z];
                    Vec3::new(ex[0].eval(&a), ex[1].eval(&a), ex[2].eval(&a))
                }))
            } else {
                Ok(WindField::constant(vec3(v, vars)?))
            }
        }
        WindKind::Affine => {
            let m = w.matrix.as_ref().unwrap();
            let rows = [vec3(&m[0], vars)?, vec3(&m[1], vars)?, vec3(&m[2], vars)?];
            let a = Mat3(rows.map(|r| r.to_array()));
            let b = match &w.offset {
                Some(o) => vec3(o, vars)?,
                None => Vec3::ZERO,
            };
            Ok(WindField::affine(a, b))
        }
        WindKind::File => {
            let p = s.resolve_path(w.path.as_ref().unwrap());
            let g = windfile::read_wind_grid(&p).map_err(|e| invalid("wind_file", e.to_string()))?;
            Ok(WindField::grid(g))
        }
    }
}

pub fn wind_schedule(s: &Scenario, vars: &Vars) -> Result<WindSchedule, ConfigError> {
    let mut segs = Vec::new();
    for w in &s.wind {
        segs.push(WindSegment { start: w.start.value(vars)?, end: w.end.value(vars)?, wind: wind_field(s, w, vars)? });
    }
    WindSchedule::new(segs).map_err(|e| invalid("wind_segments", e.to_string()))
}

fn range(r: &Option<[Num; 2]>, vars: &Vars) -> Result<(f64, f64), ConfigError> {
    let r = r.as_ref().ok_or_else(|| invalid("front", "missing parameter range"))?;
    Ok((r[0].value(vars)?, r[1].value(vars)?))
}

pub fn front(s: &Scenario, vars: &Vars) -> Result<FrontGeometry, ConfigError> {
    let f = &s.front;
    match f.kind {
        FrontKind::Point => Ok(FrontGeometry::Point(vec3(&f.position, vars)?)),
        FrontKind::Curve => {
            let ex: Vec<Expr> = f.position.iter().map(|n| n.compile(&["s"], vars)).collect::<Result<_, _>>()?;
            let c = CurveFront::new(
                move |s| Point3::new(ex[0].eval(&[s]), ex[1].eval(&[s]), ex[2].eval(&[s])),
                range(&f.range, vars)?,
                f.closed.unwrap_or(false),
            );
            Ok(FrontGeometry::Curve(c))
        }
        FrontKind::Surface => {
            let ex: Vec<Expr> =
                f.position.iter().map(|n| n.compile(&["s1", "s2"], vars)).collect::<Result<_, _>>()?;
            let sf = SurfaceFront::new(
                move |a, b| Point3::new(ex[0].eval(&[a, b]), ex[1].eval(&[a, b]), ex[2].eval(&[a, b])),
                range(&f.range, vars)?,
                range(&f.range2, vars)?,
                f.periodic.unwrap_or([false, false]),
            );
            Ok(FrontGeometry::Surface(sf))
        }
    }
}

pub fn region(r: &RegionConfig, vars: &Vars) -> Result<Region, ConfigError> {
    Ok(match r.kind {
        RegionKind::Ball => Region::Ball {
            center: vec3(r.center.as_ref().unwrap(), vars)?,
            radius: r.radius.as_ref().unwrap().value(vars)?,
        },
        RegionKind::HalfSpace => Region::HalfSpace {
            point: vec3(r.point.as_ref().unwrap(), vars)?,
            normal: vec3(r.normal.as_ref().unwrap(), vars)?,
        },
        RegionKind::Implicit => {
            let e = Num::Expr(r.expr.clone().unwrap()).compile(&XYZ, vars)?;
            Region::implicit(move |p| e.eval(&[p.x, p.y, p.z]))
        }
    })
}

pub fn plane(s: &Scenario) -> Result<Plane, ConfigError> {
    let sl = &s.output.slice;
    Plane::new(Vec3::from_array(sl.point), Vec3::from_array(sl.normal)).map_err(|e| invalid("output_slice", e.to_string()))
}

/// The output lattice on the slice plane.
pub fn lattice(s: &Scenario) -> Result<Option<Lattice>, ConfigError> {
    let Some(g) = &s.output.grid else { return Ok(None) };
    let plane = plane(s)?;
    Lattice::planar(&plane, (g.u[0], g.u[1]), (g.v[0], g.v[1]), g.n)
        .map(Some)
        .map_err(|e| invalid("output_grid", e.to_string()))
}

/// Everything needed to run a scenario.
#[derive(Debug, Clone)]
pub struct Model {
    pub spec: EllipsoidSpec,
    pub metric: MetricField,
    pub schedule: WindSchedule,
    pub front: FrontGeometry,
    pub times: Vec<f64>,
    pub plane: Plane,
    pub lattice: Option<Lattice>,
}

impl Model {
    pub fn new(s: &Scenario) -> Result<Self, ConfigError> {
        Self::new_unchecked(s, &s.vars()?)
    }

    /// Zermelo data of wind segment `k`.
    pub fn data(&self, k: usize) -> ZermeloData {
        ZermeloData { metric: self.metric.clone(), wind: self.schedule.segments()[k].wind.clone() }
    }
}

fn probe(e: &Expr, args: &[f64], what: &str) -> Result<(), ConfigError> {
    let v = e.eval(args);
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid("expression", format!("{what} `{}` is not finite at {args:?}", e.source())))
    }
}

/// Compiles every expression and checks navigability over the configured domain.
pub(crate) fn check_expressions(s: &Scenario, vars: &Vars) -> Result<(), ConfigError> {
    let m = &s.metric;
    for n in [&m.a, &m.b, &m.c, &m.alpha, &m.beta, &m.theta] {
        n.compile(&XYZ, vars)?;
    }
    let args: &[&str] = match s.front.kind {
        FrontKind::Point => &[],
        FrontKind::Curve => &["s"],
        FrontKind::Surface => &["s1", "s2"],
    };
    for n in &s.front.position {
        let e = n.compile(args, vars)?;
        probe(&e, &vec![0.5; args.len()], "front coordinate")?;
    }
    for w in &s.wind {
        for n in w.value.iter().flatten().chain(w.matrix.iter().flatten().flatten()).chain(w.offset.iter().flatten()) {
            n.compile(&XYZ, vars)?;
        }
    }
    for q in &s.strategy {
        if let Some(r) = &q.region {
            if let Some(e) = &r.expr {
                Num::Expr(e.clone()).compile(&XYZ, vars)?;
            }
        }
    }
    let model = Model::new_unchecked(s, vars)?;
    let points: Vec<Point3> = match &s.output.domain {
        Some(d) => Aabb::new(Vec3::from_array(d.min), Vec3::from_array(d.max)).grid_points(9),
        None => model.front.probe_points(),
    };
    for k in 0..model.schedule.segments().len() {
        let data = model.data(k);
        for &p in &points {
            data.at(p).map_err(|e| invalid("navigable", format!("wind segment {k} at {p:?}: {e}")))?;
        }
    }
    Ok(())
}

impl Model {
    fn new_unchecked(s: &Scenario, vars: &Vars) -> Result<Self, ConfigError> {
        let spec = metric_spec(s, vars)?;
        Ok(Model {
            metric: spec.clone().into(),
            spec,
            schedule: wind_schedule(s, vars)?,
            front: front(s, vars)?,
            times: s.time_values()?,
            plane: plane(s)?,
            lattice: lattice(s)?,
        })
    }
}
