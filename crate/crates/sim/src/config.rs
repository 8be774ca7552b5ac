//! Scenario files.
//!
//! A scenario is a TOML document tagged `schema = "wildfront.scenario/1"`.
//! Numbers may be written as literals or as expression strings such as
//! `"pi/6"`; expressions are kept verbatim so a scenario serializes back to
//! the same text it was read from.
//!
//! ```toml
//! schema = "wildfront.scenario/1"
//! name = "example1_case1"
//! times = [1, 2, 3]
//!
//! [metric]
//! a = 0.5
//! b = 1
//! c = 2
//! alpha = "pi/6"
//!
//! [[wind]]
//! start = 0
//! end = 10
//! value = [0, "1/3", "1/6"]
//!
//! [front]
//! kind = "point"
//! position = [0, 0, 0]
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use wildfront_core::Sampling;

use crate::expr::{self, Expr};

pub const SCHEMA: &str = "wildfront.scenario/1";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid scenario ({invariant}): {detail}")]
    Validation { invariant: &'static str, detail: String },
}

fn invalid(invariant: &'static str, detail: impl Into<String>) -> ConfigError {
    ConfigError::Validation { invariant, detail: detail.into() }
}

/// A literal number or an expression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Value(f64),
    Expr(String),
}

impl From<f64> for Num {
    fn from(v: f64) -> Self {
        Num::Value(v)
    }
}

impl From<&str> for Num {
    fn from(s: &str) -> Self {
        Num::Expr(s.to_string())
    }
}

impl Default for Num {
    fn default() -> Self {
        Num::Value(0.0)
    }
}

impl Num {
    fn source(&self) -> String {
        match self {
            Num::Value(v) => format!("{v:?}"),
            Num::Expr(s) => s.clone(),
        }
    }

    /// Compiles the number as an expression of `args`.
    pub fn compile(&self, args: &[&str], vars: &Vars) -> Result<Expr, ConfigError> {
        Expr::new(&self.source(), args, vars.clone()).map_err(|e| invalid("expression", e.to_string()))
    }

    /// Evaluates a number that must not depend on position.
    pub fn value(&self, vars: &Vars) -> Result<f64, ConfigError> {
        match self {
            Num::Value(v) if v.is_finite() => Ok(*v),
            Num::Value(v) => Err(invalid("expression", format!("{v} is not finite"))),
            Num::Expr(s) => expr::constant(s, vars).map_err(|e| invalid("expression", e.to_string())),
        }
    }
}

pub type Vars = Arc<BTreeMap<String, f64>>;

const RESERVED: [&str; 9] = ["x", "y", "z", "s", "s1", "s2", "pi", "tau", "e"];

fn is_zero(n: &Num) -> bool {
    *n == Num::Value(0.0)
}

/// Ellipsoid axes and rotation angles; any of them may depend on `x, y, z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricConfig {
    pub a: Num,
    pub b: Num,
    pub c: Num,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub alpha: Num,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub beta: Num,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub theta: Num,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindKind {
    /// Components given by `value`, as expressions of `x, y, z`.
    #[default]
    Field,
    /// `matrix · p + offset`.
    Affine,
    /// Samples on a regular grid read from a CSV file.
    File,
}

/// One time-independent wind on `[start, end)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindConfig {
    pub start: Num,
    pub end: Num,
    #[serde(default)]
    pub kind: WindKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<[Num; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<[[Num; 3]; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<[Num; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrontKind {
    Point,
    Curve,
    Surface,
}

/// The initial front `A`: a point, a curve in `s` or a surface in `(s1, s2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontConfig {
    pub kind: FrontKind,
    pub position: [Num; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<[Num; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range2: Option<[Num; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periodic: Option<[bool; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceConfig {
    pub point: [f64; 3],
    pub normal: [f64; 3],
}

impl Default for SliceConfig {
    fn default() -> Self {
        SliceConfig { point: [0.0; 3], normal: [0.0, 0.0, 1.0] }
    }
}

/// A lattice on the slice plane, in plane coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub u: [f64; 2],
    pub v: [f64; 2],
    pub n: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub slice: SliceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    /// Computes the arrival-time field on `grid`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub arrival: bool,
    /// Box over which the wind must stay navigable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    AllEqual,
    Point,
    Region,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    Ball,
    HalfSpace,
    /// `{g(x, y, z) ≤ 0}` with `g` given by `expr`.
    Implicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub kind: RegionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<[Num; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<[Num; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal: Option<[Num; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    /// Time of the reference front for `all_equal`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<[Num; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionConfig>,
    /// Longest ray time for target queries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<Num>,
    /// Times of the strategic points along the path.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points_at: Vec<Num>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Slices of consecutive fronts are nested and do not cross.
    Nesting,
    /// Front centroids move with the wind.
    Drift,
    /// Constant-mode strategic paths are straight.
    StraightPath,
    /// Propagating twice by 1 equals propagating once by 2.
    Semigroup,
    /// Huygens envelope at r = 1 agrees with the ray front.
    Envelope,
    /// Launch velocities are F-orthogonal to the front.
    Orthogonality,
    /// F-speed conservation and RK4 self-convergence of the wave rays.
    Geodesic,
    /// Closed-form constants of the worked example.
    Constants,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstantSet {
    /// Values as printed in the source of the example.
    Printed,
    /// Values re-derived from the example's data.
    #[default]
    Derived,
}

/// Which worked example the scenario reproduces and which constants to assert.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceConfig {
    pub example: u8,
    #[serde(default)]
    pub constants: ConstantSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// Front times to report.
    pub times: Vec<Num>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckKind>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub vars: BTreeMap<String, Num>,
    pub metric: MetricConfig,
    pub wind: Vec<WindConfig>,
    pub front: FrontConfig,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub strategy: Vec<StrategyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceConfig>,
    /// Directory that relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.chars().count(), |i| before[i + 1..].chars().count()) + 1;
    (line, column)
}

/// Parses and validates a scenario; relative paths resolve against the working directory.
pub fn parse_scenario(text: &str) -> Result<Scenario, ConfigError> {
    parse_scenario_in(text, None)
}

/// Parses and validates a scenario whose relative paths resolve against `base`.
pub fn parse_scenario_in(text: &str, base: Option<&Path>) -> Result<Scenario, ConfigError> {
    let mut s: Scenario = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |r| line_column(text, r.start));
        ConfigError::Parse { line, column, message: e.message().to_string() }
    })?;
    s.base_dir = base.map(Path::to_path_buf);
    s.validate()?;
    Ok(s)
}

pub fn load_scenario(path: &Path) -> Result<Scenario, crate::Error> {
    let text = std::fs::read_to_string(path).map_err(|e| crate::Error::Io { path: path.to_path_buf(), source: e })?;
    Ok(parse_scenario_in(&text, path.parent())?)
}

impl Scenario {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenarios serialize to TOML")
    }

    /// Constants from `[vars]`, each of which may use the ones before it in key order.
    pub fn vars(&self) -> Result<Vars, ConfigError> {
        let mut out = BTreeMap::new();
        for (k, v) in &self.vars {
            let reserved = RESERVED.contains(&k.as_str()) || k.starts_with(|c: char| c.is_ascii_digit());
            if k.is_empty() || reserved || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(invalid("vars", format!("`{k}` is not a usable variable name")));
            }
            let x = v.value(&Arc::new(out.clone()))?;
            out.insert(k.clone(), x);
        }
        Ok(Arc::new(out))
    }

    pub fn resolve_path(&self, p: &Path) -> PathBuf {
        match &self.base_dir {
            Some(b) if p.is_relative() => b.join(p),
            _ => p.to_path_buf(),
        }
    }

    pub fn time_values(&self) -> Result<Vec<f64>, ConfigError> {
        let vars = self.vars()?;
        self.times.iter().map(|t| t.value(&vars)).collect()
    }

    /// `(start, end)` of every wind segment.
    pub fn segment_bounds(&self) -> Result<Vec<(f64, f64)>, ConfigError> {
        let vars = self.vars()?;
        self.wind.iter().map(|w| Ok((w.start.value(&vars)?, w.end.value(&vars)?))).collect()
    }

    pub fn horizon(&self) -> Result<f64, ConfigError> {
        Ok(self.segment_bounds()?.last().map_or(0.0, |s| s.1))
    }

    /// Checks every invariant that does not require running the scenario.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema != SCHEMA {
            return Err(invalid("schema", format!("expected `{SCHEMA}`, found `{}`", self.schema)));
        }
        let vars = self.vars()?;
        let bounds = self.segment_bounds()?;
        if bounds.is_empty() {
            return Err(invalid("wind_segments", "at least one [[wind]] segment is required"));
        }
        if bounds[0].0 != 0.0 {
            return Err(invalid("wind_segments", format!("the first segment starts at {} instead of 0", bounds[0].0)));
        }
        for (i, (a, b)) in bounds.iter().enumerate() {
            if !(b > a) {
                return Err(invalid("wind_segments", format!("segment {i} has an empty interval [{a}, {b})")));
            }
        }
        for (i, w) in bounds.windows(2).enumerate() {
            if w[1].0 < w[0].1 {
                return Err(invalid(
                    "wind_segments",
                    format!("segments {i} and {} overlap on [{}, {})", i + 1, w[1].0, w[0].1),
                ));
            }
            if w[1].0 > w[0].1 {
                return Err(invalid(
                    "wind_segments",
                    format!("segments {i} and {} leave the gap [{}, {})", i + 1, w[0].1, w[1].0),
                ));
            }
        }
        let horizon = bounds.last().unwrap().1;

        let times = self.time_values()?;
        if times.is_empty() {
            return Err(invalid("times", "no front times requested"));
        }
        if times.iter().any(|&t| t < 0.0 || t > horizon) {
            return Err(invalid("times", format!("front times must lie in [0, {horizon}]")));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("times", "front times must be strictly increasing"));
        }

        for (i, w) in self.wind.iter().enumerate() {
            let need = |ok: bool, what: &str| {
                if ok {
                    Ok(())
                } else {
                    Err(invalid("wind_segments", format!("segment {i} of kind {:?} {what}", w.kind)))
                }
            };
            match w.kind {
                WindKind::Field => need(w.value.is_some() && w.matrix.is_none() && w.path.is_none(), "needs only `value`")?,
                WindKind::Affine => need(w.matrix.is_some() && w.value.is_none() && w.path.is_none(), "needs `matrix`")?,
                WindKind::File => {
                    need(w.path.is_some() && w.value.is_none() && w.matrix.is_none(), "needs only `path`")?;
                    let p = self.resolve_path(w.path.as_ref().unwrap());
                    if !p.is_file() {
                        return Err(invalid("files_exist", format!("wind file {} does not exist", p.display())));
                    }
                }
            }
        }

        let f = &self.front;
        match f.kind {
            FrontKind::Point => {
                if f.range.is_some() || f.range2.is_some() {
                    return Err(invalid("front", "a point front takes no parameter ranges"));
                }
            }
            FrontKind::Curve => {
                if f.range.is_none() || f.range2.is_some() {
                    return Err(invalid("front", "a curve front needs `range` and no `range2`"));
                }
            }
            FrontKind::Surface => {
                if f.range.is_none() || f.range2.is_none() {
                    return Err(invalid("front", "a surface front needs `range` and `range2`"));
                }
            }
        }
        for r in f.range.iter().chain(&f.range2) {
            let (a, b) = (r[0].value(&vars)?, r[1].value(&vars)?);
            if !(b > a) {
                return Err(invalid("front", format!("parameter range [{a}, {b}] is empty")));
            }
        }

        if let Some(g) = &self.output.grid {
            if g.n[0] < 3 || g.n[1] < 3 || !(g.u[1] > g.u[0]) || !(g.v[1] > g.v[0]) {
                return Err(invalid("output_grid", "the grid needs at least 3×3 nodes and non-empty extents"));
            }
        }
        if self.output.arrival && self.output.grid.is_none() {
            return Err(invalid("output_grid", "the arrival field needs an output grid"));
        }
        let n = self.output.slice.normal;
        if !(n[0] * n[0] + n[1] * n[1] + n[2] * n[2] > 0.0) {
            return Err(invalid("output_slice", "the slice normal is zero"));
        }
        if self.checks.contains(&CheckKind::Envelope) && self.output.grid.is_none() {
            return Err(invalid("output_grid", "the envelope check needs an output grid"));
        }
        if self.checks.contains(&CheckKind::Constants) && self.reference.is_none() {
            return Err(invalid("reference", "the constants check needs a [reference] table"));
        }
        if let Some(r) = &self.reference {
            if !matches!(r.example, 1 | 2) {
                return Err(invalid("reference", format!("unknown worked example {}", r.example)));
            }
        }

        for (i, q) in self.strategy.iter().enumerate() {
            let bad = |d: &str| invalid("strategy", format!("query {i}: {d}"));
            match q.kind {
                StrategyKind::AllEqual if q.tau.is_none() => return Err(bad("all_equal needs `tau`")),
                StrategyKind::Point if q.target.is_none() => return Err(bad("point needs `target`")),
                StrategyKind::Region if q.region.is_none() => return Err(bad("region needs `region`")),
                _ => {}
            }
            if let Some(r) = &q.region {
                let ok = match r.kind {
                    RegionKind::Ball => r.center.is_some() && r.radius.is_some(),
                    RegionKind::HalfSpace => r.point.is_some() && r.normal.is_some(),
                    RegionKind::Implicit => r.expr.is_some(),
                };
                if !ok {
                    return Err(bad("region is missing fields for its kind"));
                }
            }
            for t in q.tau.iter().chain(&q.horizon).chain(&q.points_at) {
                if t.value(&vars)? < 0.0 {
                    return Err(bad("times must be non-negative"));
                }
            }
        }
        crate::build::check_expressions(self, &vars)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schema = "wildfront.scenario/1"
name = "unit"
times = [1]

[metric]
a = 1
b = 1
c = 1

[[wind]]
start = 0
end = 1
value = [0, 0, 0]

[front]
kind = "point"
position = [0, 0, 0]
"#;

    #[test]
    fn minimal_round_trip() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.horizon().unwrap(), 1.0);
        let again = parse_scenario(&s.to_toml()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let text = MINIMAL.replace("b = 1", "b = = 1");
        match parse_scenario(&text) {
            Err(ConfigError::Parse { line, column, .. }) => assert_eq!((line, column), (8, 5)),
            other => panic!("{other:?}"),
        }
        let text = MINIMAL.replace("c = 1", "c = 1\nd = 2");
        assert!(matches!(parse_scenario(&text), Err(ConfigError::Parse { line: 10, .. })));
    }

    #[test]
    fn invariants_are_named() {
        let v = |t: &str| match parse_scenario(t) {
            Err(ConfigError::Validation { invariant, .. }) => invariant,
            other => panic!("{other:?}"),
        };
        assert_eq!(v(&MINIMAL.replace("times = [1]", "times = [2]")), "times");
        assert_eq!(v(&MINIMAL.replace("wildfront.scenario/1", "other/1")), "schema");
        assert_eq!(v(&MINIMAL.replace("kind = \"point\"", "kind = \"curve\"")), "front");
        let gap = format!("{MINIMAL}\n[[wind]]\nstart = 2\nend = 3\nvalue = [0, 0, 0]\n").replace("[front]", "[front]");
        assert_eq!(v(&reorder(&gap)), "wind_segments");
        let missing = MINIMAL.replace("value = [0, 0, 0]", "kind = \"file\"\npath = \"/nonexistent/wind.csv\"");
        assert_eq!(v(&missing), "files_exist");
        assert_eq!(v(&MINIMAL.replace("a = 1", "a = \"q\"")), "expression");
    }

    /// Moves trailing `[[wind]]` tables before `[front]` so the document stays valid TOML.
    fn reorder(text: &str) -> String {
        let (head, tail) = text.split_once("\n[[wind]]\nstart = 2").unwrap();
        let (before, front) = head.split_once("[front]").unwrap();
        format!("{before}[[wind]]\nstart = 2{tail}\n[front]{front}")
    }

    #[test]
    fn line_columns() {
        assert_eq!(line_column("ab\ncd", 4), (2, 2));
        assert_eq!(line_column("ab", 0), (1, 1));
    }
}
