//! Batch execution of a scenario.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use wildfront_core::{
    arrival_time_field, is_killing, propagate_front_at, strategic_path_all_equal, strategic_path_to_point,
    strategic_path_to_region, strategic_points, Aabb, Candidate, FrontGeometry, Mode, Plane, Point3,
    StrategyOptions, Vec3, Wavefront, KILLING_TOL,
};

use crate::build::{self, Model};
use crate::checks::{self, CheckOutcome};
use crate::config::{Scenario, StrategyConfig, StrategyKind};
use crate::Error;

pub const SCHEMA: &str = "wildfront.report/1";

/// One wind segment as it was run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentReport {
    pub start: f64,
    pub end: f64,
    pub mode: Mode,
    /// Killing test of a non-constant wind over the region the segment's front sweeps.
    pub killing: Option<bool>,
    pub killing_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCount {
    pub tau: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrivalSummary {
    pub dims: [usize; 3],
    pub spacing: f64,
    pub horizon: f64,
    pub mode: Mode,
    /// Nodes reached within the horizon.
    pub reached: usize,
    pub max_finite: f64,
    /// Sublevel set sizes at the report times.
    pub levels: Vec<LevelCount>,
    pub nested: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyReport {
    pub kind: StrategyKind,
    pub tau: Option<f64>,
    pub contact: Option<Point3>,
    pub source_index: Option<usize>,
    pub velocity0: Option<Vec3>,
    pub mode: Option<Mode>,
    /// Samples of the strategic ray from `t = 0` to `tau`.
    pub path: Vec<Point3>,
    pub points: Vec<Point3>,
    pub runner_ups: Vec<Candidate>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Timing {
    pub total: Duration,
    pub stages: Vec<(String, Duration)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub scenario: String,
    pub plane: Plane,
    pub fronts: Vec<Wavefront>,
    pub segments: Vec<SegmentReport>,
    pub arrival: Option<ArrivalSummary>,
    pub strategies: Vec<StrategyReport>,
    pub checks: Vec<CheckOutcome>,
    /// Outputs that could not be produced.
    pub errors: Vec<String>,
    /// Wall-clock statistics; not serialized so reports stay reproducible.
    #[serde(skip)]
    pub timing: Timing,
}

impl RunReport {
    pub fn checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn context(seg: usize, t: f64) -> impl FnOnce(wildfront_core::Error) -> Error {
    move |source| Error::Run { context: format!("wind segment {seg}, t = {t}"), source }
}

/// Fronts at the requested times, restarting from the current front at each segment boundary.
pub fn propagate_schedule(s: &Scenario, model: &Model) -> Result<(Vec<Wavefront>, Vec<SegmentReport>), Error> {
    let segs = model.schedule.segments();
    let mut front = model.front.clone();
    let mut fronts = Vec::new();
    let mut reports = Vec::new();
    for (k, seg) in segs.iter().enumerate() {
        let last = k + 1 == segs.len();
        let mut taus: Vec<f64> = model
            .times
            .iter()
            .filter(|&&t| t >= seg.start && (t < seg.end || (last && t <= seg.end)))
            .map(|&t| t - seg.start)
            .collect();
        let wanted = taus.len();
        if !last {
            taus.push(seg.end - seg.start);
        }
        let data = model.data(k);
        let mut out = propagate_front_at(&data, &front, &taus, &s.sampling).map_err(context(k, seg.start))?;
        for w in &mut out {
            w.time += seg.start;
        }
        let mode = out.first().map_or(Mode::Constant, |w| w.mode);
        let killing = if data.wind.is_constant() && data.metric.is_constant() {
            None
        } else {
            let region = sweep_region(&front, &data, seg.end - seg.start)?;
            Some(is_killing(&data.wind, &data.metric, &region, KILLING_TOL).map_err(context(k, seg.start))?)
        };
        reports.push(SegmentReport {
            start: seg.start,
            end: seg.end,
            mode,
            killing: killing.as_ref().map(|r| r.killing),
            killing_residual: killing.as_ref().map(|r| r.max_relative),
        });
        if !last {
            front = out.pop().unwrap().to_front();
        }
        out.truncate(wanted);
        fronts.extend(out);
    }
    Ok((fronts, reports))
}

/// Box around the front, padded by how far a unit-time ray can travel in `span`.
pub fn sweep_region(front: &FrontGeometry, data: &wildfront_core::ZermeloData, span: f64) -> Result<Aabb, Error> {
    let pts = front.probe_points();
    let b = Aabb::from_points(&pts).ok_or(Error::Core(wildfront_core::Error::EmptyFan))?;
    let speed = data.at(b.center())?.max_unit_speed();
    Ok(b.padded(speed * span.max(1e-3)))
}

fn strategy(s: &Scenario, model: &Model, q: &StrategyConfig) -> Result<StrategyReport, Error> {
    let vars = s.vars()?;
    let data = model.data(0);
    let seg_end = model.schedule.segments()[0].end;
    let mut opts = StrategyOptions { sampling: s.sampling.clone(), ..StrategyOptions::default() };
    opts.horizon = match &q.horizon {
        Some(h) => h.value(&vars)?,
        None => seg_end,
    };
    let tau = q.tau.as_ref().map(|t| t.value(&vars)).transpose()?;
    if opts.horizon.max(tau.unwrap_or(0.0)) > seg_end + 1e-12 {
        return Err(Error::Config(crate::ConfigError::Validation {
            invariant: "strategy",
            detail: format!("strategy queries must stay within the first wind segment (t ≤ {seg_end})"),
        }));
    }
    let r = match q.kind {
        StrategyKind::AllEqual => strategic_path_all_equal(&data, &model.front, tau.unwrap(), &opts)?,
        StrategyKind::Point => {
            let t = q.target.as_ref().unwrap();
            let target = Point3::new(t[0].value(&vars)?, t[1].value(&vars)?, t[2].value(&vars)?);
            strategic_path_to_point(&data, &model.front, target, &opts)?
        }
        StrategyKind::Region => {
            let region = build::region(q.region.as_ref().unwrap(), &vars)?;
            strategic_path_to_region(&data, &model.front, &region, &opts)?
        }
    };
    let times: Vec<f64> = q.points_at.iter().map(|t| t.value(&vars)).collect::<Result<_, _>>()?;
    let points = strategic_points(&r, &times)?;
    let n = 64;
    let path = (0..=n).map(|i| r.ray.sample(r.tau * i as f64 / n as f64).map(|x| x.0)).collect::<Result<_, _>>()?;
    Ok(StrategyReport {
        kind: q.kind,
        tau: Some(r.tau),
        contact: Some(r.contact),
        source_index: Some(r.source_index),
        velocity0: Some(r.velocity0),
        mode: Some(r.mode),
        path,
        points,
        runner_ups: r.runner_ups,
        error: None,
    })
}

fn failed_strategy(q: &StrategyConfig, e: Error) -> StrategyReport {
    StrategyReport {
        kind: q.kind,
        tau: None,
        contact: None,
        source_index: None,
        velocity0: None,
        mode: None,
        path: Vec::new(),
        points: Vec::new(),
        runner_ups: Vec::new(),
        error: Some(e.to_string()),
    }
}

fn arrival(s: &Scenario, model: &Model) -> Result<Option<ArrivalSummary>, Error> {
    let Some(lattice) = &model.lattice else { return Ok(None) };
    if !s.output.arrival {
        return Ok(None);
    }
    let seg = &model.schedule.segments()[0];
    let horizon = model.times.last().copied().unwrap_or(0.0).min(seg.end);
    let f = arrival_time_field(&model.data(0), &model.front, lattice, horizon, &s.sampling)?;
    let taus: Vec<f64> = model.times.iter().copied().filter(|&t| t <= horizon).collect();
    let finite: Vec<f64> = f.values.iter().copied().filter(|v| v.is_finite()).collect();
    Ok(Some(ArrivalSummary {
        dims: lattice.dims,
        spacing: lattice.spacing(),
        horizon,
        mode: f.mode,
        reached: finite.len(),
        max_finite: finite.iter().copied().fold(0.0, f64::max),
        levels: taus.iter().map(|&tau| LevelCount { tau, nodes: f.sublevel_count(tau) }).collect(),
        nested: f.is_nested(&taus),
    }))
}

/// Runs a validated scenario.
pub fn run_scenario(s: &Scenario) -> Result<RunReport, Error> {
    let start = Instant::now();
    let mut stages = Vec::new();
    let model = Model::new(s)?;

    let t = Instant::now();
    let (fronts, segments) = propagate_schedule(s, &model)?;
    stages.push(("fronts".to_string(), t.elapsed()));

    let mut errors = Vec::new();
    let t = Instant::now();
    let arrival = arrival(s, &model).unwrap_or_else(|e| {
        errors.push(format!("arrival field: {e}"));
        None
    });
    stages.push(("arrival".to_string(), t.elapsed()));

    let t = Instant::now();
    let strategies: Vec<StrategyReport> = s
        .strategy
        .iter()
        .enumerate()
        .map(|(i, q)| {
            strategy(s, &model, q).unwrap_or_else(|e| {
                errors.push(format!("strategy query {i}: {e}"));
                failed_strategy(q, e)
            })
        })
        .collect();
    stages.push(("strategy".to_string(), t.elapsed()));

    let mut report = RunReport {
        schema: SCHEMA.to_string(),
        scenario: s.name.clone(),
        plane: model.plane,
        fronts,
        segments,
        arrival,
        strategies,
        checks: Vec::new(),
        errors,
        timing: Timing::default(),
    };

    let t = Instant::now();
    report.checks = checks::run_checks(s, &model, &report, &s.checks);
    stages.push(("checks".to_string(), t.elapsed()));
    report.timing = Timing { total: start.elapsed(), stages };
    Ok(report)
}
