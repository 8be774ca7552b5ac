use crate::geodesic::Mode;
use crate::linalg::Point3;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    #[error("wind is too strong at {point:?}: h(W,W) = {hww} leaves λ = 1 - h(W,W) non-positive")]
    NonNavigable { point: Point3, hww: f64 },
    #[error("metric is not symmetric positive definite")]
    NonSpd,
    #[error("metric is singular")]
    SingularMetric,
    #[error("direction is zero")]
    ZeroDirection,
    #[error("base vector is zero")]
    ZeroBaseVector,
    #[error("vector is zero")]
    ZeroVector,
    #[error("integration diverged at t = {t}")]
    StepFailure { t: f64 },
    #[error("flow time {t} outside the configured horizon {horizon}")]
    FlowHorizon { t: f64, horizon: f64 },
    #[error("initial velocity has speed {speed}, expected 1")]
    NotUnitSpeed { speed: f64 },
    #[error("{requested:?} mode requested but the data does not qualify (residual {residual})")]
    ModeMismatch { requested: Mode, residual: f64 },
    #[error("front tangents are degenerate")]
    DegenerateTangent,
    #[error("grid too coarse: {0}")]
    GridTooCoarse(&'static str),
    #[error("front reaches the boundary of the grid")]
    FrontOutsideGrid,
    #[error("launch fan is empty")]
    EmptyFan,
    #[error("target not reached within the horizon (closest miss {miss})")]
    Unreachable { miss: f64 },
    #[error("time {t} outside the ray horizon [0, {horizon}]")]
    OutOfHorizon { t: f64, horizon: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}
