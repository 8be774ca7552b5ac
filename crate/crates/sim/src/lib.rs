//! Scenario runner for `wildfront-core`.
//!
//! A scenario file fixes the ellipsoid spec, a piecewise time-independent
//! wind, the initial front and the requested outputs. [`run_scenario`]
//! propagates the front through every wind segment (the front at the end of
//! one segment is the initial front of the next), answers strategy queries,
//! evaluates the requested invariant checks and returns a [`RunReport`],
//! which [`output`] writes as CSV and JSON and [`svg`] renders as slices.
//!
//! [`fixtures`] ships the two worked examples (constant wind, and the shear
//! wind `W = k(y, 0, 0)` over a rotating ellipsoid) as ready-made scenarios.

use std::path::PathBuf;

pub mod build;
pub mod checks;
pub mod config;
pub mod expr;
pub mod fixtures;
pub mod output;
pub mod run;
pub mod svg;
pub mod windfile;

pub use build::Model;
pub use checks::CheckOutcome;
pub use config::{load_scenario, parse_scenario, CheckKind, ConfigError, Scenario};
pub use run::{run_scenario, RunReport};
pub use svg::render_slice;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] wildfront_core::Error),
    #[error("{context}: {source}")]
    Run { context: String, source: wildfront_core::Error },
    #[error("cannot access {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Write(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("the slice plane does not meet any front")]
    EmptyIntersection,
}
