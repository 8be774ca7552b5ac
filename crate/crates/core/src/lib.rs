//! Wildfire front propagation under wind, modelled with Randers geometry.
//!
//! The fire spreads at every point with an ellipsoidal indicatrix (the
//! Riemannian part `h`) that is translated by the local wind `W`. Together
//! `(h, W)` are Zermelo navigation data and define a Randers metric `F`;
//! fire particles travel along unit-speed `F`-geodesics launched
//! `F`-orthogonally to the current front, and the front at time `τ` is the
//! level set `ρ = τ` of the Randers distance to the initial front.
//!
//! The crate is `no_std` (with `alloc`) unless the `std` feature is enabled.
//! The `parallel` feature traces ray fans with rayon; outputs are always
//! ordered by sample index.
//!
//! Module map:
//!
//! * [`metric`]: the Randers norm, its fundamental tensor, `F`-orthogonality.
//! * [`indicatrix`]: ellipsoid specs, rotations, Riemannian and Randers indicatrices.
//! * [`wind`]: wind fields, their flows, Lie derivative and Killing test.
//! * [`geodesic`]: Christoffel symbols, `h`-geodesics and wave rays in three modes.
//! * [`front`], [`propagation`], [`huygens`], [`arrival`]: wavefronts by ray
//!   shooting, by Huygens envelopes and as arrival-time fields.
//! * [`strategy`]: strategic paths and points.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod arrival;
pub mod contour;
pub mod error;
pub mod front;
pub mod geodesic;
pub mod huygens;
pub mod indicatrix;
pub mod lattice;
pub mod linalg;
pub mod metric;
pub mod propagation;
pub mod strategy;
pub mod wind;

mod fan;
mod math;
mod par;

pub use arrival::{arrival_time_field, ArrivalField, LipschitzReport};
pub use error::{Error, Result};
pub use front::{full_turn, CurveFront, FrontGeometry, FrontParam, SampledFront, Side, SurfaceFront, TangentFrame};
pub use geodesic::{
    christoffel, integrate_h_geodesic, select_mode, trace_wave_ray, Christoffel, GeodesicProblem, Mode,
    Trajectory,
};
pub use huygens::huygens_step;
pub use indicatrix::{
    metric_from_spec, quadratic_eval, rotation_matrix, sample_randers_indicatrix, EllipsoidSpec,
    IndicatrixSample, Param, SphereGrid,
};
pub use lattice::{Lattice, Plane};
pub use linalg::{Mat3, Point3, SpdMatrix3, Vec3};
pub use metric::{
    eval_randers, fundamental_tensor, is_f_orthogonal, unit_f_direction, MetricField, RandersEval,
    ZermeloData,
};
pub use propagation::{
    hausdorff_points, hausdorff_polylines, launch_directions, propagate_front, propagate_front_at,
    spherical_wavefront, Layout, Polyline, Provenance, Sampling, Span, Wavefront,
};
pub use strategy::{
    strategic_path_all_equal, strategic_path_to_point, strategic_path_to_region, strategic_points,
    Candidate, Region, StrategicResult, StrategyOptions,
};
pub use wind::{
    flow, flow_differential, is_killing, lie_derivative_h, Aabb, FlowMap, KillingReport, WindField,
    WindGrid, WindSchedule, WindSegment, KILLING_TOL,
};
