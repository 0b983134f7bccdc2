//! Analytic continuation of `F(t)` in the variable `τ = 1/t`.

pub mod evaluators;
pub mod path;
pub mod probes;
pub mod tracking;

pub use evaluators::{
    evaluators, f_partial_fraction, f_quadrature, f_series, FContext, FEvaluator, FMethod, FValue,
};
pub use path::{plan_path, plan_path_avoiding, TauPath};
pub use probes::{approach_path, decay_probe, multiplicity_slope, DecayRow, SlopeFit};
pub use tracking::{initial_bundle, track_from, track_roots, RootBundle, Trace, TrackerConfig};
