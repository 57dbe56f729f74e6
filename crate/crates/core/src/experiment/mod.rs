//! Experiment specifications, built-in scenarios and the runner behind the
//! command-line tool.

mod presets;
mod run;
mod spec;

pub use presets::{list_presets, preset, preset_names, sweep_grid_db, PRESET_RULES, PRESET_SEED};
pub use run::{
    analytic_rows, calibration_rows, run, shared_channel, shared_gains, AnalyticRow,
    CalibrationRow, RunOptions, RunReport, SINR_DEFINITION,
};
pub use spec::{ExperimentKind, ExperimentSpec, FadingSpec, GainsSpec, ProbSpec, SensingSpec};
