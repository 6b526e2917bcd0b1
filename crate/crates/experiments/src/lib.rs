//! Seeded sweep harness around the `mapc-core` solvers: ensembles of random
//! instances per sweep value, paired solver comparison, CSV and SVG output.

pub mod error;
pub mod output;
pub mod solve;
pub mod spec;
pub mod sweep;

pub use error::{ExperimentError, Result};
pub use output::{csv_string, emit_csv, emit_plot_svg, svg_string};
pub use solve::{solve_one, write_sweep_outputs, SolveOptions, SolveReport};
pub use spec::{ScenarioConfig, SolverKind, SweepKind, SweepSpec};
pub use sweep::{run_sweep, RowStatus, SweepRow};
