//! Experiment harness: per-trial and size-ladder iteration sweeps, preconditioned spectra,
//! equidistribution ladders and single solves, written as CSV with optional SVG plots.

pub mod config;
pub mod experiments;
pub mod svg;

pub use config::{ExperimentConfig, IndefinitePolicy, PreconditionerKind, SymbolKind};
pub use experiments::{
    run_equidist, run_fig1, run_fig2, run_solve, run_spectrum, EquidistOutput, Fig1Output,
    Fig2Output, SolveOutput, SpectrumOutput, SpectrumTrial, TrialOutcome,
};
pub use svg::{emit_svg, PlotKind, Series};

/// Fixed-width scientific format with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}
