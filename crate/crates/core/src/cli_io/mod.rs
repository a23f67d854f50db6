//! Configuration, artifact formats and the pipelines behind each
//! subcommand of the `locvol` binary.

mod commands;
mod config;
pub mod formats;

pub use commands::{
    cmd_calibrate, cmd_carleman, cmd_dupire, cmd_invert_dupire, cmd_price, cmd_stability_sweep, cmd_synthesize,
    cmd_weights, exit_code, probe_functions, summarize, synthesize_slice, CommandReport,
};
pub use config::{CarlemanConfig, CurveShape, InverseConfig, RunConfig};
