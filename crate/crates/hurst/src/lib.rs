//! File formats, fBm synthesis, the Monte Carlo harness and the CLI on top
//! of [`hurst_core`].

pub mod cli;
mod error;
pub mod fbm;
pub mod io;
pub mod sim;

pub use error::{Error, Result};
pub use fbm::{derive_seed, generate_fbm, FbmGenerator, FbmSpec};
pub use sim::{run_simulation, summarize, RunOptions, SimulationPlan, SummaryRow};
