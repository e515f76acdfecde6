//! Crime transmission dynamics with an imitation effect: thresholds,
//! equilibria, bifurcation analysis, sensitivity and simulation.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod integrator;
pub mod model;
pub mod output;
pub mod params;
pub mod presets;
pub mod report;
pub mod sensitivity;

pub use error::{Error, Result};
pub use model::StateVec;
pub use params::{ModelParams, Strictness};
