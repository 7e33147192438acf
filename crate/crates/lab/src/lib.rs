//! Simulation, measurement and analysis around the `eonpath` solvers.
//!
//! * [`simulator`] loads a network with random demands until a target
//!   utilization, timing each solver call on the same network state;
//! * [`records`] is the per-call CSV format;
//! * [`benchlab`] turns call records into speedup distributions and
//!   growth-rate fits;
//! * [`campaign`] runs grids of simulations, [`verify`] cross-checks the
//!   solvers.

pub mod benchlab;
pub mod campaign;
mod error;
pub mod plot;
pub mod records;
pub mod simulator;
pub mod topo_io;
pub mod verify;

pub use error::LabError;
