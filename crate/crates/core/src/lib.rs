//! Spectrum-aware shortest paths for elastic optical networks.
//!
//! The crate solves the dynamic routing, modulation and spectrum assignment
//! problem for a single demand with two exact algorithms:
//!
//! * [`filtered`]: the Filtered Graphs baseline, one inline-filtered Dijkstra
//!   run per (modulation level, slot window) candidate;
//! * [`generic`]: Generic Dijkstra, a label-setting search whose labels carry
//!   the set of slots still usable along the partial path.
//!
//! Both return the same [`Assignment`] for every input, which [`oracle`]
//! checks by exhaustive enumeration on small instances.
//!
//! The crate is `no_std` and only needs `alloc`. File IO, timing and the
//! command line live in the `eonpath-lab` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod filtered;
pub mod generic;
pub mod modulation;
pub mod network;
pub mod oracle;
pub mod rng;
pub mod solution;
pub mod spectrum;
pub mod topo_format;
pub mod topology;

pub use error::Error;
pub use filtered::{solve_filtered, FilteredSolver};
pub use generic::{solve_generic, GenericSolver};
pub use modulation::{Level, ModulationTable};
pub use network::Network;
pub use rng::SimRng;
pub use solution::{Assignment, Demand};
pub use spectrum::{SlotSet, Span, Window};
pub use topology::{Point, Topology};

pub type Result<T, E = Error> = core::result::Result<T, E>;
