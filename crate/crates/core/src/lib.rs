//! Insertion-procedure counterexamples for the symmetric TSP.
//!
//! The crate implements the max-min and min-min adding procedures, the
//! cutting procedure they are supposed to invert, exhaustive enumeration of
//! the runs that tie-breaking can produce, exact oracles for small
//! instances, and crossing detection for judging finished tours.

pub mod analysis;
pub mod branching;
pub mod formats;
pub mod generators;
pub mod heuristic;
pub mod instance;
pub mod oracle;
pub mod svg;

pub use heuristic::{Variant, DEFAULT_EPS};
pub use instance::{Edge, Instance, Point, PointId, Tour};
