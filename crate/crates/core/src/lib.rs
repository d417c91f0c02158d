//! Exact Penrose P3 tilings, their five basic patterns, and the
//! nearest-neighbour hard-core lattice gas on the tiling graph.

pub mod golden;
pub mod cyclo;
pub mod substitution;
pub mod graph;
pub mod supertiling;
pub mod partition;
pub mod ground_state;
pub mod exact;
pub mod gibbs;
pub mod render;
pub mod pipeline;
pub mod error;

pub use cyclo::CycloPoint;
pub use error::Error;
pub use golden::GoldenNumber;
