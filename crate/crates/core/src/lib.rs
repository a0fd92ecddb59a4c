//! Mode complexes for situation handling: simplicial structure over labelled
//! vertices, barycentric evidence points, generalised belief functions, and a
//! deterministic threshold-driven mode transition engine.

pub mod belief;
pub mod geometry;
pub mod modes;
pub mod scenarios;
pub mod simplicial;

pub use geometry::{BarycentricPoint, Layout, Trajectory};
pub use modes::{ModeSystem, TransitionEvent};
pub use simplicial::{Complex, Cover, Face, VertexId};
