//! Exponential independence and exponential domination in graphs.
//!
//! A set `S` of vertices is *exponentially independent* when every member
//! receives total influence below 1 from the other members, where a vertex at
//! blocked distance `d` contributes `(1/2)^(d-1)` and other members of `S`
//! block paths. It is *exponentially dominating* when every vertex of the
//! graph receives influence at least 1. All weights are exact dyadic
//! rationals, so both thresholds are decided without rounding.
//!
//! Modules, bottom-up: [`graph`], [`dyadic`], [`weights`], [`families`],
//! [`solvers`], [`constructors`], [`experiments`], with set files in [`io`].

pub mod constructors;
pub mod dyadic;
pub mod experiments;
pub mod families;
pub mod graph;
pub mod io;
pub mod solvers;
pub mod weights;

pub use dyadic::Dyadic;
pub use graph::{Distance, Graph, Vertex, VertexSet};

/// Version tag stamped into generated reports and tables.
pub const VERSION: &str = concat!("expind ", env!("CARGO_PKG_VERSION"));
