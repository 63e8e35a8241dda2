//! Random DAG generation and collapse analysis.
//!
//! The crate is organised around an immutable [`Dag`] and four layers on top
//! of it:
//!
//! * [`generate`]: tree-seeded iterated edge insertion, rank-ordered random
//!   DAGs and matched-random counterparts of real graphs.
//! * [`metrics`]: depth maps, leaf depth distributions, random root-to-leaf
//!   (RRL) walk distributions, summary rows and the collapse verdict.
//! * [`theory`]: Monte Carlo and closed-form checks of the collapse argument
//!   (source-depth probability, target coverage bounds, depth collapse).
//! * [`io`]: edge-list parsing/writing, Graphviz DOT export, JSON and CSV
//!   reports.
//!
//! All randomness flows through [`rng::stream`], a ChaCha8 generator keyed by
//! a 64-bit seed and a stream index, so every result is reproducible
//! bit-for-bit for a fixed seed (and worker count where applicable).

pub mod cli;
pub mod dag;
pub mod error;
pub mod generate;
pub mod io;
pub mod metrics;
pub mod rng;
pub mod theory;

pub use dag::{Dag, DegreeStats, NodeId, TopologicalOrder};
pub use error::{Error, Result};
pub use metrics::{CollapseVerdict, DepthMap, GraphSummary, Histogram};

/// Version string recorded in manifests and reports.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
