//! Mesh-graph curvature and rewiring toolkit.
//!
//! The crate models triangulated simulation meshes as immutable graphs with
//! physical fields, computes exact Ollivier-Ricci curvature through
//! optimal transport, rewires graphs to relieve over-squashing (the
//! physics-informed method plus four baselines), and reports structural
//! diagnostics such as total effective resistance.
//!
//! Modules:
//! - [`graph`]: the [`graph::MeshGraph`] data model and distance primitives
//! - [`transport`]: exact transportation simplex on small dense instances
//! - [`curvature`]: edge/node Ollivier-Ricci and Forman curvature
//! - [`rewiring`]: the rewiring methods and their shared configuration
//! - [`diagnostics`]: effective resistance, betweenness, report deltas
//! - [`meshgen`]: synthetic channel-flow meshes with analytic fields

pub mod curvature;
pub mod diagnostics;
pub mod error;
pub mod graph;
pub mod meshgen;
pub mod rewiring;
pub mod transport;

pub use error::{Error, Result};
pub use graph::{MeshGraph, NodeData, Trajectory};

use std::sync::OnceLock;

/// Shared compute pool. `RICCI_THREADS` caps internal parallelism
/// (0 or unset picks the runtime default); the value is read once.
pub fn thread_pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = std::env::var("RICCI_THREADS")
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .unwrap_or(0);
        let mut builder = rayon::ThreadPoolBuilder::new();
        if threads > 0 {
            builder = builder.num_threads(threads);
        }
        builder.build().expect("failed to build compute pool")
    })
}
