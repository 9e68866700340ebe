//! Error type shared by all graph operations.

use thiserror::Error;

/// Errors raised by graph construction, curvature, rewiring, and diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("node index {index} out of range for graph with {node_count} nodes")]
    NodeOutOfRange { index: usize, node_count: usize },

    #[error("degenerate cell ({0}, {1}, {2}): repeated vertex")]
    DegenerateCell(usize, usize, usize),

    #[error("field `{field}` has length {len}, expected {expected}")]
    FieldLength {
        field: &'static str,
        len: usize,
        expected: usize,
    },

    #[error("no measure for isolated node {0}")]
    IsolatedNode(usize),

    #[error("edge ({0}, {1}) not present in graph")]
    EdgeAbsent(usize, usize),

    #[error("infinite transport cost: measure supports lie in different components")]
    InfiniteTransportCost,

    #[error("curvature at edge ({i}, {j}): {source}")]
    EdgeCurvature {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("required field `{0}` absent from graph")]
    MissingField(&'static str),

    #[error("graph is disconnected ({components} components): {context}")]
    Disconnected {
        components: usize,
        context: &'static str,
    },

    #[error("infinite resistance: nodes {0} and {1} lie in different components")]
    InfiniteResistance(usize, usize),

    #[error("node count mismatch: {before} before vs {after} after")]
    NodeCountMismatch { before: usize, after: usize },

    #[error("trajectory has no frames")]
    EmptyTrajectory,

    #[error("static-mesh trajectory has frames with differing topology (frame {0})")]
    InconsistentStaticMesh(usize),

    #[error("first-frame rewiring requires a static mesh trajectory")]
    DynamicMeshFirstFrame,

    #[error("invalid mesh specification: {0}")]
    InvalidMeshSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
