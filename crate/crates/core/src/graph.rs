//! Canonical mesh-graph data model.
//!
//! A [`MeshGraph`] is an immutable simple undirected graph derived from a
//! triangulated mesh. Nodes carry spatial positions and physical fields
//! (velocity, optional pressure and density, boundary-condition tags); edges
//! are stored canonically as `(min, max)` pairs in lexicographic order.
//! All mutation produces new values, so a graph can be shared freely across
//! threads.

use std::collections::HashMap;
use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Boundary-condition tags used by the mesh generator and selectors.
pub mod node_type {
    pub const INTERIOR: u8 = 0;
    pub const WALL: u8 = 1;
    pub const INLET: u8 = 2;
    pub const OUTLET: u8 = 3;
    pub const OBSTACLE: u8 = 4;
}

/// Per-node geometry and physical fields for a [`MeshGraph`].
///
/// `pressure` and `density` are whole-array-present or absent; per-node
/// missing values are not supported.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeData {
    pub positions: Vec<[f64; 2]>,
    pub velocity: Vec<[f64; 2]>,
    pub node_type: Vec<u8>,
    pub pressure: Option<Vec<f64>>,
    pub density: Option<Vec<f64>>,
}

impl NodeData {
    /// All-zero fields with every node tagged interior.
    pub fn zeros(node_count: usize) -> Self {
        NodeData {
            positions: vec![[0.0, 0.0]; node_count],
            velocity: vec![[0.0, 0.0]; node_count],
            node_type: vec![node_type::INTERIOR; node_count],
            pressure: None,
            density: None,
        }
    }

    fn validate(&self, node_count: usize) -> Result<()> {
        fn check(field: &'static str, len: usize, expected: usize) -> Result<()> {
            if len != expected {
                return Err(Error::FieldLength {
                    field,
                    len,
                    expected,
                });
            }
            Ok(())
        }
        check("positions", self.positions.len(), node_count)?;
        check("velocity", self.velocity.len(), node_count)?;
        check("node_type", self.node_type.len(), node_count)?;
        if let Some(p) = &self.pressure {
            check("pressure", p.len(), node_count)?;
        }
        if let Some(d) = &self.density {
            check("density", d.len(), node_count)?;
        }
        Ok(())
    }
}

/// Immutable simple undirected graph with per-node geometry and fields.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshGraph {
    node_count: usize,
    data: NodeData,
    /// Canonical edge list: each pair `(i, j)` with `i < j`, sorted lexicographically.
    edges: Vec<(usize, usize)>,
    /// Sorted adjacency lists, one per node.
    neighbors: Vec<Vec<usize>>,
    /// Triangles the edges were derived from, when known.
    cells: Option<Vec<[usize; 3]>>,
}

impl MeshGraph {
    /// Builds the graph of a triangulated mesh: the edge set is the
    /// deduplicated union of the three sides of every cell.
    pub fn from_cells(data: NodeData, cells: Vec<[usize; 3]>) -> Result<Self> {
        let node_count = data.positions.len();
        data.validate(node_count)?;
        let mut edges = Vec::with_capacity(cells.len() * 3);
        for &[a, b, c] in &cells {
            if a == b || b == c || a == c {
                return Err(Error::DegenerateCell(a, b, c));
            }
            for &(u, v) in &[(a, b), (b, c), (a, c)] {
                check_node(u, node_count)?;
                check_node(v, node_count)?;
                edges.push(canonical_pair(u, v));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Self::assemble(node_count, data, edges, Some(cells)))
    }

    /// Builds a graph from an explicit edge list (no cell information).
    pub fn from_edges(data: NodeData, edge_pairs: &[(usize, usize)]) -> Result<Self> {
        let node_count = data.positions.len();
        data.validate(node_count)?;
        let mut edges = Vec::with_capacity(edge_pairs.len());
        for &(u, v) in edge_pairs {
            check_node(u, node_count)?;
            check_node(v, node_count)?;
            if u == v {
                continue;
            }
            edges.push(canonical_pair(u, v));
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Self::assemble(node_count, data, edges, None))
    }

    /// Topology-only constructor with zeroed fields; convenient for tests
    /// and purely structural algorithms.
    pub fn with_topology(node_count: usize, edge_pairs: &[(usize, usize)]) -> Result<Self> {
        Self::from_edges(NodeData::zeros(node_count), edge_pairs)
    }

    /// Builds a graph from an explicit edge list plus optional cell
    /// metadata. Every cell side must appear in the edge set; this is how
    /// rewired graphs (whose edges are a superset of the mesh edges)
    /// round-trip through files.
    pub fn from_parts(
        data: NodeData,
        edge_pairs: &[(usize, usize)],
        cells: Option<Vec<[usize; 3]>>,
    ) -> Result<Self> {
        let g = Self::from_edges(data, edge_pairs)?;
        let Some(cells) = cells.filter(|c| !c.is_empty()) else {
            return Ok(g);
        };
        for &[a, b, c] in &cells {
            if a == b || b == c || a == c {
                return Err(Error::DegenerateCell(a, b, c));
            }
            for &(u, v) in &[(a, b), (b, c), (a, c)] {
                check_node(u, g.node_count)?;
                check_node(v, g.node_count)?;
                if !g.has_edge(u, v) {
                    return Err(Error::EdgeAbsent(u, v));
                }
            }
        }
        Ok(MeshGraph {
            cells: Some(cells),
            ..g
        })
    }

    fn assemble(
        node_count: usize,
        data: NodeData,
        edges: Vec<(usize, usize)>,
        cells: Option<Vec<[usize; 3]>>,
    ) -> Self {
        let mut neighbors = vec![Vec::new(); node_count];
        for &(u, v) in &edges {
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        let cells = cells.filter(|c| !c.is_empty());
        MeshGraph {
            node_count,
            data,
            edges,
            neighbors,
            cells,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list, lexicographically sorted `(min, max)` pairs.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn cells(&self) -> Option<&[[usize; 3]]> {
        self.cells.as_deref()
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.data.positions
    }

    pub fn velocity(&self) -> &[[f64; 2]] {
        &self.data.velocity
    }

    pub fn pressure(&self) -> Option<&[f64]> {
        self.data.pressure.as_deref()
    }

    pub fn density(&self) -> Option<&[f64]> {
        self.data.density.as_deref()
    }

    pub fn node_types(&self) -> &[u8] {
        &self.data.node_type
    }

    pub fn node_data(&self) -> &NodeData {
        &self.data
    }

    /// Sorted neighbor list of `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    /// Number of neighbors of `i`.
    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u == v || u >= self.node_count || v >= self.node_count {
            return false;
        }
        let (a, b) = canonical_pair(u, v);
        self.neighbors[a].binary_search(&b).is_ok()
    }

    /// Unweighted shortest-path hop distances from `source` to every node
    /// within `radius` hops. Nodes beyond the radius are absent.
    pub fn bounded_bfs_distances(&self, source: usize, radius: usize) -> Result<HashMap<usize, usize>> {
        check_node(source, self.node_count)?;
        let mut dist = HashMap::new();
        dist.insert(source, 0);
        let mut queue = VecDeque::new();
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[&u];
            if du == radius {
                continue;
            }
            for &v in &self.neighbors[u] {
                if !dist.contains_key(&v) {
                    dist.insert(v, du + 1);
                    queue.push_back(v);
                }
            }
        }
        Ok(dist)
    }

    /// Returns a new graph with the given pairs inserted. Pairs already
    /// present and self-pairs are silently skipped; the original is
    /// untouched and all its edges are preserved.
    pub fn add_edges(&self, new_pairs: &[(usize, usize)]) -> Result<MeshGraph> {
        for &(u, v) in new_pairs {
            check_node(u, self.node_count)?;
            check_node(v, self.node_count)?;
        }
        let mut edges = self.edges.clone();
        for &(u, v) in new_pairs {
            if u == v {
                continue;
            }
            edges.push(canonical_pair(u, v));
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Self::assemble(
            self.node_count,
            self.data.clone(),
            edges,
            self.cells.clone(),
        ))
    }

    /// Returns a new graph with the given edges deleted. Pairs not present
    /// are skipped. Cell information is dropped if a removed edge belonged
    /// to a cell, so the cell invariant keeps holding.
    pub fn remove_edges(&self, pairs: &[(usize, usize)]) -> Result<MeshGraph> {
        for &(u, v) in pairs {
            check_node(u, self.node_count)?;
            check_node(v, self.node_count)?;
        }
        let removed: Vec<(usize, usize)> = pairs
            .iter()
            .filter(|&&(u, v)| u != v)
            .map(|&(u, v)| canonical_pair(u, v))
            .collect();
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .copied()
            .filter(|e| !removed.contains(e))
            .collect();
        let cells = self.cells.clone().filter(|cells| {
            cells.iter().all(|&[a, b, c]| {
                [(a, b), (b, c), (a, c)]
                    .iter()
                    .all(|&(u, v)| edges.binary_search(&canonical_pair(u, v)).is_ok())
            })
        });
        Ok(Self::assemble(self.node_count, self.data.clone(), edges, cells))
    }

    /// Connected components as (component id per node, component count).
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.node_count];
        let mut count = 0;
        for start in 0..self.node_count {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = count;
            let mut queue = VecDeque::new();
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in &self.neighbors[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_connected(&self) -> bool {
        self.node_count <= 1 || self.components().1 == 1
    }
}

/// Ordered sequence of mesh-graph frames.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    frames: Vec<MeshGraph>,
    static_mesh: bool,
}

impl Trajectory {
    /// A `static_mesh` trajectory must have identical node count, edge set,
    /// and positions in every frame; only fields may differ.
    pub fn new(frames: Vec<MeshGraph>, static_mesh: bool) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        if static_mesh {
            let first = &frames[0];
            for (k, f) in frames.iter().enumerate().skip(1) {
                if f.node_count() != first.node_count()
                    || f.edges() != first.edges()
                    || f.positions() != first.positions()
                {
                    return Err(Error::InconsistentStaticMesh(k));
                }
            }
        }
        Ok(Trajectory {
            frames,
            static_mesh,
        })
    }

    pub fn frames(&self) -> &[MeshGraph] {
        &self.frames
    }

    pub fn static_mesh(&self) -> bool {
        self.static_mesh
    }
}

fn check_node(i: usize, node_count: usize) -> Result<()> {
    if i >= node_count {
        return Err(Error::NodeOutOfRange {
            index: i,
            node_count,
        });
    }
    Ok(())
}

#[inline]
pub fn canonical_pair(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}
