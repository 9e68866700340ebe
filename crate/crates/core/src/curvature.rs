//! Ollivier-Ricci curvature on mesh graphs.
//!
//! Edge curvature compares the one-step random-walk measures of the two
//! endpoints by exact Wasserstein-1 transport:
//! `kappa(i, j) = 1 - W1(m_i, m_j) / d(i, j)`. Node curvature `gamma_i` is
//! the mean of `kappa` over incident edges. In unweighted mode the ground
//! metric is the hop distance; in weighted mode every edge carries length
//! `||w_u - w_v|| + EPS_LEN` (velocity difference) and all distances are
//! weighted shortest paths.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{canonical_pair, MeshGraph};
use crate::transport::{min_cost_transport, TransportPlan};

/// Additive edge-length floor for weighted mode, keeping lengths positive
/// when adjacent velocities coincide.
pub const EPS_LEN: f64 = 1e-9;

/// Supports of the walk measures around an edge lie within one hop of the
/// endpoints, so their pairwise hop distances never exceed this radius.
const SUPPORT_RADIUS: usize = 3;

/// Finitely supported probability measure on graph nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMeasure {
    support: Vec<usize>,
    mass: Vec<f64>,
}

impl LocalMeasure {
    /// Validates and canonicalizes (support sorted ascending): masses must
    /// be non-negative and sum to 1 within 1e-12, support nodes distinct.
    pub fn new(support: Vec<usize>, mass: Vec<f64>) -> Result<Self> {
        if support.len() != mass.len() {
            return Err(Error::InvalidMeasure(format!(
                "support has {} nodes but {} masses",
                support.len(),
                mass.len()
            )));
        }
        if support.is_empty() {
            return Err(Error::InvalidMeasure("empty support".into()));
        }
        if mass.iter().any(|&m| !(m >= 0.0) || !m.is_finite()) {
            return Err(Error::InvalidMeasure("negative or non-finite mass".into()));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMeasure(format!(
                "masses sum to {total}, expected 1"
            )));
        }
        let mut pairs: Vec<(usize, f64)> = support.into_iter().zip(mass).collect();
        pairs.sort_unstable_by_key(|&(node, _)| node);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidMeasure("duplicate support node".into()));
        }
        let (support, mass) = pairs.into_iter().unzip();
        Ok(LocalMeasure { support, mass })
    }

    /// Unit point mass.
    pub fn point(node: usize) -> Self {
        LocalMeasure {
            support: vec![node],
            mass: vec![1.0],
        }
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }
}

/// One-step random walk from `i`: uniform mass `1/deg(i)` on each neighbor,
/// no mass on `i` itself.
pub fn random_walk_measure(g: &MeshGraph, i: usize) -> Result<LocalMeasure> {
    if i >= g.node_count() {
        return Err(Error::NodeOutOfRange {
            index: i,
            node_count: g.node_count(),
        });
    }
    let neighbors = g.neighbors(i);
    if neighbors.is_empty() {
        return Err(Error::IsolatedNode(i));
    }
    let p = 1.0 / neighbors.len() as f64;
    Ok(LocalMeasure {
        support: neighbors.to_vec(),
        mass: vec![p; neighbors.len()],
    })
}

/// Exact Wasserstein-1 distance between two local measures under the given
/// ground distance. `ground(p, q) == None` means the nodes are mutually
/// unreachable, which makes the transport cost infinite.
pub fn wasserstein1<F>(mu: &LocalMeasure, nu: &LocalMeasure, ground: F) -> Result<f64>
where
    F: FnMut(usize, usize) -> Option<f64>,
{
    Ok(wasserstein1_with_plan(mu, nu, ground)?.cost)
}

/// Same as [`wasserstein1`] but returns the full optimal coupling, indexed
/// by the (sorted) supports of `mu` and `nu`.
pub fn wasserstein1_with_plan<F>(
    mu: &LocalMeasure,
    nu: &LocalMeasure,
    mut ground: F,
) -> Result<TransportPlan>
where
    F: FnMut(usize, usize) -> Option<f64>,
{
    let m = mu.support.len();
    let n = nu.support.len();
    let mut cost = vec![0.0; m * n];
    for (a, &p) in mu.support.iter().enumerate() {
        for (b, &q) in nu.support.iter().enumerate() {
            let d = if p == q {
                0.0
            } else {
                ground(p, q).ok_or(Error::InfiniteTransportCost)?
            };
            if !d.is_finite() {
                return Err(Error::InfiniteTransportCost);
            }
            if d < 0.0 {
                return Err(Error::InvalidMeasure(format!(
                    "negative ground distance between {p} and {q}"
                )));
            }
            cost[a * n + b] = d;
        }
    }
    Ok(min_cost_transport(&mu.mass, &nu.mass, &cost))
}

/// Optimal transport attached to one edge: curvature plus the coupling
/// between the endpoint walk measures. The coupling is what batch rewiring
/// reuses to pick support pairs. Edges are canonicalized, so `rows` belongs
/// to the smaller endpoint and `cols` to the larger one.
#[derive(Debug, Clone)]
pub struct EdgeTransport {
    pub kappa: f64,
    /// Support of the walk measure at the smaller endpoint (sorted).
    pub rows: Vec<usize>,
    /// Support of the walk measure at the larger endpoint (sorted).
    pub cols: Vec<usize>,
    pub plan: TransportPlan,
}

/// Ollivier-Ricci curvature of one edge.
pub fn edge_orc(g: &MeshGraph, edge: (usize, usize), weighted: bool) -> Result<f64> {
    Ok(edge_transport(g, edge, weighted, None)?.kappa)
}

/// Curvature plus optimal coupling for one edge.
pub fn edge_orc_with_plan(
    g: &MeshGraph,
    edge: (usize, usize),
    weighted: bool,
) -> Result<EdgeTransport> {
    edge_transport(g, edge, weighted, None)
}

fn edge_transport(
    g: &MeshGraph,
    (i, j): (usize, usize),
    weighted: bool,
    hop_cache: Option<&[HashMap<usize, usize>]>,
) -> Result<EdgeTransport> {
    if !g.has_edge(i, j) {
        return Err(Error::EdgeAbsent(i, j));
    }
    // Solve on the canonical orientation so kappa(i, j) and kappa(j, i)
    // are bit-identical despite the solver's orientation-dependent pivots.
    let (i, j) = canonical_pair(i, j);
    let mu = random_walk_measure(g, i)?;
    let nu = random_walk_measure(g, j)?;
    let (plan, edge_dist) = if weighted {
        let edge_dist = weighted_distances(g, i, &[j])[0];
        if !edge_dist.is_finite() {
            return Err(Error::InfiniteTransportCost);
        }
        let mut cost = vec![0.0; mu.support.len() * nu.support.len()];
        for (a, &p) in mu.support.iter().enumerate() {
            let d = weighted_distances(g, p, &nu.support);
            for (b, &dq) in d.iter().enumerate() {
                if !dq.is_finite() {
                    return Err(Error::InfiniteTransportCost);
                }
                cost[a * nu.support.len() + b] = dq;
            }
        }
        (min_cost_transport(&mu.mass, &nu.mass, &cost), edge_dist)
    } else {
        let n_cols = nu.support.len();
        let mut cost = vec![0.0; mu.support.len() * n_cols];
        let mut scratch;
        for (a, &p) in mu.support.iter().enumerate() {
            let dist = match hop_cache {
                Some(cache) => &cache[p],
                None => {
                    scratch = g.bounded_bfs_distances(p, SUPPORT_RADIUS)?;
                    &scratch
                }
            };
            for (b, &q) in nu.support.iter().enumerate() {
                let d = dist.get(&q).copied().ok_or(Error::InfiniteTransportCost)?;
                cost[a * n_cols + b] = d as f64;
            }
        }
        (min_cost_transport(&mu.mass, &nu.mass, &cost), 1.0)
    };
    Ok(EdgeTransport {
        kappa: 1.0 - plan.cost / edge_dist,
        rows: mu.support,
        cols: nu.support,
        plan,
    })
}

/// Weighted shortest-path distances from `source` to each of `targets`,
/// with edge length `||w_u - w_v|| + EPS_LEN`. Dijkstra stops as soon as
/// every target is settled. Unreachable targets come back infinite.
fn weighted_distances(g: &MeshGraph, source: usize, targets: &[usize]) -> Vec<f64> {
    use std::cmp::Ordering;
    use std::collections::BinaryHeap;

    #[derive(PartialEq)]
    struct Entry(f64, usize);
    impl Eq for Entry {}
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> Ordering {
            // min-heap on distance; distances are always finite
            other.0.partial_cmp(&self.0).unwrap()
        }
    }
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }

    let velocity = g.velocity();
    let edge_len = |u: usize, v: usize| -> f64 {
        let du = velocity[u][0] - velocity[v][0];
        let dv = velocity[u][1] - velocity[v][1];
        (du * du + dv * dv).sqrt() + EPS_LEN
    };

    let mut remaining: usize = targets.iter().filter(|&&t| t != source).count();
    let mut dist: HashMap<usize, f64> = HashMap::new();
    let mut settled: HashMap<usize, f64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    dist.insert(source, 0.0);
    heap.push(Entry(0.0, source));
    while let Some(Entry(d, u)) = heap.pop() {
        if settled.contains_key(&u) {
            continue;
        }
        settled.insert(u, d);
        if targets.contains(&u) && u != source {
            remaining -= 1;
        }
        if remaining == 0 {
            break;
        }
        for &v in g.neighbors(u) {
            if settled.contains_key(&v) {
                continue;
            }
            let nd = d + edge_len(u, v);
            let better = dist.get(&v).map_or(true, |&cur| nd < cur);
            if better {
                dist.insert(v, nd);
                heap.push(Entry(nd, v));
            }
        }
    }
    targets
        .iter()
        .map(|&t| {
            if t == source {
                0.0
            } else {
                settled.get(&t).copied().unwrap_or(f64::INFINITY)
            }
        })
        .collect()
}

/// Node curvature: arithmetic mean of edge curvature over incident edges.
pub fn node_orc(g: &MeshGraph, i: usize, weighted: bool) -> Result<f64> {
    if i >= g.node_count() {
        return Err(Error::NodeOutOfRange {
            index: i,
            node_count: g.node_count(),
        });
    }
    let neighbors = g.neighbors(i);
    if neighbors.is_empty() {
        return Err(Error::IsolatedNode(i));
    }
    let mut sum = 0.0;
    for &j in neighbors {
        sum += edge_orc(g, (i, j), weighted)?;
    }
    Ok(sum / neighbors.len() as f64)
}

/// Forman curvature in the unweighted, non-augmented form:
/// `F(i, j) = 4 - deg(i) - deg(j)`.
pub fn forman_curvature(g: &MeshGraph, (i, j): (usize, usize)) -> Result<f64> {
    if !g.has_edge(i, j) {
        return Err(Error::EdgeAbsent(i, j));
    }
    Ok(4.0 - g.degree(i) as f64 - g.degree(j) as f64)
}

/// Per-edge and per-node curvature for a whole graph.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureReport {
    edges: Vec<(usize, usize)>,
    kappa: Vec<f64>,
    gamma: Vec<Option<f64>>,
    weighted: bool,
}

impl CurvatureReport {
    /// Edge list the `kappa` values align with (canonical order).
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn kappa_of(&self, u: usize, v: usize) -> Option<f64> {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges.binary_search(&key).ok().map(|k| self.kappa[k])
    }

    /// Per-node curvature; `None` for isolated nodes.
    pub fn gamma(&self) -> &[Option<f64>] {
        &self.gamma
    }

    pub fn gamma_of(&self, i: usize) -> Option<f64> {
        self.gamma.get(i).copied().flatten()
    }

    pub fn weighted(&self) -> bool {
        self.weighted
    }

    pub fn min_kappa(&self) -> Option<f64> {
        self.kappa.iter().copied().reduce(f64::min)
    }

    pub fn mean_kappa(&self) -> Option<f64> {
        if self.kappa.is_empty() {
            None
        } else {
            Some(self.kappa.iter().sum::<f64>() / self.kappa.len() as f64)
        }
    }

    /// Nearest-rank percentile of the edge-curvature distribution,
    /// `q` in (0, 1].
    pub fn kappa_percentile(&self, q: f64) -> Option<f64> {
        if self.kappa.is_empty() {
            return None;
        }
        let mut sorted = self.kappa.clone();
        sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        let rank = (q * sorted.len() as f64).ceil() as usize;
        Some(sorted[rank.clamp(1, sorted.len()) - 1])
    }
}

/// Curvature for every edge and every non-isolated node. Edges are
/// evaluated independently (in parallel) and assembled in canonical edge
/// order, so the result is identical to sequential evaluation.
pub fn full_report(g: &MeshGraph, weighted: bool) -> Result<CurvatureReport> {
    let edges = g.edges().to_vec();
    let kappa: Vec<f64> = if weighted {
        crate::thread_pool().install(|| {
            edges
                .par_iter()
                .map(|&(i, j)| {
                    edge_transport(g, (i, j), true, None)
                        .map(|t| t.kappa)
                        .map_err(|e| wrap_edge_error(i, j, e))
                })
                .collect::<Result<Vec<_>>>()
        })?
    } else {
        let cache = build_hop_cache(g);
        crate::thread_pool().install(|| {
            edges
                .par_iter()
                .map(|&(i, j)| {
                    edge_transport(g, (i, j), false, Some(&cache))
                        .map(|t| t.kappa)
                        .map_err(|e| wrap_edge_error(i, j, e))
                })
                .collect::<Result<Vec<_>>>()
        })?
    };

    let mut sum = vec![0.0; g.node_count()];
    for (k, &(i, j)) in edges.iter().enumerate() {
        sum[i] += kappa[k];
        sum[j] += kappa[k];
    }
    let gamma = (0..g.node_count())
        .map(|i| {
            let deg = g.degree(i);
            if deg == 0 {
                None
            } else {
                Some(sum[i] / deg as f64)
            }
        })
        .collect();

    Ok(CurvatureReport {
        edges,
        kappa,
        gamma,
        weighted,
    })
}

fn wrap_edge_error(i: usize, j: usize, e: Error) -> Error {
    match e {
        e @ Error::EdgeCurvature { .. } => e,
        other => Error::EdgeCurvature {
            i,
            j,
            source: Box::new(other),
        },
    }
}

/// Radius-bounded hop distances from every node, shared across the edges of
/// one report pass.
fn build_hop_cache(g: &MeshGraph) -> Vec<HashMap<usize, usize>> {
    crate::thread_pool().install(|| {
        (0..g.node_count())
            .into_par_iter()
            .map(|p| {
                if g.degree(p) == 0 {
                    HashMap::new()
                } else {
                    g.bounded_bfs_distances(p, SUPPORT_RADIUS).unwrap()
                }
            })
            .collect()
    })
}
