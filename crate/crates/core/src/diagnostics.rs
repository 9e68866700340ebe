//! Structural metrics quantifying over-squashing relief.
//!
//! Effective resistance treats edges as unit resistors; the total over all
//! unordered pairs measures global bottleneckedness and never increases
//! when edges are added. Curvature and degree distributions plus their
//! correlation complete the before/after picture.

use std::collections::BTreeMap;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::curvature::{full_report, CurvatureReport};
use crate::error::{Error, Result};
use crate::graph::MeshGraph;

/// Node-count threshold between the dense-eigendecomposition path and
/// per-pair linear solves for effective resistance.
const DENSE_EIGEN_MAX_NODES: usize = 4_000;

/// Effective resistance between `u` and `v`:
/// `R(u, v) = Lp_uu + Lp_vv - 2 Lp_uv` with `Lp` the pseudoinverse of the
/// combinatorial Laplacian. Computed on the connected component containing
/// both nodes; dense eigendecomposition up to 4,000 nodes, a grounded
/// linear solve per pair above that.
pub fn effective_resistance(g: &MeshGraph, u: usize, v: usize) -> Result<f64> {
    for &x in &[u, v] {
        if x >= g.node_count() {
            return Err(Error::NodeOutOfRange {
                index: x,
                node_count: g.node_count(),
            });
        }
    }
    if u == v {
        return Ok(0.0);
    }
    let (comp, _) = g.components();
    if comp[u] != comp[v] {
        return Err(Error::InfiniteResistance(u, v));
    }
    let nodes: Vec<usize> = (0..g.node_count()).filter(|&i| comp[i] == comp[u]).collect();
    let index: BTreeMap<usize, usize> = nodes.iter().enumerate().map(|(k, &n)| (n, k)).collect();
    let (iu, iv) = (index[&u], index[&v]);
    let size = nodes.len();

    if size <= DENSE_EIGEN_MAX_NODES {
        let lap = laplacian(g, &nodes, &index);
        let eig = SymmetricEigen::new(lap);
        let lambda_max = eig
            .eigenvalues
            .iter()
            .cloned()
            .fold(0.0_f64, f64::max)
            .max(1.0);
        let tol = lambda_max * 1e-10;
        let mut r = 0.0;
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda > tol {
                let phi = eig.eigenvectors.column(k);
                let d = phi[iu] - phi[iv];
                r += d * d / lambda;
            }
        }
        Ok(r)
    } else {
        // Ground the first component node; solve L~ x = e_u - e_v.
        let grounded: Vec<usize> = nodes[1..].to_vec();
        let gindex: BTreeMap<usize, usize> =
            grounded.iter().enumerate().map(|(k, &n)| (n, k)).collect();
        let lap = laplacian(g, &grounded, &gindex);
        let chol = Cholesky::new(lap).ok_or(Error::Disconnected {
            components: 2,
            context: "grounded Laplacian not positive definite",
        })?;
        let mut b = DVector::zeros(grounded.len());
        if let Some(&k) = gindex.get(&u) {
            b[k] = 1.0;
        }
        if let Some(&k) = gindex.get(&v) {
            b[k] = -1.0;
        }
        let x = chol.solve(&b);
        let xu = gindex.get(&u).map_or(0.0, |&k| x[k]);
        let xv = gindex.get(&v).map_or(0.0, |&k| x[k]);
        Ok(xu - xv)
    }
}

/// Sum of effective resistance over all unordered node pairs, evaluated as
/// `|V| * trace(Lp)` through the grounded-inverse identity
/// `|V| * tr(M) - sum(M)`, where `M` is the inverse of the Laplacian with
/// one node grounded.
pub fn total_effective_resistance(g: &MeshGraph) -> Result<f64> {
    let n = g.node_count();
    if n <= 1 {
        return Ok(0.0);
    }
    let (comp, count) = g.components();
    if count != 1 {
        return Err(Error::Disconnected {
            components: count,
            context: "total effective resistance",
        });
    }
    debug_assert!(comp.iter().all(|&c| c == 0));
    let grounded: Vec<usize> = (1..n).collect();
    let gindex: BTreeMap<usize, usize> = grounded.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    let lap = laplacian(g, &grounded, &gindex);
    let chol = Cholesky::new(lap).ok_or(Error::Disconnected {
        components: 2,
        context: "grounded Laplacian not positive definite",
    })?;
    let inv = chol.inverse();
    let trace = inv.trace();
    let sum: f64 = inv.iter().sum();
    Ok(n as f64 * trace - sum)
}

fn laplacian(g: &MeshGraph, nodes: &[usize], index: &BTreeMap<usize, usize>) -> DMatrix<f64> {
    let size = nodes.len();
    let mut lap = DMatrix::zeros(size, size);
    for (k, &node) in nodes.iter().enumerate() {
        for &nb in g.neighbors(node) {
            if let Some(&knb) = index.get(&nb) {
                lap[(k, knb)] = -1.0;
            }
        }
        lap[(k, k)] = g.degree(node) as f64;
    }
    lap
}

/// Exact unweighted shortest-path betweenness (Brandes' pair-dependency
/// accumulation), unnormalized, each unordered pair counted once.
/// Unreachable pairs contribute nothing.
pub fn betweenness_centrality(g: &MeshGraph) -> Vec<f64> {
    let n = g.node_count();
    let mut score = vec![0.0; n];
    if n <= 2 {
        return score;
    }
    let mut stack: Vec<usize> = Vec::with_capacity(n);
    for s in 0..n {
        stack.clear();
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![0.0_f64; n];
        let mut dist = vec![usize::MAX; n];
        sigma[s] = 1.0;
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in g.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    pred[w].push(v);
                }
            }
        }
        let mut delta = vec![0.0_f64; n];
        while let Some(w) = stack.pop() {
            for &v in &pred[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                score[w] += delta[w];
            }
        }
    }
    // every unordered pair was seen from both endpoints
    for x in &mut score {
        *x /= 2.0;
    }
    score
}

/// Histogram with explicit bin edges; `counts.len() + 1 == bin_edges.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
}

const KAPPA_BINS: usize = 64;
const KAPPA_RANGE: (f64, f64) = (-2.0, 1.0);

/// 64 uniform bins over the unweighted-curvature range [-2, 1]; values
/// outside the range (float dust) land in the end bins.
pub fn curvature_histogram(kappa: &[f64]) -> Histogram {
    let (lo, hi) = KAPPA_RANGE;
    let width = (hi - lo) / KAPPA_BINS as f64;
    let bin_edges: Vec<f64> = (0..=KAPPA_BINS).map(|k| lo + k as f64 * width).collect();
    let mut counts = vec![0usize; KAPPA_BINS];
    for &k in kappa {
        let idx = ((k - lo) / width).floor();
        let idx = (idx.max(0.0) as usize).min(KAPPA_BINS - 1);
        counts[idx] += 1;
    }
    Histogram { bin_edges, counts }
}

/// Scalar and distributional structure metrics for one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    /// Infinite when the graph is disconnected.
    pub total_effective_resistance: f64,
    pub curvature_histogram: Histogram,
    pub degree_histogram: BTreeMap<usize, usize>,
    /// Pearson correlation between node curvature and degree; NaN when
    /// undefined (constant degree or fewer than two non-isolated nodes).
    pub orc_degree_pearson: f64,
    /// NaN when the graph has no edges.
    pub min_edge_curvature: f64,
    /// Nearest-rank 1st percentile of edge curvature; NaN when no edges.
    pub p01_edge_curvature: f64,
    pub connected: bool,
    pub component_count: usize,
}

/// Builds the full diagnostics report for one graph (unweighted curvature).
pub fn report(g: &MeshGraph) -> Result<DiagnosticsReport> {
    let curv = full_report(g, false)?;
    report_with_curvature(g, &curv)
}

/// Same as [`report`] but reuses an already computed curvature report.
pub fn report_with_curvature(g: &MeshGraph, curv: &CurvatureReport) -> Result<DiagnosticsReport> {
    let (_, component_count) = g.components();
    let connected = component_count <= 1;
    let total = if connected {
        total_effective_resistance(g)?
    } else {
        f64::INFINITY
    };

    let mut degree_histogram = BTreeMap::new();
    for i in 0..g.node_count() {
        *degree_histogram.entry(g.degree(i)).or_insert(0) += 1;
    }

    let pairs: Vec<(f64, f64)> = (0..g.node_count())
        .filter_map(|i| curv.gamma_of(i).map(|gm| (gm, g.degree(i) as f64)))
        .collect();

    Ok(DiagnosticsReport {
        total_effective_resistance: total,
        curvature_histogram: curvature_histogram(curv.kappa()),
        degree_histogram,
        orc_degree_pearson: pearson(&pairs),
        min_edge_curvature: curv.min_kappa().unwrap_or(f64::NAN),
        p01_edge_curvature: curv.kappa_percentile(0.01).unwrap_or(f64::NAN),
        connected,
        component_count,
    })
}

fn pearson(pairs: &[(f64, f64)]) -> f64 {
    let n = pairs.len() as f64;
    if pairs.len() < 2 {
        return f64::NAN;
    }
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in pairs {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return f64::NAN;
    }
    sxy / (sxx * syy).sqrt()
}

/// Signed differences (after minus before) of every scalar report field.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsDelta {
    pub total_effective_resistance: f64,
    pub orc_degree_pearson: f64,
    pub min_edge_curvature: f64,
    pub p01_edge_curvature: f64,
    pub component_count: i64,
}

/// Before/after reports with deltas. Both curvature histograms share the
/// same fixed bin edges, so overlays align.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub before: DiagnosticsReport,
    pub after: DiagnosticsReport,
    pub delta: DiagnosticsDelta,
}

pub fn compare(before: &MeshGraph, after: &MeshGraph) -> Result<Comparison> {
    if before.node_count() != after.node_count() {
        return Err(Error::NodeCountMismatch {
            before: before.node_count(),
            after: after.node_count(),
        });
    }
    let rb = report(before)?;
    let ra = report(after)?;
    let diff = |a: f64, b: f64| {
        if a.is_infinite() && b.is_infinite() && a == b {
            f64::NAN
        } else {
            a - b
        }
    };
    let delta = DiagnosticsDelta {
        total_effective_resistance: diff(ra.total_effective_resistance, rb.total_effective_resistance),
        orc_degree_pearson: ra.orc_degree_pearson - rb.orc_degree_pearson,
        min_edge_curvature: ra.min_edge_curvature - rb.min_edge_curvature,
        p01_edge_curvature: ra.p01_edge_curvature - rb.p01_edge_curvature,
        component_count: ra.component_count as i64 - rb.component_count as i64,
    };
    Ok(Comparison {
        before: rb,
        after: ra,
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> MeshGraph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        MeshGraph::with_topology(n, &edges).unwrap()
    }

    fn complete(n: usize) -> MeshGraph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        MeshGraph::with_topology(n, &edges).unwrap()
    }

    #[test]
    fn tree_edge_resistance_is_one() {
        let g = path(3);
        assert!((effective_resistance(&g, 0, 1).unwrap() - 1.0).abs() < 1e-10);
        assert!((effective_resistance(&g, 0, 2).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn triangle_pair_resistance() {
        let g = complete(3);
        assert!((effective_resistance(&g, 0, 1).unwrap() - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn same_node_zero_resistance() {
        let g = path(3);
        assert_eq!(effective_resistance(&g, 1, 1).unwrap(), 0.0);
    }

    #[test]
    fn cross_component_resistance_errors() {
        let g = MeshGraph::with_topology(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(
            effective_resistance(&g, 0, 2).unwrap_err(),
            Error::InfiniteResistance(0, 2)
        );
        // within a component still fine
        assert!((effective_resistance(&g, 0, 1).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn total_resistance_path_and_triangle() {
        assert!((total_effective_resistance(&path(3)).unwrap() - 4.0).abs() < 1e-9);
        assert!((total_effective_resistance(&complete(3)).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn closing_the_path_halves_total_resistance() {
        let p3 = path(3);
        let k3 = p3.add_edges(&[(0, 2)]).unwrap();
        let before = total_effective_resistance(&p3).unwrap();
        let after = total_effective_resistance(&k3).unwrap();
        assert!((before - 4.0).abs() < 1e-9);
        assert!((after - 2.0).abs() < 1e-9);
    }

    #[test]
    fn total_resistance_rejects_disconnected() {
        let g = MeshGraph::with_topology(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(
            total_effective_resistance(&g).unwrap_err(),
            Error::Disconnected { components: 2, .. }
        ));
    }

    #[test]
    fn betweenness_path_star_complete() {
        let b = betweenness_centrality(&path(3));
        assert_eq!(b, vec![0.0, 1.0, 0.0]);

        let b = betweenness_centrality(&complete(4));
        assert!(b.iter().all(|&x| x.abs() < 1e-12));

        let star = MeshGraph::with_topology(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let b = betweenness_centrality(&star);
        assert!((b[0] - 6.0).abs() < 1e-12); // k(k-1)/2 with k = 4
        assert!(b[1..].iter().all(|&x| x.abs() < 1e-12));
    }

    #[test]
    fn histogram_counts_cover_all_edges() {
        let kappa = vec![-2.0, -1.999, 0.0, 0.5, 1.0, 1.0];
        let h = curvature_histogram(&kappa);
        assert_eq!(h.counts.iter().sum::<usize>(), kappa.len());
        assert_eq!(h.bin_edges.len(), 65);
        assert_eq!(h.counts[0], 2);
        assert_eq!(h.counts[63], 2);
    }

    #[test]
    fn compare_identical_graphs_has_zero_deltas() {
        let g = complete(4);
        let c = compare(&g, &g).unwrap();
        assert_eq!(c.delta.total_effective_resistance, 0.0);
        assert_eq!(c.delta.min_edge_curvature, 0.0);
        assert_eq!(c.delta.component_count, 0);
    }

    #[test]
    fn compare_detects_resistance_drop() {
        let p3 = path(3);
        let k3 = p3.add_edges(&[(0, 2)]).unwrap();
        let c = compare(&p3, &k3).unwrap();
        assert!(c.delta.total_effective_resistance <= 0.0);
        assert!((c.delta.total_effective_resistance + 2.0).abs() < 1e-9);
    }

    #[test]
    fn compare_rejects_node_count_mismatch() {
        let err = compare(&path(3), &path(4)).unwrap_err();
        assert!(matches!(err, Error::NodeCountMismatch { .. }));
    }

    #[test]
    fn report_on_disconnected_graph() {
        let g = MeshGraph::with_topology(4, &[(0, 1), (2, 3)]).unwrap();
        let r = report(&g).unwrap();
        assert!(!r.connected);
        assert_eq!(r.component_count, 2);
        assert!(r.total_effective_resistance.is_infinite());
        assert_eq!(r.degree_histogram[&1], 4);
    }
}
