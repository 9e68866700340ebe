//! Brute-force oracles and deterministic graph generators used by the test
//! suites. Everything here is intentionally independent of the production
//! code paths it checks: transport is verified by enumerating polytope
//! vertices, distances by Floyd-Warshall, resistance by an explicit
//! pseudoinverse, spectra by a dense symmetric eigensolver.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use riccimesh_core::MeshGraph;

/// Exact Wasserstein-1 value by exhaustive vertex enumeration of the
/// transportation polytope: every vertex is a basic feasible solution whose
/// basis is a spanning tree on the bipartite supply/demand graph, so
/// enumerating all size-(m + n - 1) cell subsets and keeping the feasible
/// trees visits every vertex. Exponential, fine for supports <= 4.
pub fn w1_vertex_enumeration(supply: &[f64], demand: &[f64], cost: &[f64]) -> f64 {
    let m = supply.len();
    let n = demand.len();
    assert_eq!(cost.len(), m * n);
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let k = m + n - 1;
    let mut best = f64::INFINITY;
    let mut chosen = vec![0usize; k];
    enumerate_subsets(cells.len(), k, &mut chosen, 0, 0, &mut |subset| {
        if let Some(value) = tree_vertex_cost(subset, &cells, supply, demand, cost, m, n) {
            if value < best {
                best = value;
            }
        }
    });
    best
}

fn enumerate_subsets(
    total: usize,
    k: usize,
    chosen: &mut [usize],
    depth: usize,
    start: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if depth == k {
        visit(chosen);
        return;
    }
    for c in start..total {
        if total - c < k - depth {
            break;
        }
        chosen[depth] = c;
        enumerate_subsets(total, k, chosen, depth + 1, c + 1, visit);
    }
}

/// Solves the flows of a candidate basis by leaf peeling; `None` when the
/// subset is not a spanning tree or the vertex is infeasible.
fn tree_vertex_cost(
    subset: &[usize],
    cells: &[(usize, usize)],
    supply: &[f64],
    demand: &[f64],
    cost: &[f64],
    m: usize,
    n: usize,
) -> Option<f64> {
    let total = m + n;
    let mut degree = vec![0usize; total];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); total];
    for (pos, &cell_idx) in subset.iter().enumerate() {
        let (i, j) = cells[cell_idx];
        degree[i] += 1;
        degree[m + j] += 1;
        incident[i].push(pos);
        incident[m + j].push(pos);
    }
    if degree.iter().any(|&d| d == 0) {
        return None; // not spanning
    }

    let mut balance: Vec<f64> = supply
        .iter()
        .copied()
        .chain(demand.iter().map(|&d| -d))
        .collect();
    let mut alive = vec![true; subset.len()];
    let mut flows = vec![0.0; subset.len()];
    let mut remaining = subset.len();
    let mut leaves: Vec<usize> = (0..total).filter(|&v| degree[v] == 1).collect();
    while let Some(v) = leaves.pop() {
        let Some(&pos) = incident[v].iter().find(|&&p| alive[p]) else {
            continue;
        };
        let (i, j) = cells[subset[pos]];
        let (a, b) = (i, m + j);
        let flow = if v == a { balance[a] } else { -balance[b] };
        flows[pos] = flow;
        alive[pos] = false;
        remaining -= 1;
        balance[a] -= flow;
        balance[b] += flow;
        for &node in &[a, b] {
            degree[node] -= 1;
            if degree[node] == 1 {
                leaves.push(node);
            }
        }
    }
    if remaining != 0 {
        return None; // a cycle: not a tree
    }
    if flows.iter().any(|&f| f < -1e-9) {
        return None; // infeasible vertex
    }
    Some(
        subset
            .iter()
            .zip(&flows)
            .map(|(&cell_idx, &f)| {
                let (i, j) = cells[cell_idx];
                f * cost[i * n + j]
            })
            .sum(),
    )
}

/// All-pairs hop distances; `None` marks unreachable pairs.
pub fn floyd_warshall(g: &MeshGraph) -> Vec<Vec<Option<usize>>> {
    let n = g.node_count();
    let mut d = vec![vec![None; n]; n];
    for i in 0..n {
        d[i][i] = Some(0);
        for &j in g.neighbors(i) {
            d[i][j] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(dik) = d[i][k] else { continue };
            for j in 0..n {
                let Some(dkj) = d[k][j] else { continue };
                let through = dik + dkj;
                if d[i][j].map_or(true, |cur| through < cur) {
                    d[i][j] = Some(through);
                }
            }
        }
    }
    d
}

/// Effective resistance through the explicit pseudoinverse
/// `(L + J/n)^-1 - J/n`, a different algebraic route than the production
/// code. Only valid on connected graphs.
pub fn resistance_oracle(g: &MeshGraph) -> DMatrix<f64> {
    let n = g.node_count();
    let jn = 1.0 / n as f64;
    let mut a = DMatrix::from_element(n, n, jn);
    for i in 0..n {
        a[(i, i)] += g.degree(i) as f64;
    }
    for &(u, v) in g.edges() {
        a[(u, v)] -= 1.0;
        a[(v, u)] -= 1.0;
    }
    let pinv = a.try_inverse().expect("connected Laplacian plus J/n is invertible")
        - DMatrix::from_element(n, n, jn);
    let mut r = DMatrix::zeros(n, n);
    for u in 0..n {
        for v in 0..n {
            r[(u, v)] = pinv[(u, u)] + pinv[(v, v)] - 2.0 * pinv[(u, v)];
        }
    }
    r
}

/// Sum of effective resistance over unordered pairs via the oracle matrix.
pub fn total_resistance_oracle(g: &MeshGraph) -> f64 {
    let r = resistance_oracle(g);
    let n = g.node_count();
    let mut total = 0.0;
    for u in 0..n {
        for v in u + 1..n {
            total += r[(u, v)];
        }
    }
    total
}

/// Eigendecomposition of the degree-plus-one normalized adjacency
/// `M_uv = 1 / sqrt((1 + deg u)(1 + deg v))` on edges. Returns
/// (eigenvalues, eigenvectors) sorted by descending eigenvalue; columns of
/// the matrix are the eigenvectors.
pub fn normalized_adjacency_eigen(g: &MeshGraph) -> (Vec<f64>, DMatrix<f64>) {
    let n = g.node_count();
    let mut m = DMatrix::zeros(n, n);
    for &(u, v) in g.edges() {
        let w = 1.0 / (((g.degree(u) + 1) * (g.degree(v) + 1)) as f64).sqrt();
        m[(u, v)] = w;
        m[(v, u)] = w;
    }
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        vectors.set_column(new_col, &eig.eigenvectors.column(old_col));
    }
    (values, vectors)
}

/// Random connected graph: a random spanning tree (random attachment) plus
/// `extra` random chords. Deterministic for a fixed seed.
pub fn random_connected_graph(seed: u64, nodes: usize, extra: usize) -> MeshGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for v in 1..nodes {
        let u = rng.random_range(0..v);
        edges.push((u, v));
    }
    let mut attempts = 0;
    let mut chords = 0;
    while chords < extra && attempts < extra * 20 {
        attempts += 1;
        let u = rng.random_range(0..nodes);
        let v = rng.random_range(0..nodes);
        if u == v {
            continue;
        }
        let e = (u.min(v), u.max(v));
        if !edges.contains(&e) {
            edges.push(e);
            chords += 1;
        }
    }
    MeshGraph::with_topology(nodes, &edges).expect("valid random graph")
}

/// Random tree on `nodes` nodes (random attachment), deterministic per seed.
pub fn random_tree(seed: u64, nodes: usize) -> MeshGraph {
    random_connected_graph(seed, nodes, 0)
}

/// Random measure masses: `support_size` strictly positive rationals
/// (denominator <= 64) normalized to sum 1. Deterministic per rng state.
pub fn random_rational_masses(rng: &mut ChaCha8Rng, support_size: usize) -> Vec<f64> {
    let numerators: Vec<u32> = (0..support_size).map(|_| rng.random_range(1..=64)).collect();
    let total: u32 = numerators.iter().sum();
    numerators.iter().map(|&x| x as f64 / total as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_handles_a_known_instance() {
        // point mass to point mass pays the ground distance
        assert!((w1_vertex_enumeration(&[1.0], &[1.0], &[3.5]) - 3.5).abs() < 1e-12);
        // 2x2 with an obvious diagonal optimum
        let v = w1_vertex_enumeration(&[0.5, 0.5], &[0.5, 0.5], &[0.0, 1.0, 1.0, 0.0]);
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn floyd_warshall_on_a_path() {
        let g = MeshGraph::with_topology(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let d = floyd_warshall(&g);
        assert_eq!(d[0][3], Some(3));
        assert_eq!(d[1][1], Some(0));
    }

    #[test]
    fn resistance_oracle_on_a_triangle() {
        let g = MeshGraph::with_topology(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let r = resistance_oracle(&g);
        assert!((r[(0, 1)] - 2.0 / 3.0).abs() < 1e-10);
        assert!((total_resistance_oracle(&g) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn random_graphs_are_connected() {
        for seed in 0..20 {
            let g = random_connected_graph(seed, 17, 5);
            assert!(g.is_connected());
        }
    }

    #[test]
    fn rational_masses_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let masses = random_rational_masses(&mut rng, 4);
        assert_eq!(masses.len(), 4);
        let total: f64 = masses.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(masses.iter().all(|&m| m > 0.0));
    }
}
