//! Exact solver for the balanced transportation problem.
//!
//! Solves `min sum pi(p, q) * cost(p, q)` over couplings `pi` with fixed
//! marginals, using the transportation simplex on the dense cost matrix.
//! Instances here are tiny (supports bounded by the maximal degree), so an
//! exact basis-exchange method is cheap and the optimal plan is available
//! for callers that need the coupling itself.

/// Optimal value and coupling for one transportation instance.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    /// Optimal objective value.
    pub cost: f64,
    /// Optimal flow, row-major `m x n`.
    pub flow: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
}

impl TransportPlan {
    #[inline]
    pub fn flow_at(&self, i: usize, j: usize) -> f64 {
        self.flow[i * self.cols + j]
    }
}

const REDUCED_COST_TOL: f64 = 1e-12;

/// Exact minimum-cost transport between `supply` and `demand` under the
/// dense `cost` matrix (row-major `m x n`).
///
/// Preconditions: all masses non-negative, totals equal up to rounding,
/// all costs finite. Demands are rescaled so the totals match exactly.
/// Entering variables follow Bland's rule, which makes the pivot sequence
/// deterministic and free of cycling under degeneracy.
pub fn min_cost_transport(supply: &[f64], demand: &[f64], cost: &[f64]) -> TransportPlan {
    let m = supply.len();
    let n = demand.len();
    assert!(m > 0 && n > 0, "empty marginals");
    assert_eq!(cost.len(), m * n, "cost matrix shape mismatch");
    debug_assert!(cost.iter().all(|c| c.is_finite()));

    let total_supply: f64 = supply.iter().sum();
    let total_demand: f64 = demand.iter().sum();
    assert!(total_supply > 0.0 && total_demand > 0.0, "zero total mass");
    let scale = total_supply / total_demand;

    let mut a = supply.to_vec();
    let mut b: Vec<f64> = demand.iter().map(|x| x * scale).collect();

    // Northwest-corner initial basis: always m + n - 1 cells forming a
    // staircase spanning tree, degenerate zero cells included.
    let mut flow = vec![0.0; m * n];
    let mut basis: Vec<(usize, usize)> = Vec::with_capacity(m + n - 1);
    let mut in_basis = vec![false; m * n];
    let (mut i, mut j) = (0, 0);
    for step in 0..m + n - 1 {
        let x = a[i].min(b[j]);
        flow[i * n + j] = x;
        basis.push((i, j));
        in_basis[i * n + j] = true;
        a[i] -= x;
        b[j] -= x;
        if step + 1 == m + n - 1 {
            break;
        }
        if a[i] <= b[j] && i + 1 < m {
            i += 1;
        } else {
            j += 1;
        }
    }

    // Bases cannot repeat under Bland's rule, so the number of exchanges is
    // bounded; the cap only guards against float-tolerance pathologies.
    let max_pivots = 1000 * (m + n) * (m + n);
    for pivot in 0.. {
        assert!(pivot < max_pivots, "transportation simplex failed to converge");
        let (u, v) = duals(&basis, cost, m, n);

        // Bland's rule: first cell in lexicographic order with negative
        // reduced cost enters the basis.
        let mut entering = None;
        'scan: for r in 0..m {
            for c in 0..n {
                if in_basis[r * n + c] {
                    continue;
                }
                if cost[r * n + c] - u[r] - v[c] < -REDUCED_COST_TOL {
                    entering = Some((r, c));
                    break 'scan;
                }
            }
        }
        let Some(enter) = entering else { break };

        // The basis is a spanning tree on rows + cols; adding the entering
        // cell closes exactly one cycle. Flow alternates +/- around it.
        let cycle = tree_cycle(&basis, enter, m, n);
        let mut theta = f64::INFINITY;
        let mut leaving = None;
        for (idx, &cell) in cycle.iter().enumerate() {
            if idx % 2 == 1 {
                let f = flow[cell.0 * n + cell.1];
                if f < theta - REDUCED_COST_TOL
                    || (f <= theta + REDUCED_COST_TOL && leaving.map_or(true, |l| cell < l))
                {
                    theta = f;
                    leaving = Some(cell);
                }
            }
        }
        let leaving = leaving.expect("cycle always has a negative-position cell");

        for (idx, &cell) in cycle.iter().enumerate() {
            let entry = &mut flow[cell.0 * n + cell.1];
            if idx % 2 == 0 {
                *entry += theta;
            } else {
                *entry -= theta;
            }
        }
        flow[leaving.0 * n + leaving.1] = 0.0;

        let pos = basis.iter().position(|&c| c == leaving).unwrap();
        basis.remove(pos);
        in_basis[leaving.0 * n + leaving.1] = false;
        basis.push(enter);
        in_basis[enter.0 * n + enter.1] = true;
    }

    for f in &mut flow {
        if *f < 0.0 {
            debug_assert!(*f > -1e-9, "negative flow of magnitude {}", -*f);
            *f = 0.0;
        }
    }
    let total_cost = flow
        .iter()
        .zip(cost.iter())
        .map(|(f, c)| f * c)
        .sum::<f64>();
    TransportPlan {
        cost: total_cost,
        flow,
        rows: m,
        cols: n,
    }
}

/// Dual potentials from the basis tree: u[i] + v[j] = cost[i, j] on every
/// basic cell, anchored at u[0] = 0.
fn duals(basis: &[(usize, usize)], cost: &[f64], m: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut row_cells: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut col_cells: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, &(r, c)) in basis.iter().enumerate() {
        row_cells[r].push(k);
        col_cells[c].push(k);
    }
    let mut u = vec![f64::NAN; m];
    let mut v = vec![f64::NAN; n];
    u[0] = 0.0;
    let mut stack = vec![Node::Row(0)];
    while let Some(node) = stack.pop() {
        match node {
            Node::Row(r) => {
                for &k in &row_cells[r] {
                    let (_, c) = basis[k];
                    if v[c].is_nan() {
                        v[c] = cost[r * n + c] - u[r];
                        stack.push(Node::Col(c));
                    }
                }
            }
            Node::Col(c) => {
                for &k in &col_cells[c] {
                    let (r, _) = basis[k];
                    if u[r].is_nan() {
                        u[r] = cost[r * n + c] - v[c];
                        stack.push(Node::Row(r));
                    }
                }
            }
        }
    }
    debug_assert!(u.iter().all(|x| !x.is_nan()) && v.iter().all(|x| !x.is_nan()));
    (u, v)
}

#[derive(Clone, Copy)]
enum Node {
    Row(usize),
    Col(usize),
}

/// Cycle created by `enter`, listed so the entering cell comes first and
/// signs alternate +, -, +, ... along the list.
fn tree_cycle(
    basis: &[(usize, usize)],
    enter: (usize, usize),
    m: usize,
    n: usize,
) -> Vec<(usize, usize)> {
    // Bipartite tree nodes: rows are 0..m, cols are m..m+n.
    let total = m + n;
    let mut adj: Vec<Vec<(usize, (usize, usize))>> = vec![Vec::new(); total];
    for &(r, c) in basis {
        adj[r].push((m + c, (r, c)));
        adj[m + c].push((r, (r, c)));
    }
    // Path from the entering cell's column node back to its row node.
    let start = m + enter.1;
    let goal = enter.0;
    let mut parent: Vec<Option<(usize, (usize, usize))>> = vec![None; total];
    let mut visited = vec![false; total];
    visited[start] = true;
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(start);
    while let Some(x) = queue.pop_front() {
        if x == goal {
            break;
        }
        for &(y, cell) in &adj[x] {
            if !visited[y] {
                visited[y] = true;
                parent[y] = Some((x, cell));
                queue.push_back(y);
            }
        }
    }
    let mut cycle = vec![enter];
    let mut at = goal;
    while at != start {
        let (prev, cell) = parent[at].expect("basis tree is connected");
        cycle.push(cell);
        at = prev;
    }
    cycle
}
