//! Synthetic triangulated meshes with controlled refinement and analytic
//! physical fields.
//!
//! The generator emulates channel-flow-around-a-cylinder geometry: a
//! structured triangulated grid, an optional disk obstacle whose boundary
//! ring is snapped onto the circle, one level of midpoint refinement near
//! the obstacle (red-green, so the mesh stays triangulated), and a
//! potential-flow velocity field with Bernoulli pressure.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::graph::{canonical_pair, node_type, MeshGraph, NodeData, Trajectory};

/// Disk obstacle: nodes strictly inside are removed, the adjacent ring is
/// snapped onto the circle and tagged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obstacle {
    pub center: [f64; 2],
    pub radius: f64,
}

/// Full specification of one synthetic mesh trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshSpec {
    /// Grid resolution in cells per axis.
    pub nx: usize,
    pub ny: usize,
    /// Rectangle extents: (x_min, x_max, y_min, y_max).
    pub domain: (f64, f64, f64, f64),
    pub obstacle: Option<Obstacle>,
    /// Triangles with a vertex within this distance of the obstacle circle
    /// are subdivided once. Ignored without an obstacle.
    pub refine_radius: Option<f64>,
    /// Free-stream speed U.
    pub inflow_speed: f64,
    pub frames: usize,
    pub time_step: f64,
}

impl Default for MeshSpec {
    fn default() -> Self {
        MeshSpec {
            nx: 40,
            ny: 16,
            domain: (0.0, 1.0, 0.0, 1.0),
            obstacle: None,
            refine_radius: None,
            inflow_speed: 1.0,
            frames: 1,
            time_step: 0.01,
        }
    }
}

impl MeshSpec {
    fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidMeshSpec(msg));
        if self.nx < 2 || self.ny < 2 {
            return fail(format!("nx and ny must be >= 2, got ({}, {})", self.nx, self.ny));
        }
        let (x0, x1, y0, y1) = self.domain;
        if ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) || x1 <= x0 || y1 <= y0 {
            return fail(format!("invalid domain extents ({x0}, {x1}, {y0}, {y1})"));
        }
        if !self.inflow_speed.is_finite() || self.inflow_speed < 0.0 {
            return fail(format!("inflow_speed must be >= 0, got {}", self.inflow_speed));
        }
        if self.frames == 0 {
            return fail("frames must be >= 1".into());
        }
        if !self.time_step.is_finite() || self.time_step <= 0.0 {
            return fail(format!("time_step must be > 0, got {}", self.time_step));
        }
        if let Some(ob) = &self.obstacle {
            if !ob.radius.is_finite() || ob.radius <= 0.0 {
                return fail(format!("obstacle radius must be > 0, got {}", ob.radius));
            }
            let [cx, cy] = ob.center;
            if cx - ob.radius <= x0 || cx + ob.radius >= x1 || cy - ob.radius <= y0 || cy + ob.radius >= y1
            {
                return fail("obstacle larger than domain (disk must fit strictly inside)".into());
            }
        }
        if let Some(r) = self.refine_radius {
            if !r.is_finite() || r < 0.0 {
                return fail(format!("refine_radius must be >= 0, got {r}"));
            }
        }
        Ok(())
    }
}

/// Analytic potential-flow velocity around a disk of radius `radius`
/// centered at `center`, free-stream speed `u_inf` along +x. Exactly
/// divergence-free; the radial component vanishes on the circle.
pub fn potential_flow_velocity(center: [f64; 2], radius: f64, u_inf: f64, p: [f64; 2]) -> [f64; 2] {
    let x = p[0] - center[0];
    let y = p[1] - center[1];
    let r2 = x * x + y * y;
    let r4 = r2 * r2;
    let rr = radius * radius;
    [
        u_inf * (1.0 - rr * (x * x - y * y) / r4),
        -2.0 * u_inf * rr * x * y / r4,
    ]
}

/// Generates the trajectory described by `spec`: one topology shared by all
/// frames (static mesh), velocity from potential flow (uniform `(U, 0)`
/// without an obstacle), pressure from Bernoulli `p = U^2/2 - |w|^2/2`,
/// and the frame-k speed `U * (1 + 0.1 sin(2 pi k / frames))`.
pub fn generate(spec: &MeshSpec) -> Result<Trajectory> {
    spec.validate()?;
    let topo = build_topology(spec)?;
    let frames_total = spec.frames;
    let mut frames = Vec::with_capacity(frames_total);
    for k in 0..frames_total {
        let u_k = spec.inflow_speed * (1.0 + 0.1 * (2.0 * PI * k as f64 / frames_total as f64).sin());
        let velocity: Vec<[f64; 2]> = topo
            .positions
            .iter()
            .map(|&p| match &spec.obstacle {
                Some(ob) => potential_flow_velocity(ob.center, ob.radius, u_k, p),
                None => [u_k, 0.0],
            })
            .collect();
        let pressure: Vec<f64> = velocity
            .iter()
            .map(|w| 0.5 * u_k * u_k - 0.5 * (w[0] * w[0] + w[1] * w[1]))
            .collect();
        let data = NodeData {
            positions: topo.positions.clone(),
            velocity,
            node_type: topo.node_type.clone(),
            pressure: Some(pressure),
            density: None,
        };
        frames.push(MeshGraph::from_cells(data, topo.cells.clone())?);
    }
    Trajectory::new(frames, true)
}

struct Topology {
    positions: Vec<[f64; 2]>,
    node_type: Vec<u8>,
    cells: Vec<[usize; 3]>,
}

fn build_topology(spec: &MeshSpec) -> Result<Topology> {
    let (x0, x1, y0, y1) = spec.domain;
    let (nx, ny) = (spec.nx, spec.ny);
    let dx = (x1 - x0) / nx as f64;
    let dy = (y1 - y0) / ny as f64;
    let cols = nx + 1;

    let mut positions: Vec<[f64; 2]> = Vec::with_capacity(cols * (ny + 1));
    for iy in 0..=ny {
        for ix in 0..=nx {
            positions.push([x0 + ix as f64 * dx, y0 + iy as f64 * dy]);
        }
    }
    let id = |ix: usize, iy: usize| iy * cols + ix;

    // Quads split along one diagonal, direction alternating per row: every
    // interior node ends up with degree exactly 6.
    let mut cells: Vec<[usize; 3]> = Vec::with_capacity(2 * nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            let bl = id(ix, iy);
            let br = id(ix + 1, iy);
            let tl = id(ix, iy + 1);
            let tr = id(ix + 1, iy + 1);
            if iy % 2 == 0 {
                cells.push([bl, br, tr]);
                cells.push([bl, tr, tl]);
            } else {
                cells.push([bl, br, tl]);
                cells.push([br, tr, tl]);
            }
        }
    }

    let mut obstacle_ring: BTreeSet<usize> = BTreeSet::new();
    if let Some(ob) = &spec.obstacle {
        let [cx, cy] = ob.center;
        let dist = |p: [f64; 2]| ((p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sqrt();
        let removed: Vec<bool> = positions.iter().map(|&p| dist(p) < ob.radius).collect();

        // Ring: kept nodes adjacent to a removed node through any original
        // cell edge. Detected before dropping cells.
        let mut ring: BTreeSet<usize> = BTreeSet::new();
        for cell in &cells {
            for &(a, b) in &[(cell[0], cell[1]), (cell[1], cell[2]), (cell[0], cell[2])] {
                if removed[a] && !removed[b] {
                    ring.insert(b);
                }
                if removed[b] && !removed[a] {
                    ring.insert(a);
                }
            }
        }
        cells.retain(|c| c.iter().all(|&v| !removed[v]));

        // Snap ring nodes onto the circle so the analytic radial velocity
        // vanishes there exactly.
        for &v in &ring {
            let p = positions[v];
            let d = dist(p);
            positions[v] = [
                cx + (p[0] - cx) / d * ob.radius,
                cy + (p[1] - cy) / d * ob.radius,
            ];
        }

        // Compact node ids.
        let mut remap: Vec<Option<usize>> = vec![None; positions.len()];
        let mut new_positions = Vec::with_capacity(positions.len());
        for (old, &p) in positions.iter().enumerate() {
            if !removed[old] {
                remap[old] = Some(new_positions.len());
                new_positions.push(p);
            }
        }
        if new_positions.len() < 3 {
            return Err(Error::InvalidMeshSpec(
                "obstacle removal leaves fewer than 3 nodes".into(),
            ));
        }
        for cell in &mut cells {
            for v in cell.iter_mut() {
                *v = remap[*v].expect("cells only reference kept nodes");
            }
        }
        obstacle_ring = ring.iter().map(|&v| remap[v].unwrap()).collect();
        positions = new_positions;
    }

    // Boundary tags from exact grid coordinates; ring beats the rest.
    let mut tags: Vec<u8> = positions
        .iter()
        .map(|&[x, y]| {
            if x == x0 {
                node_type::INLET
            } else if x == x1 {
                node_type::OUTLET
            } else if y == y0 || y == y1 {
                node_type::WALL
            } else {
                node_type::INTERIOR
            }
        })
        .collect();
    for &v in &obstacle_ring {
        tags[v] = node_type::OBSTACLE;
    }

    if let (Some(rr), Some(ob)) = (spec.refine_radius, &spec.obstacle) {
        refine_near_obstacle(&mut positions, &mut tags, &mut cells, ob, rr, spec.domain);
    }

    if positions.len() < 3 {
        return Err(Error::InvalidMeshSpec(
            "refinement producing < 3 nodes".into(),
        ));
    }

    Ok(Topology {
        positions,
        node_type: tags,
        cells,
    })
}

/// One level of red-green midpoint refinement: triangles within
/// `refine_radius` of the obstacle circle are 4-split (red); neighbors left
/// with one hanging midpoint are bisected toward the opposite vertex
/// (green), so the mesh stays triangulated. Triangles that would carry two
/// or more hanging midpoints are promoted to red until the marking is
/// stable.
fn refine_near_obstacle(
    positions: &mut Vec<[f64; 2]>,
    tags: &mut Vec<u8>,
    cells: &mut Vec<[usize; 3]>,
    ob: &Obstacle,
    refine_radius: f64,
    domain: (f64, f64, f64, f64),
) {
    let [cx, cy] = ob.center;
    let circle_dist = |p: [f64; 2]| {
        (((p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sqrt() - ob.radius).max(0.0)
    };

    let mut red: Vec<bool> = cells
        .iter()
        .map(|c| c.iter().any(|&v| circle_dist(positions[v]) <= refine_radius))
        .collect();

    let edges_of = |c: &[usize; 3]| {
        [
            canonical_pair(c[0], c[1]),
            canonical_pair(c[1], c[2]),
            canonical_pair(c[0], c[2]),
        ]
    };

    loop {
        let split: BTreeSet<(usize, usize)> = cells
            .iter()
            .zip(&red)
            .filter(|(_, &r)| r)
            .flat_map(|(c, _)| edges_of(c))
            .collect();
        let mut promoted = false;
        for (k, cell) in cells.iter().enumerate() {
            if red[k] {
                continue;
            }
            let hanging = edges_of(cell).iter().filter(|e| split.contains(e)).count();
            if hanging >= 2 {
                red[k] = true;
                promoted = true;
            }
        }
        if !promoted {
            break;
        }
    }

    let split: BTreeSet<(usize, usize)> = cells
        .iter()
        .zip(&red)
        .filter(|(_, &r)| r)
        .flat_map(|(c, _)| edges_of(c))
        .collect();

    // Midpoint nodes in deterministic (sorted-edge) order.
    let (x0, x1, y0, y1) = domain;
    let mut midpoint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &(a, b) in &split {
        let pa = positions[a];
        let pb = positions[b];
        let mut p = [(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0];
        let tag = if tags[a] == node_type::OBSTACLE && tags[b] == node_type::OBSTACLE {
            // chord midpoint dips inside the disk; put it back on the circle
            let d = ((p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sqrt();
            p = [cx + (p[0] - cx) / d * ob.radius, cy + (p[1] - cy) / d * ob.radius];
            node_type::OBSTACLE
        } else if p[0] == x0 {
            node_type::INLET
        } else if p[0] == x1 {
            node_type::OUTLET
        } else if p[1] == y0 || p[1] == y1 {
            node_type::WALL
        } else {
            node_type::INTERIOR
        };
        midpoint.insert((a, b), positions.len());
        positions.push(p);
        tags.push(tag);
    }

    let mut new_cells: Vec<[usize; 3]> = Vec::with_capacity(cells.len() * 2);
    for (k, cell) in cells.iter().enumerate() {
        let [a, b, c] = *cell;
        if red[k] {
            let mab = midpoint[&canonical_pair(a, b)];
            let mbc = midpoint[&canonical_pair(b, c)];
            let mac = midpoint[&canonical_pair(a, c)];
            new_cells.push([a, mab, mac]);
            new_cells.push([b, mab, mbc]);
            new_cells.push([c, mac, mbc]);
            new_cells.push([mab, mbc, mac]);
        } else {
            let cell_edges = edges_of(cell);
            let hanging: Vec<(usize, usize)> = cell_edges
                .iter()
                .copied()
                .filter(|e| split.contains(e))
                .collect();
            match hanging.len() {
                0 => new_cells.push(*cell),
                1 => {
                    let (u, v) = hanging[0];
                    let w = *cell.iter().find(|&&x| x != u && x != v).unwrap();
                    let m = midpoint[&(u, v)];
                    new_cells.push([u, m, w]);
                    new_cells.push([m, v, w]);
                }
                _ => unreachable!("closure left a cell with 2+ hanging midpoints"),
            }
        }
    }
    *cells = new_cells;
}
