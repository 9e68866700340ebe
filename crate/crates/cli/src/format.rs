//! On-disk formats: `.mgj` trajectories, edit logs, and report files.
//!
//! Serialization is canonical: fixed key order (struct order), compact
//! JSON, shortest round-trip floats, one trailing newline. Parsing a
//! serialized trajectory reproduces it exactly, and serializing again is
//! byte-identical.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use riccimesh_core::diagnostics::{Comparison, DiagnosticsReport, Histogram};
use riccimesh_core::graph::canonical_pair;
use riccimesh_core::rewiring::{RewireConfig, RewireResult, TrajectoryMode};
use riccimesh_core::{MeshGraph, NodeData, Trajectory};

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

/// Top level of an `.mgj` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryFile {
    pub version: u32,
    pub static_mesh: bool,
    pub frames: Vec<FrameFile>,
}

/// One frame. `edges` is present only when the edge set differs from the
/// deduplicated union of cell sides (i.e. after rewiring); on parse an
/// absent `edges` means "derive from cells".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameFile {
    pub positions: Vec<[f64; 2]>,
    pub cells: Vec<[usize; 3]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub edges: Option<Vec<(usize, usize)>>,
    pub node_type: Vec<u8>,
    pub velocity: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pressure: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub density: Option<Vec<f64>>,
}

fn derived_edges(cells: &[[usize; 3]]) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = cells
        .iter()
        .flat_map(|&[a, b, c]| {
            [
                canonical_pair(a, b),
                canonical_pair(b, c),
                canonical_pair(a, c),
            ]
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

fn check_finite(name: &str, frame: usize, values: impl IntoIterator<Item = f64>) -> Result<(), CliError> {
    for v in values {
        if !v.is_finite() {
            return Err(CliError::format(format!(
                "frame {frame}: non-finite value in {name}"
            )));
        }
    }
    Ok(())
}

pub fn trajectory_to_file(t: &Trajectory) -> Result<TrajectoryFile, CliError> {
    let mut frames = Vec::with_capacity(t.frames().len());
    for (k, g) in t.frames().iter().enumerate() {
        let cells: Vec<[usize; 3]> = g.cells().map(|c| c.to_vec()).unwrap_or_default();
        let edges = if g.edges() == derived_edges(&cells).as_slice() {
            None
        } else {
            Some(g.edges().to_vec())
        };
        check_finite("positions", k, g.positions().iter().flatten().copied())?;
        check_finite("velocity", k, g.velocity().iter().flatten().copied())?;
        if let Some(p) = g.pressure() {
            check_finite("pressure", k, p.iter().copied())?;
        }
        if let Some(d) = g.density() {
            check_finite("density", k, d.iter().copied())?;
        }
        frames.push(FrameFile {
            positions: g.positions().to_vec(),
            cells,
            edges,
            node_type: g.node_types().to_vec(),
            velocity: g.velocity().to_vec(),
            pressure: g.pressure().map(|p| p.to_vec()),
            density: g.density().map(|d| d.to_vec()),
        });
    }
    Ok(TrajectoryFile {
        version: FORMAT_VERSION,
        static_mesh: t.static_mesh(),
        frames,
    })
}

pub fn trajectory_from_file(file: &TrajectoryFile) -> Result<Trajectory, CliError> {
    if file.version != FORMAT_VERSION {
        return Err(CliError::format(format!(
            "unsupported format version {} (expected {FORMAT_VERSION})",
            file.version
        )));
    }
    if file.frames.is_empty() {
        return Err(CliError::format("trajectory has no frames".into()));
    }
    let mut frames = Vec::with_capacity(file.frames.len());
    for (k, f) in file.frames.iter().enumerate() {
        let data = NodeData {
            positions: f.positions.clone(),
            velocity: f.velocity.clone(),
            node_type: f.node_type.clone(),
            pressure: f.pressure.clone(),
            density: f.density.clone(),
        };
        let cells = if f.cells.is_empty() {
            None
        } else {
            Some(f.cells.clone())
        };
        let graph = match &f.edges {
            Some(edges) => MeshGraph::from_parts(data, edges, cells),
            None => match cells {
                Some(cells) => MeshGraph::from_cells(data, cells),
                None => MeshGraph::from_edges(data, &[]),
            },
        }
        .map_err(|e| CliError::format(format!("frame {k}: {e}")))?;
        frames.push(graph);
    }
    Trajectory::new(frames, file.static_mesh)
        .map_err(|e| CliError::format(format!("invalid trajectory: {e}")))
}

/// Canonical bytes: compact JSON plus one trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string(value)
        .map_err(|e| CliError::format(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn write_trajectory(path: &Path, t: &Trajectory) -> Result<(), CliError> {
    let file = trajectory_to_file(t)?;
    std::fs::write(path, to_canonical_json(&file)?).map_err(|e| CliError::io(path, e))
}

pub fn read_trajectory(path: &Path) -> Result<Trajectory, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file: TrajectoryFile = serde_json::from_str(&text)
        .map_err(|e| CliError::format(format!("{}: {e}", path.display())))?;
    trajectory_from_file(&file)
}

// ---------------------------------------------------------------------------
// Edit logs
// ---------------------------------------------------------------------------

/// Replayable record of one rewiring run. Applying the log to the input
/// trajectory reproduces the output graphs exactly. Wall-clock timings are
/// reported on stdout, not here, so identical runs write identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EditLogFile {
    pub method: String,
    pub config: RewireConfig,
    pub mode: TrajectoryMode,
    pub frames: Vec<EditLogFrame>,
    pub stats: EditLogStats,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EditLogFrame {
    /// `[source, target, direction]` triples in insertion order.
    pub added: Vec<(usize, usize, String)>,
    pub removed: Vec<(usize, usize)>,
    pub curvature_passes: usize,
    pub timed_out: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EditLogStats {
    pub frames: usize,
    pub added: usize,
    pub removed: usize,
    pub timed_out: bool,
}

pub fn edit_log_from_results(
    cfg: &RewireConfig,
    mode: TrajectoryMode,
    results: &[RewireResult],
    notes: Vec<String>,
) -> EditLogFile {
    let frames: Vec<EditLogFrame> = results
        .iter()
        .map(|r| EditLogFrame {
            added: r
                .added
                .iter()
                .map(|&(s, t, d)| (s, t, d.as_str().to_string()))
                .collect(),
            removed: r.removed.clone(),
            curvature_passes: r.stats.curvature_passes,
            timed_out: r.stats.timed_out,
        })
        .collect();
    let stats = EditLogStats {
        frames: results.len(),
        added: results.iter().map(|r| r.added.len()).sum(),
        removed: results.iter().map(|r| r.removed.len()).sum(),
        timed_out: results.iter().any(|r| r.stats.timed_out),
    };
    EditLogFile {
        method: cfg.method.name().to_string(),
        config: cfg.clone(),
        mode,
        frames,
        stats,
        notes,
    }
}

/// Applies a log to its input trajectory: per frame, remove the removed
/// edges, then insert the added pairs.
pub fn apply_edit_log(t: &Trajectory, log: &EditLogFile) -> Result<Trajectory, CliError> {
    if log.frames.len() != t.frames().len() {
        return Err(CliError::format(format!(
            "edit log covers {} frames but trajectory has {}",
            log.frames.len(),
            t.frames().len()
        )));
    }
    let mut frames = Vec::with_capacity(t.frames().len());
    for (frame, edits) in t.frames().iter().zip(&log.frames) {
        let pairs: Vec<(usize, usize)> = edits.added.iter().map(|&(s, r, _)| (s, r)).collect();
        let g = frame
            .remove_edges(&edits.removed)
            .and_then(|g| g.add_edges(&pairs))
            .map_err(CliError::from)?;
        frames.push(g);
    }
    rebuild_trajectory(frames, t.static_mesh())
}

/// Frames may diverge under per-frame rewiring; the static flag survives
/// only when topology and positions stayed uniform.
pub fn rebuild_trajectory(frames: Vec<MeshGraph>, was_static: bool) -> Result<Trajectory, CliError> {
    let still_static = was_static
        && frames
            .windows(2)
            .all(|w| w[0].edges() == w[1].edges() && w[0].positions() == w[1].positions());
    Trajectory::new(frames, still_static).map_err(CliError::from)
}

// ---------------------------------------------------------------------------
// Report files
// ---------------------------------------------------------------------------

fn finite_or_none(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvatureSummaryFile {
    pub weighted: bool,
    pub frames: Vec<CurvatureFrameSummary>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvatureFrameSummary {
    pub frame: usize,
    pub edges: usize,
    pub min: Option<f64>,
    pub p01: Option<f64>,
    pub mean: Option<f64>,
}

/// Scalar diagnostics with non-finite values rendered as `null`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticsFile {
    pub total_effective_resistance: Option<f64>,
    pub orc_degree_pearson: Option<f64>,
    pub min_edge_curvature: Option<f64>,
    pub p01_edge_curvature: Option<f64>,
    pub connected: bool,
    pub component_count: usize,
    pub edge_count_by_curvature_bin: Vec<usize>,
    pub degree_histogram: BTreeMap<usize, usize>,
}

impl DiagnosticsFile {
    pub fn from_report(r: &DiagnosticsReport) -> Self {
        DiagnosticsFile {
            total_effective_resistance: finite_or_none(r.total_effective_resistance),
            orc_degree_pearson: finite_or_none(r.orc_degree_pearson),
            min_edge_curvature: finite_or_none(r.min_edge_curvature),
            p01_edge_curvature: finite_or_none(r.p01_edge_curvature),
            connected: r.connected,
            component_count: r.component_count,
            edge_count_by_curvature_bin: r.curvature_histogram.counts.clone(),
            degree_histogram: r.degree_histogram.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeltaFile {
    pub total_effective_resistance: Option<f64>,
    pub orc_degree_pearson: Option<f64>,
    pub min_edge_curvature: Option<f64>,
    pub p01_edge_curvature: Option<f64>,
    pub component_count: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonFile {
    pub before: DiagnosticsFile,
    pub after: DiagnosticsFile,
    pub delta: DeltaFile,
}

impl ComparisonFile {
    pub fn from_comparison(c: &Comparison) -> Self {
        ComparisonFile {
            before: DiagnosticsFile::from_report(&c.before),
            after: DiagnosticsFile::from_report(&c.after),
            delta: DeltaFile {
                total_effective_resistance: finite_or_none(c.delta.total_effective_resistance),
                orc_degree_pearson: finite_or_none(c.delta.orc_degree_pearson),
                min_edge_curvature: finite_or_none(c.delta.min_edge_curvature),
                p01_edge_curvature: finite_or_none(c.delta.p01_edge_curvature),
                component_count: c.delta.component_count,
            },
        }
    }
}

/// `bin_left,bin_right,count` rows, one per bin.
pub fn histogram_csv(h: &Histogram) -> String {
    let mut out = String::from("bin_left,bin_right,count\n");
    for (k, &count) in h.counts.iter().enumerate() {
        out.push_str(&format!("{},{},{}\n", h.bin_edges[k], h.bin_edges[k + 1], count));
    }
    out
}

pub fn degree_histogram_csv(h: &BTreeMap<usize, usize>) -> String {
    let mut out = String::from("degree,count\n");
    for (degree, count) in h {
        out.push_str(&format!("{degree},{count}\n"));
    }
    out
}
