//! Curvature-guided local rewiring: repeatedly patch the most negative
//! edge with the supporting edge that lifts its curvature the most.
//!
//! This variant deliberately deviates from the original stochastic
//! formulation: curvature is plain Ollivier-Ricci and the candidate choice
//! is a deterministic argmax, so runs replay exactly. Edge removal is not
//! used.

use std::collections::BTreeSet;
use std::time::Instant;

use crate::curvature::{edge_orc, full_report};
use crate::error::{Error, Result};
use crate::graph::{canonical_pair, MeshGraph};

use super::{Direction, RewireResult, RewireStats};

pub fn sdrf(g: &MeshGraph, max_iterations: usize) -> Result<RewireResult> {
    if max_iterations == 0 {
        return Err(Error::InvalidConfig(
            "sdrf needs max_iterations >= 1".into(),
        ));
    }
    let start = Instant::now();
    let mut current = g.clone();
    let mut added = Vec::new();
    let mut passes = 0usize;
    let mut curvature_seconds = 0.0;

    for _ in 0..max_iterations {
        if current.edge_count() == 0 {
            break;
        }
        let t0 = Instant::now();
        let report = full_report(&current, false)?;
        curvature_seconds += t0.elapsed().as_secs_f64();
        passes += 1;

        // most negative edge, ties lexicographic
        let (mut min_edge, mut min_kappa) = (report.edges()[0], report.kappa()[0]);
        for (k, &e) in report.edges().iter().enumerate() {
            if report.kappa()[k] < min_kappa {
                min_kappa = report.kappa()[k];
                min_edge = e;
            }
        }
        let (i, j) = min_edge;

        // candidate supports around the edge, deduplicated and ordered
        let mut candidates: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut ni: Vec<usize> = current.neighbors(i).to_vec();
        ni.push(i);
        let mut nj: Vec<usize> = current.neighbors(j).to_vec();
        nj.push(j);
        for &p in &ni {
            for &q in &nj {
                if p != q && !current.has_edge(p, q) {
                    candidates.insert(canonical_pair(p, q));
                }
            }
        }

        let mut best: Option<((usize, usize), f64)> = None;
        for &(p, q) in &candidates {
            let trial = current.add_edges(&[(p, q)])?;
            let new_kappa = edge_orc(&trial, (i, j), false)?;
            if best.as_ref().map_or(true, |&(_, bk)| new_kappa > bk) {
                best = Some(((p, q), new_kappa));
            }
        }

        match best {
            Some(((p, q), new_kappa)) if new_kappa > min_kappa => {
                current = current.add_edges(&[(p, q)])?;
                added.push((p, q, Direction::Bidirectional));
            }
            // no candidate improves the minimal edge: stop early
            _ => break,
        }
    }

    let stats = RewireStats {
        added: added.len(),
        removed: 0,
        curvature_passes: passes,
        wall_seconds: start.elapsed().as_secs_f64(),
        curvature_seconds,
        timed_out: false,
    };
    Ok(RewireResult {
        graph: current,
        added,
        removed: Vec::new(),
        stats,
    })
}
