//! File-format contracts: exact round-trips, canonical bytes, and edit-log
//! replay.

use proptest::prelude::*;

use riccimesh_cli::format::{
    apply_edit_log, edit_log_from_results, read_trajectory, to_canonical_json,
    trajectory_from_file, trajectory_to_file, write_trajectory, TrajectoryFile,
};
use riccimesh_core::meshgen::{generate, MeshSpec, Obstacle};
use riccimesh_core::rewiring::{rewire_trajectory, RewireConfig, TrajectoryMode};
use riccimesh_core::{MeshGraph, NodeData, Trajectory};

fn sample_trajectory() -> Trajectory {
    let spec = MeshSpec {
        nx: 8,
        ny: 6,
        domain: (0.0, 1.0, 0.0, 0.75),
        obstacle: Some(Obstacle {
            center: [0.4, 0.4],
            radius: 0.12,
        }),
        refine_radius: Some(0.1),
        inflow_speed: 1.5,
        frames: 3,
        time_step: 0.02,
    };
    generate(&spec).unwrap()
}

#[test]
fn round_trip_is_exact_and_canonical() {
    let t = sample_trajectory();
    let file = trajectory_to_file(&t).unwrap();
    let json = to_canonical_json(&file).unwrap();
    let parsed: TrajectoryFile = serde_json::from_str(&json).unwrap();
    assert_eq!(parsed, file);
    let t2 = trajectory_from_file(&parsed).unwrap();
    assert_eq!(t2, t);
    // serializing again is byte-identical
    let json2 = to_canonical_json(&trajectory_to_file(&t2).unwrap()).unwrap();
    assert_eq!(json, json2);
}

#[test]
fn generator_output_omits_redundant_edges_key() {
    let t = sample_trajectory();
    let file = trajectory_to_file(&t).unwrap();
    for frame in &file.frames {
        assert!(frame.edges.is_none(), "mesh edges derive from cells");
    }
    let json = to_canonical_json(&file).unwrap();
    assert!(!json.contains("\"edges\""));
    // canonical key order
    let positions = json.find("\"positions\"").unwrap();
    let cells = json.find("\"cells\"").unwrap();
    let node_type = json.find("\"node_type\"").unwrap();
    let velocity = json.find("\"velocity\"").unwrap();
    assert!(positions < cells && cells < node_type && node_type < velocity);
}

#[test]
fn rewired_output_carries_explicit_edges() {
    let t = sample_trajectory();
    let results = rewire_trajectory(&t, &RewireConfig::piorf(0.05), TrajectoryMode::FirstFrame).unwrap();
    assert!(!results[0].added.is_empty());
    let frames: Vec<MeshGraph> = results.iter().map(|r| r.graph.clone()).collect();
    let rewired = Trajectory::new(frames, true).unwrap();
    let file = trajectory_to_file(&rewired).unwrap();
    for frame in &file.frames {
        assert!(frame.edges.is_some(), "augmented edges must be explicit");
    }
    // and the explicit form round-trips exactly
    let t2 = trajectory_from_file(&file).unwrap();
    assert_eq!(t2, rewired);
}

#[test]
fn edit_log_replay_reproduces_the_output() {
    let t = sample_trajectory();
    let cfg = RewireConfig::piorf(0.05);
    let mode = TrajectoryMode::PerFrame;
    let results = rewire_trajectory(&t, &cfg, mode).unwrap();
    let log = edit_log_from_results(&cfg, mode, &results, vec![]);
    let replayed = apply_edit_log(&t, &log).unwrap();
    for (frame, result) in replayed.frames().iter().zip(&results) {
        assert_eq!(frame.edges(), result.graph.edges());
    }
    // log itself round-trips through canonical JSON
    let json = to_canonical_json(&log).unwrap();
    let parsed: riccimesh_cli::format::EditLogFile = serde_json::from_str(&json).unwrap();
    assert_eq!(parsed, log);
}

#[test]
fn files_written_to_disk_read_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.mgj");
    let t = sample_trajectory();
    write_trajectory(&path, &t).unwrap();
    let t2 = read_trajectory(&path).unwrap();
    assert_eq!(t2, t);
}

#[test]
fn unknown_keys_are_rejected() {
    let text = r#"{"version":1,"static_mesh":true,"frames":[],"surprise":1}"#;
    assert!(serde_json::from_str::<TrajectoryFile>(text).is_err());
}

#[test]
fn version_and_frame_validation() {
    let err = trajectory_from_file(&TrajectoryFile {
        version: 7,
        static_mesh: true,
        frames: vec![],
    })
    .unwrap_err();
    assert!(err.message.contains("version"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Arbitrary small graphs round-trip exactly through the frame format,
    /// whether or not their edges can be derived from cells.
    #[test]
    fn arbitrary_graphs_round_trip(
        n in 3usize..12,
        raw_edges in proptest::collection::vec((0usize..12, 0usize..12), 1..30),
        vel in proptest::collection::vec(-1e3f64..1e3, 24),
        with_pressure in any::<bool>(),
    ) {
        let edges: Vec<(usize, usize)> = raw_edges
            .into_iter()
            .filter(|&(u, v)| u < n && v < n && u != v)
            .collect();
        let mut data = NodeData::zeros(n);
        for i in 0..n {
            data.velocity[i] = [vel[2 * i], vel[2 * i + 1]];
            data.positions[i] = [i as f64 * 0.25, (i * i) as f64 * 0.125];
        }
        if with_pressure {
            data.pressure = Some((0..n).map(|i| vel[i] * 0.5).collect());
        }
        let g = MeshGraph::from_edges(data, &edges).unwrap();
        let t = Trajectory::new(vec![g], false).unwrap();
        let file = trajectory_to_file(&t).unwrap();
        let json = to_canonical_json(&file).unwrap();
        let parsed: TrajectoryFile = serde_json::from_str(&json).unwrap();
        let t2 = trajectory_from_file(&parsed).unwrap();
        prop_assert_eq!(&t2, &t);
        let json2 = to_canonical_json(&trajectory_to_file(&t2).unwrap()).unwrap();
        prop_assert_eq!(json, json2);
    }
}
