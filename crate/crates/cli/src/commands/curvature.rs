use std::path::{Path, PathBuf};

use riccimesh_core::curvature::full_report;

use crate::format::{read_trajectory, to_canonical_json, CurvatureFrameSummary, CurvatureSummaryFile};
use crate::{CliError, CurvatureArgs};

/// Strips a trailing `.json` so `--out report.json` and `--out report`
/// produce the same file set.
fn base_path(out: &Path) -> PathBuf {
    match out.extension() {
        Some(ext) if ext == "json" => out.with_extension(""),
        _ => out.to_path_buf(),
    }
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn run(args: CurvatureArgs) -> Result<(), CliError> {
    let trajectory = read_trajectory(&args.input)?;
    let base = base_path(&args.out);
    let multi = trajectory.frames().len() > 1;
    let mut summaries = Vec::new();

    for (k, g) in trajectory.frames().iter().enumerate() {
        let report = full_report(g, args.weighted)
            .map_err(|e| CliError {
                message: format!("frame {k}: {e}"),
                code: CliError::from(e).code,
            })?;

        let mut edges_csv = String::from("i,j,kappa\n");
        for (idx, &(i, j)) in report.edges().iter().enumerate() {
            edges_csv.push_str(&format!("{i},{j},{}\n", report.kappa()[idx]));
        }
        let mut nodes_csv = String::from("i,gamma\n");
        for i in 0..g.node_count() {
            if let Some(gamma) = report.gamma_of(i) {
                nodes_csv.push_str(&format!("{i},{gamma}\n"));
            }
        }
        let (edges_path, nodes_path) = if multi {
            (
                base.with_extension(format!("frame{k:03}.edges.csv")),
                base.with_extension(format!("frame{k:03}.nodes.csv")),
            )
        } else {
            (
                base.with_extension("edges.csv"),
                base.with_extension("nodes.csv"),
            )
        };
        write(&edges_path, &edges_csv)?;
        write(&nodes_path, &nodes_csv)?;

        summaries.push(CurvatureFrameSummary {
            frame: k,
            edges: report.edges().len(),
            min: report.min_kappa(),
            p01: report.kappa_percentile(0.01),
            mean: report.mean_kappa(),
        });
    }

    let summary = CurvatureSummaryFile {
        weighted: args.weighted,
        frames: summaries,
    };
    write(&base.with_extension("json"), &to_canonical_json(&summary)?)?;
    println!(
        "wrote curvature reports for {} frame(s) under {}",
        trajectory.frames().len(),
        base.display()
    );
    Ok(())
}
