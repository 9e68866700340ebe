use std::path::{Path, PathBuf};

use riccimesh_core::diagnostics::{compare, report};
use riccimesh_core::MeshGraph;

use crate::format::{
    degree_histogram_csv, histogram_csv, read_trajectory, to_canonical_json, ComparisonFile,
    DiagnosticsFile,
};
use crate::{CliError, DiagnoseArgs, EXIT_DISCONNECTED};

fn base_path(out: &Path) -> PathBuf {
    match out.extension() {
        Some(ext) if ext == "json" => out.with_extension(""),
        _ => out.to_path_buf(),
    }
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn load_first_frame(path: &Path) -> Result<MeshGraph, CliError> {
    let t = read_trajectory(path)?;
    Ok(t.frames()[0].clone())
}

fn check_connectivity(g: &MeshGraph, which: &str, skip: bool) -> Result<(), CliError> {
    if g.is_connected() {
        return Ok(());
    }
    if skip {
        eprintln!(
            "warning: {which} graph is disconnected; total effective resistance reported as null"
        );
        Ok(())
    } else {
        Err(CliError {
            message: format!(
                "{which} graph is disconnected; rerun with --skip-resistance to downgrade"
            ),
            code: EXIT_DISCONNECTED,
        })
    }
}

pub fn run(args: DiagnoseArgs) -> Result<(), CliError> {
    let before = load_first_frame(&args.before)?;
    check_connectivity(&before, "input", args.skip_resistance)?;
    let base = base_path(&args.out);

    match &args.after {
        None => {
            let r = report(&before).map_err(CliError::from)?;
            write(&args.out, &to_canonical_json(&DiagnosticsFile::from_report(&r))?)?;
            write(
                &base.with_extension("curvature_hist.csv"),
                &histogram_csv(&r.curvature_histogram),
            )?;
            write(
                &base.with_extension("degree_hist.csv"),
                &degree_histogram_csv(&r.degree_histogram),
            )?;
            println!("wrote diagnostics to {}", args.out.display());
        }
        Some(after_path) => {
            let after = load_first_frame(after_path)?;
            check_connectivity(&after, "after", args.skip_resistance)?;
            let c = compare(&before, &after).map_err(CliError::from)?;
            write(
                &args.out,
                &to_canonical_json(&ComparisonFile::from_comparison(&c))?,
            )?;
            write(
                &base.with_extension("curvature_hist.csv"),
                &histogram_csv(&c.before.curvature_histogram),
            )?;
            write(
                &base.with_extension("after.curvature_hist.csv"),
                &histogram_csv(&c.after.curvature_histogram),
            )?;
            write(
                &base.with_extension("degree_hist.csv"),
                &degree_histogram_csv(&c.before.degree_histogram),
            )?;
            write(
                &base.with_extension("after.degree_hist.csv"),
                &degree_histogram_csv(&c.after.degree_histogram),
            )?;
            println!("wrote paired diagnostics to {}", args.out.display());
        }
    }
    Ok(())
}
