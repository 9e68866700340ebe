use riccimesh_core::rewiring::{rewire_trajectory, Method, RewireConfig, TrajectoryMode};

use crate::format::{
    edit_log_from_results, rebuild_trajectory, read_trajectory, to_canonical_json, write_trajectory,
};
use crate::{CliError, MethodArg, RewireArgs};

pub fn build_config(args: &RewireArgs) -> Result<RewireConfig, CliError> {
    let method = match args.method {
        MethodArg::Piorf => Method::Piorf {
            pooling_ratio: args.delta,
        },
        MethodArg::Digl => Method::Digl {
            alpha: args.alpha,
            eps: args.eps,
        },
        MethodArg::Sdrf => Method::Sdrf {
            max_iterations: args.sdrf_iterations,
        },
        MethodArg::Fosr => Method::Fosr {
            initial_power: args.initial_power,
            max_iterations: args.fosr_iterations,
        },
        MethodArg::Borf => Method::Borf {
            batches: args.batches,
            add_per_batch: args.add_per_batch,
            remove_per_batch: args.remove_per_batch,
        },
    };
    Ok(RewireConfig {
        method,
        former: args.former.into(),
        latter: args.latter.into(),
        action: args.action.into(),
        direction: args.direction.into(),
        weighted: args.weighted,
        seed: args.seed,
        budget_seconds: args.budget_seconds,
    })
}

/// Deviations from the published method formulations, echoed into the log.
fn method_notes(method: &Method) -> Vec<String> {
    match method {
        Method::Sdrf { .. } => vec![
            "sdrf variant: deterministic argmax over Ollivier-Ricci curvature instead of the original stochastic balanced-Forman selection; no removals".to_string(),
        ],
        Method::Digl { .. } => vec![
            "digl variant: original mesh edges are always preserved; diffusion only adds edges".to_string(),
        ],
        Method::Fosr { .. } => vec![
            "fosr gap proxy: adds the non-edge minimizing x_u x_v / sqrt((1+deg u)(1+deg v)) with deterministic power-iteration start".to_string(),
        ],
        _ => Vec::new(),
    }
}

pub fn run(args: RewireArgs) -> Result<(), CliError> {
    let trajectory = read_trajectory(&args.input)?;
    let cfg = build_config(&args)?;
    let mode: TrajectoryMode = args.mode.into();

    let results = rewire_trajectory(&trajectory, &cfg, mode).map_err(CliError::from)?;

    for (k, r) in results.iter().enumerate() {
        println!(
            "frame {k}: added {} removed {} wall {:.6}s curvature {:.6}s{}",
            r.added.len(),
            r.removed.len(),
            r.stats.wall_seconds,
            r.stats.curvature_seconds,
            if r.stats.timed_out { " timed-out" } else { "" }
        );
    }

    let frames = results.iter().map(|r| r.graph.clone()).collect();
    let out = rebuild_trajectory(frames, trajectory.static_mesh())?;
    write_trajectory(&args.output, &out)?;

    let log = edit_log_from_results(&cfg, mode, &results, method_notes(&cfg.method));
    std::fs::write(&args.log, to_canonical_json(&log)?).map_err(|e| CliError::io(&args.log, e))?;
    Ok(())
}
