use riccimesh_core::meshgen::{generate, MeshSpec, Obstacle};

use crate::format::write_trajectory;
use crate::{CliError, GenArgs};

fn parse_floats(flag: &str, text: &str, expected: usize) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != expected {
        return Err(CliError::usage(format!(
            "--{flag} expects {expected} comma-separated numbers, got `{text}`"
        )));
    }
    parts
        .iter()
        .map(|p| {
            p.trim().parse::<f64>().map_err(|_| {
                CliError::usage(format!("--{flag}: `{p}` is not a number"))
            })
        })
        .collect()
}

pub fn run(args: GenArgs) -> Result<(), CliError> {
    if args.nx < 2 {
        return Err(CliError::usage(format!("--nx must be >= 2, got {}", args.nx)));
    }
    if args.ny < 2 {
        return Err(CliError::usage(format!("--ny must be >= 2, got {}", args.ny)));
    }
    let d = parse_floats("domain", &args.domain, 4)?;
    let obstacle = match &args.obstacle {
        Some(text) => {
            let o = parse_floats("obstacle", text, 3)?;
            Some(Obstacle {
                center: [o[0], o[1]],
                radius: o[2],
            })
        }
        None => None,
    };
    let spec = MeshSpec {
        nx: args.nx,
        ny: args.ny,
        domain: (d[0], d[1], d[2], d[3]),
        obstacle,
        refine_radius: args.refine,
        inflow_speed: args.inflow,
        frames: args.frames,
        time_step: args.dt,
    };
    let trajectory = generate(&spec).map_err(CliError::from)?;
    write_trajectory(&args.output, &trajectory)?;
    let g = &trajectory.frames()[0];
    println!(
        "wrote {}: {} frames, {} nodes, {} edges",
        args.output.display(),
        trajectory.frames().len(),
        g.node_count(),
        g.edge_count()
    );
    Ok(())
}
