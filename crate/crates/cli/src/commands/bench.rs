use std::time::Instant;

use riccimesh_core::rewiring::{rewire, Method, RewireConfig};
use riccimesh_core::MeshGraph;

use crate::format::read_trajectory;
use crate::{BenchArgs, CliError};

fn parse_list(flag: &str, text: &str) -> Result<Vec<String>, CliError> {
    let items: Vec<String> = text
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() && !text.trim().is_empty() {
        return Err(CliError::usage(format!("--{flag}: could not parse `{text}`")));
    }
    Ok(items)
}

/// Maps one method's native budget knob onto a requested edge count.
fn config_for(method: &str, count: usize, nodes: usize) -> Result<RewireConfig, CliError> {
    if count == 0 || count >= nodes {
        return Err(CliError::usage(format!(
            "edge count {count} is out of range for a {nodes}-node mesh"
        )));
    }
    let cfg = match method {
        "piorf" => {
            // floor(delta |V|) == count
            let delta = (count as f64 + 0.5) / nodes as f64;
            RewireConfig::piorf(delta)
        }
        "sdrf" => RewireConfig::with_method(Method::Sdrf {
            max_iterations: count,
        }),
        "fosr" => RewireConfig::with_method(Method::Fosr {
            initial_power: 5,
            max_iterations: count,
        }),
        "borf" => RewireConfig::with_method(Method::Borf {
            batches: count.div_ceil(4),
            add_per_batch: 4,
            remove_per_batch: 0,
        }),
        other => {
            return Err(CliError::usage(format!("unknown method `{other}`")));
        }
    };
    Ok(cfg)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn time_cell(g: &MeshGraph, cfg: &RewireConfig, reps: usize) -> Result<f64, CliError> {
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        let _ = rewire(g, cfg).map_err(CliError::from)?;
        times.push(start.elapsed().as_secs_f64());
    }
    Ok(median(times))
}

pub fn run(args: BenchArgs) -> Result<(), CliError> {
    let methods = parse_list("methods", &args.methods)?;
    let counts: Vec<usize> = parse_list("edge-counts", &args.edge_counts)?
        .iter()
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| CliError::usage(format!("--edge-counts: `{s}` is not a count")))
        })
        .collect::<Result<_, _>>()?;

    // validate method names before doing any work
    for m in &methods {
        if !["piorf", "digl", "sdrf", "fosr", "borf"].contains(&m.as_str()) {
            return Err(CliError::usage(format!("unknown method `{m}`")));
        }
    }

    let trajectory = read_trajectory(&args.input)?;
    let g = &trajectory.frames()[0];

    let mut csv = String::from("method,edges_added,seconds\n");
    for method in &methods {
        if method == "digl" {
            eprintln!(
                "note: digl excluded from the benchmark (its threshold does not budget edge counts)"
            );
            continue;
        }
        for &count in &counts {
            let cfg = config_for(method, count, g.node_count())?;
            let seconds = time_cell(g, &cfg, args.reps)?;
            csv.push_str(&format!("{method},{count},{seconds}\n"));
            println!("{method} at {count} edges: {seconds:.6}s median of {}", args.reps);
        }
    }
    std::fs::write(&args.out, csv).map_err(|e| CliError::io(&args.out, e))?;
    println!("wrote {}", args.out.display());
    Ok(())
}
