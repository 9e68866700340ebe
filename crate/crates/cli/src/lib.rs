//! Command-line surface: mesh generation, curvature reports, rewiring,
//! diagnostics, and the timing benchmark harness.
//!
//! Exit codes are stable API: 0 ok, 2 usage, 3 curvature failure,
//! 4 missing field, 5 disconnected graph; 1 for I/O and malformed files.

pub mod commands;
pub mod format;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use riccimesh_core::rewiring::{
    Action, Direction, FormerSelector, LatterSelector, TrajectoryMode,
};
use riccimesh_core::Error as CoreError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CURVATURE: i32 = 3;
pub const EXIT_MISSING_FIELD: i32 = 4;
pub const EXIT_DISCONNECTED: i32 = 5;

/// Error carrying its process exit code.
#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub message: String,
    pub code: i32,
}

impl CliError {
    pub fn usage(message: String) -> Self {
        CliError {
            message,
            code: EXIT_USAGE,
        }
    }

    pub fn format(message: String) -> Self {
        CliError { message, code: 1 }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError {
            message: format!("{}: {err}", path.display()),
            code: 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match &e {
            CoreError::MissingField(_) => EXIT_MISSING_FIELD,
            CoreError::Disconnected { .. } | CoreError::InfiniteResistance(_, _) => {
                EXIT_DISCONNECTED
            }
            CoreError::InfiniteTransportCost | CoreError::EdgeCurvature { .. } => EXIT_CURVATURE,
            _ => EXIT_USAGE,
        };
        CliError {
            message: e.to_string(),
            code,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "riccimesh",
    version,
    about = "Mesh-graph curvature, rewiring, and over-squashing diagnostics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a synthetic channel-flow mesh trajectory (.mgj)
    Gen(GenArgs),
    /// Per-edge and per-node curvature reports (CSV + JSON summary)
    Curvature(CurvatureArgs),
    /// Rewire a trajectory and write the result plus a replayable edit log
    Rewire(RewireArgs),
    /// Structural diagnostics, optionally comparing before/after graphs
    Diagnose(DiagnoseArgs),
    /// Wall-time comparison of rewiring methods at fixed edge budgets
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Grid cells along x (>= 2)
    #[arg(long, default_value_t = 40)]
    pub nx: usize,
    /// Grid cells along y (>= 2)
    #[arg(long, default_value_t = 16)]
    pub ny: usize,
    /// Domain rectangle as x_min,x_max,y_min,y_max
    #[arg(long, default_value = "0,1,0,1")]
    pub domain: String,
    /// Disk obstacle as cx,cy,radius
    #[arg(long)]
    pub obstacle: Option<String>,
    /// Subdivide triangles within this distance of the obstacle
    #[arg(long)]
    pub refine: Option<f64>,
    /// Free-stream speed U
    #[arg(long, default_value_t = 1.0)]
    pub inflow: f64,
    #[arg(long, default_value_t = 1)]
    pub frames: usize,
    /// Time step (recorded for multi-frame generation)
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    /// Output .mgj path
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct CurvatureArgs {
    /// Input .mgj trajectory
    pub input: PathBuf,
    /// Use velocity-weighted edge lengths in the ground metric
    #[arg(long)]
    pub weighted: bool,
    /// Output base path; writes BASE.json, BASE.edges.csv, BASE.nodes.csv
    /// (frame-numbered CSVs for multi-frame inputs)
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum MethodArg {
    Piorf,
    Digl,
    Sdrf,
    Fosr,
    Borf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum FormerArg {
    Orc,
    Degree,
    Random,
}

impl From<FormerArg> for FormerSelector {
    fn from(v: FormerArg) -> Self {
        match v {
            FormerArg::Orc => FormerSelector::Orc,
            FormerArg::Degree => FormerSelector::Degree,
            FormerArg::Random => FormerSelector::Random,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum LatterArg {
    Velocity,
    Pressure,
    Random,
}

impl From<LatterArg> for LatterSelector {
    fn from(v: LatterArg) -> Self {
        match v {
            LatterArg::Velocity => LatterSelector::Velocity,
            LatterArg::Pressure => LatterSelector::Pressure,
            LatterArg::Random => LatterSelector::Random,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum ActionArg {
    Add,
    Remove,
    Both,
}

impl From<ActionArg> for Action {
    fn from(v: ActionArg) -> Self {
        match v {
            ActionArg::Add => Action::Add,
            ActionArg::Remove => Action::Remove,
            ActionArg::Both => Action::Both,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum DirectionArg {
    Bidirectional,
    ToSenders,
    ToReceivers,
}

impl From<DirectionArg> for Direction {
    fn from(v: DirectionArg) -> Self {
        match v {
            DirectionArg::Bidirectional => Direction::Bidirectional,
            DirectionArg::ToSenders => Direction::ToSenders,
            DirectionArg::ToReceivers => Direction::ToReceivers,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum ModeArg {
    PerFrame,
    FirstFrame,
}

impl From<ModeArg> for TrajectoryMode {
    fn from(v: ModeArg) -> Self {
        match v {
            ModeArg::PerFrame => TrajectoryMode::PerFrame,
            ModeArg::FirstFrame => TrajectoryMode::FirstFrame,
        }
    }
}

#[derive(Args, Debug)]
pub struct RewireArgs {
    /// Input .mgj trajectory
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Piorf)]
    pub method: MethodArg,
    /// Pooling ratio delta in (0, 1): fraction of nodes used as sources
    #[arg(long, default_value_t = 0.03)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = FormerArg::Orc)]
    pub former: FormerArg,
    #[arg(long, value_enum, default_value_t = LatterArg::Velocity)]
    pub latter: LatterArg,
    #[arg(long, value_enum, default_value_t = ActionArg::Add)]
    pub action: ActionArg,
    #[arg(long, value_enum, default_value_t = DirectionArg::Bidirectional)]
    pub direction: DirectionArg,
    /// Weight the curvature ground metric by velocity differences
    #[arg(long)]
    pub weighted: bool,
    /// Seed for the random selectors
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Teleport probability (digl)
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    /// Sparsification threshold (digl)
    #[arg(long, default_value_t = 0.4)]
    pub eps: f64,
    /// Iteration cap (sdrf)
    #[arg(long, default_value_t = 10)]
    pub sdrf_iterations: usize,
    /// Warm-up power-iteration rounds (fosr)
    #[arg(long, default_value_t = 5)]
    pub initial_power: usize,
    /// Iteration cap (fosr)
    #[arg(long, default_value_t = 20)]
    pub fosr_iterations: usize,
    /// Batch count (borf)
    #[arg(long, default_value_t = 10)]
    pub batches: usize,
    /// Edges added per batch (borf)
    #[arg(long, default_value_t = 4)]
    pub add_per_batch: usize,
    /// Edges removed per batch (borf)
    #[arg(long, default_value_t = 2)]
    pub remove_per_batch: usize,
    /// Wall-time budget in seconds; on expiry the result is partial and
    /// flagged timed_out (borf)
    #[arg(long)]
    pub budget_seconds: Option<f64>,
    #[arg(long, value_enum, default_value_t = ModeArg::PerFrame)]
    pub mode: ModeArg,
    /// Output .mgj path
    #[arg(short, long)]
    pub output: PathBuf,
    /// Edit-log JSON path
    #[arg(long)]
    pub log: PathBuf,
}

#[derive(Args, Debug)]
pub struct DiagnoseArgs {
    /// Graph to diagnose (.mgj; frame 0 is used)
    pub before: PathBuf,
    /// Optional second graph for before/after deltas
    pub after: Option<PathBuf>,
    /// Output JSON path; histogram CSVs are written next to it
    #[arg(long)]
    pub out: PathBuf,
    /// Warn instead of failing on disconnected graphs (resistance becomes null)
    #[arg(long)]
    pub skip_resistance: bool,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Input .mgj trajectory (frame 0 is benchmarked)
    pub input: PathBuf,
    /// Comma-separated method list (piorf,sdrf,fosr,borf)
    #[arg(long, default_value = "piorf,sdrf,fosr,borf")]
    pub methods: String,
    /// Comma-separated edge budgets; empty for a header-only CSV
    #[arg(long, default_value = "16,64,256")]
    pub edge_counts: String,
    /// Repetitions per cell; the median is reported
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen(args) => commands::gen::run(args),
        Command::Curvature(args) => commands::curvature::run(args),
        Command::Rewire(args) => commands::rewire::run(args),
        Command::Diagnose(args) => commands::diagnose::run(args),
        Command::Bench(args) => commands::bench::run(args),
    }
}
