use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "cavity", version, about = "Spherical-mean tomography and levitation over oscillatory zero sets")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "CAVITY_THREADS")]
    pub threads: Option<usize>,

    /// Text file of `key = value` lines supplying defaults for any long flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Oscillation verdict, cavity mask and oval point clouds.
    Analyze(AnalyzeArgs),
    /// Build or verify a separator and print the JSON report.
    Separator(SeparatorArgs),
    /// Simulate a sinogram of a phantom.
    Simulate(SimulateArgs),
    /// Filtered back projection.
    Reconstruct(ReconstructArgs),
    /// Time-reversal reconstruction, compared against back projection.
    Timereverse(TimeReverseArgs),
    /// Field of a surface density at probe points.
    Levitate(LevitateArgs),
    /// Field of a layer density at probe points.
    LayerLevitate(LayerArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Geometry {
    /// Polynomial file or preset name (circle, sphere, degree6,
    /// hypotrochoid, crystal, hyperbola).
    #[arg(long)]
    pub poly: String,

    /// Base point of the cavity, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub point: Option<Vec<f64>>,

    /// Number of line directions (default 180 in the plane, 362 in space).
    #[arg(long)]
    pub directions: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// Cells per axis.
    #[arg(long, default_value_t = 128)]
    pub grid: usize,

    /// Lower corner of the grid box (default: around the cavity).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lo: Option<Vec<f64>>,

    /// Upper corner of the grid box.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub hi: Option<Vec<f64>>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Pgm16,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub geometry: Geometry,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct SeparatorArgs {
    #[command(flatten)]
    pub geometry: Geometry,
    /// Candidate separator: file, preset name, constant, or `euler`.
    #[arg(long, default_value = "euler", allow_hyphen_values = true)]
    pub q: String,
    /// Where to write the JSON report (also printed).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SimulationArgs {
    /// Phantom, e.g. `gauss 0.2,0.1 0.12 1; ball 0,0 0.3 1 0.02`.
    #[arg(long)]
    pub phantom: Option<String>,
    /// Number of sigma intervals.
    #[arg(long, default_value_t = 512)]
    pub nsigma: usize,
    /// Largest squared radius (default: covers every cell of the cavity).
    #[arg(long)]
    pub sigma_max: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub geometry: Geometry,
    #[command(flatten)]
    pub sim: SimulationArgs,
    /// Sinogram CSV to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ReconstructArgs {
    #[command(flatten)]
    pub geometry: Geometry,
    #[command(flatten)]
    pub sim: SimulationArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Sinogram CSV; simulated from `--phantom` when absent.
    #[arg(long)]
    pub sinogram: Option<PathBuf>,
    /// Overrides the normalization constant.
    #[arg(long, allow_hyphen_values = true)]
    pub normalization: Option<f64>,
    /// Grid file to write.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct TimeReverseArgs {
    #[command(flatten)]
    pub geometry: Geometry,
    #[command(flatten)]
    pub sim: SimulationArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub sinogram: Option<PathBuf>,
    /// Recording horizon in `t^2` (plane only; default 1.2 times the sigma range).
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct ProbeArgs {
    /// Probe point, comma separated; repeat for several.
    #[arg(long = "probe", allow_hyphen_values = true)]
    pub probes: Vec<String>,
    /// Number of probes to pick in the inner part of the cavity when none
    /// are given.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// JSON report to write (also printed).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LevitateArgs {
    #[command(flatten)]
    pub geometry: Geometry,
    /// Density weight: file, preset name, constant, `euler`, or `uniform`
    /// (unit mass per unit area).
    #[arg(long, default_value = "euler", allow_hyphen_values = true)]
    pub q: String,
    #[command(flatten)]
    pub probes: ProbeArgs,
}

#[derive(Args, Debug)]
pub struct LayerArgs {
    #[command(flatten)]
    pub geometry: Geometry,
    #[arg(long, default_value = "euler", allow_hyphen_values = true)]
    pub q: String,
    /// Lower level of the layer.
    #[arg(long, allow_hyphen_values = true)]
    pub lo_level: f64,
    /// Upper level of the layer.
    #[arg(long, allow_hyphen_values = true)]
    pub hi_level: f64,
    /// Gauss-Legendre nodes across the layer.
    #[arg(long, default_value_t = 6)]
    pub nodes: usize,
    #[command(flatten)]
    pub probes: ProbeArgs,
}
