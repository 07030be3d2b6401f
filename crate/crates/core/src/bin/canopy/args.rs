use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "canopy", version, about = "Body-to-UAV LoRa channel toolkit for forest links")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Directory that receives output files.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Stdout report format; `plot-data` also writes curve-point CSVs.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Radio configuration JSON; missing keys keep their defaults.
    #[arg(long, global = true)]
    pub radio_config: Option<PathBuf>,
    /// Registry model name, or a JSON file holding one model.
    #[arg(long, global = true)]
    pub model: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    PlotData,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Schema {
    Range,
    Geo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RangeKind {
    LinkBudget,
    MeanThreshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Seeding {
    PerHeight,
    Shared,
}

#[derive(Debug, Args)]
pub struct LogInput {
    /// Receiver logs or simulator traces.
    #[arg(required = true)]
    pub logs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Schema::Range)]
    pub schema: Schema,
    /// UAV anchor JSON for geo logs; defaults to the log path with a .json
    /// extension.
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the log-distance model to receiver logs.
    Fit(FitArgs),
    /// Compare registry models against receiver logs.
    Compare(CompareArgs),
    /// Fit envelope distributions and fade depth to small-scale data.
    Fading(FadingArgs),
    /// Simulate a mission and summarize range and PDR per height.
    Simulate(SimulateArgs),
    /// Polarization loss of two vectors, or effective terms of an angular table.
    Plf(PlfArgs),
    /// Model registry commands.
    Models {
        #[command(subcommand)]
        command: ModelsCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum ModelsCommand {
    /// Print every registry model.
    List,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: LogInput,
    /// Name of the fitted model.
    #[arg(long, default_value = "fitted")]
    pub name: String,
    /// Fit the instantaneous path loss without small-scale separation.
    #[arg(long)]
    pub no_separation: bool,
    /// Carrier wavelength of the separation window, meters.
    #[arg(long)]
    pub wavelength: Option<f64>,
    /// RSE bin width, meters.
    #[arg(long)]
    pub bin_width: Option<f64>,
    /// RSE bin heights, meters; the distinct heights in the data by default.
    #[arg(long, value_delimiter = ',')]
    pub rse_heights: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: LogInput,
    /// Registry model names; every registry model by default.
    #[arg(long, value_delimiter = ',')]
    pub models: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct FadingArgs {
    /// CSV with an `envelope` or `small_scale_db` column.
    pub input: PathBuf,
    /// Column to read instead of the automatic choice.
    #[arg(long)]
    pub column: Option<String>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Mission JSON; the bundled demo mission when absent.
    pub mission: Option<PathBuf>,
    /// Fading family JSON, either a fit report or `{"family", "params"}`.
    #[arg(long)]
    pub fading: Option<PathBuf>,
    /// Shorthand for Nakagami small-scale fading: `mu,omega`.
    #[arg(long, value_delimiter = ',')]
    pub nakagami: Option<Vec<f64>>,
    /// Override the model's shadow-fading spread, dB.
    #[arg(long)]
    pub sigma_sf: Option<f64>,
    #[arg(long, value_enum, default_value_t = Seeding::PerHeight)]
    pub sub_seeding: Seeding,
    #[arg(long, value_enum, default_value_t = RangeKind::MeanThreshold)]
    pub range: RangeKind,
    /// Worker threads; output does not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    /// PDR bin width for the distance profile, meters.
    #[arg(long, default_value_t = 10.0)]
    pub bin_width: f64,
}

#[derive(Debug, Args)]
pub struct PlfArgs {
    /// Transmit polarization: `x,y,z` (real) or `xr,xi,yr,yi,zr,zi`. The UAV
    /// dipole by default.
    #[arg(long, allow_hyphen_values = true)]
    pub tx: Option<String>,
    /// Receive polarization, same syntax as `--tx`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "angular")]
    pub rx: Option<String>,
    /// Angular sample CSV for effective gain and PLF extraction.
    #[arg(long)]
    pub angular: Option<PathBuf>,
    /// Fraction of arrangements the terms are guaranteed in.
    #[arg(long)]
    pub level: Option<f64>,
}
