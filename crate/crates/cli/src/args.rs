use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    Jost,
    Wronskian,
    Scatter,
    Spectrum,
    Bound,
    Report,
    Gen,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Jost => "jost",
            Command::Wronskian => "wronskian",
            Command::Scatter => "scatter",
            Command::Spectrum => "spectrum",
            Command::Bound => "bound",
            Command::Report => "report",
            Command::Gen => "gen",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// `circle` or a positive radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Radius {
    Circle,
    Value(f64),
}

impl FromStr for Radius {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("circle") {
            return Ok(Radius::Circle);
        }
        let r: f64 = s.parse().map_err(|_| format!("expected a number or `circle`, got `{s}`"))?;
        if r.is_finite() && r > 0.0 {
            Ok(Radius::Value(r))
        } else {
            Err(format!("radius must be positive, got {r}"))
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "jacobi-scatter", version, about = "Scattering data and discrete spectrum of block Jacobi operators")]
pub struct Args {
    /// Instance file (JSON).
    #[arg(long)]
    pub instance: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub command: Command,

    /// Number of spectral-parameter grid points.
    #[arg(long, default_value_t = 64)]
    pub grid: usize,

    /// Grid radius, or `circle` for |z| = 1 without the ±1 bands. For `bound`, the radius R.
    #[arg(long, default_value = "circle")]
    pub radius: Radius,

    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,

    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Relative invertibility threshold for A_n.
    #[arg(long, default_value_t = jacobi_scatter::tol::INV_REL)]
    pub inv_tol: f64,

    /// Scan acceptance factor relative to the median smallest singular value.
    #[arg(long, default_value_t = jacobi_scatter::tol::REFINE_REL)]
    pub refine_tol: f64,

    /// Points per real interval in the spectrum scans.
    #[arg(long, default_value_t = jacobi_scatter::tol::SCAN_GRID)]
    pub scan_grid: usize,

    /// Half width M of the truncation oracle.
    #[arg(long, default_value_t = 80)]
    pub truncation: usize,

    /// Inner radius r of the count bound; R/2 when absent.
    #[arg(long)]
    pub inner_radius: Option<f64>,

    /// Exponential moment rate ε; grid radii must stay below e^{ε/2}.
    #[arg(long)]
    pub eps: Option<f64>,

    /// gen: block dimension.
    #[arg(long, default_value_t = 1)]
    pub dim: usize,

    /// gen: largest support width.
    #[arg(long, default_value_t = 5)]
    pub support_width: usize,

    /// gen: spectral-norm bound for B_n and A_n − I.
    #[arg(long, default_value_t = 1.0)]
    pub norm_bound: f64,
}
