//! `gck`: verification campaigns and pencil constructions for Γ-convex free sets.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "gck", version, about = "Γ-convex free sets: pencils, set equality checks and separation")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "GCK_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads; 1 keeps reports bit-stable.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Write the run report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a TV-screen pencil and emit it as JSON or LaTeX.
    ConstructPencil(ConstructArgs),
    /// Compare the TV-screen pencil with its defining polynomial on samples.
    VerifyTv(VerifyTvArgs),
    /// Separate a test point from a sampled free set by a monic Γ-pencil.
    Separate(SeparateArgs),
    /// Search for counterexamples to Γ-convexity of a matrix polynomial.
    CheckConvexity(ConvexityArgs),
    /// Limit of separating xy-pencils along a sequence approaching a boundary point.
    BmiBoundary(BmiArgs),
    /// Check the polynomial identity behind the TV-screen pencils exactly.
    VerifyIdentity(IdentityArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Emit {
    Json,
    Latex,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstructArgs {
    /// Exponent `d` of the screen `1 − x² − y^{2d}`.
    #[arg(long, required_unless_present = "degenerate")]
    pub d: Option<usize>,
    /// Use the hand-written pencil for d = 3 or 4 instead of the general recipe.
    #[arg(long)]
    pub explicit: bool,
    /// Scale an explicit pencil to monic form.
    #[arg(long, requires = "explicit")]
    pub monic: bool,
    /// The degenerate PSD pencil `[[1, y], [y, y²]]`.
    #[arg(long, conflicts_with_all = ["d", "explicit"])]
    pub degenerate: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub emit: Emit,
    /// Pencil output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyTvArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3])]
    pub levels: Vec<usize>,
    /// Decided samples per level.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = gck_core::tolerances::BOUNDARY_BAND)]
    pub band: f64,
    /// Same as the global --report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    Balanced,
    Tight,
}

#[derive(Debug, Args, Serialize)]
pub struct SeparateArgs {
    /// Built-in Γ-map: x, y2 or xy.
    #[arg(long, default_value = "y2")]
    pub gamma: String,
    /// JSON list of sample tuples; must contain the zero tuple.
    #[arg(long)]
    pub points: PathBuf,
    /// JSON tuple to separate.
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long, default_value_t = 1e-4)]
    pub delta: f64,
    #[arg(long, default_value_t = 100_000)]
    pub budget: usize,
    #[arg(long, value_enum, default_value = "balanced")]
    pub policy: Policy,
    /// Certificate output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// `x⁴` in one variable.
    X4,
    /// `1 − x² − y^{2d}`.
    Tv,
    /// `x² + y^{2d} − 1`.
    NegTv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Convex,
    Concave,
    Concomitant,
}

#[derive(Debug, Args, Serialize)]
pub struct ConvexityArgs {
    #[arg(long, default_value = "y2")]
    pub gamma: String,
    /// JSON polynomial (list of terms with 1-based words).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub poly: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Exponent for the TV presets.
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, value_enum, default_value = "convex")]
    pub property: Property,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3, 4])]
    pub levels: Vec<usize>,
    #[arg(long, default_value_t = 1.5)]
    pub scale: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    Tv,
}

#[derive(Debug, Args, Serialize)]
pub struct BmiArgs {
    #[arg(long, value_enum, default_value = "tv")]
    pub p: SetKind,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// JSON tuple on the boundary of the set.
    #[arg(long)]
    pub target: PathBuf,
    /// Sequence length `n = 1..steps` for `Y_n = (1 + 1/n) Y`.
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub delta: f64,
    #[arg(long, default_value_t = 100_000)]
    pub budget: usize,
    /// Interior samples added to the sample set at levels 1 and 2.
    #[arg(long, default_value_t = 40)]
    pub interior: usize,
    /// Limit pencil output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct IdentityArgs {
    /// Values of d: a list such as `2,3,5` or a range such as `2-12`.
    #[arg(long, value_parser = parse_d_list)]
    pub d: DList,
}

#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
pub struct DList(pub Vec<usize>);

fn parse_d_list(s: &str) -> Result<DList, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once('-') {
            let a: usize = a.trim().parse().map_err(|e| format!("{part}: {e}"))?;
            let b: usize = b.trim().parse().map_err(|e| format!("{part}: {e}"))?;
            if a > b {
                return Err(format!("empty range {part}"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|e| format!("{part}: {e}"))?);
        }
    }
    Ok(DList(out))
}

/// Bad flags, unreadable files, malformed JSON or failed writes; ends the
/// run with exit code 2 before a report is produced.
#[derive(Debug)]
pub struct CliError(pub String);

impl From<gck_core::Error> for CliError {
    fn from(e: gck_core::Error) -> Self {
        CliError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads == 0 {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(2);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: cannot start thread pool: {e}");
        return ExitCode::from(2);
    }
    let outcome = match &cli.command {
        Command::ConstructPencil(a) => commands::construct_pencil(&cli, a),
        Command::VerifyTv(a) => commands::verify_tv(&cli, a),
        Command::Separate(a) => commands::separate(&cli, a),
        Command::CheckConvexity(a) => commands::check_convexity(&cli, a),
        Command::BmiBoundary(a) => commands::bmi_boundary(&cli, a),
        Command::VerifyIdentity(a) => commands::verify_identity(&cli, a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
