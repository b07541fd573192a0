//! `carnot-kit`: command line front end for carnot-core.
//!
//! Exit codes: 0 success, 2 input error, 3 numerical diagnostic or failed
//! check, 64 usage error, 74 I/O error.

mod commands;
mod fail;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use fail::{Fail, EXIT_INPUT, EXIT_NUMERICAL, EXIT_USAGE};
use output::Sink;

#[derive(Parser, Debug)]
#[command(name = "carnot-kit", version, about = "Numerical experiments on Carnot groups and the Heisenberg group")]
pub struct Cli {
    /// Algebra TOML file, or a builtin name (h1, h2, h3, sussmann, engel, free-step2-3gen, abelian).
    #[arg(long, global = true)]
    pub algebra: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance for the subcommand's main check.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Directory for CSV outputs and manifest.json.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

/// Builtin Hamiltonians on `R^{2n}`.
#[derive(Args, Debug, Clone)]
pub struct HamArgs {
    /// poly, smooth or quadratic.
    #[arg(long, default_value = "poly")]
    pub ham: String,
    /// Bump centre; its length fixes the dimension.
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub center: String,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub amplitude: f64,
    /// Radius of the support ball.
    #[arg(long, default_value_t = 1.0)]
    pub support_radius: f64,
    /// Exponent of the polynomial bump profile.
    #[arg(long, default_value_t = 3)]
    pub power: i32,
    /// Radius where the truncated quadratic starts to be cut off.
    #[arg(long, default_value_t = 0.5)]
    pub inner: f64,
    /// Multiplies H by (1 + depth sin 2πt).
    #[arg(long)]
    pub modulation: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Group product x · y.
    Mul {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Homogeneous norms |x|_1 and |x|_∞.
    Norm {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Upper bound on the Carnot-Carathéodory distance.
    Ccdist {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, default_value_t = 8)]
        starts: usize,
        #[arg(long, default_value_t = 8)]
        segments: usize,
    },
    /// Packing estimate of the Hausdorff dimension of a homogeneous box.
    Hausdim {
        #[arg(long, default_value_t = 6)]
        scales: usize,
        #[arg(long, default_value_t = 1.0)]
        smax: f64,
        #[arg(long, default_value_t = 0.1)]
        smin: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
    /// Product of horizontal exponentials equal to x.
    Factorize {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 0.5)]
        chart_radius: f64,
    },
    /// Bracket table of the graded nilpotentisation.
    Nilpotentize,
    /// Antisymmetry and Jacobi residuals of the algebra.
    Validate,
    /// Pansu derivative estimate of a builtin map at x.
    Pansu {
        /// left:a, right:a, dilation:λ or linear:<row-major entries>.
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 6)]
        levels: usize,
    },
    /// Development of a group curve into the algebra.
    Develop {
        #[arg(long)]
        curve: PathBuf,
    },
    /// Lift of an algebra curve to the group.
    Lift {
        #[arg(long)]
        curve: PathBuf,
    },
    /// i-area partial sums of an algebra curve.
    Iarea {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, default_value_t = 1)]
        index: usize,
    },
    /// Horizontal lift of a planar curve to H(n).
    Hlift {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        xbar0: f64,
    },
    /// Lift of a symplectomorphism to H(n), evaluated on sample points.
    Symplift {
        /// rotate:θ, squeeze:a, shear:s, matrix:<row-major entries> or flow.
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        /// Point CSV; defaults to a grid on [-1, 1]^2.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[command(flatten)]
        ham: HamArgs,
    },
    /// Trajectory of the Hamiltonian flow from x0.
    Hamflow {
        #[command(flatten)]
        ham: HamArgs,
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
    /// Hofer lower bound C V(φ, A) ≤ vol(A) ∫ ‖H_t‖_∞ for the time-1 map.
    HoferCheck {
        #[command(flatten)]
        ham: HamArgs,
        /// Multiplies H.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        scale: f64,
        #[arg(long, default_value_t = 1.5)]
        region_radius: f64,
        #[arg(long, default_value_t = 400)]
        steps: usize,
        #[arg(long, default_value_t = 40)]
        grid: usize,
    },
    /// Variation and dilatation length of a Euclidean curve.
    Var {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, default_value_t = 4)]
        window: usize,
    },
    /// Covering estimate of the k-dimensional Hausdorff measure of a point cloud.
    Hmeas {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        k: f64,
        #[arg(long, default_value = "0.2,0.1,0.05,0.025")]
        deltas: String,
    },
    /// Gromov-Hausdorff upper bound from a map between two distance matrices.
    Ghbound {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        codomain: PathBuf,
        /// Image index of each domain point; identity by default.
        #[arg(long)]
        map: Option<String>,
        /// Claimed ε; the run fails when the witness does not certify it.
        #[arg(long)]
        claim: Option<f64>,
    },
    /// ε-midpoint test for a distance matrix.
    Midpoint {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        eps: f64,
    },
    /// GH bounds between the rescaled group and its nilpotentisation.
    Cone {
        /// Points in adapted coordinates, one per row.
        #[arg(long)]
        points: PathBuf,
        #[arg(long, default_value = "1,2,4,8,16")]
        lambdas: String,
        #[arg(long, default_value_t = 6)]
        order: usize,
        #[arg(long, default_value_t = 2)]
        starts: usize,
        #[arg(long, default_value_t = 60)]
        iters: usize,
    },
    /// Invariant suite for the algebra, or aggregation of result rows.
    Report {
        /// CSV with columns id, name, pass, value, threshold, detail.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Mul { .. } => "mul",
            Command::Norm { .. } => "norm",
            Command::Ccdist { .. } => "ccdist",
            Command::Hausdim { .. } => "hausdim",
            Command::Factorize { .. } => "factorize",
            Command::Nilpotentize => "nilpotentize",
            Command::Validate => "validate",
            Command::Pansu { .. } => "pansu",
            Command::Develop { .. } => "develop",
            Command::Lift { .. } => "lift",
            Command::Iarea { .. } => "iarea",
            Command::Hlift { .. } => "hlift",
            Command::Symplift { .. } => "symplift",
            Command::Hamflow { .. } => "hamflow",
            Command::HoferCheck { .. } => "hofer-check",
            Command::Var { .. } => "var",
            Command::Hmeas { .. } => "hmeas",
            Command::Ghbound { .. } => "ghbound",
            Command::Midpoint { .. } => "midpoint",
            Command::Cone { .. } => "cone",
            Command::Report { .. } => "report",
        }
    }
}

fn configure_threads() -> Result<(), Fail> {
    let Ok(value) = std::env::var("CARNOT_KIT_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Fail::input(format!("CARNOT_KIT_THREADS must be a positive integer, got {value:?}")))?;
    // A second initialisation in the same process is harmless.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_USAGE,
                _ => EXIT_INPUT,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}

fn execute(cli: Cli, argv: Vec<String>) -> Result<(), Fail> {
    configure_threads()?;
    let sink = Sink::new(cli.out.clone(), cli.command.name(), argv.into_iter().skip(1).collect(), cli.seed)?;
    let mut ctx = commands::Ctx { algebra: cli.algebra, seed: cli.seed, tol: cli.tol, sink };
    let result = commands::run(&cli.command, &mut ctx);
    match &result {
        Ok(()) => ctx.sink.finish(),
        Err(f) if f.code == EXIT_NUMERICAL => {
            ctx.sink.finish()?;
            result
        }
        Err(_) => result,
    }
}
