use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use jetcalc_cli::{
    cmd_check_solution, cmd_compose, cmd_el, cmd_gateaux, cmd_laws, cmd_prolong, render_text,
    CommandOutput, DEFAULT_CHECK_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    output: OutputFormat,
    /// Seed for the randomized equivalence checks and panels.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Parameter values, repeatable: --param eta=1.
    #[arg(long = "param", value_name = "NAME=VALUE", global = true)]
    params: Vec<String>,
}

#[derive(Debug, Parser)]
#[command(
    name = "jetcalc",
    about = "Jet-bundle and variational calculus engine",
    version
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derive the Euler-Lagrange expressions of a Lagrangian density.
    El {
        /// Base dimension.
        #[arg(long)]
        n: usize,
        /// Fiber rank.
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Density in jet coordinates, e.g. "0.5*u1_x1^2".
        #[arg(long)]
        lagrangian: String,
        /// Positive volume weight in base variables.
        #[arg(long, default_value = "1")]
        weight: String,
    },
    /// Prolong a linear PDE to a given level.
    Prolong {
        /// Equation JSON file.
        #[arg(long)]
        eq: PathBuf,
        /// Prolongation level q.
        #[arg(long)]
        level: usize,
    },
    /// Compose two operator files (outer applied after inner).
    Compose {
        /// Outer operator JSON file.
        outer: PathBuf,
        /// Inner operator JSON file.
        inner: PathBuf,
    },
    /// Check a candidate section against a linear PDE on a grid.
    #[command(name = "check-solution")]
    CheckSolution {
        /// Equation JSON file.
        #[arg(long)]
        eq: PathBuf,
        /// Candidate section: comma-separated component expressions.
        #[arg(long)]
        section: String,
        /// Grid spec lo:hi:count[,lo:hi:count...].
        #[arg(long)]
        grid: String,
        /// Residual tolerance.
        #[arg(long, default_value_t = DEFAULT_CHECK_TOL)]
        tol: f64,
        /// Also check prolonged equations through this level.
        #[arg(long, default_value_t = 0)]
        prolong_level: usize,
    },
    /// Gâteaux derivative of a local action: symbolic vs finite-difference.
    Gateaux {
        /// Base dimension.
        #[arg(long)]
        n: usize,
        /// Fiber rank.
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Density in jet coordinates.
        #[arg(long)]
        lagrangian: String,
        /// Positive volume weight in base variables.
        #[arg(long, default_value = "1")]
        weight: String,
        /// Base section (comma-separated components).
        #[arg(long)]
        section: String,
        /// Direction section (comma-separated components).
        #[arg(long)]
        direction: String,
        /// Grid spec lo:hi:count[,lo:hi:count...].
        #[arg(long)]
        grid: String,
    },
    /// Run the law suites and report per-rule discrepancies.
    Laws {
        /// Suite: all, jet-comonad, kleisli, seely, codereliction, composite.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Panel size per suite.
        #[arg(long, default_value_t = 12)]
        cases: usize,
        /// Quadrature points per axis for functional panels.
        #[arg(long, default_value_t = 201)]
        grid_points: usize,
    },
}

fn read_file(path: &PathBuf) -> Result<String, CommandOutput> {
    std::fs::read_to_string(path).map_err(|e| {
        jetcalc_cli::error_output(
            "io",
            &jetcalc::Error::Invalid(format!("cannot read {}: {e}", path.display())),
        )
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = run(&cli);
    match cli.common.output {
        OutputFormat::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&out.report).expect("report serializes")
            );
        }
        OutputFormat::Text => {
            print!("{}", render_text(&out.report));
        }
    }
    ExitCode::from(out.exit_code as u8)
}

fn run(cli: &Cli) -> CommandOutput {
    match &cli.command {
        Command::El {
            n,
            m,
            lagrangian,
            weight,
        } => cmd_el(*n, *m, lagrangian, weight, &cli.common.params),
        Command::Prolong { eq, level } => match read_file(eq) {
            Ok(text) => cmd_prolong(&text, *level),
            Err(out) => out,
        },
        Command::Compose { outer, inner } => match (read_file(outer), read_file(inner)) {
            (Ok(a), Ok(b)) => cmd_compose(&a, &b),
            (Err(out), _) | (_, Err(out)) => out,
        },
        Command::CheckSolution {
            eq,
            section,
            grid,
            tol,
            prolong_level,
        } => match read_file(eq) {
            Ok(text) => cmd_check_solution(
                &text,
                section,
                grid,
                *tol,
                *prolong_level,
                &cli.common.params,
            ),
            Err(out) => out,
        },
        Command::Gateaux {
            n,
            m,
            lagrangian,
            weight,
            section,
            direction,
            grid,
        } => cmd_gateaux(
            *n,
            *m,
            lagrangian,
            weight,
            section,
            direction,
            grid,
            &cli.common.params,
        ),
        Command::Laws {
            suite,
            cases,
            grid_points,
        } => cmd_laws(suite, cli.common.seed, *cases, *grid_points),
    }
}
