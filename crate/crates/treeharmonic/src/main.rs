use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use treeharmonic::cli::{
    cmd_green, cmd_kernel_check, cmd_potentials, cmd_profile, cmd_project, cmd_valette,
    run_selftest, OutputFormat, RunConfig,
};
use treeharmonic::Error;

/// Harmonic analysis on the (q+1)-regular tree: Green kernels, edge-space
/// projections, cocycle growth profiles, virtual potentials, and
/// negative-type kernel verification.
#[derive(Parser)]
#[command(name = "treeharmonic", version)]
struct Args {
    /// Branching parameter q (the tree is (q+1)-regular).
    #[arg(long, global = true, default_value_t = 2)]
    q: u32,

    /// Truncation tolerance (squared-norm scale).
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,

    /// Default ball radius for supports and tables.
    #[arg(long, global = true, default_value_t = 8)]
    radius: u32,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Green kernel: closed form against Neumann partial sums.
    Green {
        /// First vertex address, e.g. "/" or "/0/1".
        #[arg(long, default_value = "/")]
        x: String,
        /// Second vertex address.
        #[arg(long, default_value = "/")]
        y: String,
        /// Number of walk terms in the partial-sum table.
        #[arg(long, default_value_t = 60)]
        steps: u32,
    },
    /// Growth profile of the harmonic cocycle: measured, closed form,
    /// bound, slack, recurrence residual.
    Profile {
        #[arg(long = "n-max", default_value_t = 10)]
        n_max: u32,
    },
    /// Projection split of the unit flow between two vertices.
    Project {
        #[arg(long, default_value = "/")]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Virtual potentials and their divergences.
    Potentials,
    /// Conditionally-negative-type verdict for a kernel file.
    KernelCheck {
        /// Kernel file (CSV by default; see --json).
        file: PathBuf,
        /// Parse the file as JSON instead of CSV.
        #[arg(long)]
        json: bool,
    },
    /// Valette kernel from a ψ assignment: CND check plus invariance
    /// defects.
    Valette {
        /// Constant ψ value for all vertices.
        #[arg(long)]
        psi_const: Option<f64>,
        /// File of "vertex,value" lines.
        #[arg(long)]
        psi_file: Option<PathBuf>,
    },
    /// Run the verification suites and exit 0 only if all pass.
    Selftest,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = RunConfig {
        q: args.q,
        tol: args.tol,
        radius: args.radius,
        format: match args.format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        },
        seed: args.seed,
    };
    match run(&args.command, &config, args.out.as_deref()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(
    command: &Command,
    config: &RunConfig,
    out: Option<&std::path::Path>,
) -> Result<ExitCode, Error> {
    let (rendered, verdict) = match command {
        Command::Green { x, y, steps } => {
            (cmd_green(config, x, y, *steps)?.render(config.format), true)
        }
        Command::Profile { n_max } => (cmd_profile(config, *n_max)?.render(config.format), true),
        Command::Project { x, y } => (cmd_project(config, x, y)?.render(config.format), true),
        Command::Potentials => (cmd_potentials(config)?.render(config.format), true),
        Command::KernelCheck { file, json } => {
            let content = read_input(file)?;
            let (report, is_cnd) = cmd_kernel_check(config, &content, *json)?;
            (report.render(config.format), is_cnd)
        }
        Command::Valette {
            psi_const,
            psi_file,
        } => {
            let content = match psi_file {
                Some(path) => Some(read_input(path)?),
                None => None,
            };
            let (report, is_cnd) = cmd_valette(config, *psi_const, content.as_deref())?;
            (report.render(config.format), is_cnd)
        }
        Command::Selftest => {
            let report = run_selftest(config)?;
            (report.render(), report.all_passed())
        }
    };
    match out {
        Some(path) => fs::write(path, rendered)?,
        None => print!("{rendered}"),
    }
    Ok(if verdict {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

// Unreadable input files are usage errors, not internal ones.
fn read_input(path: &std::path::Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))
}
