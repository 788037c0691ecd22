//! `csscoh`: sweeps, exports and checks for small CSS codes.

mod commands;
mod output;
mod params;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

/// Failure classes, each mapped to its own exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] css_coherence::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("{0}")]
    Input(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_bound_exceeded() => 1,
            CliError::Core(_) | CliError::Io { .. } | CliError::Input(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "csscoh",
    version,
    about = "Coherent information, decoder bounds and spin models of CSS codes"
)]
struct Cli {
    /// Worker threads for enumeration and sampling (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print n, k, check ranks, symmetry counts, distances and logical supports.
    CodeInfo {
        #[command(flatten)]
        code: CodeArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Write a code in the css-code v1 text format.
    ExportCode {
        #[command(flatten)]
        code: CodeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coherent information, decoder success and relative entropy on a grid.
    IcSweep {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Logical shift used for the relative-entropy column (default: first logical).
        #[arg(long)]
        shift: Option<String>,
    },
    /// Decoder success probabilities and the bound chain on a grid.
    DecoderSweep {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Relative entropy between two logical basis states on a grid.
    RelentSweep {
        /// `[CODE] K0 K0P`, with logical labels as bit strings.
        #[arg(num_args = 2..=3, required = true)]
        args: Vec<String>,
        #[arg(long)]
        code: Option<String>,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum, default_value_t = SideArg::X)]
        side: SideArg,
        /// Also evaluate the exact domain-wall free energy (bit flips only).
        #[arg(long)]
        free_energy: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Export the random-bond spin model of one error sector as JSON.
    SmExport {
        #[command(flatten)]
        code: CodeArg,
        #[arg(long, value_enum, default_value_t = SideArg::X)]
        side: SideArg,
        /// Syndrome on the independent check rows, as a bit string (default: zero).
        #[arg(long)]
        syndrome: Option<String>,
        /// Logical label, as a bit string (default: zero).
        #[arg(long)]
        logical: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the bit-flip model at beta with its dual phase-flip model.
    KwCheck {
        /// `[CODE] BETA`.
        #[arg(num_args = 1..=2, required = true)]
        args: Vec<String>,
        #[arg(long)]
        code: Option<String>,
    },
    /// Sector identity, bound chain and channel consistency at one error rate.
    Verify {
        /// `[CODE] P`.
        #[arg(num_args = 1..=2, required = true)]
        args: Vec<String>,
        #[arg(long)]
        code: Option<String>,
    },
    /// Metropolis scan of the disordered spin model along the Nishimori line.
    Mc {
        #[command(flatten)]
        code: CodeArg,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum, default_value_t = SideArg::X)]
        side: SideArg,
        /// Disorder realizations per grid point.
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long, default_value_t = 4096)]
        sweeps: usize,
        #[arg(long, default_value_t = 1024)]
        burn_in: usize,
        #[arg(long, default_value_t = 2)]
        replicas: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = StartArg::Cold)]
        start: StartArg,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Write the sector distribution at one error rate as JSON.
    DistExport {
        #[command(flatten)]
        code: CodeArg,
        #[arg(long)]
        p: f64,
        /// Error type to enumerate; `joint` enumerates both with the `--noise` channel.
        #[arg(long, value_enum, default_value_t = DistSide::X)]
        side: DistSide,
        #[arg(long, default_value = "depolarizing")]
        noise: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize one or two exported sector distributions.
    DistInfo {
        /// A joint table, or a bit-flip and a phase-flip table of the same code.
        #[arg(num_args = 1..=2, required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args, Debug)]
struct CodeArg {
    /// `family:dims` (e.g. `toric2d:3`, `surface2d:3x4`, `steane`) or a code file.
    #[arg(long = "code", value_name = "CODE")]
    flag: Option<String>,
    #[arg(value_name = "CODE", conflicts_with = "flag")]
    positional: Option<String>,
}

impl CodeArg {
    fn selector(&self) -> CliResult<&str> {
        self.flag
            .as_deref()
            .or(self.positional.as_deref())
            .ok_or_else(|| CliError::Input("missing code selector".into()))
    }
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, default_value_t = 0.0)]
    p_start: f64,
    #[arg(long, default_value_t = 0.5)]
    p_stop: f64,
    #[arg(long, default_value_t = 21)]
    points: usize,
    /// Explicit comma-separated grid, overriding start/stop/points.
    #[arg(long, value_delimiter = ',')]
    p_list: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct OutArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    code: String,
    #[command(flatten)]
    grid: GridArgs,
    /// `independent`, `independent:ETA` (pz = ETA·p), `depolarizing`, or
    /// `pauli:WX,WY,WZ` (rates p·W/ΣW).
    #[arg(long, default_value = "independent")]
    noise: String,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SideArg {
    X,
    Z,
}

impl From<SideArg> for css_coherence::channels::Side {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::X => Self::X,
            SideArg::Z => Self::Z,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum DistSide {
    X,
    Z,
    Joint,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum StartArg {
    Cold,
    Hot,
}

/// Splits `[CODE] REST...` where the code may instead come from `--code`.
fn split_code(
    flag: Option<String>,
    mut args: Vec<String>,
    rest: usize,
) -> CliResult<(String, Vec<String>)> {
    match flag {
        Some(code) if args.len() == rest => Ok((code, args)),
        None if args.len() == rest + 1 => {
            let code = args.remove(0);
            Ok((code, args))
        }
        _ => Err(CliError::Input(format!(
            "expected a code selector and {rest} more argument(s)"
        ))),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if cli.threads > 0 {
        // only fails if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match cli.command {
        Command::CodeInfo { code, format } => {
            commands::code_info(code.selector()?, format == Format::Json)
        }
        Command::ExportCode { code, out } => {
            commands::export_code(code.selector()?, out.as_deref())
        }
        Command::IcSweep { sweep, shift } => commands::ic_sweep(&sweep, shift.as_deref()),
        Command::DecoderSweep { sweep } => commands::decoder_sweep(&sweep),
        Command::RelentSweep {
            args,
            code,
            grid,
            side,
            free_energy,
            out,
        } => {
            let (code, labels) = split_code(code, args, 2)?;
            commands::relent_sweep(
                &code,
                &labels[0],
                &labels[1],
                &grid,
                side.into(),
                free_energy,
                &out,
            )
        }
        Command::SmExport {
            code,
            side,
            syndrome,
            logical,
            out,
        } => commands::sm_export(
            code.selector()?,
            side.into(),
            syndrome.as_deref(),
            logical.as_deref(),
            out.as_deref(),
        ),
        Command::KwCheck { args, code } => {
            let (code, rest) = split_code(code, args, 1)?;
            commands::kw_check(&code, params::parse_f64("beta", &rest[0])?)
        }
        Command::Verify { args, code } => {
            let (code, rest) = split_code(code, args, 1)?;
            commands::verify(&code, params::parse_probability("p", &rest[0])?)
        }
        Command::Mc {
            code,
            grid,
            side,
            samples,
            sweeps,
            burn_in,
            replicas,
            seed,
            start,
            out,
        } => {
            let cfg = css_coherence::mc::McConfig {
                sweeps,
                burn_in,
                seed,
                replicas,
                threads: cli.threads,
                start: match start {
                    StartArg::Cold => css_coherence::mc::Start::Cold,
                    StartArg::Hot => css_coherence::mc::Start::Hot,
                },
            };
            commands::mc(code.selector()?, &grid, side.into(), samples, &cfg, &out)
        }
        Command::DistExport {
            code,
            p,
            side,
            noise,
            out,
        } => commands::dist_export(code.selector()?, p, side, &noise, out.as_deref()),
        Command::DistInfo { files, format } => commands::dist_info(&files, format == Format::Json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("csscoh: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
