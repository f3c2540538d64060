use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qbroadcast_cli::commands::{self, load};
use qbroadcast_cli::generate::generate;
use qbroadcast_cli::{demo, CliError, DemoSizes, MeasureQuantity, Report, Settings};

#[derive(Parser, Debug)]
#[command(
    name = "qbroadcast",
    version,
    about = "Broadcasting, discord and recoverability of small quantum states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// SDP tolerance on residuals and relative gap.
    #[arg(long, global = true, default_value_t = 1e-7)]
    tolerance: f64,
    #[arg(long, global = true, default_value_t = 500)]
    sdp_max_iters: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Discord optimizer restarts.
    #[arg(long, global = true, default_value_t = 32)]
    restarts: usize,
    #[arg(long, global = true, value_enum, default_value_t = Output::Table)]
    output: Output,
    /// Include wall time in the report (breaks byte-for-byte reproducibility).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Table,
    Json,
}

#[derive(Args, Debug, Clone)]
struct StateSource {
    /// JSON state file.
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// Built-in generator: bell, ghz, cc[:seed], cq[:seed], werner:<p>, random:<seed>, markov:<seed>, product-ac:<seed>.
    #[arg(long = "gen")]
    generator: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Quantity {
    Entropy,
    MutualInfo,
    Cmi,
    Fidelity,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Entropy, mutual information, conditional mutual information or fidelity.
    Measure {
        #[arg(value_enum)]
        quantity: Quantity,
        #[command(flatten)]
        source: StateSource,
        /// Second state for fidelity.
        #[arg(long)]
        input2: Option<PathBuf>,
        /// Generator for the second state.
        #[arg(long = "gen2")]
        generator2: Option<String>,
        /// Subsystem groups, e.g. `0|1` for mutual-info or `0|2|1` (A|C|B) for cmi.
        #[arg(long)]
        parts: Option<String>,
    },
    /// Classify, then compute F^max, F^EB, discord and the bound chain.
    Broadcast {
        #[command(flatten)]
        source: StateSource,
    },
    /// Petz and optimal recovery of a tripartite state against 2^(-I(A:C|B)/2).
    Recover {
        #[command(flatten)]
        source: StateSource,
    },
    /// Run a demonstration suite over the built-in corpus.
    Demo {
        /// no-broadcast, no-local-broadcast, no-unilocal-broadcast, recoverability, discord-bounds or all.
        #[arg(default_value = "all")]
        suite: String,
    },
    /// Print a generated state as a JSON state file.
    Gen {
        /// Generator spec (same as --gen).
        spec: Option<String>,
        #[arg(long = "gen")]
        generator: Option<String>,
    },
}

fn run(cli: &Cli) -> Result<Option<Report>, CliError> {
    let settings = Settings {
        tolerance: cli.tolerance,
        sdp_max_iters: cli.sdp_max_iters,
        seed: cli.seed,
        restarts: cli.restarts,
    };
    if !(settings.tolerance > 0.0 && settings.tolerance < 1.0) {
        return Err(CliError::Invalid(format!(
            "--tolerance must lie in (0, 1), got {}",
            settings.tolerance
        )));
    }
    if settings.restarts == 0 {
        return Err(CliError::Invalid("--restarts must be at least 1".into()));
    }
    let report = match &cli.command {
        Command::Measure {
            quantity,
            source,
            input2,
            generator2,
            parts,
        } => {
            let first = load(source.input.as_deref(), source.generator.as_deref(), settings.seed)?;
            let second = if input2.is_some() || generator2.is_some() {
                Some(load(input2.as_deref(), generator2.as_deref(), settings.seed)?)
            } else {
                None
            };
            let q = match quantity {
                Quantity::Entropy => MeasureQuantity::Entropy,
                Quantity::MutualInfo => MeasureQuantity::MutualInfo,
                Quantity::Cmi => MeasureQuantity::Cmi,
                Quantity::Fidelity => MeasureQuantity::Fidelity,
            };
            commands::measure(q, &first, second.as_ref(), parts.as_deref(), &settings)?
        }
        Command::Broadcast { source } => commands::broadcast(
            &load(source.input.as_deref(), source.generator.as_deref(), settings.seed)?,
            &settings,
        )?,
        Command::Recover { source } => commands::recover(
            &load(source.input.as_deref(), source.generator.as_deref(), settings.seed)?,
            &settings,
        )?,
        Command::Demo { suite } => demo(suite, &settings, &DemoSizes::default())?,
        Command::Gen { spec, generator } => {
            let spec = match (spec, generator) {
                (Some(s), None) | (None, Some(s)) => s,
                _ => return Err(CliError::Invalid("gen needs exactly one generator spec".into())),
            };
            let file = generate(spec, settings.seed).map_err(CliError::Invalid)?;
            println!("{}", file.to_json());
            return Ok(None);
        }
    };
    Ok(Some(report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(mut report)) => {
            if cli.timing {
                report.wall_time_s = Some(start.elapsed().as_secs_f64());
            }
            match cli.output {
                Output::Json => println!("{}", report.to_json()),
                Output::Table => print!("{}", report.to_table()),
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: {} check(s) failed", report.failures());
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
