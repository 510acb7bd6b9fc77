use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fgo_cli::commands;
use fgo_cli::config::RunConfig;
use fgo_cli::CliError;

#[derive(Parser)]
#[command(name = "fgo", about = "Frequency-guided diffusion experiment harness")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Run configuration file (flat key = value lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Embed a generation timestamp in SVG outputs (default: byte-stable).
    #[arg(long, global = true)]
    stamp: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic demonstration dataset.
    GenData,
    /// Train the denoiser on a dataset.
    Train {
        #[arg(long)]
        data: PathBuf,
    },
    /// Draw paired guided/unguided samples (oracle mode without --checkpoint).
    Sample {
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        count: Option<usize>,
    },
    /// Run paired closed-loop rollouts against a dataset's start/goal pairs.
    Rollout {
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        data: PathBuf,
    },
    /// Score paired trajectories with ATV/JerkRMS and plot the comparison.
    Eval {
        /// A samples.fgtc or rollouts.fgtc container.
        #[arg(long)]
        input: PathBuf,
    },
    /// Average per-step Haar energies over dumped sampling runs.
    AnalyzeFrequency {
        /// Directory holding states_fgo_*.fgtc / states_unguided_*.fgtc.
        #[arg(long)]
        traces: PathBuf,
    },
    /// Sweep one design axis over seeds 0, 1, 2.
    Ablate {
        #[arg(long)]
        data: PathBuf,
        /// omega_const, p_base, kfc or schedules.
        #[arg(long)]
        axis: String,
    },
}

fn load_config(global: &GlobalArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &global.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = global.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = load_config(&cli.global)?;
    let out = &cli.global.out;
    let stamp_string;
    let stamp: Option<&str> = if cli.global.stamp {
        stamp_string = format!(
            "unix:{}",
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        );
        Some(&stamp_string)
    } else {
        None
    };

    match &cli.command {
        Command::GenData => commands::cmd_gen_data(&cfg, out),
        Command::Train { data } => commands::cmd_train(&cfg, data, out),
        Command::Sample { checkpoint, count } => {
            commands::cmd_sample(&cfg, checkpoint.as_deref(), count.unwrap_or(cfg.count), out)
        }
        Command::Rollout { checkpoint, data } => {
            commands::cmd_rollout(&cfg, checkpoint.as_deref(), data, out)
        }
        Command::Eval { input } => commands::cmd_eval(&cfg, input, out, stamp),
        Command::AnalyzeFrequency { traces } => {
            commands::cmd_analyze_frequency(traces, out, stamp)
        }
        Command::Ablate { data, axis } => commands::cmd_ablate(&cfg, data, axis, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap handles --help/--version as "errors" with exit code 0.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
