mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use error::CliError;
use output::OutDir;

#[derive(Parser, Debug)]
#[command(
    name = "inls",
    version,
    about = "Ground states, thresholds and dynamics of coupled quadratic NLS systems"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, env = "INLS_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the structural hypotheses on the interaction.
    Check,
    /// Solve for and certify the ground state.
    GroundState,
    /// Classify `c·ψ` against the ground-state thresholds.
    Classify {
        #[arg(long)]
        c: Option<f64>,
    },
    /// Classify, then evolve `c·ψ` and write the trace.
    Evolve {
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_final: Option<f64>,
    },
    /// Classify and evolve every scaling in the configured list.
    Sweep {
        /// Comma-separated scalings; replaces the configured list.
        #[arg(long, value_delimiter = ',')]
        c: Option<Vec<f64>>,
    },
    /// Functionals of a snapshot, or of the ground state.
    Report {
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let mut cfg = match &cli.global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if cli.global.seed.is_some() {
        cfg.seed = cli.global.seed;
    }
    if let Some(out) = cli.global.out {
        cfg.out = Some(out);
    }
    if let Some(threads) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("threads: {e}")))?;
    }
    match &cli.command {
        Command::Classify { c } | Command::Evolve { c, .. } => {
            if let Some(c) = c {
                cfg.evolve.c = *c;
            }
        }
        Command::Sweep { c: Some(list) } => cfg.dichotomy.c_values = list.clone(),
        _ => {}
    }
    if let Command::Evolve { dt, t_final, .. } = &cli.command {
        cfg.evolve.dt = dt.unwrap_or(cfg.evolve.dt);
        cfg.evolve.t_final = t_final.unwrap_or(cfg.evolve.t_final);
    }
    let out = OutDir::create(&cfg.out.clone().unwrap_or_else(|| PathBuf::from("out")))?;
    out.log(&format!("start {:?}", cli.command));
    let result = match &cli.command {
        Command::Check => commands::check(&cfg, &out),
        Command::GroundState => commands::ground_state(&cfg, &out),
        Command::Classify { .. } => commands::classify_cmd(&cfg, &out),
        Command::Evolve { .. } => commands::evolve_cmd(&cfg, &out),
        Command::Sweep { .. } => commands::sweep(&cfg, &out),
        Command::Report { input } => commands::report(&cfg, &out, input.as_deref()),
    };
    out.log(&format!("finish {:?}", result.as_ref().map_err(|e| e.to_string())));
    result
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
