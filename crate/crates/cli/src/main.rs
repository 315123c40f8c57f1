use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ost_cli::{cmd_comply, cmd_fuzz, cmd_run, cmd_synth, cmd_typecheck, CliConfig, OutputFormat, Report};
use ost_core::propgen::Suite;
use ost_core::semantics::SemanticsMode;

#[derive(Parser)]
#[command(name = "ost", version, about = "Orchestrated session types toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Plain,
    PriorityType,
    PriorityProcess,
}

impl From<Mode> for SemanticsMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Plain => SemanticsMode::Plain,
            Mode::PriorityType => SemanticsMode::PriorityType,
            Mode::PriorityProcess => SemanticsMode::PriorityProcess,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKind {
    /// First safe speculative option.
    Priority,
    /// Every safe speculative option.
    AllSafe,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Synth,
    SubjectReduction,
    ErrorFreeness,
    Congruence,
    Roundtrip,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Check or decide compliance of a client type with a server type.
    Comply {
        client: PathBuf,
        server: PathBuf,
        /// Orchestrator to check instead of searching for one.
        #[arg(long)]
        orch: Option<PathBuf>,
    },
    /// Synthesize an orchestrator.
    Synth {
        client: PathBuf,
        server: PathBuf,
        #[arg(long, value_enum, default_value = "priority")]
        mode: SynthKind,
    },
    /// Infer the typing of a process.
    Typecheck {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "plain")]
        mode: Mode,
        /// JSON file of function stubs.
        #[arg(long)]
        env: Option<PathBuf>,
    },
    /// Reduce a process and print its trace.
    Run {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "plain")]
        mode: Mode,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        cleanup: bool,
        /// Pick redexes at random with this seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Follow a script of rule names (and labels), one per line.
        #[arg(long)]
        replay: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        step_limit: usize,
        #[arg(long, value_enum, default_value = "text")]
        output: Format,
        /// Also write the JSON trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        env: Option<PathBuf>,
    },
    /// Run property suites on generated cases.
    Fuzz {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_depth: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let report: Report = match cli.command {
        Command::Comply { client, server, orch } => cmd_comply(&client, &server, orch.as_deref()),
        Command::Synth { client, server, mode } => cmd_synth(&client, &server, matches!(mode, SynthKind::AllSafe)),
        Command::Typecheck { file, mode, env } => {
            let cfg = CliConfig {
                mode: mode.into(),
                env_file: env,
                ..CliConfig::default()
            };
            cmd_typecheck(&file, &cfg)
        }
        Command::Run {
            file,
            mode,
            cleanup,
            seed,
            replay,
            step_limit,
            output,
            trace,
            env,
        } => {
            let cfg = CliConfig {
                mode: mode.into(),
                cleanup,
                seed,
                step_limit,
                output: match output {
                    Format::Text => OutputFormat::Text,
                    Format::Json => OutputFormat::Json,
                },
                env_file: env,
            };
            cmd_run(&file, &cfg, replay.as_deref(), trace.as_deref())
        }
        Command::Fuzz { suite, n, seed, max_depth } => {
            let suites: Vec<Suite> = match suite {
                SuiteArg::Synth => vec![Suite::Synth],
                SuiteArg::SubjectReduction => vec![Suite::SubjectReduction],
                SuiteArg::ErrorFreeness => vec![Suite::ErrorFreeness],
                SuiteArg::Congruence => vec![Suite::Congruence],
                SuiteArg::Roundtrip => vec![Suite::RoundTrip],
                SuiteArg::All => Suite::ALL.to_vec(),
            };
            cmd_fuzz(&suites, n, seed, max_depth)
        }
    };
    print!("{}", report.stdout);
    eprint!("{}", report.stderr);
    ExitCode::from(report.code as u8)
}
