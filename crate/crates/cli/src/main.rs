use std::io::{stdin, stdout};
use std::path::PathBuf;
use std::process::ExitCode;

use bwqa_cli::repl::Repl;
use bwqa_cli::server::{self, AppState};
use bwqa_cli::{load_transducer, load_world};
use bwqa_core::session::{replay_with, ClockMode};
use bwqa_core::Session;
use clap::{Parser, Subcommand};

const CONFIG_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "bwqa", version, about = "Ask a blocks world about its past")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Interactive session on stdin/stdout.
    Repl {
        #[arg(long)]
        world: PathBuf,
        /// Directory of *.trees and optional *.lex files.
        #[arg(long)]
        trees: Option<PathBuf>,
        /// Advance time only through :wait.
        #[arg(long)]
        sim_clock: bool,
    },
    /// Re-run a JSON Lines transcript and compare answers.
    Replay {
        transcript: PathBuf,
        #[arg(long)]
        trees: Option<PathBuf>,
    },
    /// HTTP and WebSocket API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long)]
        world: PathBuf,
        #[arg(long)]
        trees: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(CONFIG_ERROR)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Repl { world, trees, sim_clock } => {
            let mode = if sim_clock { ClockMode::Simulated } else { ClockMode::Real };
            let session = Session::with_transducer(load_world(&world)?, load_transducer(trees.as_deref())?, 0.0).with_clock_mode(mode);
            Repl::new(session).run(stdin().lock(), stdout().lock())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Replay { transcript, trees } => {
            let text = std::fs::read_to_string(&transcript)?;
            let report = match replay_with(&text, load_transducer(trees.as_deref())?) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(ExitCode::from(e.exit_code() as u8));
                }
            };
            for c in &report.checks {
                let mark = if c.matches() { "ok" } else { "MISMATCH" };
                println!("{mark} [{}] {}", c.seq, c.question);
                if !c.matches() {
                    println!("  expected: {}", c.expected.as_deref().unwrap_or(""));
                    println!("  actual:   {}", c.actual);
                }
            }
            println!("{} of {} answers match", report.checks.len() - report.mismatches(), report.checks.len());
            Ok(ExitCode::from(report.exit_code() as u8))
        }
        Command::Serve { port, world, trees } => {
            let state = AppState::new(load_world(&world)?, load_transducer(trees.as_deref())?, ClockMode::Real);
            let rt = tokio::runtime::Runtime::new()?;
            eprintln!("listening on port {port}");
            rt.block_on(server::serve(state, port))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
