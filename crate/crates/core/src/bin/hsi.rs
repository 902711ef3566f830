use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use hsi_core::decoder::{self, session::DecodeOptions, RecordedSession, SynthScript};
use hsi_core::harness::{self, Scenario, ServerOptions};

type Result<T> = std::result::Result<T, Box<dyn std::error::Error>>;

#[derive(Parser)]
#[command(name = "hsi", version, about = "Human-swarm interaction workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a scenario and print the subgoals, mode costs and schedule.
    Plan { scenario: PathBuf },
    /// Plan and execute a scenario; optionally write a JSON-lines trace.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Train on the calibration part of a recorded session and decode the rest.
    Decode { session: PathBuf },
    /// Write a synthetic recorded session (five-gesture calibration plus a live part).
    Synth {
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Graph spectra and stability certificates for a scenario.
    Spectra { scenario: PathBuf },
    /// Run the interactive session service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:7878")]
        addr: String,
        /// Session template; defaults to a 20-agent swarm with reference planner parameters.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        cadence: usize,
    },
}

fn print(value: &impl Serialize) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn default_session_scenario() -> Scenario {
    Scenario::from_json(
        r#"{"name": "session", "agents": 20,
            "initial": {"formation": {"shape": [[0,0],[1,0],[1,1],[0,1]], "scale": 4.0}},
            "goal": {"shape": [[0,0],[1,0],[1,1],[0,1]], "scale": 4.0}}"#,
    )
    .expect("built-in session scenario is valid")
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Plan { scenario } => {
            let s = Scenario::load(scenario)?;
            let (_, h0) = s.initial_state()?;
            let plan = hsi_core::planner::plan(&h0, &s.intention()?, &s.planner_config())?;
            print(&plan)
        }
        Command::Run { scenario, trace } => {
            let s = Scenario::load(scenario)?;
            let result = match trace {
                Some(path) => {
                    let mut out = BufWriter::new(File::create(path)?);
                    harness::write_trace(&s, &mut out)?
                }
                None => harness::run_episode(&s)?,
            };
            let segments: Vec<_> = result
                .segments
                .iter()
                .map(|r| json!({"index": r.index, "mode": r.mode, "radius": r.radius,
                                "steps_used": r.trace.steps_used, "converged": r.trace.converged}))
                .collect();
            print(&json!({
                "segments": segments,
                "e_f": result.e_f,
                "e_c": result.e_c,
                "converged": result.converged,
                "total_cost": result.plan.total_cost,
                "wall_time_ms": result.wall_time.as_secs_f64() * 1e3,
            }))
        }
        Command::Decode { session } => {
            let s = RecordedSession::load(session)?;
            let report = decoder::decode_session(&s, &DecodeOptions::default())?;
            let events: Vec<_> = report.events.iter().filter(|e| e.kind != decoder::EventKind::Move).collect();
            print(&json!({
                "frames": report.frames,
                "training_frames": report.training_frames,
                "iterations": report.log_likelihoods.len(),
                "log_likelihood": report.log_likelihoods.last(),
                "decoded_frames": report.decoded.len(),
                "accuracy": report.accuracy,
                "actions": events,
            }))
        }
        Command::Synth { out, seed } => {
            decoder::synth_session(seed, &SynthScript::standard_protocol()).save(out)?;
            Ok(())
        }
        Command::Spectra { scenario } => print(&harness::spectra_report(&Scenario::load(scenario)?)?),
        Command::Serve { addr, scenario, cadence } => {
            let scenario = match scenario {
                Some(p) => Scenario::load(p)?,
                None => default_session_scenario(),
            };
            harness::serve(addr, ServerOptions { scenario, cadence })?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
