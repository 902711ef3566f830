//! Runs the bundled 50-agent scenario end to end. Pass a path to also write
//! the JSON-lines trace, which is then re-read and verified.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;

use hsi_core::harness::{read_trace, replay_check, run_episode, write_trace, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/paper_fig7.json");
    let scenario = Scenario::load(path)?;
    let episode = match std::env::args().nth(1) {
        Some(out) => {
            let episode = write_trace(&scenario, &mut BufWriter::new(File::create(&out)?))?;
            let lines = read_trace(BufReader::new(File::open(&out)?))?;
            println!("trace {out}: {} lines, {} steps replayed exactly", lines.len(), replay_check(&lines)?);
            episode
        }
        None => run_episode(&scenario)?,
    };
    let modes: Vec<usize> = episode.plan.modes().iter().map(|m| m + 1).collect();
    println!("mode schedule (1-based): {modes:?}");
    for s in &episode.segments {
        println!(
            "segment {}  radius {:>5}  rounds {:>4}  converged {}",
            s.index + 1,
            s.radius,
            s.trace.steps_used,
            s.trace.converged
        );
    }
    println!(
        "final e_f = {:.2e}, e_c = {:.2e}, wall time {:.0} ms",
        episode.e_f,
        episode.e_c,
        episode.wall_time.as_secs_f64() * 1e3
    );
    Ok(())
}
