//! Generates a synthetic armband recording, trains the gesture HMM on its
//! calibration part and decodes the live part into pointer actions.

use hsi_core::decoder::session::DecodeOptions;
use hsi_core::decoder::{decode_session, synth_session, EventKind, SynthScript};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1);
    let session = synth_session(seed, &SynthScript::standard_protocol());
    let report = decode_session(&session, &DecodeOptions::default())?;

    println!("{} feature frames, {} used for training", report.frames, report.training_frames);
    println!(
        "Baum-Welch: {} iterations, log-likelihood {:.2} -> {:.2}",
        report.log_likelihoods.len(),
        report.log_likelihoods.first().copied().unwrap_or(f64::NAN),
        report.log_likelihoods.last().copied().unwrap_or(f64::NAN)
    );
    if let Some(acc) = report.accuracy {
        println!("live frame accuracy {:.1}%", 100.0 * acc);
    }
    for e in report.events.iter().filter(|e| e.kind != EventKind::Move) {
        println!("t = {:>6.2}s  {:?} at ({:.3}, {:.3})", e.time, e.kind, e.position[0], e.position[1]);
    }
    Ok(())
}
