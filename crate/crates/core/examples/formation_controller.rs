//! Drives a swarm from a loose cluster into a rotated square with the
//! decentralized controller, and checks one round against the dense form.

use hsi_core::controller::{assemble_system, run_segment, ControllerGains, Neighborhood, PlanStep, SegmentLimits, SwarmState};
use hsi_core::geom::{self, Polygon};
use hsi_core::netgraph::build_nu_disk_graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let square = Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])?;
    let formation = geom::fill_polygon_uniform(&square, 16)?;
    let step = PlanStep {
        z: formation.z,
        scale: 6.0,
        centroid: [20.0, 10.0],
        rotation: 0.5,
        mode: 0,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = nalgebra::DMatrix::from_fn(16, 2, |_, _| rng.random_range(0.0..8.0));
    let start = SwarmState::at_rest(p);
    let gains = ControllerGains::new(0.15, 0.03)?;
    let radius = 12.0;

    let graph = build_nu_disk_graph(&start.p, radius)?;
    let dense = assemble_system(&graph, &gains, &step)?.step(&start.stacked());
    let local = Neighborhood::new(&graph).step(&start, &step, &gains).stacked();
    println!("dense vs per-agent round: max difference {:.1e}", (dense - local).abs().max());

    let limits = SegmentLimits { max_steps: 5000, tol_f: 1e-6, tol_c: 1e-6 };
    let (end, trace) = run_segment(&start, &step, &gains, &[radius], &limits)?;
    for r in trace.records.iter().step_by(100) {
        println!("t = {:>4}  e_f = {:.3e}  e_c = {:.3e}", r.t, r.e_f, r.e_c);
    }
    println!(
        "converged = {} after {} rounds; swarm centroid ({:.4}, {:.4})",
        trace.converged,
        trace.steps_used,
        end.centroid()[0],
        end.centroid()[1]
    );
    Ok(())
}
