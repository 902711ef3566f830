//! Communication graphs of one swarm under several interaction radii:
//! spectra, planner mode costs and the controller stability certificate.

use hsi_core::controller::stability_gain_bound;
use hsi_core::netgraph::{build_nu_disk_graph, communication_cost, connectivity_cost, spectral_summary};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let positions = DMatrix::from_fn(25, 2, |_, _| rng.random_range(0.0..50.0));

    println!("radius  edges  lambda2  lambda2_N  lambda2_W  J_con         J_com         kp_max");
    for radius in [8.0, 15.0, 25.0, 80.0] {
        let graph = build_nu_disk_graph(&positions, radius)?;
        let s = spectral_summary(&graph)?;
        let j_con = connectivity_cost(&graph, 1e6, 0.05)?;
        let j_com = communication_cost(&graph, 2e4);
        let cert = stability_gain_bound(&s, 0.15, 0.03);
        println!(
            "{radius:>6}  {:>5}  {:>7.4}  {:>9.4}  {:>9.4}  {:<12}  {:<12}  {:.5}{}",
            graph.edge_count(),
            s.lambda2,
            s.lambda2_normalized,
            s.lambda2_weighted,
            j_con.to_string(),
            j_com.to_string(),
            cert.kp_max,
            if cert.is_m_matrix { "" } else { "  (kp = 0.03 not certified)" },
        );
    }
    Ok(())
}
