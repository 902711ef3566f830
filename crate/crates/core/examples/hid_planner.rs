//! Plans an eight-step morph from a triangle to a quadrilateral and prints the
//! subgoals together with the per-mode costs and the chosen schedule.

use hsi_core::geom::{Intention, Polygon};
use hsi_core::planner::{self, HidState, PlannerConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = PlannerConfig::reference_defaults(50);
    let h0 = HidState {
        shape: vec![[0.0, 0.0], [4.0, 0.0], [2.0, 3.2]],
        scale: 1.0,
        rotation: 0.0,
        centroid: [20.0, 20.0],
    };
    let goal = Polygon::new(vec![[0.0, 0.0], [6.0, 0.0], [6.6, 4.8], [-0.6, 4.2]])?;
    let intention = Intention::new(goal, 11.6, 50f64.to_radians(), [80.0, 60.0])?;
    let plan = planner::plan(&h0, &intention, &config)?;

    println!("radii {:?}", config.radii);
    for (l, (step, costs)) in plan.steps.iter().zip(&plan.mode_costs).enumerate() {
        let costs: Vec<String> = costs.iter().map(|c| c.to_string()).collect();
        println!(
            "step {}: s = {:>6.3}  theta = {:>6.3}  c = ({:>6.2}, {:>6.2})  mode {}  costs [{}]",
            l + 1,
            step.scale,
            step.rotation,
            step.centroid[0],
            step.centroid[1],
            step.mode,
            costs.join(", ")
        );
    }
    println!("HID cost {:.3}, total cost {:.3}", plan.hid_cost, plan.total_cost);
    Ok(())
}
