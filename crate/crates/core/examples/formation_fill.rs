//! Turns a drawn outline into agent slots and pads two outlines to a common
//! vertex count, as the planner does before interpolating between them.

use hsi_core::geom::{self, Polygon};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let triangle = Polygon::new(vec![[0.0, 0.0], [4.0, 0.0], [2.0, 3.2]])?;
    let pentagon = Polygon::new(vec![[0.0, 0.0], [3.0, -1.0], [5.0, 1.5], [2.5, 4.0], [-0.5, 2.0]])?;

    let formation = geom::fill_polygon_uniform(&triangle, 12)?;
    println!("12 agents in a triangle of area {:.2}:", triangle.area());
    for i in 0..formation.len() {
        println!("  z[{i:>2}] = ({:>6.3}, {:>6.3})", formation.z[(i, 0)], formation.z[(i, 1)]);
    }

    let placed = geom::place(&formation.z, 2.0, 30f64.to_radians(), [10.0, 5.0]);
    println!("scaled by 2, rotated 30 deg, centered at (10, 5): first agent at ({:.3}, {:.3})", placed[(0, 0)], placed[(0, 1)]);

    let (a, b) = geom::match_vertex_counts(&triangle, &pentagon);
    println!("padded triangle ({} vertices, area {:.2}): {:?}", a.len(), a.area(), a.vertices());
    println!("pentagon ({} vertices, area {:.2})", b.len(), b.area());
    Ok(())
}
