//! Generate quasi-uniform node sets for the three problem geometries.
//!
//! Waveguide nodes follow the curved walls (boundary nodes at uniform arc
//! length, interior nodes on jittered vertical lines); the small random
//! perturbation keeps the set unisolvent.

use helmholtz_rbf::geometry::{
    nodes_interval, nodes_rectangle, nodes_waveguide, Domain, Region,
};

fn main() -> helmholtz_rbf::Result<()> {
    let interval = nodes_interval(12)?;
    println!("interval, n = 12: {} nodes, h = {:.4}", interval.len(), interval.h());

    let rect = nodes_rectangle(8, 10, 1.0)?;
    println!("rectangle, 8 x 10: {} nodes, h = {:.4}", rect.len(), rect.h());

    let domain = Domain::duct_m();
    println!("M-duct ladders (seed 1):");
    for (n1, n2) in [(10, 12), (20, 25), (30, 37), (40, 50)] {
        let nodes = nodes_waveguide(n1, n2, &domain, 1)?;
        let count = |r| nodes.region_indices(r).len();
        println!(
            "  {n1:>2} x {n2:<2} -> {:>4} nodes: {:>4} interior, {} inlet, {} outlet, {} wall",
            nodes.len(),
            count(Region::Interior),
            count(Region::Left),
            count(Region::Right),
            count(Region::Wall)
        );
    }
    Ok(())
}
