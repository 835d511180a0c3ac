//! Per-slice global hyperbolicity and bbc bounds of two cylinders.

use holonomy_forge::cylinder::{causality_bounds, CausalityGrid};
use holonomy_forge::zoo::{cylinder_eh, cylinder_torus_identity};

fn main() -> holonomy_forge::Result<()> {
    for cyl in [cylinder_torus_identity()?, cylinder_eh()?] {
        let grid = CausalityGrid::for_cylinder(&cyl, 5, 3, 20, 9);
        let rep = causality_bounds(&cyl, &grid, true);
        println!("{} (strongly causal: {})", cyl.name, rep.strongly_causal);
        for s in &rep.slices {
            println!("  t = {:>7.3}  gh {:>10.4}  bbc {:>10.4}", s.t, s.gh, s.bbc);
        }
        println!("  bounds: gh {:.4} ({}), bbc {:.4} ({})", rep.gh_bound, rep.gh_established, rep.bbc_bound, rep.bbc_established);
    }
    Ok(())
}
