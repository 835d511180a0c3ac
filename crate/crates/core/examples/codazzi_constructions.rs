//! Codazzi tensors on the warped product R x_{e^{-2s}} T^3, assembled from a
//! fiber Codazzi tensor T and a profile b(s).

use holonomy_forge::sampling;
use holonomy_forge::suite::{default_profile, sampled_codazzi_residual};
use holonomy_forge::warped::{build_e_family, check_bde_conditions};
use holonomy_forge::zoo::{torus_codazzi, warped_torus};

fn main() -> holonomy_forge::Result<()> {
    let wp = warped_torus(3, (-0.5, 0.5));
    let t = torus_codazzi(3);
    let mut rng = sampling::rng(5);
    let fiber_checks = sampling::random_points(&mut rng, &wp.fiber.chart, 0.05, 5);
    let family = build_e_family(&t, default_profile(), &wp, &fiber_checks, 1e-6)?;
    let split = family.split();
    let h = split.assemble(&wp);

    let model = wp.model();
    let points = sampling::random_points(&mut rng, &model.chart, 0.05, 20);
    let blocks = check_bde_conditions(&wp, &split, &points, 5)?;
    println!("block conditions on {} points", points.len());
    println!("  d-block Codazzi         {:.3e}", blocks.c5);
    println!("  b-block gradient        {:.3e}", blocks.c6);
    println!("  e-block s-derivative    {:.3e}", blocks.c7);
    println!("  e-block fiber Codazzi   {:.3e}", blocks.c8);
    println!("  block reconstruction    {:.3e}", blocks.reconstruction);
    let r = sampled_codazzi_residual(&model, &h, &points, 25, 5)?;
    println!("assembled H: max |(nabla_X H)Y - (nabla_Y H)X| = {r:.3e} over {} pairs", points.len() * 25);
    Ok(())
}
