//! Imaginary Killing spinor on R x_{e^{-2s}} T^3 and its parallel lift to the
//! Lorentzian cylinder.

use holonomy_forge::spin::{
    check_warped_killing, construct_warped_killing_spinor, lift_to_cylinder, local_samples, phi_a_transfer, KillingOptions, LiftOptions,
};
use holonomy_forge::zoo::cylinder_torus;

fn main() -> holonomy_forge::Result<()> {
    let cyl = cylinder_torus()?;
    let wp = cyl.warped.clone().expect("warped base");
    let x0 = [1.0, 2.0, 3.0];
    let ks = construct_warped_killing_spinor(&wp, None, &x0, &KillingOptions::default())?;
    let samples = local_samples(&ks.field.model, &[0.0, 1.0, 2.0, 3.0], 0.3, 6, 1);
    let rep = check_warped_killing(&ks, &samples)?;
    println!("Killing residual      {:.3e}", rep.killing_residual);
    println!("|psi|^2 e^(2s) - 1    {:.3e}", rep.norm_profile_residual);
    println!("W + e^(-2s) d_s       {:.3e}", rep.current_residual);
    println!("q_psi                 {:.3e}", rep.q_max);

    let transferred = phi_a_transfer(&ks.field, &cyl.h)?;
    let (_, lift) = lift_to_cylinder(&cyl, &transferred, &LiftOptions::default())?;
    println!("lift: |nabla psi~| {:.3e}, |nabla V| {:.3e}, g(V,V) + q {:.3e}", lift.parallel_residual, lift.current_parallel_residual, lift.norm_residual);
    println!("current is {:?}", lift.causal_type);
    Ok(())
}
