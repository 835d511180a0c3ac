//! Codazzi tensors on Eguchi-Hanson: only constant multiples of the identity
//! survive, and no homothetic vector field exists.

use holonomy_forge::zoo::{averaging_check, eh_codazzi_obstruction, EguchiHansonModel};

fn main() -> holonomy_forge::Result<()> {
    let eh = EguchiHansonModel::new(1.0);
    let rep = eh_codazzi_obstruction(&eh, 16)?;
    println!("pointwise solution dimension  {}", rep.algebraic_dim);
    println!("solution dimension (n = {})   {}", rep.grid, rep.solution_dim);
    println!("solution dimension (refined)  {}", rep.solution_dim_refined);
    println!("distance from Id              {:.3e}", rep.identity_defect);
    println!("homothetic sigma_min          {:.3e}", rep.homothetic_sigma_min);
    for s in &rep.steps {
        println!("  {:<32} {:.3e}", s.name, s.residual);
    }
    let avg = averaging_check(&eh, 1.8, 3)?;
    println!("sphere averaging: idempotence {:.1e}, commutes with d {:.1e}", avg.idempotence, avg.commutation);
    Ok(())
}
