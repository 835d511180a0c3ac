//! Connection and curvature identities of the Lorentzian cylinder
//! -dt^2 + g_b((H - 2t) ., (H - 2t) .) over the warped Eguchi-Hanson base.

use holonomy_forge::cylinder::{max_curvature, verify_identities};
use holonomy_forge::zoo::{cylinder_eh, cylinder_torus};

fn main() -> holonomy_forge::Result<()> {
    let cyl = cylinder_eh()?;
    println!("{}: t in ({:.3}, {:.3})", cyl.name, cyl.t_window.0, cyl.t_window.1);
    for check in verify_identities(&cyl, 50, 7)? {
        println!(
            "  {:<9} {:>10.3e}  tol {:.0e}  {}",
            check.identity.id(),
            check.max_residual,
            check.tol,
            if check.passed() { "ok" } else { "FAILED" }
        );
    }
    let flat = cylinder_torus()?;
    println!("max |R| on the torus cylinder: {:.3e}", max_curvature(&flat, 20, 7)?);
    println!("max |R| on the EH cylinder:    {:.3e}", max_curvature(&cyl, 20, 7)?);
    Ok(())
}
