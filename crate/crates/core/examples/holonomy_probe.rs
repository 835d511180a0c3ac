//! Holonomy algebra dimensions from loop transport and from curvature
//! spans, plus the block classification of a cylinder's holonomy.

use holonomy_forge::cylinder::{adapted_basis, p_field};
use holonomy_forge::holonomy::{classify_blocks, holonomy_both, AdaptedFrame, HolonomyOptions};
use holonomy_forge::suite::{build_fixture, SuiteConfig};

fn main() -> holonomy_forge::Result<()> {
    let opts = HolonomyOptions::default();
    for name in ["flat-torus", "eguchi-hanson", "warped", "cylinder-eh"] {
        let fx = build_fixture(&SuiteConfig::new(name))?;
        let est = holonomy_both(&fx.model, &fx.basepoint, &opts)?;
        println!(
            "{name:<14} loops {}  curvature {}  combined {}  gap {:.1e}",
            est.loops.dimension, est.curvature.dimension, est.combined.dimension, est.combined.gap_ratio
        );
        if let Some(cyl) = &fx.cylinder {
            let frame = AdaptedFrame { basis: adapted_basis(cyl, &fx.basepoint)?, factor_dims: fx.factor_dims.clone() };
            let p = p_field(cyl, &fx.basepoint)?;
            let cl = classify_blocks(&est.combined, &fx.model.metric(&fx.basepoint), Some(&p), Some(&frame))?;
            println!("  verdict {}, |B P| {:.1e}, off-pattern {:.1e}", cl.verdict.as_str(), cl.p_residual.unwrap_or(0.0), cl.pattern_residual.unwrap_or(0.0));
        }
    }
    Ok(())
}
