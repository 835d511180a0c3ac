//! Lorentzian cylinders −dt² + (H − 2t)^* g over a Riemannian base: the
//! assembled metric, closed-form connection and curvature identities, the
//! lightlike fields P, Q, explicit transport and causality bounds.

mod causality;
mod identities;
mod model;
mod pq;

pub use causality::*;
pub use identities::*;
pub use model::*;
pub use pq::*;

#[cfg(test)]
mod tests;
