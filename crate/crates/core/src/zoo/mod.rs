//! Concrete fixtures: flat spaces, spheres, cones, products, warped
//! products and the Eguchi–Hanson metric with its Codazzi obstruction.

mod cylinders;
mod eh;
mod fixtures;
mod obstruction;

pub use cylinders::*;
pub use eh::*;
pub use fixtures::*;
pub use obstruction::*;

#[cfg(test)]
mod tests;
