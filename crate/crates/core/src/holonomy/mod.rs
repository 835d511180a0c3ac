//! Holonomy algebra estimation and classification of the holonomy
//! representation.

mod classify;
mod estimate;
mod probe;

pub use classify::*;
pub use estimate::*;
pub use probe::*;

#[cfg(test)]
mod tests;
