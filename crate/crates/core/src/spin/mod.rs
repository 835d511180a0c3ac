//! Clifford modules, spinor fields, Codazzi and Killing spinors, Dirac
//! currents and the parallel lift to Lorentzian cylinders.

mod clifford;
mod connection;
mod current;
mod field;
mod killing;
mod lift;

pub use clifford::*;
pub use connection::*;
pub use current::*;
pub use field::*;
pub use killing::*;
pub use lift::*;

#[cfg(test)]
mod tests;
