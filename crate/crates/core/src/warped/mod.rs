//! Warped products ℝ ×_f F, endomorphism fields, the Codazzi checker and
//! the constructions of Codazzi tensors from fiber data.

mod bde;
mod codazzi;
mod endo;
mod product;
mod spline;

pub use bde::*;
pub use codazzi::*;
pub use endo::*;
pub use product::*;
pub use spline::*;

#[cfg(test)]
mod tests;
