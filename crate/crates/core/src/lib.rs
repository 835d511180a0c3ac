//! Numerical differential geometry for warped products, Codazzi tensors,
//! Lorentzian cylinders, holonomy algebras and spinor fields.

pub mod cylinder;
pub mod error;
pub mod geometry;
pub mod holonomy;
pub mod linalg;
pub mod spin;
pub mod suite;
pub mod warped;
pub mod zoo;
pub mod sampling;

pub use error::{Error, Result};
