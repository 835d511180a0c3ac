//! Charts, metrics, Levi-Civita connection, curvature and parallel transport.

mod connection;
mod curvature;
mod curve;
mod geodesic;
mod model;
mod transport;

pub use connection::*;
pub use curvature::*;
pub use curve::*;
pub use geodesic::*;
pub use model::*;
pub use transport::*;
