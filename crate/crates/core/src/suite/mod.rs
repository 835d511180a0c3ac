//! Batch verification: configuration, fixture registry, suite runners and
//! deterministic JSON reports.

mod config;
mod fixture;
mod registry;
mod report;
mod run;

pub use config::*;
pub use fixture::*;
pub use registry::*;
pub use report::*;
pub use run::*;

#[cfg(test)]
mod tests;
