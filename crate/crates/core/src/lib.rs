//! Two-tier dynamic-TDD heterogeneous cellular network with a CSMA-controlled
//! D2D underlay: closed-form load-aware coverage and throughput, a spatial
//! Monte Carlo simulator that cross-validates every closed form, and the
//! optimizers for UL/DL configuration, base-station density, bias factors,
//! bandwidth partition, and sensing thresholds.
//!
//! The crate is organized around [`params::NetworkConfig`], an immutable value
//! type holding every scalar parameter in linear units (mW, meters, per m²).
//! All higher layers are pure functions of it:
//!
//! - [`specfn`]: scalar special functions and adaptive quadrature,
//! - [`analytics`]: association, load, retention, coverage, throughput,
//! - [`sim`]: seeded, parallel Monte Carlo ground truth,
//! - [`optimizer`]: closed-form and numerical parameter optimization.

pub mod analytics;
pub mod optimizer;
pub mod params;
pub mod sim;
pub mod specfn;

pub use params::{NetworkConfig, Tier, LinkMode};
