//! Numerical verification toolkit for the clamped Paneitz problem on the unit ball
//! of R^3 and its hyperbolic counterpart.

pub mod errata;
pub mod error;
pub mod euclid_kernel;
pub mod geometry;
pub mod hyper_kernel;
pub mod hyperbolic_map;
pub mod identities;
pub mod moving_plane;
pub mod ode;
pub mod quadrature;
pub mod radial_solver;
pub mod report;
pub mod representation;
pub mod sampling;
pub mod suite;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
