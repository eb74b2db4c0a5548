pub mod benchmarks;
pub mod error;
pub mod formulations;
pub mod geometry;
pub mod gmres;
pub mod mie;
pub mod operators;
pub mod postprocess;
pub mod properties;
pub mod quadrature;
pub mod solver;
pub mod specfun;

pub use error::{Error, Result};
pub use formulations::{Formulation, Kappa1Rule, Polarization, TransmissionConfig};
pub use geometry::GeometryKind;
pub use solver::{solve, Solution};
