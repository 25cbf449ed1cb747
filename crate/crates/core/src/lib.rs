//! Guaranteed a posteriori error bounds for 1D Schrödinger problems in
//! atom-centered Hermite–Gaussian bases.

pub mod driver;
pub mod error;
pub mod estimator;
pub mod grid;
pub mod lcao;
pub mod linalg;
pub mod model;
pub mod num;
pub mod partition;
pub mod tridiag;

pub use error::{Error, Result};
pub use num::Real;

// Double-precision aliases for the common entry points; the kernels stay
// generic over the scalar.
pub type Grid64 = grid::Grid<f64>;
pub type System64 = model::MolecularSystem<f64>;
pub type Basis64 = lcao::AOBasis<f64>;
pub type Solution64 = lcao::DiscreteSolution<f64>;
pub type Estimator64 = estimator::EstimatorContext<f64>;
pub type Config64 = driver::ExperimentConfig<f64>;
pub type Trace64 = driver::AdaptiveTrace<f64>;
