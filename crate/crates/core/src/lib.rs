//! Accelerated iterative hard thresholding (IHT with momentum) for recovering
//! sparse vectors, block-sparse vectors and low-rank matrices, together with
//! the executable form of its convergence analysis: the 2x2 contraction
//! system, admissible momentum range, error and iteration bounds, and
//! restricted-isometry constant estimation.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix the double-precision types most callers want.

pub mod analysis;
pub mod error;
pub mod models;
pub mod numerics;
pub mod objectives;
pub mod problems;
mod scalar;
pub mod solvers;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Matrix = numerics::DenseMatrix<f64>;
pub type Vector = numerics::DenseVector<f64>;
pub type Signal = models::Signal<f64>;
pub type Support = models::Support<f64>;
pub type StructureModel = models::StructureModel;
pub type LeastSquares = objectives::LeastSquares<f64>;
pub type MaskedLeastSquares = objectives::MaskedLeastSquares<f64>;
pub type LogisticL2 = objectives::LogisticL2<f64>;
pub type SolverConfig = solvers::SolverConfig<f64>;
pub type SolverTrace = solvers::SolverTrace<f64>;
pub type ContractionSystem = analysis::ContractionSystem<f64>;
pub type ProblemInstance = problems::ProblemInstance<f64>;

pub type MatrixF32 = numerics::DenseMatrix<f32>;
pub type VectorF32 = numerics::DenseVector<f32>;
pub type SignalF32 = models::Signal<f32>;
