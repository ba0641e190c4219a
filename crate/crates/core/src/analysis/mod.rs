//! Convergence theory for least-squares recovery as executable objects: the
//! 2x2 contraction system, its matrix powers, the admissible momentum range,
//! error and iteration bounds, and restricted isometry constants.

mod bounds;
mod contraction;
mod rip;

pub use bounds::{error_bound, iteration_bound, BoundReport, MAX_SCAN};
pub use contraction::{
    contraction_matrix, eigenvalues2, geometric_sum, matrix_power, tau_range, xi_of,
    xi_one_minus_ratio, ContractionSystem, Mat2, TauRange, PHI,
};
pub use rip::{
    optimal_mu, rip_exact, rip_surrogate, RipConstants, RipLevel, RipMethod, ENUMERATION_BUDGET,
};
