//! Quadrature, the three-level block in the Hermitian picture, expectation
//! values, Schrödinger residuals and the double scaling comparison.

mod bessel;
mod csv_out;
mod grid;
mod scaling;
mod three_level;

pub use bessel::bessel_i;
pub use csv_out::{double_scaling_csv, expectation_series, expectation_csv, ExpectationRow};
pub use grid::{QuadratureGrid, DEFAULT_NODES};
pub use scaling::{
    double_scaling_compare, limit_operator, max_deviation_by_zeta, nearest_pairing_gap, polished_eigenvalues,
    raw_model_eigenvalues, scaled_operator, schur_eigenvalues, DoubleScalingRow,
};
pub use three_level::{closed_form_energies, expectation, tdse_residual, Level, Observable, ThreeLevelSystem};
