//! Time-dependent coefficient sets, their matrix realization, and the
//! PT-symmetry classification of the coefficient functions.

mod coeffs;
mod parse;
mod pt;
mod timefn;

pub use coeffs::{realize, Coeff, CoefficientSet, CoefficientValues, ComplexFunction};
pub use parse::parse_expr;
pub use pt::{classify_pt, hermitian_defect, is_hermitian, PtClass, CLASSIFY_TOL, DEFAULT_SAMPLE_TIMES};
pub use timefn::TimeFunction;
