use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{realize, Coeff, CoefficientSet, CoefficientValues};
use crate::algebra::{interior_norm, DEFAULT_PAD};
use crate::error::Result;

/// The five antilinear symmetries that preserve the E₂ commutation relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PtClass {
    PT1,
    PT2,
    PT3,
    PT4,
    PT5,
}

impl PtClass {
    pub const ALL: [PtClass; 5] = [PtClass::PT1, PtClass::PT2, PtClass::PT3, PtClass::PT4, PtClass::PT5];

    /// Coefficients that must be purely imaginary; for PT3 the pairs that
    /// must be complex conjugates are listed by [`PtClass::conjugate_pairs`].
    pub fn imaginary_coefficients(self) -> &'static [Coeff] {
        match self {
            PtClass::PT1 => &[Coeff::J, Coeff::U, Coeff::V],
            PtClass::PT2 => &[Coeff::J, Coeff::UJ, Coeff::VJ],
            PtClass::PT3 => &[],
            PtClass::PT4 => &[Coeff::U, Coeff::UJ, Coeff::UV],
            PtClass::PT5 => &[Coeff::V, Coeff::VJ, Coeff::UV],
        }
    }

    pub fn conjugate_pairs(self) -> &'static [(Coeff, Coeff)] {
        match self {
            PtClass::PT3 => &[(Coeff::U, Coeff::V), (Coeff::UJ, Coeff::VJ), (Coeff::UU, Coeff::VV)],
            _ => &[],
        }
    }

    pub fn real_coefficients(self) -> Vec<Coeff> {
        let paired: Vec<Coeff> = self.conjugate_pairs().iter().flat_map(|&(a, b)| [a, b]).collect();
        Coeff::ALL
            .into_iter()
            .filter(|c| !self.imaginary_coefficients().contains(c) && !paired.contains(c))
            .collect()
    }

    /// Whether the values satisfy this class's row of the reality table, with
    /// tolerance relative to the largest coefficient magnitude.
    pub fn admits(self, v: &CoefficientValues, rel_tol: f64) -> bool {
        let scale = v.0.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tol = rel_tol * scale.max(f64::MIN_POSITIVE);
        let real_ok = self.real_coefficients().iter().all(|&c| v.get(c).im.abs() <= tol);
        let imag_ok = self.imaginary_coefficients().iter().all(|&c| v.get(c).re.abs() <= tol);
        let pair_ok = self
            .conjugate_pairs()
            .iter()
            .all(|&(a, b)| (v.get(a) - v.get(b).conj()).norm() <= tol);
        real_ok && imag_ok && pair_ok
    }
}

impl fmt::Display for PtClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl std::str::FromStr for PtClass {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        PtClass::ALL
            .into_iter()
            .find(|c| c.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| crate::error::Error::InvalidArgument(format!("unknown symmetry class '{s}'")))
    }
}

pub const DEFAULT_SAMPLE_TIMES: [f64; 4] = [0.0, 0.37, 1.0, 2.5];
pub const CLASSIFY_TOL: f64 = 1e-12;

/// Every class whose reality pattern holds at all sample times.
pub fn classify_pt(c: &CoefficientSet, sample_times: &[f64]) -> BTreeSet<PtClass> {
    let values: Vec<CoefficientValues> = sample_times.iter().map(|&t| c.values_at(t)).collect();
    PtClass::ALL
        .into_iter()
        .filter(|class| values.iter().all(|v| class.admits(v, CLASSIFY_TOL)))
        .collect()
}

/// Matrix-level Hermiticity check on the interior window.
pub fn is_hermitian(c: &CoefficientSet, t: f64, m: usize) -> Result<bool> {
    hermitian_defect(c, t, m).map(|(defect, norm)| defect <= 1e-12 * (1.0 + norm))
}

/// `(‖H − H†‖, ‖H‖)` on the interior window.
pub fn hermitian_defect(c: &CoefficientSet, t: f64, m: usize) -> Result<(f64, f64)> {
    let h = realize(c, t, m)?;
    let anti = &h - &h.adjoint();
    Ok((interior_norm(&anti, DEFAULT_PAD)?, interior_norm(&h, DEFAULT_PAD)?))
}
