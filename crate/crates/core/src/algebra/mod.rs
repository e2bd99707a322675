//! Truncated Fourier-mode representation of the E₂ generators.
//!
//! The basis is `{e^{inθ}}` for `n = -M..=M`, stored at row/column `M + n`.
//! In this basis `J = -i∂_θ` is diagonal, while `u = sin θ` and `v = cos θ`
//! are nearest-neighbour shift matrices. Identities of the infinite algebra
//! hold exactly away from the boundary; [`interior_norm`] measures residuals
//! on the interior window only.

mod expm;

use std::ops::{Add, Mul, Neg, Sub};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

pub use expm::expm;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 64;
/// Interior window used by residual checks.
pub const DEFAULT_PAD: usize = 4;
/// Extra modes carried by checks that involve matrix exponentials. Boundary
/// defects leak inward through every power of a shift matrix, so these
/// checks are computed on `M + EXP_GUARD` and reported on the window of `M`.
pub const EXP_GUARD: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FourierBasis {
    order: usize,
}

impl FourierBasis {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::TruncationTooSmall { got: 0, min: 1 });
        }
        Ok(Self { order })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        2 * self.order + 1
    }

    /// Row/column index of mode `n`, if it lies inside the truncation.
    pub fn index(&self, n: i64) -> Option<usize> {
        let m = self.order as i64;
        (-m..=m).contains(&n).then(|| (n + m) as usize)
    }

    pub fn mode(&self, index: usize) -> i64 {
        index as i64 - self.order as i64
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> {
        let m = self.order as i64;
        -m..=m
    }

    pub fn extended(&self, guard: usize) -> Self {
        Self { order: self.order + guard }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    basis: FourierBasis,
    data: DMatrix<C64>,
}

impl OperatorMatrix {
    pub fn zeros(basis: FourierBasis) -> Self {
        let d = basis.dim();
        Self { basis, data: DMatrix::zeros(d, d) }
    }

    pub fn identity(basis: FourierBasis) -> Self {
        let d = basis.dim();
        Self { basis, data: DMatrix::identity(d, d) }
    }

    pub fn from_data(basis: FourierBasis, data: DMatrix<C64>) -> Result<Self> {
        if data.nrows() != basis.dim() || data.ncols() != basis.dim() {
            return Err(Error::BasisMismatch { left: basis.dim(), right: data.nrows() });
        }
        Ok(Self { basis, data })
    }

    /// Diagonal operator with entry `f(n)` at mode `n`.
    pub fn diagonal(basis: FourierBasis, f: impl Fn(i64) -> C64) -> Self {
        let mut out = Self::zeros(basis);
        for (i, n) in basis.modes().enumerate() {
            out.data[(i, i)] = f(n);
        }
        out
    }

    pub fn basis(&self) -> FourierBasis {
        self.basis
    }

    pub fn data(&self) -> &DMatrix<C64> {
        &self.data
    }

    /// Matrix element between modes (`row`, `col`).
    pub fn entry(&self, row: i64, col: i64) -> C64 {
        match (self.basis.index(row), self.basis.index(col)) {
            (Some(i), Some(j)) => self.data[(i, j)],
            _ => ZERO,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self { basis: self.basis, data: self.data.adjoint() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { basis: self.basis, data: &self.data * s }
    }

    pub fn exp(&self) -> Self {
        Self { basis: self.basis, data: expm(&self.data) }
    }

    pub fn try_inverse(&self) -> Option<Self> {
        self.data.clone().try_inverse().map(|data| Self { basis: self.basis, data })
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.basis.dim(), "vector length does not match basis");
        let v = nalgebra::DVector::from_column_slice(x);
        (&self.data * v).iter().copied().collect()
    }

    /// Crop to the modes `|n| <= order` of a smaller basis.
    pub fn restrict(&self, order: usize) -> Result<Self> {
        if order > self.basis.order || order == 0 {
            return Err(Error::PadOutOfRange { pad: self.basis.order.saturating_sub(order), order: self.basis.order });
        }
        let off = self.basis.order - order;
        let d = 2 * order + 1;
        Ok(Self { basis: FourierBasis { order }, data: self.data.view((off, off), (d, d)).into_owned() })
    }

    pub fn interior_norm(&self, pad: usize) -> Result<f64> {
        interior_norm(self, pad)
    }

    /// Hermitian eigenvalues, ascending. Only meaningful for Hermitian input.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(self.basis, other.basis, "operator bases differ");
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.check_same(rhs);
        OperatorMatrix { basis: self.basis, data: &self.data + &rhs.data }
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.check_same(rhs);
        OperatorMatrix { basis: self.basis, data: &self.data - &rhs.data }
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.check_same(rhs);
        OperatorMatrix { basis: self.basis, data: &self.data * &rhs.data }
    }
}

impl Neg for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        OperatorMatrix { basis: self.basis, data: -&self.data }
    }
}

/// The three generators plus the quadratic products the models use.
#[derive(Debug, Clone)]
pub struct Generators {
    pub j: OperatorMatrix,
    pub u: OperatorMatrix,
    pub v: OperatorMatrix,
    pub jj: OperatorMatrix,
    pub uj: OperatorMatrix,
    pub vj: OperatorMatrix,
    pub uu: OperatorMatrix,
    pub vv: OperatorMatrix,
    pub uv: OperatorMatrix,
}

impl Generators {
    pub fn basis(&self) -> FourierBasis {
        self.j.basis
    }

    /// `C = u² + v²`; the identity away from the two corner modes.
    pub fn casimir(&self) -> OperatorMatrix {
        &self.uu + &self.vv
    }

    pub fn identity(&self) -> OperatorMatrix {
        OperatorMatrix::identity(self.basis())
    }
}

/// `J`, `u = sin θ`, `v = cos θ` on the truncated exponential basis.
///
/// Built once per order and cloned afterwards; clones share the cached
/// eigenvectors used by the exponentials.
pub fn build_generators(order: usize) -> Result<Generators> {
    if order < 2 {
        return Err(Error::TruncationTooSmall { got: order, min: 2 });
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, Generators>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Mutex::default);
    if let Some(g) = cache.lock().expect("generator cache poisoned").get(&order) {
        return Ok(g.clone());
    }
    let g = assemble_generators(order)?;
    cache.lock().expect("generator cache poisoned").entry(order).or_insert_with(|| g.clone());
    Ok(g)
}

fn assemble_generators(order: usize) -> Result<Generators> {
    let basis = FourierBasis::new(order)?;
    let j = OperatorMatrix::diagonal(basis, |n| C64::new(n as f64, 0.0));
    let mut u = OperatorMatrix::zeros(basis);
    let mut v = OperatorMatrix::zeros(basis);
    // e^{iθ} raises the mode by one: sin θ = (e^{iθ} - e^{-iθ}) / 2i.
    let half = C64::new(0.5, 0.0);
    let up = C64::new(0.0, -0.5);
    for i in 0..basis.dim() - 1 {
        v.data[(i + 1, i)] = half;
        v.data[(i, i + 1)] = half;
        u.data[(i + 1, i)] = up;
        u.data[(i, i + 1)] = -up;
    }
    let jj = &j * &j;
    let uj = &u * &j;
    let vj = &v * &j;
    let uu = &u * &u;
    let vv = &v * &v;
    let uv = &u * &v;
    Ok(Generators { j, u, v, jj, uj, vj, uu, vv, uv })
}

pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    if a.basis != b.basis {
        return Err(Error::BasisMismatch { left: a.basis.dim(), right: b.basis.dim() });
    }
    Ok(&(a * b) - &(b * a))
}

/// Spectral norm of `a` restricted (rows and columns) to `|n| <= M - pad`.
pub fn interior_norm(a: &OperatorMatrix, pad: usize) -> Result<f64> {
    let order = a.basis.order;
    if pad >= order {
        return Err(Error::PadOutOfRange { pad, order });
    }
    let d = a.basis.dim() - 2 * pad;
    let block = a.data.view((pad, pad), (d, d)).into_owned();
    Ok(block.singular_values().iter().copied().fold(0.0, f64::max))
}

/// Euclidean norm of a mode vector restricted to `|n| <= M - pad`.
pub fn interior_vector_norm(basis: FourierBasis, x: &[C64], pad: usize) -> Result<f64> {
    if pad >= basis.order {
        return Err(Error::PadOutOfRange { pad, order: basis.order });
    }
    Ok(x[pad..basis.dim() - pad].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
}
