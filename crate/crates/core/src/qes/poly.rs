use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// Real polynomial in the spectral parameter Λ, coefficients in ascending
/// degree. Trailing zeros are trimmed, so the zero polynomial is empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaPolynomial {
    coeffs: Vec<f64>,
}

/// Imaginary parts above this are reported as non-real roots.
pub const ROOT_IMAG_TOL: f64 = 1e-8;
const ROOT_DEDUP: f64 = 1e-9;

impl LambdaPolynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `Λ − c`.
    pub fn linear(c: f64) -> Self {
        Self::new(vec![-c, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1.0
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect())
    }

    /// `Σ |a_k| |x|^k`, the natural scale for judging `|p(x)|`.
    pub fn magnitude_at(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x.abs() + c.abs())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Real roots, ascending. Companion-matrix eigenvalues, one Newton step
    /// each, then deduplication; any root whose imaginary part exceeds
    /// [`ROOT_IMAG_TOL`] is an error.
    pub fn real_roots(&self) -> Result<Vec<f64>> {
        let Some(deg) = self.degree() else {
            return Err(Error::InvalidArgument("the zero polynomial has no isolated roots".into()));
        };
        if deg == 0 {
            return Ok(Vec::new());
        }
        let lead = self.leading();
        let mut comp = DMatrix::<f64>::zeros(deg, deg);
        for i in 1..deg {
            comp[(i, i - 1)] = 1.0;
        }
        for i in 0..deg {
            comp[(i, deg - 1)] = -self.coeffs[i] / lead;
        }
        let dp = self.derivative();
        let mut roots = Vec::with_capacity(deg);
        for z in comp.complex_eigenvalues().iter() {
            if z.im.abs() > ROOT_IMAG_TOL {
                return Err(Error::ComplexRoot { re: z.re, im: z.im });
            }
            let mut x = z.re;
            let d = dp.eval(x);
            if d != 0.0 {
                x -= self.eval(x) / d;
            }
            roots.push(x);
        }
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|a, b| (*a - *b).abs() < ROOT_DEDUP);
        Ok(roots)
    }
}

impl Add for &LambdaPolynomial {
    type Output = LambdaPolynomial;
    fn add(self, rhs: &LambdaPolynomial) -> LambdaPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |p: &LambdaPolynomial, k: usize| p.coeffs.get(k).copied().unwrap_or(0.0);
        LambdaPolynomial::new((0..n).map(|k| get(self, k) + get(rhs, k)).collect())
    }
}

impl Sub for &LambdaPolynomial {
    type Output = LambdaPolynomial;
    fn sub(self, rhs: &LambdaPolynomial) -> LambdaPolynomial {
        self + &rhs.scale(-1.0)
    }
}

impl Mul for &LambdaPolynomial {
    type Output = LambdaPolynomial;
    fn mul(self, rhs: &LambdaPolynomial) -> LambdaPolynomial {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return LambdaPolynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        LambdaPolynomial::new(out)
    }
}
