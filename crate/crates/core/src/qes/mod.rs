//! Quasi-exactly solvable spectra of
//! `Ĥ = 4J² + 2i(1−β)ζ uJ − βζ² v² + 2ζN v` from terminating three-term
//! recurrences.

mod poly;
mod series;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use poly::{LambdaPolynomial, ROOT_IMAG_TOL};
pub use series::{eigenfunction_series, Frame};

use crate::error::{Error, Result};
use crate::model::{Coeff, CoefficientSet, ComplexFunction, TimeFunction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub zeta: f64,
    pub beta: f64,
    #[serde(rename = "N")]
    pub n: f64,
}

impl ModelParams {
    pub fn new(zeta: f64, beta: f64, n: f64) -> Self {
        Self { zeta, beta, n }
    }

    /// Level parameter `N = n̂ + (n̂−1)β` at which the series for `n̂`
    /// terminates.
    pub fn quantized(n_hat: u32, zeta: f64, beta: f64) -> Self {
        Self::new(zeta, beta, level_parameter(n_hat, beta))
    }

    pub fn gamma(&self) -> f64 {
        (1.0 + self.beta) * self.zeta
    }

    pub fn g(&self) -> f64 {
        self.zeta * self.n
    }

    /// The non-Hermitian Hamiltonian as a coefficient set.
    pub fn hamiltonian(&self) -> CoefficientSet {
        let (z, b) = (self.zeta, self.beta);
        let k = TimeFunction::constant;
        CoefficientSet::zero()
            .with(Coeff::JJ, k(4.0))
            .with(Coeff::UJ, ComplexFunction::imag(k(2.0 * (1.0 - b) * z)))
            .with(Coeff::VV, k(-b * z * z))
            .with(Coeff::V, k(2.0 * z * self.n))
    }

    /// Energy shift between the spectral parameter and the energy, `E = Λ − βζ²`.
    pub fn energy(&self, lambda: f64) -> f64 {
        lambda - self.beta * self.zeta * self.zeta
    }
}

pub fn level_parameter(n_hat: u32, beta: f64) -> f64 {
    n_hat as f64 + (n_hat as f64 - 1.0) * beta
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Cos,
    Sin,
}

impl Sector {
    /// First index of the series (`cos` starts at 0, `sin` at 1).
    pub fn first(self) -> u32 {
        match self {
            Sector::Cos => 0,
            Sector::Sin => 1,
        }
    }

    pub fn min_n_hat(self) -> u32 {
        self.first() + 1
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sector::Cos => "cos",
            Sector::Sin => "sin",
        })
    }
}

impl std::str::FromStr for Sector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cos" => Ok(Sector::Cos),
            "sin" => Ok(Sector::Sin),
            _ => Err(Error::InvalidArgument(format!("unknown sector '{s}' (expected cos or sin)"))),
        }
    }
}

/// Series normalization `c_n = 1 / (ζⁿ (N+β) (1+β)^{n−1} [a]_{n−1})` with
/// `a = (1+N+2β)/(1+β)` and `[a]_{−1} = 1/(a−1)`.
pub fn c_n(n: u32, p: &ModelParams) -> Result<f64> {
    let (z, b, nn) = (p.zeta, p.beta, p.n);
    if z == 0.0 && n >= 1 {
        return Err(Error::ZeroCoupling { n: n as usize });
    }
    if nn + b == 0.0 {
        return Err(Error::DegenerateLevel);
    }
    if 1.0 + b == 0.0 {
        return Err(Error::InvalidArgument("beta = -1 makes c_n undefined".into()));
    }
    let a = (1.0 + nn + 2.0 * b) / (1.0 + b);
    let poch = if n == 0 {
        1.0 / (a - 1.0)
    } else {
        let mut prod = 1.0;
        for j in 0..n - 1 {
            if a + j as f64 == 0.0 {
                return Err(Error::PochhammerPole { a, j: j as usize });
            }
            prod *= a + j as f64;
        }
        prod
    };
    Ok(1.0 / (z.powi(n as i32) * (nn + b) * (1.0 + b).powi(n as i32 - 1) * poch))
}

/// Coupling of the three-term recurrence at step `n`:
/// `ζ² [N + nβ + (n−1)] [N − (n−1)β − n]`.
fn coupling(n: u32, p: &ModelParams) -> f64 {
    let (z, b, nn) = (p.zeta, p.beta, p.n);
    let n = n as f64;
    z * z * (nn + n * b + (n - 1.0)) * (nn - (n - 1.0) * b - n)
}

/// `P_0..=P_{n_max}` (cos) or `Q_0..=Q_{n_max}` with `Q_0 = 0` (sin).
///
/// The cos start is `P_2 = (Λ−4)Λ − 2ζ²(N−1)(N+β)`.
pub fn recurrence_polynomials(sector: Sector, n_max: u32, p: &ModelParams) -> Vec<LambdaPolynomial> {
    let lin = |c: f64| LambdaPolynomial::linear(c);
    let mut out = match sector {
        Sector::Cos => {
            let p1 = lin(0.0);
            let tail = -2.0 * p.zeta * p.zeta * (p.n - 1.0) * (p.n + p.beta);
            let p2 = &(&lin(4.0) * &p1) + &LambdaPolynomial::constant(tail);
            vec![LambdaPolynomial::constant(1.0), p1, p2]
        }
        Sector::Sin => vec![LambdaPolynomial::zero(), LambdaPolynomial::constant(1.0), lin(4.0)],
    };
    for n in 2..n_max {
        let nf = n as f64;
        let next = &(&lin(4.0 * nf * nf) * &out[n as usize]) - &out[n as usize - 1].scale(coupling(n, p));
        out.push(next);
    }
    out.truncate(n_max as usize + 1);
    out
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QesSpectrum {
    pub sector: Sector,
    pub n_hat: u32,
    pub zeta: f64,
    pub beta: f64,
    pub lambdas: Vec<f64>,
    pub energies: Vec<f64>,
    /// Per eigenvalue, `c_n P_n(Λ)` (or `c_n Q_n(Λ)`) for the terminating block.
    pub coefficients: Vec<Vec<f64>>,
}

/// Real roots of `P_n̂` (or `Q_n̂`) at `N = n̂ + (n̂−1)β`.
pub fn quantization_eigenvalues(sector: Sector, n_hat: u32, zeta: f64, beta: f64) -> Result<QesSpectrum> {
    if n_hat < sector.min_n_hat() {
        return Err(Error::InvalidArgument(format!("{sector} sector needs n_hat >= {}", sector.min_n_hat())));
    }
    let p = ModelParams::quantized(n_hat, zeta, beta);
    let lambdas: Vec<f64> = if zeta == 0.0 {
        (sector.first()..n_hat).map(|k| 4.0 * (k * k) as f64).collect()
    } else {
        recurrence_polynomials(sector, n_hat, &p)[n_hat as usize].real_roots()?
    };
    let energies = lambdas.iter().map(|&l| p.energy(l)).collect();
    let coefficients = if zeta == 0.0 {
        Vec::new()
    } else {
        lambdas
            .iter()
            .map(|&l| series_coefficients(sector, n_hat, l, &p))
            .collect::<Result<_>>()?
    };
    Ok(QesSpectrum { sector, n_hat, zeta, beta, lambdas, energies, coefficients })
}

/// `c_n P_n(Λ)` for the indices of the terminating block.
pub fn series_coefficients(sector: Sector, n_hat: u32, lambda: f64, p: &ModelParams) -> Result<Vec<f64>> {
    let polys = recurrence_polynomials(sector, n_hat, p);
    (sector.first()..n_hat)
        .map(|n| Ok(c_n(n, p)? * polys[n as usize].eval(lambda)))
        .collect()
}

/// Trigonometric solution of the depressed cubic; phases `2ℓπ/3`.
fn cubic_branch(offset: f64, amplitude: f64, numerator: f64, kappa: f64, scale: f64) -> Result<Vec<f64>> {
    let mut arg = numerator / kappa.powi(3);
    if arg.abs() > 1.0 {
        if arg.abs() > 1.0 + 1e-12 {
            return Err(Error::ArccosDomain(arg));
        }
        arg = arg.signum();
    }
    let theta = arg.acos() / 3.0;
    let mut out: Vec<f64> = [0.0, 1.0, -1.0]
        .iter()
        .map(|l| scale * (offset + amplitude * kappa * (2.0 * l * std::f64::consts::PI / 3.0 - theta).cos()))
        .collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Closed-form eigenvalues for the low levels, ascending.
pub fn closed_form_eigenvalues(sector: Sector, n_hat: u32, gamma: f64) -> Result<Vec<f64>> {
    let g2 = gamma * gamma;
    match (sector, n_hat) {
        (Sector::Cos, 1) => Ok(vec![0.0]),
        (Sector::Cos, 2) => {
            let r = 2.0 * (1.0 + g2).sqrt();
            Ok(vec![2.0 - r, 2.0 + r])
        }
        (Sector::Cos, 3) => cubic_branch(5.0, 2.0, 35.0 - 18.0 * g2, (13.0 + 3.0 * g2).sqrt(), 4.0 / 3.0),
        (Sector::Sin, 2) => Ok(vec![4.0]),
        (Sector::Sin, 3) => {
            let r = 2.0 * (9.0 + g2).sqrt();
            Ok(vec![10.0 - r, 10.0 + r])
        }
        (Sector::Sin, 4) => cubic_branch(7.0, 1.0, 143.0 - 18.0 * g2, (49.0 + 3.0 * g2).sqrt(), 8.0 / 3.0),
        _ => Err(Error::InvalidArgument(format!("no closed form for {sector} n_hat = {n_hat}"))),
    }
}

/// `R_1 = Λ − 4n̂²`, `R_2 = 16n̂²(n̂+1)² + Λ[Λ − 4 − 8n̂(n̂+1)] + 2n̂γ²`.
pub fn r_polynomial(ell: u32, n_hat: u32, gamma: f64) -> Result<LambdaPolynomial> {
    let n = n_hat as f64;
    match ell {
        1 => Ok(LambdaPolynomial::linear(4.0 * n * n)),
        2 => Ok(LambdaPolynomial::new(vec![
            16.0 * n * n * (n + 1.0) * (n + 1.0) + 2.0 * n * gamma * gamma,
            -4.0 - 8.0 * n * (n + 1.0),
            1.0,
        ])),
        _ => Err(Error::InvalidArgument(format!("R_{ell} is only known for ell in {{1, 2}}"))),
    }
}

/// Normalized max-coefficient defect of `P_{n̂+ℓ} − P_n̂ R_ℓ`.
pub fn factorization_residual(sector: Sector, n_hat: u32, ell: u32, p: &ModelParams) -> Result<f64> {
    if n_hat < sector.min_n_hat() {
        return Err(Error::InvalidArgument(format!("{sector} sector needs n_hat >= {}", sector.min_n_hat())));
    }
    let want_n = level_parameter(n_hat, p.beta);
    if (p.n - want_n).abs() > 1e-12 * (1.0 + want_n.abs()) {
        return Err(Error::Precondition(format!("N = {} but n_hat = {n_hat} needs N = {want_n}", p.n)));
    }
    let polys = recurrence_polynomials(sector, n_hat + ell, p);
    let high = &polys[(n_hat + ell) as usize];
    let prod = &polys[n_hat as usize] * &r_polynomial(ell, n_hat, p.gamma())?;
    Ok((high - &prod).max_abs_coeff() / high.max_abs_coeff().max(prod.max_abs_coeff()))
}
