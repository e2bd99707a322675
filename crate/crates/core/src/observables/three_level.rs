use std::f64::consts::PI;

use serde::Serialize;

use super::{bessel_i, QuadratureGrid};
use crate::algebra::C64;
use crate::error::{Error, Result};
use crate::model::TimeFunction;
use crate::qes::{quantization_eigenvalues, ModelParams, Sector};

const NORM_TOL: f64 = 1e-8;
const ENERGY_TOL: f64 = 1e-12;

/// `(E₋, E₊, E₀)` evaluated as printed.
pub fn closed_form_energies(zeta: f64, beta: f64) -> (f64, f64, f64) {
    let gamma = (1.0 + beta) * zeta;
    let root = 2.0 * (1.0 + gamma * gamma).sqrt();
    let base = 2.0 - beta * zeta * zeta;
    (base - root, base + root, 4.0 - beta * zeta * zeta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Plus,
    Minus,
    Zero,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Plus, Level::Minus, Level::Zero];

    pub fn name(self) -> &'static str {
        match self {
            Level::Plus => "plus",
            Level::Minus => "minus",
            Level::Zero => "zero",
        }
    }
}

/// The `n̂ = 2` block in the Hermitian picture: two cosine states and one
/// sine state with closed-form normalizations.
#[derive(Debug, Clone)]
pub struct ThreeLevelSystem {
    pub model: ModelParams,
    pub lambda: TimeFunction,
    pub e_plus: f64,
    pub e_minus: f64,
    pub e_zero: f64,
    pub n_plus: f64,
    pub n_minus: f64,
    pub n_zero: f64,
    pub m_plus: f64,
    pub m_minus: f64,
    /// `I₂(γ/2)`, the numerator of the sine-state expectations.
    i2: f64,
}

impl ThreeLevelSystem {
    /// Energies are the closed forms `E₀ = 4 − βζ²`, `E± = 2 − βζ² ± 2√(1+γ²)`,
    /// checked against the quantization roots; the `+` state pairs with the
    /// larger cosine root.
    pub fn new(zeta: f64, beta: f64, lambda: TimeFunction) -> Result<Self> {
        let model = ModelParams::quantized(2, zeta, beta);
        let gamma = model.gamma();
        if !(gamma > 0.0) {
            return Err(Error::NonPositiveGamma(gamma));
        }
        let (e_minus, e_plus, e_zero) = closed_form_energies(zeta, beta);
        let cos = quantization_eigenvalues(Sector::Cos, 2, zeta, beta)?;
        let sin = quantization_eigenvalues(Sector::Sin, 2, zeta, beta)?;
        let roots: Vec<f64> = cos.energies.iter().chain(&sin.energies).copied().collect();
        let scale = 4.0 * (1.0 + gamma * gamma).sqrt() + 4.0;
        let agree = roots.len() == 3
            && roots.iter().zip([e_minus, e_plus, e_zero]).all(|(r, e)| (r - e).abs() <= ENERGY_TOL * scale);
        if !agree {
            return Err(Error::InvalidArgument(format!(
                "quantization roots {roots:?} disagree with the closed-form energies"
            )));
        }

        let s = (1.0 + gamma * gamma).sqrt();
        let z = gamma / 2.0;
        let (i0, i1, i2) = (bessel_i(0, z)?, bessel_i(1, z)?, bessel_i(2, z)?);
        let g2 = gamma * gamma;
        let norm = |pm: f64| gamma * (1.0 + g2 + pm * s) * i0 - (2.0 + 2.0 * g2 + pm * (2.0 + g2) * s) * i1;
        let abbr = |pm: f64| gamma * (1.0 - g2 + pm * s) * i1 + (2.0 + 2.0 * g2 + pm * (2.0 + g2) * s) * i2;
        Ok(Self {
            model,
            lambda,
            e_plus,
            e_minus,
            e_zero,
            n_plus: norm(1.0),
            n_minus: norm(-1.0),
            n_zero: i1,
            m_plus: abbr(1.0),
            m_minus: abbr(-1.0),
            i2,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.model.gamma()
    }

    pub fn energy(&self, level: Level) -> f64 {
        match level {
            Level::Plus => self.e_plus,
            Level::Minus => self.e_minus,
            Level::Zero => self.e_zero,
        }
    }

    fn normalization(&self, level: Level) -> f64 {
        match level {
            Level::Plus => self.n_plus,
            Level::Minus => self.n_minus,
            Level::Zero => self.n_zero,
        }
    }

    /// `φ̃` without the `e^{−iEt}` phase, sampled on `grid` at time `t`.
    pub fn stationary(&self, level: Level, t: f64, grid: &QuadratureGrid) -> Vec<C64> {
        let gamma = self.gamma();
        let lam = self.lambda.eval(t);
        let s = (1.0 + gamma * gamma).sqrt();
        let pre = gamma.sqrt() / (2.0 * (PI * self.normalization(level)).sqrt());
        grid.nodes()
            .iter()
            .map(|&th| {
                let x = th + lam;
                let shape = match level {
                    Level::Plus => gamma + (1.0 + s) * x.cos(),
                    Level::Minus => gamma + (1.0 - s) * x.cos(),
                    Level::Zero => x.sin(),
                };
                C64::from(pre * (-gamma * x.cos() / 4.0).exp() * shape)
            })
            .collect()
    }

    /// `φ = e^{−iEt} φ̃` sampled on `grid`.
    pub fn wavefunction(&self, level: Level, t: f64, grid: &QuadratureGrid) -> Vec<C64> {
        let phase = C64::from_polar(1.0, -self.energy(level) * t);
        self.stationary(level, t, grid).into_iter().map(|x| x * phase).collect()
    }

    /// `(φ₊, φ₋, φ₀)`.
    pub fn wavefunctions(&self, t: f64, grid: &QuadratureGrid) -> [Vec<C64>; 3] {
        Level::ALL.map(|l| self.wavefunction(l, t, grid))
    }

    /// Closed-form `(⟨u⟩, ⟨v⟩, ⟨J⟩)` at time `t`.
    pub fn closed_form_expectations(&self, level: Level, t: f64) -> [f64; 3] {
        let (sin, cos) = self.lambda.eval(t).sin_cos();
        let r = match level {
            Level::Plus => self.m_plus / self.n_plus,
            Level::Minus => self.m_minus / self.n_minus,
            Level::Zero => -self.i2 / self.n_zero,
        };
        [-r * sin, r * cos, 0.0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    U,
    V,
    J,
}

/// `⟨φ|op|φ⟩` by quadrature; `J` is applied spectrally.
pub fn expectation(op: Observable, state: &[C64], grid: &QuadratureGrid) -> Result<f64> {
    if state.len() != grid.len() {
        return Err(Error::InvalidArgument(format!("{} samples on a {}-node grid", state.len(), grid.len())));
    }
    let norm = grid.inner(state, state).re;
    if !((norm - 1.0).abs() <= NORM_TOL) {
        return Err(Error::Unnormalized(norm.sqrt()));
    }
    let acted: Vec<C64> = match op {
        Observable::J => grid.apply_j_power(state, 1),
        Observable::U | Observable::V => grid
            .nodes()
            .iter()
            .zip(state)
            .map(|(&th, &f)| f * if op == Observable::U { th.sin() } else { th.cos() })
            .collect(),
    };
    Ok(grid.inner(state, &acted).re)
}

/// Relative TDSE defect `‖i∂_tφ − h(t)φ‖ / ‖φ‖`, with `∂_t` by central
/// differences of step `dt`.
pub fn tdse_residual<F>(
    state: F,
    h: &crate::model::CoefficientSet,
    t: f64,
    grid: &QuadratureGrid,
    dt: f64,
) -> Result<f64>
where
    F: Fn(f64) -> Vec<C64>,
{
    if !(1e-7..=1e-3).contains(&dt) {
        return Err(Error::InvalidArgument(format!("time step {dt} outside [1e-7, 1e-3]")));
    }
    let now = state(t);
    let (plus, minus) = (state(t + dt), state(t - dt));
    let h_phi = grid.apply(&h.values_at(t), &now);
    let defect: Vec<C64> = plus
        .iter()
        .zip(&minus)
        .zip(&h_phi)
        .map(|((p, m), hp)| C64::new(0.0, 1.0) * (p - m) / (2.0 * dt) - hp)
        .collect();
    Ok(grid.norm(&defect) / grid.norm(&now))
}
