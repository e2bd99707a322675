use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::algebra::C64;
use crate::error::{Error, Result};
use crate::model::{Coeff, CoefficientValues};

pub const DEFAULT_NODES: usize = 2048;

/// Equal-weight periodic trapezoid rule on `[θ₀, θ₀ + 2π)`.
#[derive(Clone)]
pub struct QuadratureGrid {
    theta0: f64,
    nodes: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for QuadratureGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuadratureGrid").field("theta0", &self.theta0).field("nodes", &self.nodes).finish()
    }
}

impl QuadratureGrid {
    pub fn new(theta0: f64, nodes: usize) -> Result<Self> {
        if nodes < 4 || !theta0.is_finite() {
            return Err(Error::InvalidArgument(format!("quadrature needs >= 4 nodes and a finite offset, got {nodes}")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            theta0,
            nodes,
            forward: planner.plan_fft_forward(nodes),
            inverse: planner.plan_fft_inverse(nodes),
        })
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn len(&self) -> usize {
        self.nodes
    }

    pub fn is_empty(&self) -> bool {
        self.nodes == 0
    }

    pub fn weight(&self) -> f64 {
        2.0 * PI / self.nodes as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.nodes).map(|k| self.theta0 + self.weight() * k as f64).collect()
    }

    /// `∫ f dθ` from samples on the nodes.
    pub fn integrate(&self, f: &[C64]) -> C64 {
        f.iter().sum::<C64>() * self.weight()
    }

    /// `⟨f|g⟩ = ∫ f̄ g dθ`.
    pub fn inner(&self, f: &[C64], g: &[C64]) -> C64 {
        f.iter().zip(g).map(|(a, b)| a.conj() * b).sum::<C64>() * self.weight()
    }

    pub fn norm(&self, f: &[C64]) -> f64 {
        self.inner(f, f).re.sqrt()
    }

    /// Integer frequency of FFT bin `k`; the Nyquist bin is mapped to 0.
    fn frequency(&self, k: usize) -> f64 {
        let n = self.nodes;
        if 2 * k < n {
            k as f64
        } else if 2 * k == n {
            0.0
        } else {
            k as f64 - n as f64
        }
    }

    /// `J^p f = (−i∂_θ)^p f` by spectral differentiation.
    pub fn apply_j_power(&self, f: &[C64], power: u32) -> Vec<C64> {
        let mut buf = f.to_vec();
        self.forward.process(&mut buf);
        let scale = 1.0 / self.nodes as f64;
        for (k, c) in buf.iter_mut().enumerate() {
            *c *= self.frequency(k).powi(power as i32) * scale;
        }
        self.inverse.process(&mut buf);
        buf
    }

    /// Applies the algebra element with the given coefficients to a sampled
    /// function, with `u = sin θ`, `v = cos θ` and `J = −i∂_θ`.
    pub fn apply(&self, h: &CoefficientValues, f: &[C64]) -> Vec<C64> {
        let jf = self.apply_j_power(f, 1);
        let jjf = self.apply_j_power(f, 2);
        self.nodes()
            .iter()
            .enumerate()
            .map(|(k, &th)| {
                let (u, v) = th.sin_cos();
                let c = |x: Coeff| h.get(x);
                c(Coeff::J) * jf[k]
                    + c(Coeff::JJ) * jjf[k]
                    + (c(Coeff::U) * u + c(Coeff::V) * v) * f[k]
                    + (c(Coeff::UJ) * u + c(Coeff::VJ) * v) * jf[k]
                    + (c(Coeff::UU) * u * u + c(Coeff::VV) * v * v + c(Coeff::UV) * u * v) * f[k]
            })
            .collect()
    }
}
