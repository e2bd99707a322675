//! Lewis–Riesenfeld invariants of the QES model in both pictures.
//!
//! With `λ(t)` free, the Hermitian counterpart is
//! `ĥ = 4J² − λ̇J + ζ(2N+β−1)(cos λ v − sin λ u) + γ²/4 (cos λ u + sin λ v)² − βζ²C`
//! and its invariant `I_ĥ = ĥ + λ̇J + (βζ² + ν_vv) C` is the conjugate of
//! `I_Ĥ = Ĥ + (βζ² + ν_vv) C` by the metric `η(t)`.

use crate::algebra::{
    build_generators, commutator, interior_norm, interior_vector_norm, OperatorMatrix, C64, DEFAULT_PAD, I,
};
use crate::dyson::{eta_pair, guarded, DysonParams};
use crate::error::{Error, Result};
use crate::model::{realize, Coeff, CoefficientSet, PtClass, TimeFunction};
use crate::qes::{eigenfunction_series, Frame, ModelParams, Sector};

#[derive(Debug, Clone)]
pub struct InvariantSpec {
    pub model: ModelParams,
    pub nu_vv: f64,
    /// `λ(t)`; present for the Hermitian picture only.
    pub lambda: Option<TimeFunction>,
}

impl InvariantSpec {
    pub fn non_hermitian(model: ModelParams, nu_vv: f64) -> Self {
        Self { model, nu_vv, lambda: None }
    }

    pub fn hermitian(model: ModelParams, nu_vv: f64, lambda: TimeFunction) -> Self {
        Self { model, nu_vv, lambda: Some(lambda) }
    }

    fn shift(&self) -> f64 {
        let z = self.model.zeta;
        self.model.beta * z * z + self.nu_vv
    }

    fn lambda(&self) -> Result<&TimeFunction> {
        self.lambda
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("the Hermitian-picture invariant needs lambda(t)".into()))
    }

    fn static_only(&self) -> Result<()> {
        match self.lambda {
            None => Ok(()),
            Some(_) => Err(Error::InvalidArgument("expected a non-Hermitian-picture spec (no lambda)".into())),
        }
    }
}

/// Metric parameters `τ = a sec λ`, `ρ = −a tan λ` with `a = m_uJ/(2m_JJ) = (1−β)ζ/4`.
pub fn metric_params(p: &ModelParams, lambda: &TimeFunction) -> DysonParams {
    let a = (1.0 - p.beta) * p.zeta / 4.0;
    DysonParams::new(PtClass::PT2, lambda.sec() * a, lambda.clone(), -(lambda.tan() * a))
}

/// Coefficients of the Hermitian counterpart `ĥ(t)`.
pub fn hhat_coefficients(p: &ModelParams, lambda: &TimeFunction) -> CoefficientSet {
    let (z, b) = (p.zeta, p.beta);
    let g2 = p.gamma() * p.gamma() / 4.0;
    let bz2 = b * z * z;
    let lin = z * (2.0 * p.n + b - 1.0);
    let (s, c) = (lambda.sin(), lambda.cos());
    CoefficientSet::zero()
        .with(Coeff::JJ, TimeFunction::constant(4.0))
        .with(Coeff::J, -lambda.derivative())
        .with(Coeff::U, -(&s * lin))
        .with(Coeff::V, &c * lin)
        .with(Coeff::UU, c.square() * g2 - bz2)
        .with(Coeff::VV, s.square() * g2 - bz2)
        .with(Coeff::UV, &s * &c * (2.0 * g2))
}

/// `I_ĥ` as coefficient functions.
pub fn invariant_h_coefficients(spec: &InvariantSpec) -> Result<CoefficientSet> {
    let lambda = spec.lambda()?;
    let h = hhat_coefficients(&spec.model, lambda);
    let shift = spec.shift();
    let add = |f: &TimeFunction, x: f64| f + x;
    Ok(h.clone()
        .with(Coeff::J, TimeFunction::zero())
        .with(Coeff::UU, add(&h.get(Coeff::UU).re, shift))
        .with(Coeff::VV, add(&h.get(Coeff::VV).re, shift)))
}

/// `I_Ĥ = Ĥ + (βζ² + ν_vv) C`.
#[allow(non_snake_case)]
pub fn invariant_H(spec: &InvariantSpec, m: usize) -> Result<OperatorMatrix> {
    spec.static_only()?;
    let g = build_generators(m.max(4))?;
    let h = realize(&spec.model.hamiltonian(), 0.0, m.max(4))?;
    Ok(&h + &g.casimir().scale(C64::from(spec.shift())))
}

/// `I_ĥ(t) = ĥ(t) + λ̇(t) J + (βζ² + ν_vv) C`.
pub fn invariant_h(spec: &InvariantSpec, t: f64, m: usize) -> Result<OperatorMatrix> {
    realize(&invariant_h_coefficients(spec)?, t, m.max(4))
}

/// `‖[I_Ĥ, Ĥ]‖` on the interior window.
pub fn static_commutator_residual(spec: &InvariantSpec, m: usize) -> Result<f64> {
    let inv = invariant_H(spec, m)?;
    let h = realize(&spec.model.hamiltonian(), 0.0, m)?;
    interior_norm(&commutator(&inv, &h)?, DEFAULT_PAD)
}

/// `‖∂_t I_ĥ − i[I_ĥ, ĥ]‖` with the analytic time derivative.
pub fn lr_residual(spec: &InvariantSpec, t: f64, m: usize) -> Result<f64> {
    let inv = invariant_h_coefficients(spec)?;
    let d_inv = realize(&inv.derivative(), t, m)?;
    lr_defect(spec, &d_inv, t, m)
}

/// As [`lr_residual`], with `∂_t I_ĥ` by central differences.
pub fn lr_residual_fd(spec: &InvariantSpec, t: f64, m: usize, step: f64) -> Result<f64> {
    let plus = invariant_h(spec, t + step, m)?;
    let minus = invariant_h(spec, t - step, m)?;
    let d_inv = (&plus - &minus).scale(C64::from(0.5 / step));
    lr_defect(spec, &d_inv, t, m)
}

fn lr_defect(spec: &InvariantSpec, d_inv: &OperatorMatrix, t: f64, m: usize) -> Result<f64> {
    let inv = invariant_h(spec, t, m)?;
    let h = realize(&hhat_coefficients(&spec.model, spec.lambda()?), t, m)?;
    let rhs = commutator(&inv, &h)?.scale(I);
    interior_norm(&(d_inv - &rhs), DEFAULT_PAD)
}

/// `‖η I_Ĥ η⁻¹ − I_ĥ‖` on the interior window of order `m`.
pub fn similarity_residual(spec: &InvariantSpec, t: f64, m: usize) -> Result<f64> {
    let lambda = spec.lambda()?;
    let (g, pad) = guarded(m)?;
    let (eta, inv) = eta_pair(&metric_params(&spec.model, lambda).slots_at(t), &g);
    let static_spec = InvariantSpec::non_hermitian(spec.model, spec.nu_vv);
    let big = invariant_H(&static_spec, g.basis().order())?;
    let conj = &(&eta * &big) * &inv;
    let closed = invariant_h_coefficients(spec)?.values_at(t).realize_with(&g);
    interior_norm(&(&conj - &closed), pad)
}

/// `‖(I_Ĥ − Λ)ψ̃‖ / ‖ψ̃‖` on the interior modes for the terminating series
/// at the quantization root `lambda` (parameters must satisfy the level condition).
pub fn eigen_residual(sector: Sector, n_hat: u32, lambda: f64, p: &ModelParams, m: usize) -> Result<f64> {
    let psi = eigenfunction_series(sector, n_hat, lambda, p, Frame::NonHermitian, m)?;
    let inv = invariant_H(&InvariantSpec::non_hermitian(*p, 0.0), m)?;
    let r: Vec<C64> = inv.apply(&psi).iter().zip(&psi).map(|(a, b)| a - b * lambda).collect();
    let basis = inv.basis();
    Ok(interior_vector_norm(basis, &r, DEFAULT_PAD)? / interior_vector_norm(basis, &psi, DEFAULT_PAD)?)
}

/// Lowest `count` eigenvalues of `I_ĥ(t)`.
pub fn invariant_spectrum(spec: &InvariantSpec, t: f64, m: usize, count: usize) -> Result<Vec<f64>> {
    let mut ev = invariant_h(spec, t, m)?.hermitian_eigenvalues();
    ev.truncate(count);
    Ok(ev)
}

/// Lewis–Riesenfeld phase `α(t) = −E t`.
pub fn lr_phase(energy: f64, t: f64) -> f64 {
    -energy * t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyson::{solve_dyson, FreeParams};
    use crate::model::is_hermitian;

    fn model() -> ModelParams {
        ModelParams::new(0.5, 0.3, 2.3)
    }

    #[test]
    fn static_invariant() {
        let spec = InvariantSpec::non_hermitian(model(), 0.0);
        assert!(static_commutator_residual(&spec, 32).unwrap() <= 1e-10);
        let flat = InvariantSpec::non_hermitian(ModelParams::new(0.5, 0.0, 2.0), 0.0);
        let h = realize(&flat.model.hamiltonian(), 0.0, 16).unwrap();
        assert_eq!(invariant_H(&flat, 16).unwrap().data(), h.data());
        assert!(invariant_H(&InvariantSpec::hermitian(model(), 0.0, TimeFunction::t()), 8).is_err());
    }

    #[test]
    fn hermitian_partner_matches_the_dyson_solver() {
        let lam = TimeFunction::t().sin() * 0.8;
        let h = hhat_coefficients(&model(), &lam);
        let sol = solve_dyson(PtClass::PT2, &model().hamiltonian(), &FreeParams::new().lambda(lam)).unwrap();
        for &t in &[0.0, 0.4, 1.9] {
            let d = realize(&h, t, 16).unwrap().data() - realize(&sol.h_coeffs, t, 16).unwrap().data();
            // the two differ by a multiple of the Casimir only through rounding
            assert!(d.norm() < 1e-12, "{}", d.norm());
            assert!(is_hermitian(&h, t, 16).unwrap());
        }
    }

    #[test]
    fn hermitian_invariant() {
        for lam in [TimeFunction::t() * 0.3, TimeFunction::t().sin()] {
            let spec = InvariantSpec::hermitian(model(), 0.0, lam);
            for &t in &[0.0, 0.7, 1.3] {
                assert!(lr_residual(&spec, t, 32).unwrap() <= 1e-8);
                assert!(lr_residual_fd(&spec, t, 32, 1e-5).unwrap() <= 1e-5);
                assert!(similarity_residual(&spec, t, 32).unwrap() <= 1e-8);
            }
            let a = invariant_spectrum(&spec, 0.0, 32, 6).unwrap();
            let b = invariant_spectrum(&spec, 1.3, 32, 6).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn constant_lambda_gives_static_invariant() {
        let spec = InvariantSpec::hermitian(model(), 0.0, TimeFunction::constant(0.4));
        let a = invariant_h(&spec, 0.0, 12).unwrap();
        let b = invariant_h(&spec, 2.0, 12).unwrap();
        assert_eq!(a.data(), b.data());
    }

    #[test]
    fn series_states_are_eigenvectors() {
        use crate::qes::quantization_eigenvalues;
        for (sector, n_hat) in [(Sector::Cos, 1), (Sector::Cos, 3), (Sector::Sin, 2), (Sector::Sin, 4)] {
            let spec = quantization_eigenvalues(sector, n_hat, 0.5, 0.3).unwrap();
            let p = ModelParams::quantized(n_hat, 0.5, 0.3);
            for &l in &spec.lambdas {
                let r = eigen_residual(sector, n_hat, l, &p, 64).unwrap();
                assert!(r <= 1e-8, "{sector} {n_hat} {l}: {r}");
            }
        }
    }

    #[test]
    fn phase() {
        assert_eq!(lr_phase(0.0, 3.0), 0.0);
        let (z, b) = (0.5, 0.3);
        assert_eq!(lr_phase(4.0 - b * z * z, 1.0), -(4.0 - b * z * z));
    }
}
