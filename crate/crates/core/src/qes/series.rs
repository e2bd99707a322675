use super::{recurrence_polynomials, series_coefficients, ModelParams, Sector};
use crate::algebra::{FourierBasis, C64};
use crate::error::{Error, Result};
use crate::observables::bessel_i;

const ROOT_TOL: f64 = 1e-8;
const TAIL_TOL: f64 = 1e-12;

/// Which picture the eigenfunction belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frame {
    /// `ψ̃ = e^{−ζ cos θ/2} Σ c_n P_n(Λ) cos nθ`.
    NonHermitian,
    /// `φ̃ = e^{−γ cos(θ+λ)/4} Σ c_n P_n(Λ) cos n(θ+λ)` at the given `λ`.
    Hermitian { shift: f64 },
}

/// Mode coefficients on the basis of order `m` of the terminating series at
/// the quantization root `lambda`.
///
/// The exponential prefactor is expanded with `e^{z cos θ} = Σ_k I_k(z) e^{ikθ}`,
/// so the result is exact up to the modes dropped beyond `m`.
pub fn eigenfunction_series(
    sector: Sector,
    n_hat: u32,
    lambda: f64,
    p: &ModelParams,
    frame: Frame,
    m: usize,
) -> Result<Vec<C64>> {
    let basis = FourierBasis::new(m)?;
    if n_hat < sector.min_n_hat() {
        return Err(Error::InvalidArgument(format!("{sector} sector needs n_hat >= {}", sector.min_n_hat())));
    }
    let top = &recurrence_polynomials(sector, n_hat, p)[n_hat as usize];
    let residual = top.eval(lambda).abs();
    if !(residual <= ROOT_TOL * top.magnitude_at(lambda)) {
        return Err(Error::NotARoot { lambda, residual });
    }
    let coeffs = series_coefficients(sector, n_hat, lambda, p)?;

    let (z, shift) = match frame {
        Frame::NonHermitian => (-0.5 * p.zeta, 0.0),
        Frame::Hermitian { shift } => (-0.25 * p.gamma(), shift),
    };
    let reach = n_hat as usize;
    let bessel: Vec<f64> = (0..=m + reach).map(|k| bessel_i(k as u32, z)).collect::<Result<_>>()?;
    let total: f64 = bessel[0].abs() + 2.0 * bessel[1..].iter().map(|b| b.abs()).sum::<f64>();
    let tail: f64 = 2.0 * bessel[(m + 1).saturating_sub(reach)..].iter().map(|b| b.abs()).sum::<f64>();
    if tail > TAIL_TOL * total {
        return Err(Error::PrefactorTail(tail / total));
    }
    let phase = |k: i64| C64::from_polar(1.0, k as f64 * shift);
    let prefactor = |k: i64| bessel[k.unsigned_abs() as usize] * phase(k);

    // series modes s_j, |j| ≤ n̂
    let mut s = vec![C64::new(0.0, 0.0); 2 * reach + 1];
    for (i, &c) in coeffs.iter().enumerate() {
        let n = (sector.first() as usize + i) as i64;
        let (plus, minus) = match sector {
            Sector::Cos if n == 0 => (C64::from(c), C64::new(0.0, 0.0)),
            Sector::Cos => (C64::from(0.5 * c), C64::from(0.5 * c)),
            Sector::Sin => (C64::new(0.0, -0.5 * c), C64::new(0.0, 0.5 * c)),
        };
        s[(reach as i64 + n) as usize] += plus * phase(n);
        if n != 0 {
            s[(reach as i64 - n) as usize] += minus * phase(-n);
        }
    }

    Ok(basis
        .modes()
        .map(|k| {
            (-(reach as i64)..=reach as i64)
                .map(|j| prefactor(k - j) * s[(reach as i64 + j) as usize])
                .sum()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qes::quantization_eigenvalues;

    fn sample(x: &[C64], m: usize, theta: f64) -> C64 {
        x.iter()
            .enumerate()
            .map(|(i, c)| c * C64::from_polar(1.0, (i as f64 - m as f64) * theta))
            .sum()
    }

    #[test]
    fn ground_state_is_the_prefactor() {
        let p = ModelParams::quantized(1, 0.6, 0.3);
        let psi = eigenfunction_series(Sector::Cos, 1, 0.0, &p, Frame::NonHermitian, 24).unwrap();
        for &th in &[0.0, 0.9, 2.5] {
            let want = (-0.3 * f64::cos(th)).exp();
            assert!((sample(&psi, 24, th) - want).norm() < 1e-14);
        }
    }

    #[test]
    fn shifted_frame_matches_pointwise_formula() {
        let p = ModelParams::quantized(3, 0.5, 0.3);
        let spec = quantization_eigenvalues(Sector::Sin, 3, 0.5, 0.3).unwrap();
        let shift = 0.7;
        for (l, c) in spec.lambdas.iter().zip(&spec.coefficients) {
            let phi = eigenfunction_series(Sector::Sin, 3, *l, &p, Frame::Hermitian { shift }, 24).unwrap();
            for &th in &[0.1, 1.4, 4.0] {
                let x = th + shift;
                let series: f64 = c.iter().enumerate().map(|(i, cn)| cn * ((i + 1) as f64 * x).sin()).sum();
                let want = (-0.25 * p.gamma() * x.cos()).exp() * series;
                assert!((sample(&phi, 24, th) - want).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn rejects_non_roots_and_short_truncations() {
        let p = ModelParams::quantized(2, 0.5, 0.3);
        assert!(matches!(
            eigenfunction_series(Sector::Cos, 2, 1.0, &p, Frame::NonHermitian, 16),
            Err(Error::NotARoot { .. })
        ));
        let p = ModelParams::quantized(1, 60.0, 0.3);
        assert!(matches!(
            eigenfunction_series(Sector::Cos, 1, 0.0, &p, Frame::NonHermitian, 8),
            Err(Error::PrefactorTail(_))
        ));
    }
}
