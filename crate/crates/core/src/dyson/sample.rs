use rand::Rng;

use super::FreeParams;
use crate::model::{Coeff, CoefficientSet, ComplexFunction, PtClass, TimeFunction};

fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

/// `c₀ + c₁ sin(ωt + φ)` with `|c₀| ≤ mean`, `|c₁| ≤ swing`.
fn wave<R: Rng + ?Sized>(rng: &mut R, mean: f64, swing: f64) -> TimeFunction {
    let c0 = uniform(rng, -mean, mean);
    let c1 = uniform(rng, -swing, swing);
    let w = uniform(rng, 0.3, 1.7);
    let phi = uniform(rng, 0.0, std::f64::consts::TAU);
    (TimeFunction::t() * w + phi).sin() * c1 + c0
}

/// Free `λ(t)` with `|λ| ≤ 0.8`, away from the poles of `sec λ`.
fn free_lambda<R: Rng + ?Sized>(rng: &mut R) -> TimeFunction {
    wave(rng, 0.4, 0.4)
}

/// A random coefficient set satisfying the reality pattern, the constraint
/// relations and the time-independence preconditions of `class`, together
/// with the free data it needs.
///
/// For PT1 `λ = −∫ Im μ_J` is kept below about 0.25 on `[0, 2.5]` so that
/// the real exponential `e^{λJ}` stays well conditioned at desk truncations.
pub fn sample_compliant<R: Rng + ?Sized>(class: PtClass, rng: &mut R) -> (CoefficientSet, FreeParams) {
    let jj = TimeFunction::constant(uniform(rng, 1.0, 2.0));
    let two_jj = &jj * 2.0;
    let four_jj = &jj * 4.0;
    let k = TimeFunction::constant;
    let imag = ComplexFunction::imag;
    let cplx = ComplexFunction::new;
    match class {
        PtClass::PT1 => {
            let j = wave(rng, 0.05, 0.05);
            let a = wave(rng, 0.5, 0.2);
            let b = wave(rng, 0.5, 0.2);
            let uu = wave(rng, 0.5, 0.3);
            let th = (-j.integral()).tanh();
            let pu = (&j * &a - a.derivative() * &th) / &two_jj + &b * 0.5;
            let pv = (&j * &b - b.derivative() * &th) / &two_jj - &a * 0.5;
            let set = CoefficientSet::zero()
                .with(Coeff::JJ, jj.clone())
                .with(Coeff::J, imag(j))
                .with(Coeff::U, imag(pu))
                .with(Coeff::V, imag(pv))
                .with(Coeff::VV, &uu + (b.square() - a.square()) / &four_jj)
                .with(Coeff::UV, &a * &b / &two_jj)
                .with(Coeff::UU, uu)
                .with(Coeff::UJ, a)
                .with(Coeff::VJ, b);
            (set, FreeParams::new())
        }
        PtClass::PT2 => {
            let set = CoefficientSet::zero()
                .with(Coeff::JJ, jj.clone())
                .with(Coeff::UJ, imag(k(uniform(rng, -1.0, 1.0))))
                .with(Coeff::VJ, imag(k(uniform(rng, -1.0, 1.0))))
                .with(Coeff::U, wave(rng, 1.0, 0.5))
                .with(Coeff::V, wave(rng, 1.0, 0.5))
                .with(Coeff::UU, wave(rng, 0.5, 0.3))
                .with(Coeff::VV, wave(rng, 0.5, 0.3))
                .with(Coeff::UV, wave(rng, 0.5, 0.3));
            (set, FreeParams::new().lambda(free_lambda(rng)))
        }
        PtClass::PT3 => {
            let a = k(uniform(rng, -1.0, 1.0));
            let b = k(uniform(rng, -1.0, 1.0));
            let mj = wave(rng, 1.0, 0.5);
            let c = wave(rng, 1.0, 0.5);
            let e = wave(rng, 0.5, 0.3);
            let d = &a * 0.5 + &mj * &b / &two_jj;
            let f = &a * &b / &two_jj;
            let set = CoefficientSet::zero()
                .with(Coeff::JJ, jj.clone())
                .with(Coeff::J, mj)
                .with(Coeff::UV, wave(rng, 0.5, 0.3))
                .with(Coeff::U, cplx(c.clone(), d.clone()))
                .with(Coeff::V, cplx(c, -d))
                .with(Coeff::UJ, cplx(a.clone(), b.clone()))
                .with(Coeff::VJ, cplx(a, -b))
                .with(Coeff::UU, cplx(e.clone(), f.clone()))
                .with(Coeff::VV, cplx(e, -f));
            (set, FreeParams::new().lambda(free_lambda(rng)))
        }
        PtClass::PT4 => {
            let a = k(uniform(rng, -1.0, 1.0));
            let b = wave(rng, 1.0, 0.3);
            let mj = wave(rng, 1.0, 0.5);
            let set = CoefficientSet::zero()
                .with(Coeff::JJ, jj.clone())
                .with(Coeff::U, imag(&b * 0.5 + &mj * &a / &two_jj))
                .with(Coeff::UV, imag(&a * &b / &two_jj))
                .with(Coeff::UJ, imag(a))
                .with(Coeff::VJ, b)
                .with(Coeff::J, mj)
                .with(Coeff::V, wave(rng, 1.0, 0.5))
                .with(Coeff::UU, wave(rng, 0.5, 0.3))
                .with(Coeff::VV, wave(rng, 0.5, 0.3));
            (set, FreeParams::new().lambda(free_lambda(rng)))
        }
        PtClass::PT5 => {
            let b = k(uniform(rng, -1.0, 1.0));
            let a = wave(rng, 1.0, 0.3);
            let mj = wave(rng, 1.0, 0.5);
            let set = CoefficientSet::zero()
                .with(Coeff::JJ, jj.clone())
                .with(Coeff::V, imag(-(&a * 0.5) + &mj * &b / &two_jj))
                .with(Coeff::UV, imag(&a * &b / &two_jj))
                .with(Coeff::VJ, imag(b))
                .with(Coeff::UJ, a)
                .with(Coeff::J, mj)
                .with(Coeff::U, wave(rng, 1.0, 0.5))
                .with(Coeff::UU, wave(rng, 0.5, 0.3))
                .with(Coeff::VV, wave(rng, 0.5, 0.3));
            let tau = wave(rng, 0.2, 0.1);
            (set, FreeParams::new().lambda(free_lambda(rng)).tau(tau))
        }
    }
}
