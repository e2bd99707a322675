//! Time-dependent Dyson maps `η = e^{τv} e^{λJ} e^{ρu}` and the Hermitian
//! counterparts `h = η H η⁻¹ + i η̇ η⁻¹` they produce for each PT class.

mod classes;
mod sample;

use serde::Serialize;

use crate::algebra::{build_generators, interior_norm, Generators, OperatorMatrix, C64, DEFAULT_PAD, EXP_GUARD, I, ZERO};
use crate::error::Result;
use crate::model::{Coeff, CoefficientSet, CoefficientValues, PtClass, TimeFunction};

pub use classes::{solve_dyson, ConstraintResidual, DysonSolution, FreeParams, ReadingCheck, SELF_CHECK_ORDER};
pub use sample::sample_compliant;

/// How each real parameter enters its exponent slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhaseConvention {
    pub tau_imaginary: bool,
    pub lambda_imaginary: bool,
}

impl PhaseConvention {
    pub fn for_class(class: PtClass) -> Self {
        match class {
            PtClass::PT1 => Self { tau_imaginary: false, lambda_imaginary: false },
            PtClass::PT2 | PtClass::PT3 | PtClass::PT4 => Self { tau_imaginary: false, lambda_imaginary: true },
            PtClass::PT5 => Self { tau_imaginary: true, lambda_imaginary: true },
        }
    }
}

/// Real map parameters `(τ, λ, ρ)`; the class decides which enter as `i·x`.
#[derive(Debug, Clone)]
pub struct DysonParams {
    pub class: PtClass,
    pub tau: TimeFunction,
    pub lambda: TimeFunction,
    pub rho: TimeFunction,
    pub phase: PhaseConvention,
    dtau: TimeFunction,
    dlambda: TimeFunction,
    drho: TimeFunction,
}

/// Complex slot values of `τ, λ, ρ` and their time derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotValues {
    pub tau: C64,
    pub lambda: C64,
    pub rho: C64,
    pub dtau: C64,
    pub dlambda: C64,
    pub drho: C64,
}

impl SlotValues {
    pub fn constant(tau: C64, lambda: C64, rho: C64) -> Self {
        Self { tau, lambda, rho, dtau: ZERO, dlambda: ZERO, drho: ZERO }
    }
}

impl DysonParams {
    pub fn new(class: PtClass, tau: TimeFunction, lambda: TimeFunction, rho: TimeFunction) -> Self {
        Self {
            class,
            dtau: tau.derivative(),
            dlambda: lambda.derivative(),
            drho: rho.derivative(),
            tau,
            lambda,
            rho,
            phase: PhaseConvention::for_class(class),
        }
    }

    pub fn identity(class: PtClass) -> Self {
        Self::new(class, TimeFunction::zero(), TimeFunction::zero(), TimeFunction::zero())
    }

    pub fn slots_at(&self, t: f64) -> SlotValues {
        let f = |imag: bool| if imag { I } else { C64::new(1.0, 0.0) };
        let (ft, fl) = (f(self.phase.tau_imaginary), f(self.phase.lambda_imaginary));
        SlotValues {
            tau: ft * self.tau.eval(t),
            lambda: fl * self.lambda.eval(t),
            rho: C64::from(self.rho.eval(t)),
            dtau: ft * self.dtau.eval(t),
            dlambda: fl * self.dlambda.eval(t),
            drho: C64::from(self.drho.eval(t)),
        }
    }
}

/// `(η, η⁻¹)` on the basis of `g`, the inverse assembled factor by factor.
pub fn eta_pair(s: &SlotValues, g: &Generators) -> (OperatorMatrix, OperatorMatrix) {
    let basis = g.basis();
    let ev = |x: C64| g.v.scale(x).exp();
    let eu = |x: C64| g.u.scale(x).exp();
    let ej = |x: C64| OperatorMatrix::diagonal(basis, |n| (x * n as f64).exp());
    let eta = &(&ev(s.tau) * &ej(s.lambda)) * &eu(s.rho);
    let inv = &(&eu(-s.rho) * &ej(-s.lambda)) * &ev(-s.tau);
    (eta, inv)
}

/// `η(t) = e^{τv} e^{λJ} e^{ρu}` on the truncation of order `m`.
pub fn eta_matrix(p: &DysonParams, t: f64, m: usize) -> Result<OperatorMatrix> {
    let g = build_generators(m.max(4))?;
    Ok(eta_pair(&p.slots_at(t), &g).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    J,
    U,
    V,
}

/// Coefficients `(c_J, c_u, c_v)` of `η g η⁻¹`.
pub fn adjoint_slots(gen: Generator, s: &SlotValues) -> [C64; 3] {
    let (ch, sh) = (s.lambda.cosh(), s.lambda.sinh());
    match gen {
        Generator::J => [C64::new(1.0, 0.0), -(I * s.tau + s.rho * sh), I * s.rho * ch],
        Generator::U => [ZERO, ch, -I * sh],
        Generator::V => [ZERO, I * sh, ch],
    }
}

pub fn adjoint_closed_form(gen: Generator, p: &DysonParams, t: f64) -> [C64; 3] {
    adjoint_slots(gen, &p.slots_at(t))
}

/// `i η̇ η⁻¹` as `(c_J, c_u, c_v)`.
pub fn gauge_slots(s: &SlotValues) -> [C64; 3] {
    let (ch, sh) = (s.lambda.cosh(), s.lambda.sinh());
    [I * s.dlambda, I * s.drho * ch + s.tau * s.dlambda, s.drho * sh + I * s.dtau]
}

/// `i η⁻¹ η̇` as `(c_J, c_u, c_v)`.
pub fn energy_slots(s: &SlotValues) -> [C64; 3] {
    let (ch, sh) = (s.lambda.cosh(), s.lambda.sinh());
    [I * s.dlambda, I * s.drho + s.dtau * sh, s.rho * s.dlambda + I * s.dtau * ch]
}

fn linear_matrix(c: [C64; 3], g: &Generators) -> OperatorMatrix {
    let data = g.j.data() * c[0] + g.u.data() * c[1] + g.v.data() * c[2];
    OperatorMatrix::from_data(g.basis(), data).expect("generator dimensions agree")
}

pub fn gauge_term(p: &DysonParams, t: f64, m: usize) -> Result<OperatorMatrix> {
    Ok(linear_matrix(gauge_slots(&p.slots_at(t)), &build_generators(m.max(4))?))
}

/// `H̃ = H + i η⁻¹ η̇`, the operator that `η⁻¹ h η` reproduces.
pub fn energy_operator(h_big: &CoefficientSet, p: &DysonParams, t: f64, m: usize) -> Result<OperatorMatrix> {
    let g = build_generators(m.max(4))?;
    let aux = linear_matrix(energy_slots(&p.slots_at(t)), &g);
    Ok(&h_big.values_at(t).realize_with(&g) + &aux)
}

/// Product of two linear combinations `(c_J, c_u, c_v)`, normal ordered
/// with `J` to the right (`Ju = uJ − iv`, `Jv = vJ + iu`).
fn linear_product(a: [C64; 3], b: [C64; 3]) -> CoefficientValues {
    let mut out = CoefficientValues([ZERO; 9]);
    let mut add = |c: Coeff, z: C64| out.set(c, out.get(c) + z);
    add(Coeff::JJ, a[0] * b[0]);
    add(Coeff::UJ, a[0] * b[1] + a[1] * b[0]);
    add(Coeff::V, -I * a[0] * b[1]);
    add(Coeff::VJ, a[0] * b[2] + a[2] * b[0]);
    add(Coeff::U, I * a[0] * b[2]);
    add(Coeff::UU, a[1] * b[1]);
    add(Coeff::VV, a[2] * b[2]);
    add(Coeff::UV, a[1] * b[2] + a[2] * b[1]);
    out
}

/// `η H η⁻¹` in coefficient form, built from the closed-form adjoint actions.
pub fn conjugate_values(h: &CoefficientValues, s: &SlotValues) -> CoefficientValues {
    let aj = adjoint_slots(Generator::J, s);
    let au = adjoint_slots(Generator::U, s);
    let av = adjoint_slots(Generator::V, s);
    let mut out = CoefficientValues([ZERO; 9]);
    let mut acc = |z: C64, q: CoefficientValues| {
        for c in Coeff::ALL {
            out.set(c, out.get(c) + z * q.get(c));
        }
    };
    let single = |l: [C64; 3]| {
        let mut q = CoefficientValues([ZERO; 9]);
        q.set(Coeff::J, l[0]);
        q.set(Coeff::U, l[1]);
        q.set(Coeff::V, l[2]);
        q
    };
    acc(h.get(Coeff::J), single(aj));
    acc(h.get(Coeff::U), single(au));
    acc(h.get(Coeff::V), single(av));
    acc(h.get(Coeff::JJ), linear_product(aj, aj));
    acc(h.get(Coeff::UJ), linear_product(au, aj));
    acc(h.get(Coeff::VJ), linear_product(av, aj));
    acc(h.get(Coeff::UU), linear_product(au, au));
    acc(h.get(Coeff::VV), linear_product(av, av));
    acc(h.get(Coeff::UV), linear_product(au, av));
    out
}

/// `η H η⁻¹ + i η̇ η⁻¹` in coefficient form.
pub fn dyson_transform(h: &CoefficientValues, s: &SlotValues) -> CoefficientValues {
    let mut out = conjugate_values(h, s);
    let gt = gauge_slots(s);
    for (c, z) in [(Coeff::J, gt[0]), (Coeff::U, gt[1]), (Coeff::V, gt[2])] {
        out.set(c, out.get(c) + z);
    }
    out
}

/// Generators on the order `m` plus the exponential guard band, and the pad
/// that selects the window of order `m` inside them.
pub(crate) fn guarded(m: usize) -> Result<(Generators, usize)> {
    Ok((build_generators(m + EXP_GUARD)?, DEFAULT_PAD + EXP_GUARD))
}

/// `‖h η − η H − i η̇‖` on the interior window of order `m`, with
/// `i η̇ = (i η̇ η⁻¹) η` taken from the analytic gauge term.
pub fn tdde_residual(h_big: &CoefficientSet, h: &CoefficientSet, p: &DysonParams, t: f64, m: usize) -> Result<f64> {
    Ok(tdde_parts(h_big, h, p, t, m)?.0)
}

/// Residual together with the window norms of `η` and `H` (for rounding
/// aware thresholds).
pub(crate) fn tdde_parts(
    h_big: &CoefficientSet,
    h: &CoefficientSet,
    p: &DysonParams,
    t: f64,
    m: usize,
) -> Result<(f64, f64, f64)> {
    let (g, pad) = guarded(m)?;
    let s = p.slots_at(t);
    let (eta, _) = eta_pair(&s, &g);
    let hm = h.values_at(t).realize_with(&g);
    let hb = h_big.values_at(t).realize_with(&g);
    let gt = linear_matrix(gauge_slots(&s), &g);
    let r = &(&(&hm * &eta) - &(&eta * &hb)) - &(&gt * &eta);
    Ok((interior_norm(&r, pad)?, interior_norm(&eta, pad)?, interior_norm(&hb, pad)?))
}

/// `‖η⁻¹ h η − (H + i η⁻¹ η̇)‖` on the interior window of order `m`.
pub fn energy_residual(h_big: &CoefficientSet, h: &CoefficientSet, p: &DysonParams, t: f64, m: usize) -> Result<f64> {
    let (g, pad) = guarded(m)?;
    let s = p.slots_at(t);
    let (eta, inv) = eta_pair(&s, &g);
    let lhs = &(&inv * &h.values_at(t).realize_with(&g)) * &eta;
    let rhs = &h_big.values_at(t).realize_with(&g) + &linear_matrix(energy_slots(&s), &g);
    interior_norm(&(&lhs - &rhs), pad)
}

/// Largest deviation between `η g η⁻¹` by conjugation and its closed form,
/// over the three generators.
pub fn adjoint_residual(s: &SlotValues, m: usize) -> Result<f64> {
    let (g, pad) = guarded(m)?;
    let (eta, inv) = eta_pair(s, &g);
    let mut worst: f64 = 0.0;
    for (gen, op) in [(Generator::J, &g.j), (Generator::U, &g.u), (Generator::V, &g.v)] {
        let conj = &(&eta * op) * &inv;
        let closed = linear_matrix(adjoint_slots(gen, s), &g);
        worst = worst.max(interior_norm(&(&conj - &closed), pad)?);
    }
    Ok(worst)
}
