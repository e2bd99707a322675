use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use serde::Serialize;

use crate::algebra::{build_generators, OperatorMatrix, C64};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::invariants::hhat_coefficients;
use crate::model::{realize, TimeFunction};
use crate::qes::ModelParams;

const MIN_LEVEL: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoubleScalingRow {
    pub zeta: f64,
    pub k: usize,
    #[serde(rename = "eig_H")]
    pub eig_h: f64,
    pub eig_limit: f64,
    pub deviation: f64,
}

/// Lowest `count` eigenvalues of a Hermitian matrix, each refined by a
/// Rayleigh quotient on its eigenvector.
pub fn polished_eigenvalues(a: &OperatorMatrix, count: usize) -> Result<Vec<f64>> {
    let h: DMatrix<C64> = (a.data() + a.data().adjoint()) * C64::from(0.5);
    let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, 0).ok_or(Error::EigenSolver)?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    Ok(order
        .into_iter()
        .take(count)
        .map(|i| {
            let x: DVector<C64> = eig.eigenvectors.column(i).into_owned();
            (x.adjoint() * (&h * &x))[(0, 0)].re / x.norm_squared()
        })
        .collect())
}

/// Real parts of the eigenvalues of a general complex matrix, ascending.
pub fn schur_eigenvalues(a: &OperatorMatrix) -> Result<Vec<C64>> {
    let schur = Schur::try_new(a.data().clone(), f64::EPSILON, 0).ok_or(Error::EigenSolver)?;
    let (_, t) = schur.unpack();
    let mut ev: Vec<C64> = t.diagonal().iter().copied().collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re));
    Ok(ev)
}

/// The limit operator `4J² + 2g v` on order `m`.
pub fn limit_operator(g: f64, m: usize) -> Result<OperatorMatrix> {
    let gens = build_generators(m)?;
    Ok(&gens.jj.scale(C64::from(4.0)) + &gens.v.scale(C64::from(2.0 * g)))
}

/// Hermitian partner of the static model at `N = g/ζ`.
pub fn scaled_operator(g: f64, zeta: f64, beta: f64, m: usize) -> Result<OperatorMatrix> {
    let p = ModelParams::new(zeta, beta, g / zeta);
    realize(&hhat_coefficients(&p, &TimeFunction::zero()), 0.0, m)
}

/// Lowest `k_low` eigenvalues of the model at `N = g/ζ` against the limit
/// `4J² + 2gv`, one block of rows per `ζ`.
pub fn double_scaling_compare(
    g: f64,
    zetas: &[f64],
    beta: f64,
    m: usize,
    k_low: usize,
    exec: Exec,
) -> Result<Vec<DoubleScalingRow>> {
    for &z in zetas {
        if !(z > 0.0) || !(g / z >= MIN_LEVEL) {
            return Err(Error::InvalidArgument(format!("need zeta > 0 and g/zeta >= {MIN_LEVEL}, got zeta = {z}")));
        }
    }
    let limit = polished_eigenvalues(&limit_operator(g, m)?, k_low)?;
    let blocks = exec.map(zetas, |&z| -> Result<Vec<DoubleScalingRow>> {
        let eig = polished_eigenvalues(&scaled_operator(g, z, beta, m)?, k_low)?;
        Ok(eig
            .iter()
            .zip(&limit)
            .enumerate()
            .map(|(k, (&e, &l))| DoubleScalingRow { zeta: z, k, eig_h: e, eig_limit: l, deviation: (e - l).abs() })
            .collect())
    });
    Ok(blocks.into_iter().collect::<Result<Vec<_>>>()?.concat())
}

/// Pairs each of `reference` with the nearest real part in `raw` and
/// returns the largest distance.
pub fn nearest_pairing_gap(reference: &[f64], raw: &[C64]) -> f64 {
    reference
        .iter()
        .map(|r| raw.iter().map(|z| (z - r).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Eigenvalues of the raw non-Hermitian model at `N = g/ζ`.
pub fn raw_model_eigenvalues(g: f64, zeta: f64, beta: f64, m: usize) -> Result<Vec<C64>> {
    let p = ModelParams::new(zeta, beta, g / zeta);
    schur_eigenvalues(&realize(&p.hamiltonian(), 0.0, m)?)
}

/// Largest deviation per `ζ`, in input order.
pub fn max_deviation_by_zeta(rows: &[DoubleScalingRow]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for r in rows {
        match out.last_mut() {
            Some((z, d)) if *z == r.zeta => *d = d.max(r.deviation),
            _ => out.push((r.zeta, r.deviation)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_rotor_limit() {
        let ev = polished_eigenvalues(&limit_operator(0.0, 16).unwrap(), 7).unwrap();
        let want = [0.0, 4.0, 4.0, 16.0, 16.0, 36.0, 36.0];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn mathieu_self_convergence() {
        let a = polished_eigenvalues(&limit_operator(1.0, 64).unwrap(), 1).unwrap()[0];
        let b = polished_eigenvalues(&limit_operator(1.0, 128).unwrap(), 1).unwrap()[0];
        assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
    }

    #[test]
    fn deviations_shrink_linearly() {
        let rows = double_scaling_compare(1.0, &[1e-2, 1e-3], 0.3, 64, 4, Exec::default()).unwrap();
        let dev = max_deviation_by_zeta(&rows);
        let ratio = dev[0].1 / dev[1].1;
        assert!((3.0..=30.0).contains(&ratio), "{ratio}");
        let raw = raw_model_eigenvalues(1.0, 1e-2, 0.3, 64).unwrap();
        let sym: Vec<f64> = rows.iter().filter(|r| r.zeta == 1e-2).map(|r| r.eig_h).collect();
        assert!(nearest_pairing_gap(&sym, &raw) < 1e-8);
        assert!(double_scaling_compare(1.0, &[0.5], 0.3, 16, 2, Exec::Sequential).is_err());
    }
}
