//! Dense complex matrix exponential: scaling-and-squaring with a degree-13
//! Padé approximant (Higham 2005).

use nalgebra::DMatrix;
use num_complex::Complex64;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;
/// Tridiagonal inputs up to this 1-norm take the Taylor path.
const TAYLOR_LIMIT: f64 = 8.0;

fn one_norm(a: &DMatrix<Complex64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// True when every entry more than `width` off the diagonal is zero.
fn is_banded(a: &DMatrix<Complex64>, width: usize) -> bool {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if i.abs_diff(j) > width && a[(i, j)] != Complex64::new(0.0, 0.0) {
                return false;
            }
        }
    }
    true
}

/// Taylor series with each term built as dense × tridiagonal. Summing past
/// the matrix dimension fills every band, and each entry is dominated by its
/// leading power, so tiny far-off-diagonal entries keep relative accuracy.
fn taylor_tridiagonal(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    let mut sum = DMatrix::<Complex64>::identity(n, n);
    let mut term = sum.clone();
    let mut next = DMatrix::<Complex64>::zeros(n, n);
    for k in 1..=n + 60 {
        let inv_k = 1.0 / k as f64;
        for j in 0..n {
            let lo = j.saturating_sub(1);
            let hi = (j + 1).min(n - 1);
            for i in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for l in lo..=hi {
                    acc += term[(i, l)] * a[(l, j)];
                }
                next[(i, j)] = acc * inv_k;
            }
        }
        std::mem::swap(&mut term, &mut next);
        sum += &term;
        if k > n && term.iter().all(|z| z.norm() < f64::MIN_POSITIVE) {
            break;
        }
    }
    sum
}

pub fn expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    assert_eq!(a.nrows(), a.ncols(), "expm needs a square matrix");
    let n = a.nrows();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    if is_banded(a, 0) {
        return DMatrix::from_fn(n, n, |i, j| if i == j { a[(i, i)].exp() } else { Complex64::new(0.0, 0.0) });
    }

    let norm = one_norm(a);
    if norm <= TAYLOR_LIMIT && is_banded(a, 1) {
        return taylor_tridiagonal(a);
    }
    pade13(a, norm)
}

fn pade13(a: &DMatrix<Complex64>, norm: f64) -> DMatrix<Complex64> {
    let n = a.nrows();    let s = if norm > THETA13 { (norm / THETA13).log2().ceil().max(0.0) as i32 } else { 0 };
    let scaled = a * Complex64::new(2f64.powi(-s), 0.0);

    let id = DMatrix::<Complex64>::identity(n, n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let c = |k: usize| Complex64::new(PADE13[k], 0.0);

    let u_inner = &a6 * (&a6 * c(13) + &a4 * c(11) + &a2 * c(9))
        + &a6 * c(7)
        + &a4 * c(5)
        + &a2 * c(3)
        + &id * c(1);
    let u = &scaled * u_inner;
    let v = &a6 * (&a6 * c(12) + &a4 * c(10) + &a2 * c(8)) + &a6 * c(6) + &a4 * c(4) + &a2 * c(2) + &id * c(0);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("Padé denominator is nonsingular for scaled input");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rotation_generator() {
        // exp([[0, -x], [x, 0]]) is a rotation by x.
        let x = 2.3;
        let a = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(-x, 0.0), c(x, 0.0), c(0.0, 0.0)]);
        let e = expm(&a);
        assert!((e[(0, 0)] - c(x.cos(), 0.0)).norm() < 1e-14);
        assert!((e[(1, 0)] - c(x.sin(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn large_norm_uses_squaring() {
        // Nilpotent plus scalar: exp(s I + N) = e^s (I + N).
        let a = DMatrix::from_row_slice(2, 2, &[c(7.0, 1.0), c(30.0, 0.0), c(0.0, 0.0), c(7.0, 1.0)]);
        let e = expm(&a);
        let es = c(7.0, 1.0).exp();
        assert!((e[(0, 0)] - es).norm() < 1e-12 * es.norm());
        assert!((e[(0, 1)] - es * 30.0).norm() < 1e-12 * es.norm() * 30.0);
        assert!(e[(1, 0)].norm() < 1e-12);
    }

    #[test]
    fn taylor_path_keeps_tiny_entries_accurate() {
        // away from the edges, e^{x cos θ} has Fourier coefficients I_k(x)
        let n = 201;
        let x = 0.8;
        let a = DMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { c(0.5 * x, 0.0) } else { c(0.0, 0.0) });
        let t = taylor_tridiagonal(&a);
        let mid = n / 2;
        for k in 0..40 {
            let want = crate::observables::bessel_i(k as u32, x).unwrap();
            assert!((t[(mid, mid + k)] - want).norm() <= 1e-13 * want, "k={k}");
        }
        let p = pade13(&a, one_norm(&a));
        assert!((t - p).norm() < 1e-13);
    }

    #[test]
    fn inverse_is_exp_of_negative() {
        let a = DMatrix::from_fn(6, 6, |i, j| c(((i * 7 + j * 3) % 5) as f64 * 0.3 - 0.6, ((i + 2 * j) % 3) as f64 * 0.1));
        let prod = expm(&a) * expm(&(-&a));
        let id = DMatrix::<Complex64>::identity(6, 6);
        assert!((prod - id).norm() < 1e-11);
    }
}
