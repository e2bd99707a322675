use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 20.0;
const MAX_ARG: f64 = 100.0;

/// Modified Bessel function of the first kind `I_n(z)` for real `z`,
/// `|z| ≤ 100`.
///
/// Ascending series for `|z| ≤ 20`; above that, Miller's backward
/// recurrence normalized by `e^z = I_0 + 2 Σ_{k≥1} I_k`.
pub fn bessel_i(n: u32, z: f64) -> Result<f64> {
    if !(z.abs() <= MAX_ARG) {
        return Err(Error::BesselRange(z.abs()));
    }
    let x = z.abs();
    let value = if x <= SERIES_LIMIT { series(n, x) } else { miller(n, x) };
    Ok(if z < 0.0 && n % 2 == 1 { -value } else { value })
}

fn series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for j in 1..=n {
        term *= half / j as f64;
    }
    if term == 0.0 {
        return 0.0;
    }
    let q = half * half;
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + n as f64));
        sum += term;
        if term < sum * 1e-17 {
            return sum;
        }
    }
}

fn miller(n: u32, x: f64) -> f64 {
    let start = 2 * ((n as usize).max(x as usize) + 40 + (40.0 * (n as f64 + x)).sqrt() as usize);
    let mut next = 0.0; // I_{k+1}
    let mut cur = 1e-300; // I_k
    let mut sum = 0.0;
    let mut wanted = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur + next;
        next = cur;
        cur = prev;
        if k - 1 == n as usize {
            wanted = cur;
        }
        if k - 1 > 0 {
            sum += 2.0 * cur;
        }
        if cur > 1e250 {
            next *= 1e-250;
            cur *= 1e-250;
            sum *= 1e-250;
            wanted *= 1e-250;
        }
    }
    // after the loop `cur` holds the unnormalized I_0
    wanted * x.exp() / (sum + cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_argument_values() {
        assert_eq!(bessel_i(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(1, 0.0).unwrap(), 0.0);
        assert!((bessel_i(0, 1.0).unwrap() - 1.266_065_877_752_008_4).abs() < 1e-15);
        assert!((bessel_i(1, -1.0).unwrap() + 0.565_159_103_992_485).abs() < 1e-15);
    }

    #[test]
    fn recurrence_identity() {
        for &z in &[0.5, 2.0, 10.0, 25.0, 60.0, -7.0] {
            for n in 1..30u32 {
                let lhs = bessel_i(n - 1, z).unwrap() - bessel_i(n + 1, z).unwrap();
                let rhs = 2.0 * n as f64 / z * bessel_i(n, z).unwrap();
                assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(rhs.abs()).max(1e-300), "n={n} z={z}");
            }
        }
    }

    #[test]
    fn methods_agree_at_the_switch() {
        // both paths evaluated on the same argument
        for n in [0u32, 1, 5, 20] {
            let a = series(n, 20.0);
            let b = miller(n, 20.0);
            assert!((a - b).abs() <= 1e-13 * a, "n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn range_is_enforced() {
        assert!(bessel_i(0, 100.5).is_err());
        assert!(bessel_i(0, f64::NAN).is_err());
        assert!(bessel_i(3, 100.0).unwrap().is_finite());
    }
}
