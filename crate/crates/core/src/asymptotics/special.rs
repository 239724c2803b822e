//! Scalar special functions used by the limit laws.

use std::f64::consts::{E, PI};

use crate::error::{invalid, Error, Result};

/// Mills ratio of the standard normal, `e^(x^2/2) * int_x^inf e^(-t^2/2) dt`,
/// for `x >= 0`.
///
/// Below `x = 3` this is `e^(x^2/2) sqrt(pi/2) - sum_n x^(2n+1)/(2n+1)!!`
/// (the series has positive terms, so the only loss is the final
/// subtraction, a few hundred ulps at most). Above, the classical continued
/// fraction `1/(x + 1/(x + 2/(x + ...)))` is evaluated with Lentz's method.
pub fn mills_ratio(x: f64) -> f64 {
    assert!(x >= 0.0, "mills_ratio needs x >= 0");
    if x < 3.0 {
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut k = 1.0;
        while term > 1e-17 * sum {
            k += 2.0;
            term *= x2 / k;
            sum += term;
        }
        return (x2 / 2.0).exp() * (PI / 2.0).sqrt() - sum;
    }
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..10_000 {
        let a = k as f64;
        d = x + a * d;
        if d == 0.0 {
            d = tiny;
        }
        c = x + a / c;
        if c == 0.0 {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

/// `erfc(x)` for `x >= 0` through the Mills ratio.
pub fn erfc(x: f64) -> f64 {
    assert!(x >= 0.0, "erfc is only provided for x >= 0");
    let y = x * std::f64::consts::SQRT_2;
    mills_ratio(y) * (-x * x).exp() * (2.0 / PI).sqrt()
}

/// Cayley tree function: the solution `T in [0, 1]` of `T = x e^T` for
/// `0 <= x <= 1/e`.
pub fn tree_function(x: f64) -> Result<f64> {
    let branch = 1.0 / E;
    if !(0.0..=branch * (1.0 + 1e-15)).contains(&x) {
        return invalid(format!("tree function needs 0 <= x <= 1/e, got {x}"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let x = x.min(branch);
    let p2 = 2.0 * (1.0 - E * x);
    if p2 <= 1e-30 {
        return Ok(1.0);
    }
    let mut t = if x < 0.25 {
        x * (1.0 + x * (1.0 + 1.5 * x))
    } else {
        let p = p2.sqrt();
        1.0 - p + p * p / 3.0 - 11.0 * p * p * p / 72.0
    };
    for _ in 0..200 {
        let et = t.exp();
        let residual = t - x * et;
        if residual.abs() <= 1e-14 {
            break;
        }
        let slope = 1.0 - x * et;
        if slope <= 0.0 {
            break;
        }
        t = (t - residual / slope).min(1.0);
    }
    let residual = t - x * t.exp();
    if residual.abs() > 1e-12 {
        return Err(Error::Internal(format!("tree function did not converge at x = {x}: residual {residual}")));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mills_ratio_matches_quadrature_and_is_continuous() {
        use crate::asymptotics::quad::{integrate_to_infinity, Tolerance};
        for x in [0.0, 0.5, 1.0, 2.0, 2.99, 3.01, 5.0, 8.0, 12.0] {
            let q = integrate_to_infinity(|t: f64| (-(t * t - x * x) / 2.0).exp(), x, Tolerance::new(1e-14, 1e-13)).unwrap();
            let m = mills_ratio(x);
            assert!((m - q.value).abs() < 1e-11 * q.value, "x={x}: {m} vs {}", q.value);
        }
        let below = mills_ratio(3.0 - 1e-12);
        let above = mills_ratio(3.0);
        assert!((below - above).abs() < 1e-13);
        assert!((mills_ratio(0.0) - (PI / 2.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn erfc_reference_values() {
        // 21-digit references.
        let cases = [
            (0.5, 0.479_500_122_186_953_462_3),
            (1.0, 0.157_299_207_050_285_130_7),
            (std::f64::consts::FRAC_1_SQRT_2, 0.317_310_507_862_914_102_8),
            (3.0, 2.209_049_699_858_544_137e-5),
            (6.0, 2.151_973_671_249_891_311e-17),
        ];
        for (x, want) in cases {
            let got = erfc(x);
            assert!((got - want).abs() <= 1e-13 * want, "x={x}: {got} vs {want}");
        }
        assert_eq!(erfc(0.0), 1.0);
    }

    #[test]
    fn tree_function_values() {
        assert_eq!(tree_function(0.0).unwrap(), 0.0);
        assert!((tree_function(1.0 / E).unwrap() - 1.0).abs() < 1e-12);
        for alpha in [0.01, 0.1, 0.5, 0.9, 0.99, 0.999] {
            let t = tree_function(alpha * (-alpha as f64).exp()).unwrap();
            assert!((t - alpha).abs() < 1e-7, "alpha={alpha}: {t}");
        }
        assert!(tree_function(-0.1).is_err());
        assert!(tree_function(0.5).is_err());
    }
}
