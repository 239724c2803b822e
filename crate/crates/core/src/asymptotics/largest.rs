//! Limit of `P(C_max >= alpha n)` for `n - k ~ c sqrt(n)`, as the
//! inclusion-exclusion series over ordered component sizes
//! `alpha <= t_1 < ... < t_j` with `t_1 + ... + t_j < 1`.

use std::cell::{Cell, RefCell};
use std::f64::consts::PI;

use rand::RngExt;
use serde::Serialize;

use super::quad::{integrate, Tolerance};
use crate::error::{invalid, Result};
use crate::rng::RngStream;

/// Quasi-Monte Carlo points per term for `j >= 3`, split over randomly
/// shifted copies of one Kronecker lattice.
pub const QMC_POINTS: usize = 1 << 20;
const QMC_SHIFTS: usize = 16;

/// Terms whose a priori bound drops below this are not evaluated.
const NEGLIGIBLE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermMethod {
    Quadrature,
    QuasiMonteCarlo,
    Bounded,
}

/// Signed `j`-th term of the series with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailTerm {
    pub j: usize,
    pub value: f64,
    pub abs_error: f64,
    pub method: TermMethod,
}

/// `(1 - tau)^(-3/2) exp(-c^2 tau / (2 (1 - tau)))`, zero for `tau >= 1`.
fn h(c: f64, tau: f64) -> f64 {
    if tau >= 1.0 {
        return 0.0;
    }
    let y = 1.0 - tau;
    let e = (-c * c * tau / (2.0 * y)).exp();
    if e == 0.0 {
        0.0
    } else {
        e / (y * y.sqrt())
    }
}

fn sup_h(c: f64) -> f64 {
    // s = 1/(1 - tau) >= 1 maximizes s^(3/2) e^(-c^2 (s - 1)/2) at s = 3/c^2.
    let s = (3.0 / (c * c)).max(1.0);
    s.powf(1.5) * (-c * c * (s - 1.0) / 2.0).exp()
}

fn ln_factorial(j: usize) -> f64 {
    (1..=j).map(|i| (i as f64).ln()).sum()
}

/// Upper bound on `|term j|`: integrand bound times the volume
/// `(1 - j alpha)^j / (j!)^2` of the ordered region.
fn term_bound(c: f64, alpha: f64, j: usize) -> f64 {
    let jf = j as f64;
    let ln = jf * c.ln() - jf / 2.0 * (2.0 * PI).ln() - 1.5 * jf * alpha.ln() + jf * (1.0 - jf * alpha).ln() - 2.0 * ln_factorial(j);
    ln.exp() * sup_h(c)
}

fn term1(c: f64, alpha: f64) -> Result<(f64, f64)> {
    let r = integrate(|t: f64| t.powf(-1.5) * h(c, t), alpha, 1.0, Tolerance::new(1e-10, 1e-12))?;
    let w = c / (2.0 * PI).sqrt();
    Ok((w * r.value, w * r.abs_error))
}

fn term2(c: f64, alpha: f64) -> Result<(f64, f64)> {
    let inner_tol = Tolerance::new(1e-11, 1e-12);
    let inner_err = Cell::new(0.0f64);
    let failure = RefCell::new(None);
    let outer = integrate(
        |t1: f64| {
            let r = integrate(|t2: f64| t2.powf(-1.5) * h(c, t1 + t2), t1, 1.0 - t1, inner_tol);
            match r {
                Ok(r) => {
                    inner_err.set(inner_err.get().max(r.abs_error));
                    t1.powf(-1.5) * r.value
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            }
        },
        alpha,
        0.5,
        Tolerance::new(1e-9, 1e-12),
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let outer = outer?;
    let w = c * c / (2.0 * PI);
    Ok((-w * outer.value, w * (outer.abs_error + inner_err.get() * (0.5 - alpha))))
}

/// Kronecker lattice generator for dimension `d`: powers of the inverse of
/// the positive root of `x^(d+1) = x + 1`.
fn kronecker_alphas(d: usize) -> Vec<f64> {
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
    }
    (1..=d).map(|i| (1.0 / phi.powi(i as i32)).fract()).collect()
}

/// `t_i = alpha + u_1 + ... + u_i`, `w_i = (j - i + 1) u_i`, so that the
/// region becomes the simplex `{w >= 0, sum w < 1 - j alpha}` with Jacobian
/// `1/j!`. Uniform points on the simplex come from stick breaking.
fn term_qmc(c: f64, alpha: f64, j: usize, points: usize, seed: u64) -> (f64, f64) {
    let budget = 1.0 - j as f64 * alpha;
    let lattice = kronecker_alphas(j);
    let per_shift = points.div_ceil(QMC_SHIFTS);
    let mut rng = RngStream::new(seed, j as u64).rng();
    let mut means = Vec::with_capacity(QMC_SHIFTS);
    let mut u = vec![0.0; j];
    for _ in 0..QMC_SHIFTS {
        let shift: Vec<f64> = (0..j).map(|_| rng.random::<f64>()).collect();
        let mut acc = 0.0;
        for p in 0..per_shift {
            let pf = (p + 1) as f64;
            for i in 0..j {
                u[i] = (shift[i] + pf * lattice[i]).fract();
            }
            let mut rem = budget;
            let mut t = alpha;
            let mut prod = 1.0;
            let mut tau = 0.0;
            for i in 0..j {
                let left = (j - i) as f64;
                let w = rem * (1.0 - u[i].powf(1.0 / left));
                rem -= w;
                t += w / left;
                tau += t;
                prod *= t.powf(-1.5);
            }
            acc += prod * h(c, tau);
        }
        means.push(acc / per_shift as f64);
    }
    let m = means.iter().sum::<f64>() / QMC_SHIFTS as f64;
    let var = means.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (QMC_SHIFTS as f64 - 1.0);
    let se = (var / QMC_SHIFTS as f64).sqrt();
    let jf = j as f64;
    let scale = (jf * budget.ln() - 2.0 * ln_factorial(j)).exp() * c.powi(j as i32) / (2.0 * PI).powf(jf / 2.0);
    let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
    (sign * scale * m, scale * se)
}

/// Every nonempty term of the series. Terms with `j alpha >= 1` vanish;
/// terms whose a priori bound is below 1e-12 are reported as zero with
/// that bound as their error.
pub fn largest_component_tail_terms(c: f64, alpha: f64, qmc_points: usize) -> Result<Vec<TailTerm>> {
    if !(c > 0.0 && c.is_finite()) {
        return invalid(format!("c = {c} must be positive"));
    }
    if !(alpha > 0.0) || alpha.is_nan() {
        return invalid(format!("alpha = {alpha} must be positive"));
    }
    let mut terms = Vec::new();
    let mut j = 1;
    while (j as f64) * alpha < 1.0 {
        let bound = term_bound(c, alpha, j);
        let term = if j > 2 && bound < NEGLIGIBLE {
            TailTerm { j, value: 0.0, abs_error: bound, method: TermMethod::Bounded }
        } else {
            match j {
                1 => {
                    let (value, abs_error) = term1(c, alpha)?;
                    TailTerm { j, value, abs_error, method: TermMethod::Quadrature }
                }
                2 => {
                    let (value, abs_error) = term2(c, alpha)?;
                    TailTerm { j, value, abs_error, method: TermMethod::Quadrature }
                }
                _ => {
                    let (value, abs_error) = term_qmc(c, alpha, j, qmc_points, 0x7a11);
                    TailTerm { j, value, abs_error, method: TermMethod::QuasiMonteCarlo }
                }
            }
        };
        terms.push(term);
        j += 1;
    }
    Ok(terms)
}

/// Limit probability that some component of the forest on `[k]` has at
/// least `alpha n` vertices, clamped to `[0, 1]`.
pub fn largest_component_tail_limit(c: f64, alpha: f64) -> Result<f64> {
    let total: f64 = largest_component_tail_terms(c, alpha, QMC_POINTS)?.iter().map(|t| t.value).sum();
    Ok(total.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from an independent scipy/mpmath evaluation of the
    // ordered integrals.

    #[test]
    fn single_term_regime() {
        let v = largest_component_tail_limit(1.0, 0.6).unwrap();
        assert!((v - 0.307_732_645_610_910_6).abs() < 1e-9, "{v}");
        assert_eq!(largest_component_tail_terms(1.0, 0.6, 10).unwrap().len(), 1);
        assert_eq!(largest_component_tail_limit(1.0, 1.5).unwrap(), 0.0);
        assert!(largest_component_tail_terms(1.0, 1.5, 10).unwrap().is_empty());
    }

    #[test]
    fn two_term_regime() {
        let terms = largest_component_tail_terms(1.0, 0.3, QMC_POINTS).unwrap();
        assert!((terms[0].value - 0.983_706_069_178_764_1).abs() < 1e-8);
        assert!((terms[1].value + 0.088_747_980_365_233_25).abs() < 1e-7);
    }

    #[test]
    fn qmc_term() {
        let terms = largest_component_tail_terms(1.0, 0.2, QMC_POINTS).unwrap();
        assert!((terms[0].value - 1.408_261_307_057_198).abs() < 1e-8);
        assert!((terms[1].value + 0.440_634_966_452_665_9).abs() < 1e-7);
        assert_eq!(terms[2].method, TermMethod::QuasiMonteCarlo);
        assert!((terms[2].value - 0.024_633_583_256_514_3).abs() < 1e-4, "{:?}", terms[2]);
        let terms = largest_component_tail_terms(2.0, 0.25, QMC_POINTS).unwrap();
        assert!((terms[2].value - 9.581_972_752_387e-6).abs() < 1e-6, "{:?}", terms[2]);
        let total = largest_component_tail_limit(1.0, 0.2).unwrap();
        assert!(total > 0.9 && total <= 1.0);
    }

    #[test]
    fn monotone_in_alpha() {
        let a = largest_component_tail_limit(1.0, 0.55).unwrap();
        let b = largest_component_tail_limit(1.0, 0.6).unwrap();
        let c = largest_component_tail_limit(1.0, 0.8).unwrap();
        assert!(a > b && b > c && c > 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(largest_component_tail_limit(0.0, 0.5).is_err());
        assert!(largest_component_tail_limit(1.0, 0.0).is_err());
        assert!(largest_component_tail_limit(1.0, f64::NAN).is_err());
    }
}
