//! Limit laws of the root cluster, the Gaussian limit of the rescaled edge
//! process and the largest-component limit in the critical window.

pub mod largest;
pub mod limit_process;
pub mod quad;
pub mod special;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Result};
use quad::{integrate, integrate_to_infinity, QuadResult, Tolerance};

pub use largest::{largest_component_tail_limit, largest_component_tail_terms};
pub use limit_process::{limit_covariance, sample_limit_process, LimitProcessPath, LimitProcessSampler};
pub use special::{mills_ratio, tree_function};

/// Limit law of the (rescaled) root cluster in each growth regime of
/// `n - k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "kebab-case")]
pub enum LimitLaw {
    /// `k = alpha n`: discrete law of `R` itself.
    Central { alpha: f64 },
    /// `sqrt(n) << n - k`, `R (n-k)^2 / n^2` converges to Gamma(1/2, 1/2).
    SubcriticalGamma,
    /// `n - k ~ c sqrt(n)`: continuous law of `R / n` on `(0, 1)`.
    Critical { c: f64 },
    /// `1 << n - k << sqrt(n)`: `(n - R)/(n - k)^2` is Levy distributed.
    SupercriticalCont,
    /// `n - k = d` fixed: discrete law of `n - d - R`.
    SupercriticalFixed { d: u64 },
}

impl LimitLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LimitLaw::Central { alpha } if !(alpha > 0.0 && alpha < 1.0) => invalid(format!("alpha = {alpha} outside (0, 1)")),
            LimitLaw::Critical { c } if !(c > 0.0 && c.is_finite()) => invalid(format!("c = {c} must be positive")),
            LimitLaw::SupercriticalFixed { d: 0 } => invalid("d must be at least 1"),
            _ => Ok(()),
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, LimitLaw::Central { .. } | LimitLaw::SupercriticalFixed { .. })
    }

    /// Probability mass at `m` for the discrete laws.
    pub fn pmf(&self, m: u64) -> Result<f64> {
        match *self {
            LimitLaw::Central { alpha } => central_limit_pmf(alpha, m),
            LimitLaw::SupercriticalFixed { d } => borel_type_pmf(d, m),
            _ => invalid("pmf requested for a continuous law"),
        }
    }

    /// Total mass. Discrete laws are summed up to `m = 2000` and the rest
    /// is added with [`LimitLaw::tail_mass`]; densities are integrated.
    pub fn total_mass(&self) -> Result<f64> {
        self.validate()?;
        if self.is_discrete() {
            const CUT: u64 = 2000;
            let mut head = 0.0;
            for m in 0..=CUT {
                head += self.pmf(m)?;
            }
            return Ok(head + self.tail_mass(CUT)?);
        }
        Ok(self.integrate_moment(0)?.value)
    }

    /// `sum_{m > from} p_m` for the discrete laws, as the integral of the
    /// Stirling extension of the pmf from `from + 1/2` (midpoint rule).
    /// The supercritical law decays only like `m^(-3/2)`, so its tail
    /// cannot be summed directly. Meant for `from` of a few hundred or more.
    pub fn tail_mass(&self, from: u64) -> Result<f64> {
        self.validate()?;
        if !self.is_discrete() {
            return invalid("tail_mass is defined for discrete laws");
        }
        let a = from as f64 + 0.5;
        let law = *self;
        // x = a / v^2 keeps the m^(-3/2) tail bounded at v = 0.
        let r = integrate(
            move |v: f64| {
                let x = a / (v * v);
                let p = law.pmf_stirling(x);
                if p == 0.0 {
                    0.0
                } else {
                    2.0 * a / (v * v * v) * p
                }
            },
            0.0,
            1.0,
            Tolerance::new(1e-14, 1e-10),
        )?;
        Ok(r.value)
    }

    /// The discrete pmf at real `x`, with `ln Gamma(x + 1)` replaced by its
    /// Stirling series (accurate to ~1e-14 relative for `x >= 100`).
    fn pmf_stirling(&self, x: f64) -> f64 {
        let corr = 1.0 / (12.0 * x) - 1.0 / (360.0 * x * x * x);
        let half_ln = 0.5 * (2.0 * PI * x).ln();
        let ln = match *self {
            LimitLaw::Central { alpha } => x * (1.0 - alpha + alpha.ln()) + (1.0 - alpha).ln() - half_ln - corr,
            LimitLaw::SupercriticalFixed { d } => {
                let d = d as f64;
                -d + d.ln() + x * (d / x).ln_1p() - (d + x).ln() - half_ln - corr
            }
            _ => return f64::NAN,
        };
        ln.exp()
    }

    /// `int x^p f(x) dx` for the continuous laws, `p in {0, 1}`.
    pub fn integrate_moment(&self, p: i32) -> Result<QuadResult> {
        self.validate()?;
        let tol = Tolerance::new(1e-12, 1e-12);
        let law = *self;
        match law {
            LimitLaw::Critical { .. } => {
                // x = u^2 removes the x^(-1/2) singularity at the origin.
                integrate(|u: f64| 2.0 * u * (u * u).powi(p) * density(&law, u * u), 0.0, 1.0, tol)
            }
            LimitLaw::SubcriticalGamma => {
                integrate_to_infinity(|u: f64| 2.0 * u * (u * u).powi(p) * density(&law, u * u), 0.0, tol)
            }
            LimitLaw::SupercriticalCont => {
                // u = 1/x: the density becomes (2 pi)^(-1/2) u^(-1/2) e^(-u/2),
                // then u = v^2 as above.
                integrate_to_infinity(
                    |v: f64| {
                        let u = v * v;
                        let f = (-u / 2.0).exp() / (2.0 * PI).sqrt();
                        2.0 * f * u.powi(-p)
                    },
                    0.0,
                    tol,
                )
            }
            _ => invalid("moments by quadrature are only defined for continuous laws"),
        }
    }
}

fn density(law: &LimitLaw, x: f64) -> f64 {
    match *law {
        LimitLaw::SubcriticalGamma => {
            if x <= 0.0 || !x.is_finite() {
                0.0
            } else {
                (-x / 2.0).exp() / (2.0 * PI * x).sqrt()
            }
        }
        LimitLaw::Critical { c } => {
            if x <= 0.0 || x >= 1.0 {
                0.0
            } else {
                let y = 1.0 - x;
                let e = (-c * c * x / (2.0 * y)).exp();
                if e == 0.0 {
                    0.0
                } else {
                    c * e / ((2.0 * PI).sqrt() * x.sqrt() * y * y.sqrt())
                }
            }
        }
        LimitLaw::SupercriticalCont => {
            if x <= 0.0 || !x.is_finite() {
                0.0
            } else {
                let e = (-1.0 / (2.0 * x)).exp();
                if e == 0.0 {
                    0.0
                } else {
                    e / ((2.0 * PI).sqrt() * x * x.sqrt())
                }
            }
        }
        LimitLaw::Central { .. } | LimitLaw::SupercriticalFixed { .. } => f64::NAN,
    }
}

/// Density of a continuous limit law; 0 outside the support.
pub fn limit_density(law: &LimitLaw, x: f64) -> Result<f64> {
    law.validate()?;
    if law.is_discrete() {
        return invalid("limit_density called on a discrete law");
    }
    Ok(density(law, x))
}

/// `p_0 = 1 - alpha`, `p_m = m^m/m! (1 - alpha) alpha^m e^(-alpha m)`.
pub fn central_limit_pmf(alpha: f64, m: u64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("alpha = {alpha} outside (0, 1)"));
    }
    if m == 0 {
        return Ok(1.0 - alpha);
    }
    let mf = m as f64;
    let ln = mf * mf.ln() - ln_gamma(mf + 1.0) + (1.0 - alpha).ln() + mf * alpha.ln() - alpha * mf;
    Ok(ln.exp())
}

/// `p_j = e^(-d) d (d + j)^(j - 1) / j! e^(-j)`, evaluated in log space.
pub fn borel_type_pmf(d: u64, j: u64) -> Result<f64> {
    if d == 0 {
        return invalid("d must be at least 1");
    }
    let (df, jf) = (d as f64, j as f64);
    let ln = -df + df.ln() + (jf - 1.0) * (df + jf).ln() - ln_gamma(jf + 1.0) - jf;
    Ok(ln.exp())
}

/// `kappa(c) = 1 - c e^(c^2/2) int_c^inf e^(-t^2/2) dt`.
pub fn kappa(c: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return invalid(format!("kappa needs c > 0, got {c}"));
    }
    Ok(1.0 - c * mills_ratio(c))
}

/// `E R_n^(k) = int_0^inf (x - 1) e^(-x) (1 + x/n)^k dx` by quadrature.
pub fn root_cluster_expectation_integral(n: usize, k: usize) -> Result<f64> {
    if n == 0 || k > n {
        return invalid(format!("need 0 <= k <= n with n >= 1, got n = {n}, k = {k}"));
    }
    let (nf, kf) = (n as f64, k as f64);
    let f = move |x: f64| (x - 1.0) * (kf * (x / nf).ln_1p() - x).exp();
    // Split where the integrand changes sign, then once more near the mode
    // of (1 + x/n)^k e^(-x) so the half-line map sees a decaying tail.
    let mode = (kf - nf).max(1.0);
    let tol = Tolerance::new(1e-15, 1e-13);
    let a = integrate(f, 0.0, 1.0, tol)?;
    let b = integrate(f, 1.0, mode, tol)?;
    let c = integrate_to_infinity(f, mode, tol)?;
    Ok(a.value + b.value + c.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;

    #[test]
    fn covariance_examples() {
        assert_eq!(limit_covariance(1.0, 1.0).unwrap(), 0.0);
        assert!((limit_covariance(0.5, 0.5).unwrap() - 0.125).abs() < 1e-15);
        assert!((limit_covariance(0.3, 0.6).unwrap() - 0.036).abs() < 1e-15);
        assert!(limit_covariance(0.6, 0.3).is_err());
        assert!(limit_covariance(-0.1, 0.3).is_err());
    }

    #[test]
    fn central_pmf_examples() {
        for alpha in [0.1, 0.5, 0.9] {
            assert!((central_limit_pmf(alpha, 0).unwrap() - (1.0 - alpha)).abs() < 1e-15);
            let s: f64 = (0..=200).map(|m| central_limit_pmf(alpha, m).unwrap()).sum();
            // At alpha = 0.9 the ratio alpha e^(1 - alpha) is 0.9947 and 201
            // terms leave a visible remainder, which must equal the tail.
            let tail = LimitLaw::Central { alpha }.tail_mass(200).unwrap();
            assert!((s + tail - 1.0).abs() < 1e-6, "alpha={alpha}: {s} + {tail}");
            if alpha < 0.9 {
                assert!((s - 1.0).abs() < 1e-6, "alpha={alpha}: {s}");
            }
        }
        assert!((central_limit_pmf(0.5, 1).unwrap() - 0.25 * (-0.5f64).exp()).abs() < 1e-15);
        assert!((central_limit_pmf(0.5, 1).unwrap() - 0.15163).abs() < 1e-5);
        assert!(central_limit_pmf(0.0, 1).is_err());
        assert!(central_limit_pmf(1.0, 1).is_err());
    }

    #[test]
    fn borel_examples() {
        assert!((borel_type_pmf(1, 0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!((borel_type_pmf(2, 0).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        // The tail decays like j^(-3/2), so 501 terms fall visibly short of
        // 1; the deficit must agree with the tail integral.
        for (d, deficit) in [(1, 0.035_627_100_927_506_1), (2, 0.071_136_057_416_371_72), (5, 0.176_264_303_315_769_45)] {
            let s: f64 = (0..=500).map(|j| borel_type_pmf(d, j).unwrap()).sum();
            assert!((1.0 - s - deficit).abs() < 1e-12, "d={d}: {s}");
            let tail = LimitLaw::SupercriticalFixed { d }.tail_mass(500).unwrap();
            assert!((tail - deficit).abs() < 1e-6, "d={d}: {tail}");
        }
        assert!(borel_type_pmf(0, 3).is_err());
    }

    #[test]
    fn densities() {
        let g = limit_density(&LimitLaw::SubcriticalGamma, 1.0).unwrap();
        assert!((g - (-0.5f64).exp() / (2.0 * PI).sqrt()).abs() < 1e-15);
        assert!((g - 0.24197).abs() < 1e-5);
        assert_eq!(limit_density(&LimitLaw::SubcriticalGamma, -1.0).unwrap(), 0.0);
        assert_eq!(limit_density(&LimitLaw::Critical { c: 1.0 }, 1.0).unwrap(), 0.0);
        assert_eq!(limit_density(&LimitLaw::Critical { c: 1.0 }, 0.0).unwrap(), 0.0);
        assert_eq!(limit_density(&LimitLaw::SupercriticalCont, 0.0).unwrap(), 0.0);
        assert!(limit_density(&LimitLaw::Central { alpha: 0.5 }, 0.3).is_err());
        assert!(limit_density(&LimitLaw::Critical { c: -1.0 }, 0.3).is_err());
    }

    #[test]
    fn discrete_masses() {
        for law in [
            LimitLaw::Central { alpha: 0.1 },
            LimitLaw::Central { alpha: 0.5 },
            LimitLaw::Central { alpha: 0.9 },
            LimitLaw::SupercriticalFixed { d: 1 },
            LimitLaw::SupercriticalFixed { d: 2 },
            LimitLaw::SupercriticalFixed { d: 5 },
        ] {
            let m = law.total_mass().unwrap();
            assert!((m - 1.0).abs() < 1e-6, "{law:?}: {m}");
        }
    }

    #[test]
    fn continuous_masses() {
        for law in [
            LimitLaw::SubcriticalGamma,
            LimitLaw::SupercriticalCont,
            LimitLaw::Critical { c: 0.5 },
            LimitLaw::Critical { c: 1.0 },
            LimitLaw::Critical { c: 2.0 },
        ] {
            let m = law.total_mass().unwrap();
            assert!((m - 1.0).abs() < 1e-6, "{law:?}: {m}");
        }
    }

    #[test]
    fn kappa_values() {
        // Reference values from an independent 30-digit quadrature of the
        // defining integral.
        assert!((kappa(0.5).unwrap() - 0.561_817_771_773_153_8).abs() < 1e-12);
        assert!((kappa(1.0).unwrap() - 0.344_320_457_581_201_5).abs() < 1e-12);
        assert!((kappa(2.0).unwrap() - 0.157_261_541_423_891_05).abs() < 1e-12);
        assert!(kappa(1e-9).unwrap() > 0.999_999);
        let grid: Vec<f64> = (1..=50).map(|i| i as f64 * 0.1).collect();
        for w in grid.windows(2) {
            assert!(kappa(w[1]).unwrap() < kappa(w[0]).unwrap());
        }
        assert!(kappa(0.0).is_err());
    }

    #[test]
    fn critical_mean_is_kappa() {
        for c in [0.5, 1.0, 2.0] {
            let m = LimitLaw::Critical { c }.integrate_moment(1).unwrap().value;
            assert!((m - kappa(c).unwrap()).abs() < 1e-6, "c={c}");
        }
    }

    #[test]
    fn expectation_integral_matches_exact() {
        for (n, k) in [(2, 1), (3, 2), (10, 5), (100, 90), (50, 50), (7, 1)] {
            let e = exact::root_cluster_expectation(n, k).unwrap().to_f64();
            let q = root_cluster_expectation_integral(n, k).unwrap();
            assert!((q - e).abs() <= 1e-8 * e, "n={n} k={k}: {q} vs {e}");
        }
        assert!(root_cluster_expectation_integral(10, 0).unwrap().abs() < 1e-12);
        assert!(root_cluster_expectation_integral(3, 4).is_err());
    }
}
