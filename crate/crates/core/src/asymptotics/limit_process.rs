//! Gaussian limit of the rescaled edge process, `Cov(s, t) = s^2 (1 - t)`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Largest diagonal jitter tried before giving up on a factorization.
const MAX_JITTER: f64 = 1e-12;

/// `s^2 (1 - t)` for `0 <= s <= t <= 1`. Unordered arguments are rejected.
pub fn limit_covariance(s: f64, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) {
        return invalid(format!("covariance arguments must lie in [0, 1], got ({s}, {t})"));
    }
    if s > t {
        return invalid(format!("covariance needs s <= t, got s = {s}, t = {t}"));
    }
    Ok(s * s * (1.0 - t))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitProcessPath {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// Cholesky factor of the covariance on a fixed grid, reused across draws.
#[derive(Debug, Clone)]
pub struct LimitProcessSampler {
    grid: Vec<f64>,
    factor: DMatrix<f64>,
    jitter: f64,
}

impl LimitProcessSampler {
    pub fn new(grid: &[f64]) -> Result<Self> {
        for (i, &t) in grid.iter().enumerate() {
            if !(t > 0.0 && t < 1.0) {
                return invalid(format!("grid point {t} outside (0, 1)"));
            }
            if i > 0 && grid[i - 1] >= t {
                return invalid("grid must be strictly increasing");
            }
        }
        let m = grid.len();
        let cov = DMatrix::from_fn(m, m, |i, j| {
            let (s, t) = if grid[i] <= grid[j] { (grid[i], grid[j]) } else { (grid[j], grid[i]) };
            s * s * (1.0 - t)
        });
        let mut jitter = 0.0;
        loop {
            let mut a = cov.clone();
            for i in 0..m {
                a[(i, i)] += jitter;
            }
            if let Some(ch) = a.cholesky() {
                return Ok(LimitProcessSampler { grid: grid.to_vec(), factor: ch.l(), jitter });
            }
            jitter = if jitter == 0.0 { 1e-16 } else { jitter * 10.0 };
            if jitter > MAX_JITTER {
                return Err(Error::Degenerate(format!("covariance on {m} grid points is not positive definite even with jitter {MAX_JITTER}")));
            }
        }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Diagonal regularization that was needed, 0 if none.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> LimitProcessPath {
        let m = self.grid.len();
        let z = DVector::from_fn(m, |_, _| StandardNormal.sample(rng));
        let values = &self.factor * z;
        LimitProcessPath { grid: self.grid.clone(), values: values.iter().copied().collect() }
    }
}

/// One Gaussian draw of the limit process on `grid`.
pub fn sample_limit_process<R: Rng + ?Sized>(grid: &[f64], rng: &mut R) -> Result<LimitProcessPath> {
    Ok(LimitProcessSampler::new(grid)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn empty_grid() {
        let mut rng = RngStream::new(1, 0).rng();
        let p = sample_limit_process(&[], &mut rng).unwrap();
        assert!(p.grid.is_empty() && p.values.is_empty());
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(LimitProcessSampler::new(&[0.0, 0.5]).is_err());
        assert!(LimitProcessSampler::new(&[0.5, 1.0]).is_err());
        assert!(LimitProcessSampler::new(&[0.5, 0.4]).is_err());
        assert!(LimitProcessSampler::new(&[0.5, 0.5]).is_err());
    }

    #[test]
    fn moments_match_covariance() {
        let sampler = LimitProcessSampler::new(&[0.3, 0.5, 0.6]).unwrap();
        assert_eq!(sampler.jitter(), 0.0);
        let mut rng = RngStream::new(7, 0).rng();
        let draws = 100_000;
        let (mut s5, mut s36) = (0.0, 0.0);
        let (mut q5, mut q36) = (0.0, 0.0);
        for _ in 0..draws {
            let p = sampler.sample(&mut rng);
            let v5 = p.values[1] * p.values[1];
            let v36 = p.values[0] * p.values[2];
            s5 += v5;
            q5 += v5 * v5;
            s36 += v36;
            q36 += v36 * v36;
        }
        let nf = draws as f64;
        let (m5, m36) = (s5 / nf, s36 / nf);
        let se5 = ((q5 / nf - m5 * m5) / nf).sqrt();
        let se36 = ((q36 / nf - m36 * m36) / nf).sqrt();
        assert!((m5 - 0.125).abs() < 3.0 * se5, "{m5} +- {se5}");
        assert!((m36 - 0.036).abs() < 3.0 * se36, "{m36} +- {se36}");
    }

    #[test]
    fn fine_grid_factorizes() {
        let grid: Vec<f64> = (1..200).map(|i| i as f64 / 200.0).collect();
        let s = LimitProcessSampler::new(&grid).unwrap();
        assert!(s.jitter() <= MAX_JITTER);
    }
}
