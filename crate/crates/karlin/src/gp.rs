//! Sampling of the limiting Gaussian processes.
//!
//! The limit of the normalized threshold-count paths is a centered
//! Gaussian vector over (time, threshold) pairs with covariance given by
//! the limit kernel; drawing from it needs the kernel assembled on a
//! grid and factorized. A Wiener sampler on arbitrary grids covers the
//! θ = 1 boundary case, whose limit is standard Brownian motion.

use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::linalg::{cholesky_with_jitter, CholeskyFactor};
use crate::seed::replication_rng;
use crate::theory::{cov_limit, KernelParams};

/// Limit covariance kernel assembled over a time grid for thresholds
/// 1..=nu, with its Cholesky factor.
///
/// Row/column r encodes the pair (g, i) as r = g·nu + (i − 1): thresholds
/// vary fastest, grid times slowest.
#[derive(Debug, Clone, Serialize)]
pub struct GridKernelMatrix {
    pub grid: Vec<f64>,
    pub nu: u32,
    pub theta: f64,
    /// Row-major dense symmetric matrix of dimension (|grid|·nu)².
    pub matrix: Vec<f64>,
    /// Diagonal jitter the factorization needed; zero when the assembled
    /// matrix was numerically positive definite as-is.
    pub jitter: f64,
    #[serde(skip)]
    factor: CholeskyFactor,
}

impl GridKernelMatrix {
    pub fn dim(&self) -> usize {
        self.grid.len() * self.nu as usize
    }

    /// Flattened row/column index of the (grid position, threshold) pair.
    pub fn index(&self, g: usize, i: u32) -> usize {
        g * self.nu as usize + (i - 1) as usize
    }

    /// Kernel entry for (grid[g], threshold i) against (grid[h], threshold j).
    pub fn entry(&self, g: usize, i: u32, h: usize, j: u32) -> f64 {
        self.matrix[self.index(g, i) * self.dim() + self.index(h, j)]
    }

    pub fn cholesky(&self) -> &CholeskyFactor {
        &self.factor
    }
}

fn check_positive_ascending(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("time grid must not be empty"));
    }
    let mut prev = 0.0;
    for &t in grid {
        if !t.is_finite() || t <= prev {
            return Err(Error::invalid(format!(
                "time grid must be strictly ascending and positive, got entry {t}"
            )));
        }
        prev = t;
    }
    Ok(())
}

/// Assemble the limit kernel over a grid of times and thresholds
/// 1..=nu, and factorize it. Times may exceed one: the kernel is
/// homogeneous, so any horizon is meaningful.
pub fn build_kernel_matrix(params: KernelParams, grid: &[f64]) -> Result<GridKernelMatrix> {
    check_positive_ascending(grid)?;
    let nu = params.nu;
    let dim = grid.len() * nu as usize;
    let mut matrix = vec![0.0; dim * dim];
    for g in 0..grid.len() {
        for i in 1..=nu {
            let r = g * nu as usize + (i - 1) as usize;
            for h in 0..grid.len() {
                for j in 1..=nu {
                    let c = h * nu as usize + (j - 1) as usize;
                    if c < r {
                        continue;
                    }
                    let v = cov_limit(i, j, grid[g], grid[h], params.theta)?;
                    matrix[r * dim + c] = v;
                    matrix[c * dim + r] = v;
                }
            }
        }
    }
    let factor = cholesky_with_jitter(&matrix, dim)?;
    Ok(GridKernelMatrix {
        grid: grid.to_vec(),
        nu,
        theta: params.theta,
        matrix,
        jitter: factor.jitter,
        factor,
    })
}

/// Draw centered Gaussian vectors with the kernel's covariance: one
/// flattened sample per replication, through per-replication seed
/// streams.
pub fn sample_gaussian_paths(
    kernel: &GridKernelMatrix,
    master_seed: u64,
    reps: u64,
) -> Vec<Vec<f64>> {
    let dim = kernel.dim();
    (0..reps)
        .map(|rep| {
            let mut rng = replication_rng(master_seed, rep);
            let z: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            kernel.factor.mul_vec(&z)
        })
        .collect()
}

/// Draw Wiener paths on an ascending grid of nonnegative times, as
/// cumulative sums of independent increments; a grid time of zero
/// yields exactly zero.
pub fn sample_wiener(grid: &[f64], master_seed: u64, reps: u64) -> Result<Vec<Vec<f64>>> {
    if grid.is_empty() {
        return Err(Error::invalid("time grid must not be empty"));
    }
    let mut prev = 0.0;
    for &t in grid {
        if !t.is_finite() || t < prev || (t == prev && t != 0.0) {
            return Err(Error::invalid(format!(
                "wiener grid must be nonnegative and strictly ascending, got entry {t}"
            )));
        }
        prev = t;
    }
    Ok((0..reps)
        .map(|rep| {
            let mut rng = replication_rng(master_seed, rep);
            let mut w = 0.0;
            let mut prev_t = 0.0;
            grid.iter()
                .map(|&t| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    w += (t - prev_t).sqrt() * z;
                    prev_t = t;
                    w
                })
                .collect()
        })
        .collect())
}
