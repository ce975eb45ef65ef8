//! Dense symmetric linear algebra for the small covariance matrices used
//! by the Gaussian-process sampler: Cholesky with escalating diagonal
//! jitter, and cyclic Jacobi eigenvalues for semidefiniteness checks.

use crate::error::{Error, Result};

/// Jitter levels tried in order before giving up.
pub const JITTER_LADDER: [f64; 4] = [0.0, 1e-12, 1e-10, 1e-8];

/// Lower-triangular Cholesky factor of a symmetric matrix, with the
/// jitter that was needed to make the factorization go through.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    pub dim: usize,
    /// Row-major lower triangle, including the diagonal.
    pub lower: Vec<f64>,
    /// Diagonal jitter added before the successful attempt.
    pub jitter: f64,
}

impl CholeskyFactor {
    /// y = L·x.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        let n = self.dim;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..=i {
                acc += self.lower[i * n + j] * x[j];
            }
            y[i] = acc;
        }
        y
    }
}

fn try_cholesky(matrix: &[f64], n: usize, jitter: f64) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = matrix[i * n + j];
            if i == j {
                sum += jitter;
            }
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return None;
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Cholesky factorization of a symmetric positive (semi)definite matrix
/// (row-major, n×n), escalating through the jitter ladder on failure.
pub fn cholesky_with_jitter(matrix: &[f64], n: usize) -> Result<CholeskyFactor> {
    if matrix.len() != n * n {
        return Err(Error::invalid(format!(
            "cholesky: matrix has {} entries, expected {}",
            matrix.len(),
            n * n
        )));
    }
    for &jitter in &JITTER_LADDER {
        if let Some(lower) = try_cholesky(matrix, n, jitter) {
            return Ok(CholeskyFactor { dim: n, lower, jitter });
        }
    }
    Err(Error::Factorization(format!(
        "matrix is not positive definite even with jitter {:.1e}",
        JITTER_LADDER[JITTER_LADDER.len() - 1]
    )))
}

/// Eigenvalues of a symmetric matrix (row-major, n×n) by cyclic Jacobi
/// rotations; returned ascending.
pub fn symmetric_eigenvalues(matrix: &[f64], n: usize) -> Result<Vec<f64>> {
    if matrix.len() != n * n {
        return Err(Error::invalid("eigenvalues: dimension mismatch"));
    }
    let mut a = matrix.to_vec();
    // Rotations assume an exactly symmetric input; average the triangles.
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = avg;
            a[j * n + i] = avg;
        }
    }
    let max_sweeps = 64;
    for _ in 0..max_sweeps {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i * n + j] * a[i * n + j];
            }
        }
        if off.sqrt() < 1e-15 * (1.0 + frobenius(&a, n)) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

fn frobenius(a: &[f64], n: usize) -> f64 {
    a.iter().take(n * n).map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cholesky_reconstructs_spd_matrix() {
        let m = vec![4.0, 2.0, 2.0, 2.0, 5.0, 1.0, 2.0, 1.0, 6.0];
        let f = cholesky_with_jitter(&m, 3).unwrap();
        assert_eq!(f.jitter, 0.0);
        // L·Lᵀ == M entrywise.
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0.0;
                for k in 0..3 {
                    acc += f.lower[i * 3 + k] * f.lower[j * 3 + k];
                }
                assert_relative_eq!(acc, m[i * 3 + j], max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn near_singular_matrix_needs_jitter() {
        // Rank-1 matrix: plain Cholesky fails, the ladder rescues it.
        let m = vec![1.0, 1.0, 1.0, 1.0];
        let f = cholesky_with_jitter(&m, 2).unwrap();
        assert!(f.jitter > 0.0);
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let m = vec![1.0, 2.0, 2.0, 1.0];
        assert!(cholesky_with_jitter(&m, 2).is_err());
    }

    #[test]
    fn eigenvalues_of_known_matrix() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let eig = symmetric_eigenvalues(&[2.0, 1.0, 1.0, 2.0], 2).unwrap();
        assert_relative_eq!(eig[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(eig[1], 3.0, max_relative = 1e-12);
    }

    #[test]
    fn eigenvalues_match_trace_and_determinant() {
        let m = vec![4.0, 1.0, 0.5, 1.0, 3.0, 0.25, 0.5, 0.25, 2.0];
        let eig = symmetric_eigenvalues(&m, 3).unwrap();
        let trace: f64 = eig.iter().sum();
        assert_relative_eq!(trace, 9.0, max_relative = 1e-12);
        let det = eig.iter().product::<f64>();
        // det by cofactor expansion.
        let expect = 4.0 * (3.0 * 2.0 - 0.25 * 0.25) - 1.0 * (1.0 * 2.0 - 0.25 * 0.5)
            + 0.5 * (1.0 * 0.25 - 3.0 * 0.5);
        assert_relative_eq!(det, expect, max_relative = 1e-11);
    }

    #[test]
    fn mul_vec_applies_lower_triangle() {
        let f = CholeskyFactor { dim: 2, lower: vec![2.0, 0.0, 1.0, 3.0], jitter: 0.0 };
        let y = f.mul_vec(&[1.0, 1.0]);
        assert_eq!(y, vec![2.0, 4.0]);
    }
}
