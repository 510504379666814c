use alloc::vec::Vec;

use super::{require_square, LinalgError, Mat};
use crate::fmath;

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymSpectrum {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: Mat,
}

impl SymSpectrum {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `V · diag(values) · Vᵀ`.
    pub fn reconstruct(&self) -> Mat {
        let v = &self.vectors;
        let vd = Mat::from_fn(v.rows(), v.cols(), |i, j| v[(i, j)] * self.values[j]);
        &vd * &v.transpose()
    }
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigen-decomposition.
///
/// Fails with [`LinalgError::NotSymmetric`] when `max|s - sᵀ| > 1e-10`.
pub fn sym_eig(s: &Mat) -> Result<SymSpectrum, LinalgError> {
    require_square(s)?;
    let asymmetry = s.asymmetry();
    if asymmetry > 1e-10 {
        return Err(LinalgError::NotSymmetric { asymmetry });
    }
    let n = s.rows();
    let mut a = s.symmetrize();
    let mut v = Mat::identity(n);
    let scale = a.norm();

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off == 0.0 || fmath::sqrt(off) <= f64::EPSILON * 1e-3 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = {
                    let r = 1.0 / (theta.abs() + fmath::sqrt(theta * theta + 1.0));
                    if theta < 0.0 {
                        -r
                    } else {
                        r
                    }
                };
                let c = 1.0 / fmath::sqrt(t * t + 1.0);
                let sn = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    let np = c * akp - sn * akq;
                    let nq = sn * akp + c * akq;
                    a[(k, p)] = np;
                    a[(p, k)] = np;
                    a[(k, q)] = nq;
                    a[(q, k)] = nq;
                }
                a[(p, p)] -= t * apq;
                a[(q, q)] += t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Mat::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymSpectrum { values, vectors })
}
