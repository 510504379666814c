use alloc::vec::Vec;

use super::{eigenvalues, LinalgError, Mat, ABS_FLOOR};
use crate::fmath;

/// Numerical rank by Householder QR with column pivoting.
///
/// Diagonal entries of R at or below `tol` (floored at `1e-12`) are treated as zero.
pub fn rank(a: &Mat, tol: f64) -> usize {
    let tol = tol.max(ABS_FLOOR);
    let (m, n) = (a.rows(), a.cols());
    let mut r = a.clone();
    let mut norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| r[(i, j)] * r[(i, j)]).sum())
        .collect();
    let steps = m.min(n);
    let mut rank = 0;
    for k in 0..steps {
        // pivot column with the largest remaining norm
        let (p, _) = (k..n).fold((k, -1.0), |best, j| {
            if norms[j] > best.1 {
                (j, norms[j])
            } else {
                best
            }
        });
        if p != k {
            for i in 0..m {
                let t = r[(i, k)];
                r[(i, k)] = r[(i, p)];
                r[(i, p)] = t;
            }
            norms.swap(k, p);
        }
        let alpha = fmath::sqrt((k..m).map(|i| r[(i, k)] * r[(i, k)]).sum());
        if alpha <= tol {
            break;
        }
        rank += 1;
        let beta = if r[(k, k)] > 0.0 { -alpha } else { alpha };
        // v = x - beta e1, stored in place
        r[(k, k)] -= beta;
        let vnorm2: f64 = (k..m).map(|i| r[(i, k)] * r[(i, k)]).sum();
        if vnorm2 > 0.0 {
            for j in (k + 1)..n {
                let dot: f64 = (k..m).map(|i| r[(i, k)] * r[(i, j)]).sum();
                let f = 2.0 * dot / vnorm2;
                for i in k..m {
                    let vi = r[(i, k)];
                    r[(i, j)] -= f * vi;
                }
            }
        }
        r[(k, k)] = beta;
        for j in (k + 1)..n {
            norms[j] = ((k + 1)..m).map(|i| r[(i, j)] * r[(i, j)]).sum();
        }
    }
    rank
}

/// PBH test: for every eigenvalue λ of `a` with `Re λ ≥ −1e-10`,
/// `rank [a − λI, b] = n`, with rank threshold `1e-9 · ‖a‖`.
///
/// Complex λ are handled through the real embedding
/// `[[Re M, −Im M], [Im M, Re M]]`, whose rank is twice the complex rank.
pub fn is_stabilizable(a: &Mat, b: &Mat) -> Result<bool, LinalgError> {
    super::require_square(a)?;
    let n = a.rows();
    if b.rows() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: (n, b.cols()),
            got: (b.rows(), b.cols()),
        });
    }
    let spectrum = eigenvalues(a)?;
    let tol = 1e-9 * a.norm().max(b.norm()).max(1.0);
    for lam in spectrum.values.iter().filter(|z| z.re >= -1e-10) {
        let ok = if lam.im == 0.0 {
            let shifted = a.add_diag(-lam.re);
            rank(&shifted.hstack(b), tol) == n
        } else {
            let m = n + b.cols();
            let embed = Mat::from_fn(2 * n, 2 * m, |i, j| {
                let (bi, ii) = (i / n, i % n);
                let (bj, jj) = (j / m, j % m);
                let (re, im) = if jj < n {
                    (a[(ii, jj)] - if ii == jj { lam.re } else { 0.0 }, if ii == jj { -lam.im } else { 0.0 })
                } else {
                    (b[(ii, jj - n)], 0.0)
                };
                match (bi, bj) {
                    (0, 0) | (1, 1) => re,
                    (0, 1) => -im,
                    _ => im,
                }
            });
            rank(&embed, tol) == 2 * n
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_simple_matrices() {
        assert_eq!(rank(&Mat::identity(3), 1e-9), 3);
        assert_eq!(rank(&Mat::from_rows(&[[1.0, 1.0], [1.0, 1.0]]), 1e-9), 1);
        assert_eq!(rank(&Mat::zeros(2, 3), 1e-9), 0);
        assert_eq!(rank(&Mat::from_rows(&[[0.0, 1.0, 0.0], [1.0, 2.0, 1.0]]), 1e-9), 2);
    }

    #[test]
    fn e1_pair_stabilizable() {
        let a = Mat::from_rows(&[[0.0, 1.0], [-1.0, 2.0]]);
        let b = Mat::col_vec(&[0.0, 1.0]);
        assert!(is_stabilizable(&a, &b).unwrap());
    }

    #[test]
    fn unstable_uncontrollable_scalar() {
        assert!(!is_stabilizable(&Mat::from_rows(&[[1.0]]), &Mat::from_rows(&[[0.0]])).unwrap());
    }

    #[test]
    fn pbh_fails_at_unstable_mode() {
        let a = Mat::diag(&[-1.0, 5.0]);
        let b = Mat::col_vec(&[1.0, 0.0]);
        assert!(!is_stabilizable(&a, &b).unwrap());
    }

    #[test]
    fn stable_uncontrollable_mode_is_fine() {
        let a = Mat::diag(&[-1.0, 5.0]);
        let b = Mat::col_vec(&[0.0, 1.0]);
        assert!(is_stabilizable(&a, &b).unwrap());
    }

    #[test]
    fn complex_uncontrollable_pair_detected() {
        // rotation block decoupled from the input
        let a = Mat::from_rows(&[[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, -2.0]]);
        let b = Mat::col_vec(&[0.0, 0.0, 1.0]);
        assert!(!is_stabilizable(&a, &b).unwrap());
        let b2 = Mat::col_vec(&[0.0, 1.0, 1.0]);
        assert!(is_stabilizable(&a, &b2).unwrap());
    }
}
