use alloc::vec::Vec;

use super::{require_square, LinalgError, Mat, ABS_FLOOR};

/// Solves `a · X = b` by LU factorization with partial pivoting.
pub fn lu_solve(a: &Mat, b: &Mat) -> Result<Mat, LinalgError> {
    require_square(a)?;
    let n = a.rows();
    if b.rows() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: (n, b.cols()),
            got: (b.rows(), b.cols()),
        });
    }
    let (lu, perm) = factor(a)?;
    let mut x = Mat::zeros(n, b.cols());
    let mut col: Vec<f64> = Vec::with_capacity(n);
    for c in 0..b.cols() {
        col.clear();
        col.extend(perm.iter().map(|&p| b[(p, c)]));
        // forward: L has unit diagonal
        for i in 0..n {
            let mut s = col[i];
            for k in 0..i {
                s -= lu[(i, k)] * col[k];
            }
            col[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = col[i];
            for k in (i + 1)..n {
                s -= lu[(i, k)] * col[k];
            }
            col[i] = s / lu[(i, i)];
        }
        for i in 0..n {
            x[(i, c)] = col[i];
        }
    }
    Ok(x)
}

pub fn inverse(a: &Mat) -> Result<Mat, LinalgError> {
    lu_solve(a, &Mat::identity(a.rows()))
}

fn factor(a: &Mat) -> Result<(Mat, Vec<usize>), LinalgError> {
    let n = a.rows();
    let tol = (ABS_FLOOR * a.max_abs()).max(f64::MIN_POSITIVE);
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, lu[(i, k)].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pmax >= tol) || pmax == 0.0 {
            return Err(LinalgError::SingularMatrix);
        }
        if p != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = t;
            }
            perm.swap(k, p);
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let m = lu[(i, k)] / pivot;
            lu[(i, k)] = m;
            if m != 0.0 {
                for j in (k + 1)..n {
                    lu[(i, j)] -= m * lu[(k, j)];
                }
            }
        }
    }
    Ok((lu, perm))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_returns_rhs() {
        let b = Mat::from_rows(&[[1.0, -2.0], [3.5, 0.0], [7.0, 1e-3]]);
        assert_eq!(lu_solve(&Mat::identity(3), &b).unwrap(), b);
    }

    #[test]
    fn inverse_of_e1_p() {
        // det = 1/9, cofactor inverse [[6,3],[3,3]]
        let p = Mat::from_rows(&[[1.0 / 3.0, -1.0 / 3.0], [-1.0 / 3.0, 2.0 / 3.0]]);
        let x = lu_solve(&p, &Mat::identity(2)).unwrap();
        let expected = Mat::from_rows(&[[6.0, 3.0], [3.0, 3.0]]);
        assert!(x.max_abs_diff(&expected) < 1e-13, "{x:?}");
    }

    #[test]
    fn rank_deficient_is_singular() {
        let a = Mat::from_rows(&[[1.0, 1.0], [1.0, 1.0]]);
        assert_eq!(
            lu_solve(&a, &Mat::identity(2)),
            Err(LinalgError::SingularMatrix)
        );
    }

    #[test]
    fn zero_matrix_is_singular() {
        assert_eq!(
            lu_solve(&Mat::zeros(2, 2), &Mat::identity(2)),
            Err(LinalgError::SingularMatrix)
        );
    }
}
