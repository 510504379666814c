use super::{require_square, LinalgError, Mat, ABS_FLOOR};
use crate::fmath;

/// Lower-triangular Cholesky factor `l` with `l · lᵀ = s`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    pub l: Mat,
}

/// Certifies `s > 0` by Cholesky factorization.
///
/// Returns [`LinalgError::NotPD`] when any pivot is not above
/// `max(1e-12, 1e-14 · max|s|)`. Only the lower triangle of `s` is read.
pub fn chol_pd(s: &Mat) -> Result<Cholesky, LinalgError> {
    require_square(s)?;
    let n = s.rows();
    let tol = ABS_FLOOR.max(1e-14 * s.max_abs());
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let mut d = s[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > tol) {
            return Err(LinalgError::NotPD { index: j, pivot: d });
        }
        let djj = fmath::sqrt(d);
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut v = s[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / djj;
        }
    }
    Ok(Cholesky { l })
}
