use super::{eigenvalues, lu_solve, require_square, LinalgError, Mat};

/// Solves `m·P + P·mᵀ + q = 0` for symmetric `P`.
///
/// Uses the row-major vectorization `(m ⊗ I + I ⊗ m) vec(P) = −vec(q)`.
/// Fails with [`LinalgError::SingularSylvester`] when two eigenvalues of `m`
/// sum to zero within `1e-10 · max(1, ‖m‖)`.
pub fn solve_lyapunov(m: &Mat, q: &Mat) -> Result<Mat, LinalgError> {
    require_square(m)?;
    let n = m.rows();
    if q.rows() != n || q.cols() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: (n, n),
            got: (q.rows(), q.cols()),
        });
    }
    let spectrum = eigenvalues(m)?;
    let tol = 1e-10 * m.norm().max(1.0);
    for (i, a) in spectrum.values.iter().enumerate() {
        for b in &spectrum.values[i..] {
            if (a + b).norm() <= tol {
                return Err(LinalgError::SingularSylvester);
            }
        }
    }
    let eye = Mat::identity(n);
    let op = &m.kron(&eye) + &eye.kron(m);
    let rhs = Mat::from_vec(n * n, 1, q.scale(-1.0).into_vec());
    let p = lu_solve(&op, &rhs).map_err(|e| match e {
        LinalgError::SingularMatrix => LinalgError::SingularSylvester,
        other => other,
    })?;
    Ok(Mat::from_vec(n, n, p.into_vec()).symmetrize())
}
