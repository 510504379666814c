use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{require_square, LinalgError, Mat};
use crate::fmath;

/// Eigenvalues of a general real square matrix.
///
/// Complex eigenvalues come in adjacent conjugate pairs.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<Complex64>,
    pub vectors: Option<Mat>,
}

impl Spectrum {
    /// Largest real part (spectral abscissa); `-inf` for an empty matrix.
    pub fn abscissa(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, z| m.max(z.re))
    }

    pub fn is_hurwitz(&self) -> bool {
        self.values.iter().all(|z| z.re < 0.0)
    }
}

const ITER_PER_EIGENVALUE: usize = 60;

/// Eigenvalues via Gaussian Hessenberg reduction followed by Francis
/// double-shift QR iteration.
pub fn eigenvalues(a: &Mat) -> Result<Spectrum, LinalgError> {
    require_square(a)?;
    let n = a.rows();
    if n == 0 {
        return Ok(Spectrum {
            values: Vec::new(),
            vectors: None,
        });
    }
    // 1-based working copy keeps the classic index arithmetic readable.
    let mut h = vec![vec![0.0f64; n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            h[i + 1][j + 1] = a[(i, j)];
        }
    }
    balance(&mut h, n);
    to_hessenberg(&mut h, n);
    let (wr, wi) = hessenberg_qr(&mut h, n)?;
    let values = (1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect();
    Ok(Spectrum {
        values,
        vectors: None,
    })
}

/// Diagonal similarity scaling by powers of two to equalize row/column norms.
fn balance(a: &mut [Vec<f64>], n: usize) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 1..=n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 1..=n {
                        a[i][j] *= g;
                    }
                    for j in 1..=n {
                        a[j][i] *= f;
                    }
                }
            }
        }
    }
}

/// Reduction to upper Hessenberg form by stabilized elimination.
fn to_hessenberg(a: &mut [Vec<f64>], n: usize) {
    for m in 2..n {
        let mut x = 0.0f64;
        let mut i = m;
        for j in m..=n {
            if a[j][m - 1].abs() > x.abs() {
                x = a[j][m - 1];
                i = j;
            }
        }
        if i != m {
            for j in (m - 1)..=n {
                let t = a[i][j];
                a[i][j] = a[m][j];
                a[m][j] = t;
            }
            for row in a.iter_mut().take(n + 1).skip(1) {
                row.swap(i, m);
            }
        }
        if x != 0.0 {
            for i in (m + 1)..=n {
                let mut y = a[i][m - 1];
                if y != 0.0 {
                    y /= x;
                    a[i][m - 1] = y;
                    for j in m..=n {
                        a[i][j] -= y * a[m][j];
                    }
                    for j in 1..=n {
                        a[j][m] += y * a[j][i];
                    }
                }
            }
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            if i > j + 1 {
                a[i][j] = 0.0;
            }
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

#[allow(clippy::many_single_char_names, unused_assignments)]
fn hessenberg_qr(a: &mut [Vec<f64>], n: usize) -> Result<(Vec<f64>, Vec<f64>), LinalgError> {
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    let (mut p, mut q, mut r) = (0.0f64, 0.0f64, 0.0f64);
    let (mut x, mut y, mut z, mut w);
    while nn >= 1 {
        let mut its = 0;
        let mut l;
        loop {
            l = nn;
            while l >= 2 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            x = a[nn][nn];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
            } else {
                y = a[nn - 1][nn - 1];
                w = a[nn][nn - 1] * a[nn - 1][nn];
                if l == nn - 1 {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = fmath::sqrt(q.abs());
                    x += t;
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        wr[nn - 1] = x + z;
                        wr[nn] = x + z;
                        if z != 0.0 {
                            wr[nn] = x - w / z;
                        }
                        wi[nn - 1] = 0.0;
                        wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = x + p;
                        wr[nn] = x + p;
                        wi[nn - 1] = z;
                        wi[nn] = -z;
                    }
                    nn -= 2;
                } else {
                    if its == ITER_PER_EIGENVALUE {
                        return Err(LinalgError::NoConvergence);
                    }
                    if its == 10 || its == 20 || its == 40 {
                        // exceptional shift
                        t += x;
                        for i in 1..=nn {
                            a[i][i] -= x;
                        }
                        let s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    loop {
                        z = a[m][m];
                        r = x - z;
                        let s0 = y - z;
                        p = (r * s0 - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - r - s0;
                        r = a[m + 2][m + 1];
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in (m + 2)..=nn {
                        a[i][i - 2] = 0.0;
                        if i != m + 2 {
                            a[i][i - 3] = 0.0;
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = 0.0;
                            if k != nn - 1 {
                                r = a[k + 2][k - 1];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign(fmath::sqrt(p * p + q * q + r * r), p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    a[k][k - 1] = -a[k][k - 1];
                                }
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                p = a[k][j] + q * a[k + 1][j];
                                if k != nn - 1 {
                                    p += r * a[k + 2][j];
                                    a[k + 2][j] -= p * z;
                                }
                                a[k + 1][j] -= p * y;
                                a[k][j] -= p * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                p = x * a[i][k] + y * a[i][k + 1];
                                if k != nn - 1 {
                                    p += z * a[i][k + 2];
                                    a[i][k + 2] -= p * r;
                                }
                                a[i][k + 1] -= p * q;
                                a[i][k] -= p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn < 2 || l + 1 >= nn {
                break;
            }
        }
    }
    Ok((wr, wi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn identity_all_ones() {
        let s = eigenvalues(&Mat::identity(4)).unwrap();
        assert!(s.values.iter().all(|z| (z.re - 1.0).abs() < 1e-14 && z.im == 0.0));
    }

    #[test]
    fn e1_a_double_root() {
        // λ² − 2λ + 1
        let s = eigenvalues(&Mat::from_rows(&[[0.0, 1.0], [-1.0, 2.0]])).unwrap();
        for z in &s.values {
            assert!((z.re - 1.0).abs() < 1e-7 && z.im.abs() < 1e-7, "{z}");
        }
    }

    #[test]
    fn rotation_pure_imaginary() {
        let s = sorted(eigenvalues(&Mat::from_rows(&[[0.0, 1.0], [-1.0, 0.0]])).unwrap().values);
        assert!(s[0].re.abs() < 1e-14 && (s[0].im + 1.0).abs() < 1e-14);
        assert!(s[1].re.abs() < 1e-14 && (s[1].im - 1.0).abs() < 1e-14);
    }

    #[test]
    fn companion_three_by_three() {
        // roots −1, ±i√5 of λ³ + λ² + 5λ + 5
        let a = Mat::from_rows(&[[0.0, 1.0, 1.0], [1.0, 2.0, 1.0], [-2.0, -10.0, -3.0]]);
        let s = sorted(eigenvalues(&a).unwrap().values);
        let r5 = fmath::sqrt(5.0);
        assert!((s[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((s[1] - Complex64::new(0.0, -r5)).norm() < 1e-12);
        assert!((s[2] - Complex64::new(0.0, r5)).norm() < 1e-12);
    }

    #[test]
    fn triangular_reads_diagonal() {
        let a = Mat::from_rows(&[[3.0, 7.0, -2.0], [0.0, -1.0, 4.0], [0.0, 0.0, 0.5]]);
        let s = sorted(eigenvalues(&a).unwrap().values);
        let re: Vec<f64> = s.iter().map(|z| z.re).collect();
        assert!((re[0] + 1.0).abs() < 1e-13 && (re[1] - 0.5).abs() < 1e-13 && (re[2] - 3.0).abs() < 1e-13);
    }
}
