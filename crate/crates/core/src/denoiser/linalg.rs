//! Small dense row-major matrix helpers for the Gaussian oracle. Sizes stay
//! at `N*D <= 128`, so direct O(n^3) routines are plenty.

/// `out = a * b` for `a: n x m`, `b: m x p`.
pub(crate) fn matmul(a: &[f64], b: &[f64], n: usize, m: usize, p: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * p];
    for i in 0..n {
        for l in 0..m {
            let aval = a[i * m + l];
            if aval == 0.0 {
                continue;
            }
            for j in 0..p {
                out[i * p + j] += aval * b[l * p + j];
            }
        }
    }
    out
}

pub(crate) fn matvec(a: &[f64], x: &[f64], n: usize, m: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for i in 0..n {
        let row = &a[i * m..(i + 1) * m];
        out[i] = row.iter().zip(x).map(|(r, v)| r * v).sum();
    }
    out
}

/// Cholesky factor L (lower triangular, row-major) of a symmetric
/// positive-definite matrix. Returns `None` if a pivot is not positive.
pub(crate) fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j];
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l[i * n + j] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Solves `L L^T x = b` given the Cholesky factor.
pub(crate) fn cholesky_solve(l: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i * n + k] * y[k];
        }
        y[i] = sum / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in i + 1..n {
            sum -= l[k * n + i] * x[k];
        }
        x[i] = sum / l[i * n + i];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_and_matvec() {
        let a = [1.0, 2.0, 3.0, 4.0]; // 2x2
        let b = [0.0, 1.0, 1.0, 0.0];
        assert_eq!(matmul(&a, &b, 2, 2, 2), vec![2.0, 1.0, 4.0, 3.0]);
        assert_eq!(matvec(&a, &[1.0, -1.0], 2, 2), vec![-1.0, -1.0]);
    }

    #[test]
    fn cholesky_solves_spd_system() {
        // A = [[4,2],[2,3]], b = [2,1] -> x = [0.5, 0]
        let a = [4.0, 2.0, 2.0, 3.0];
        let l = cholesky(&a, 2).unwrap();
        let x = cholesky_solve(&l, &[2.0, 1.0], 2);
        assert!((x[0] - 0.5).abs() < 1e-12);
        assert!(x[1].abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = [1.0, 2.0, 2.0, 1.0]; // eigenvalues 3, -1
        assert!(cholesky(&a, 2).is_none());
    }

    #[test]
    fn cholesky_random_spd_round_trip() {
        use crate::rng::seeded_rng;
        use rand::Rng;
        let mut rng = seeded_rng(41);
        for n in [1, 3, 8, 17] {
            // SPD via G G^T + I.
            let g: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut a = matmul(&g, &transpose(&g, n), n, n, n);
            for i in 0..n {
                a[i * n + i] += 1.0;
            }
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let l = cholesky(&a, n).unwrap();
            let x = cholesky_solve(&l, &b, n);
            let back = matvec(&a, &x, n, n);
            for (u, v) in back.iter().zip(&b) {
                assert!((u - v).abs() < 1e-9);
            }
        }
    }

    fn transpose(a: &[f64], n: usize) -> Vec<f64> {
        let mut t = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                t[j * n + i] = a[i * n + j];
            }
        }
        t
    }
}
