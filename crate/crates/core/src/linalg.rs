//! Small dense eigenvalue routines.
//!
//! Matrices here are at most a few hundred rows, so a cyclic Jacobi sweep is
//! accurate and fast enough. Hermitian matrices are handled through the real
//! symmetric embedding `[[A, -B], [B, A]]` of `A + iB`, whose spectrum is the
//! Hermitian spectrum with every eigenvalue doubled.

use num_complex::Complex64;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a real symmetric `n x n` matrix (row-major), ascending.
///
/// Only the upper triangle is trusted; the input is symmetrised first.
pub fn symmetric_eigenvalues(matrix: &[f64], n: usize) -> Vec<f64> {
    assert_eq!(matrix.len(), n * n, "matrix is not {n}x{n}");
    let mut a = matrix.to_vec();
    for p in 0..n {
        for q in p + 1..n {
            let v = 0.5 * (a[p * n + q] + a[q * n + p]);
            a[p * n + q] = v;
            a[q * n + p] = v;
        }
    }

    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>();
    if scale == 0.0 {
        return vec![0.0; n];
    }

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q] * a[p * n + q])
            .sum();
        if off <= scale * 1e-32 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
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
    eig
}

/// Eigenvalues of a Hermitian `n x n` complex matrix (row-major), ascending.
///
/// The anti-Hermitian part of the input is ignored.
pub fn hermitian_eigenvalues(matrix: &[Complex64], n: usize) -> Vec<f64> {
    assert_eq!(matrix.len(), n * n, "matrix is not {n}x{n}");
    let is_real = matrix.iter().all(|z| z.im == 0.0);
    if is_real {
        let re: Vec<f64> = matrix.iter().map(|z| z.re).collect();
        return symmetric_eigenvalues(&re, n);
    }

    let m = 2 * n;
    let mut big = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let h = 0.5 * (matrix[i * n + j] + matrix[j * n + i].conj());
            big[i * m + j] = h.re;
            big[(i + n) * m + (j + n)] = h.re;
            big[i * m + (j + n)] = -h.im;
            big[(i + n) * m + j] = h.im;
        }
    }
    let doubled = symmetric_eigenvalues(&big, m);
    // Pairs are adjacent after sorting; average them to damp roundoff.
    doubled
        .chunks(2)
        .map(|pair| 0.5 * (pair[0] + pair[1]))
        .collect()
}

/// Largest deviation from Hermiticity, `max |A_ij - conj(A_ji)|`.
pub fn hermiticity_defect(matrix: &[Complex64], n: usize) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((matrix[i * n + j] - matrix[j * n + i].conj()).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_is_its_own_spectrum() {
        let m = [3.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 2.0];
        assert_eq!(symmetric_eigenvalues(&m, 3), vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_symmetric() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let e = symmetric_eigenvalues(&[2.0, 1.0, 1.0, 2.0], 2);
        assert!((e[0] - 1.0).abs() < 1e-14);
        assert!((e[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn pauli_y_spectrum() {
        let i = Complex64::new(0.0, 1.0);
        let z = Complex64::new(0.0, 0.0);
        let e = hermitian_eigenvalues(&[z, -i, i, z], 2);
        assert!((e[0] + 1.0).abs() < 1e-14);
        assert!((e[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trace_and_frobenius_are_preserved() {
        // Random symmetric 6x6 with a fixed pattern.
        let n = 6;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = ((i * 7 + j * 3) % 11) as f64 / 5.0 - 1.0;
                m[i * n + j] = v;
                m[j * n + i] = v;
            }
        }
        let e = symmetric_eigenvalues(&m, n);
        let trace: f64 = (0..n).map(|i| m[i * n + i]).sum();
        let frob: f64 = m.iter().map(|x| x * x).sum();
        assert!((e.iter().sum::<f64>() - trace).abs() < 1e-12);
        assert!((e.iter().map(|x| x * x).sum::<f64>() - frob).abs() < 1e-11);
    }
}
