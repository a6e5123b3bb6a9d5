//! Dense desk-scale linear algebra: complex LU determinant, cyclic Jacobi
//! for Hermitian spectra, real Cholesky.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const JACOBI_MAX_SWEEPS: usize = 60;
const JACOBI_TOL: f64 = 1e-13;

/// Determinant by LU factorization with partial (max-modulus) pivoting.
/// A singular matrix yields exactly zero.
pub fn det_direct(matrix: &DMatrix<Complex64>) -> Complex64 {
    assert!(matrix.is_square(), "determinant of a non-square matrix");
    let n = matrix.nrows();
    let mut a = matrix.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
            .expect("non-empty range");
        let pivot = a[(pivot_row, col)];
        if pivot.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot_row != col {
            a.swap_rows(pivot_row, col);
            det = -det;
        }
        det *= pivot;
        for row in col + 1..n {
            let factor = a[(row, col)] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            for k in col + 1..n {
                let upper = a[(col, k)];
                a[(row, k)] -= factor * upper;
            }
        }
    }
    det
}

/// Frobenius norm of a complex matrix.
pub fn frobenius(matrix: &DMatrix<Complex64>) -> f64 {
    matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Full spectrum of a Hermitian matrix by cyclic Jacobi rotations, sorted
/// descending.
///
/// The input must be Hermitian to within 1e-12·‖A‖_F. Sweeps stop once the
/// off-diagonal Frobenius norm falls below 1e-13·‖A‖_F.
pub fn hermitian_eigenvalues(matrix: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    if !matrix.is_square() {
        return Err(Error::Contract("eigenvalues of a non-square matrix".into()));
    }
    let n = matrix.nrows();
    let norm = frobenius(matrix);
    let asym = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (matrix[(i, j)] - matrix[(j, i)].conj()).norm())
        .fold(0.0, f64::max);
    if asym > 1e-12 * norm {
        return Err(Error::Contract(format!(
            "matrix is not Hermitian (max |A - A*| = {asym:.3e}, ‖A‖ = {norm:.3e})"
        )));
    }

    // row-major working copy; nalgebra storage is column-major
    let mut a: Vec<Complex64> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| matrix[(i, j)])
        .collect();
    for i in 0..n {
        a[i * n + i] = Complex64::new(a[i * n + i].re, 0.0);
    }

    let off_norm = |a: &[Complex64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let target = JACOBI_TOL * norm;
    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= target || n < 2 {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::Accuracy {
                what: format!("Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps"),
                estimate: off,
                target,
            });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, n, p, q, norm);
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    Ok(eig)
}

/// One Jacobi rotation annihilating a[p][q] (and a[q][p]).
fn rotate(a: &mut [Complex64], n: usize, p: usize, q: usize, norm: f64) {
    let apq = a[p * n + q];
    let b = apq.norm();
    if b == 0.0 || b < 1e-18 * norm {
        return;
    }
    let phase = apq / b;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = (aqq - app) / (2.0 * b);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let phase_conj = phase.conj();

    // A ← A U with U = diag(1, conj(phase)) · [[c, s], [-s, c]] on (p, q)
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q] * phase_conj;
        a[k * n + p] = akp * c - akq * s;
        a[k * n + q] = akp * s + akq * c;
    }
    // A ← U* A
    for k in 0..n {
        let bpk = a[p * n + k];
        let bqk = a[q * n + k] * phase;
        a[p * n + k] = bpk * c - bqk * s;
        a[q * n + k] = bpk * s + bqk * c;
    }
    a[p * n + q] = Complex64::new(0.0, 0.0);
    a[q * n + p] = Complex64::new(0.0, 0.0);
    a[p * n + p] = Complex64::new(app - t * b, 0.0);
    a[q * n + q] = Complex64::new(aqq + t * b, 0.0);
}

/// Eigenvalues of a real symmetric matrix, descending.
pub fn symmetric_eigenvalues(matrix: &DMatrix<f64>) -> Result<Vec<f64>> {
    hermitian_eigenvalues(&matrix.map(|x| Complex64::new(x, 0.0)))
}

/// Lower-triangular Cholesky factor L with L Lᵀ = A.
pub fn cholesky(matrix: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    assert!(matrix.is_square());
    let n = matrix.nrows();
    let scale = matrix.diagonal().iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut diag = matrix[(j, j)];
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if !(diag > 1e-14 * scale) {
            return Err(Error::Rank(format!(
                "matrix is not positive-definite (pivot {diag:.3e} at column {j})"
            )));
        }
        let ljj = diag.sqrt();
        l[(j, j)] = ljj;
        for i in j + 1..n {
            let mut v = matrix[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / ljj;
        }
    }
    Ok(l)
}

/// Solve L X = B for lower-triangular L.
pub fn forward_substitute(l: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let mut x = b.clone();
    for col in 0..b.ncols() {
        for i in 0..n {
            let mut v = x[(i, col)];
            for k in 0..i {
                v -= l[(i, k)] * x[(k, col)];
            }
            x[(i, col)] = v / l[(i, i)];
        }
    }
    x
}

/// Solve Lᵀ X = B for lower-triangular L.
pub fn backward_substitute_transpose(l: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let mut x = b.clone();
    for col in 0..b.ncols() {
        for i in (0..n).rev() {
            let mut v = x[(i, col)];
            for k in i + 1..n {
                v -= l[(k, i)] * x[(k, col)];
            }
            x[(i, col)] = v / l[(i, i)];
        }
    }
    x
}

/// Solve A X = B for symmetric positive-definite A.
pub fn spd_solve(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let l = cholesky(a)?;
    Ok(backward_substitute_transpose(&l, &forward_substitute(&l, b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lcg_matrix(n: usize, seed: u64) -> DMatrix<Complex64> {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        DMatrix::from_fn(n, n, |_, _| c(next(), next()))
    }

    fn cofactor_det(m: &DMatrix<Complex64>) -> Complex64 {
        let n = m.nrows();
        if n == 1 {
            return m[(0, 0)];
        }
        let mut total = c(0.0, 0.0);
        for j in 0..n {
            let minor = m.clone().remove_row(0).remove_column(j);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            total += m[(0, j)] * cofactor_det(&minor) * sign;
        }
        total
    }

    #[test]
    fn det_trivial() {
        let id = DMatrix::<Complex64>::identity(5, 5);
        assert!((det_direct(&id) - c(1.0, 0.0)).norm() < 1e-15);
        for k in 1..8 {
            let d = DMatrix::<Complex64>::identity(k, k) * c(2.0, 0.0);
            assert!((det_direct(&d) - c(2f64.powi(k as i32), 0.0)).norm() < 1e-12);
        }
        let singular = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        assert_eq!(det_direct(&singular), c(0.0, 0.0));
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        for seed in 1..6 {
            let m = lcg_matrix(6, seed);
            let lu = det_direct(&m);
            let cof = cofactor_det(&m);
            assert!((lu - cof).norm() < 1e-10 * cof.norm(), "seed {seed}");
        }
    }

    #[test]
    fn jacobi_small_cases() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(-3.0, 0.0),
            c(7.0, 0.0),
        ]));
        assert_eq!(hermitian_eigenvalues(&d).unwrap(), vec![7.0, 1.0, -3.0]);
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let e = symmetric_eigenvalues(&m).unwrap();
        assert!((e[0] - 3.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
        // complex off-diagonal: [[1, i], [-i, 1]] has spectrum {2, 0}
        let h = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)]);
        let e = hermitian_eigenvalues(&h).unwrap();
        assert!((e[0] - 2.0).abs() < 1e-14 && e[1].abs() < 1e-14);
    }

    #[test]
    fn jacobi_trace_identities() {
        let g = lcg_matrix(20, 42);
        let h = (&g + g.adjoint()) * c(0.5, 0.0);
        let e = hermitian_eigenvalues(&h).unwrap();
        let trace: f64 = (0..20).map(|i| h[(i, i)].re).sum();
        let sum: f64 = e.iter().sum();
        let sum_sq: f64 = e.iter().map(|x| x * x).sum();
        let fro2 = frobenius(&h).powi(2);
        assert!((sum - trace).abs() < 1e-10 * trace.abs().max(1.0));
        assert!((sum_sq - fro2).abs() < 1e-10 * fro2);
        assert!(e.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn jacobi_rejects_non_hermitian() {
        let m = lcg_matrix(4, 3);
        assert!(matches!(hermitian_eigenvalues(&m), Err(Error::Contract(_))));
    }

    #[test]
    fn cholesky_and_solve() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 2.0, 0.6, 2.0, 5.0, 1.0, 0.6, 1.0, 3.0]);
        let l = cholesky(&a).unwrap();
        assert!((&l * l.transpose() - &a).norm() < 1e-14);
        let b = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 2.0, 1.0, -1.0, 3.0]);
        let x = spd_solve(&a, &b).unwrap();
        assert!((&a * x - b).norm() < 1e-13);
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(cholesky(&indefinite), Err(Error::Rank(_))));
    }
}
