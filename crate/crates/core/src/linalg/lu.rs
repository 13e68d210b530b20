use num_complex::Complex64;

use super::{ComplexMatrix, LinalgError};

/// Relative pivot size below which the matrix is treated as singular.
const PIVOT_TOLERANCE: f64 = 1e-14;

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn lu_solve(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::Dimension(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if b.len() != n {
        return Err(LinalgError::Dimension(format!(
            "right-hand side has length {}, matrix is {n}x{n}",
            b.len()
        )));
    }

    let threshold = PIVOT_TOLERANCE * a.norm_inf();
    let mut lu = a.data().to_vec();
    let mut x = b.to_vec();

    for k in 0..n {
        let (p, pivot) = (k..n)
            .map(|i| (i, lu[i * n + k].norm()))
            .fold(
                (k, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if pivot < threshold || pivot == 0.0 {
            return Err(LinalgError::SingularMatrix { pivot, threshold });
        }
        if p != k {
            for j in 0..n {
                lu.swap(k * n + j, p * n + j);
            }
            x.swap(k, p);
        }
        let inv = lu[k * n + k].inv();
        for i in k + 1..n {
            let factor = lu[i * n + k] * inv;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            lu[i * n + k] = factor;
            for j in k + 1..n {
                let u = lu[k * n + j];
                lu[i * n + j] -= factor * u;
            }
            let xk = x[k];
            x[i] -= factor * xk;
        }
    }

    for k in (0..n).rev() {
        let mut acc = x[k];
        for j in k + 1..n {
            acc -= lu[k * n + j] * x[j];
        }
        x[k] = acc / lu[k * n + k];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec_norm_inf(v: &[Complex64]) -> f64 {
        v.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_returns_rhs() {
        let b = vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, -1.0)];
        let x = lu_solve(&ComplexMatrix::identity(3), &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn diagonal_system() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 4.0)],
        ])
        .unwrap();
        let x = lu_solve(&a, &[c(2.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert!((x[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((x[1] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let x = lu_solve(&a, &[c(3.0, 0.0), c(5.0, 0.0)]).unwrap();
        assert_eq!(x, vec![c(5.0, 0.0), c(3.0, 0.0)]);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 1.0), c(2.0, 2.0)],
            vec![c(2.0, 2.0), c(4.0, 4.0)],
        ])
        .unwrap();
        assert!(matches!(
            lu_solve(&a, &[c(1.0, 0.0), c(1.0, 0.0)]),
            Err(LinalgError::SingularMatrix { .. })
        ));
        assert!(matches!(
            lu_solve(&ComplexMatrix::zeros(2, 2), &[c(1.0, 0.0), c(1.0, 0.0)]),
            Err(LinalgError::SingularMatrix { .. })
        ));
    }

    #[test]
    fn dimension_errors() {
        assert!(matches!(
            lu_solve(&ComplexMatrix::zeros(2, 3), &[c(1.0, 0.0), c(1.0, 0.0)]),
            Err(LinalgError::Dimension(_))
        ));
        assert!(matches!(
            lu_solve(&ComplexMatrix::identity(2), &[c(1.0, 0.0)]),
            Err(LinalgError::Dimension(_))
        ));
    }

    #[test]
    fn multiply_back_residual_on_fixed_4x4() {
        let a = ComplexMatrix::from_fn(4, 4, |i, j| {
            let t = (i * 4 + j) as f64;
            c(
                (0.7 * t).sin() + if i == j { 3.0 } else { 0.0 },
                (1.3 * t).cos(),
            )
        });
        let b: Vec<_> = (0..4).map(|k| c(k as f64 - 1.5, 0.25 * k as f64)).collect();
        let x = lu_solve(&a, &b).unwrap();
        let r: Vec<_> = a.mul_vec(&x).iter().zip(&b).map(|(ax, b)| ax - b).collect();
        let bound = 1e-10 * (a.norm_inf() * vec_norm_inf(&x) + vec_norm_inf(&b));
        assert!(vec_norm_inf(&r) <= bound);
    }
}
