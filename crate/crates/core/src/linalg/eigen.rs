use num_complex::Complex64;

use super::{ComplexMatrix, LinalgError};

/// Largest dimension the QR eigensolver accepts.
pub const MAX_EIGEN_DIM: usize = 16;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Eigenvalues of a square matrix together with the residual `‖A v − λ v‖`
/// of the unit eigenvector recovered from the Schur form.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub values: Vec<Complex64>,
    pub residuals: Vec<f64>,
    /// Bound every residual is expected to respect, `1e-9 · max(1, ‖A‖∞)`.
    pub tolerance: f64,
}

impl EigenResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Eigenvalues of a general complex matrix by Householder reduction to
/// Hessenberg form followed by Wilkinson-shifted QR sweeps with deflation.
///
/// Values come back in deflation order, which is deterministic but otherwise
/// meaningless.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<EigenResult, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::Dimension(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n > MAX_EIGEN_DIM {
        return Err(LinalgError::Dimension(format!(
            "eigensolver supports N <= {MAX_EIGEN_DIM}, got {n}"
        )));
    }
    if !a.is_finite() {
        return Err(LinalgError::Dimension(
            "matrix has non-finite entries".into(),
        ));
    }
    let tolerance = 1e-9 * a.norm_inf().max(1.0);
    if n == 0 {
        return Ok(EigenResult {
            values: Vec::new(),
            residuals: Vec::new(),
            tolerance,
        });
    }

    let mut h = a.clone();
    let mut z = ComplexMatrix::identity(n);
    reduce_to_hessenberg(&mut h, &mut z);
    schur_qr(&mut h, &mut z)?;

    let values: Vec<Complex64> = (0..n).map(|i| h[(i, i)]).collect();
    let residuals = schur_residuals(a, &h, &z);
    Ok(EigenResult {
        values,
        residuals,
        tolerance,
    })
}

fn reduce_to_hessenberg(h: &mut ComplexMatrix, z: &mut ComplexMatrix) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let phase = if v[0].norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            v[0] / v[0].norm()
        };
        v[0] += phase * norm;
        let vv: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        if vv == 0.0 {
            continue;
        }
        let scale = 2.0 / vv;

        // H <- P H, P = I - 2 v v^H / (v^H v) acting on rows k+1..n
        for j in 0..n {
            let s: Complex64 = (k + 1..n).map(|i| v[i - k - 1].conj() * h[(i, j)]).sum();
            for i in k + 1..n {
                h[(i, j)] -= v[i - k - 1] * s * scale;
            }
        }
        // H <- H P and Z <- Z P
        for m in [&mut *h, &mut *z] {
            for i in 0..n {
                let s: Complex64 = (k + 1..n).map(|j| m[(i, j)] * v[j - k - 1]).sum();
                for j in k + 1..n {
                    m[(i, j)] -= s * v[j - k - 1].conj() * scale;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
}

/// Plane rotation `[[c, s], [-conj(s), c]]` with real `c`.
#[derive(Clone, Copy)]
struct Givens {
    c: f64,
    s: Complex64,
}

impl Givens {
    /// Rotation mapping `(f, g)` onto `(r, 0)`.
    fn zeroing(f: Complex64, g: Complex64) -> Self {
        let fa = f.norm();
        let ga = g.norm();
        if ga == 0.0 {
            return Self { c: 1.0, s: ZERO };
        }
        if fa == 0.0 {
            return Self {
                c: 0.0,
                s: g.conj() / ga,
            };
        }
        let rho = fa.hypot(ga);
        Self {
            c: fa / rho,
            s: (f / fa) * g.conj() / rho,
        }
    }

    fn apply_rows(
        &self,
        m: &mut ComplexMatrix,
        r1: usize,
        r2: usize,
        cols: std::ops::Range<usize>,
    ) {
        for j in cols {
            let t1 = m[(r1, j)];
            let t2 = m[(r2, j)];
            m[(r1, j)] = t1 * self.c + self.s * t2;
            m[(r2, j)] = -self.s.conj() * t1 + t2 * self.c;
        }
    }

    /// Right-multiplies columns `c1, c2` by the adjoint rotation.
    fn apply_cols_adjoint(
        &self,
        m: &mut ComplexMatrix,
        c1: usize,
        c2: usize,
        rows: std::ops::Range<usize>,
    ) {
        for i in rows {
            let t1 = m[(i, c1)];
            let t2 = m[(i, c2)];
            m[(i, c1)] = t1 * self.c + t2 * self.s.conj();
            m[(i, c2)] = -t1 * self.s + t2 * self.c;
        }
    }
}

fn wilkinson_shift(h: &ComplexMatrix, hi: usize) -> Complex64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let mean = (a + d) * 0.5;
    let half = (a - d) * 0.5;
    let root = (half * half + b * c).sqrt();
    let l1 = mean + root;
    let l2 = mean - root;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn schur_qr(h: &mut ComplexMatrix, z: &mut ComplexMatrix) -> Result<(), LinalgError> {
    let n = h.rows();
    let max_iterations = 100 * n * n;
    let norm = h.norm_inf();
    let mut iterations = 0;
    let mut since_deflation = 0;
    let mut hi = n - 1;
    let mut rotations: Vec<Givens> = Vec::with_capacity(n);

    while hi > 0 {
        // Locate the top of the unreduced block ending at `hi`.
        let mut lo = 0;
        for k in (1..=hi).rev() {
            let mut scale = h[(k - 1, k - 1)].norm() + h[(k, k)].norm();
            if scale == 0.0 {
                scale = norm;
            }
            if h[(k, k - 1)].norm() <= f64::EPSILON * scale {
                h[(k, k - 1)] = ZERO;
                lo = k;
                break;
            }
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        iterations += 1;
        since_deflation += 1;
        if iterations > max_iterations {
            return Err(LinalgError::NoConvergence {
                iterations: max_iterations,
            });
        }

        let shift = if since_deflation % 11 == 0 {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h, hi)
        };

        for k in lo..=hi {
            h[(k, k)] -= shift;
        }
        rotations.clear();
        for k in lo..hi {
            let g = Givens::zeroing(h[(k, k)], h[(k + 1, k)]);
            g.apply_rows(h, k, k + 1, k..n);
            h[(k + 1, k)] = ZERO;
            rotations.push(g);
        }
        for (offset, g) in rotations.iter().enumerate() {
            let k = lo + offset;
            g.apply_cols_adjoint(h, k, k + 1, 0..k + 2);
            g.apply_cols_adjoint(z, k, k + 1, 0..n);
        }
        for k in lo..=hi {
            h[(k, k)] += shift;
        }
    }
    Ok(())
}

/// Back-substitutes eigenvectors of the triangular factor and measures the
/// residual against the original matrix.
fn schur_residuals(a: &ComplexMatrix, t: &ComplexMatrix, z: &ComplexMatrix) -> Vec<f64> {
    let n = t.rows();
    let small = (f64::EPSILON * t.norm_inf()).max(f64::MIN_POSITIVE);
    (0..n)
        .map(|k| {
            let lambda = t[(k, k)];
            let mut y = vec![ZERO; n];
            y[k] = Complex64::new(1.0, 0.0);
            for j in (0..k).rev() {
                let s: Complex64 = (j + 1..=k).map(|m| t[(j, m)] * y[m]).sum();
                let mut den = t[(j, j)] - lambda;
                if den.norm() < small {
                    den = Complex64::new(small, 0.0);
                }
                y[j] = -s / den;
            }
            let mut v = z.mul_vec(&y);
            let len = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            for x in &mut v {
                *x /= len;
            }
            a.mul_vec(&v)
                .iter()
                .zip(&v)
                .map(|(av, x)| (av - lambda * x).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}
