use std::f64::consts::PI;

use num_complex::Complex64;

use super::{ComplexMatrix, LinalgError};

/// Largest dimension accepted by [`char_poly_roots`].
pub const MAX_POLY_DIM: usize = 8;

const MAX_SWEEPS: usize = 10_000;
const UPDATE_TOLERANCE: f64 = 1e-12;

/// Coefficients of the monic characteristic polynomial `det(λI − A)`,
/// lowest degree first, by the Faddeev–LeVerrier recursion.
pub fn char_poly_coefficients(a: &ComplexMatrix) -> Result<Vec<Complex64>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::Dimension(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    // M_k = A M_{k-1} + c_{n-k+1} I,  c_{n-k} = -tr(A M_k) / k
    let mut m = ComplexMatrix::zeros(n, n);
    for k in 1..=n {
        let mut next = a.mul(&m);
        for i in 0..n {
            next[(i, i)] += coeffs[n - k + 1];
        }
        m = next;
        coeffs[n - k] = -a.mul(&m).trace() / k as f64;
    }
    Ok(coeffs)
}

/// All roots of a polynomial (coefficients lowest degree first) by
/// simultaneous Weierstrass/Durand–Kerner iteration.
pub fn durand_kerner(coeffs: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
    let degree = coeffs.iter().rposition(|c| c.norm() != 0.0).unwrap_or(0);
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[degree];
    let monic: Vec<Complex64> = coeffs[..=degree].iter().map(|c| c / lead).collect();

    // start on a circle around the root centroid, radius from the Cauchy bound
    let center = -monic[degree - 1] / degree as f64;
    let radius = 1.0 + monic[..degree].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut roots: Vec<Complex64> = (0..degree)
        .map(|k| center + Complex64::from_polar(radius, 2.0 * PI * k as f64 / degree as f64 + 0.4))
        .collect();

    let eval = |z: Complex64| {
        monic
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    };
    let magnitude = |z: Complex64| {
        monic
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * z.norm() + c.norm())
    };

    for _ in 0..MAX_SWEEPS {
        let mut max_update: f64 = 0.0;
        for k in 0..degree {
            let zk = roots[k];
            let mut denom = Complex64::new(1.0, 0.0);
            for (j, &zj) in roots.iter().enumerate() {
                if j != k {
                    let mut diff = zk - zj;
                    if diff.norm() == 0.0 {
                        diff = Complex64::new(f64::EPSILON * radius, 0.0);
                    }
                    denom *= diff;
                }
            }
            let step = eval(zk) / denom;
            if step.re.is_finite() && step.im.is_finite() {
                roots[k] = zk - step;
                max_update = max_update.max(step.norm());
            }
        }
        let scale = roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
        // close roots stall the update size at the rounding level of p(z),
        // so also stop once every residual is within that level
        let at_noise_floor = roots
            .iter()
            .all(|&z| eval(z).norm() <= 8.0 * f64::EPSILON * magnitude(z));
        if max_update < UPDATE_TOLERANCE * scale || at_noise_floor {
            return Ok(roots);
        }
    }
    Err(LinalgError::NoConvergence {
        iterations: MAX_SWEEPS,
    })
}

/// Eigenvalues computed as roots of the characteristic polynomial. Slow and
/// less accurate than [`super::eigenvalues`]; it exists as an independent
/// cross-check.
pub fn char_poly_roots(a: &ComplexMatrix) -> Result<Vec<Complex64>, LinalgError> {
    if a.rows() > MAX_POLY_DIM {
        return Err(LinalgError::Dimension(format!(
            "characteristic polynomial route supports N <= {MAX_POLY_DIM}, got {}",
            a.rows()
        )));
    }
    let coeffs = char_poly_coefficients(a)?;
    durand_kerner(&coeffs)
}
