//! Jacobians, characteristic polynomials and eigenvalues of small matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{complex_det, solve, SquareMatrix};

/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Largest matrix the polynomial-based eigenvalue routines accept.
pub const MAX_SPECTRAL_DIM: usize = 8;

const ROOT_MAX_ITER: usize = 1000;
const ROOT_TOL: f64 = 1e-12;

fn check_spectral_input(m: &SquareMatrix) -> Result<()> {
    if m.n() == 0 || m.n() > MAX_SPECTRAL_DIM {
        return Err(Error::invalid(format!(
            "matrix dimension must be between 1 and {MAX_SPECTRAL_DIM}, got {}",
            m.n()
        )));
    }
    if !m.is_finite() {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    Ok(())
}

/// Central-difference Jacobian: column `j` is `(f(p + h e_j) − f(p − h e_j)) / 2h`.
pub fn jacobian_fd<F>(map: F, point: &[f64], h: f64) -> Result<SquareMatrix>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::invalid(format!("finite-difference step must be positive, got {h}")));
    }
    let n = point.len();
    let mut jac = SquareMatrix::zeros(n);
    let mut probe = point.to_vec();
    for j in 0..n {
        probe[j] = point[j] + h;
        let plus = map(&probe)?;
        probe[j] = point[j] - h;
        let minus = map(&probe)?;
        probe[j] = point[j];
        Error::check_dim(n, plus.len())?;
        Error::check_dim(n, minus.len())?;
        for i in 0..n {
            jac.set(i, j, (plus[i] - minus[i]) / (2.0 * h));
        }
    }
    if !jac.is_finite() {
        return Err(Error::Numerical("map produced non-finite values near the point".into()));
    }
    Ok(jac)
}

/// `det(M − λI)` by complex LU with partial pivoting.
pub fn char_poly_eval(m: &SquareMatrix, lambda: Complex64) -> Result<Complex64> {
    check_spectral_input(m)?;
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(Error::invalid("evaluation point must be finite"));
    }
    let n = m.n();
    let mut a = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let d = if i == j { lambda } else { Complex64::new(0.0, 0.0) };
            a.push(Complex64::new(m.get(i, j), 0.0) - d);
        }
    }
    Ok(complex_det(a, n))
}

/// Coefficients `c_0, …, c_n` of the monic `det(λI − M) = Σ c_k λ^k`, by the
/// Faddeev–LeVerrier recursion.
pub fn char_poly_coefficients(m: &SquareMatrix) -> Result<Vec<f64>> {
    check_spectral_input(m)?;
    let n = m.n();
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut mk = SquareMatrix::zeros(n);
    for k in 1..=n {
        // M_k = A M_{k−1} + c_{n−k+1} I
        let mut next = m.matmul(&mk);
        for i in 0..n {
            next.set(i, i, next.get(i, i) + c[n - k + 1]);
        }
        mk = next;
        c[n - k] = -m.matmul(&mk).trace() / k as f64;
    }
    Ok(c)
}

fn horner(c: &[f64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &ck| acc * z + ck)
}

/// `Σ |c_k| |z|^k`, the rounding scale of a polynomial evaluation at `z`.
fn horner_scale(c: &[f64], z: Complex64) -> f64 {
    let r = z.norm();
    c.iter().rev().fold(0.0, |acc, &ck| acc * r + ck.abs())
}

/// Eigenvalues of a small matrix, sorted by modulus (largest first).
///
/// Roots of the Faddeev–LeVerrier characteristic polynomial are found by
/// Durand–Kerner iteration. A root is accepted when its last correction is
/// below `1e-12 (1 + |z|)` or its residual is below `1e-12` relative to the
/// evaluation scale; the latter matters for multiple roots, where the
/// iteration converges only linearly.
pub fn eigenvalues_small(m: &SquareMatrix) -> Result<Vec<Complex64>> {
    let c = char_poly_coefficients(m)?;
    let n = m.n();
    let bound = 1.0 + c[..n].iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32 + 1) * bound / seed.norm().powi(k as i32 + 1)).collect();
    let mut converged = false;
    for _ in 0..ROOT_MAX_ITER {
        let mut all_small = true;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            let p = horner(&c, z[i]);
            let step = if denom.norm() == 0.0 {
                Complex64::new(1e-10 * (1.0 + z[i].norm()), 0.0)
            } else {
                p / denom
            };
            z[i] -= step;
            let residual_ok = horner(&c, z[i]).norm() <= ROOT_TOL * horner_scale(&c, z[i]);
            let step_ok = step.norm() <= ROOT_TOL * (1.0 + z[i].norm());
            all_small &= residual_ok || step_ok;
        }
        if all_small {
            converged = true;
            break;
        }
    }
    if !converged || z.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        let residuals: Vec<String> = z.iter().map(|v| format!("{:.3e}", horner(&c, *v).norm())).collect();
        return Err(Error::Numerical(format!(
            "eigenvalue iteration did not converge; residuals [{}]",
            residuals.join(", ")
        )));
    }
    // Clean imaginary parts that are pure rounding noise.
    for v in &mut z {
        if v.im.abs() <= 1e-14 * (1.0 + v.re.abs()) {
            v.im = 0.0;
        }
        if v.re.abs() <= 1e-14 * (1.0 + v.im.abs()) {
            v.re = 0.0;
        }
    }
    z.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(b.re.total_cmp(&a.re)).then(b.im.total_cmp(&a.im)));
    Ok(z)
}

/// Inverse iteration from `e_n`: repeatedly solves `(M − σI) v = v_prev`,
/// normalising to unit max-norm with a positive largest coordinate.
pub fn inverse_iteration(m: &SquareMatrix, shift: f64, iterations: usize) -> Result<Vec<f64>> {
    check_spectral_input(m)?;
    let n = m.n();
    let mut shifted = m.to_rows().concat();
    for i in 0..n {
        shifted[i * n + i] -= shift;
    }
    let mut v = vec![0.0; n];
    v[n - 1] = 1.0;
    for _ in 0..iterations.max(1) {
        v = solve(&shifted, &v)
            .ok_or_else(|| Error::Numerical("shifted matrix is singular".into()))?;
        let (idx, big) = v
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |(bi, bv), (i, x)| if x.abs() > bv { (i, x.abs()) } else { (bi, bv) });
        if !(big > 0.0 && big.is_finite()) {
            return Err(Error::Numerical("inverse iteration produced a degenerate vector".into()));
        }
        let s = big.copysign(v[idx]);
        v.iter_mut().for_each(|x| *x /= s);
    }
    Ok(v)
}
