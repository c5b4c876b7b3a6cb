//! Roots of monic cubics and eigenvalues of 3×3 matrices.
//!
//! One real root is found in closed form, polished by Newton's method and
//! deflated; the remaining quadratic is solved with the cancellation-free
//! formula. This keeps the complex pair accurate even when it sits close to
//! the imaginary axis.

use num_complex::Complex64;

use crate::model::Matrix3;

/// Coefficients of `λ³ + a1 λ² + a2 λ + a3`.
pub fn characteristic_coefficients(m: &Matrix3) -> [f64; 3] {
    [-m.trace(), m.principal_minor_sum(), -m.determinant()]
}

/// Evaluate `λ³ + a1 λ² + a2 λ + a3` at a complex point.
pub fn eval_monic_cubic(coeffs: [f64; 3], z: Complex64) -> Complex64 {
    let [a1, a2, a3] = coeffs;
    ((z + a1) * z + a2) * z + a3
}

/// The three roots of `λ³ + a1 λ² + a2 λ + a3`, sorted by descending real part.
pub fn cubic_roots(coeffs: [f64; 3]) -> [Complex64; 3] {
    let [a1, a2, a3] = coeffs;
    let real = polish(coeffs, real_root(coeffs));
    // (λ - real)(λ² + b1 λ + b0)
    let b1 = a1 + real;
    let b0 = if real.abs() > 1.0 {
        // backward recurrence is the stable direction for large roots
        -a3 / real
    } else {
        a2 + real * b1
    };
    let [q1, q2] = quadratic_roots(b1, b0);
    let mut roots = [Complex64::new(real, 0.0), q1, q2];
    roots.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
    roots
}

/// Eigenvalues of a 3×3 matrix, sorted by descending real part.
pub fn eigenvalues(m: &Matrix3) -> [Complex64; 3] {
    cubic_roots(characteristic_coefficients(m))
}

/// Largest real part among the eigenvalues.
pub fn spectral_abscissa(eigs: &[Complex64]) -> f64 {
    eigs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

/// `|det(M - λI)| / max(1, ‖M‖∞)³`, the normalized eigenvalue residual.
pub fn eigen_residual(m: &Matrix3, lambda: Complex64) -> f64 {
    let scale = m.norm_inf().max(1.0);
    eval_monic_cubic(characteristic_coefficients(m), lambda).norm() / scale.powi(3)
}

fn real_root(coeffs: [f64; 3]) -> f64 {
    let [a1, a2, a3] = coeffs;
    // λ = t - a1/3 gives t³ + p t + q
    let shift = a1 / 3.0;
    let p = a2 - a1 * a1 / 3.0;
    let q = 2.0 * a1 * a1 * a1 / 27.0 - a1 * a2 / 3.0 + a3;
    let half_q = q / 2.0;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;
    let t = if disc >= 0.0 {
        let sq = disc.sqrt();
        // pick the sign that avoids cancellation
        let u = (-half_q - half_q.signum() * sq).cbrt();
        if u == 0.0 {
            0.0
        } else {
            u - third_p / u
        }
    } else {
        // three real roots; return the one of largest magnitude
        let r = (-third_p).sqrt();
        let phi = (-half_q / (r * r * r)).clamp(-1.0, 1.0).acos();
        let cands = (0..3).map(|k| 2.0 * r * ((phi + 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos());
        cands.fold(0.0_f64, |best, c| {
            if (c - shift).abs() > (best - shift).abs() {
                c
            } else {
                best
            }
        })
    };
    t - shift
}

fn polish(coeffs: [f64; 3], mut x: f64) -> f64 {
    let [a1, a2, a3] = coeffs;
    for _ in 0..8 {
        let f = ((x + a1) * x + a2) * x + a3;
        let df = (3.0 * x + 2.0 * a1) * x + a2;
        if df == 0.0 || !f.is_finite() {
            break;
        }
        let next = x - f / df;
        if !next.is_finite() {
            break;
        }
        let f_next = ((next + a1) * next + a2) * next + a3;
        if f_next.abs() >= f.abs() {
            break;
        }
        x = next;
    }
    x
}

/// Roots of `λ² + b1 λ + b0`.
pub fn quadratic_roots(b1: f64, b0: f64) -> [Complex64; 2] {
    let disc = b1 * b1 - 4.0 * b0;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        let q = -0.5 * (b1 + b1.signum() * sq);
        if q == 0.0 {
            // b1 = b0 = 0
            return [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
        }
        let r1 = q;
        let r2 = b0 / q;
        [Complex64::new(r1, 0.0), Complex64::new(r2, 0.0)]
    } else {
        let re = -0.5 * b1;
        let im = 0.5 * (-disc).sqrt();
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}
