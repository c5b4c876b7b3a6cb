//! Independent oracles shared by the integration tests. Nothing here calls
//! into the crate's analysis code; parameters are read field by field.

#![allow(dead_code)]

use ecogen::ScaledParameters;
use nalgebra::Matrix3;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[allow(clippy::too_many_arguments)]
pub fn params(r: f64, c: f64, w: f64, s: f64, v: f64, d: f64, b: f64, a: f64) -> ScaledParameters {
    ScaledParameters {
        prey_growth: r,
        hunting_ratio: c,
        recruitment_y: w,
        mortality_y: s,
        recruitment_z: v,
        mortality_z: d,
        max_uptake: b,
        half_saturation: a,
    }
}

pub fn baseline(a: f64) -> ScaledParameters {
    params(0.6, 0.38, 0.47, 0.4, 0.5, 0.2, 0.48, a)
}

pub fn example1(a: f64) -> ScaledParameters {
    params(0.6, 0.74, 0.38, 0.48, 0.05, 0.008, 0.85, a)
}

pub fn example2(a: f64) -> ScaledParameters {
    params(0.95, 0.066, 0.083, 0.075, 0.8, 0.15, 0.84, a)
}

pub fn example3(a: f64) -> ScaledParameters {
    params(0.56, 0.44, 0.3, 0.01, 0.7, 0.08, 0.23, a)
}

pub fn rhs(p: &ScaledParameters, u: [f64; 3]) -> [f64; 3] {
    let [x, y, z] = u;
    let uptake = p.max_uptake * x / (x + p.half_saturation);
    let pressure = p.hunting_ratio * y + z;
    [
        p.prey_growth * (1.0 - x) * x - pressure * uptake,
        p.recruitment_y * pressure * uptake - p.mortality_y * y,
        p.recruitment_z * pressure * uptake - p.mortality_z * z,
    ]
}

pub fn jacobian(p: &ScaledParameters, u: [f64; 3]) -> [[f64; 3]; 3] {
    let [x, y, z] = u;
    let (a, b, c) = (p.half_saturation, p.max_uptake, p.hunting_ratio);
    let phi = b * x / (x + a);
    let phi_x = b * a / ((x + a) * (x + a));
    let pressure = c * y + z;
    let (w, v) = (p.recruitment_y, p.recruitment_z);
    [
        [p.prey_growth * (1.0 - 2.0 * x) - pressure * phi_x, -c * phi, -phi],
        [w * pressure * phi_x, w * c * phi - p.mortality_y, w * phi],
        [v * pressure * phi_x, v * c * phi, v * phi - p.mortality_z],
    ]
}

/// `(Q, V, W)`
pub fn qvw(p: &ScaledParameters) -> (f64, f64, f64) {
    let (s, d) = (p.mortality_y, p.mortality_z);
    let q = s * p.recruitment_z + p.hunting_ratio * d * p.recruitment_y;
    let bq = p.max_uptake * q;
    (q, bq - d * s, bq - d * s * (p.half_saturation + 1.0))
}

pub fn coexistence(p: &ScaledParameters) -> [f64; 3] {
    let (_, v, w) = qvw(p);
    let (a, r, s, d) = (p.half_saturation, p.prey_growth, p.mortality_y, p.mortality_z);
    [
        a * d * s / v,
        p.recruitment_y * a * d * r * w / (v * v),
        p.recruitment_z * a * s * r * w / (v * v),
    ]
}

/// `[a1, a2, a3]` of `det(λI - J)` from trace, principal minors and determinant.
pub fn char_coeffs(j: &[[f64; 3]; 3]) -> [f64; 3] {
    let tr = j[0][0] + j[1][1] + j[2][2];
    let minors = j[0][0] * j[1][1] - j[0][1] * j[1][0] + j[0][0] * j[2][2] - j[0][2] * j[2][0]
        + j[1][1] * j[2][2] - j[1][2] * j[2][1];
    let det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
        + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
    [-tr, minors, -det]
}

/// Largest real part of the eigenvalues, from nalgebra.
pub fn max_real_eig(j: &[[f64; 3]; 3]) -> f64 {
    let m = Matrix3::from_fn(|r, c| j[r][c]);
    m.complex_eigenvalues().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Companion matrix of `λ³ + c1 λ² + c2 λ + c3`.
pub fn companion(c: [f64; 3]) -> [[f64; 3]; 3] {
    [[-c[0], -c[1], -c[2]], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]
}

/// Knot values written out from the closed forms:
/// `K, M, H, V/(BQ+ds), (BQ-2ds)/ds, V/ds`.
pub struct Knots {
    pub k: f64,
    pub m: f64,
    pub h: f64,
    pub v_over_bq_ds: f64,
    pub bq_2ds_over_ds: f64,
    pub v_over_ds: f64,
}

pub fn knots(p: &ScaledParameters) -> Knots {
    let (r, c, w, s, v, d, b) = (
        p.prey_growth,
        p.hunting_ratio,
        p.recruitment_y,
        p.mortality_y,
        p.recruitment_z,
        p.mortality_z,
        p.max_uptake,
    );
    let ds = d * s;
    let q = s * v + c * d * w;
    let big_v = b * q - ds;
    let s2 = s * s * v + c * d * d * w;
    let k = big_v / (b * q + ds) * (r * ds - b * s2) / (r * ds);
    let m = b * s2 + ds * ((s + d) - b * (w * c + v));
    let h = b * s2 + b * (w * c + v) * (2.0 * ds - b * q) - (s + d) * ds;
    Knots {
        k,
        m,
        h,
        v_over_bq_ds: big_v / (b * q + ds),
        bq_2ds_over_ds: (b * q - 2.0 * ds) / ds,
        v_over_ds: big_v / ds,
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Random parameters with `V > 0`; `BQ/ds` is drawn log-uniformly in
/// `(1.01, 20)` so both regimes occur. A is set to half the feasibility limit.
pub fn random_params(rng: &mut ChaCha8Rng) -> ScaledParameters {
    let mut p = params(
        log_uniform(rng, 0.01, 2.0),
        log_uniform(rng, 0.01, 2.0),
        log_uniform(rng, 0.01, 2.0),
        log_uniform(rng, 0.005, 1.0),
        log_uniform(rng, 0.01, 2.0),
        log_uniform(rng, 0.005, 1.0),
        1.0,
        1.0,
    );
    let (q, _, _) = qvw(&p);
    let ratio = log_uniform(rng, 1.01, 20.0);
    p.max_uptake = ratio * p.mortality_y * p.mortality_z / q;
    p.half_saturation = 0.5 * (ratio - 1.0);
    p
}

/// Random parameters with A drawn strictly inside `(0, V/ds)`.
pub fn random_feasible(rng: &mut ChaCha8Rng) -> ScaledParameters {
    let mut p = random_params(rng);
    let limit = knots(&p).v_over_ds;
    p.half_saturation = limit * rng.random_range(0.001..0.999);
    p
}

pub fn max_abs(u: [f64; 3]) -> f64 {
    u.iter().fold(0.0, |m, x| m.max(x.abs()))
}
