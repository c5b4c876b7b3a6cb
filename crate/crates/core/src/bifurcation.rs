//! One-parameter sweeps and location of transcritical and Hopf points.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::eigen::{self, spectral_abscissa};
use crate::equilibria::{self, derived};
use crate::error::{Error, Result};
use crate::model::ScaledParameters;
use crate::stability::{self, char_poly, CharPolyCoeffs};

/// Default bisection tolerance on the parameter.
pub const HOPF_PARAM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    A,
    B,
}

impl SweepParam {
    pub fn apply(self, p: &ScaledParameters, value: f64) -> ScaledParameters {
        match self {
            SweepParam::A => p.with_half_saturation(value),
            SweepParam::B => p.with_max_uptake(value),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::A => "A",
            SweepParam::B => "B",
        })
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(SweepParam::A),
            "B" | "b" => Ok(SweepParam::B),
            other => Err(Error::Domain(format!("unknown sweep parameter {other:?}, expected A or B"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub param: SweepParam,
    pub value: f64,
    /// Coexistence equilibrium exists (V > 0 and W >= 0).
    pub feasible: bool,
    /// Coexistence equilibrium sits on `W = 0`.
    pub boundary: bool,
    pub max_re_lambda: Option<f64>,
    pub a1: Option<f64>,
    pub a3: Option<f64>,
    pub hurwitz_margin: Option<f64>,
    pub f1_stable: bool,
}

fn evaluate_point(base: &ScaledParameters, param: SweepParam, value: f64) -> Result<SweepPoint> {
    let p = param.apply(base, value);
    p.validate()?;
    let f1_stable = stability::f1_stability(&p).stable;
    let mut point = SweepPoint {
        param,
        value,
        feasible: false,
        boundary: false,
        max_re_lambda: None,
        a1: None,
        a3: None,
        hurwitz_margin: None,
        f1_stable,
    };
    if let Ok(eq) = equilibria::coexistence(&p) {
        point.feasible = eq.feasible;
        point.boundary = eq.feasible && eq.boundary;
        if eq.feasible {
            let report = stability::coexistence_stability(&p)?;
            let rh = report.routh_hurwitz.expect("coexistence report carries Routh-Hurwitz data");
            point.max_re_lambda = Some(report.max_re_lambda);
            point.a1 = Some(rh.a1);
            point.a3 = Some(rh.a3);
            point.hurwitz_margin = Some(rh.hurwitz_margin);
        }
    }
    Ok(point)
}

/// Evaluate `n` uniformly spaced values of one parameter over `[lo, hi]`.
pub fn sweep(p: &ScaledParameters, param: SweepParam, lo: f64, hi: f64, n: usize) -> Result<Vec<SweepPoint>> {
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(Error::Domain(format!("sweep range must satisfy 0 < lo < hi, got [{lo}, {hi}]")));
    }
    if n < 2 {
        return Err(Error::Domain(format!("sweep needs at least 2 points, got {n}")));
    }
    (0..n)
        .map(|i| {
            let value = if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
            evaluate_point(p, param, value)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalKind {
    Transcritical,
    Hopf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub kind: CriticalKind,
    pub param: SweepParam,
    pub value: f64,
    /// Bracket the search ran on; equal endpoints for closed-form results.
    pub bracket: [f64; 2],
    /// `|W|` for transcritical points, `|a1 a2 - a3|` for Hopf points.
    pub residual: f64,
    /// Frequency of the crossing pair (Hopf only).
    pub frequency: Option<f64>,
    /// Real part of the crossing pair (Hopf only).
    pub pair_real_part: Option<f64>,
}

/// Transcritical value of A (`V/ds`) or B (`B†`).
pub fn find_transcritical(p: &ScaledParameters, param: SweepParam) -> Result<CriticalPoint> {
    let value = match param {
        SweepParam::A => equilibria::transcritical_a(p)?,
        SweepParam::B => equilibria::transcritical_b(p)?,
    };
    let residual = derived(&param.apply(p, value)).w.abs();
    Ok(CriticalPoint {
        kind: CriticalKind::Transcritical,
        param,
        value,
        bracket: [value, value],
        residual,
        frequency: None,
        pair_real_part: None,
    })
}

fn hopf_function(p: &ScaledParameters, a: f64) -> Result<CharPolyCoeffs> {
    char_poly(&p.with_half_saturation(a))
}

/// Bisect `a1 a2 - a3` in A on the given bracket, with the default tolerance.
pub fn find_hopf(p: &ScaledParameters, bracket_lo: f64, bracket_hi: f64) -> Result<CriticalPoint> {
    find_hopf_with_tol(p, bracket_lo, bracket_hi, HOPF_PARAM_TOL)
}

/// Bisect `a1 a2 - a3` in A. The upper end is clipped to the feasibility
/// limit `V/ds`, where `a3 = 0` and the margin equals `a1 a2`.
pub fn find_hopf_with_tol(p: &ScaledParameters, bracket_lo: f64, bracket_hi: f64, tol: f64) -> Result<CriticalPoint> {
    if !(bracket_lo > 0.0 && bracket_lo < bracket_hi) {
        return Err(Error::Domain(format!(
            "Hopf bracket must satisfy 0 < lo < hi, got [{bracket_lo}, {bracket_hi}]"
        )));
    }
    let a_max = equilibria::transcritical_a(p)?;
    let hi = if bracket_hi > a_max {
        log::info!("clipping Hopf bracket upper end {bracket_hi} to the feasibility limit {a_max}");
        a_max
    } else {
        bracket_hi
    };
    if bracket_lo >= hi {
        return Err(Error::Infeasible(format!("bracket [{bracket_lo}, {bracket_hi}] lies beyond V/ds = {a_max}")));
    }

    let at_lo = hopf_function(p, bracket_lo)?;
    let at_hi = hopf_function(p, hi)?;
    for (a, c) in [(bracket_lo, at_lo), (hi, at_hi)] {
        if c.a1 <= 0.0 {
            return Err(Error::Domain(format!("a1 = {:e} is not positive at A = {a}", c.a1)));
        }
    }
    if at_lo.a3 <= 0.0 {
        return Err(Error::Domain(format!("a3 = {:e} is not positive at A = {bracket_lo}", at_lo.a3)));
    }
    let (f_lo, f_hi) = (at_lo.hurwitz_margin(), at_hi.hurwitz_margin());
    if f_lo.signum() == f_hi.signum() || f_lo == 0.0 && f_hi == 0.0 {
        return Err(Error::NoSignChange { lo: bracket_lo, hi, f_lo, f_hi });
    }

    let (mut lo, mut up) = (bracket_lo, hi);
    let lo_sign = f_lo.signum();
    let mut value = 0.5 * (lo + up);
    let mut f_mid = hopf_function(p, value)?.hurwitz_margin();
    while up - lo > tol && f_mid != 0.0 {
        if f_mid.signum() == lo_sign {
            lo = value;
        } else {
            up = value;
        }
        value = 0.5 * (lo + up);
        f_mid = hopf_function(p, value)?.hurwitz_margin();
    }

    let coeffs = hopf_function(p, value)?;
    if coeffs.a2 <= 0.0 {
        return Err(Error::RealCrossing(value));
    }
    let at = p.with_half_saturation(value);
    let eq = equilibria::coexistence(&at)?;
    let eigs = eigen::eigenvalues(&crate::model::jacobian(&at, eq.state)?);
    let pair = eigs
        .iter()
        .copied()
        .filter(|z| z.im > 0.0)
        .max_by(|x, y| x.re.total_cmp(&y.re));
    let Some(pair) = pair else {
        return Err(Error::RealCrossing(value));
    };
    log::debug!(
        "Hopf at A = {value}: pair {pair}, max Re = {:e}",
        spectral_abscissa(&eigs)
    );
    Ok(CriticalPoint {
        kind: CriticalKind::Hopf,
        param: SweepParam::A,
        value,
        bracket: [bracket_lo, hi],
        residual: coeffs.hurwitz_margin().abs(),
        frequency: Some(pair.im),
        pair_real_part: Some(pair.re),
    })
}

/// Factorization check at a Hopf point: the cubic should equal
/// `(λ + a1)(λ² + a2)`, which holds exactly when `a1 a2 = a3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfCertificate {
    pub coeffs: CharPolyCoeffs,
    /// Largest coefficient mismatch between the cubic and the factored form.
    pub factor_residual: f64,
    /// `sqrt(a2)`, the frequency the factored form predicts.
    pub predicted_frequency: f64,
}

pub fn hopf_certificate(p: &ScaledParameters, a: f64) -> Result<HopfCertificate> {
    let coeffs = hopf_function(p, a)?;
    if coeffs.a2 <= 0.0 {
        return Err(Error::RealCrossing(a));
    }
    Ok(HopfCertificate {
        coeffs,
        factor_residual: coeffs.hurwitz_margin().abs(),
        predicted_frequency: coeffs.a2.sqrt(),
    })
}
