//! Closed-form equilibria and the quantities that govern their existence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ScaledParameters, StateVector};
use crate::numeric::{magnitude, Sign};

/// `Q = s v + c d w`, `V = B Q - d s`, `W = B Q - d s (A + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "V")]
    pub v: f64,
    #[serde(rename = "W")]
    pub w: f64,
}

impl DerivedQuantities {
    /// `B Q` for the parameters these were computed from.
    pub(crate) fn uptake_q(&self, p: &ScaledParameters) -> f64 {
        p.max_uptake * self.q
    }

    /// Sign of V, snapped against the magnitude of `B Q` and `d s`.
    pub(crate) fn v_sign(&self, p: &ScaledParameters) -> Sign {
        Sign::of(self.v, magnitude(&[self.uptake_q(p), p.mortality_product()]))
    }

    /// Sign of W, snapped against the magnitude of its terms.
    pub(crate) fn w_sign(&self, p: &ScaledParameters) -> Sign {
        let ds = p.mortality_product();
        Sign::of(self.w, magnitude(&[self.uptake_q(p), ds * (p.half_saturation + 1.0)]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquilibriumKind {
    Origin,
    PreyOnly,
    Coexistence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub kind: EquilibriumKind,
    pub state: StateVector,
    pub feasible: bool,
    /// True when the coexistence point sits on the transcritical boundary `W = 0`.
    pub boundary: bool,
}

pub fn derived(p: &ScaledParameters) -> DerivedQuantities {
    let ScaledParameters {
        hunting_ratio: c,
        recruitment_y: w,
        mortality_y: s,
        recruitment_z: v,
        mortality_z: d,
        max_uptake: b,
        half_saturation: a,
        ..
    } = *p;
    let q = s * v + c * d * w;
    let bq = b * q;
    DerivedQuantities { q, v: bq - d * s, w: bq - d * s * (a + 1.0) }
}

pub fn origin() -> Equilibrium {
    Equilibrium {
        kind: EquilibriumKind::Origin,
        state: StateVector::ORIGIN,
        feasible: true,
        boundary: false,
    }
}

pub fn prey_only() -> Equilibrium {
    Equilibrium {
        kind: EquilibriumKind::PreyOnly,
        state: StateVector::new(1.0, 0.0, 0.0),
        feasible: true,
        boundary: false,
    }
}

/// Coexistence equilibrium `X* = A d s / V`, `Y* = w A d r W / V²`,
/// `Z* = v A s r W / V²`.
///
/// Infeasible parameter sets still get the formal (possibly negative) state.
pub fn coexistence(p: &ScaledParameters) -> Result<Equilibrium> {
    let dq = derived(p);
    if dq.v_sign(p).is_zero() {
        return Err(Error::Degenerate(format!(
            "V = B Q - d s = {:e} vanishes; coexistence formulas are singular",
            dq.v
        )));
    }
    let ScaledParameters {
        prey_growth: r,
        recruitment_y: w,
        mortality_y: s,
        recruitment_z: v,
        mortality_z: d,
        half_saturation: a,
        ..
    } = *p;
    let w_sign = dq.w_sign(p);
    let boundary = w_sign.is_zero();
    let feasible = dq.v_sign(p).is_positive() && !w_sign.is_negative();
    let big_w = if boundary { 0.0 } else { dq.w };
    let vv = dq.v * dq.v;
    let state = StateVector::new(
        a * d * s / dq.v,
        w * a * d * r * big_w / vv,
        v * a * s * r * big_w / vv,
    );
    Ok(Equilibrium { kind: EquilibriumKind::Coexistence, state, feasible, boundary })
}

/// All three equilibria; the coexistence entry is omitted when `V = 0`.
pub fn all(p: &ScaledParameters) -> Vec<Equilibrium> {
    let mut out = vec![origin(), prey_only()];
    if let Ok(eq) = coexistence(p) {
        out.push(eq);
    }
    out
}

/// Critical uptake `B† = d s (A + 1) / Q` at which the coexistence branch
/// leaves the prey-only equilibrium. `p.max_uptake` is ignored.
pub fn transcritical_b(p: &ScaledParameters) -> Result<f64> {
    let q = derived(p).q;
    if Sign::of(q, 0.0).is_zero() {
        return Err(Error::Degenerate("Q = s v + c d w vanishes".into()));
    }
    Ok(p.mortality_product() * (p.half_saturation + 1.0) / q)
}

/// Critical half-saturation `A = V / (d s)`, the upper end of coexistence
/// feasibility. `p.half_saturation` is ignored.
pub fn transcritical_a(p: &ScaledParameters) -> Result<f64> {
    let dq = derived(p);
    if Sign::of(dq.q, 0.0).is_zero() {
        return Err(Error::Degenerate("Q = s v + c d w vanishes".into()));
    }
    if !dq.v_sign(p).is_positive() {
        return Err(Error::Degenerate(format!("V = {:e} is not positive", dq.v)));
    }
    Ok(dq.v / p.mortality_product())
}
