//! Model parameterizations, the rescaling between them and the vector field.
//!
//! The dimensional system tracks prey `x` and two predator genotypes `y`, `z`:
//!
//! ```text
//! x' = R (1 - x/K) x - (h y + g z) ξ x / (x + μ)
//! y' = p e (h y + g z) ξ x / (x + μ) - m y
//! z' = q e (h y + g z) ξ x / (x + μ) - n z
//! ```
//!
//! With `x = K X`, `y = (e/g) Y`, `z = (e/g) Z` and `t = e τ` it becomes
//!
//! ```text
//! X' = r (1 - X) X - (c Y + Z) B X / (X + A)
//! Y' = w (c Y + Z) B X / (X + A) - s Y
//! Z' = v (c Y + Z) B X / (X + A) - d Z
//! ```
//!
//! All analysis works on the scaled form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const FRACTION_SUM_TOL: f64 = 1e-12;

/// Dimensional model constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawParameters {
    /// Prey intrinsic growth rate.
    #[serde(rename = "R")]
    pub growth_rate: f64,
    /// Prey carrying capacity.
    #[serde(rename = "Ktilde")]
    pub carrying_capacity: f64,
    /// Hunting coefficient of genotype y.
    #[serde(rename = "h")]
    pub hunting_y: f64,
    /// Hunting coefficient of genotype z.
    #[serde(rename = "g")]
    pub hunting_z: f64,
    /// Maximum resource obtained per prey per unit time.
    #[serde(rename = "xi")]
    pub max_resource: f64,
    /// Half-saturation constant of the response.
    #[serde(rename = "mu")]
    pub half_saturation: f64,
    /// Fraction of newborn predators of genotype y.
    #[serde(rename = "p")]
    pub newborn_fraction_y: f64,
    /// Fraction of newborn predators of genotype z.
    #[serde(rename = "q")]
    pub newborn_fraction_z: f64,
    /// Conversion factor of captured prey into predator biomass.
    #[serde(rename = "e")]
    pub conversion: f64,
    #[serde(rename = "m")]
    pub mortality_y: f64,
    #[serde(rename = "n")]
    pub mortality_z: f64,
}

impl RawParameters {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("R", self.growth_rate),
            ("Ktilde", self.carrying_capacity),
            ("h", self.hunting_y),
            ("g", self.hunting_z),
            ("xi", self.max_resource),
            ("mu", self.half_saturation),
            ("p", self.newborn_fraction_y),
            ("q", self.newborn_fraction_z),
            ("e", self.conversion),
            ("m", self.mortality_y),
            ("n", self.mortality_z),
        ];
        for (name, value) in fields {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::Domain(format!("{name} must be finite and >= 0, got {value}")));
            }
        }
        for (name, value) in [
            ("Ktilde", self.carrying_capacity),
            ("g", self.hunting_z),
            ("e", self.conversion),
        ] {
            if value == 0.0 {
                return Err(Error::Domain(format!("{name} must be > 0 for the rescaling")));
            }
        }
        if self.conversion >= 1.0 {
            return Err(Error::Domain(format!(
                "conversion factor e must be < 1, got {}",
                self.conversion
            )));
        }
        let sum = self.newborn_fraction_y + self.newborn_fraction_z;
        if (sum - 1.0).abs() > FRACTION_SUM_TOL {
            return Err(Error::Domain(format!("p + q must equal 1, got {sum}")));
        }
        Ok(())
    }

    /// Prey scale factor `x = α X`.
    pub fn prey_scale(&self) -> f64 {
        self.carrying_capacity
    }

    /// Predator scale factor `y = β Y`, `z = β Z`.
    pub fn predator_scale(&self) -> f64 {
        self.conversion / self.hunting_z
    }

    /// Time scale factor `t = δ τ`.
    pub fn time_scale(&self) -> f64 {
        self.conversion
    }

    /// Dimensional state corresponding to a scaled state.
    pub fn to_dimensional(&self, u: StateVector) -> StateVector {
        let beta = self.predator_scale();
        StateVector::new(u.x * self.prey_scale(), u.y * beta, u.z * beta)
    }

    /// Scaled state corresponding to a dimensional state.
    pub fn to_scaled(&self, u: StateVector) -> StateVector {
        let beta = self.predator_scale();
        StateVector::new(u.x / self.prey_scale(), u.y / beta, u.z / beta)
    }
}

/// Nondimensional model constants.
///
/// `prey_growth`, the two mortalities and `half_saturation` must be strictly
/// positive; the remaining constants may be zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledParameters {
    /// r = R/e
    #[serde(rename = "r")]
    pub prey_growth: f64,
    /// c = h/g
    #[serde(rename = "c")]
    pub hunting_ratio: f64,
    /// w = p g K
    #[serde(rename = "w")]
    pub recruitment_y: f64,
    /// s = m/e
    #[serde(rename = "s")]
    pub mortality_y: f64,
    /// v = q g K
    #[serde(rename = "v")]
    pub recruitment_z: f64,
    /// d = n/e
    #[serde(rename = "d")]
    pub mortality_z: f64,
    /// B = ξ/K
    #[serde(rename = "B")]
    pub max_uptake: f64,
    /// A = μ/K
    #[serde(rename = "A")]
    pub half_saturation: f64,
}

impl ScaledParameters {
    #[allow(clippy::too_many_arguments)]
    pub fn new(r: f64, c: f64, w: f64, s: f64, v: f64, d: f64, b: f64, a: f64) -> Result<Self> {
        let p = ScaledParameters {
            prey_growth: r,
            hunting_ratio: c,
            recruitment_y: w,
            mortality_y: s,
            recruitment_z: v,
            mortality_z: d,
            max_uptake: b,
            half_saturation: a,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let strict = [
            ("r", self.prey_growth),
            ("s", self.mortality_y),
            ("d", self.mortality_z),
            ("A", self.half_saturation),
        ];
        for (name, value) in strict {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::Domain(format!("{name} must be finite and > 0, got {value}")));
            }
        }
        let nonneg = [
            ("c", self.hunting_ratio),
            ("w", self.recruitment_y),
            ("v", self.recruitment_z),
            ("B", self.max_uptake),
        ];
        for (name, value) in nonneg {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::Domain(format!("{name} must be finite and >= 0, got {value}")));
            }
        }
        Ok(())
    }

    pub fn with_half_saturation(self, a: f64) -> Self {
        ScaledParameters { half_saturation: a, ..self }
    }

    pub fn with_max_uptake(self, b: f64) -> Self {
        ScaledParameters { max_uptake: b, ..self }
    }

    /// Product `d s` of the two mortalities, the natural unit of the analysis.
    pub fn mortality_product(&self) -> f64 {
        self.mortality_y * self.mortality_z
    }
}

/// Population triple (X, Y, Z).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StateVector {
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "Y")]
    pub y: f64,
    #[serde(rename = "Z")]
    pub z: f64,
}

impl StateVector {
    pub const ORIGIN: StateVector = StateVector { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        StateVector { x, y, z }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        StateVector::new(a[0], a[1], a[2])
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn scale(self, k: f64) -> Self {
        StateVector::new(self.x * k, self.y * k, self.z * k)
    }

    /// Componentwise `max(0, ·)`.
    pub fn clamp_nonnegative(self) -> Self {
        StateVector::new(self.x.max(0.0), self.y.max(0.0), self.z.max(0.0))
    }
}

/// Dense 3×3 matrix in row-major order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Matrix3(pub [[f64; 3]; 3]);

impl Matrix3 {
    pub fn diagonal(d: [f64; 3]) -> Self {
        Matrix3([[d[0], 0.0, 0.0], [0.0, d[1], 0.0], [0.0, 0.0, d[2]]])
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[row][col]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// Sum of the three principal 2×2 minors.
    pub fn principal_minor_sum(&self) -> f64 {
        let m = &self.0;
        (m[0][0] * m[1][1] - m[0][1] * m[1][0])
            + (m[0][0] * m[2][2] - m[0][2] * m[2][0])
            + (m[1][1] * m[2][2] - m[1][2] * m[2][1])
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.0
            .iter()
            .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }
}

fn check_denominator(x: f64, half_saturation: f64) -> Result<f64> {
    let denom = x + half_saturation;
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::Domain(format!(
            "response denominator X + A vanishes (X = {x}, A = {half_saturation})"
        )));
    }
    Ok(denom)
}

/// Map dimensional constants onto the scaled model.
pub fn rescale(raw: &RawParameters) -> Result<ScaledParameters> {
    raw.validate()?;
    let k = raw.carrying_capacity;
    let g = raw.hunting_z;
    let e = raw.conversion;
    let p = ScaledParameters {
        prey_growth: raw.growth_rate / e,
        hunting_ratio: raw.hunting_y / g,
        recruitment_y: raw.newborn_fraction_y * g * k,
        mortality_y: raw.mortality_y / e,
        recruitment_z: raw.newborn_fraction_z * g * k,
        mortality_z: raw.mortality_z / e,
        max_uptake: raw.max_resource / k,
        half_saturation: raw.half_saturation / k,
    };
    p.validate()?;
    Ok(p)
}

/// Scaled vector field.
pub fn rhs_scaled(p: &ScaledParameters, u: StateVector) -> Result<StateVector> {
    let denom = check_denominator(u.x, p.half_saturation)?;
    let response = p.max_uptake * u.x / denom;
    let hunting = p.hunting_ratio * u.y + u.z;
    Ok(StateVector::new(
        p.prey_growth * (1.0 - u.x) * u.x - hunting * response,
        p.recruitment_y * hunting * response - p.mortality_y * u.y,
        p.recruitment_z * hunting * response - p.mortality_z * u.z,
    ))
}

/// Dimensional vector field, with `state` in dimensional units.
pub fn rhs_raw(raw: &RawParameters, state: StateVector) -> Result<StateVector> {
    let denom = check_denominator(state.x, raw.half_saturation)?;
    let response = raw.max_resource * state.x / denom;
    let hunting = raw.hunting_y * state.y + raw.hunting_z * state.z;
    let births = raw.conversion * hunting * response;
    Ok(StateVector::new(
        raw.growth_rate * (1.0 - state.x / raw.carrying_capacity) * state.x - hunting * response,
        raw.newborn_fraction_y * births - raw.mortality_y * state.y,
        raw.newborn_fraction_z * births - raw.mortality_z * state.z,
    ))
}

/// Jacobian of the scaled vector field.
pub fn jacobian(p: &ScaledParameters, u: StateVector) -> Result<Matrix3> {
    let denom = check_denominator(u.x, p.half_saturation)?;
    let ScaledParameters {
        prey_growth: r,
        hunting_ratio: c,
        recruitment_y: w,
        mortality_y: s,
        recruitment_z: v,
        mortality_z: d,
        max_uptake: b,
        ..
    } = *p;
    let hunting = c * u.y + u.z;
    let response = b * u.x / denom;
    // ∂/∂X of hunting·B·X/(X+A)
    let d_response = hunting * b / denom - hunting * b * u.x / (denom * denom);
    Ok(Matrix3([
        [r * (1.0 - 2.0 * u.x) - d_response, -c * response, -response],
        [w * d_response, w * c * response - s, w * response],
        [v * d_response, v * c * response, v * response - d],
    ]))
}

impl std::ops::Sub for StateVector {
    type Output = StateVector;

    fn sub(self, other: StateVector) -> StateVector {
        StateVector::new(self.x - other.x, self.y - other.y, self.z - other.z)
    }
}
