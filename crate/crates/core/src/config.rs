//! Run configuration files.
//!
//! A config is a JSON object with exactly one parameter block, `raw` or
//! `scaled`, plus optional per-command blocks:
//!
//! ```json
//! {
//!   "scaled": { "r": 0.6, "c": 0.74, "w": 0.38, "s": 0.48, "v": 0.05, "d": 0.008, "B": 0.85, "A": 0.6 },
//!   "simulate": { "t_end": 2000, "rel_tol": 1e-8, "abs_tol": 1e-10, "output_points": 8192,
//!                 "initial": { "X": 0.5, "Y": 0.1, "Z": 0.1 } },
//!   "sweep": { "param": "A", "lo": 0.05, "hi": 5.0, "n": 200 },
//!   "hopf": { "lo": 0.36, "hi": 0.71, "tol": 1e-8 }
//! }
//! ```
//!
//! `A` may be left out of a `scaled` block; commands that need it then
//! require it on the command line.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bifurcation::{SweepParam, HOPF_PARAM_TOL};
use crate::dynamics::IntegrationOptions;
use crate::model::{rescale, RawParameters, ScaledParameters, StateVector};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl From<crate::Error> for ConfigError {
    fn from(e: crate::Error) -> Self {
        ConfigError::Invalid(e.to_string())
    }
}

/// Scaled parameters as written in a config; `A` is optional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaledInput {
    pub r: f64,
    pub c: f64,
    pub w: f64,
    pub s: f64,
    pub v: f64,
    pub d: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
}

impl From<ScaledParameters> for ScaledInput {
    fn from(p: ScaledParameters) -> Self {
        ScaledInput {
            r: p.prey_growth,
            c: p.hunting_ratio,
            w: p.recruitment_y,
            s: p.mortality_y,
            v: p.recruitment_z,
            d: p.mortality_z,
            b: p.max_uptake,
            a: Some(p.half_saturation),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSection {
    pub t_end: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub output_points: usize,
    pub max_steps: usize,
    /// Starting state; the perturbed coexistence point when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<StateVector>,
}

impl Default for SimulateSection {
    fn default() -> Self {
        let d = IntegrationOptions::default();
        SimulateSection {
            t_end: 2000.0,
            rel_tol: d.rel_tol,
            abs_tol: d.abs_tol,
            output_points: d.output_points,
            max_steps: d.max_steps,
            initial: None,
        }
    }
}

impl SimulateSection {
    pub fn integration_options(&self) -> IntegrationOptions {
        IntegrationOptions {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            output_points: self.output_points,
            max_steps: self.max_steps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default = "default_sweep_param")]
    pub param: SweepParam,
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "default_sweep_points")]
    pub n: usize,
}

fn default_sweep_param() -> SweepParam {
    SweepParam::A
}

fn default_sweep_points() -> usize {
    201
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HopfSection {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    #[serde(default = "default_hopf_tol")]
    pub tol: f64,
}

impl Default for HopfSection {
    fn default() -> Self {
        HopfSection { lo: None, hi: None, tol: HOPF_PARAM_TOL }
    }
}

fn default_hopf_tol() -> f64 {
    HOPF_PARAM_TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ParameterBlock {
    #[serde(rename = "raw")]
    Raw(RawParameters),
    #[serde(rename = "scaled")]
    Scaled(ScaledInput),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    raw: Option<RawParameters>,
    #[serde(default)]
    scaled: Option<ScaledInput>,
    #[serde(default)]
    simulate: Option<SimulateSection>,
    #[serde(default)]
    sweep: Option<SweepSection>,
    #[serde(default)]
    hopf: Option<HopfSection>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub parameters: ParameterBlock,
    pub simulate: SimulateSection,
    pub sweep: Option<SweepSection>,
    pub hopf: HopfSection,
}

/// Scaled parameters ready for analysis. When the config gave no `A`,
/// `params.half_saturation` holds a placeholder and `a_given` is false.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolved {
    pub params: ScaledParameters,
    pub a_given: bool,
}

const PLACEHOLDER_A: f64 = 1.0;

impl Resolved {
    pub fn require_a(&self, command: &str) -> Result<ScaledParameters, ConfigError> {
        if self.a_given {
            Ok(self.params)
        } else {
            Err(ConfigError::Invalid(format!("`{command}` needs A: set it in the config or pass -A")))
        }
    }

    /// Parameters as echoed into reports, with `A` only when it was given.
    pub fn echo(&self) -> ScaledInput {
        let mut s = ScaledInput::from(self.params);
        if !self.a_given {
            s.a = None;
        }
        s
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        RunConfig::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<RunConfig, ConfigError> {
        let file: ConfigFile = serde_json::from_str(text)?;
        let parameters = match (file.raw, file.scaled) {
            (Some(raw), None) => ParameterBlock::Raw(raw),
            (None, Some(scaled)) => ParameterBlock::Scaled(scaled),
            (Some(_), Some(_)) => {
                return Err(ConfigError::Invalid("give either a `raw` or a `scaled` block, not both".into()))
            }
            (None, None) => return Err(ConfigError::Invalid("missing `raw` or `scaled` parameter block".into())),
        };
        let cfg = RunConfig {
            parameters,
            simulate: file.simulate.unwrap_or_default(),
            sweep: file.sweep,
            hopf: file.hopf.unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        self.resolve(None)?;
        let sim = &self.simulate;
        if !(sim.t_end > 0.0 && sim.t_end.is_finite()) {
            return Err(ConfigError::Invalid(format!("simulate.t_end must be > 0, got {}", sim.t_end)));
        }
        if !(sim.rel_tol > 0.0 && sim.abs_tol > 0.0) {
            return Err(ConfigError::Invalid("simulate tolerances must be > 0".into()));
        }
        if let Some(sw) = &self.sweep {
            check_range("sweep", sw.lo, sw.hi)?;
            if sw.n < 2 {
                return Err(ConfigError::Invalid(format!("sweep.n must be >= 2, got {}", sw.n)));
            }
        }
        if let (Some(lo), Some(hi)) = (self.hopf.lo, self.hopf.hi) {
            check_range("hopf", lo, hi)?;
        }
        if self.hopf.tol.is_nan() || self.hopf.tol <= 0.0 {
            return Err(ConfigError::Invalid(format!("hopf.tol must be > 0, got {}", self.hopf.tol)));
        }
        Ok(())
    }

    /// Scaled parameters, with `a_override` replacing any configured `A`.
    pub fn resolve(&self, a_override: Option<f64>) -> Result<Resolved, ConfigError> {
        let (mut params, a_given) = match self.parameters {
            ParameterBlock::Raw(raw) => (rescale(&raw)?, true),
            ParameterBlock::Scaled(s) => {
                let p = ScaledParameters {
                    prey_growth: s.r,
                    hunting_ratio: s.c,
                    recruitment_y: s.w,
                    mortality_y: s.s,
                    recruitment_z: s.v,
                    mortality_z: s.d,
                    max_uptake: s.b,
                    half_saturation: s.a.unwrap_or(PLACEHOLDER_A),
                };
                (p, s.a.is_some())
            }
        };
        let a_given = a_given || a_override.is_some();
        if let Some(a) = a_override {
            params.half_saturation = a;
        }
        params.validate()?;
        Ok(Resolved { params, a_given })
    }
}

pub fn check_range(what: &str, lo: f64, hi: f64) -> Result<(), ConfigError> {
    if lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi {
        Ok(())
    } else {
        Err(ConfigError::Invalid(format!("{what} range must satisfy 0 < lo < hi, got [{lo}, {hi}]")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCALED: &str = r#"{"scaled": {"r": 0.6, "c": 0.38, "w": 0.47, "s": 0.4, "v": 0.5, "d": 0.2, "B": 0.48}}"#;

    #[test]
    fn scaled_without_a() {
        let cfg = RunConfig::from_json(SCALED).unwrap();
        let r = cfg.resolve(None).unwrap();
        assert!(!r.a_given);
        assert!(r.require_a("equilibria").is_err());
        assert_eq!(r.echo().a, None);
        let r = cfg.resolve(Some(0.2)).unwrap();
        assert_eq!(r.require_a("equilibria").unwrap().half_saturation, 0.2);
    }

    #[test]
    fn exactly_one_block() {
        assert!(RunConfig::from_json("{}").is_err());
        let both = r#"{"scaled": {"r": 1, "c": 1, "w": 1, "s": 1, "v": 1, "d": 1, "B": 1},
            "raw": {"R": 1, "Ktilde": 1, "h": 1, "g": 1, "xi": 1, "mu": 1, "p": 0.5, "q": 0.5, "e": 0.5, "m": 1, "n": 1}}"#;
        assert!(matches!(RunConfig::from_json(both), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn rejects_bad_values() {
        let neg = SCALED.replace("\"d\": 0.2", "\"d\": -0.2");
        assert!(RunConfig::from_json(&neg).is_err());
        let typo = SCALED.replace("\"B\"", "\"b\"");
        assert!(matches!(RunConfig::from_json(&typo), Err(ConfigError::Parse(_))));
        let bad_sweep = SCALED.replace("}}", r#"}, "sweep": {"lo": 2, "hi": 1}}"#);
        assert!(RunConfig::from_json(&bad_sweep).is_err());
    }

    #[test]
    fn raw_block_rescales() {
        let raw = r#"{"raw": {"R": 1.2, "Ktilde": 2, "h": 0.76, "g": 2, "xi": 0.96, "mu": 0.4,
            "p": 0.47, "q": 0.53, "e": 0.5, "m": 0.2, "n": 0.1}}"#;
        let r = RunConfig::from_json(raw).unwrap().resolve(None).unwrap();
        assert!(r.a_given);
        assert!((r.params.prey_growth - 2.4).abs() < 1e-12);
        assert!((r.params.half_saturation - 0.2).abs() < 1e-12);
    }

    #[test]
    fn defaults_fill_sections() {
        let cfg = RunConfig::from_json(SCALED).unwrap();
        assert_eq!(cfg.simulate.t_end, 2000.0);
        assert_eq!(cfg.hopf.tol, HOPF_PARAM_TOL);
        assert!(cfg.sweep.is_none());
    }
}
