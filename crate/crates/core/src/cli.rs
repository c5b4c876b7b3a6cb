//! The `ecogen` command-line tool.
//!
//! Exit codes: 0 success, 2 config or usage error, 3 degenerate or
//! infeasible parameters, 4 integrator failure, 5 no sign change in a Hopf
//! bracket.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bifurcation::{self, CriticalPoint, HopfCertificate, SweepParam, SweepPoint};
use crate::config::{check_range, ConfigError, Resolved, RunConfig, ScaledInput};
use crate::dynamics::{self, AsymptoticVerdict, IntegrationOptions};
use crate::equilibria::{self, DerivedQuantities, Equilibrium};
use crate::error::Error;
use crate::model::{rhs_scaled, StateVector};
use crate::output;
use crate::stability::{self, ClassifierQuantities, StabilityReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_INTEGRATOR: i32 = 4;
pub const EXIT_NO_SIGN_CHANGE: i32 = 5;

/// Relative inset applied to a candidate interval used as a Hopf bracket,
/// keeping the search off knots where `a1` or `a2` vanish.
const BRACKET_INSET: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "ecogen", version, about = "Equilibria, stability and bifurcations of a two-genotype predator-prey model")]
pub struct Cli {
    /// JSON run configuration
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output file (stdout when omitted)
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Half-saturation constant A, overriding the config
    #[arg(short = 'A', long = "half-saturation", global = true, value_name = "A", allow_negative_numbers = true)]
    pub half_saturation: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equilibria, their feasibility and local stability
    Equilibria,
    /// Sign classification of the characteristic coefficients along A
    Classify,
    /// Integrate a trajectory and classify its long-run behavior
    Simulate {
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        rel_tol: Option<f64>,
        #[arg(long)]
        abs_tol: Option<f64>,
        /// Where to write the verdict JSON in CSV mode
        #[arg(long, value_name = "PATH")]
        verdict: Option<PathBuf>,
    },
    /// Evaluate stability over a range of A or B
    Sweep {
        #[arg(long)]
        param: Option<SweepParam>,
        #[arg(long, allow_negative_numbers = true)]
        lo: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        hi: Option<f64>,
        #[arg(short = 'n', long)]
        n: Option<usize>,
    },
    /// Locate the Hopf value of A by bisection
    Hopf {
        #[arg(long, allow_negative_numbers = true)]
        lo: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        hi: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Analysis(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Output { .. } => EXIT_CONFIG,
            CliError::Analysis(e) => match e {
                Error::Domain(_) => EXIT_CONFIG,
                Error::Degenerate(_) | Error::Infeasible(_) | Error::RealCrossing(_) => EXIT_DEGENERATE,
                Error::StepFailure { .. } | Error::TooManySteps(_) | Error::InsufficientSpan(_) => EXIT_INTEGRATOR,
                Error::NoSignChange { .. } => EXIT_NO_SIGN_CHANGE,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumEntry {
    pub equilibrium: Equilibrium,
    /// `‖rhs‖∞` at the state; absent where the right-hand side is singular.
    pub residual: Option<f64>,
    /// Local stability; absent for an infeasible coexistence point.
    pub stability: Option<StabilityReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriaReport {
    pub parameters: ScaledInput,
    pub derived: DerivedQuantities,
    /// Critical uptake `B†` at the configured A.
    #[serde(rename = "B_dagger")]
    pub b_dagger: f64,
    /// Feasibility limit `V/ds` on A, when `V > 0`.
    #[serde(rename = "A_transcritical")]
    pub a_transcritical: Option<f64>,
    pub equilibria: Vec<EquilibriumEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub parameters: ScaledInput,
    pub classifier: ClassifierQuantities,
    /// Whether the coexistence point exists at the given A.
    pub coexistence_feasible: Option<bool>,
    pub stability: Option<StabilityReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub parameters: ScaledInput,
    pub initial: StateVector,
    pub t_end: f64,
    pub options: IntegrationOptions,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub clamped: usize,
    pub final_state: StateVector,
    pub verdict: AsymptoticVerdict,
    pub coexistence: Option<StateVector>,
    /// `‖u(t_end) - F₂‖∞` when the coexistence point is feasible.
    pub distance_to_coexistence: Option<f64>,
    /// Rows `[t, X, Y, Z]`, only in JSON mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<[f64; 4]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub parameters: ScaledInput,
    pub param: SweepParam,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub points: Vec<SweepPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopfReport {
    pub parameters: ScaledInput,
    pub critical: CriticalPoint,
    pub certificate: HopfCertificate,
    /// Upper end of coexistence feasibility, `V/ds`.
    #[serde(rename = "A_transcritical")]
    pub a_transcritical: f64,
}

/// Parse `args`, run the command and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| ConfigError::Invalid("--config <PATH> is required".into()))?;
    let cfg = RunConfig::from_path(path)?;
    let resolved = cfg.resolve(cli.half_saturation)?;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Equilibria => {
            json_only(cli.format, "equilibria")?;
            let report = equilibria_report(&resolved)?;
            emit(out, |w| output::write_json(&report, w))
        }
        Command::Classify => {
            json_only(cli.format, "classify")?;
            let report = classify_report(&resolved)?;
            emit(out, |w| output::write_json(&report, w))
        }
        Command::Simulate { t_end, rel_tol, abs_tol, verdict } => {
            let mut sim = cfg.simulate;
            sim.t_end = t_end.unwrap_or(sim.t_end);
            sim.rel_tol = rel_tol.unwrap_or(sim.rel_tol);
            sim.abs_tol = abs_tol.unwrap_or(sim.abs_tol);
            let p = resolved.require_a("simulate")?;
            let initial = sim.initial.unwrap_or_else(|| dynamics::default_initial_condition(&p));
            let opts = sim.integration_options();
            let tr = dynamics::integrate_with(&p, initial, sim.t_end, &opts)?;
            let verdict_value = dynamics::classify_asymptotics(&tr)?;
            let coexistence = equilibria::coexistence(&p).ok().filter(|e| e.feasible).map(|e| e.state);
            let final_state = tr.last_state();
            let mut report = SimulationReport {
                parameters: resolved.echo(),
                initial,
                t_end: sim.t_end,
                options: opts,
                accepted_steps: tr.accepted_steps,
                rejected_steps: tr.rejected_steps,
                clamped: tr.clamped,
                final_state,
                verdict: verdict_value,
                coexistence,
                distance_to_coexistence: coexistence.map(|c| (final_state - c).max_abs()),
                trajectory: None,
            };
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    emit(out, |w| output::write_trajectory_csv(&tr, w))?;
                    match (verdict.as_deref(), out) {
                        (Some(v), _) => emit(Some(v), |w| output::write_json(&report, w)),
                        (None, Some(_)) => emit(None, |w| output::write_json(&report, w)),
                        (None, None) => output::write_json(&report, io::stderr().lock())
                            .map_err(|source| CliError::Output { path: "<stderr>".into(), source }),
                    }
                }
                Format::Json => {
                    if let Some(v) = verdict.as_deref() {
                        emit(Some(v), |w| output::write_json(&report, w))?;
                    }
                    report.trajectory = Some(
                        tr.times.iter().zip(&tr.states).map(|(t, s)| [*t, s.x, s.y, s.z]).collect(),
                    );
                    emit(out, |w| output::write_json(&report, w))
                }
            }
        }
        Command::Sweep { param, lo, hi, n } => {
            let section = cfg.sweep;
            let param = param.or(section.map(|s| s.param)).unwrap_or(SweepParam::A);
            let lo = lo.or(section.map(|s| s.lo));
            let hi = hi.or(section.map(|s| s.hi));
            let n = n.or(section.map(|s| s.n)).unwrap_or(201);
            let (Some(lo), Some(hi)) = (lo, hi) else {
                return Err(ConfigError::Invalid("sweep needs a range: a `sweep` block or --lo/--hi".into()).into());
            };
            check_range("sweep", lo, hi)?;
            let base = match param {
                SweepParam::A => resolved.params,
                SweepParam::B => resolved.require_a("sweep --param B")?,
            };
            let points = bifurcation::sweep(&base, param, lo, hi, n)?;
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => emit(out, |w| output::write_sweep_csv(&points, w)),
                Format::Json => {
                    let mut parameters = resolved.echo();
                    if param == SweepParam::A {
                        parameters.a = None;
                    }
                    let report = SweepReport { parameters, param, lo, hi, n, points };
                    emit(out, |w| output::write_json(&report, w))
                }
            }
        }
        Command::Hopf { lo, hi, tol } => {
            json_only(cli.format, "hopf")?;
            let p = resolved.params;
            let tol = tol.unwrap_or(cfg.hopf.tol);
            let (lo, hi) = hopf_bracket(&resolved, lo.or(cfg.hopf.lo), hi.or(cfg.hopf.hi))?;
            let critical = bifurcation::find_hopf_with_tol(&p, lo, hi, tol)?;
            let certificate = bifurcation::hopf_certificate(&p, critical.value)?;
            let mut parameters = resolved.echo();
            parameters.a = None;
            let report = HopfReport {
                parameters,
                critical,
                certificate,
                a_transcritical: equilibria::transcritical_a(&p)?,
            };
            emit(out, |w| output::write_json(&report, w))
        }
    }
}

fn json_only(format: Option<Format>, command: &str) -> Result<(), ConfigError> {
    match format {
        Some(Format::Csv) => Err(ConfigError::Invalid(format!("`{command}` only writes JSON"))),
        _ => Ok(()),
    }
}

fn emit<F>(path: Option<&Path>, write: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match path {
        Some(path) => {
            let wrap = |source| CliError::Output { path: path.display().to_string(), source };
            let mut file = File::create(path).map_err(wrap)?;
            write(&mut file).map_err(wrap)
        }
        None => write(&mut io::stdout().lock()).map_err(|source| CliError::Output { path: "<stdout>".into(), source }),
    }
}

pub fn equilibria_report(resolved: &Resolved) -> Result<EquilibriaReport, CliError> {
    let p = resolved.require_a("equilibria")?;
    let coexistence = equilibria::coexistence(&p)?;
    let residual = |e: &Equilibrium| rhs_scaled(&p, e.state).ok().map(|r| r.max_abs());
    let mut entries = vec![
        EquilibriumEntry {
            equilibrium: equilibria::origin(),
            residual: residual(&equilibria::origin()),
            stability: Some(stability::f0_stability(&p)),
        },
        EquilibriumEntry {
            equilibrium: equilibria::prey_only(),
            residual: residual(&equilibria::prey_only()),
            stability: Some(stability::f1_stability(&p)),
        },
    ];
    let stability = if coexistence.feasible { Some(stability::coexistence_stability(&p)?) } else { None };
    entries.push(EquilibriumEntry { equilibrium: coexistence, residual: residual(&coexistence), stability });
    Ok(EquilibriaReport {
        parameters: resolved.echo(),
        derived: equilibria::derived(&p),
        b_dagger: equilibria::transcritical_b(&p)?,
        a_transcritical: equilibria::transcritical_a(&p).ok(),
        equilibria: entries,
    })
}

pub fn classify_report(resolved: &Resolved) -> Result<ClassifyReport, CliError> {
    let classifier = stability::classifier_quantities(&resolved.params)?;
    let (coexistence_feasible, stability) = if resolved.a_given {
        let eq = equilibria::coexistence(&resolved.params)?;
        let report = if eq.feasible { Some(stability::coexistence_stability(&resolved.params)?) } else { None };
        (Some(eq.feasible), report)
    } else {
        (None, None)
    };
    Ok(ClassifyReport { parameters: resolved.echo(), classifier, coexistence_feasible, stability })
}

/// Bracket from the given ends, falling back to the first candidate
/// interval of the classification, slightly inset.
fn hopf_bracket(resolved: &Resolved, lo: Option<f64>, hi: Option<f64>) -> Result<(f64, f64), CliError> {
    if let (Some(lo), Some(hi)) = (lo, hi) {
        check_range("hopf", lo, hi)?;
        return Ok((lo, hi));
    }
    let intervals = stability::candidate_intervals(&resolved.params)?;
    let Some(first) = intervals.first() else {
        return Err(ConfigError::Invalid(
            "no Hopf bracket given and the classification has no interval with a1 > 0 and a2 > 0".into(),
        )
        .into());
    };
    let inset = BRACKET_INSET * first.width();
    let lo = lo.unwrap_or(first.lo + inset);
    let hi = hi.unwrap_or(first.hi - inset);
    check_range("hopf", lo, hi)?;
    Ok((lo, hi))
}
