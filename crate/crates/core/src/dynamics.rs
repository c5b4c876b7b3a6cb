//! Time integration of the scaled system and classification of long-run
//! behavior.

use serde::{Deserialize, Serialize};

use crate::equilibria;
use crate::error::{Error, Result};
use crate::model::{rhs_scaled, ScaledParameters, StateVector};

/// Fewest output points allowed in an integration.
pub const MIN_OUTPUT_POINTS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Number of uniform output intervals; raised to at least 4096.
    pub output_points: usize,
    pub max_steps: usize,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            output_points: 8192,
            max_steps: 5_000_000,
        }
    }
}

/// Integrated orbit sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub params: ScaledParameters,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Number of negative components reset to zero during the run.
    pub clamped: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> StateVector {
        *self.states.last().expect("trajectory always holds the initial state")
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("trajectory always holds the initial time")
    }
}

// Dormand-Prince 5(4) tableau. The system is autonomous, so the stage
// nodes c_i are not needed.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// difference between the 5th and embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// continuous extension
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// PI step-size controller
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;
const MAX_GROWTH: f64 = 10.0;
const MAX_SHRINK: f64 = 5.0;

type Vec3 = [f64; 3];

fn axpy(y: &Vec3, terms: &[(f64, &Vec3)]) -> Vec3 {
    let mut out = *y;
    for (coef, k) in terms {
        for i in 0..3 {
            out[i] += coef * k[i];
        }
    }
    out
}

struct Field<'a> {
    params: &'a ScaledParameters,
    clamped: usize,
}

impl Field<'_> {
    fn eval(&mut self, y: &Vec3) -> Result<Vec3> {
        let u = StateVector::from_array(*y);
        let clamped = u.clamp_nonnegative();
        if clamped != u {
            self.clamped += 1;
        }
        Ok(rhs_scaled(self.params, clamped)?.to_array())
    }
}

fn error_norm(err: &Vec3, y0: &Vec3, y1: &Vec3, rtol: f64, atol: f64) -> f64 {
    let sum: f64 = (0..3)
        .map(|i| {
            let sk = atol + rtol * y0[i].abs().max(y1[i].abs());
            (err[i] / sk).powi(2)
        })
        .sum();
    (sum / 3.0).sqrt()
}

fn initial_step(field: &mut Field, y0: &Vec3, f0: &Vec3, t_end: f64, rtol: f64, atol: f64) -> Result<f64> {
    let scaled_norm = |v: &Vec3| {
        let s: f64 = (0..3).map(|i| (v[i] / (atol + rtol * y0[i].abs())).powi(2)).sum();
        (s / 3.0).sqrt()
    };
    let d0 = scaled_norm(y0);
    let d1 = scaled_norm(f0);
    let h0 = if d0 < 1e-10 || d1 < 1e-10 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(t_end);
    let y1 = axpy(y0, &[(h0, f0)]);
    let f1 = field.eval(&y1)?;
    let diff = [f1[0] - f0[0], f1[1] - f0[1], f1[2] - f0[2]];
    let d2 = scaled_norm(&diff) / h0;
    let dmax = d1.max(d2);
    let h1 = if dmax <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / dmax).powf(0.2) };
    Ok((100.0 * h0).min(h1).min(t_end))
}

/// Integrate from `u0` over `[0, t_end]` with the default output density.
pub fn integrate(
    p: &ScaledParameters,
    u0: StateVector,
    t_end: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Trajectory> {
    let opts = IntegrationOptions { rel_tol, abs_tol, ..IntegrationOptions::default() };
    integrate_with(p, u0, t_end, &opts)
}

/// Adaptive Dormand-Prince 5(4) integration with PI step control, sampled on
/// a uniform grid through the continuous extension.
pub fn integrate_with(
    p: &ScaledParameters,
    u0: StateVector,
    t_end: f64,
    opts: &IntegrationOptions,
) -> Result<Trajectory> {
    p.validate()?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Domain(format!("t_end must be finite and > 0, got {t_end}")));
    }
    if !(opts.rel_tol > 0.0 && opts.abs_tol > 0.0) {
        return Err(Error::Domain("tolerances must be > 0".into()));
    }
    if !u0.is_finite() || u0.x < 0.0 || u0.y < 0.0 || u0.z < 0.0 {
        return Err(Error::Domain(format!("initial state must be finite and nonnegative: {u0:?}")));
    }
    let (rtol, atol) = (opts.rel_tol, opts.abs_tol);
    let intervals = opts.output_points.max(MIN_OUTPUT_POINTS);
    let min_step = 1e-14 * t_end;

    let mut field = Field { params: p, clamped: 0 };
    let mut times = Vec::with_capacity(intervals + 1);
    let mut states = Vec::with_capacity(intervals + 1);
    times.push(0.0);
    states.push(u0);
    let mut next_out = 1usize;
    let grid = |i: usize| t_end * i as f64 / intervals as f64;

    let mut t = 0.0;
    let mut y = u0.to_array();
    let mut k1 = field.eval(&y)?;
    let mut h = initial_step(&mut field, &y, &k1, t_end, rtol, atol)?;
    let mut err_old: f64 = 1e-4;
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut last_rejected = false;

    while next_out <= intervals {
        if accepted + rejected >= opts.max_steps {
            return Err(Error::TooManySteps(opts.max_steps));
        }
        if h < min_step {
            return Err(Error::StepFailure { t, step: h });
        }
        let final_step = t + h >= t_end;
        if final_step {
            h = t_end - t;
        }

        let k2 = field.eval(&axpy(&y, &[(h * A21, &k1)]))?;
        let k3 = field.eval(&axpy(&y, &[(h * A31, &k1), (h * A32, &k2)]))?;
        let k4 = field.eval(&axpy(&y, &[(h * A41, &k1), (h * A42, &k2), (h * A43, &k3)]))?;
        let k5 = field.eval(&axpy(
            &y,
            &[(h * A51, &k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)],
        ))?;
        let k6 = field.eval(&axpy(
            &y,
            &[(h * A61, &k1), (h * A62, &k2), (h * A63, &k3), (h * A64, &k4), (h * A65, &k5)],
        ))?;
        let y_new = axpy(
            &y,
            &[(h * A71, &k1), (h * A73, &k3), (h * A74, &k4), (h * A75, &k5), (h * A76, &k6)],
        );
        let k7 = field.eval(&y_new)?;
        let err_vec = {
            let mut e = [0.0; 3];
            for i in 0..3 {
                e[i] = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            }
            e
        };
        let err = error_norm(&err_vec, &y, &y_new, rtol, atol);
        if !err.is_finite() {
            rejected += 1;
            h /= MAX_SHRINK;
            last_rejected = true;
            continue;
        }

        let fac_err = err.powf(EXPO);
        if err <= 1.0 {
            accepted += 1;
            let t_new = if final_step { t_end } else { t + h };

            // emit grid points in (t, t_new]
            if grid(next_out) <= t_new {
                let mut cont = [[0.0; 3]; 5];
                for i in 0..3 {
                    let dy = y_new[i] - y[i];
                    let bspl = h * k1[i] - dy;
                    cont[0][i] = y[i];
                    cont[1][i] = dy;
                    cont[2][i] = bspl;
                    cont[3][i] = dy - h * k7[i] - bspl;
                    cont[4][i] = h
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                while next_out <= intervals && grid(next_out) <= t_new {
                    let t_out = grid(next_out);
                    let state = if next_out == intervals {
                        y_new
                    } else {
                        let theta = (t_out - t) / h;
                        let theta1 = 1.0 - theta;
                        let mut s = [0.0; 3];
                        for i in 0..3 {
                            s[i] = cont[0][i]
                                + theta
                                    * (cont[1][i]
                                        + theta1
                                            * (cont[2][i]
                                                + theta * (cont[3][i] + theta1 * cont[4][i])));
                        }
                        s
                    };
                    times.push(t_out);
                    states.push(StateVector::from_array(state).clamp_nonnegative());
                    next_out += 1;
                }
            }

            let clamped_new = StateVector::from_array(y_new).clamp_nonnegative().to_array();
            if clamped_new != y_new {
                field.clamped += 1;
                k1 = field.eval(&clamped_new)?;
            } else {
                k1 = k7;
            }
            y = clamped_new;
            t = t_new;

            let mut fac = (fac_err / err_old.powf(BETA) / SAFETY).clamp(1.0 / MAX_GROWTH, MAX_SHRINK);
            if last_rejected {
                fac = fac.max(1.0);
            }
            err_old = err.max(1e-4);
            h = (h / fac).min(t_end);
            last_rejected = false;
        } else {
            rejected += 1;
            h /= (fac_err / SAFETY).min(MAX_SHRINK);
            last_rejected = true;
        }
    }

    if field.clamped > 0 {
        log::debug!("clamped {} negative state components to zero", field.clamped);
    }
    Ok(Trajectory {
        times,
        states,
        params: *p,
        rel_tol: rtol,
        abs_tol: atol,
        accepted_steps: accepted,
        rejected_steps: rejected,
        clamped: field.clamped,
    })
}

/// Starting point used when none is supplied: the coexistence equilibrium
/// perturbed by 1% if it is feasible, else `(0.5, 0.1, 0.1)`.
pub fn default_initial_condition(p: &ScaledParameters) -> StateVector {
    match equilibria::coexistence(p) {
        Ok(eq) if eq.feasible => eq.state.scale(1.01),
        _ => StateVector::new(0.5, 0.1, 0.1),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    /// Leading fraction of the run discarded as transient.
    pub transient_fraction: f64,
    /// Terminal `‖rhs‖∞` below which the run counts as settled.
    pub steady_tol: f64,
    /// Minimum peak-to-peak amplitude of X for an oscillation.
    pub amplitude_tol: f64,
    /// Relative spread allowed among the compared periods and excursions.
    pub period_rel_tol: f64,
    /// Number of trailing inter-peak intervals compared, at most.
    pub periods_compared: usize,
    /// Fewest inter-peak intervals accepted when the window holds fewer
    /// than `periods_compared`.
    pub min_periods: usize,
    /// Fewest samples required after the transient.
    pub min_window_points: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            transient_fraction: 0.5,
            steady_tol: 1e-8,
            amplitude_tol: 1e-3,
            period_rel_tol: 0.05,
            periods_compared: 5,
            min_periods: 2,
            min_window_points: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    SteadyState {
        state: StateVector,
        residual: f64,
    },
    LimitCycle {
        mean: StateVector,
        /// Peak-to-peak amplitude of each component after the transient.
        amplitude: StateVector,
        period: f64,
        peaks: usize,
    },
    Undecided {
        x_amplitude: f64,
        residual: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticVerdict {
    pub verdict: Verdict,
    pub transient_fraction: f64,
}

impl AsymptoticVerdict {
    pub fn is_steady(&self) -> bool {
        matches!(self.verdict, Verdict::SteadyState { .. })
    }

    pub fn is_limit_cycle(&self) -> bool {
        matches!(self.verdict, Verdict::LimitCycle { .. })
    }
}

pub fn classify_asymptotics(tr: &Trajectory) -> Result<AsymptoticVerdict> {
    classify_asymptotics_with(tr, &ClassifyOptions::default())
}

pub fn classify_asymptotics_with(tr: &Trajectory, opts: &ClassifyOptions) -> Result<AsymptoticVerdict> {
    if tr.is_empty() {
        return Err(Error::InsufficientSpan("empty trajectory".into()));
    }
    let t0 = tr.times[0];
    let cut = t0 + opts.transient_fraction * (tr.t_end() - t0);
    let start = tr.times.partition_point(|&t| t < cut);
    let window = &tr.states[start..];
    let times = &tr.times[start..];
    if window.len() < opts.min_window_points {
        return Err(Error::InsufficientSpan(format!(
            "{} samples after the transient, need {}",
            window.len(),
            opts.min_window_points
        )));
    }
    let last = tr.last_state();
    let residual = rhs_scaled(&tr.params, last)?.max_abs();
    let done = |verdict| AsymptoticVerdict { verdict, transient_fraction: opts.transient_fraction };
    if residual < opts.steady_tol {
        return Ok(done(Verdict::SteadyState { state: last, residual }));
    }

    let range = |f: fn(&StateVector) -> f64| {
        window.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (x_lo, x_hi) = range(|s| s.x);
    let x_amplitude = x_hi - x_lo;
    let undecided = Verdict::Undecided { x_amplitude, residual };
    if x_amplitude <= opts.amplitude_tol {
        return Ok(done(undecided));
    }

    let xs: Vec<f64> = window.iter().map(|s| s.x).collect();
    let peaks = find_peaks(times, &xs, 0.5 * (x_lo + x_hi));
    // slow cycles may fit fewer than `periods_compared` periods after the transient
    if peaks.len() < opts.min_periods.max(1) + 1 {
        return Ok(done(undecided));
    }
    let recent = &peaks[peaks.len().saturating_sub(opts.periods_compared + 1)..];
    let intervals: Vec<f64> = recent.windows(2).map(|w| w[1].0 - w[0].0).collect();
    let period = intervals.iter().sum::<f64>() / intervals.len() as f64;
    let periodic = intervals.iter().all(|d| (d - period).abs() <= opts.period_rel_tol * period);
    // decaying or growing spirals have drifting peak-to-trough excursions
    let excursions: Vec<f64> = recent
        .windows(2)
        .map(|w| {
            let trough = times
                .iter()
                .zip(&xs)
                .filter(|(t, _)| **t >= w[0].0 && **t <= w[1].0)
                .fold(f64::INFINITY, |m, (_, x)| m.min(*x));
            w[1].1 - trough
        })
        .collect();
    let (e_lo, e_hi) = excursions
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| (lo.min(*e), hi.max(*e)));
    let e_mean = excursions.iter().sum::<f64>() / excursions.len() as f64;
    let steady_excursion = e_hi - e_lo <= opts.period_rel_tol * e_mean;
    if !(periodic && steady_excursion) {
        return Ok(done(undecided));
    }

    let n = window.len() as f64;
    let mean = StateVector::new(
        window.iter().map(|s| s.x).sum::<f64>() / n,
        window.iter().map(|s| s.y).sum::<f64>() / n,
        window.iter().map(|s| s.z).sum::<f64>() / n,
    );
    let (y_lo, y_hi) = range(|s| s.y);
    let (z_lo, z_hi) = range(|s| s.z);
    Ok(done(Verdict::LimitCycle {
        mean,
        amplitude: StateVector::new(x_amplitude, y_hi - y_lo, z_hi - z_lo),
        period,
        peaks: peaks.len(),
    }))
}

/// Three-point local maxima above `floor`, with parabolic refinement of the
/// peak time and height. Returns `(time, value)` pairs.
pub fn find_peaks(times: &[f64], values: &[f64], floor: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 1..values.len().saturating_sub(1) {
        let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
        if !(b > a && b >= c && b > floor) {
            continue;
        }
        let denom = a - 2.0 * b + c;
        let (shift, height) = if denom < 0.0 {
            let s = 0.5 * (a - c) / denom;
            (s, b - 0.25 * (a - c) * s)
        } else {
            (0.0, b)
        };
        let dt = 0.5 * (times[i + 1] - times[i - 1]);
        out.push((times[i] + shift * dt, height));
    }
    out
}
