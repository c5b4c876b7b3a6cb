//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use ecogen::bifurcation::{self, SweepParam};
use ecogen::config::RunConfig;
use ecogen::dynamics::{self, Verdict};
use ecogen::equilibria;
use ecogen::model::{jacobian, StateVector};
use ecogen::stability::{self, A1Case, A2Case, CharPolyCoeffs};
use ecogen::ScaledParameters;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn near(label: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || format!("{label} = {got}, expected {want} ± {tol}"))
}

fn config(name: &str) -> RunConfig {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "configs", name].iter().collect();
    RunConfig::from_path(&path).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn configured(name: &str) -> ScaledParameters {
    config(name).resolve(None).unwrap().params
}

fn coexistence_state() -> Check {
    let p = configured("baseline.json");
    let eq = equilibria::coexistence(&p).map_err(|e| e.to_string())?;
    ensure(eq.feasible, || "coexistence point reported infeasible".into())?;
    for (label, got, want) in [("X", eq.state.x, 0.5), ("Y", eq.state.y, 0.17625), ("Z", eq.state.z, 0.375)] {
        near(label, got, want, 1e-4)?;
    }
    Ok(format!("F2 = ({:.6}, {:.6}, {:.6})", eq.state.x, eq.state.y, eq.state.z))
}

fn transcritical_threshold() -> Check {
    let p = configured("baseline.json");
    let crit = bifurcation::find_transcritical(&p, SweepParam::A).map_err(|e| e.to_string())?;
    near("A at W = 0", crit.value, 0.41432, 1e-5)?;
    let w_at = |a: f64| common::qvw(&p.with_half_saturation(a)).2;
    ensure(w_at(crit.value - 1e-4) > 0.0 && w_at(crit.value + 1e-4) < 0.0, || "W does not change sign".into())?;
    let threshold = 0.41432;
    let pts = bifurcation::sweep(&p, SweepParam::A, 0.5 * threshold, 1.5 * threshold, 3).map_err(|e| e.to_string())?;
    let stable: Vec<bool> = pts.iter().map(|pt| pt.f1_stable).collect();
    ensure(stable == [false, false, true], || format!("F1 stability along the sweep: {stable:?}"))?;
    let fine = bifurcation::sweep(&p, SweepParam::A, 0.05, 1.0, 400).map_err(|e| e.to_string())?;
    for pt in &fine {
        if (pt.value - threshold).abs() > 1e-5 {
            ensure(pt.f1_stable == (pt.value > threshold), || format!("F1 stability wrong at A = {}", pt.value))?;
        }
    }
    Ok(format!("W = 0 at A = {:.8}", crit.value))
}

struct KnotTarget {
    config: &'static str,
    k: Option<f64>,
    h_over_m: f64,
    v_over_bq_ds: f64,
    bq_2ds_over_ds: f64,
    v_over_ds: f64,
}

fn knot_tables() -> Check {
    let targets = [
        KnotTarget { config: "example1.json", k: Some(-2.30), h_over_m: 0.36, v_over_bq_ds: 0.71, bq_2ds_over_ds: 3.81, v_over_ds: 4.81 },
        KnotTarget { config: "example2.json", k: Some(0.41), h_over_m: 15.03, v_over_bq_ds: 0.64, bq_2ds_over_ds: 2.54, v_over_ds: 3.54 },
        KnotTarget { config: "example3.json", k: None, h_over_m: -2.54, v_over_bq_ds: 0.67, bq_2ds_over_ds: 3.05, v_over_ds: 4.05 },
    ];
    let mut summary = Vec::new();
    for t in &targets {
        let p = configured(t.config);
        let q = stability::classifier_quantities(&p).map_err(|e| e.to_string())?;
        use ecogen::stability::KnotLabel::*;
        let knot = |l| q.knot(l).ok_or_else(|| format!("{}: knot {l} missing", t.config));
        let oracle = common::knots(&p);
        match t.k {
            Some(k) => near(&format!("{} K", t.config), q.k, k, 0.01)?,
            None => near(&format!("{} K vs formula", t.config), q.k, oracle.k, 1e-12 * oracle.k.abs().max(1.0))?,
        }
        near(&format!("{} H/M", t.config), knot(HOverM)?, t.h_over_m, 0.01)?;
        near(&format!("{} V/(BQ+ds)", t.config), knot(VOverBqPlusDs)?, t.v_over_bq_ds, 0.01)?;
        near(&format!("{} (BQ-2ds)/ds", t.config), knot(BqMinusTwoDsOverDs)?, t.bq_2ds_over_ds, 0.01)?;
        near(&format!("{} V/ds", t.config), knot(VOverDs)?, t.v_over_ds, 0.01)?;
        summary.push(format!("{} {}", t.config.trim_end_matches(".json"), q.label));
    }
    Ok(summary.join(", "))
}

fn hopf_values() -> Check {
    let mut summary = Vec::new();
    for (name, want) in [("example1.json", 0.4331191029), ("example2.json", 0.6376318460), ("example3.json", 0.4964791610)] {
        let cfg = config(name);
        let p = cfg.resolve(None).unwrap().params;
        let (lo, hi) = (cfg.hopf.lo.unwrap(), cfg.hopf.hi.unwrap());
        let start = Instant::now();
        let crit = bifurcation::find_hopf(&p, lo, hi).map_err(|e| format!("{name}: {e}"))?;
        let elapsed = start.elapsed().as_secs_f64();
        near(&format!("{name} A*"), crit.value, want, 1e-4)?;
        ensure(elapsed < 1.0, || format!("{name}: bisection took {elapsed:.3} s"))?;
        summary.push(format!("{:.10}", crit.value));
    }
    Ok(format!("A* = {}", summary.join(", ")))
}

fn dynamical_verdicts() -> Check {
    let third = 0.4964791610;
    let cases = [
        ("example1.json", 0.2, 0.6),
        ("example2.json", 0.25, 0.85),
        ("example3.json", 0.5 * third, 1.5 * third),
    ];
    let mut periods = Vec::new();
    for (name, sub, sup) in cases {
        let p = configured(name);
        for (a, expect_cycle) in [(sub, true), (sup, false)] {
            let pa = p.with_half_saturation(a);
            let u0 = dynamics::default_initial_condition(&pa);
            let tr = dynamics::integrate(&pa, u0, 2000.0, 1e-8, 1e-10).map_err(|e| format!("{name} A={a}: {e}"))?;
            let verdict = dynamics::classify_asymptotics(&tr).map_err(|e| format!("{name} A={a}: {e}"))?;
            match (&verdict.verdict, expect_cycle) {
                (Verdict::LimitCycle { period, .. }, true) => periods.push(format!("{period:.1}")),
                (Verdict::SteadyState { state, .. }, false) => {
                    let f2 = StateVector::from_array(common::coexistence(&pa));
                    let dist = (*state - f2).max_abs();
                    ensure(dist < 1e-5, || format!("{name} A={a}: settled {dist:e} away from F2"))?;
                }
                (other, _) => return Err(format!("{name} A={a}: got {other:?}")),
            }
        }
    }
    Ok(format!("limit-cycle periods {}", periods.join(", ")))
}

fn random_cubic(rng: &mut ChaCha8Rng) -> CharPolyCoeffs {
    if rng.random_bool(0.5) {
        CharPolyCoeffs::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0))
    } else {
        // real root -l and complex pair α ± iβ
        let l = rng.random_range(-2.0..2.0);
        let alpha = rng.random_range(-1.0..1.0);
        let beta2 = rng.random_range(0.0..4.0);
        let q1 = -2.0 * alpha;
        let q0 = alpha * alpha + beta2;
        CharPolyCoeffs::new(l + q1, l * q1 + q0, l * q0)
    }
}

/// Signs of a1 and a2 at A predicted by the case tables alone.
fn table_prediction(a1_case: A1Case, a2_case: A2Case, k: f64, h_over_m: Option<f64>, a: f64) -> Option<(bool, bool)> {
    let a1 = match a1_case {
        A1Case::A | A1Case::B => true,
        A1Case::C | A1Case::D => a > k,
    };
    use A2Case::*;
    let a2 = match a2_case {
        OnePlus | OneMinus => a > h_over_m?,
        TwoPlus | TwoMinus | ThreePlus | ThreeMinus | FourPlus | FourMinus => true,
        FiveMinus | SixMinus | SevenMinus => false,
        Degenerate => return None,
    };
    Some((a1, a2))
}

fn property_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2024);
    let margin_tol = 1e-9;

    let mut cubic_checked = 0;
    for _ in 0..1000 {
        let c = random_cubic(&mut rng);
        let max_re = common::max_real_eig(&common::companion(c.to_array()));
        let margin = c.a1.abs().min(c.a3.abs()).min(c.hurwitz_margin().abs());
        if margin <= margin_tol || max_re.abs() <= margin_tol {
            continue;
        }
        cubic_checked += 1;
        let rh = stability::routh_hurwitz(&c).stable();
        ensure(rh == (max_re < 0.0), || format!("RH/eigen mismatch on cubic {c:?}: max Re {max_re}"))?;
    }

    let mut model_checked = 0;
    for _ in 0..1000 {
        let p = common::random_feasible(&mut rng);
        let report = stability::coexistence_stability(&p).map_err(|e| format!("{p:?}: {e}"))?;
        let coeffs = report.coeffs.unwrap();
        ensure(coeffs.a3 > 0.0, || format!("a3 = {} on feasible draw {p:?}", coeffs.a3))?;
        let max_re = common::max_real_eig(&common::jacobian(&p, common::coexistence(&p)));
        let residual = common::max_abs(common::rhs(&p, report.state.to_array()));
        ensure(residual < 1e-10, || format!("residual {residual:e} at F2 for {p:?}"))?;
        let margin = coeffs.a1.abs().min(coeffs.hurwitz_margin().abs());
        if margin <= margin_tol || max_re.abs() <= margin_tol {
            continue;
        }
        model_checked += 1;
        ensure(report.stable == (max_re < 0.0), || format!("RH/eigen mismatch for {p:?}: max Re {max_re}"))?;
    }

    let mut samples = 0;
    let mut cases_seen = std::collections::BTreeSet::new();
    for _ in 0..1000 {
        let p = common::random_params(&mut rng);
        let q = stability::classifier_quantities(&p).map_err(|e| format!("{p:?}: {e}"))?;
        cases_seen.insert(q.a2_case.as_str());
        ensure(q.k < 1.0, || format!("K = {} >= 1 for {p:?}", q.k))?;
        let oracle = common::knots(&p);
        let v_over_ds = oracle.v_over_ds;
        let mut cuts: Vec<f64> = vec![0.0, v_over_ds, oracle.k, oracle.v_over_bq_ds, oracle.bq_2ds_over_ds, 1.0];
        if oracle.m != 0.0 {
            cuts.push(oracle.h / oracle.m);
        }
        cuts.retain(|x| x.is_finite() && *x >= 0.0 && *x <= v_over_ds);
        cuts.sort_by(f64::total_cmp);
        for pair in cuts.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            if hi - lo <= 1e-10 * hi.max(1.0) {
                continue;
            }
            for a in [0.5 * (lo + hi), rng.random_range(lo..hi)] {
                if cuts.iter().any(|k| (a - k).abs() <= 1e-10 * k.abs().max(1.0)) {
                    continue;
                }
                let Some((a1_pos, a2_pos)) = table_prediction(q.a1_case, q.a2_case, oracle.k, (oracle.m != 0.0).then(|| oracle.h / oracle.m), a) else {
                    continue;
                };
                let pa = p.with_half_saturation(a);
                let [a1, a2, _] = common::char_coeffs(&common::jacobian(&pa, common::coexistence(&pa)));
                samples += 1;
                ensure(a1_pos == (a1 > 0.0) && a2_pos == (a2 > 0.0), || {
                    format!("{} predicts a1>0: {a1_pos}, a2>0: {a2_pos} at A = {a}, direct a1 = {a1:e}, a2 = {a2:e}; {p:?}", q.label)
                })?;
                let inside = q.candidate_intervals.iter().any(|iv| iv.contains(a));
                ensure(inside == (a1 > 0.0 && a2 > 0.0), || format!("candidate interval membership wrong at A = {a}; {p:?}"))?;
            }
        }
    }

    let mut worst_fd = 0.0_f64;
    let h = 1e-6;
    for _ in 0..100 {
        let p = common::random_feasible(&mut rng);
        let u = [rng.random_range(0.0..2.0), rng.random_range(0.0..2.0), rng.random_range(0.0..2.0)];
        let j = jacobian(&p, StateVector::from_array(u)).map_err(|e| e.to_string())?;
        for col in 0..3 {
            let (mut up, mut dn) = (u, u);
            up[col] += h;
            dn[col] -= h;
            let (fu, fd) = (common::rhs(&p, up), common::rhs(&p, dn));
            for row in 0..3 {
                worst_fd = worst_fd.max((j.get(row, col) - (fu[row] - fd[row]) / (2.0 * h)).abs());
            }
        }
    }
    ensure(worst_fd < 1e-6, || format!("Jacobian differs from finite differences by {worst_fd:e}"))?;

    let mut worst_cert = 0.0_f64;
    for (name, want) in [("example1.json", 0.4331191029), ("example2.json", 0.6376318460), ("example3.json", 0.4964791610)] {
        let cfg = config(name);
        let p = cfg.resolve(None).unwrap().params;
        let crit = bifurcation::find_hopf(&p, cfg.hopf.lo.unwrap(), cfg.hopf.hi.unwrap()).map_err(|e| e.to_string())?;
        near(name, crit.value, want, 1e-4)?;
        let pa = p.with_half_saturation(crit.value);
        let [a1, a2, a3] = common::char_coeffs(&common::jacobian(&pa, common::coexistence(&pa)));
        ensure(a1 > 0.0 && a2 > 0.0, || format!("{name}: a1 = {a1}, a2 = {a2}"))?;
        // (λ + a1)(λ² + a2) = λ³ + a1 λ² + a2 λ + a1 a2
        worst_cert = worst_cert.max((a1 * a2 - a3).abs());
    }
    ensure(worst_cert < 1e-8, || format!("Hopf factorization residual {worst_cert:e}"))?;

    let cases = cases_seen.into_iter().collect::<Vec<_>>().join(" ");
    Ok(format!(
        "{cubic_checked} cubics, {model_checked} model draws, {samples} sign samples over cases {cases}, FD error {worst_fd:.1e}, Hopf residual {worst_cert:.1e}"
    ))
}

type Criterion = (&'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        ("coexistence equilibrium of the baseline set", coexistence_state),
        ("transcritical threshold and prey-only stability", transcritical_threshold),
        ("derived-quantity tables of the three examples", knot_tables),
        ("Hopf critical values by bisection", hopf_values),
        ("long-run verdicts either side of the Hopf value", dynamical_verdicts),
        ("property suite", property_suite),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS  {}. {name}: {detail} [{secs:.2} s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {}. {name}: {why} [{secs:.2} s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
