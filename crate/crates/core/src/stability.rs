//! Local stability of the three equilibria.
//!
//! At the coexistence point the characteristic polynomial is
//! `λ³ + a1 λ² + a2 λ + a3` with closed-form coefficients. Both `a1` and the
//! numerator of `a2` are affine in the half-saturation `A`:
//!
//! ```text
//! sign(a1) = sign(A - K)
//! sign(a2) = sign(A M - H)
//! ```
//!
//! so the A-axis is partitioned by the knots
//! `K, 0, V/(BQ+ds), H/M, (BQ-2ds)/ds, 1, V/ds`. The classifier reports how
//! the knots are arranged, which sign tables apply, and the open A-interval
//! on which `a1 > 0` and `a2 > 0` hold together. The third Routh-Hurwitz
//! condition `a1 a2 - a3 > 0` is only ever checked pointwise.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::{self, spectral_abscissa};
use crate::equilibria::{self, derived, EquilibriumKind};
use crate::error::{Error, Result};
use crate::model::{jacobian, ScaledParameters, StateVector};
use crate::numeric::{magnitude, Sign, ZERO_TOL};

/// Coefficients of `λ³ + a1 λ² + a2 λ + a3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharPolyCoeffs {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl CharPolyCoeffs {
    pub fn new(a1: f64, a2: f64, a3: f64) -> Self {
        CharPolyCoeffs { a1, a2, a3 }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.a1, self.a2, self.a3]
    }

    /// `a1 a2 - a3`.
    pub fn hurwitz_margin(&self) -> f64 {
        self.a1 * self.a2 - self.a3
    }

    pub fn roots(&self) -> [Complex64; 3] {
        eigen::cubic_roots(self.to_array())
    }
}

/// Routh-Hurwitz verdict for a monic cubic, with the signed margins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RouthHurwitz {
    pub a1_positive: bool,
    pub a3_positive: bool,
    pub hurwitz_positive: bool,
    pub a1: f64,
    pub a3: f64,
    pub hurwitz_margin: f64,
}

impl RouthHurwitz {
    pub fn stable(&self) -> bool {
        self.a1_positive && self.a3_positive && self.hurwitz_positive
    }
}

pub fn routh_hurwitz(c: &CharPolyCoeffs) -> RouthHurwitz {
    let margin = c.hurwitz_margin();
    RouthHurwitz {
        a1_positive: c.a1 > 0.0,
        a3_positive: c.a3 > 0.0,
        hurwitz_positive: margin > 0.0,
        a1: c.a1,
        a3: c.a3,
        hurwitz_margin: margin,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `BQ >= 3ds`
    Case1,
    /// `BQ < 3ds`
    Case2,
}

/// Sign table for `a1`: `K <= 0` gives A/B, `K > 0` gives C/D; A/C when
/// `V/ds < 1`, B/D otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum A1Case {
    A,
    B,
    C,
    D,
}

/// Sign table for `a2`, indexed by the signs of M and H and the regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum A2Case {
    #[serde(rename = "1+")]
    OnePlus,
    #[serde(rename = "2+")]
    TwoPlus,
    #[serde(rename = "3+")]
    ThreePlus,
    #[serde(rename = "4+")]
    FourPlus,
    #[serde(rename = "1-")]
    OneMinus,
    #[serde(rename = "2-")]
    TwoMinus,
    #[serde(rename = "3-")]
    ThreeMinus,
    #[serde(rename = "4-")]
    FourMinus,
    #[serde(rename = "5-")]
    FiveMinus,
    #[serde(rename = "6-")]
    SixMinus,
    #[serde(rename = "7-")]
    SevenMinus,
    Degenerate,
}

impl A2Case {
    fn from_signs(regime: Regime, m: Sign, h: Sign) -> A2Case {
        use A2Case::*;
        use Sign::*;
        match (regime, m, h) {
            (_, Zero, Zero) => Degenerate,
            (Regime::Case1, Positive, Positive) => OnePlus,
            (Regime::Case1, Positive, Zero) => TwoPlus,
            (Regime::Case1, Negative, Negative) => ThreePlus,
            (Regime::Case1, Positive | Zero, Negative) => FourPlus,
            (Regime::Case2, Positive, Positive) => OneMinus,
            (Regime::Case2, Positive, Zero) => TwoMinus,
            (Regime::Case2, Negative, Negative) => ThreeMinus,
            (Regime::Case2, Positive | Zero, Negative) => FourMinus,
            // H < M holds strictly in Case1, so these only arise in Case2
            (_, Negative, Zero) => FiveMinus,
            (_, Negative, Positive) => SixMinus,
            (_, Zero, Positive) => SevenMinus,
        }
    }

    pub fn as_str(self) -> &'static str {
        use A2Case::*;
        match self {
            OnePlus => "1+",
            TwoPlus => "2+",
            ThreePlus => "3+",
            FourPlus => "4+",
            OneMinus => "1-",
            TwoMinus => "2-",
            ThreeMinus => "3-",
            FourMinus => "4-",
            FiveMinus => "5-",
            SixMinus => "6-",
            SevenMinus => "7-",
            Degenerate => "Degenerate",
        }
    }
}

impl fmt::Display for A2Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KnotLabel {
    K,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "V/(BQ+ds)")]
    VOverBqPlusDs,
    #[serde(rename = "H/M")]
    HOverM,
    #[serde(rename = "(BQ-2ds)/ds")]
    BqMinusTwoDsOverDs,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "V/ds")]
    VOverDs,
}

impl KnotLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            KnotLabel::K => "K",
            KnotLabel::Zero => "0",
            KnotLabel::VOverBqPlusDs => "V/(BQ+ds)",
            KnotLabel::HOverM => "H/M",
            KnotLabel::BqMinusTwoDsOverDs => "(BQ-2ds)/ds",
            KnotLabel::One => "1",
            KnotLabel::VOverDs => "V/ds",
        }
    }
}

impl fmt::Display for KnotLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Knot {
    pub label: KnotLabel,
    pub value: f64,
}

/// Open interval of A bounded by two knots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_knot: KnotLabel,
    pub hi_knot: KnotLabel,
}

impl AInterval {
    pub fn contains(&self, a: f64) -> bool {
        a > self.lo && a < self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// A-independent quantities driving the sign tables of `a1` and `a2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierQuantities {
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "H")]
    pub h: f64,
    /// `H/M`, absent when `M = 0`.
    pub h_over_m: Option<f64>,
    /// Knots sorted by value.
    pub knots: Vec<Knot>,
    pub regime: Regime,
    pub a1_case: A1Case,
    pub a2_case: A2Case,
    /// Combined label such as `Case1/B/1+`.
    pub label: String,
    /// Knot ordering with the candidate interval in brackets,
    /// e.g. `K<0<[H/M<V/(BQ+ds)<1<(BQ-2ds)/ds<V/ds]`.
    pub arrangement: String,
    /// Open A-intervals in `(0, V/ds)` where `a1 > 0` and `a2 > 0`.
    pub candidate_intervals: Vec<AInterval>,
}

impl ClassifierQuantities {
    pub fn knot(&self, label: KnotLabel) -> Option<f64> {
        self.knots.iter().find(|k| k.label == label).map(|k| k.value)
    }
}

/// Pieces of the closed forms shared by `char_poly` and the classifier.
struct Terms {
    r: f64,
    ds: f64,
    q: f64,
    bq: f64,
    v: f64,
    w: f64,
    /// `B (s² v + c d² w)`
    bs: f64,
    /// `B (w c + v)`
    bwv: f64,
    /// `s + d`
    sum_mort: f64,
}

impl Terms {
    fn new(p: &ScaledParameters) -> Terms {
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
        let dq = derived(p);
        Terms {
            r,
            ds: d * s,
            q: dq.q,
            bq: b * dq.q,
            v: dq.v,
            w: dq.w,
            bs: b * (s * s * v + c * d * d * w),
            bwv: b * (w * c + v),
            sum_mort: s + d,
        }
    }

    fn require_positive_v(&self) -> Result<()> {
        if !Sign::of(self.v, magnitude(&[self.bq, self.ds])).is_positive() {
            return Err(Error::Degenerate(format!("V = B Q - d s = {:e} must be > 0", self.v)));
        }
        Ok(())
    }
}

/// Closed-form characteristic coefficients at the coexistence equilibrium.
pub fn char_poly(p: &ScaledParameters) -> Result<CharPolyCoeffs> {
    let t = Terms::new(p);
    if Sign::of(t.q, 0.0).is_zero() {
        return Err(Error::Degenerate("Q = s v + c d w vanishes".into()));
    }
    t.require_positive_v()?;
    let a = p.half_saturation;
    let denom = t.v * t.bq;
    let rds = t.r * t.ds;
    let a1 = (t.v * t.bs + rds * (a * t.bq - t.w)) / denom;
    let a2 = rds
        * (t.bs * (a - 1.0) + (a + 1.0) * t.ds * t.sum_mort + t.bwv * (t.w - t.ds))
        / denom;
    let a3 = rds * t.w / t.bq;
    Ok(CharPolyCoeffs { a1, a2, a3 })
}

/// K, M, H, the knot arrangement and the candidate A-intervals.
/// `p.half_saturation` is ignored.
pub fn classifier_quantities(p: &ScaledParameters) -> Result<ClassifierQuantities> {
    let t = Terms::new(p);
    t.require_positive_v()?;
    let ds = t.ds;
    let rds = t.r * ds;

    let k = t.v / (t.bq + ds) * (rds - t.bs) / rds;
    let m = t.bs + ds * (t.sum_mort - t.bwv);
    let h = t.bs + t.bwv * (2.0 * ds - t.bq) - t.sum_mort * ds;

    let k_sign = Sign::of(rds - t.bs, magnitude(&[rds, t.bs]));
    let m_sign = Sign::of(m, magnitude(&[t.bs, ds * t.sum_mort, ds * t.bwv]));
    let h_sign = Sign::of(h, magnitude(&[t.bs, t.bwv * (2.0 * ds - t.bq), t.sum_mort * ds]));
    let regime = if Sign::of(t.bq - 3.0 * ds, magnitude(&[t.bq, 3.0 * ds])).is_negative() {
        Regime::Case2
    } else {
        Regime::Case1
    };
    let v_over_ds_below_one = Sign::of(t.bq - 2.0 * ds, magnitude(&[t.bq, ds])).is_negative();
    let a1_case = match (k_sign.is_positive(), v_over_ds_below_one) {
        (false, true) => A1Case::A,
        (false, false) => A1Case::B,
        (true, true) => A1Case::C,
        (true, false) => A1Case::D,
    };
    let a2_case = A2Case::from_signs(regime, m_sign, h_sign);
    let h_over_m = if m_sign.is_zero() { None } else { Some(h / m) };

    let mut knots = vec![
        Knot { label: KnotLabel::K, value: if k_sign.is_zero() { 0.0 } else { k } },
        Knot { label: KnotLabel::Zero, value: 0.0 },
        Knot { label: KnotLabel::VOverBqPlusDs, value: t.v / (t.bq + ds) },
        Knot { label: KnotLabel::BqMinusTwoDsOverDs, value: (t.bq - 2.0 * ds) / ds },
        Knot { label: KnotLabel::One, value: 1.0 },
        Knot { label: KnotLabel::VOverDs, value: t.v / ds },
    ];
    if let Some(ratio) = h_over_m {
        let value = if h_sign.is_zero() { 0.0 } else { ratio };
        knots.push(Knot { label: KnotLabel::HOverM, value });
    }
    knots.sort_by(|x, y| x.value.total_cmp(&y.value));

    let candidate_intervals =
        positive_region(k_sign, k, m_sign, h_sign, h_over_m, t.v / ds).into_iter().collect::<Vec<_>>();
    let arrangement = render_arrangement(&knots, candidate_intervals.first());
    let label = format!("{:?}/{:?}/{}", regime, a1_case, a2_case);

    Ok(ClassifierQuantities {
        k,
        m,
        h,
        h_over_m,
        knots,
        regime,
        a1_case,
        a2_case,
        label,
        arrangement,
        candidate_intervals,
    })
}

/// Intersection of `A > K`, `A M > H` and `0 < A < V/ds`.
fn positive_region(
    k_sign: Sign,
    k: f64,
    m_sign: Sign,
    h_sign: Sign,
    h_over_m: Option<f64>,
    v_over_ds: f64,
) -> Option<AInterval> {
    let (mut lo, mut lo_knot) = (0.0, KnotLabel::Zero);
    let (mut hi, mut hi_knot) = (v_over_ds, KnotLabel::VOverDs);
    if k_sign.is_positive() && k > lo {
        lo = k;
        lo_knot = KnotLabel::K;
    }
    match (m_sign, h_sign) {
        // a2 > 0 iff A > H/M
        (Sign::Positive, Sign::Positive) => {
            let ratio = h_over_m?;
            if ratio > lo {
                lo = ratio;
                lo_knot = KnotLabel::HOverM;
            }
        }
        (Sign::Positive, _) => {}
        // a2 > 0 iff A < H/M
        (Sign::Negative, Sign::Negative) => {
            let ratio = h_over_m?;
            if ratio < hi {
                hi = ratio;
                hi_knot = KnotLabel::HOverM;
            }
        }
        (Sign::Negative, _) => return None,
        // a2 numerator is the constant -H
        (Sign::Zero, Sign::Negative) => {}
        (Sign::Zero, _) => return None,
    }
    (lo < hi).then_some(AInterval { lo, hi, lo_knot, hi_knot })
}

fn render_arrangement(knots: &[Knot], interval: Option<&AInterval>) -> String {
    let mut out = String::new();
    let mut open = false;
    for (i, knot) in knots.iter().enumerate() {
        if i > 0 {
            let prev = knots[i - 1].value;
            let tied = (knot.value - prev).abs() <= ZERO_TOL * prev.abs().max(1.0);
            out.push(if tied { '=' } else { '<' });
        }
        if let Some(iv) = interval {
            if !open && knot.label == iv.lo_knot {
                out.push('[');
                open = true;
            }
        }
        out.push_str(knot.label.as_str());
        if let Some(iv) = interval {
            if open && knot.label == iv.hi_knot {
                out.push(']');
                open = false;
            }
        }
    }
    out
}

/// Candidate A-intervals for a stable coexistence equilibrium.
pub fn candidate_intervals(p: &ScaledParameters) -> Result<Vec<AInterval>> {
    Ok(classifier_quantities(p)?.candidate_intervals)
}

/// Quadratic factor `λ² + m1 λ + m0` of the characteristic polynomial at the
/// prey-only equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreyOnlyQuadratic {
    pub m1: f64,
    pub m0: f64,
}

/// Local stability of one equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub kind: EquilibriumKind,
    pub state: StateVector,
    /// Eigenvalues as `[re, im]`, sorted by descending real part.
    pub eigenvalues: Vec<Complex64>,
    pub max_re_lambda: f64,
    pub stable: bool,
    pub prey_only_quadratic: Option<PreyOnlyQuadratic>,
    pub coeffs: Option<CharPolyCoeffs>,
    pub routh_hurwitz: Option<RouthHurwitz>,
    pub classifier: Option<ClassifierQuantities>,
}

pub fn f0_stability(p: &ScaledParameters) -> StabilityReport {
    let eigenvalues = vec![
        Complex64::new(p.prey_growth, 0.0),
        Complex64::new(-p.mortality_y, 0.0),
        Complex64::new(-p.mortality_z, 0.0),
    ];
    StabilityReport {
        kind: EquilibriumKind::Origin,
        state: StateVector::ORIGIN,
        max_re_lambda: spectral_abscissa(&eigenvalues),
        eigenvalues,
        stable: false,
        prey_only_quadratic: None,
        coeffs: None,
        routh_hurwitz: None,
        classifier: None,
    }
}

/// Prey-only equilibrium: eigenvalue `-r` plus the roots of
/// `λ² + m1 λ + m0`, with `m0 = -W/(A+1)`.
pub fn f1_stability(p: &ScaledParameters) -> StabilityReport {
    let t = Terms::new(p);
    let a1 = p.half_saturation + 1.0;
    let m1 = (t.sum_mort * a1 - t.bwv) / a1;
    let m0 = -t.w / a1;
    let mut eigenvalues = vec![Complex64::new(-p.prey_growth, 0.0)];
    eigenvalues.extend(eigen::quadratic_roots(m1, m0));
    eigenvalues.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
    let w_sign = Sign::of(t.w, magnitude(&[t.bq, t.ds * a1]));
    // m0 > 0 iff W < 0; at W = 0 the equilibrium is on the transcritical boundary
    let stable = m1 > 0.0 && w_sign.is_negative();
    StabilityReport {
        kind: EquilibriumKind::PreyOnly,
        state: StateVector::new(1.0, 0.0, 0.0),
        max_re_lambda: spectral_abscissa(&eigenvalues),
        eigenvalues,
        stable,
        prey_only_quadratic: Some(PreyOnlyQuadratic { m1, m0 }),
        coeffs: None,
        routh_hurwitz: None,
        classifier: None,
    }
}

/// Full report at the coexistence equilibrium.
pub fn coexistence_stability(p: &ScaledParameters) -> Result<StabilityReport> {
    let eq = equilibria::coexistence(p)?;
    if !eq.feasible {
        return Err(Error::Infeasible(format!(
            "A = {} lies outside (0, V/ds]",
            p.half_saturation
        )));
    }
    let coeffs = char_poly(p)?;
    let rh = routh_hurwitz(&coeffs);
    let classifier = classifier_quantities(p)?;
    let eigenvalues = eigen::eigenvalues(&jacobian(p, eq.state)?).to_vec();
    let max_re_lambda = spectral_abscissa(&eigenvalues);
    if rh.stable() != (max_re_lambda < 0.0) {
        log::debug!(
            "Routh-Hurwitz ({}) and spectrum (max Re = {max_re_lambda:e}) disagree at A = {}",
            rh.stable(),
            p.half_saturation
        );
    }
    Ok(StabilityReport {
        kind: EquilibriumKind::Coexistence,
        state: eq.state,
        eigenvalues,
        max_re_lambda,
        stable: rh.stable(),
        prey_only_quadratic: None,
        coeffs: Some(coeffs),
        routh_hurwitz: Some(rh),
        classifier: Some(classifier),
    })
}
