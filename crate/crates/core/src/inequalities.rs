//! Leggett-type and CHSH inequalities evaluated on arbitrary correlation
//! functions E(a, b).
//!
//! The subensemble chain −1 + |Ā + B̄| ≤ AB̄ ≤ 1 − |Ā − B̄| holds for every
//! polarization pair of the model; averaging it against a setting-independent
//! F gives the Leggett-type bound. The two-plane form used here is
//!
//! ```text
//! |E₁₁(φ) + E₂₃(0)| + |E₂₂(φ) + E₂₃(0)| ≤ 4 − (4/π)|sin(φ/2)|
//! ```
//!
//! where E₁₁ and E₂₂ use analyzer pairs at relative angle φ in two orthogonal
//! planes of the Bloch sphere and E₂₃ uses aligned analyzers. The bound is
//! behind [`LeggettBound`] so other published forms can be plugged in.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::UnitVector;
use crate::ks_two::{distribution_from_tensor, PolarizationDistribution};
use crate::qm::CorrelationTensor;

/// (−1 + |a + b|, a·b, 1 − |a − b|) for a, b ∈ {−1, +1}; all three coincide.
pub fn dichotomic_identity(a: i8, b: i8) -> Result<(f64, f64, f64)> {
    for x in [a, b] {
        if x != 1 && x != -1 {
            return Err(Error::NonDichotomic(i64::from(x)));
        }
    }
    let (a, b) = (f64::from(a), f64::from(b));
    Ok((-1.0 + (a + b).abs(), a * b, 1.0 - (a - b).abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubensembleBounds {
    pub lower: f64,
    pub mid: f64,
    pub upper: f64,
}

impl SubensembleBounds {
    pub fn holds(&self) -> bool {
        self.lower <= self.mid && self.mid <= self.upper
    }
}

/// Subensemble chain with Ā = u·n_a, B̄ = v·n_b and AB̄ = Ā·B̄.
pub fn subensemble_bounds(u: UnitVector, v: UnitVector, n_a: UnitVector, n_b: UnitVector) -> SubensembleBounds {
    let a = u.dot(&n_a);
    let b = v.dot(&n_b);
    SubensembleBounds {
        lower: -1.0 + (a + b).abs(),
        mid: a * b,
        upper: 1.0 - (a - b).abs(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SettingPair {
    pub label: String,
    pub a: UnitVector,
    pub b: UnitVector,
}

impl SettingPair {
    pub fn new(label: impl Into<String>, a: UnitVector, b: UnitVector) -> Self {
        Self {
            label: label.into(),
            a,
            b,
        }
    }
}

/// Fixed analyzer settings for one run, optionally tagged with the scan
/// angle φ they were built for.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SettingsPlan {
    pub pairs: Vec<SettingPair>,
    pub phi: Option<f64>,
}

impl SettingsPlan {
    pub fn single(a: UnitVector, b: UnitVector) -> Self {
        Self {
            pairs: vec![SettingPair::new("ab", a, b)],
            phi: None,
        }
    }

    /// E₁₁(φ) in the x–y plane, E₂₂(φ) in the y–z plane, E₂₃(0) aligned on
    /// Alice's second analyzer.
    pub fn leggett(phi: f64) -> Self {
        let (s, c) = (phi / 2.0).sin_cos();
        let a1 = UnitVector::from_unit_components(c, -s, 0.0);
        let b1 = UnitVector::from_unit_components(c, s, 0.0);
        let a2 = UnitVector::from_unit_components(0.0, -s, c);
        let b2 = UnitVector::from_unit_components(0.0, s, c);
        Self {
            pairs: vec![
                SettingPair::new("E11", a1, b1),
                SettingPair::new("E22", a2, b2),
                SettingPair::new("E23", a2, a2),
            ],
            phi: Some(phi),
        }
    }

    pub fn chsh(a: UnitVector, a_prime: UnitVector, b: UnitVector, b_prime: UnitVector) -> Self {
        Self {
            pairs: vec![
                SettingPair::new("ab", a, b),
                SettingPair::new("ab'", a, b_prime),
                SettingPair::new("a'b", a_prime, b),
                SettingPair::new("a'b'", a_prime, b_prime),
            ],
            phi: None,
        }
    }

    /// Analyzers at 0°, 90° (Alice) and 45°, 135° (Bob) in the x–z plane.
    pub fn standard_chsh() -> Self {
        let deg = |d: f64| UnitVector::in_xz_plane(d.to_radians());
        Self::chsh(deg(0.0), deg(90.0), deg(45.0), deg(135.0))
    }

    pub fn get(&self, label: &str) -> Option<&SettingPair> {
        self.pairs.iter().find(|p| p.label == label)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabeledCorrelation {
    pub label: String,
    pub a: UnitVector,
    pub b: UnitVector,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub phi: Option<f64>,
    pub lhs: f64,
    pub bound: f64,
    pub violated: bool,
    pub margin: f64,
    pub correlations: Vec<LabeledCorrelation>,
}

impl InequalityReport {
    fn new(phi: Option<f64>, lhs: f64, bound: f64, correlations: Vec<LabeledCorrelation>) -> Self {
        let margin = lhs - bound;
        Self {
            phi,
            lhs,
            bound,
            violated: margin > 0.0,
            margin,
            correlations,
        }
    }
}

/// Right-hand side of a Leggett-type inequality as a function of φ.
pub trait LeggettBound: Sync {
    fn value(&self, phi: f64) -> Result<f64>;
    fn describe(&self) -> String;
}

/// 4 − (4/π)|sin(φ/2)| for φ ∈ [0, π].
#[derive(Debug, Clone, Copy, Default)]
pub struct TwoPlaneBound;

impl LeggettBound for TwoPlaneBound {
    fn value(&self, phi: f64) -> Result<f64> {
        leggett_bound(phi)
    }

    fn describe(&self) -> String {
        "two-plane Leggett-type bound: |E11(phi)+E23(0)| + |E22(phi)+E23(0)| <= 4 - (4/pi)|sin(phi/2)|".into()
    }
}

pub fn leggett_bound(phi: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&phi) {
        return Err(Error::AngleOutOfRange {
            name: "phi",
            value: phi,
            min: 0.0,
            max: PI,
        });
    }
    Ok(4.0 - 4.0 / PI * (phi / 2.0).sin().abs())
}

fn evaluate_plan<E>(e: &E, plan: &SettingsPlan) -> Vec<LabeledCorrelation>
where
    E: Fn(UnitVector, UnitVector) -> f64,
{
    plan.pairs
        .iter()
        .map(|p| LabeledCorrelation {
            label: p.label.clone(),
            a: p.a,
            b: p.b,
            value: e(p.a, p.b),
        })
        .collect()
}

fn lookup(correlations: &[LabeledCorrelation], label: &str) -> f64 {
    correlations
        .iter()
        .find(|c| c.label == label)
        .map(|c| c.value)
        .unwrap_or(f64::NAN)
}

/// |E₁₁(φ) + E₂₃(0)| + |E₂₂(φ) + E₂₃(0)| on [`SettingsPlan::leggett`].
pub fn leggett_lhs<E>(e: &E, phi: f64) -> f64
where
    E: Fn(UnitVector, UnitVector) -> f64,
{
    let c = evaluate_plan(e, &SettingsPlan::leggett(phi));
    leggett_lhs_from(&c)
}

fn leggett_lhs_from(c: &[LabeledCorrelation]) -> f64 {
    let e23 = lookup(c, "E23");
    (lookup(c, "E11") + e23).abs() + (lookup(c, "E22") + e23).abs()
}

pub fn leggett_report<E, B>(e: &E, phi: f64, bound: &B) -> Result<InequalityReport>
where
    E: Fn(UnitVector, UnitVector) -> f64,
    B: LeggettBound + ?Sized,
{
    let rhs = bound.value(phi)?;
    let c = evaluate_plan(e, &SettingsPlan::leggett(phi));
    Ok(InequalityReport::new(Some(phi), leggett_lhs_from(&c), rhs, c))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSummary {
    pub n_points: usize,
    pub n_violations: usize,
    pub max_margin: f64,
    pub phi_at_max_margin: f64,
    /// First and last scanned φ with a violation.
    pub violation_interval: Option<[f64; 2]>,
    /// Zero of the margin just above the last violating grid point, located
    /// by bisection; `None` when the scan ends while still violating.
    pub upper_edge: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeggettScan {
    pub bound: String,
    pub reports: Vec<InequalityReport>,
    pub summary: ScanSummary,
}

/// One report per φ, in input order, plus the violation summary.
pub fn leggett_scan<E, B>(e: &E, phis: &[f64], bound: &B) -> Result<LeggettScan>
where
    E: Fn(UnitVector, UnitVector) -> f64 + Sync,
    B: LeggettBound + ?Sized,
{
    if phis.is_empty() {
        return Err(Error::EmptyScan);
    }
    let reports = phis
        .par_iter()
        .map(|&phi| leggett_report(e, phi, bound))
        .collect::<Result<Vec<_>>>()?;

    let (best, _) = reports
        .iter()
        .enumerate()
        .fold((0usize, f64::NEG_INFINITY), |(bi, bm), (i, r)| {
            if r.margin > bm {
                (i, r.margin)
            } else {
                (bi, bm)
            }
        });
    let violating: Vec<usize> = (0..reports.len()).filter(|&i| reports[i].violated).collect();
    let violation_interval = match (violating.first(), violating.last()) {
        (Some(&lo), Some(&hi)) => Some([phis[lo], phis[hi]]),
        _ => None,
    };
    let upper_edge = match violating.last() {
        Some(&hi) if hi + 1 < phis.len() && !reports[hi + 1].violated => {
            let margin = |phi: f64| -> Result<f64> { Ok(leggett_lhs(e, phi) - bound.value(phi)?) };
            Some(bisect(margin, phis[hi], phis[hi + 1])?)
        }
        _ => None,
    };
    Ok(LeggettScan {
        bound: bound.describe(),
        summary: ScanSummary {
            n_points: reports.len(),
            n_violations: violating.len(),
            max_margin: reports[best].margin,
            phi_at_max_margin: phis[best],
            violation_interval,
            upper_edge,
        },
        reports,
    })
}

/// Sign change of `f` in [lo, hi] with f(lo) > 0 ≥ f(hi).
fn bisect<F: Fn(f64) -> Result<f64>>(f: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// |E(a,b) − E(a,b')| + |E(a',b) + E(a',b')|.
pub fn chsh<E>(e: &E, a: UnitVector, a_prime: UnitVector, b: UnitVector, b_prime: UnitVector) -> f64
where
    E: Fn(UnitVector, UnitVector) -> f64,
{
    (e(a, b) - e(a, b_prime)).abs() + (e(a_prime, b) + e(a_prime, b_prime)).abs()
}

/// CHSH value from a plan built by [`SettingsPlan::chsh`], against the local
/// bound 2.
pub fn chsh_report<E>(e: &E, plan: &SettingsPlan) -> InequalityReport
where
    E: Fn(UnitVector, UnitVector) -> f64,
{
    let c = evaluate_plan(e, plan);
    InequalityReport::new(None, chsh_from(&c), 2.0, c)
}

/// CHSH combination of already estimated correlations keyed by the labels of
/// [`SettingsPlan::chsh`].
pub fn chsh_from(c: &[LabeledCorrelation]) -> f64 {
    (lookup(c, "ab") - lookup(c, "ab'")).abs() + (lookup(c, "a'b") + lookup(c, "a'b'")).abs()
}

/// Setting-independent control: the singlet tensor's fixed-axis indicator
/// terms, rescaled to unit mass so that E is an ordinary expectation of ±1
/// products over one probability distribution. Gives E = −(n_a·n_b)/12.
pub fn noncontextual_control() -> PolarizationDistribution {
    distribution_from_tensor(&CorrelationTensor::diagonal([-1.0; 3]).expect("valid tensor"))
        .normalized()
        .expect("positive mass")
}
