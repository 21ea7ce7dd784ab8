//! Two-qubit contextual model.
//!
//! Each photon pair with polarizations (u, v) carries hidden variables
//! (λ₁, λ₂) drawn from the factorized density ρ_uv = ρ_u(λ₁)·ρ_v(λ₂), which
//! reproduces Malus' law on each side. The source mixes polarizations
//! according to a distribution F(u, v) and the correlation is
//!
//! ```text
//! E_ab = ∫∫ F(u, v) (u·n_a)(v·n_b) du dv.
//! ```
//!
//! Every distribution here is a finite sum of weighted hemisphere-indicator
//! products w·χ(u)·χ(v)/π², which makes the double integral separable and
//! closed-form: each term contributes w·s_u·s_v·(n_a·axis_u)(n_b·axis_v).
//! The distribution that reproduces the singlet depends on both settings,
//! which is the contextuality of the model. F is never renormalized; its mass
//! is reported separately.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{HemisphereSampler, UnitVector};
use crate::ks_single::{chi, density, dichotomic_outcome, outcome, Sign};
use crate::qm::{check_weights, CorrelationTensor};
use crate::quadrature::{
    bivector_component, integrate_pair_grid, line_integral_great_circle, map_blocks,
    monte_carlo_mean, Estimate, NumericMethod, SphereGrid,
};

/// ρ_uv(λ₁, λ₂) = ρ_u(λ₁)·ρ_v(λ₂).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDensity {
    pub u: UnitVector,
    pub v: UnitVector,
}

impl PairDensity {
    pub fn new(u: UnitVector, v: UnitVector) -> Self {
        Self { u, v }
    }

    pub fn evaluate(&self, lambda1: UnitVector, lambda2: UnitVector) -> f64 {
        density(self.u, lambda1) * density(self.v, lambda2)
    }
}

/// weight · χ(axis_u, sign_u; λ_u) · χ(axis_v, sign_v; λ_v) / π².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndicatorTerm {
    pub weight: f64,
    pub axis_u: UnitVector,
    pub sign_u: Sign,
    pub axis_v: UnitVector,
    pub sign_v: Sign,
}

impl IndicatorTerm {
    pub fn new(weight: f64, axis_u: UnitVector, sign_u: Sign, axis_v: UnitVector, sign_v: Sign) -> Self {
        Self {
            weight,
            axis_u,
            sign_u,
            axis_v,
            sign_v,
        }
    }

    pub fn pole_u(&self) -> UnitVector {
        self.sign_u.apply(self.axis_u)
    }

    pub fn pole_v(&self) -> UnitVector {
        self.sign_v.apply(self.axis_v)
    }

    pub fn evaluate(&self, u: UnitVector, v: UnitVector) -> f64 {
        let on = chi(self.axis_u, self.sign_u, u) * chi(self.axis_v, self.sign_v, v);
        self.weight * f64::from(on) / (PI * PI)
    }

    /// ∫∫ term dλ_u dλ_v = weight·(2π)²/π².
    pub fn mass(&self) -> f64 {
        4.0 * self.weight
    }

    /// ∫∫ term (u·n_a)(v·n_b): each hemisphere flux is π·(pole·n).
    pub fn correlation(&self, n_a: UnitVector, n_b: UnitVector) -> f64 {
        self.weight * self.pole_u().dot(&n_a) * self.pole_v().dot(&n_b)
    }
}

/// Polarization distribution F(u, v) as a sum of indicator-product terms.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct PolarizationDistribution {
    terms: Vec<IndicatorTerm>,
}

impl PolarizationDistribution {
    pub fn new(terms: Vec<IndicatorTerm>) -> Result<Self> {
        for t in &terms {
            if !(t.weight >= 0.0) || !t.weight.is_finite() {
                return Err(Error::NegativeWeight(t.weight));
            }
        }
        Ok(Self { terms })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn terms(&self) -> &[IndicatorTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, u: UnitVector, v: UnitVector) -> f64 {
        self.terms.iter().map(|t| t.evaluate(u, v)).fold(0.0, |s, x| s + x)
    }

    /// Total integral, 4·Σ weight.
    pub fn mass(&self) -> f64 {
        self.terms.iter().map(IndicatorTerm::mass).fold(0.0, |s, x| s + x)
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::new(
            self.terms
                .iter()
                .map(|t| IndicatorTerm { weight: t.weight * k, ..*t })
                .collect(),
        )
    }

    /// The same shape rescaled to unit mass.
    pub fn normalized(&self) -> Result<Self> {
        let m = self.mass();
        if m <= 0.0 {
            return Err(Error::ZeroMass);
        }
        self.scaled(1.0 / m)
    }
}

/// F_ab(u, v) = (χ_a⁺(u)χ_a⁻(v) + χ_b⁻(u)χ_b⁺(v)) / 2π².
pub fn singlet_distribution(n_a: UnitVector, n_b: UnitVector) -> PolarizationDistribution {
    PolarizationDistribution {
        terms: vec![
            IndicatorTerm::new(0.5, n_a, Sign::Plus, n_a, Sign::Minus),
            IndicatorTerm::new(0.5, n_b, Sign::Minus, n_b, Sign::Plus),
        ],
    }
}

/// F_a(u, v) = χ_a⁺(u)χ_a⁻(v) / π², the one-sided variant that yields the
/// same singlet correlation.
pub fn one_sided_singlet_distribution(n_a: UnitVector) -> PolarizationDistribution {
    PolarizationDistribution {
        terms: vec![IndicatorTerm::new(1.0, n_a, Sign::Plus, n_a, Sign::Minus)],
    }
}

const AXES: [UnitVector; 3] = [UnitVector::X, UnitVector::Y, UnitVector::Z];

/// One term (|t_ij|, e_i, +, e_j, sign t_ij) per nonzero entry, giving
/// E_ab = n_aᵀ T n_b. The distribution does not depend on the settings.
pub fn distribution_from_tensor(t: &CorrelationTensor) -> PolarizationDistribution {
    let mut terms = Vec::new();
    for (i, ei) in AXES.iter().enumerate() {
        for (j, ej) in AXES.iter().enumerate() {
            let tij = t.get(i, j);
            if tij != 0.0 {
                terms.push(IndicatorTerm::new(tij.abs(), *ei, Sign::Plus, *ej, Sign::of(tij)));
            }
        }
    }
    PolarizationDistribution { terms }
}

/// Concatenation of weighted component distributions.
pub fn mixed_state_distribution(components: &[(f64, PolarizationDistribution)]) -> Result<PolarizationDistribution> {
    check_weights(components.iter().map(|(w, _)| *w))?;
    let mut terms = Vec::new();
    for (w, f) in components {
        terms.extend(f.terms.iter().map(|t| IndicatorTerm {
            weight: t.weight * w,
            ..*t
        }));
    }
    Ok(PolarizationDistribution { terms })
}

/// A source description that yields F for each setting pair.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceModel {
    /// F_ab, depending on both settings.
    Singlet,
    /// F_a, depending on Alice's setting only.
    OneSidedSinglet,
    /// Setting-independent F reproducing a correlation tensor.
    Tensor(CorrelationTensor),
    /// A fixed, setting-independent distribution.
    Fixed(PolarizationDistribution),
}

impl SourceModel {
    pub fn distribution(&self, n_a: UnitVector, n_b: UnitVector) -> PolarizationDistribution {
        match self {
            SourceModel::Singlet => singlet_distribution(n_a, n_b),
            SourceModel::OneSidedSinglet => one_sided_singlet_distribution(n_a),
            SourceModel::Tensor(t) => distribution_from_tensor(t),
            SourceModel::Fixed(f) => f.clone(),
        }
    }

    pub fn is_contextual(&self) -> bool {
        matches!(self, SourceModel::Singlet | SourceModel::OneSidedSinglet)
    }

    /// Closed-form E(a, b) of this source.
    pub fn correlation(&self, n_a: UnitVector, n_b: UnitVector) -> f64 {
        correlation_closed(&self.distribution(n_a, n_b), n_a, n_b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationMethod {
    Closed,
    Grid,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelCorrelation {
    pub value: f64,
    pub method: CorrelationMethod,
    pub std_error: f64,
}

/// Σ weight·s_u·s_v·(n_a·axis_u)(n_b·axis_v).
pub fn correlation_closed(f: &PolarizationDistribution, n_a: UnitVector, n_b: UnitVector) -> f64 {
    f.terms.iter().map(|t| t.correlation(n_a, n_b)).fold(0.0, |s, x| s + x)
}

/// Flux of `field` through the hemisphere around `pole`, via Stokes:
/// ½ ∮ (r × dr/ds)·field ds along its equator.
fn hemisphere_flux_contour(pole: UnitVector, field: UnitVector, n_steps: usize) -> Result<f64> {
    Ok(0.5 * line_integral_great_circle(pole, |r, t| bivector_component(r, t, field), n_steps)?)
}

/// E_ab with every hemisphere flux taken as a contour integral around the
/// hemisphere's equator; a term on the southern side runs clockwise about
/// its axis.
pub fn correlation_contour(f: &PolarizationDistribution, n_a: UnitVector, n_b: UnitVector, n_steps: usize) -> Result<f64> {
    let mut total = 0.0;
    for t in &f.terms {
        let fu = hemisphere_flux_contour(t.pole_u(), n_a, n_steps)?;
        let fv = hemisphere_flux_contour(t.pole_v(), n_b, n_steps)?;
        total += t.weight * fu * fv / (PI * PI);
    }
    Ok(total)
}

/// ∫ χ(pole) (λ·n) dλ on a hemisphere grid.
fn hemisphere_flux_grid(pole: UnitVector, field: UnitVector, n_theta: usize) -> Result<f64> {
    let grid = SphereGrid::aligned(pole, n_theta, 2 * n_theta)?;
    Ok(grid.integrate(&|l: UnitVector| if l.dot(&pole) >= 0.0 { l.dot(&field) } else { 0.0 }))
}

/// E_ab by quadrature (term-wise product of two surface integrals) or by
/// Monte Carlo (terms drawn ∝ weight, u and v uniform on the term's
/// hemispheres, estimate scaled by the mass).
pub fn correlation_numeric(
    f: &PolarizationDistribution,
    n_a: UnitVector,
    n_b: UnitVector,
    method: NumericMethod,
) -> Result<ModelCorrelation> {
    match method {
        NumericMethod::Grid { n_theta } => {
            let mut total = 0.0;
            for t in &f.terms {
                let fu = hemisphere_flux_grid(t.pole_u(), n_a, n_theta)?;
                let fv = hemisphere_flux_grid(t.pole_v(), n_b, n_theta)?;
                total += t.weight * fu * fv / (PI * PI);
            }
            Ok(ModelCorrelation {
                value: total,
                method: CorrelationMethod::Grid,
                std_error: 0.0,
            })
        }
        NumericMethod::MonteCarlo(cfg) => {
            if f.is_empty() {
                return Ok(ModelCorrelation {
                    value: 0.0,
                    method: CorrelationMethod::Mc,
                    std_error: 0.0,
                });
            }
            let picker = TermPicker::new(f)?;
            let mass = f.mass();
            let est = monte_carlo_mean(cfg, |rng| {
                let k = picker.pick(rng.uniform());
                let (su, sv) = &picker.samplers[k];
                su.uniform(rng).dot(&n_a) * sv.uniform(rng).dot(&n_b)
            })?
            .scaled(mass);
            Ok(ModelCorrelation {
                value: est.value,
                method: CorrelationMethod::Mc,
                std_error: est.std_error,
            })
        }
    }
}

/// Term selection ∝ weight, with per-term hemisphere samplers.
pub(crate) struct TermPicker {
    cumulative: Vec<f64>,
    pub(crate) samplers: Vec<(HemisphereSampler, HemisphereSampler)>,
}

impl TermPicker {
    pub(crate) fn new(f: &PolarizationDistribution) -> Result<Self> {
        let total: f64 = f.terms.iter().map(|t| t.weight).sum();
        if !(total > 0.0) {
            return Err(Error::ZeroMass);
        }
        let mut acc = 0.0;
        let cumulative = f
            .terms
            .iter()
            .map(|t| {
                acc += t.weight / total;
                acc
            })
            .collect();
        let samplers = f
            .terms
            .iter()
            .map(|t| (HemisphereSampler::new(t.pole_u()), HemisphereSampler::new(t.pole_v())))
            .collect();
        Ok(Self { cumulative, samplers })
    }

    #[inline]
    pub(crate) fn pick(&self, xi: f64) -> usize {
        self.cumulative
            .iter()
            .position(|&c| xi < c)
            .unwrap_or(self.cumulative.len() - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    A,
    B,
}

/// ∫∫ F(u, v) (u·n) du dv for side A, or (v·n) for side B. Per term this is
/// 2·weight·(pole·n), the hemisphere flux times the other hemisphere's area
/// over π².
pub fn ensemble_marginal(f: &PolarizationDistribution, n: UnitVector, side: Side) -> f64 {
    f.terms
        .iter()
        .map(|t| {
            let pole = match side {
                Side::A => t.pole_u(),
                Side::B => t.pole_v(),
            };
            2.0 * t.weight * pole.dot(&n)
        })
        .fold(0.0, |s, x| s + x)
}

/// (Ā, B̄) for the subensemble ρ_uv: ∫ρ_uv A(λ₁) and ∫ρ_uv B(λ₂).
///
/// Grid: product of surface integrals with grids aligned to u and v.
/// Monte Carlo: λ₁, λ₂ drawn from the cosine-weighted hemispheres, tie-broken
/// outcomes averaged; the two estimates share one sample stream.
pub fn malus_averages(
    u: UnitVector,
    v: UnitVector,
    n_a: UnitVector,
    n_b: UnitVector,
    method: NumericMethod,
) -> Result<(Estimate, Estimate)> {
    match method {
        NumericMethod::Grid { n_theta } => {
            let gu = SphereGrid::aligned(u, n_theta, 2 * n_theta)?;
            let gv = SphereGrid::aligned(v, n_theta, 2 * n_theta)?;
            let norm_u = gu.integrate(&|l: UnitVector| density(u, l));
            let norm_v = gv.integrate(&|l: UnitVector| density(v, l));
            let a = gu.integrate(&|l: UnitVector| density(u, l) * f64::from(outcome(n_a, l)));
            let b = gv.integrate(&|l: UnitVector| density(v, l) * f64::from(outcome(n_b, l)));
            let n = gu.len() * gv.len();
            Ok((Estimate::exact(a * norm_v, n), Estimate::exact(b * norm_u, n)))
        }
        NumericMethod::MonteCarlo(cfg) => {
            let su = HemisphereSampler::new(u);
            let sv = HemisphereSampler::new(v);
            let a = monte_carlo_mean(cfg, |rng| {
                let l1 = su.cosine(rng);
                let _l2 = sv.cosine(rng);
                f64::from(dichotomic_outcome(n_a, l1))
            })?;
            let b = monte_carlo_mean(cfg, |rng| {
                let _l1 = su.cosine(rng);
                let l2 = sv.cosine(rng);
                f64::from(dichotomic_outcome(n_b, l2))
            })?;
            Ok((a, b))
        }
    }
}

/// AB̄(u, v) = ∫∫ ρ_uv A(λ₁) B(λ₂).
///
/// Grid: the full four-dimensional tensor rule (no factorization assumed).
/// Monte Carlo: joint draws of (λ₁, λ₂).
pub fn subensemble_correlation(
    u: UnitVector,
    v: UnitVector,
    n_a: UnitVector,
    n_b: UnitVector,
    method: NumericMethod,
) -> Result<Estimate> {
    let rho = PairDensity::new(u, v);
    match method {
        NumericMethod::Grid { n_theta } => {
            let gu = SphereGrid::aligned(u, n_theta, 2 * n_theta)?;
            let gv = SphereGrid::aligned(v, n_theta, 2 * n_theta)?;
            let value = integrate_pair_grid(
                |l1, l2| rho.evaluate(l1, l2) * f64::from(outcome(n_a, l1) * outcome(n_b, l2)),
                &gu,
                &gv,
            );
            Ok(Estimate::exact(value, gu.len() * gv.len()))
        }
        NumericMethod::MonteCarlo(cfg) => {
            let su = HemisphereSampler::new(u);
            let sv = HemisphereSampler::new(v);
            monte_carlo_mean(cfg, |rng| {
                let l1 = su.cosine(rng);
                let l2 = sv.cosine(rng);
                f64::from(dichotomic_outcome(n_a, l1) * dichotomic_outcome(n_b, l2))
            })
        }
    }
}

/// ∫∫ F dλ_u dλ_v by brute-force four-dimensional quadrature on standard
/// (unaligned) grids.
pub fn mass_brute_force(f: &PolarizationDistribution, n_theta: usize) -> Result<f64> {
    let g = SphereGrid::new(n_theta, 2 * n_theta)?;
    Ok(integrate_pair_grid(|u, v| f.evaluate(u, v), &g, &g))
}

/// ∫∫ F (u·n_a)(v·n_b) by brute-force four-dimensional quadrature.
pub fn correlation_brute_force(f: &PolarizationDistribution, n_a: UnitVector, n_b: UnitVector, n_theta: usize) -> Result<f64> {
    let g = SphereGrid::new(n_theta, 2 * n_theta)?;
    Ok(integrate_pair_grid(|u, v| f.evaluate(u, v) * u.dot(&n_a) * v.dot(&n_b), &g, &g))
}

/// ∫∫ F (u·n) for one side, by quadrature of each term's two factors.
pub fn ensemble_marginal_grid(f: &PolarizationDistribution, n: UnitVector, side: Side, n_theta: usize) -> Result<f64> {
    let mut total = 0.0;
    for t in &f.terms {
        let (flux_pole, area_pole) = match side {
            Side::A => (t.pole_u(), t.pole_v()),
            Side::B => (t.pole_v(), t.pole_u()),
        };
        let flux = hemisphere_flux_grid(flux_pole, n, n_theta)?;
        let area = SphereGrid::aligned(area_pole, n_theta, 2 * n_theta)?
            .integrate(&|l: UnitVector| if l.dot(&area_pole) >= 0.0 { 1.0 } else { 0.0 });
        total += t.weight * flux * area / (PI * PI);
    }
    Ok(total)
}

/// Correlations for many setting pairs, computed in parallel, in input order.
pub fn correlations_for(
    source: &SourceModel,
    settings: &[(UnitVector, UnitVector)],
    workers: usize,
) -> Vec<f64> {
    map_blocks(settings.len(), workers, |k| {
        let (a, b) = settings[k];
        source.correlation(a, b)
    })
}
