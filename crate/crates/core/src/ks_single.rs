//! Single-qubit Kochen–Specker model.
//!
//! A qubit with Bloch vector `n_a` is completed by the hidden variable λ ∈ S²
//! distributed with density ρ_a(λ) = (λ·n_a)/π on the northern hemisphere of
//! `n_a`. A projective measurement along ±n_b answers "yes" exactly when λ
//! lies in the corresponding hemisphere, χ_b^±(λ) = Θ(λ·(±n_b)). The overlap
//! ∫ρ_a χ_b^± then reproduces the Born probability (1 ± n_a·n_b)/2.
//!
//! The Heaviside step follows Θ(0) = 1, so on the equator of an axis both χ⁺
//! and χ⁻ are 1 and the analytic outcome χ⁺ − χ⁻ is 0. Event simulation uses
//! [`TieBreak::Dichotomic`] instead, which keeps outcomes at ±1; the equator
//! has zero measure so no integral changes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{HemisphereSampler, UnitVector};
use crate::quadrature::{
    bivector_component, integrate_sphere_grid_aligned, integrate_sphere_mc, line_integral_arc,
    line_integral_great_circle, Estimate, NumericMethod,
};

/// Which eigen-direction of a measurement axis, n^± = ±n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn of(x: f64) -> Sign {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    #[inline]
    pub fn apply(self, v: UnitVector) -> UnitVector {
        match self {
            Sign::Plus => v,
            Sign::Minus => -v,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Θ(x) with Θ(0) = 1.
#[inline]
pub fn heaviside(x: f64) -> u8 {
    u8::from(x >= 0.0)
}

/// How χ⁻ is evaluated on the equator of its axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// χ^± = Θ(±λ·n); both are 1 on the equator.
    #[default]
    Heaviside,
    /// χ⁺ = Θ(λ·n), χ⁻ = 1 − χ⁺; exactly one is 1 everywhere.
    Dichotomic,
}

/// ρ_a(λ) = (λ·n_a)/π · Θ(λ·n_a).
#[inline]
pub fn density(axis: UnitVector, lambda: UnitVector) -> f64 {
    let c = lambda.dot(&axis);
    if c >= 0.0 {
        c / PI
    } else {
        0.0
    }
}

/// χ(λ) = Θ(λ·(sign·axis)).
#[inline]
pub fn chi(axis: UnitVector, sign: Sign, lambda: UnitVector) -> u8 {
    heaviside(sign.value() * lambda.dot(&axis))
}

#[inline]
pub fn chi_with(axis: UnitVector, sign: Sign, lambda: UnitVector, tie: TieBreak) -> u8 {
    match (tie, sign) {
        (TieBreak::Heaviside, _) | (TieBreak::Dichotomic, Sign::Plus) => chi(axis, sign, lambda),
        (TieBreak::Dichotomic, Sign::Minus) => 1 - chi(axis, Sign::Plus, lambda),
    }
}

/// A(λ) = χ⁺(λ) − χ⁻(λ) ∈ {−1, 0, +1}; 0 only on the equator of `axis`.
#[inline]
pub fn outcome(axis: UnitVector, lambda: UnitVector) -> i8 {
    chi(axis, Sign::Plus, lambda) as i8 - chi(axis, Sign::Minus, lambda) as i8
}

/// Outcome with the simulation tie-break; always ±1.
#[inline]
pub fn dichotomic_outcome(axis: UnitVector, lambda: UnitVector) -> i8 {
    if lambda.dot(&axis) >= 0.0 {
        1
    } else {
        -1
    }
}

/// The subensemble density ρ_a of a pure state with Bloch vector `axis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubensembleDensity {
    pub axis: UnitVector,
}

impl SubensembleDensity {
    pub fn new(axis: UnitVector) -> Self {
        Self { axis }
    }

    pub fn evaluate(&self, lambda: UnitVector) -> f64 {
        density(self.axis, lambda)
    }

    pub fn sampler(&self) -> HemisphereSampler {
        HemisphereSampler::new(self.axis)
    }
}

/// The hemisphere indicator χ^± attached to a projector along `axis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicFunction {
    pub axis: UnitVector,
    pub sign: Sign,
}

impl CharacteristicFunction {
    pub fn new(axis: UnitVector, sign: Sign) -> Self {
        Self { axis, sign }
    }

    pub fn evaluate(&self, lambda: UnitVector) -> u8 {
        chi(self.axis, self.sign, lambda)
    }

    /// Pole of the hemisphere where this function is 1.
    pub fn pole(&self) -> UnitVector {
        self.sign.apply(self.axis)
    }
}

/// I_ab = (1 + sign_b · n_a·n_b)/2.
pub fn overlap_closed(n_a: UnitVector, n_b: UnitVector, sign_b: Sign) -> f64 {
    (1.0 + sign_b.value() * n_a.dot(&n_b)) / 2.0
}

/// ∫ ρ_a χ_b^± dS on a grid whose pole is `n_a`.
pub fn overlap_grid(n_a: UnitVector, n_b: UnitVector, sign_b: Sign, n_theta: usize) -> Result<f64> {
    integrate_sphere_grid_aligned(
        &|l: UnitVector| density(n_a, l) * f64::from(chi(n_b, sign_b, l)),
        n_a,
        n_theta,
        2 * n_theta,
    )
}

pub fn overlap_numeric(
    n_a: UnitVector,
    n_b: UnitVector,
    sign_b: Sign,
    method: NumericMethod,
) -> Result<Estimate> {
    match method {
        NumericMethod::Grid { n_theta } => Ok(Estimate::exact(
            overlap_grid(n_a, n_b, sign_b, n_theta)?,
            2 * n_theta * n_theta,
        )),
        NumericMethod::MonteCarlo(cfg) => integrate_sphere_mc(
            &|l: UnitVector| density(n_a, l) * f64::from(chi(n_b, sign_b, l)),
            cfg,
        ),
    }
}

/// I_ab as (1/2π) ∮ (r × dr/ds)·n_a ds around the boundary of the lune
/// N_a ∩ N_b', with n_b' = sign_b·n_b.
///
/// The boundary is half of C_a (where r·n_b' ≥ 0) followed by half of C_b'
/// (where r·n_a ≥ 0), both counterclockwise about their own poles.
pub fn overlap_contour(n_a: UnitVector, n_b: UnitVector, sign_b: Sign, n_steps: usize) -> Result<f64> {
    let nb = sign_b.apply(n_b);
    let g = |r: UnitVector, t: UnitVector| bivector_component(r, t, n_a);
    let c = n_a.cross(&nb);
    let s = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    if s < 1e-12 {
        // Coincident equators: the lune is all of N_a or empty.
        if n_a.dot(&nb) > 0.0 {
            return Ok(line_integral_great_circle(n_a, g, n_steps)? / (2.0 * PI));
        }
        return Ok(0.0);
    }
    let p = UnitVector::from_array(c)?;
    let on_a = line_integral_arc(n_a, -p, PI, g, n_steps)?;
    let on_b = line_integral_arc(nb, p, PI, g, n_steps)?;
    Ok((on_a + on_b) / (2.0 * PI))
}
