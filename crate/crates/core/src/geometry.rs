//! Points on the unit sphere, frame rotations and seeded sampling.
//!
//! Every hidden variable, polarization and analyzer setting in the model is a
//! [`UnitVector`]. Random draws go through [`RngStream`], a ChaCha8 generator
//! addressed by `(seed, stream_id)` so that parallel work can be split into
//! independent, reproducible streams.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Neg;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

#[inline]
pub fn dot3(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross3(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm3(a: Vec3) -> f64 {
    dot3(a, a).sqrt()
}

/// A direction on S².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 3]", try_from = "[f64; 3]")]
pub struct UnitVector {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector {
    pub const X: UnitVector = UnitVector {
        x: 1.0,
        y: 0.0,
        z: 0.0,
    };
    pub const Y: UnitVector = UnitVector {
        x: 0.0,
        y: 1.0,
        z: 0.0,
    };
    pub const Z: UnitVector = UnitVector {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    /// Normalizes `(x, y, z)`. Zero or non-finite input is rejected.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = norm3([x, y, z]);
        if !n.is_finite() || n < 1e-300 {
            return Err(Error::DegenerateVector(x, y, z));
        }
        Ok(Self {
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    pub fn from_array(v: Vec3) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }

    /// Components that are already unit length up to rounding.
    #[inline]
    pub(crate) fn from_unit_components(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// `(sin θ cos φ, sin θ sin φ, cos θ)` with θ ∈ [0, π] and φ ∈ [0, 2π).
    pub fn from_spherical(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::AngleOutOfRange {
                name: "theta",
                value: theta,
                min: 0.0,
                max: PI,
            });
        }
        if !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::AngleOutOfRange {
                name: "phi",
                value: phi,
                min: 0.0,
                max: 2.0 * PI,
            });
        }
        Ok(Self::spherical_unchecked(theta, phi))
    }

    #[inline]
    pub(crate) fn spherical_unchecked(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            x: st * cp,
            y: st * sp,
            z: ct,
        }
    }

    /// Direction at polar angle `angle` from +z in the x–z plane.
    pub fn in_xz_plane(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { x: s, y: 0.0, z: c }
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }
    #[inline]
    pub fn y(&self) -> f64 {
        self.y
    }
    #[inline]
    pub fn z(&self) -> f64 {
        self.z
    }

    #[inline]
    pub fn to_array(self) -> Vec3 {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn dot(&self, other: &UnitVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn dot_vec(&self, v: Vec3) -> f64 {
        self.x * v[0] + self.y * v[1] + self.z * v[2]
    }

    #[inline]
    pub fn cross(&self, other: &UnitVector) -> Vec3 {
        cross3(self.to_array(), other.to_array())
    }

    pub fn norm(&self) -> f64 {
        norm3(self.to_array())
    }

    /// Angle between the two directions, in [0, π].
    pub fn angle_to(&self, other: &UnitVector) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }
}

impl Neg for UnitVector {
    type Output = UnitVector;
    fn neg(self) -> Self::Output {
        UnitVector {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

impl From<UnitVector> for Vec3 {
    fn from(v: UnitVector) -> Self {
        v.to_array()
    }
}

impl TryFrom<Vec3> for UnitVector {
    type Error = Error;
    fn try_from(v: Vec3) -> Result<Self> {
        UnitVector::from_array(v)
    }
}

impl fmt::Display for UnitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}, {:.6}, {:.6})", self.x, self.y, self.z)
    }
}

/// Proper rotation of R³, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    m: [[f64; 3]; 3],
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.m
    }

    #[inline]
    pub fn apply_vec(&self, v: Vec3) -> Vec3 {
        let m = &self.m;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    #[inline]
    pub fn apply(&self, v: UnitVector) -> UnitVector {
        let [x, y, z] = self.apply_vec(v.to_array());
        UnitVector::from_unit_components(x, y, z)
    }

    pub fn transpose(&self) -> Rotation {
        let m = &self.m;
        Rotation {
            m: [
                [m[0][0], m[1][0], m[2][0]],
                [m[0][1], m[1][1], m[2][1]],
                [m[0][2], m[1][2], m[2][2]],
            ],
        }
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Largest entry of |RᵀR − I|.
    pub fn orthogonality_defect(&self) -> f64 {
        let m = &self.m;
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let g: f64 = (0..3).map(|k| m[k][i] * m[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }
}

/// Rotation taking +z to `pole` about the axis z × pole.
///
/// The antipodal pole −z maps to a rotation by π about the x-axis.
pub fn rotation_to_pole(pole: UnitVector) -> Rotation {
    let [px, py, c] = pole.to_array();
    let s2 = px * px + py * py;
    if s2 == 0.0 {
        return if c > 0.0 {
            Rotation::IDENTITY
        } else {
            Rotation {
                m: [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]],
            }
        };
    }
    // v = z × pole = (-py, px, 0); R = c I + k v vᵀ + [v]×, k = 1/(1 + c).
    // For c < 0 the equivalent k = (1 - c)/s² avoids cancellation in 1 + c.
    let k = if c >= 0.0 { 1.0 / (1.0 + c) } else { (1.0 - c) / s2 };
    let (vx, vy) = (-py, px);
    Rotation {
        m: [
            [c + k * vx * vx, k * vx * vy, vy],
            [k * vx * vy, c + k * vy * vy, -vx],
            [-vy, vx, c],
        ],
    }
}

/// Seeded random stream; `(seed, stream_id)` fully determines the sequence.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Position in the keystream, in 32-bit words.
    pub fn counter(&self) -> u128 {
        self.rng.get_word_pos()
    }

    /// Uniform draw in [0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

/// Uniform point on S² with respect to surface measure.
pub fn sample_uniform_sphere(rng: &mut RngStream) -> UnitVector {
    let z = 1.0 - 2.0 * rng.uniform();
    let phi = 2.0 * PI * rng.uniform();
    let r = (1.0 - z * z).max(0.0).sqrt();
    let (s, c) = phi.sin_cos();
    UnitVector::from_unit_components(r * c, r * s, z)
}

/// Sampler for densities on the northern hemisphere of a fixed pole.
///
/// The pole-aligned frame is computed once; draws are made around +z and
/// rotated.
#[derive(Debug, Clone, Copy)]
pub struct HemisphereSampler {
    pole: UnitVector,
    frame: Rotation,
}

impl HemisphereSampler {
    pub fn new(pole: UnitVector) -> Self {
        Self {
            pole,
            frame: rotation_to_pole(pole),
        }
    }

    pub fn pole(&self) -> UnitVector {
        self.pole
    }

    /// Density (λ·pole)/π on the hemisphere; inverse CDF gives cos θ = √ξ.
    #[inline]
    pub fn cosine(&self, rng: &mut RngStream) -> UnitVector {
        let cos_theta = rng.uniform().sqrt();
        self.around_pole(cos_theta, rng)
    }

    /// Uniform surface density 1/(2π) on the hemisphere.
    #[inline]
    pub fn uniform(&self, rng: &mut RngStream) -> UnitVector {
        let cos_theta = rng.uniform();
        self.around_pole(cos_theta, rng)
    }

    #[inline]
    fn around_pole(&self, cos_theta: f64, rng: &mut RngStream) -> UnitVector {
        let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
        let (s, c) = (2.0 * PI * rng.uniform()).sin_cos();
        self.frame.apply(UnitVector::from_unit_components(
            sin_theta * c,
            sin_theta * s,
            cos_theta,
        ))
    }
}

/// One draw from the cosine-weighted hemisphere around `pole`.
pub fn sample_cosine_hemisphere(pole: UnitVector, rng: &mut RngStream) -> UnitVector {
    HemisphereSampler::new(pole).cosine(rng)
}

/// One uniform draw from the hemisphere around `pole`.
pub fn sample_uniform_hemisphere(pole: UnitVector, rng: &mut RngStream) -> UnitVector {
    HemisphereSampler::new(pole).uniform(rng)
}
