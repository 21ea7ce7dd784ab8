//! Quantum-mechanical reference for two polarization qubits.
//!
//! Basis order is {|HH⟩, |HV⟩, |VH⟩, |VV⟩}. |H⟩ is identified with the +z
//! Bloch direction and |V⟩ with −z, so the dichotomic polarization
//! observable along a unit vector n is n·σ with the standard Pauli matrices.
//! With that identification the singlet (|HV⟩ − |VH⟩)/√2 has correlation
//! tensor −I and E(a, b) = −a·b.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::UnitVector;

type C = Complex64;
type Mat2 = [[C; 2]; 2];

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);
const I: C = C::new(0.0, 1.0);

const PAULI: [Mat2; 3] = [
    [[ZERO, ONE], [ONE, ZERO]],
    [[ZERO, C::new(0.0, -1.0)], [I, ZERO]],
    [[ONE, ZERO], [ZERO, C::new(-1.0, 0.0)]],
];

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellState {
    PsiMinus,
    PsiPlus,
    PhiPlus,
    PhiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PsiMinus,
        BellState::PsiPlus,
        BellState::PhiPlus,
        BellState::PhiMinus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BellState::PsiMinus => "psi-",
            BellState::PsiPlus => "psi+",
            BellState::PhiPlus => "phi+",
            BellState::PhiMinus => "phi-",
        }
    }
}

impl FromStr for BellState {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "singlet" | "psi-" | "psi_minus" => Ok(BellState::PsiMinus),
            "psi+" | "psi_plus" => Ok(BellState::PsiPlus),
            "phi+" | "phi_plus" => Ok(BellState::PhiPlus),
            "phi-" | "phi_minus" => Ok(BellState::PhiMinus),
            other => Err(Error::InvalidArgument(format!(
                "unknown state '{other}' (expected singlet, psi-, psi+, phi+, phi-)"
            ))),
        }
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Normalized pure state of two qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    amplitudes: [C; 4],
}

impl TwoQubitState {
    /// Accepts amplitudes whose squared norm is 1 within 1e−12.
    pub fn new(amplitudes: [C; 4]) -> Result<Self> {
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm2.is_finite() || (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm2.sqrt()));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: [C; 4]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            amplitudes: amplitudes.map(|a| a / norm),
        })
    }

    pub fn amplitudes(&self) -> [C; 4] {
        self.amplitudes
    }

    pub fn bell(kind: BellState) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (p, m) = (C::new(h, 0.0), C::new(-h, 0.0));
        let amplitudes = match kind {
            BellState::PsiMinus => [ZERO, p, m, ZERO],
            BellState::PsiPlus => [ZERO, p, p, ZERO],
            BellState::PhiPlus => [p, ZERO, ZERO, p],
            // (|VV⟩ − |HH⟩)/√2
            BellState::PhiMinus => [m, ZERO, ZERO, p],
        };
        Self { amplitudes }
    }

    /// ⟨ψ| X ⊗ Y |ψ⟩ for single-qubit operators X (Alice) and Y (Bob).
    fn expectation(&self, x: &Mat2, y: &Mat2) -> C {
        let psi = &self.amplitudes;
        let mut acc = ZERO;
        for (row, amp) in psi.iter().enumerate() {
            let (ra, rb) = (row >> 1, row & 1);
            let mut applied = ZERO;
            for (col, c) in psi.iter().enumerate() {
                let (ca, cb) = (col >> 1, col & 1);
                applied += x[ra][ca] * y[rb][cb] * c;
            }
            acc += amp.conj() * applied;
        }
        acc
    }

    /// ⟨(a·σ) ⊗ (b·σ)⟩ evaluated directly from the operator, without the
    /// tensor decomposition.
    pub fn expectation_along(&self, a: UnitVector, b: UnitVector) -> f64 {
        self.expectation(&along(a), &along(b)).re
    }
}

fn along(n: UnitVector) -> Mat2 {
    let mut m = [[ZERO; 2]; 2];
    for (k, comp) in n.to_array().into_iter().enumerate() {
        for (r, row) in m.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v += PAULI[k][r][c] * comp;
            }
        }
    }
    m
}

pub fn bell_state(kind: BellState) -> TwoQubitState {
    TwoQubitState::bell(kind)
}

/// Real 3×3 matrix with E(a, b) = aᵀ T b; entries in [−1, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationTensor {
    t: [[f64; 3]; 3],
}

impl CorrelationTensor {
    pub const ZERO: CorrelationTensor = CorrelationTensor { t: [[0.0; 3]; 3] };

    pub fn new(t: [[f64; 3]; 3]) -> Result<Self> {
        for (row, r) in t.iter().enumerate() {
            for (col, &value) in r.iter().enumerate() {
                if !value.is_finite() || value.abs() > 1.0 + 1e-12 {
                    return Err(Error::TensorEntry { row, col, value });
                }
            }
        }
        Ok(Self {
            t: t.map(|r| r.map(|v| v.clamp(-1.0, 1.0))),
        })
    }

    pub fn diagonal(d: [f64; 3]) -> Result<Self> {
        let mut t = [[0.0; 3]; 3];
        for i in 0..3 {
            t[i][i] = d[i];
        }
        Self::new(t)
    }

    pub fn entries(&self) -> [[f64; 3]; 3] {
        self.t
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.t[i][j]
    }

    /// aᵀ T b.
    pub fn correlation(&self, a: UnitVector, b: UnitVector) -> f64 {
        let (a, b) = (a.to_array(), b.to_array());
        (0..3)
            .map(|i| a[i] * (0..3).map(|j| self.t[i][j] * b[j]).sum::<f64>())
            .sum()
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::new(self.t.map(|r| r.map(|v| v * k)))
    }

    /// Σ w_k T_k for nonnegative weights summing to 1.
    pub fn convex_combination(parts: &[(f64, CorrelationTensor)]) -> Result<Self> {
        check_weights(parts.iter().map(|(w, _)| *w))?;
        let mut t = [[0.0; 3]; 3];
        for (w, part) in parts {
            for i in 0..3 {
                for j in 0..3 {
                    t[i][j] += w * part.t[i][j];
                }
            }
        }
        Self::new(t)
    }
}

impl Serialize for CorrelationTensor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.t.serialize(s)
    }
}

pub(crate) fn check_weights(weights: impl Iterator<Item = f64>) -> Result<()> {
    let mut sum = 0.0;
    for w in weights {
        if !(w >= 0.0) {
            return Err(Error::NegativeWeight(w));
        }
        sum += w;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::WeightSum(sum));
    }
    Ok(())
}

/// t_ij = ⟨ψ| σ_i ⊗ σ_j |ψ⟩.
pub fn correlation_tensor(state: &TwoQubitState) -> CorrelationTensor {
    let mut t = [[0.0; 3]; 3];
    for (i, row) in t.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = state.expectation(&PAULI[i], &PAULI[j]).re.clamp(-1.0, 1.0);
        }
    }
    CorrelationTensor { t }
}

/// aᵀ T(ψ) b.
pub fn qm_correlation(state: &TwoQubitState, n_a: UnitVector, n_b: UnitVector) -> f64 {
    correlation_tensor(state).correlation(n_a, n_b)
}

/// Convex mixture of pure two-qubit states, held as a 4×4 density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    rho: [[C; 4]; 4],
}

impl MixedState {
    pub fn new(components: &[(f64, TwoQubitState)]) -> Result<Self> {
        check_weights(components.iter().map(|(w, _)| *w))?;
        let mut rho = [[ZERO; 4]; 4];
        for (w, s) in components {
            let a = s.amplitudes();
            for r in 0..4 {
                for c in 0..4 {
                    rho[r][c] += a[r] * a[c].conj() * *w;
                }
            }
        }
        Ok(Self { rho })
    }

    /// t_ij = Tr(ρ σ_i ⊗ σ_j).
    pub fn correlation_tensor(&self) -> CorrelationTensor {
        let mut t = [[0.0; 3]; 3];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                let mut tr = ZERO;
                for r in 0..4 {
                    for c in 0..4 {
                        let op = PAULI[i][c >> 1][r >> 1] * PAULI[j][c & 1][r & 1];
                        tr += self.rho[r][c] * op;
                    }
                }
                *v = tr.re.clamp(-1.0, 1.0);
            }
        }
        CorrelationTensor { t }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_uniform_sphere, RngStream};
    use proptest::prelude::*;

    fn diag(t: &CorrelationTensor) -> [f64; 3] {
        [t.get(0, 0), t.get(1, 1), t.get(2, 2)]
    }

    fn is_diagonal(t: &CorrelationTensor) -> bool {
        (0..3).all(|i| (0..3).all(|j| i == j || t.get(i, j).abs() < 1e-15))
    }

    #[test]
    fn bell_amplitudes() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = bell_state(BellState::PsiMinus).amplitudes();
        assert_eq!(psi.map(|c| c.re), [0.0, h, -h, 0.0]);
        let phi = bell_state(BellState::PhiPlus).amplitudes();
        assert_eq!(phi.map(|c| c.re), [h, 0.0, 0.0, h]);
        for kind in BellState::ALL {
            let n: f64 = bell_state(kind).amplitudes().iter().map(|a| a.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn bell_tensor_table() {
        let expected = [
            (BellState::PsiMinus, [-1.0, -1.0, -1.0]),
            (BellState::PsiPlus, [1.0, 1.0, -1.0]),
            (BellState::PhiPlus, [1.0, -1.0, 1.0]),
            (BellState::PhiMinus, [-1.0, 1.0, 1.0]),
        ];
        for (kind, d) in expected {
            let t = correlation_tensor(&bell_state(kind));
            assert!(is_diagonal(&t), "{kind}");
            assert_eq!(diag(&t), d, "{kind}");
        }
    }

    #[test]
    fn qm_correlation_examples() {
        let s = bell_state(BellState::PsiMinus);
        let a = UnitVector::new(0.2, 0.3, -0.9).unwrap();
        assert!((qm_correlation(&s, a, a) + 1.0).abs() < 1e-15);
        assert!(qm_correlation(&s, UnitVector::X, UnitVector::Z).abs() < 1e-15);
        let phi = bell_state(BellState::PhiPlus);
        assert!((qm_correlation(&phi, UnitVector::Z, UnitVector::Z) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unnormalized_state_rejected() {
        let amps = [ONE, ONE, ZERO, ZERO];
        assert!(matches!(TwoQubitState::new(amps), Err(Error::NotNormalized(_))));
        assert!(TwoQubitState::normalized(amps).is_ok());
        assert!(TwoQubitState::normalized([ZERO; 4]).is_err());
    }

    #[test]
    fn tensor_entries_are_checked() {
        assert!(CorrelationTensor::diagonal([1.0, -1.0, 1.5]).is_err());
        assert!(CorrelationTensor::new([[f64::NAN, 0.0, 0.0], [0.0; 3], [0.0; 3]]).is_err());
    }

    #[test]
    fn mixture_tensor_is_mixture_of_tensors() {
        let parts = [
            (0.25, bell_state(BellState::PsiMinus)),
            (0.5, bell_state(BellState::PhiPlus)),
            (0.25, TwoQubitState::normalized([ONE, I, C::new(0.3, -0.2), C::new(-0.5, 0.0)]).unwrap()),
        ];
        let mixed = MixedState::new(&parts).unwrap().correlation_tensor();
        let tensors: Vec<(f64, CorrelationTensor)> =
            parts.iter().map(|(w, s)| (*w, correlation_tensor(s))).collect();
        let combined = CorrelationTensor::convex_combination(&tensors).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((mixed.get(i, j) - combined.get(i, j)).abs() < 1e-14);
            }
        }
        assert!(MixedState::new(&[(0.7, parts[0].1)]).is_err());
        assert!(MixedState::new(&[(1.5, parts[0].1), (-0.5, parts[1].1)]).is_err());
    }

    fn arb_unit() -> impl Strategy<Value = UnitVector> {
        (any::<u64>()).prop_map(|s| sample_uniform_sphere(&mut RngStream::new(s, 0)))
    }

    fn arb_state() -> impl Strategy<Value = TwoQubitState> {
        prop::array::uniform8(-1.0f64..1.0)
            .prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3))
            .prop_map(|v| {
                TwoQubitState::normalized([
                    C::new(v[0], v[1]),
                    C::new(v[2], v[3]),
                    C::new(v[4], v[5]),
                    C::new(v[6], v[7]),
                ])
                .unwrap()
            })
    }

    proptest! {
        #[test]
        fn tensor_route_matches_direct_operator(s in arb_state(), a in arb_unit(), b in arb_unit()) {
            let e = qm_correlation(&s, a, b);
            prop_assert!(e.abs() <= 1.0 + 1e-12);
            prop_assert!((e - s.expectation_along(a, b)).abs() < 1e-12);
        }

        #[test]
        fn correlation_is_bilinear(s in arb_state(), a in arb_unit(), a2 in arb_unit(), b in arb_unit(),
                                   x in -2.0f64..2.0, y in -2.0f64..2.0) {
            let t = correlation_tensor(&s);
            let combo = UnitVector::new(
                x * a.x() + y * a2.x(), x * a.y() + y * a2.y(), x * a.z() + y * a2.z());
            prop_assume!(combo.is_ok());
            let raw = [x * a.x() + y * a2.x(), x * a.y() + y * a2.y(), x * a.z() + y * a2.z()];
            let norm = (raw[0] * raw[0] + raw[1] * raw[1] + raw[2] * raw[2]).sqrt();
            let lhs = t.correlation(combo.unwrap(), b) * norm;
            let rhs = x * t.correlation(a, b) + y * t.correlation(a2, b);
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }
    }
}
