//! Generic two-qubit entanglement machinery: computational-basis states,
//! partial traces, reduced-density eigenvalues, the von Neumann measure
//! (bits) and the Schmidt measure.
//!
//! Basis ordering is |00⟩, |01⟩, |10⟩, |11⟩; the first qubit is subsystem
//! A. Entropies use log₂ throughout, with the 0·log₂0 ≡ 0 convention.

use num_complex::Complex64;

use crate::{Error, Result};

/// Normalization tolerance for accepting an input state.
const NORM_TOL: f64 = 1e-9;

/// A pure two-qubit state: four amplitudes in the computational basis.
#[derive(Clone, Copy, Debug)]
pub struct TwoQubitState {
    v: [Complex64; 4],
}

impl TwoQubitState {
    /// Accepts a state normalized to within 1e-9 and renormalizes it
    /// exactly.
    pub fn new(v: [Complex64; 4]) -> Result<Self> {
        let norm_sq: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized { norm_sq });
        }
        Ok(Self::renormalized(v, norm_sq))
    }

    /// Normalizes an arbitrary nonzero amplitude vector.
    pub fn from_unnormalized(v: [Complex64; 4]) -> Result<Self> {
        let norm_sq: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sq.is_finite() || norm_sq <= 0.0 {
            return Err(Error::Unnormalized { norm_sq });
        }
        Ok(Self::renormalized(v, norm_sq))
    }

    fn renormalized(mut v: [Complex64; 4], norm_sq: f64) -> Self {
        let inv = 1.0 / norm_sq.sqrt();
        for a in &mut v {
            *a *= inv;
        }
        TwoQubitState { v }
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.v
    }
}

/// A 2×2 reduced density matrix.
#[derive(Clone, Copy, Debug)]
pub struct ReducedDensity {
    pub rho: [[Complex64; 2]; 2],
}

impl ReducedDensity {
    pub fn trace(&self) -> f64 {
        self.rho[0][0].re + self.rho[1][1].re
    }
}

/// Entanglement summary of a pure two-qubit state.
///
/// `lambda` holds the reduced-density eigenvalues ordered
/// (λ₁, λ₂) = ((1 − y)/2, (1 + y)/2), i.e. smaller first.
#[derive(Clone, Copy, Debug)]
pub struct EntanglementReport {
    pub y: f64,
    pub lambda: [f64; 2],
    /// Von Neumann measure in bits, in [0, 1].
    pub e: f64,
    /// Schmidt measure 1 − tr ρ², in [0, ½].
    pub e_s: f64,
}

/// Partial trace over the second qubit:
/// ρ₁₁ = |υ₁|² + |υ₂|², ρ₂₂ = |υ₃|² + |υ₄|², ρ₁₂ = υ₁υ₃* + υ₂υ₄*.
pub fn reduce_first(state: &TwoQubitState) -> ReducedDensity {
    let v = &state.v;
    let r11 = v[0].norm_sqr() + v[1].norm_sqr();
    let r22 = v[2].norm_sqr() + v[3].norm_sqr();
    let r12 = v[0] * v[2].conj() + v[1] * v[3].conj();
    ReducedDensity {
        rho: [
            [Complex64::new(r11, 0.0), r12],
            [r12.conj(), Complex64::new(r22, 0.0)],
        ],
    }
}

/// Partial trace over the first qubit. The spectrum equals that of
/// [`reduce_first`]; kept as a cheap symmetry check.
pub fn reduce_second(state: &TwoQubitState) -> ReducedDensity {
    let v = &state.v;
    let r11 = v[0].norm_sqr() + v[2].norm_sqr();
    let r22 = v[1].norm_sqr() + v[3].norm_sqr();
    let r12 = v[0] * v[1].conj() + v[2] * v[3].conj();
    ReducedDensity {
        rho: [
            [Complex64::new(r11, 0.0), r12],
            [r12.conj(), Complex64::new(r22, 0.0)],
        ],
    }
}

/// The eigenvalue gap y = √((ρ₁₁ − ρ₂₂)² + 4|ρ₁₂|²), clamped to [0, 1].
pub fn gap_y(rho: &ReducedDensity) -> f64 {
    let d = rho.rho[0][0].re - rho.rho[1][1].re;
    let y = f64::hypot(d, 2.0 * rho.rho[0][1].norm());
    y.clamp(0.0, 1.0)
}

/// Reduced-density eigenvalues λ_a = ½(ρ₁₁ + ρ₂₂ + (−1)^a y), smaller
/// first, clamped to [0, 1].
pub fn eigenvalues(rho: &ReducedDensity) -> [f64; 2] {
    let tr = rho.trace();
    let y = gap_y(rho);
    [(0.5 * (tr - y)).clamp(0.0, 1.0), (0.5 * (tr + y)).clamp(0.0, 1.0)]
}

/// Binary entropy −β log₂ β − (1 − β) log₂(1 − β) with 0 log 0 ≡ 0,
/// evaluated through ln(1+x) for accuracy at small β.
pub(crate) fn binary_entropy_bits(beta: f64) -> f64 {
    let beta = beta.clamp(0.0, 1.0);
    if beta == 0.0 || beta == 1.0 {
        return 0.0;
    }
    (-(1.0 - beta) * (-beta).ln_1p() - beta * beta.ln()) / std::f64::consts::LN_2
}

/// Von Neumann measure E = −Σ λ_a log₂ λ_a of the reduced density.
pub fn vonneumann(state: &TwoQubitState) -> f64 {
    let rho = reduce_first(state);
    binary_entropy_bits(eigenvalues(&rho)[0])
}

/// Schmidt measure E_S = 1 − tr ρ² = (1 − y²)/2.
pub fn schmidt(state: &TwoQubitState) -> f64 {
    let rho = reduce_first(state);
    let y = gap_y(&rho);
    0.5 * (1.0 - y) * (1.0 + y)
}

/// Full report for a state.
pub fn report(state: &TwoQubitState) -> EntanglementReport {
    let rho = reduce_first(state);
    let y = gap_y(&rho);
    let lambda = eigenvalues(&rho);
    EntanglementReport {
        y,
        lambda,
        e: binary_entropy_bits(lambda[0]),
        e_s: 0.5 * (1.0 - y) * (1.0 + y),
    }
}
