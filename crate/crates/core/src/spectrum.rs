//! Quasi-photon frequencies.
//!
//! Free case: the positive roots τ₁, τ₂ of
//!
//! ```text
//! ϵ Σ_l (τ² − κ_l²)⁻¹ = 1
//! ```
//!
//! on the branches with τ_s(ϵ=0) = κ_s, available both in closed form and
//! from an independent bracketing solver. Magnetic case: the roots of
//!
//! ```text
//! ϵ Σ_s (τ² − κ_s²)⁻¹ = 1 + (−1)^(λ−1) ω/τ
//! ```
//!
//! for k ∈ {1, 2}, λ ∈ {1, 2}, plus the Landau root τ₀ on the branch
//! continuous with τ₀(ϵ=0) = ω.
//!
//! All solvers keep the gaps τ² − κ² as first-class quantities; near ϵ → 0
//! those gaps are O(ϵ) and recomputing them by subtraction would lose the
//! precision the coefficient formulas need.

use crate::params::ModelParams;
use crate::solve;
use crate::{Error, Result};

/// Free-case quasi-photon frequencies with closed-form intermediates.
#[derive(Clone, Debug)]
pub struct FreeRoots {
    /// τ₁, the root on the branch continuous with κ₁.
    pub tau_1: f64,
    /// τ₂, the root on the branch continuous with κ₂.
    pub tau_2: f64,
    /// A = ϵ + (κ₁² + κ₂²)/2.
    pub a_term: f64,
    /// B = sgn(κ₁ − κ₂) √(ϵ² + ((κ₁² − κ₂²)/2)²), so that τ₁² = A + B.
    pub b_disc: f64,
    /// Zero-point shift H₀ = Σ_s (τ_s − κ_s).
    pub h0: f64,
    /// gaps[s-1][l-1] = τ_s² − κ_l², evaluated cancellation-free.
    pub gaps: [[f64; 2]; 2],
    /// Characteristic-equation residual per root.
    pub residuals: [f64; 2],
}

impl FreeRoots {
    /// τ_s by index (s ∈ {1, 2}).
    pub fn tau(&self, s: usize) -> f64 {
        match s {
            1 => self.tau_1,
            2 => self.tau_2,
            _ => panic!("root index must be 1 or 2, got {s}"),
        }
    }

    /// τ_s² − κ_l².
    pub fn gap(&self, s: usize, l: usize) -> f64 {
        self.gaps[s - 1][l - 1]
    }
}

/// Substitution residual of the free characteristic equation at τ.
pub fn free_residual(params: &ModelParams, tau: f64) -> f64 {
    let x = tau * tau;
    let lhs = params.epsilon
        * (1.0 / (x - params.kappa_1 * params.kappa_1)
            + 1.0 / (x - params.kappa_2 * params.kappa_2));
    (lhs - 1.0).abs()
}

fn assemble_free(params: &ModelParams, gap_own: [f64; 2], a_term: f64, b_disc: f64) -> FreeRoots {
    let k = [params.kappa_1, params.kappa_2];
    let tau = [
        (k[0] * k[0] + gap_own[0]).sqrt(),
        (k[1] * k[1] + gap_own[1]).sqrt(),
    ];
    let mut gaps = [[0.0; 2]; 2];
    let mut residuals = [0.0; 2];
    for s in 0..2 {
        let l = 1 - s;
        gaps[s][s] = gap_own[s];
        // Cross gap: τ_s² − κ_l² = gap_own + (κ_s² − κ_l²); the two terms are
        // of the same sign or far apart in magnitude, no cancellation risk in
        // the validity regime.
        gaps[s][l] = gap_own[s] + (k[s] * k[s] - k[l] * k[l]);
        if params.epsilon > 0.0 {
            residuals[s] =
                (params.epsilon * (1.0 / gaps[s][s] + 1.0 / gaps[s][l]) - 1.0).abs();
        }
    }
    let h0 = gap_own[0] / (tau[0] + k[0]) + gap_own[1] / (tau[1] + k[1]);
    FreeRoots { tau_1: tau[0], tau_2: tau[1], a_term, b_disc, h0, gaps, residuals }
}

/// Closed-form free roots: τ² = A ± B with the small root evaluated through
/// the product of roots to avoid cancellation.
pub fn free_roots_closed(params: &ModelParams) -> FreeRoots {
    let eps = params.epsilon;
    let k1sq = params.kappa_1 * params.kappa_1;
    let k2sq = params.kappa_2 * params.kappa_2;
    let d = 0.5 * (k1sq - k2sq);
    let d_abs = d.abs();
    let b_abs = f64::hypot(eps, d);
    let sign = if params.kappa_1 >= params.kappa_2 { 1.0 } else { -1.0 };
    let a_term = eps + 0.5 * (k1sq + k2sq);
    let b_disc = sign * b_abs;

    // b_abs − d_abs = ϵ²/(b_abs + d_abs) exactly; both own-gaps stay
    // cancellation-free down to ϵ = 0.
    let excess = eps * eps / (b_abs + d_abs);
    let gap_hi_own = eps + excess;
    let gap_lo_own = eps - excess;
    let (gap_1, gap_2) =
        if params.kappa_1 >= params.kappa_2 { (gap_hi_own, gap_lo_own) } else { (gap_lo_own, gap_hi_own) };
    assemble_free(params, [gap_1, gap_2], a_term, b_disc)
}

/// Solve ϵ/e + ϵ/(e + Δ) = 1 for the gap e = τ² − κ_s² on the branch
/// attached to the pole at e = 0. Δ = κ_s² − κ_l² for the other photon.
fn solve_free_gap(eps: f64, delta: f64, context: &str) -> Result<f64> {
    debug_assert!(eps > 0.0);
    let f = |e: f64| eps / e + eps / (e + delta) - 1.0;
    let df = |e: f64| -eps / (e * e) - eps / ((e + delta) * (e + delta));

    // The root lies in (0, wall): wall is the next pole for the inner root,
    // effectively infinity for the outer one.
    let wall = if delta < 0.0 { -delta } else { (eps + delta).max(eps) * 1e12 };
    // Find a positive-sign starting point below the root.
    let mut start = if delta < 0.0 { eps.min(0.5 * wall) } else { eps };
    let mut guard = 0;
    while f(start) <= 0.0 {
        start *= 0.5;
        guard += 1;
        if guard > 2000 {
            return Err(Error::SolverFailure { context: context.into(), iterations: guard });
        }
    }
    let bracket = solve::expand_bracket(&f, start, wall, start).ok_or_else(|| {
        Error::SolverFailure { context: context.into(), iterations: solve::MAX_EXPAND }
    })?;
    let solved = solve::refine(&f, &df, bracket);
    Ok(solved.root)
}

/// Free roots from the bracketing solver, independent of the closed form.
pub fn free_roots_numeric(params: &ModelParams) -> Result<FreeRoots> {
    if params.epsilon == 0.0 {
        return Ok(free_roots_closed(params));
    }
    let k1sq = params.kappa_1 * params.kappa_1;
    let k2sq = params.kappa_2 * params.kappa_2;
    let gap_1 = solve_free_gap(params.epsilon, k1sq - k2sq, "free root 1")?;
    let gap_2 = solve_free_gap(params.epsilon, k2sq - k1sq, "free root 2")?;
    let closed = free_roots_closed(params);
    Ok(assemble_free(params, [gap_1, gap_2], closed.a_term, closed.b_disc))
}

/// Printed small-ϵ expansion of the free roots through O(ϵ²).
pub fn free_roots_asymptotic(params: &ModelParams) -> FreeRoots {
    let eps = params.epsilon;
    let k = [params.kappa_1, params.kappa_2];
    let closed = free_roots_closed(params);
    let mut gap_own = [0.0; 2];
    for s in 0..2 {
        let l = 1 - s;
        let ks = k[s];
        let ksq = ks * ks;
        let coeff = (2.0 * ksq + k[0] * k[0] + k[1] * k[1]) / (8.0 * ksq * ks);
        let shift = eps / (2.0 * ks) + coeff * eps * eps / (ksq - k[l] * k[l]);
        gap_own[s] = shift * (2.0 * ks + shift);
    }
    assemble_free(params, gap_own, closed.a_term, closed.b_disc)
}

/// Magnetic-case quasi-photon frequencies.
#[derive(Clone, Debug)]
pub struct MagneticRoots {
    omega: f64,
    /// tau[k-1][λ-1] for k, λ ∈ {1, 2}.
    tau: [[f64; 2]; 2],
    /// gaps[k-1][λ-1][s-1] = τ_{k,λ}² − κ_s².
    gaps: [[[f64; 2]; 2]; 2],
    residuals: [[f64; 2]; 2],
    /// Landau root; `None` at ω = 0 where the mode degenerates to a free
    /// particle of zero frequency.
    tau_0: Option<f64>,
    tau_0_residual: f64,
}

impl MagneticRoots {
    /// τ_{k,λ} for k ∈ {0, 1, 2}: the k = 0 entry follows the labeling
    /// τ_{0,λ} = τ₀ δ_{λ,1}.
    pub fn tau_kl(&self, k: usize, lambda: usize) -> f64 {
        assert!((1..=2).contains(&lambda), "polarization index must be 1 or 2");
        match k {
            0 => {
                if lambda == 1 {
                    self.tau_0.unwrap_or(0.0)
                } else {
                    0.0
                }
            }
            1 | 2 => self.tau[k - 1][lambda - 1],
            _ => panic!("mode index must be 0, 1 or 2, got {k}"),
        }
    }

    /// τ_{k,λ} for the photon-like modes k ∈ {1, 2}.
    pub fn tau(&self, k: usize, lambda: usize) -> f64 {
        assert!((1..=2).contains(&k) && (1..=2).contains(&lambda));
        self.tau[k - 1][lambda - 1]
    }

    /// τ_{k,λ}² − κ_s², cancellation-free.
    pub fn gap(&self, k: usize, lambda: usize, s: usize) -> f64 {
        self.gaps[k - 1][lambda - 1][s - 1]
    }

    /// The Landau-branch root τ₀ (`None` at ω = 0).
    pub fn tau_landau(&self) -> Option<f64> {
        self.tau_0
    }

    pub fn residual(&self, k: usize, lambda: usize) -> f64 {
        self.residuals[k - 1][lambda - 1]
    }

    pub fn tau_landau_residual(&self) -> f64 {
        self.tau_0_residual
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

/// Characteristic-function value for the magnetic equation at τ, with
/// σ = (−1)^(λ−1).
fn magnetic_char(params: &ModelParams, sigma: f64, tau: f64) -> f64 {
    let x = tau * tau;
    params.epsilon
        * (1.0 / (x - params.kappa_1 * params.kappa_1)
            + 1.0 / (x - params.kappa_2 * params.kappa_2))
        - 1.0
        - sigma * params.omega / tau
}

/// Substitution residual of the magnetic characteristic equation.
pub fn magnetic_residual(params: &ModelParams, lambda: usize, tau: f64) -> f64 {
    let sigma = if lambda == 1 { 1.0 } else { -1.0 };
    magnetic_char(params, sigma, tau).abs()
}

fn check_guard(params: &ModelParams, guard: f64) -> Result<()> {
    if params.omega == 0.0 {
        return Ok(());
    }
    for (s, kappa) in [(1usize, params.kappa_1), (2usize, params.kappa_2)] {
        if (params.omega - kappa).abs() / kappa < guard {
            return Err(Error::ResonanceGuard { s, omega: params.omega, kappa, guard });
        }
    }
    Ok(())
}

/// Solve one magnetic photon branch in the shifted variable d = τ − κ_k.
fn solve_magnetic_branch(
    params: &ModelParams,
    k: usize,
    lambda: usize,
) -> Result<(f64, [f64; 2], f64)> {
    let sigma = if lambda == 1 { 1.0 } else { -1.0 };
    let kappa = params.kappa(k);
    let kappa_other = params.kappa(3 - k);
    let eps = params.epsilon;
    let omega = params.omega;
    let delta = kappa * kappa - kappa_other * kappa_other;

    // gap_own(d) = d (2κ + d) stays exact near the pole.
    let f = |d: f64| {
        let gap = d * (2.0 * kappa + d);
        eps * (1.0 / gap + 1.0 / (gap + delta)) - 1.0 - sigma * omega / (kappa + d)
    };
    let df = |d: f64| {
        let gap = d * (2.0 * kappa + d);
        let dgap = 2.0 * kappa + 2.0 * d;
        -eps * dgap * (1.0 / (gap * gap) + 1.0 / ((gap + delta) * (gap + delta)))
            + sigma * omega / ((kappa + d) * (kappa + d))
    };

    // Branch side: the leading shift is (ϵ/2)/(κ + σω).
    let dir = if kappa + sigma * omega >= 0.0 { 1.0 } else { -1.0 };
    // Nearest wall in that direction: the other pole, τ = 0, or far away.
    let wall = if dir > 0.0 {
        if kappa_other > kappa { kappa_other - kappa } else { (kappa + omega) * 1e12 }
    } else if kappa_other < kappa {
        kappa_other - kappa
    } else {
        -kappa * (1.0 - 1e-9)
    };
    let start = dir * kappa * 1e-13;
    let bracket = solve::expand_bracket(&f, start, wall, start)
        .ok_or(Error::BracketFailure { k, lambda })?;
    let solved = solve::refine(&f, &df, bracket);
    let d = solved.root;
    let gap_own = d * (2.0 * kappa + d);
    let mut gaps = [0.0; 2];
    gaps[k - 1] = gap_own;
    gaps[2 - k] = gap_own + delta;
    let tau = kappa + d;
    Ok((tau, gaps, solved.residual))
}

/// Solve the Landau branch: the member of the λ = 2 family continuous with
/// τ₀(ϵ=0) = ω. The printed labeling assigns τ₀ to λ = 1, but that sign
/// variant has no positive root near ω; the branch is defined by continuity
/// and confirmed against the Fock-space oracle.
fn solve_landau_branch(params: &ModelParams) -> Result<(f64, f64)> {
    let eps = params.epsilon;
    let omega = params.omega;
    let f = |tau: f64| magnetic_char(params, -1.0, tau);
    let df = |tau: f64| {
        let x = tau * tau;
        let g1 = x - params.kappa_1 * params.kappa_1;
        let g2 = x - params.kappa_2 * params.kappa_2;
        -2.0 * tau * eps * (1.0 / (g1 * g1) + 1.0 / (g2 * g2)) + omega / (tau * tau)
    };

    let (k_lo, k_hi) = if params.kappa_1 <= params.kappa_2 {
        (params.kappa_1, params.kappa_2)
    } else {
        (params.kappa_2, params.kappa_1)
    };
    // Pole-free interval containing ω.
    let (w_lo, w_hi) = if omega < k_lo {
        (omega * 1e-12, k_lo)
    } else if omega < k_hi {
        (k_lo, k_hi)
    } else {
        (k_hi, (omega + k_hi) * 1e12)
    };
    let f_seed = f(omega);
    if f_seed == 0.0 {
        return Ok((omega, 0.0));
    }
    let step = (omega * 1e-9).max(f64::MIN_POSITIVE * 1e20);
    let bracket = solve::expand_bracket(&f, omega, w_hi, step)
        .or_else(|| solve::expand_bracket(&f, omega, w_lo, -step))
        .ok_or(Error::BracketFailure { k: 0, lambda: 1 })?;
    let solved = solve::refine(&f, &df, bracket);
    Ok((solved.root, solved.residual))
}

/// All magnetic quasi-photon roots. `guard` is the relative resonance guard
/// band around each κ_s (0.05 by default elsewhere).
pub fn magnetic_roots(params: &ModelParams, guard: f64) -> Result<MagneticRoots> {
    check_guard(params, guard)?;
    let mut tau = [[0.0; 2]; 2];
    let mut gaps = [[[0.0; 2]; 2]; 2];
    let mut residuals = [[0.0; 2]; 2];
    if params.epsilon == 0.0 {
        for k in 1..=2 {
            for lambda in 1..=2 {
                tau[k - 1][lambda - 1] = params.kappa(k);
                for s in 1..=2 {
                    gaps[k - 1][lambda - 1][s - 1] =
                        params.kappa(k) * params.kappa(k) - params.kappa(s) * params.kappa(s);
                }
            }
        }
        let tau_0 = if params.omega > 0.0 { Some(params.omega) } else { None };
        return Ok(MagneticRoots {
            omega: params.omega,
            tau,
            gaps,
            residuals,
            tau_0,
            tau_0_residual: 0.0,
        });
    }
    for k in 1..=2 {
        for lambda in 1..=2 {
            let (t, g, r) = solve_magnetic_branch(params, k, lambda)?;
            tau[k - 1][lambda - 1] = t;
            gaps[k - 1][lambda - 1] = g;
            residuals[k - 1][lambda - 1] = r;
        }
    }
    let (tau_0, tau_0_residual) = if params.omega > 0.0 {
        let (t, r) = solve_landau_branch(params)?;
        (Some(t), r)
    } else {
        (None, 0.0)
    };
    Ok(MagneticRoots { omega: params.omega, tau, gaps, residuals, tau_0, tau_0_residual })
}

/// First-order expansion τ_{k,λ} = κ_k + (ϵ/2)/(κ_k + (−1)^(λ−1) ω).
/// The Landau root is not available at this order.
pub fn magnetic_roots_asymptotic(params: &ModelParams) -> MagneticRoots {
    let mut tau = [[0.0; 2]; 2];
    let mut gaps = [[[0.0; 2]; 2]; 2];
    let mut residuals = [[0.0; 2]; 2];
    for k in 1..=2 {
        let kappa = params.kappa(k);
        for lambda in 1..=2 {
            let sigma = if lambda == 1 { 1.0 } else { -1.0 };
            let shift = 0.5 * params.epsilon / (kappa + sigma * params.omega);
            let t = kappa + shift;
            tau[k - 1][lambda - 1] = t;
            for s in 1..=2 {
                let ks = params.kappa(s);
                gaps[k - 1][lambda - 1][s - 1] = if s == k {
                    shift * (2.0 * kappa + shift)
                } else {
                    t * t - ks * ks
                };
            }
            residuals[k - 1][lambda - 1] = magnetic_residual(params, lambda, t);
        }
    }
    MagneticRoots {
        omega: params.omega,
        tau,
        gaps,
        residuals,
        tau_0: None,
        tau_0_residual: f64::NAN,
    }
}

/// Occupation numbers of the quasi-photon modes (and the Landau mode).
#[derive(Clone, Copy, Debug, Default)]
pub struct OccupationNumbers {
    /// n[s-1][λ-1].
    pub n: [[u32; 2]; 2],
    /// Landau-mode occupation (magnetic case only).
    pub n0: u32,
}

/// Electron-side kinematic inputs for the magnetic energy formulas.
#[derive(Clone, Copy, Debug, Default)]
pub struct ElectronKinematics {
    /// Electron mass in m⁻¹ (default 0; the entanglement pipeline never
    /// uses it).
    pub mass: f64,
    /// Longitudinal momentum p₃ in m⁻¹.
    pub p3: f64,
}

/// Energies of a quasi-photon configuration.
#[derive(Clone, Copy, Debug)]
pub struct Energies {
    /// E_ph = Σ τ N + H₀.
    pub e_ph: f64,
    /// Magnetic case: E_K = E_ph + τ₀N₀ + [m²/(np) + ω]/2.
    pub e_k: Option<f64>,
    /// Magnetic case: p₀² = eB (2 (τ₀/ω) N₀ + 1) + p₃² + m², requiring
    /// laboratory provenance for eB.
    pub p0_sq: Option<f64>,
}

/// Roots for either case.
pub enum RootsRef<'a> {
    Free(&'a FreeRoots),
    Magnetic(&'a MagneticRoots),
}

/// Quasi-photon energy spectrum evaluation.
pub fn quasiphoton_energy(
    roots: RootsRef<'_>,
    occ: &OccupationNumbers,
    params: &ModelParams,
    kin: &ElectronKinematics,
) -> Result<Energies> {
    match roots {
        RootsRef::Free(r) => {
            if occ.n0 > 0 {
                return Err(Error::Misuse(
                    "Landau occupation requested without magnetic roots".into(),
                ));
            }
            let mut e_ph = r.h0;
            for s in 1..=2 {
                for lambda in 1..=2 {
                    e_ph += r.tau(s) * f64::from(occ.n[s - 1][lambda - 1]);
                }
            }
            Ok(Energies { e_ph, e_k: None, p0_sq: None })
        }
        RootsRef::Magnetic(r) => {
            let tau_0 = r.tau_landau().unwrap_or(0.0);
            // Zero-point of the five-mode quadratic form relative to the
            // bare photon + cyclotron constants.
            let mut h0_mag = 0.5 * (tau_0 - params.omega);
            let mut e_ph = 0.0;
            for k in 1..=2 {
                for lambda in 1..=2 {
                    h0_mag += 0.5 * (r.tau(k, lambda) - params.kappa(k));
                    e_ph += r.tau(k, lambda) * f64::from(occ.n[k - 1][lambda - 1]);
                }
            }
            e_ph += h0_mag;
            let mass_term = if kin.mass == 0.0 {
                0.0
            } else {
                let np = provenance_np(params)?;
                kin.mass * kin.mass / np
            };
            let e_k = e_ph + tau_0 * f64::from(occ.n0) + 0.5 * (mass_term + params.omega);
            let p0_sq = if params.omega == 0.0 {
                Some(kin.p3 * kin.p3 + kin.mass * kin.mass)
            } else if let Some(input) = &params.provenance {
                let eb = params.omega * input.np;
                Some(
                    eb * (2.0 * (tau_0 / params.omega) * f64::from(occ.n0) + 1.0)
                        + kin.p3 * kin.p3
                        + kin.mass * kin.mass,
                )
            } else {
                None
            };
            Ok(Energies { e_ph, e_k: Some(e_k), p0_sq })
        }
    }
}

fn provenance_np(params: &ModelParams) -> Result<f64> {
    params
        .provenance
        .as_ref()
        .map(|p| p.np)
        .ok_or_else(|| Error::InsufficientData("np requires laboratory provenance".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn scaled(eps: f64) -> ModelParams {
        ModelParams::scaled(1.0, 2.0, eps, 0.0).unwrap()
    }

    #[test]
    fn closed_decoupling_limit() {
        let r = free_roots_closed(&scaled(0.0));
        assert_eq!(r.tau_1, 1.0);
        assert_eq!(r.tau_2, 2.0);
        assert_eq!(r.h0, 0.0);
    }

    #[test]
    fn closed_reference_point() {
        let r = free_roots_closed(&scaled(0.1));
        assert_relative_eq!(r.tau_1, 1.0472203, max_relative = 1e-7);
        assert_relative_eq!(r.tau_2, 2.0256678, max_relative = 1e-7);
        assert!(free_residual(&scaled(0.1), r.tau_1) < 1e-12);
        assert!(free_residual(&scaled(0.1), r.tau_2) < 1e-12);
        // sgn(B) = sgn(kappa_1 - kappa_2).
        assert!(r.b_disc < 0.0);
    }

    #[test]
    fn closed_swap_symmetry() {
        let p = ModelParams::scaled(1.3, 0.7, 0.05, 0.0).unwrap();
        let q = ModelParams::scaled(0.7, 1.3, 0.05, 0.0).unwrap();
        let rp = free_roots_closed(&p);
        let rq = free_roots_closed(&q);
        assert_eq!(rp.tau_1.to_bits(), rq.tau_2.to_bits());
        assert_eq!(rp.tau_2.to_bits(), rq.tau_1.to_bits());
    }

    #[test]
    fn numeric_matches_closed() {
        let p = scaled(0.1);
        let rn = free_roots_numeric(&p).unwrap();
        let rc = free_roots_closed(&p);
        assert_relative_eq!(rn.tau_1, rc.tau_1, max_relative = 1e-12);
        assert_relative_eq!(rn.tau_2, rc.tau_2, max_relative = 1e-12);
    }

    #[test]
    fn numeric_branch_continuity() {
        let mut prev = f64::INFINITY;
        for eps in [1e-3, 1e-6, 1e-9] {
            let r = free_roots_numeric(&scaled(eps)).unwrap();
            let dist = (r.tau_1 - 1.0).abs().max((r.tau_2 - 2.0).abs());
            assert!(dist < prev, "eps={eps}: {dist} !< {prev}");
            prev = dist;
        }
    }

    #[test]
    fn numeric_leading_order_at_reference_regime() {
        // At the published laboratory parameters the shift is ϵ/(2κ_s) to
        // leading order.
        let input = crate::params::reference_input(0.0);
        let p = crate::params::from_physical(&input).unwrap();
        let r = free_roots_numeric(&p).unwrap();
        for s in 1..=2 {
            let lead = p.epsilon / (2.0 * p.kappa(s));
            let shift = r.gap(s, s) / (r.tau(s) + p.kappa(s));
            assert_relative_eq!(shift, lead, max_relative = 2e-2);
        }
    }

    #[test]
    fn asymptotic_third_order_convergence() {
        // |r_s − τ_s| should scale as ϵ³: successive ratios near 10³ on a
        // decade grid.
        let mut errs = Vec::new();
        for eps in [1e-2, 1e-3, 1e-4] {
            let p = scaled(eps);
            let exact = free_roots_closed(&p);
            let asym = free_roots_asymptotic(&p);
            let e = (exact.tau_1 - asym.tau_1).abs().max((exact.tau_2 - asym.tau_2).abs());
            errs.push(e);
        }
        let slope = (errs[0] / errs[2]).log10() / 2.0;
        assert!((slope - 3.0).abs() < 0.2, "slope {slope}, errors {errs:?}");
    }

    #[test]
    fn asymptotic_first_order_normalization() {
        for eps in [1e-4, 1e-6] {
            let p = scaled(eps);
            let r = free_roots_asymptotic(&p);
            for s in 1..=2 {
                let shift = r.gap(s, s) / (r.tau(s) + p.kappa(s));
                let ratio = shift * 2.0 * p.kappa(s) / eps;
                assert_relative_eq!(ratio, 1.0, max_relative = 1e-3);
            }
        }
    }

    #[test]
    fn magnetic_branch_conditions() {
        let mut prev = f64::INFINITY;
        for eps in [1e-2, 1e-4, 1e-6] {
            let p = ModelParams::scaled(1.0, 2.0, eps, 0.3).unwrap();
            let r = magnetic_roots(&p, 0.05).unwrap();
            let mut dist: f64 = (r.tau_landau().unwrap() - 0.3).abs();
            for k in 1..=2 {
                for lambda in 1..=2 {
                    dist = dist.max((r.tau(k, lambda) - p.kappa(k)).abs());
                }
            }
            assert!(dist < prev, "eps={eps}: {dist} !< {prev}");
            prev = dist;
        }
    }

    #[test]
    fn magnetic_reduces_to_free_at_zero_field() {
        let p = ModelParams::scaled(1.0, 2.0, 0.07, 0.0).unwrap();
        let free = free_roots_numeric(&p).unwrap();
        let mag = magnetic_roots(&p, 0.05).unwrap();
        for k in 1..=2 {
            for lambda in 1..=2 {
                assert_relative_eq!(mag.tau(k, lambda), free.tau(k), max_relative = 1e-13);
            }
        }
        assert!(mag.tau_landau().is_none());
    }

    #[test]
    fn magnetic_matches_asymptotic_to_second_order() {
        let mut errs = Vec::new();
        for eps in [1e-2, 1e-3] {
            let p = ModelParams::scaled(1.0, 2.0, eps, 0.3).unwrap();
            let exact = magnetic_roots(&p, 0.05).unwrap();
            let asym = magnetic_roots_asymptotic(&p);
            let mut e: f64 = 0.0;
            for k in 1..=2 {
                for lambda in 1..=2 {
                    e = e.max((exact.tau(k, lambda) - asym.tau(k, lambda)).abs());
                }
            }
            errs.push(e);
        }
        let ratio = errs[0] / errs[1];
        assert!(
            (30.0..300.0).contains(&ratio),
            "expected O(ϵ²) error decay, got ratio {ratio} from {errs:?}"
        );
    }

    #[test]
    fn magnetic_asymptotic_orders_polarizations() {
        let p = ModelParams::scaled(1.0, 2.0, 1e-3, 0.3).unwrap();
        let r = magnetic_roots_asymptotic(&p);
        for k in 1..=2 {
            assert!(r.tau(k, 1) < r.tau(k, 2));
        }
        let p0 = ModelParams::scaled(1.0, 2.0, 1e-3, 0.0).unwrap();
        let r0 = magnetic_roots_asymptotic(&p0);
        for k in 1..=2 {
            assert_relative_eq!(
                r0.tau(k, 1),
                p0.kappa(k) + 1e-3 / (2.0 * p0.kappa(k)),
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn resonance_guard_trips() {
        let p = ModelParams::scaled(1.0, 2.0, 0.05, 1.01).unwrap();
        assert!(matches!(magnetic_roots(&p, 0.05), Err(Error::ResonanceGuard { s: 1, .. })));
    }

    #[test]
    fn landau_branch_above_both_wavenumbers() {
        let p = ModelParams::scaled(1.0, 2.0, 0.05, 3.0).unwrap();
        let r = magnetic_roots(&p, 0.05).unwrap();
        let tau0 = r.tau_landau().unwrap();
        assert!(tau0 > 2.0, "tau0 = {tau0}");
        assert!(magnetic_residual(&p, 2, tau0) < 1e-12);
    }

    #[test]
    fn vacuum_energy_is_h0() {
        let p = scaled(0.1);
        let r = free_roots_closed(&p);
        let e = quasiphoton_energy(
            RootsRef::Free(&r),
            &OccupationNumbers::default(),
            &p,
            &ElectronKinematics::default(),
        )
        .unwrap();
        assert_eq!(e.e_ph, r.h0);
        assert!(e.e_k.is_none());
    }

    #[test]
    fn energy_additivity() {
        let p = scaled(0.1);
        let r = free_roots_closed(&p);
        let occ = OccupationNumbers { n: [[0, 1], [1, 0]], n0: 0 };
        let e = quasiphoton_energy(
            RootsRef::Free(&r),
            &occ,
            &p,
            &ElectronKinematics::default(),
        )
        .unwrap();
        assert_relative_eq!(e.e_ph, r.tau_1 + r.tau_2 + r.h0, max_relative = 1e-15);
    }

    #[test]
    fn landau_occupation_without_magnetic_roots_is_misuse() {
        let p = scaled(0.1);
        let r = free_roots_closed(&p);
        let occ = OccupationNumbers { n: [[0; 2]; 2], n0: 1 };
        assert!(matches!(
            quasiphoton_energy(
                RootsRef::Free(&r),
                &occ,
                &p,
                &ElectronKinematics::default()
            ),
            Err(Error::Misuse(_))
        ));
    }

    #[test]
    fn p0_squared_with_provenance() {
        let input = crate::params::reference_input(0.05);
        let p = crate::params::from_physical(&input).unwrap();
        let r = magnetic_roots(&p, 0.05).unwrap();
        let occ = OccupationNumbers { n: [[0; 2]; 2], n0 : 2 };
        let kin = ElectronKinematics { mass: 0.0, p3: 1e6 };
        let e = quasiphoton_energy(RootsRef::Magnetic(&r), &occ, &p, &kin).unwrap();
        let eb = p.omega * input.np;
        let expected = eb * (2.0 * r.tau_landau().unwrap() / p.omega * 2.0 + 1.0) + 1e12;
        assert_relative_eq!(e.p0_sq.unwrap(), expected, max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn roots_agree_and_satisfy_equation(
            k1 in 0.5f64..2.5,
            dk in 0.1f64..1.5,
            eps in 1e-3f64..0.3,
        ) {
            let p = ModelParams::scaled(k1, k1 + dk, eps, 0.0).unwrap();
            let rc = free_roots_closed(&p);
            let rn = free_roots_numeric(&p).unwrap();
            prop_assert!((rc.tau_1 - rn.tau_1).abs() <= 1e-12 * rc.tau_1);
            prop_assert!((rc.tau_2 - rn.tau_2).abs() <= 1e-12 * rc.tau_2);
            for r in [&rc, &rn] {
                prop_assert!(free_residual(&p, r.tau_1) < 1e-12);
                prop_assert!(free_residual(&p, r.tau_2) < 1e-12);
                // τ₁² + τ₂² = 2A.
                prop_assert!(
                    (r.tau_1 * r.tau_1 + r.tau_2 * r.tau_2 - 2.0 * r.a_term).abs()
                        < 1e-12 * r.a_term
                );
            }
        }

        #[test]
        fn roots_increase_with_coupling(
            k1 in 0.5f64..2.5,
            dk in 0.1f64..1.5,
            eps in 1e-3f64..0.2,
        ) {
            let p_lo = ModelParams::scaled(k1, k1 + dk, eps, 0.0).unwrap();
            let p_hi = ModelParams::scaled(k1, k1 + dk, eps * 1.5, 0.0).unwrap();
            let r_lo = free_roots_closed(&p_lo);
            let r_hi = free_roots_closed(&p_hi);
            prop_assert!(r_hi.tau_1 > r_lo.tau_1);
            prop_assert!(r_hi.tau_2 > r_lo.tau_2);
        }

        // Power-of-two rescalings are exact in IEEE arithmetic, so scale
        // covariance can be asserted bitwise.
        #[test]
        fn scale_covariance_is_exact(exp in -8i32..8, eps in 1e-3f64..0.2) {
            let t = 2f64.powi(exp);
            let p = ModelParams::scaled(1.0, 2.0, eps, 0.0).unwrap();
            let q = ModelParams::scaled(t, 2.0 * t, eps * t * t, 0.0).unwrap();
            let rp = free_roots_closed(&p);
            let rq = free_roots_closed(&q);
            prop_assert_eq!((rp.tau_1 * t).to_bits(), rq.tau_1.to_bits());
            prop_assert_eq!((rp.tau_2 * t).to_bits(), rq.tau_2.to_bits());
            let np = free_roots_numeric(&p).unwrap();
            let nq = free_roots_numeric(&q).unwrap();
            prop_assert_eq!((np.tau_1 * t).to_bits(), nq.tau_1.to_bits());
            prop_assert_eq!((np.tau_2 * t).to_bits(), nq.tau_2.to_bits());
        }

        #[test]
        fn magnetic_residuals_below_tolerance(
            eps in 1e-3f64..0.2,
            omega in 0.0f64..0.8,
        ) {
            let p = ModelParams::scaled(1.0, 2.0, eps, omega).unwrap();
            let r = magnetic_roots(&p, 0.05).unwrap();
            for k in 1..=2 {
                for lambda in 1..=2 {
                    prop_assert!(magnetic_residual(&p, lambda, r.tau(k, lambda)) < 1e-12);
                }
            }
            if let Some(t0) = r.tau_landau() {
                prop_assert!(magnetic_residual(&p, 2, t0) < 1e-12);
            }
        }
    }
}
