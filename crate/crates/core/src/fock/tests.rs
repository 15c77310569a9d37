use super::*;
use crate::entangle;
use crate::spectrum::{free_roots_closed, magnetic_roots};
use approx::assert_relative_eq;

fn scaled(eps: f64, omega: f64) -> ModelParams {
    ModelParams::scaled(1.0, 2.0, eps, omega).unwrap()
}

#[test]
fn free_hamiltonian_is_diagonal_without_coupling() {
    let p = scaled(0.0, 0.0);
    let op = build_hph(&p, 3).unwrap();
    assert_eq!(op.hermiticity_residual(), 0.0);
    for i in 0..op.dimension() {
        let occ = op.basis().occ_of(i);
        let expected = occ[0] as f64 + occ[1] as f64 + 2.0 * (occ[2] as f64 + occ[3] as f64);
        assert_eq!(op.entry(i, i), expected);
        let (cols, _) = op.csr.row(i);
        assert_eq!(cols.len(), usize::from(expected != 0.0));
    }
}

#[test]
fn hermiticity_and_sector_conservation() {
    let p = scaled(0.1, 0.0);
    let op = build_hph(&p, 4).unwrap();
    assert!(op.hermiticity_residual() < 1e-12);
    assert_eq!(op.cross_sector_leakage(), 0.0);

    let pm = scaled(0.05, 0.3);
    let opm = build_hk_magnetic(&pm, 3, &ElectronKinematics::default()).unwrap();
    assert!(opm.hermiticity_residual() < 1e-12);
    assert_eq!(opm.cross_sector_leakage(), 0.0);
}

#[test]
fn ground_state_approaches_zero_point_shift() {
    let p = scaled(0.1, 0.0);
    let op = build_hph(&p, 8).unwrap();
    let roots = free_roots_closed(&p);
    let lowest = op.lowest_eigenvalues(3);
    assert!(
        (lowest[0] - roots.h0).abs() < 1e-6,
        "ground state {} vs H0 {}",
        lowest[0],
        roots.h0
    );
    // First excitation gap equals τ₁ (doubly degenerate across λ).
    assert!((lowest[1] - lowest[0] - roots.tau_1).abs() < 1e-6);
    assert!((lowest[2] - lowest[0] - roots.tau_1).abs() < 1e-6);
}

#[test]
fn variational_monotonicity_in_cutoff() {
    let p = scaled(0.2, 0.0);
    let mut prev = f64::INFINITY;
    for cutoff in [2, 4, 6] {
        let op = build_hph(&p, cutoff).unwrap();
        let e0 = op.lowest_eigenvalues(1)[0];
        assert!(e0 <= prev + 1e-13, "cutoff {cutoff}: {e0} vs {prev}");
        prev = e0;
    }
}

#[test]
fn spectrum_check_is_exact_without_coupling() {
    let p = scaled(0.0, 0.0);
    let op = build_hph(&p, 4).unwrap();
    let roots = free_roots_closed(&p);
    let predicted = free_level_predictions(&p, &roots, 8);
    let report = spectrum_check(&op, &predicted, 8).unwrap();
    assert_eq!(report.max_abs_deviation, 0.0);
}

#[test]
fn spectrum_deviations_shrink_with_cutoff() {
    let p = scaled(0.1, 0.0);
    let roots = free_roots_closed(&p);
    let predicted = free_level_predictions(&p, &roots, 6);
    let mut devs = Vec::new();
    for cutoff in [4, 6] {
        let op = build_hph(&p, cutoff).unwrap();
        devs.push(spectrum_check(&op, &predicted, 6).unwrap().max_abs_deviation);
    }
    assert!(devs[1] < devs[0], "{devs:?}");
}

#[test]
fn magnetic_diagonal_without_coupling() {
    let p = scaled(0.0, 0.3);
    let op = build_hk_magnetic(&p, 3, &ElectronKinematics::default()).unwrap();
    for i in 0..op.dimension() {
        let occ = op.basis().occ_of(i);
        let expected = 0.3 * occ[0] as f64
            + occ[1] as f64
            + occ[2] as f64
            + 2.0 * (occ[3] as f64 + occ[4] as f64)
            + 0.15;
        assert_relative_eq!(op.entry(i, i), expected, max_relative = 1e-14);
    }
    // Landau ladder spacing ω.
    let lows = op.lowest_eigenvalues(3);
    assert_relative_eq!(lows[1] - lows[0], 0.3, max_relative = 1e-12);
}

#[test]
fn magnetic_zero_field_reproduces_free_spectrum() {
    let p = scaled(0.08, 0.0);
    let free = build_hph(&p, 3).unwrap();
    let mag = build_hk_magnetic(&p, 3, &ElectronKinematics::default()).unwrap();
    let free_lows = free.lowest_eigenvalues(4);
    let mag_lows = mag.lowest_eigenvalues(16);
    // Every free level appears in the magnetic spectrum (the decoupled
    // zero-frequency Landau mode adds degeneracy only).
    for f in &free_lows {
        let hit = mag_lows.iter().any(|m| (m - f).abs() < 1e-9);
        assert!(hit, "free level {f} missing from magnetic spectrum {mag_lows:?}");
    }
}

#[test]
fn magnetic_spacings_match_roots_and_landau_branch() {
    let p = scaled(0.05, 0.3);
    let op = build_hk_magnetic(&p, 4, &ElectronKinematics::default()).unwrap();
    let roots = magnetic_roots(&p, 0.05).unwrap();
    let lows = op.lowest_eigenvalues(2);
    let tau0 = roots.tau_landau().unwrap();
    let gap = lows[1] - lows[0];
    // The first excitation is the dressed Landau quantum τ₀, clearly
    // distinct from the bare ω.
    assert!((gap - tau0).abs() < 1e-4, "gap {gap} vs tau0 {tau0}");
    assert!((gap - tau0).abs() < (gap - p.omega).abs(), "branch must be dressed");

    // Level 3 carries three Landau quanta and is only loosely converged at
    // this cutoff; the other five levels are tight.
    let predicted =
        magnetic_level_predictions(&p, &roots, &ElectronKinematics::default(), 6).unwrap();
    let report = spectrum_check(&op, &predicted, 6).unwrap();
    for row in &report.rows {
        let tol = if row.level == 3 { 1e-2 } else { 1e-4 };
        assert!(row.deviation.abs() < tol, "{row:?}");
    }
}

#[test]
fn projection_recovers_bare_state_without_coupling() {
    let p = scaled(0.0, 0.0);
    let op = build_hph(&p, 3).unwrap();
    let rep =
        two_photon_projection(&op, ProjectionTarget::Free { lambda_1: 2, lambda_2: 1 }).unwrap();
    assert_eq!(rep.cluster_size, 2);
    assert_relative_eq!(rep.two_photon_weight, 1.0, max_relative = 1e-12);
    assert!(rep.remainder_norm < 1e-7);
    assert_relative_eq!(rep.amplitudes[2].re, 1.0, max_relative = 1e-12);
    for slot in [0, 1, 3] {
        assert!(rep.amplitudes[slot].norm() < 1e-9);
    }
}

#[test]
fn projection_amplitudes_match_analytic_ratio() {
    let p = scaled(0.1, 0.0);
    let op = build_hph(&p, 6).unwrap();
    let rep =
        two_photon_projection(&op, ProjectionTarget::Free { lambda_1: 2, lambda_2: 1 }).unwrap();
    let roots = free_roots_closed(&p);
    let coeffs = crate::bogoliubov::free_coeffs(&p, &roots);
    let state = entangle::free_state(&p, &roots, &coeffs, 2, 1);
    // θ₁ = a†_{1,1}a†_{2,2} sits in slot 1, θ₂ = a†_{1,2}a†_{2,1} in slot 2.
    let oracle_ratio = rep.amplitudes[1].re / rep.amplitudes[2].re;
    let analytic_ratio = state.v1 / state.v2;
    assert_relative_eq!(oracle_ratio, analytic_ratio, max_relative = 0.05);
    // Eigenvalue sits on the predicted level.
    assert!((rep.eigenvalue - rep.predicted).abs() < 1e-5);
}

#[test]
fn entanglement_oracle_separable_and_bell() {
    let sep = [Complex64::ONE, Complex64::ZERO, Complex64::ZERO, Complex64::ZERO];
    let r = entanglement_oracle(&sep).unwrap();
    assert_eq!(r.e, 0.0);
    assert_eq!(r.e_s, 0.0);

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bell = [
        Complex64::new(h, 0.0),
        Complex64::ZERO,
        Complex64::ZERO,
        Complex64::new(h, 0.0),
    ];
    let r = entanglement_oracle(&bell).unwrap();
    assert_relative_eq!(r.e, 1.0, max_relative = 1e-14);
    assert_relative_eq!(r.e_s, 0.5, max_relative = 1e-14);
}

#[test]
fn dimension_cap_guard() {
    let p = scaled(0.1, 0.0);
    assert!(matches!(
        build_hph_capped(&p, 20, 100_000),
        Err(Error::DimensionCap { .. })
    ));
}

#[test]
fn mismatched_projection_target_is_misuse() {
    let p = scaled(0.1, 0.0);
    let op = build_hph(&p, 3).unwrap();
    assert!(matches!(
        two_photon_projection(&op, ProjectionTarget::Magnetic { lambda_1: 2, lambda_2: 1 }),
        Err(Error::Misuse(_))
    ));
}
