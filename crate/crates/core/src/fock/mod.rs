//! Brute-force verification oracle: the model Hamiltonians assembled as
//! explicit matrices in a truncated multimode occupation basis and
//! diagonalized numerically.
//!
//! The free Hamiltonian
//!
//! ```text
//! H_ph = Σ_{s,λ} κ_s a†a + ½ Σ_λ [Σ_s √(ϵ/2κ_s) (a_{s,λ} + a†_{s,λ})]²
//! ```
//!
//! is real symmetric as it stands. The magnetic Hamiltonian couples the
//! Landau mode to the λ = 1 photons through positions and to the λ = 2
//! photons through the conjugate quadrature; a fixed phase rotation
//! a_{s,2} → −i a_{s,2} makes the whole operator real symmetric, and the
//! stored matrix is that rotated form. Amplitudes read out of its
//! eigenvectors are rotated back where it matters (the two-photon
//! projection).
//!
//! Matrix elements are those of the untruncated operator between retained
//! states (intermediate occupations above the cutoff are allowed inside a
//! product before the final projection), so the lowest eigenvalue is
//! variational in the cutoff.

pub mod basis;
mod eigen;

use num_complex::Complex64;

use crate::params::{ModelParams, DEFAULT_RESONANCE_GUARD};
use crate::spectrum::{
    self, ElectronKinematics, FreeRoots, MagneticRoots, OccupationNumbers, RootsRef,
};
use crate::twoqubit::EntanglementReport;
use crate::{Error, Result};
pub use basis::{ModeLabel, Occ, TruncatedBasis};
pub(crate) use eigen::DENSE_LIMIT;

/// Default cap on the truncated-basis dimension.
pub const DEFAULT_DIMENSION_CAP: usize = 100_000;

/// Which Hamiltonian an [`OperatorMatrix`] represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HamiltonianKind {
    /// Photon beam in the bare medium.
    FreeBeam,
    /// Photon beam in the medium with a constant magnetic field
    /// (stored in the phase-rotated real basis).
    MagneticBeam,
}

#[derive(Clone, Copy, Debug)]
enum Prim {
    /// a + a†
    APlus,
    /// a† − a
    AMinus,
    /// a†a
    Number,
}

struct Term {
    coeff: f64,
    factors: Vec<(usize, Prim)>,
}

/// Compressed sparse rows; the matrix is symmetric so rows double as
/// columns.
#[derive(Clone, Debug)]
struct Csr {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl Csr {
    fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[span.clone()], &self.vals[span])
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&(j as u32)) {
            Ok(pos) => vals[pos],
            Err(_) => 0.0,
        }
    }

    fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, out) in y.iter_mut().enumerate().take(self.dim) {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (c, v) in cols.iter().zip(vals) {
                acc += v * x[*c as usize];
            }
            *out = acc;
        }
    }
}

/// A model Hamiltonian in the truncated basis.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    kind: HamiltonianKind,
    params: ModelParams,
    basis: TruncatedBasis,
    csr: Csr,
    sector_codes: Vec<u8>,
}

fn coupling_g(params: &ModelParams, s: usize) -> f64 {
    (params.epsilon / (2.0 * params.kappa(s))).sqrt()
}

fn photon_mode(basis: &TruncatedBasis, s: u8, lambda: u8) -> usize {
    basis
        .mode_position(ModeLabel::Photon { s, lambda })
        .expect("photon mode present")
}

/// Conserved Z₂ labels: photon-polarization parities (free case) or the
/// overall occupation parity including the Landau mode (magnetic case).
fn sector_code(kind: HamiltonianKind, basis: &TruncatedBasis, occ: &Occ) -> u8 {
    match kind {
        HamiltonianKind::FreeBeam => {
            let mut p = [0usize; 2];
            for (i, mode) in basis.modes().iter().enumerate() {
                if let ModeLabel::Photon { lambda, .. } = mode {
                    p[*lambda as usize - 1] += occ[i];
                }
            }
            (((p[0] & 1) << 1) | (p[1] & 1)) as u8
        }
        HamiltonianKind::MagneticBeam => {
            let total: usize = occ[..basis.n_modes()].iter().sum();
            (total & 1) as u8
        }
    }
}

fn assemble(
    kind: HamiltonianKind,
    params: &ModelParams,
    basis: TruncatedBasis,
    terms: &[Term],
) -> OperatorMatrix {
    let dim = basis.dimension();
    let cutoff = basis.cutoff();
    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols: Vec<u32> = Vec::new();
    let mut vals: Vec<f64> = Vec::new();
    row_ptr.push(0);

    let mut scratch: Vec<(Occ, f64)> = Vec::with_capacity(8);
    let mut next: Vec<(Occ, f64)> = Vec::with_capacity(8);
    let mut row: Vec<(usize, f64)> = Vec::with_capacity(64);

    for i in 0..dim {
        let occ = basis.occ_of(i);
        row.clear();
        for term in terms {
            scratch.clear();
            scratch.push((occ, term.coeff));
            for (mode, prim) in &term.factors {
                next.clear();
                for (state, amp) in scratch.iter() {
                    let n = state[*mode];
                    match prim {
                        Prim::APlus => {
                            if n > 0 {
                                let mut s = *state;
                                s[*mode] = n - 1;
                                next.push((s, amp * (n as f64).sqrt()));
                            }
                            let mut s = *state;
                            s[*mode] = n + 1;
                            next.push((s, amp * ((n + 1) as f64).sqrt()));
                        }
                        Prim::AMinus => {
                            if n > 0 {
                                let mut s = *state;
                                s[*mode] = n - 1;
                                next.push((s, -amp * (n as f64).sqrt()));
                            }
                            let mut s = *state;
                            s[*mode] = n + 1;
                            next.push((s, amp * ((n + 1) as f64).sqrt()));
                        }
                        Prim::Number => {
                            if n > 0 {
                                next.push((*state, amp * n as f64));
                            }
                        }
                    }
                }
                std::mem::swap(&mut scratch, &mut next);
            }
            for (state, amp) in scratch.iter() {
                if state[..basis.n_modes()].iter().all(|&n| n <= cutoff) {
                    row.push((basis.index_of(state), *amp));
                }
            }
        }
        row.sort_unstable_by_key(|(j, _)| *j);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
        for (j, v) in row.iter() {
            match merged.last_mut() {
                Some((jm, vm)) if jm == j => *vm += v,
                _ => merged.push((*j, *v)),
            }
        }
        for (j, v) in merged {
            if v != 0.0 {
                cols.push(j as u32);
                vals.push(v);
            }
        }
        row_ptr.push(cols.len());
    }

    let sector_codes: Vec<u8> =
        (0..dim).map(|i| sector_code(kind, &basis, &basis.occ_of(i))).collect();
    OperatorMatrix {
        kind,
        params: params.clone(),
        basis,
        csr: Csr { dim, row_ptr, cols, vals },
        sector_codes,
    }
}

/// Free Hamiltonian in the four-photon-mode basis.
pub fn build_hph(params: &ModelParams, cutoff: usize) -> Result<OperatorMatrix> {
    build_hph_capped(params, cutoff, DEFAULT_DIMENSION_CAP)
}

pub fn build_hph_capped(
    params: &ModelParams,
    cutoff: usize,
    cap: usize,
) -> Result<OperatorMatrix> {
    if cutoff < 2 {
        return Err(Error::Misuse("cutoff must be at least 2".into()));
    }
    params.check()?;
    let basis = TruncatedBasis::free(cutoff, cap)?;
    let mut terms = Vec::new();
    for s in 1..=2u8 {
        let g = coupling_g(params, s as usize);
        for lambda in 1..=2u8 {
            let m = photon_mode(&basis, s, lambda);
            terms.push(Term {
                coeff: params.kappa(s as usize),
                factors: vec![(m, Prim::Number)],
            });
            terms.push(Term { coeff: 0.5 * g * g, factors: vec![(m, Prim::APlus), (m, Prim::APlus)] });
        }
    }
    let g1g2 = coupling_g(params, 1) * coupling_g(params, 2);
    for lambda in 1..=2u8 {
        let m1 = photon_mode(&basis, 1, lambda);
        let m2 = photon_mode(&basis, 2, lambda);
        terms.push(Term { coeff: g1g2, factors: vec![(m1, Prim::APlus), (m2, Prim::APlus)] });
    }
    Ok(assemble(HamiltonianKind::FreeBeam, params, basis, &terms))
}

/// Magnetic Hamiltonian in the five-mode basis (phase-rotated to a real
/// symmetric matrix). The electron mass enters only through the constant
/// m²/(2 np) and needs laboratory provenance when nonzero.
pub fn build_hk_magnetic(
    params: &ModelParams,
    cutoff: usize,
    kin: &ElectronKinematics,
) -> Result<OperatorMatrix> {
    build_hk_magnetic_capped(params, cutoff, kin, DEFAULT_DIMENSION_CAP)
}

pub fn build_hk_magnetic_capped(
    params: &ModelParams,
    cutoff: usize,
    kin: &ElectronKinematics,
    cap: usize,
) -> Result<OperatorMatrix> {
    if cutoff < 2 {
        return Err(Error::Misuse("cutoff must be at least 2".into()));
    }
    params.check()?;
    let mass_const = if kin.mass == 0.0 {
        0.0
    } else {
        let np = params
            .provenance
            .as_ref()
            .map(|p| p.np)
            .ok_or_else(|| Error::InsufficientData("mass term requires laboratory np".into()))?;
        kin.mass * kin.mass / (2.0 * np)
    };
    let basis = TruncatedBasis::magnetic(cutoff, cap)?;
    let landau = basis.mode_position(ModeLabel::Landau).expect("landau mode");
    let omega = params.omega;
    let mut terms = vec![
        Term { coeff: omega, factors: vec![(landau, Prim::Number)] },
        Term { coeff: 0.5 * omega + mass_const, factors: vec![] },
    ];
    for s in 1..=2u8 {
        let g = coupling_g(params, s as usize);
        let m1 = photon_mode(&basis, s, 1);
        let m2 = photon_mode(&basis, s, 2);
        for m in [m1, m2] {
            terms.push(Term {
                coeff: params.kappa(s as usize),
                factors: vec![(m, Prim::Number)],
            });
        }
        // Landau couplings: position to λ = 1, conjugate quadrature to λ = 2.
        let c = (0.5 * omega).sqrt() * g;
        terms.push(Term { coeff: -c, factors: vec![(landau, Prim::APlus), (m1, Prim::APlus)] });
        terms.push(Term { coeff: -c, factors: vec![(landau, Prim::AMinus), (m2, Prim::AMinus)] });
        // Medium terms.
        terms.push(Term { coeff: 0.5 * g * g, factors: vec![(m1, Prim::APlus), (m1, Prim::APlus)] });
        terms.push(Term {
            coeff: -0.5 * g * g,
            factors: vec![(m2, Prim::AMinus), (m2, Prim::AMinus)],
        });
    }
    let g1g2 = coupling_g(params, 1) * coupling_g(params, 2);
    terms.push(Term {
        coeff: g1g2,
        factors: vec![
            (photon_mode(&basis, 1, 1), Prim::APlus),
            (photon_mode(&basis, 2, 1), Prim::APlus),
        ],
    });
    terms.push(Term {
        coeff: -g1g2,
        factors: vec![
            (photon_mode(&basis, 1, 2), Prim::AMinus),
            (photon_mode(&basis, 2, 2), Prim::AMinus),
        ],
    });
    Ok(assemble(HamiltonianKind::MagneticBeam, params, basis, &terms))
}

impl OperatorMatrix {
    pub fn kind(&self) -> HamiltonianKind {
        self.kind
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn basis(&self) -> &TruncatedBasis {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.csr.dim
    }

    /// Matrix element H[i][j].
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.csr.entry(i, j)
    }

    /// max |H[i][j] − H[j][i]| over stored entries.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.csr.dim {
            let (cols, vals) = self.csr.row(i);
            for (c, v) in cols.iter().zip(vals) {
                let j = *c as usize;
                if j >= i {
                    worst = worst.max((v - self.csr.entry(j, i)).abs());
                }
            }
        }
        worst
    }

    /// Conserved-sector label of a basis state.
    pub fn sector_code_of(&self, index: usize) -> u8 {
        self.sector_codes[index]
    }

    /// Basis indices grouped by sector code, ascending.
    pub fn sectors(&self) -> Vec<(u8, Vec<usize>)> {
        let n_codes = match self.kind {
            HamiltonianKind::FreeBeam => 4,
            HamiltonianKind::MagneticBeam => 2,
        };
        let mut groups: Vec<(u8, Vec<usize>)> =
            (0..n_codes).map(|c| (c as u8, Vec::new())).collect();
        for (i, code) in self.sector_codes.iter().enumerate() {
            groups[*code as usize].1.push(i);
        }
        groups
    }

    /// max |H[i][j]| between states of different sectors (exactly zero for
    /// a correct assembly).
    pub fn cross_sector_leakage(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.csr.dim {
            let (cols, vals) = self.csr.row(i);
            for (c, v) in cols.iter().zip(vals) {
                if self.sector_codes[*c as usize] != self.sector_codes[i] {
                    worst = worst.max(v.abs());
                }
            }
        }
        worst
    }

    fn block_csr(&self, indices: &[usize]) -> Csr {
        let mut pos = vec![u32::MAX; self.csr.dim];
        for (p, &i) in indices.iter().enumerate() {
            pos[i] = p as u32;
        }
        let mut row_ptr = Vec::with_capacity(indices.len() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for &i in indices {
            let (rc, rv) = self.csr.row(i);
            for (c, v) in rc.iter().zip(rv) {
                let p = pos[*c as usize];
                if p != u32::MAX {
                    cols.push(p);
                    vals.push(*v);
                }
            }
            row_ptr.push(cols.len());
        }
        Csr { dim: indices.len(), row_ptr, cols, vals }
    }

    /// Lowest eigenpairs of one sector block. Dense up to
    /// [`DENSE_LIMIT`], Lanczos beyond.
    fn block_eigenpairs(&self, indices: &[usize], k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        let block = self.block_csr(indices);
        let n = block.dim;
        if n == 0 {
            return (Vec::new(), Vec::new());
        }
        if n <= DENSE_LIMIT {
            let mut dense = faer::Mat::<f64>::zeros(n, n);
            for i in 0..n {
                let (cols, vals) = block.row(i);
                for (c, v) in cols.iter().zip(vals) {
                    dense[(i, *c as usize)] = *v;
                }
            }
            let (vals, vecs) = eigen::eigh_dense(&dense);
            let k_eff = k.min(n);
            let out_vecs = (0..k_eff)
                .map(|j| (0..n).map(|i| vecs[(i, j)]).collect::<Vec<f64>>())
                .collect();
            (vals[..k_eff].to_vec(), out_vecs)
        } else {
            let apply = |x: &[f64], y: &mut [f64]| block.matvec(x, y);
            let steps = (3 * k + 120).min(n);
            eigen::lanczos_lowest(&apply, n, k, steps)
        }
    }

    /// Lowest `n` eigenvalues of the full operator, merged across sectors.
    pub fn lowest_eigenvalues(&self, n: usize) -> Vec<f64> {
        let mut all = Vec::new();
        for (_, indices) in self.sectors() {
            if indices.is_empty() {
                continue;
            }
            let (vals, _) = self.block_eigenpairs(&indices, n.min(indices.len()));
            all.extend(vals);
        }
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        all.truncate(n);
        all
    }

    /// Phase factor mapping a rotated-basis amplitude back to the original
    /// basis (identity for the free Hamiltonian).
    fn original_phase(&self, occ: &Occ) -> Complex64 {
        match self.kind {
            HamiltonianKind::FreeBeam => Complex64::ONE,
            HamiltonianKind::MagneticBeam => {
                let mut p = 0usize;
                for (i, mode) in self.basis.modes().iter().enumerate() {
                    if matches!(mode, ModeLabel::Photon { lambda: 2, .. }) {
                        p += occ[i];
                    }
                }
                // (−i)^p
                match p % 4 {
                    0 => Complex64::ONE,
                    1 => Complex64::new(0.0, -1.0),
                    2 => Complex64::new(-1.0, 0.0),
                    _ => Complex64::new(0.0, 1.0),
                }
            }
        }
    }
}

/// One row of a spectrum comparison.
#[derive(Clone, Copy, Debug)]
pub struct SpectrumRow {
    pub level: usize,
    pub predicted: f64,
    pub observed: f64,
    pub deviation: f64,
}

/// Result of comparing oracle eigenvalues against Σ τN + const
/// predictions.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub cutoff: usize,
    pub rows: Vec<SpectrumRow>,
    pub max_abs_deviation: f64,
}

/// Compare the lowest `n_levels` oracle eigenvalues with analytic
/// predictions. Both lists are sorted, so degenerate levels are matched as
/// multisets.
pub fn spectrum_check(
    op: &OperatorMatrix,
    predicted: &[f64],
    n_levels: usize,
) -> Result<SpectrumReport> {
    if n_levels > predicted.len() {
        return Err(Error::Misuse(format!(
            "{} predicted levels provided, {} requested",
            predicted.len(),
            n_levels
        )));
    }
    if n_levels * 8 > op.dimension() {
        return Err(Error::Misuse(
            "requested level count is not small against the basis dimension".into(),
        ));
    }
    let observed = op.lowest_eigenvalues(n_levels);
    let mut sorted = predicted.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut rows = Vec::with_capacity(n_levels);
    let mut max_abs: f64 = 0.0;
    for (level, (&p, &o)) in sorted.iter().zip(&observed).enumerate() {
        let deviation = o - p;
        max_abs = max_abs.max(deviation.abs());
        rows.push(SpectrumRow { level, predicted: p, observed: o, deviation });
    }
    Ok(SpectrumReport { cutoff: op.basis().cutoff(), rows, max_abs_deviation: max_abs })
}

/// Lowest `n` analytic free-case levels Σ τ N + H₀ (untruncated model).
pub fn free_level_predictions(
    params: &ModelParams,
    roots: &FreeRoots,
    n: usize,
) -> Vec<f64> {
    let max_q = n;
    let mut levels = Vec::new();
    for n11 in 0..=max_q {
        for n12 in 0..=max_q - n11 {
            for n21 in 0..=max_q - n11 - n12 {
                for n22 in 0..=max_q - n11 - n12 - n21 {
                    let occ = OccupationNumbers {
                        n: [[n11 as u32, n12 as u32], [n21 as u32, n22 as u32]],
                        n0: 0,
                    };
                    let e = spectrum::quasiphoton_energy(
                        RootsRef::Free(roots),
                        &occ,
                        params,
                        &ElectronKinematics::default(),
                    )
                    .expect("free energy");
                    levels.push(e.e_ph);
                }
            }
        }
    }
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels.truncate(n);
    levels
}

/// Lowest `n` analytic magnetic levels E_K (full operator eigenvalues).
pub fn magnetic_level_predictions(
    params: &ModelParams,
    roots: &MagneticRoots,
    kin: &ElectronKinematics,
    n: usize,
) -> Result<Vec<f64>> {
    let max_q = n;
    let mut levels = Vec::new();
    for n0 in 0..=max_q {
        for n11 in 0..=max_q - n0 {
            for n12 in 0..=max_q - n0 - n11 {
                for n21 in 0..=max_q - n0 - n11 - n12 {
                    for n22 in 0..=max_q - n0 - n11 - n12 - n21 {
                        let occ = OccupationNumbers {
                            n: [[n11 as u32, n12 as u32], [n21 as u32, n22 as u32]],
                            n0: n0 as u32,
                        };
                        let e = spectrum::quasiphoton_energy(
                            RootsRef::Magnetic(roots),
                            &occ,
                            params,
                            kin,
                        )?;
                        levels.push(e.e_k.expect("magnetic energy"));
                    }
                }
            }
        }
    }
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels.truncate(n);
    Ok(levels)
}

/// Which dressed two-quasi-photon state to project.
#[derive(Clone, Copy, Debug)]
pub enum ProjectionTarget {
    Free { lambda_1: usize, lambda_2: usize },
    Magnetic { lambda_1: usize, lambda_2: usize },
}

/// Two-photon content of a dressed eigenvector.
#[derive(Clone, Debug)]
pub struct ProjectionReport {
    pub eigenvalue: f64,
    pub predicted: f64,
    /// Number of eigenvalues merged into the degenerate target cluster.
    pub cluster_size: usize,
    /// Normalized cross-frequency amplitudes on a†_{1,λ} a†_{2,λ'} |0⟩,
    /// indexed by 2(λ−1) + (λ'−1), in the original (unrotated) basis with
    /// the bare-target amplitude made real positive.
    pub amplitudes: [Complex64; 4],
    /// Squared weight of the cross-frequency two-photon component.
    pub cross_weight: f64,
    /// Squared weight of same-frequency two-photon components (the terms
    /// the analytic route truncates).
    pub same_frequency_weight: f64,
    /// Squared weight of the full two-photon subspace.
    pub two_photon_weight: f64,
    /// Squared weight of components with an excited Landau mode
    /// (0 for the free case).
    pub landau_weight: f64,
    /// ‖(1 − P₂)ψ‖: the norm of the many-photon remainder.
    pub remainder_norm: f64,
}

const CLUSTER_REL_TOL: f64 = 1e-8;

/// Locate the dressed eigenvector continuous with the bare two-photon
/// state, project it onto the two-photon subspace and report the
/// amplitudes and the discarded weight.
pub fn two_photon_projection(
    op: &OperatorMatrix,
    target: ProjectionTarget,
) -> Result<ProjectionReport> {
    let params = op.params();
    let (lambda_1, lambda_2, predicted) = match (op.kind(), target) {
        (HamiltonianKind::FreeBeam, ProjectionTarget::Free { lambda_1, lambda_2 }) => {
            let roots = spectrum::free_roots_closed(params);
            (lambda_1, lambda_2, roots.tau_1 + roots.tau_2 + roots.h0)
        }
        (HamiltonianKind::MagneticBeam, ProjectionTarget::Magnetic { lambda_1, lambda_2 }) => {
            let roots = spectrum::magnetic_roots(params, DEFAULT_RESONANCE_GUARD)?;
            let mut occ = OccupationNumbers::default();
            occ.n[0][lambda_1 - 1] = 1;
            occ.n[1][lambda_2 - 1] = 1;
            let e = spectrum::quasiphoton_energy(
                RootsRef::Magnetic(&roots),
                &occ,
                params,
                &ElectronKinematics::default(),
            )?;
            (lambda_1, lambda_2, e.e_k.expect("magnetic energy"))
        }
        _ => {
            return Err(Error::Misuse(
                "projection target does not match the operator kind".into(),
            ))
        }
    };
    assert!((1..=2).contains(&lambda_1) && (1..=2).contains(&lambda_2));
    let basis = op.basis();

    // Bare target a†_{1,λ₁} a†_{2,λ₂} |0⟩.
    let mut bare = [0usize; basis::MAX_MODES];
    bare[photon_mode(basis, 1, lambda_1 as u8)] += 1;
    bare[photon_mode(basis, 2, lambda_2 as u8)] += 1;
    let bare_idx = basis.index_of(&bare);
    let code = op.sector_code_of(bare_idx);
    let indices: Vec<usize> = (0..op.dimension())
        .filter(|&i| op.sector_codes[i] == code)
        .collect();
    let bare_pos = indices.binary_search(&bare_idx).expect("bare state in its own sector");

    // The target eigenvalue sits a handful of levels up; ask for enough
    // eigenpairs to cover it with margin when the block is iterative.
    let k = if indices.len() <= DENSE_LIMIT { indices.len() } else { 64 };
    let (vals, vecs) = op.block_eigenpairs(&indices, k);
    if vals.is_empty() || *vals.last().unwrap() < predicted {
        return Err(Error::AmbiguousSector(
            "computed spectrum window does not reach the target level".into(),
        ));
    }

    // Nearest eigenvalue, then merge its degenerate cluster.
    let nearest = vals
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            (*a - predicted).abs().partial_cmp(&(*b - predicted).abs()).unwrap()
        })
        .map(|(i, _)| i)
        .expect("nonempty spectrum");
    let scale = vals[nearest].abs().max(1.0);
    let cluster: Vec<usize> = (0..vals.len())
        .filter(|&i| (vals[i] - vals[nearest]).abs() <= CLUSTER_REL_TOL * scale)
        .collect();
    if cluster.len() > 2 {
        return Err(Error::AmbiguousSector(format!(
            "{} eigenvalues merge at the target level",
            cluster.len()
        )));
    }

    // Project the bare state onto the cluster eigenspace.
    let coeffs: Vec<f64> = cluster.iter().map(|&i| vecs[i][bare_pos]).collect();
    let overlap_sq: f64 = coeffs.iter().map(|c| c * c).sum();
    if overlap_sq < 0.1 {
        return Err(Error::AmbiguousSector(format!(
            "bare-state overlap with the candidate eigenspace is only {overlap_sq:.3}"
        )));
    }
    let mut psi = vec![0.0f64; indices.len()];
    for (c, &ci) in coeffs.iter().zip(&cluster) {
        for (p, v) in psi.iter_mut().zip(&vecs[ci]) {
            *p += c * v;
        }
    }
    if cluster.len() == 2 {
        // Anti-parallel targets come in exactly degenerate pairs related by
        // the polarization-relabeling symmetry R (λ = 1 ↔ 2 on every
        // mode), so the projection of the bare state carries an admixture
        // of the partner eigenvector. R commutes with the free
        // Hamiltonian; the dressed target is recovered exactly by
        // rebalancing the R-even and R-odd parts of the projection to
        // equal weights.
        if op.kind() != HamiltonianKind::FreeBeam {
            return Err(Error::AmbiguousSector(
                "degenerate magnetic target level cannot be disambiguated".into(),
            ));
        }
        let relabel: Vec<usize> = indices
            .iter()
            .map(|&full| {
                let occ = basis.occ_of(full);
                let mut swapped = [0usize; basis::MAX_MODES];
                for (i, mode) in basis.modes().iter().enumerate() {
                    let target = match mode {
                        ModeLabel::Landau => i,
                        ModeLabel::Photon { s, lambda } => {
                            let other = ModeLabel::Photon { s: *s, lambda: 3 - *lambda };
                            basis.mode_position(other).expect("partner mode")
                        }
                    };
                    swapped[target] = occ[i];
                }
                let full_swapped = basis.index_of(&swapped);
                indices
                    .binary_search(&full_swapped)
                    .expect("relabeled state stays in the sector")
            })
            .collect();
        let mut even = vec![0.0f64; psi.len()];
        let mut odd = vec![0.0f64; psi.len()];
        for (p, &r) in relabel.iter().enumerate() {
            even[p] = 0.5 * (psi[p] + psi[r]);
            odd[p] = 0.5 * (psi[p] - psi[r]);
        }
        let ne: f64 = even.iter().map(|x| x * x).sum::<f64>().sqrt();
        let no: f64 = odd.iter().map(|x| x * x).sum::<f64>().sqrt();
        if ne < 1e-8 || no < 1e-8 {
            return Err(Error::AmbiguousSector(
                "projected state lost one symmetry component".into(),
            ));
        }
        let half = std::f64::consts::FRAC_1_SQRT_2;
        for ((p, e), o) in psi.iter_mut().zip(&even).zip(&odd) {
            *p = half * (e / ne) + half * (o / no);
        }
    } else {
        let inv = 1.0 / overlap_sq.sqrt();
        for p in psi.iter_mut() {
            *p *= inv;
        }
    }

    // Classify weights and extract the four cross-frequency amplitudes.
    let mut cross_weight = 0.0;
    let mut same_frequency_weight = 0.0;
    let mut landau_weight = 0.0;
    let mut amplitudes = [Complex64::ZERO; 4];
    for (pos, &full_idx) in indices.iter().enumerate() {
        let occ = basis.occ_of(full_idx);
        if basis.landau_occ(&occ) != 0 {
            landau_weight += psi[pos] * psi[pos];
            continue;
        }
        if basis.photon_total(&occ) != 2 {
            continue;
        }
        let mut per_freq = [0usize; 2];
        for (i, mode) in basis.modes().iter().enumerate() {
            if let ModeLabel::Photon { s, .. } = mode {
                per_freq[*s as usize - 1] += occ[i];
            }
        }
        let w = psi[pos] * psi[pos];
        if per_freq == [1, 1] {
            cross_weight += w;
            let l1 = (1..=2u8)
                .find(|l| occ[photon_mode(basis, 1, *l)] == 1)
                .expect("one photon at frequency 1");
            let l2 = (1..=2u8)
                .find(|l| occ[photon_mode(basis, 2, *l)] == 1)
                .expect("one photon at frequency 2");
            let slot = 2 * (l1 as usize - 1) + (l2 as usize - 1);
            amplitudes[slot] = op.original_phase(&occ) * psi[pos];
        } else {
            same_frequency_weight += w;
        }
    }
    let two_photon_weight = cross_weight + same_frequency_weight;
    let remainder_norm = (1.0 - two_photon_weight).max(0.0).sqrt();

    // Normalize over the cross block and fix the global phase on the bare
    // target amplitude.
    let cross_norm = cross_weight.sqrt();
    if cross_norm > 0.0 {
        for a in &mut amplitudes {
            *a /= cross_norm;
        }
    }
    let anchor = amplitudes[2 * (lambda_1 - 1) + (lambda_2 - 1)];
    if anchor.norm() > 1e-12 {
        let phase = anchor / anchor.norm();
        for a in &mut amplitudes {
            *a /= phase;
        }
    }

    Ok(ProjectionReport {
        eigenvalue: vals[nearest],
        predicted,
        cluster_size: cluster.len(),
        amplitudes,
        cross_weight,
        same_frequency_weight,
        two_photon_weight,
        landau_weight,
        remainder_norm,
    })
}

/// Ground-truth entanglement of four cross-frequency amplitudes: explicit
/// density matrix, index-summed partial trace over the second photon,
/// characteristic-polynomial eigenvalues. Independent of the `twoqubit`
/// pipeline.
pub fn entanglement_oracle(amplitudes: &[Complex64; 4]) -> Result<EntanglementReport> {
    let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if (norm_sq - 1.0).abs() > 1e-9 {
        return Err(Error::Unnormalized { norm_sq });
    }
    let inv = 1.0 / norm_sq.sqrt();
    let v: Vec<Complex64> = amplitudes.iter().map(|a| a * inv).collect();
    let mut rho4 = [[Complex64::ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            rho4[i][j] = v[i] * v[j].conj();
        }
    }
    let mut rho_a = [[Complex64::ZERO; 2]; 2];
    for a in 0..2 {
        for ap in 0..2 {
            for b in 0..2 {
                rho_a[a][ap] += rho4[2 * a + b][2 * ap + b];
            }
        }
    }
    let tr = rho_a[0][0].re + rho_a[1][1].re;
    let det = rho_a[0][0].re * rho_a[1][1].re - rho_a[0][1].norm_sqr();
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    let lambda = [
        (0.5 * (tr - disc)).clamp(0.0, 1.0),
        (0.5 * (tr + disc)).clamp(0.0, 1.0),
    ];
    let e = -lambda
        .iter()
        .filter(|l| **l > 0.0)
        .map(|l| l * l.log2())
        .sum::<f64>();
    let e_s = 1.0 - lambda[0] * lambda[0] - lambda[1] * lambda[1];
    Ok(EntanglementReport { y: disc.clamp(0.0, 1.0), lambda, e: e.max(0.0), e_s: e_s.max(0.0) })
}

#[cfg(test)]
mod tests;
