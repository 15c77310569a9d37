//! Truncated multimode occupation basis.
//!
//! States are occupation tuples with per-mode occupation 0..=cutoff,
//! enumerated lexicographically with the first mode most significant:
//! index = Σ_i n_i (cutoff+1)^(modes−1−i).

use crate::{Error, Result};

/// Maximum mode count (Landau + four photon modes).
pub const MAX_MODES: usize = 5;

/// One oscillator mode of the truncated basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeLabel {
    /// Cyclotron (Landau) mode of the electron subsystem.
    Landau,
    /// Photon mode with frequency index s ∈ {1, 2} and linear polarization
    /// λ ∈ {1, 2}.
    Photon { s: u8, lambda: u8 },
}

/// Fixed-size occupation tuple (unused trailing slots stay 0).
pub type Occ = [usize; MAX_MODES];

#[derive(Clone, Debug)]
pub struct TruncatedBasis {
    modes: Vec<ModeLabel>,
    cutoff: usize,
    dim: usize,
    strides: Vec<usize>,
}

impl TruncatedBasis {
    fn new(modes: Vec<ModeLabel>, cutoff: usize, cap: usize) -> Result<Self> {
        let n_states = cutoff + 1;
        let mut dim = 1usize;
        for _ in &modes {
            dim = dim.checked_mul(n_states).ok_or(Error::DimensionCap { dim: usize::MAX, cap })?;
        }
        if dim > cap {
            return Err(Error::DimensionCap { dim, cap });
        }
        let mut strides = vec![0usize; modes.len()];
        let mut stride = 1usize;
        for i in (0..modes.len()).rev() {
            strides[i] = stride;
            stride *= n_states;
        }
        Ok(TruncatedBasis { modes, cutoff, dim, strides })
    }

    /// Four photon modes (s, λ) in the order (1,1), (1,2), (2,1), (2,2).
    pub fn free(cutoff: usize, cap: usize) -> Result<Self> {
        let modes = vec![
            ModeLabel::Photon { s: 1, lambda: 1 },
            ModeLabel::Photon { s: 1, lambda: 2 },
            ModeLabel::Photon { s: 2, lambda: 1 },
            ModeLabel::Photon { s: 2, lambda: 2 },
        ];
        Self::new(modes, cutoff, cap)
    }

    /// Landau mode first, then the four photon modes.
    pub fn magnetic(cutoff: usize, cap: usize) -> Result<Self> {
        let modes = vec![
            ModeLabel::Landau,
            ModeLabel::Photon { s: 1, lambda: 1 },
            ModeLabel::Photon { s: 1, lambda: 2 },
            ModeLabel::Photon { s: 2, lambda: 1 },
            ModeLabel::Photon { s: 2, lambda: 2 },
        ];
        Self::new(modes, cutoff, cap)
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Position of a mode label, if present.
    pub fn mode_position(&self, label: ModeLabel) -> Option<usize> {
        self.modes.iter().position(|m| *m == label)
    }

    pub fn index_of(&self, occ: &Occ) -> usize {
        let mut idx = 0;
        for (i, stride) in self.strides.iter().enumerate() {
            debug_assert!(occ[i] <= self.cutoff);
            idx += occ[i] * stride;
        }
        idx
    }

    pub fn occ_of(&self, index: usize) -> Occ {
        debug_assert!(index < self.dim);
        let mut occ = [0usize; MAX_MODES];
        let mut rest = index;
        for (i, stride) in self.strides.iter().enumerate() {
            occ[i] = rest / stride;
            rest %= stride;
        }
        occ
    }

    /// Total photon occupation of a state.
    pub fn photon_total(&self, occ: &Occ) -> usize {
        self.modes
            .iter()
            .enumerate()
            .filter(|(_, m)| matches!(m, ModeLabel::Photon { .. }))
            .map(|(i, _)| occ[i])
            .sum()
    }

    /// Landau occupation (0 for the free basis).
    pub fn landau_occ(&self, occ: &Occ) -> usize {
        self.mode_position(ModeLabel::Landau).map_or(0, |i| occ[i])
    }
}
