//! Laboratory inputs and their conversion to the scaled model parameters.
//!
//! Everything downstream works in inverse meters (ħ = c = 1):
//!
//! - wavenumbers `κ_s = 2π/ν_s`,
//! - coupling `ϵ = α ρ / (np)` in m⁻²,
//! - cyclotron parameter `ω = (e/ħ) B / (np)` in m⁻¹.

use crate::{Error, Result};

/// Conversion constant e/ħ in m⁻² T⁻¹ (ħ = c = 1 unit system).
pub const E_OVER_HBAR: f64 = 1.519268e15;

/// Default fine-structure constant.
pub const ALPHA_DEFAULT: f64 = 1.0 / 137.0;

/// Default relative half-width of the excluded neighborhood of ω = κ_s.
pub const DEFAULT_RESONANCE_GUARD: f64 = 0.05;

/// Laboratory description of the beam and the medium.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalInput {
    /// Wavelength of the first photon (m).
    pub wavelength_1: f64,
    /// Wavelength of the second photon (m).
    pub wavelength_2: f64,
    /// Magnetic flux density along the beam (T).
    pub magnetic_field: f64,
    /// Light-cone momentum np = p₀ + p₃ of the medium electrons (m⁻¹).
    pub np: f64,
    /// Electron number density ρ (m⁻³).
    pub electron_density: f64,
    /// Fine-structure constant.
    pub alpha: f64,
}

impl PhysicalInput {
    fn check(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        let non_negative = |x: f64| x.is_finite() && x >= 0.0;
        if !positive(self.wavelength_1) || !positive(self.wavelength_2) {
            return Err(Error::InvalidInput(format!(
                "wavelengths must be positive, got {} and {}",
                self.wavelength_1, self.wavelength_2
            )));
        }
        if self.wavelength_1 == self.wavelength_2 {
            return Err(Error::DegenerateWavelengths(
                2.0 * std::f64::consts::PI / self.wavelength_1,
            ));
        }
        if !positive(self.np) {
            return Err(Error::InvalidInput(format!("np must be positive, got {}", self.np)));
        }
        if !non_negative(self.electron_density) {
            return Err(Error::InvalidInput(format!(
                "electron density must be non-negative, got {}",
                self.electron_density
            )));
        }
        if !non_negative(self.magnetic_field) {
            return Err(Error::InvalidInput(format!(
                "magnetic field must be non-negative, got {}",
                self.magnetic_field
            )));
        }
        if !positive(self.alpha) {
            return Err(Error::InvalidInput(format!("alpha must be positive, got {}", self.alpha)));
        }
        Ok(())
    }
}

/// Scaled model parameters. All other modules consume these.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    /// Wavenumber of the first photon (m⁻¹).
    pub kappa_1: f64,
    /// Wavenumber of the second photon (m⁻¹).
    pub kappa_2: f64,
    /// Coupling ϵ = αρ/(np) (m⁻²).
    pub epsilon: f64,
    /// Cyclotron parameter ω = (e/ħ)B/(np) (m⁻¹).
    pub omega: f64,
    /// Laboratory provenance; `None` for parameters given directly in
    /// scaled units.
    pub provenance: Option<PhysicalInput>,
}

/// Convert laboratory inputs into scaled model parameters.
///
/// Rejects degenerate wavelengths: the model requires two distinct
/// frequencies.
pub fn from_physical(input: &PhysicalInput) -> Result<ModelParams> {
    input.check()?;
    let kappa_1 = 2.0 * std::f64::consts::PI / input.wavelength_1;
    let kappa_2 = 2.0 * std::f64::consts::PI / input.wavelength_2;
    if kappa_1 == kappa_2 {
        return Err(Error::DegenerateWavelengths(kappa_1));
    }
    let epsilon = input.alpha * input.electron_density / input.np;
    let omega = input.magnetic_field * E_OVER_HBAR / input.np;
    Ok(ModelParams { kappa_1, kappa_2, epsilon, omega, provenance: Some(input.clone()) })
}

impl ModelParams {
    /// Parameters given directly in scaled units (no laboratory provenance).
    pub fn scaled(kappa_1: f64, kappa_2: f64, epsilon: f64, omega: f64) -> Result<Self> {
        let p = ModelParams { kappa_1, kappa_2, epsilon, omega, provenance: None };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        let non_negative = |x: f64| x.is_finite() && x >= 0.0;
        if !positive(self.kappa_1) || !positive(self.kappa_2) {
            return Err(Error::InvalidParams(format!(
                "wavenumbers must be positive, got {} and {}",
                self.kappa_1, self.kappa_2
            )));
        }
        if self.kappa_1 == self.kappa_2 {
            return Err(Error::DegenerateWavelengths(self.kappa_1));
        }
        if !non_negative(self.epsilon) {
            return Err(Error::InvalidParams(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        if !non_negative(self.omega) {
            return Err(Error::InvalidParams(format!("omega must be >= 0, got {}", self.omega)));
        }
        Ok(())
    }

    /// Geometric mean of the two wavenumbers.
    pub fn kappa_bar(&self) -> f64 {
        (self.kappa_1 * self.kappa_2).sqrt()
    }

    /// |κ₂ − κ₁|.
    pub fn delta_kappa(&self) -> f64 {
        (self.kappa_2 - self.kappa_1).abs()
    }

    /// κ_s by index (s ∈ {1, 2}).
    pub fn kappa(&self, s: usize) -> f64 {
        match s {
            1 => self.kappa_1,
            2 => self.kappa_2,
            _ => panic!("photon index must be 1 or 2, got {s}"),
        }
    }
}

/// Thresholds for [`validate`].
#[derive(Clone, Copy, Debug)]
pub struct ValidateOptions {
    /// Flag when ϵ/(κ̄ Δκ) reaches this value.
    pub smallness_threshold: f64,
    /// Flag when min_s |ω − κ_s|/κ_s falls below this value.
    pub resonance_guard: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { smallness_threshold: 0.1, resonance_guard: DEFAULT_RESONANCE_GUARD }
    }
}

/// Regime-of-validity diagnostics. Informational only; callers decide
/// whether to abort.
#[derive(Clone, Copy, Debug)]
pub struct Diagnostics {
    /// ϵ/(κ̄ Δκ), the dimensionless combination controlling the small-ϵ
    /// expansions.
    pub smallness_ratio: f64,
    pub smallness_flagged: bool,
    /// min_s |ω − κ_s|/κ_s.
    pub resonance_proximity: f64,
    pub resonance_flagged: bool,
}

/// Check the smallness condition and the resonance proximity.
pub fn validate(params: &ModelParams, opts: &ValidateOptions) -> Diagnostics {
    let smallness_ratio = params.epsilon / (params.kappa_bar() * params.delta_kappa());
    let prox_1 = (params.omega - params.kappa_1).abs() / params.kappa_1;
    let prox_2 = (params.omega - params.kappa_2).abs() / params.kappa_2;
    let resonance_proximity = prox_1.min(prox_2);
    Diagnostics {
        smallness_ratio,
        smallness_flagged: smallness_ratio >= opts.smallness_threshold,
        resonance_proximity,
        resonance_flagged: resonance_proximity < opts.resonance_guard,
    }
}

/// A configuration parse failure, with the 1-based line it occurred on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.line == 0 {
            write!(f, "config: {}", self.message)
        } else {
            write!(f, "config line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

const CONFIG_KEYS: [&str; 6] = [
    "wavelength_1_nm",
    "wavelength_2_nm",
    "magnetic_field_T",
    "np_inv_m",
    "electron_density_inv_m3",
    "alpha",
];

/// Parse the plain-text `key=value` configuration.
///
/// Keys: `wavelength_1_nm`, `wavelength_2_nm`, `magnetic_field_T`,
/// `np_inv_m`, `electron_density_inv_m3`, `alpha`. Blank lines and lines
/// starting with `#` are ignored. `magnetic_field_T` defaults to 0 and
/// `alpha` to 1/137; the remaining keys are required.
pub fn parse_config(text: &str) -> std::result::Result<PhysicalInput, ConfigError> {
    let mut values: [Option<f64>; 6] = [None; 6];
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError {
            line: lineno,
            message: format!("expected key=value, got {line:?}"),
        })?;
        let key = key.trim();
        let slot = CONFIG_KEYS.iter().position(|k| *k == key).ok_or_else(|| ConfigError {
            line: lineno,
            message: format!("unknown key {key:?}"),
        })?;
        if values[slot].is_some() {
            return Err(ConfigError { line: lineno, message: format!("duplicate key {key:?}") });
        }
        let parsed: f64 = value.trim().parse().map_err(|_| ConfigError {
            line: lineno,
            message: format!("invalid number {:?} for key {key:?}", value.trim()),
        })?;
        values[slot] = Some(parsed);
    }
    let require = |slot: usize| {
        values[slot].ok_or_else(|| ConfigError {
            line: 0,
            message: format!("missing required key {:?}", CONFIG_KEYS[slot]),
        })
    };
    Ok(PhysicalInput {
        wavelength_1: require(0)? * 1e-9,
        wavelength_2: require(1)? * 1e-9,
        magnetic_field: values[2].unwrap_or(0.0),
        np: require(3)?,
        electron_density: require(4)?,
        alpha: values[5].unwrap_or(ALPHA_DEFAULT),
    })
}

/// The laboratory parameters behind the published parameter regime:
/// ν₁ = 625 nm, ν₂ = 562 nm, np = 2.5×10⁷ m⁻¹, ρ = 2.6×10²⁰ m⁻³.
pub fn reference_input(magnetic_field: f64) -> PhysicalInput {
    PhysicalInput {
        wavelength_1: 625e-9,
        wavelength_2: 562e-9,
        magnetic_field,
        np: 2.5e7,
        electron_density: 2.6e20,
        alpha: ALPHA_DEFAULT,
    }
}
