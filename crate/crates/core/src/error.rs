use thiserror::Error;

/// Errors produced by the model pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A laboratory input violates its invariants.
    #[error("invalid physical input: {0}")]
    InvalidInput(String),

    /// The two wavenumbers coincide; the model requires distinct frequencies.
    #[error("degenerate wavelengths: kappa_1 = kappa_2 = {0} 1/m")]
    DegenerateWavelengths(f64),

    /// Scaled model parameters violate their invariants.
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    /// A bracketing root solve did not converge.
    #[error("root solver failed for {context} after {iterations} iterations")]
    SolverFailure { context: String, iterations: usize },

    /// The cyclotron parameter sits inside the resonance guard band of a
    /// photon wavenumber; the characteristic equation is ill-conditioned
    /// there and the model excludes the regime.
    #[error(
        "resonance guard: omega = {omega} 1/m within {guard:.3} relative of kappa_{s} = {kappa} 1/m"
    )]
    ResonanceGuard { s: usize, omega: f64, kappa: f64, guard: f64 },

    /// A bracket could not be established for a magnetic-case root.
    #[error("bracket failure for magnetic root (k = {k}, lambda = {lambda})")]
    BracketFailure { k: usize, lambda: usize },

    /// A normalization radicand went negative (possible near resonance).
    #[error("negative radicand in normalization for quasi-photon (k = {k}, lambda = {lambda})")]
    NegativeRadicand { k: usize, lambda: usize },

    /// A state vector failed its normalization tolerance.
    #[error("state not normalized: |v|^2 = {norm_sq}")]
    Unnormalized { norm_sq: f64 },

    /// An operation was called with inconsistent inputs.
    #[error("misuse: {0}")]
    Misuse(String),

    /// Truncated-basis dimension exceeds the configured cap.
    #[error("basis dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    /// The target eigenvector could not be identified unambiguously.
    #[error("sector identification ambiguous: {0}")]
    AmbiguousSector(String),

    /// A computation needs laboratory provenance that the parameters lack.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}
