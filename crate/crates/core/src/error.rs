use thiserror::Error;

/// Typed errors shared by every module of the solver.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum CoreError {
    #[error("non-finite model parameter: {0}")]
    NonFinite(&'static str),
    #[error("branch is degenerate (Σ_ε^η = 0); use the degenerate solution")]
    DegenerateBranch,
    #[error("parameters are not frequency-degenerate (|g| ≠ |ν²+Ω|)")]
    NotDegenerate,
    #[error("degenerate solution undefined at ν² = Ω")]
    SingularDegeneracy,
    #[error("symplectic map to the PU oscillator undefined: ν²+Ω ≤ g")]
    MapUndefined,
    #[error("PU frequencies are complex (ζ ≤ 0 or ξ outside (0, ζ²/4))")]
    ComplexFrequencies,
    #[error("degenerate PU frequencies ω₁ = ω₂")]
    DegenerateFrequencies,
    #[error("mode-inversion map determinant vanishes (μ₂ν₀ = μ₀ν₂)")]
    SingularMapDeterminant,
    #[error("ambiguous regime: frequency pattern within tie tolerance")]
    RegimeTie,
    #[error("energy is not on the closed spectrum (|det M_N^0| = {0:.3e} × scale)")]
    OffSpectrum(f64),
    #[error("tridiagonal matrix is singular")]
    SingularMatrix,
    #[error("tower matrix M_N^{0} is singular: off-spectrum energy or parameter degeneracy")]
    UnexpectedSingularTower(usize),
    #[error("state is not normalisable (envelope matrix not positive definite)")]
    NotNormalisable,
    #[error("coefficient table shape does not match level N = {0}")]
    ShapeMismatch(usize),
    #[error("quantum labels out of range: {0}")]
    BadLabel(String),
    #[error("ground state of this branch is not square-integrable")]
    NotNormalisableGround,
    #[error("invalid trajectory sampling: {0}")]
    BadSampling(&'static str),
}
