//! Model parameters, superselection branches and the auxiliary Gaussian
//! parameters (α, β, γ) that solve the ground-state constraint equations
//!
//!   α² − γ² = ν²,   γ² − β² = Ω,   g + 2(α − β)γ = 0.
//!
//! Each of the four (ε, η) sign choices is a separate superselection sector;
//! no operation mixes branches.

use num_complex::Complex64;

use crate::error::CoreError;
use crate::Result;

/// Relative band classifying g² = (ν²+Ω)² as frequency-degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_value(v: f64) -> Result<Self> {
        if v == 1.0 {
            Ok(Sign::Plus)
        } else if v == -1.0 {
            Ok(Sign::Minus)
        } else {
            Err(CoreError::BadLabel(format!("sign must be ±1, got {v}")))
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sign::Plus => write!(f, "+1"),
            Sign::Minus => write!(f, "-1"),
        }
    }
}

/// Physical parameters (ν, Ω, g) of the ghost Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub nu: f64,
    pub omega_cap: f64,
    pub g: f64,
}

impl ModelParams {
    pub fn new(nu: f64, omega_cap: f64, g: f64) -> Result<Self> {
        if !nu.is_finite() {
            return Err(CoreError::NonFinite("nu"));
        }
        if !omega_cap.is_finite() {
            return Err(CoreError::NonFinite("Omega"));
        }
        if !g.is_finite() {
            return Err(CoreError::NonFinite("g"));
        }
        Ok(Self { nu, omega_cap, g })
    }

    /// ν² + Ω, the boundary scale of the PU map and of degeneracy.
    pub fn nu2_plus_omega(&self) -> f64 {
        self.nu * self.nu + self.omega_cap
    }

    /// Frequency degeneracy g² = (ν²+Ω)², classified with a relative band:
    /// the map Γ and the branch solutions blow up continuously as the
    /// boundary is approached.
    pub fn is_degenerate(&self) -> bool {
        let s = self.nu2_plus_omega();
        (self.g * self.g - s * s).abs() <= DEGENERACY_TOL * (s * s).max(1.0)
    }
}

/// Superselection labels (ε, η).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Branch {
    pub epsilon: Sign,
    pub eta: Sign,
}

impl Branch {
    pub fn new(epsilon: Sign, eta: Sign) -> Self {
        Self { epsilon, eta }
    }

    pub fn all() -> [Branch; 4] {
        [
            Branch::new(Sign::Minus, Sign::Plus),
            Branch::new(Sign::Minus, Sign::Minus),
            Branch::new(Sign::Plus, Sign::Plus),
            Branch::new(Sign::Plus, Sign::Minus),
        ]
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.epsilon, self.eta)
    }
}

/// Auxiliary Gaussian parameters of one branch, kept complex so that
/// broken-PT regimes are representable; reality is a classification,
/// not a precondition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxParams {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    /// σ_ε = ε√(g² − 4ν²Ω)
    pub sigma_eps: Complex64,
    /// Σ_ε^η = 2η√(ν² − Ω + σ_ε)
    pub big_sigma: Complex64,
    /// κ = √((α+β)² − 4γ²)
    pub kappa: Complex64,
}

impl AuxParams {
    const REAL_TOL: f64 = 1e-10;

    /// All of α, β, γ real (up to a small relative band).
    pub fn is_real(&self) -> bool {
        let scale = 1.0 + self.alpha.norm().max(self.beta.norm()).max(self.gamma.norm());
        self.alpha.im.abs().max(self.beta.im.abs()).max(self.gamma.im.abs())
            <= Self::REAL_TOL * scale
    }

    /// Residuals of the three constraint equations against the model.
    pub fn constraint_residuals(&self, p: &ModelParams) -> [f64; 3] {
        let (a, b, g) = (self.alpha, self.beta, self.gamma);
        [
            (a * a - g * g - p.nu * p.nu).norm(),
            (g * g - b * b - p.omega_cap).norm(),
            (p.g + 2.0 * (a - b) * g).norm(),
        ]
    }

    /// E₀ = α − β, the level-0 energy of this branch.
    pub fn ground_energy(&self) -> Complex64 {
        self.alpha - self.beta
    }

    /// Square-integrability of the Gaussian envelope: needs real parameters
    /// with α > 0, β > 0 and γ² < αβ.
    pub fn is_normalisable(&self) -> bool {
        self.is_real()
            && self.alpha.re > 0.0
            && self.beta.re > 0.0
            && self.gamma.re * self.gamma.re < self.alpha.re * self.beta.re
    }
}

/// Pointwise classification of a parameter/branch combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DomainReport {
    pub e0_real: bool,
    pub normalisable: bool,
    pub gamma_map_valid: bool,
    pub degenerate: bool,
}

/// Branch solution of the constraint equations in the non-degenerate case.
///
/// Radicands may be negative; the computation is carried out in complex
/// arithmetic throughout so broken-PT parameter sets are returned rather
/// than rejected.
pub fn derive_aux(p: &ModelParams, b: &Branch) -> Result<AuxParams> {
    let nu2 = p.nu * p.nu;
    let sigma = b.epsilon.value()
        * Complex64::new(p.g * p.g - 4.0 * nu2 * p.omega_cap, 0.0).sqrt();
    let radicand = Complex64::new(nu2 - p.omega_cap, 0.0) + sigma;
    let big_sigma = 2.0 * b.eta.value() * radicand.sqrt();
    let scale = (nu2 - p.omega_cap).abs().max(sigma.norm()).max(1.0).sqrt();
    if big_sigma.norm() <= 1e-8 * scale {
        return Err(CoreError::DegenerateBranch);
    }
    let alpha = (2.0 * nu2 + sigma) / big_sigma;
    let beta = (2.0 * p.omega_cap - sigma) / big_sigma;
    let gamma = -p.g / big_sigma;
    let kappa = ((alpha + beta) * (alpha + beta) - 4.0 * gamma * gamma).sqrt();
    Ok(AuxParams { alpha, beta, gamma, sigma_eps: sigma, big_sigma, kappa })
}

/// The four solutions at the frequency-degenerate point g = η(ν²+Ω).
///
/// κ = (α+β)² − 4γ² vanishes identically here, and none of the four
/// solutions is normalisable.
pub fn derive_aux_degenerate(p: &ModelParams, b: &Branch) -> Result<AuxParams> {
    let nu2 = p.nu * p.nu;
    let s = p.nu2_plus_omega();
    if (p.g - b.eta.value() * s).abs() > DEGENERACY_TOL.sqrt() * s.abs().max(1.0) {
        return Err(CoreError::NotDegenerate);
    }
    let diff = nu2 - p.omega_cap;
    if diff.abs() <= 1e-12 * nu2.abs().max(p.omega_cap.abs()).max(1.0) {
        return Err(CoreError::SingularDegeneracy);
    }
    let denom = 2.0 * std::f64::consts::SQRT_2 * Complex64::new(diff, 0.0).sqrt();
    let eps = b.epsilon.value();
    let alpha = eps * (p.omega_cap - 3.0 * nu2) / denom;
    let beta = eps * (nu2 - 3.0 * p.omega_cap) / denom;
    let gamma = b.eta.value() * eps * s / denom;
    // σ_ε = ε√(g²−4ν²Ω) = ε|ν²−Ω| at the degenerate point; Σ and κ are
    // exactly zero there.
    let sigma_eps = Complex64::new(eps * diff.abs(), 0.0);
    Ok(AuxParams {
        alpha,
        beta,
        gamma,
        sigma_eps,
        big_sigma: Complex64::new(0.0, 0.0),
        kappa: Complex64::new(0.0, 0.0),
    })
}

/// Flags per the domain conditions of the branch: real ground energy,
/// square integrability, validity of the real map to the PU oscillator,
/// and degeneracy. Boundary equality cases are classified out-of-domain.
pub fn classify_domain(p: &ModelParams, b: &Branch) -> DomainReport {
    let degenerate = p.is_degenerate();
    let nu2 = p.nu * p.nu;

    if degenerate {
        // Solutions exist but are never normalisable; the map Γ is undefined
        // at the boundary. E₀ is real iff ν² > Ω.
        return DomainReport {
            e0_real: nu2 > p.omega_cap,
            normalisable: false,
            gamma_map_valid: false,
            degenerate,
        };
    }

    let (e0_real, normalisable) = match derive_aux(p, b) {
        Ok(aux) => {
            let e0 = aux.ground_energy();
            (
                e0.im.abs() <= 1e-10 * (1.0 + e0.norm()),
                aux.is_normalisable(),
            )
        }
        Err(_) => (false, false),
    };

    let zeta = 4.0 * (nu2 - p.omega_cap);
    let xi = 4.0 * (p.g * p.g - 4.0 * nu2 * p.omega_cap);
    let freqs_real = zeta > 0.0 && xi > 0.0 && 4.0 * xi < zeta * zeta;
    let gamma_map_valid = p.nu2_plus_omega() > p.g && freqs_real;

    DomainReport { e0_real, normalisable, gamma_map_valid, degenerate }
}


#[cfg(test)]
pub(crate) use tests::sample_in_domain;
