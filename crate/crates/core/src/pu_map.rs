//! Real contact transformation between the ghost oscillator and the
//! Pais-Uhlenbeck oscillator
//!
//!   x = μ₀ q + μ₂ q̈,   y = ν₀ q + ν₂ q̈,
//!
//! together with everything that lives on the PU side: the characteristic
//! frequencies, the eight sign regimes, classical trajectories, and the
//! induced Poisson structure. The map exists only for ν² + Ω > g.

use num_complex::Complex64;

use crate::error::CoreError;
use crate::params::ModelParams;
use crate::Result;

/// Eight sign assignments for the pair of characteristic frequencies.
/// With Ω₋ ≤ Ω₊ the principal magnitudes, the signed pair (ω₁, ω₂) is
///
///   I: (+Ω₋, +Ω₊)   II: (+Ω₊, +Ω₋)   III: (−Ω₋, +Ω₊)   IV: (−Ω₊, +Ω₋)
///   V: (−Ω₊, −Ω₋)   VI: (−Ω₋, −Ω₊)   VII: (+Ω₊, −Ω₋)   VIII: (+Ω₋, −Ω₊)
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
}

impl Regime {
    pub fn all() -> [Regime; 8] {
        use Regime::*;
        [I, II, III, IV, V, VI, VII, VIII]
    }

    /// (sign of ω₁, ω₁ picks Ω₊?, sign of ω₂, ω₂ picks Ω₊?)
    fn signature(self) -> (f64, bool, f64, bool) {
        use Regime::*;
        match self {
            I => (1.0, false, 1.0, true),
            II => (1.0, true, 1.0, false),
            III => (-1.0, false, 1.0, true),
            IV => (-1.0, true, 1.0, false),
            V => (-1.0, true, -1.0, false),
            VI => (-1.0, false, -1.0, true),
            VII => (1.0, true, -1.0, false),
            VIII => (1.0, false, -1.0, true),
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::I => "I",
            Regime::II => "II",
            Regime::III => "III",
            Regime::IV => "IV",
            Regime::V => "V",
            Regime::VI => "VI",
            Regime::VII => "VII",
            Regime::VIII => "VIII",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for Regime {
    type Err = CoreError;
    fn from_str(s: &str) -> Result<Self> {
        use Regime::*;
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(I),
            "II" | "2" => Ok(II),
            "III" | "3" => Ok(III),
            "IV" | "4" => Ok(IV),
            "V" | "5" => Ok(V),
            "VI" | "6" => Ok(VI),
            "VII" | "7" => Ok(VII),
            "VIII" | "8" => Ok(VIII),
            other => Err(CoreError::BadLabel(format!("unknown regime {other:?}"))),
        }
    }
}

/// Principal frequency magnitudes Ω₋ ≤ Ω₊ (the regime-I assignment).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frequencies {
    pub omega_minus: f64,
    pub omega_plus: f64,
}

/// Map constants and PU-side coefficients for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PUParams {
    pub model: ModelParams,
    pub mu0: f64,
    pub nu0: f64,
    pub mu2: f64,
    pub nu2: f64,
    /// ζ = 4(ν² − Ω)
    pub zeta: f64,
    /// ξ = 4(g² − 4ν²Ω)
    pub xi: f64,
    /// κ₁ = 2√2 √(ν² + Ω − g)
    pub kappa1: f64,
    /// Present only when both frequencies are real and distinct.
    pub freq: Option<Frequencies>,
}

/// Classical phase-space point of the ghost oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseState {
    pub x: f64,
    pub y: f64,
    pub px: f64,
    pub py: f64,
}

/// Complex normal-mode amplitudes (a for ω₁, b for ω₂).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeAmplitudes {
    pub a: Complex64,
    pub b: Complex64,
}

/// Relative tolerance below which Ω₊ − Ω₋ counts as a frequency collision.
const FREQ_DEGENERACY_TOL: f64 = 1e-9;

pub fn pu_constants(p: &ModelParams) -> Result<PUParams> {
    let nu2 = p.nu * p.nu;
    let s = nu2 + p.omega_cap - p.g;
    if s <= 0.0 {
        return Err(CoreError::MapUndefined);
    }
    let root = s.sqrt();
    let sqrt2 = std::f64::consts::SQRT_2;
    let mu0 = sqrt2 * (p.g - 2.0 * p.omega_cap) / root;
    let nu0 = sqrt2 * (p.g - 2.0 * nu2) / root;
    let mu2 = 1.0 / (sqrt2 * root);
    let zeta = 4.0 * (nu2 - p.omega_cap);
    let xi = 4.0 * (p.g * p.g - 4.0 * nu2 * p.omega_cap);
    let disc = zeta * zeta - 4.0 * xi;
    let freq = if zeta > 0.0 && xi > 0.0 && disc > 0.0 {
        let d = disc.sqrt();
        Some(Frequencies {
            omega_minus: (0.5 * (zeta - d)).sqrt(),
            omega_plus: (0.5 * (zeta + d)).sqrt(),
        })
    } else {
        None
    };
    Ok(PUParams {
        model: *p,
        mu0,
        nu0,
        mu2,
        nu2: -mu2,
        zeta,
        xi,
        kappa1: 2.0 * sqrt2 * root,
        freq,
    })
}

/// Characteristic frequency ω^{εη} = (ε/√2)√(ζ + η√(ζ² − 4ξ)) as a complex
/// number; always defined, real exactly when ζ > 0 and 0 < ξ < ζ²/4.
pub fn omega(pu: &PUParams, eps: f64, eta: f64) -> Complex64 {
    let disc = Complex64::new(pu.zeta * pu.zeta - 4.0 * pu.xi, 0.0).sqrt();
    let rad = Complex64::new(pu.zeta, 0.0) + eta * disc;
    eps / std::f64::consts::SQRT_2 * rad.sqrt()
}

/// Signed real frequency pair (ω₁, ω₂) of a regime.
pub fn frequencies(pu: &PUParams, regime: Regime) -> Result<(f64, f64)> {
    let f = pu.freq.ok_or(CoreError::ComplexFrequencies)?;
    if f.omega_plus - f.omega_minus <= FREQ_DEGENERACY_TOL * f.omega_plus {
        return Err(CoreError::DegenerateFrequencies);
    }
    let (s1, p1, s2, p2) = regime.signature();
    let pick = |plus: bool| if plus { f.omega_plus } else { f.omega_minus };
    Ok((s1 * pick(p1), s2 * pick(p2)))
}

/// Inverse of [`frequencies`]: identify the regime of a signed pair.
pub fn classify_regime(pu: &PUParams, omega1: f64, omega2: f64) -> Result<Regime> {
    let f = pu.freq.ok_or(CoreError::ComplexFrequencies)?;
    let tol = FREQ_DEGENERACY_TOL * f.omega_plus;
    if f.omega_plus - f.omega_minus <= tol {
        return Err(CoreError::DegenerateFrequencies);
    }
    for r in Regime::all() {
        let (w1, w2) = frequencies(pu, r)?;
        if (w1 - omega1).abs() <= tol && (w2 - omega2).abs() <= tol {
            return Ok(r);
        }
    }
    Err(CoreError::RegimeTie)
}

/// μ̄ᵢ = μ₀ − μ₂ωᵢ² and ν̄ᵢ = ν₀ − ν₂ωᵢ², the mode weights of (x, y).
fn mode_weights(pu: &PUParams, w1: f64, w2: f64) -> (f64, f64, f64, f64) {
    (
        pu.mu0 - pu.mu2 * w1 * w1,
        pu.mu0 - pu.mu2 * w2 * w2,
        pu.nu0 - pu.nu2 * w1 * w1,
        pu.nu0 - pu.nu2 * w2 * w2,
    )
}

/// Phase-space point generated by the two-mode PU solution
/// q(t) = 2Re(a e^{−iω₁t}) + 2Re(b e^{−iω₂t}) pushed through the map.
pub fn classical_state(
    pu: &PUParams,
    regime: Regime,
    amps: &ModeAmplitudes,
    t: f64,
) -> Result<PhaseState> {
    let (w1, w2) = frequencies(pu, regime)?;
    let (m1, m2, n1, n2) = mode_weights(pu, w1, w2);
    let e1 = amps.a * Complex64::new(0.0, -w1 * t).exp();
    let e2 = amps.b * Complex64::new(0.0, -w2 * t).exp();
    Ok(PhaseState {
        x: 2.0 * (m1 * e1.re + m2 * e2.re),
        y: 2.0 * (n1 * e1.re + n2 * e2.re),
        px: w1 * m1 * e1.im + w2 * m2 * e2.im,
        py: -w1 * n1 * e1.im - w2 * n2 * e2.im,
    })
}

/// Recover the mode amplitudes from a phase-space point at t = 0.
pub fn invert_modes(pu: &PUParams, regime: Regime, s: &PhaseState) -> Result<ModeAmplitudes> {
    let (w1, w2) = frequencies(pu, regime)?;
    let (m1, m2, n1, n2) = mode_weights(pu, w1, w2);
    let det = m1 * n2 - m2 * n1;
    if det.abs() <= 1e-12 * (m1.abs() + m2.abs()) * (n1.abs() + n2.abs()).max(1.0) {
        return Err(CoreError::SingularMapDeterminant);
    }
    // Real parts from (x, y); imaginary parts from (p_x, p_y).
    let re_a = (s.x * n2 - s.y * m2) / (2.0 * det);
    let re_b = (s.y * m1 - s.x * n1) / (2.0 * det);
    let im_a = (s.px * n2 + s.py * m2) / (w1 * det);
    let im_b = -(s.py * m1 + s.px * n1) / (w2 * det);
    Ok(ModeAmplitudes {
        a: Complex64::new(re_a, im_a),
        b: Complex64::new(re_b, im_b),
    })
}

/// (q, q̇, q̈, q⃛) of the two-mode solution at time t.
pub fn mode_q_derivatives(
    pu: &PUParams,
    regime: Regime,
    amps: &ModeAmplitudes,
    t: f64,
) -> Result<[f64; 4]> {
    let (w1, w2) = frequencies(pu, regime)?;
    let e1 = amps.a * Complex64::new(0.0, -w1 * t).exp();
    let e2 = amps.b * Complex64::new(0.0, -w2 * t).exp();
    Ok([
        2.0 * (e1.re + e2.re),
        2.0 * (w1 * e1.im + w2 * e2.im),
        -2.0 * (w1 * w1 * e1.re + w2 * w2 * e2.re),
        -2.0 * (w1.powi(3) * e1.im + w2.powi(3) * e2.im),
    ])
}

/// Sampled trajectory on [t0, t1] with `steps` intervals (steps+1 points).
pub fn trajectory(
    pu: &PUParams,
    regime: Regime,
    amps: &ModeAmplitudes,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<Vec<(f64, PhaseState)>> {
    if steps == 0 || !(t1 > t0) {
        return Err(CoreError::BadSampling("need t1 > t0 and steps >= 1"));
    }
    let mut out = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = t0 + (t1 - t0) * k as f64 / steps as f64;
        out.push((t, classical_state(pu, regime, amps, t)?));
    }
    Ok(out)
}

/// H = p_x² − p_y² + ν²x² + Ωy² + gxy.
pub fn ghost_energy(p: &ModelParams, s: &PhaseState) -> f64 {
    s.px * s.px - s.py * s.py
        + p.nu * p.nu * s.x * s.x
        + p.omega_cap * s.y * s.y
        + p.g * s.x * s.y
}

/// L = ẋ²/4 − ẏ²/4 − V, evaluated on shell (ẋ = 2p_x, ẏ = −2p_y).
pub fn ghost_lagrangian(p: &ModelParams, s: &PhaseState) -> f64 {
    s.px * s.px - s.py * s.py
        - (p.nu * p.nu * s.x * s.x + p.omega_cap * s.y * s.y + p.g * s.x * s.y)
}

/// L_PU = ½(q̈² − ζq̇² + ξq²).
pub fn pu_lagrangian(pu: &PUParams, qd: &[f64; 4]) -> f64 {
    0.5 * (qd[2] * qd[2] - pu.zeta * qd[1] * qd[1] + pu.xi * qd[0] * qd[0])
}

/// d/dt (q̇ q̈) = q̈² + q̇ q⃛, the total derivative separating L from L_PU.
pub fn surface_term_rate(qd: &[f64; 4]) -> f64 {
    qd[2] * qd[2] + qd[1] * qd[3]
}

/// Poisson brackets {uᵢ, uⱼ} for u = (x, y, p_x, p_y), evaluated through the
/// PU-side fundamental brackets {q̇, q̈} = 1, {q⃛, q} = 1, {q̈, q⃛} = ζ.
pub fn bracket_matrix(pu: &PUParams) -> [[f64; 4]; 4] {
    // PU Poisson tensor over the basis (q, q̇, q̈, q⃛).
    let z = pu.zeta;
    let j = [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0, z],
        [1.0, 0.0, -z, 0.0],
    ];
    // Rows of the linear map (x, y, p_x, p_y) ← (q, q̇, q̈, q⃛).
    let u = [
        [pu.mu0, 0.0, pu.mu2, 0.0],
        [pu.nu0, 0.0, pu.nu2, 0.0],
        [0.0, 0.5 * pu.mu0, 0.0, 0.5 * pu.mu2],
        [0.0, -0.5 * pu.nu0, 0.0, -0.5 * pu.nu2],
    ];
    let mut out = [[0.0; 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in 0..4 {
                for k in 0..4 {
                    acc += u[r][i] * u[c][k] * j[i][k];
                }
            }
            *cell = acc;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn flagship() -> PUParams {
        pu_constants(&ModelParams::new(4.0, -2.0, 1.0).unwrap()).unwrap()
    }

    fn random_amps(rng: &mut impl Rng) -> ModeAmplitudes {
        ModeAmplitudes {
            a: Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            b: Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        }
    }

    #[test]
    fn map_constants_flagship() {
        let pu = flagship();
        let s13 = 13f64.sqrt();
        let r2 = std::f64::consts::SQRT_2;
        assert!((pu.mu0 - r2 * 5.0 / s13).abs() < 1e-14);
        assert!((pu.nu0 + r2 * 31.0 / s13).abs() < 1e-13);
        assert!((pu.mu2 - 1.0 / (r2 * s13)).abs() < 1e-15);
        assert_eq!(pu.nu2, -pu.mu2);
        assert_eq!(pu.zeta, 72.0);
        assert_eq!(pu.xi, 516.0);
        assert!((pu.kappa1 - 2.0 * r2 * s13).abs() < 1e-14);
    }

    #[test]
    fn map_undefined_beyond_boundary() {
        let p = ModelParams::new(2.0, -1.0, 3.5).unwrap();
        assert_eq!(pu_constants(&p), Err(CoreError::MapUndefined));
        let p = ModelParams::new(2.0, -1.0, 3.0).unwrap(); // boundary itself
        assert_eq!(pu_constants(&p), Err(CoreError::MapUndefined));
    }

    #[test]
    fn frequencies_flagship() {
        let pu = flagship();
        let (w1, w2) = frequencies(&pu, Regime::I).unwrap();
        assert!((w1 - 2.8410420469366726).abs() < 1e-12);
        assert!((w2 - 7.995528755969668).abs() < 1e-12);
        // characteristic polynomial ω⁴ − ζω² + ξ = 0
        for w in [w1, w2] {
            assert!((w.powi(4) - pu.zeta * w * w + pu.xi).abs() < 1e-9);
        }
    }

    #[test]
    fn omega_matches_regime_signatures() {
        let pu = flagship();
        // regime I is (ε,η) = (+,−) for ω₁ and (+,+) for ω₂
        let (w1, w2) = frequencies(&pu, Regime::I).unwrap();
        assert!((omega(&pu, 1.0, -1.0).re - w1).abs() < 1e-12);
        assert!((omega(&pu, 1.0, 1.0).re - w2).abs() < 1e-12);
        // regime IV: (−,+) then (+,−)
        let (w1, w2) = frequencies(&pu, Regime::IV).unwrap();
        assert!((omega(&pu, -1.0, 1.0).re - w1).abs() < 1e-12);
        assert!((omega(&pu, 1.0, -1.0).re - w2).abs() < 1e-12);
    }

    #[test]
    fn complex_frequencies_reported() {
        // ζ < 0 (Ω > ν²) keeps the map defined but the frequencies complex.
        let p = ModelParams::new(1.0, 3.0, 1.0).unwrap();
        let pu = pu_constants(&p).unwrap();
        assert!(pu.freq.is_none());
        assert_eq!(frequencies(&pu, Regime::I), Err(CoreError::ComplexFrequencies));
        // with ζ < 0 < ζ² − 4ξ the η = −1 root is purely imaginary
        let w = omega(&pu, 1.0, -1.0);
        assert!(w.im.abs() > 0.0 && w.re.abs() < 1e-12);
    }

    #[test]
    fn regimes_cover_all_sign_assignments() {
        let pu = flagship();
        let mut seen = std::collections::HashSet::new();
        for r in Regime::all() {
            let (w1, w2) = frequencies(&pu, r).unwrap();
            assert!(w1.abs() > 0.0 && (w1.abs() - w2.abs()).abs() > 1.0);
            seen.insert(((1e9 * w1) as i64, (1e9 * w2) as i64));
            assert_eq!(classify_regime(&pu, w1, w2).unwrap(), r);
        }
        assert_eq!(seen.len(), 8);
    }

    #[test]
    fn classical_state_satisfies_eom() {
        // Finite-difference check of ẋ = 2p_x, ẏ = −2p_y, ṗ_x = −∂H/∂x,
        // ṗ_y = −∂H/∂y along the two-mode solution.
        let p = ModelParams::new(4.0, -2.0, 1.0).unwrap();
        let pu = pu_constants(&p).unwrap();
        let amps = ModeAmplitudes {
            a: Complex64::new(0.3, -0.1),
            b: Complex64::new(-0.2, 0.4),
        };
        let h = 1e-5;
        for r in [Regime::I, Regime::III, Regime::VII] {
            for t in [0.0, 0.37, 1.9] {
                let sm = classical_state(&pu, r, &amps, t - h).unwrap();
                let s0 = classical_state(&pu, r, &amps, t).unwrap();
                let sp = classical_state(&pu, r, &amps, t + h).unwrap();
                let xd = (sp.x - sm.x) / (2.0 * h);
                let yd = (sp.y - sm.y) / (2.0 * h);
                let pxd = (sp.px - sm.px) / (2.0 * h);
                let pyd = (sp.py - sm.py) / (2.0 * h);
                assert!((xd - 2.0 * s0.px).abs() < 1e-6, "{r} t={t}");
                assert!((yd + 2.0 * s0.py).abs() < 1e-6);
                let hx = 2.0 * p.nu * p.nu * s0.x + p.g * s0.y;
                let hy = 2.0 * p.omega_cap * s0.y + p.g * s0.x;
                assert!((pxd + hx).abs() < 1e-5);
                assert!((pyd + hy).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn energy_conserved_along_trajectory() {
        let p = ModelParams::new(4.0, -2.0, 1.0).unwrap();
        let pu = pu_constants(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for r in Regime::all() {
            let amps = random_amps(&mut rng);
            let traj = trajectory(&pu, r, &amps, 0.0, 5.0, 64).unwrap();
            let e0 = ghost_energy(&p, &traj[0].1);
            for (_, s) in &traj {
                assert!((ghost_energy(&p, s) - e0).abs() < 1e-9 * (1.0 + e0.abs()));
            }
        }
    }

    #[test]
    fn invert_modes_roundtrip() {
        let p = ModelParams::new(4.0, -2.0, 1.0).unwrap();
        let pu = pu_constants(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for r in Regime::all() {
            for _ in 0..20 {
                let amps = random_amps(&mut rng);
                let s = classical_state(&pu, r, &amps, 0.0).unwrap();
                let back = invert_modes(&pu, r, &s).unwrap();
                assert!((back.a - amps.a).norm() < 1e-10);
                assert!((back.b - amps.b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn bracket_matrix_is_canonical() {
        // expected {x,px}={y,py}=1, antisymmetric, everything else 0
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let p = crate::params::sample_in_domain(&mut rng);
            let pu = pu_constants(&p).unwrap();
            let m = bracket_matrix(&pu);
            for i in 0..4 {
                for j in 0..4 {
                    let want = match (i, j) {
                        (0, 2) | (1, 3) => 1.0,
                        (2, 0) | (3, 1) => -1.0,
                        _ => 0.0,
                    };
                    assert!((m[i][j] - want).abs() < 1e-12, "({i},{j}) -> {}", m[i][j]);
                }
            }
        }
    }

    #[test]
    fn lagrangians_differ_by_surface_term() {
        let p = ModelParams::new(4.0, -2.0, 1.0).unwrap();
        let pu = pu_constants(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for r in Regime::all() {
            let amps = random_amps(&mut rng);
            for t in [0.0, 0.41, 2.7] {
                let s = classical_state(&pu, r, &amps, t).unwrap();
                let qd = mode_q_derivatives(&pu, r, &amps, t).unwrap();
                let gap = ghost_lagrangian(&p, &s) - pu_lagrangian(&pu, &qd)
                    + surface_term_rate(&qd);
                assert!(gap.abs() < 1e-9, "{r} t={t}: {gap}");
            }
        }
    }
}
