//! Second-quantised construction: ladder operators obtained by inverting the
//! classical mode expansion at t = 0 (p → −i∂), the annihilation tables for
//! the four ground states across the eight regimes, Fock states built by
//! repeated application of the creation pair, and the cross-validation of
//! this construction against the recurrence solution.

use num_complex::Complex64;

use crate::error::CoreError;
use crate::params::{derive_aux, Branch, ModelParams, Sign};
use crate::pu_map::{frequencies, pu_constants, PUParams, Regime};
use crate::recurrence::{closed_spectrum, solve_tower, LevelSign};
use crate::wavefunction::{assemble, Axis, PolyGauss};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LadderKind {
    A,
    ADag,
    B,
    BDag,
}

impl LadderKind {
    pub fn all() -> [LadderKind; 4] {
        [LadderKind::A, LadderKind::ADag, LadderKind::B, LadderKind::BDag]
    }

    /// The other operator of the same mode.
    pub fn conjugate(self) -> LadderKind {
        match self {
            LadderKind::A => LadderKind::ADag,
            LadderKind::ADag => LadderKind::A,
            LadderKind::B => LadderKind::BDag,
            LadderKind::BDag => LadderKind::B,
        }
    }
}

impl std::fmt::Display for LadderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            LadderKind::A => "a",
            LadderKind::ADag => "a+",
            LadderKind::B => "b",
            LadderKind::BDag => "b+",
        };
        write!(f, "{s}")
    }
}

/// First-order operator C·(cx·x + cy·y + cdx·∂ₓ + cdy·∂ᵧ) realised at t = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderOp {
    pub kind: LadderKind,
    pub prefactor: f64,
    pub cx: f64,
    pub cy: f64,
    pub cdx: f64,
    pub cdy: f64,
}

/// The four ladder operators for the signed frequency pair of a regime,
/// with μ̄ᵢ = μ₀ − μ₂ωᵢ², ν̄ᵢ = ν₀ − ν₂ωᵢ²:
///
///   â   = C_a(−ω₁ν̄₂ x + ω₁μ̄₂ y − 2ν̄₂ ∂ₓ − 2μ̄₂ ∂ᵧ),   â† flips the ∂ signs,
///   b̂   = C_b( ω₂ν̄₁ x − ω₂μ̄₁ y + 2ν̄₁ ∂ₓ + 2μ̄₁ ∂ᵧ),   b̂† flips the ∂ signs,
///
/// C_a = 1/(2ω₁(ω₁²−ω₂²)(μ₂ν₀−μ₀ν₂)), C_b the same with ω₂ in front.
pub fn ladder_op(pu: &PUParams, regime: Regime, kind: LadderKind) -> Result<LadderOp> {
    let (w1, w2) = frequencies(pu, regime)?;
    let mb1 = pu.mu0 - pu.mu2 * w1 * w1;
    let mb2 = pu.mu0 - pu.mu2 * w2 * w2;
    let nb1 = pu.nu0 - pu.nu2 * w1 * w1;
    let nb2 = pu.nu0 - pu.nu2 * w2 * w2;
    let d = pu.mu2 * pu.nu0 - pu.mu0 * pu.nu2;
    if d.abs() < 1e-12 {
        return Err(CoreError::SingularMapDeterminant);
    }
    let ca = 1.0 / (2.0 * w1 * (w1 * w1 - w2 * w2) * d);
    let cb = 1.0 / (2.0 * w2 * (w1 * w1 - w2 * w2) * d);
    let (prefactor, cx, cy, ds) = match kind {
        LadderKind::A => (ca, -w1 * nb2, w1 * mb2, -2.0),
        LadderKind::ADag => (ca, -w1 * nb2, w1 * mb2, 2.0),
        LadderKind::B => (cb, w2 * nb1, -w2 * mb1, 2.0),
        LadderKind::BDag => (cb, w2 * nb1, -w2 * mb1, -2.0),
    };
    let (cdx, cdy) = match kind {
        LadderKind::A | LadderKind::ADag => (ds * nb2, ds * mb2),
        LadderKind::B | LadderKind::BDag => (ds * nb1, ds * mb1),
    };
    Ok(LadderOp { kind, prefactor, cx, cy, cdx, cdy })
}

/// Scalar value of [â, â†] (kind A/ADag) or [b̂, b̂†] (kind B/BDag) in the
/// given regime: 1/(2ω₁(ω₁²−ω₂²)) and 1/(2ω₂(ω₂²−ω₁²)).
pub fn commutator_scalar(pu: &PUParams, regime: Regime, kind: LadderKind) -> Result<f64> {
    let (w1, w2) = frequencies(pu, regime)?;
    Ok(match kind {
        LadderKind::A | LadderKind::ADag => 1.0 / (2.0 * w1 * (w1 * w1 - w2 * w2)),
        LadderKind::B | LadderKind::BDag => 1.0 / (2.0 * w2 * (w2 * w2 - w1 * w1)),
    })
}

/// Apply a ladder operator; stays in the polynomial-Gaussian class with the
/// polynomial degree changing by ±1.
pub fn ladder_apply(s: &PolyGauss, op: &LadderOp) -> PolyGauss {
    let mut out = s.mul_monomial(1, 0).scaled(op.cx.into());
    out = out.add_scaled(&s.mul_monomial(0, 1), op.cy.into());
    out = out.add_scaled(&s.derivative(Axis::X), op.cdx.into());
    out = out.add_scaled(&s.derivative(Axis::Y), op.cdy.into());
    out.scaled(op.prefactor.into())
}

/// The two operator kinds annihilating ψ₀^{εη} in each regime, per the two
/// (ε = −1 and ε = +1) tables.
pub fn annihilator_set(b: &Branch, regime: Regime) -> [LadderKind; 2] {
    use Regime::*;
    let a_kills = match (b.epsilon, b.eta) {
        // â ψ₀^{−+} = 0 in II, III, VI, VII, â† in the complement
        (Sign::Minus, Sign::Plus) => matches!(regime, II | III | VI | VII),
        (Sign::Minus, Sign::Minus) => matches!(regime, I | IV | V | VIII),
        (Sign::Plus, Sign::Plus) => matches!(regime, I | II | VII | VIII),
        (Sign::Plus, Sign::Minus) => matches!(regime, III | IV | V | VI),
    };
    let b_kills = match (b.epsilon, b.eta) {
        (Sign::Minus, Sign::Plus) => matches!(regime, I | III | V | VII),
        (Sign::Minus, Sign::Minus) => matches!(regime, II | IV | VI | VIII),
        (Sign::Plus, Sign::Plus) => matches!(regime, I | II | III | IV),
        (Sign::Plus, Sign::Minus) => matches!(regime, V | VI | VII | VIII),
    };
    [
        if a_kills { LadderKind::A } else { LadderKind::ADag },
        if b_kills { LadderKind::B } else { LadderKind::BDag },
    ]
}

/// The creation pair: conjugates of the annihilators.
pub fn creation_set(b: &Branch, regime: Regime) -> [LadderKind; 2] {
    let [ka, kb] = annihilator_set(b, regime);
    [ka.conjugate(), kb.conjugate()]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockLevel {
    pub n: usize,
    pub m: usize,
    pub energy: Complex64,
    /// Closed normalisation constant N_{n,m} (regime I, normalisable branch).
    pub norm_const: f64,
}

/// Energy shift contributed by one application of a ladder operator:
/// ∓ω₁ for â/â† and ∓ω₂ for b̂/b̂†.
fn energy_shift(pu: &PUParams, regime: Regime, kind: LadderKind) -> Result<f64> {
    let (w1, w2) = frequencies(pu, regime)?;
    Ok(match kind {
        LadderKind::A => -w1,
        LadderKind::ADag => w1,
        LadderKind::B => -w2,
        LadderKind::BDag => w2,
    })
}

/// Ē_{n,m} for the branch's creation pair in regime I:
/// (α−β) + n·shift(creation_a) + m·shift(creation_b). On the normalisable
/// branch this is −(n+½)ω₁ + (m+½)ω₂.
pub fn fock_energy(n: usize, m: usize, pu: &PUParams, b: &Branch) -> Result<Complex64> {
    let aux = derive_aux(&pu.model, b)?;
    let [ka, kb] = creation_set(b, Regime::I);
    let shift = n as f64 * energy_shift(pu, Regime::I, ka)?
        + m as f64 * energy_shift(pu, Regime::I, kb)?;
    Ok(aux.alpha - aux.beta + shift)
}

/// N_{n,m} = n!·m!·(2ω₁(ω₂²−ω₁²))⁻ⁿ·(2ω₂(ω₂²−ω₁²))⁻ᵐ·2π/√(ω₁ω₂),
/// the self-overlap of the unnormalised regime-I Fock state on the
/// normalisable branch.
pub fn norm_const(n: usize, m: usize, pu: &PUParams) -> Result<f64> {
    let (w1, w2) = frequencies(pu, Regime::I)?;
    let gap = w2 * w2 - w1 * w1;
    let mut v = 2.0 * std::f64::consts::PI / (w1 * w2).sqrt();
    for k in 1..=n {
        v *= k as f64 / (2.0 * w1 * gap);
    }
    for k in 1..=m {
        v *= k as f64 / (2.0 * w2 * gap);
    }
    Ok(v)
}

/// Unnormalised Fock state: the creation pair of the branch applied
/// (b-type)ᵐ then (a-type)ⁿ to ψ₀^{εη}. Works on every branch, including
/// non-normalisable ones.
pub fn fock_state_raw(n: usize, m: usize, b: &Branch, pu: &PUParams) -> Result<PolyGauss> {
    let aux = derive_aux(&pu.model, b)?;
    let [ka, kb] = creation_set(b, Regime::I);
    let op_a = ladder_op(pu, Regime::I, ka)?;
    let op_b = ladder_op(pu, Regime::I, kb)?;
    let mut s = PolyGauss::ground(aux);
    for _ in 0..m {
        s = ladder_apply(&s, &op_b);
    }
    for _ in 0..n {
        s = ladder_apply(&s, &op_a);
    }
    Ok(s)
}

/// Normalised Fock state ψ̄_{n,m} = N_{n,m}^{−1/2} âⁿ(b̂†)ᵐ ψ₀ together with
/// its level data. Requires a square-integrable ground state.
pub fn fock_state(n: usize, m: usize, b: &Branch, pu: &PUParams) -> Result<(PolyGauss, FockLevel)> {
    let aux = derive_aux(&pu.model, b)?;
    if !aux.is_normalisable() {
        return Err(CoreError::NotNormalisableGround);
    }
    let nc = norm_const(n, m, pu)?;
    let state = fock_state_raw(n, m, b, pu)?.scaled(Complex64::new(1.0 / nc.sqrt(), 0.0));
    let level = FockLevel { n, m, energy: fock_energy(n, m, pu, b)?, norm_const: nc };
    Ok((state, level))
}

/// Identification of recurrence labels with Fock labels:
/// (N, n, +) ↦ (n−1, 1+N−n), (N, n, −) ↦ (1+N−n, n−1), mid ↦ (N/2, N/2).
pub fn label_map(big_n: usize, n: usize, sign: LevelSign) -> Result<(usize, usize)> {
    match sign {
        LevelSign::Mid => {
            if big_n % 2 != 0 || n != big_n {
                return Err(CoreError::BadLabel(format!(
                    "mid level needs even N and n = N, got N={big_n}, n={n}"
                )));
            }
            Ok((big_n / 2, big_n / 2))
        }
        LevelSign::Plus | LevelSign::Minus => {
            if n < 1 || n > big_n.div_ceil(2) {
                return Err(CoreError::BadLabel(format!(
                    "paired level needs 1 <= n <= ceil(N/2), got N={big_n}, n={n}"
                )));
            }
            let (p, q) = (n - 1, 1 + big_n - n);
            Ok(if sign == LevelSign::Plus { (p, q) } else { (q, p) })
        }
    }
}

#[derive(Debug, Clone)]
pub struct CrossCheckEntry {
    pub big_n: usize,
    pub n: usize,
    pub sign: LevelSign,
    pub fock_n: usize,
    pub fock_m: usize,
    pub energy_recurrence: Complex64,
    pub energy_fock: Complex64,
    pub energy_rel_err: f64,
    pub proportionality_err: f64,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct CrossCheckReport {
    pub entries: Vec<CrossCheckEntry>,
    pub all_ok: bool,
}

const ENERGY_TOL: f64 = 1e-10;
const PROP_TOL: f64 = 1e-8;

/// Largest-coefficient-anchored proportionality defect between two states.
pub fn proportionality_defect(a: &PolyGauss, b: &PolyGauss) -> f64 {
    let anchor = b
        .coeffs
        .iter()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .map(|(&k, _)| k);
    let Some(key) = anchor else {
        return if a.max_coeff() == 0.0 { 0.0 } else { f64::INFINITY };
    };
    let ratio = a.coeffs.get(&key).copied().unwrap_or_default() / b.coeffs[&key];
    let scaled = b.scaled(ratio);
    a.add_scaled(&scaled, Complex64::new(-1.0, 0.0)).max_coeff() / a.max_coeff().max(1e-300)
}

/// Compare the algebraic (recurrence) and operator (Fock) constructions
/// level by level up to N = n_max: energies under the label map to relative
/// 1e−10, states by coefficient proportionality to 1e−8. Every mismatch gets
/// a report entry; nothing passes silently.
pub fn cross_validate(p: &ModelParams, b: &Branch, n_max: usize) -> Result<CrossCheckReport> {
    if p.is_degenerate() {
        return Err(CoreError::MapUndefined);
    }
    let pu = pu_constants(p)?;
    let aux = derive_aux(p, b)?;
    let mut entries = Vec::new();
    let mut all_ok = true;
    for big_n in 0..=n_max {
        for level in closed_spectrum(big_n, &aux) {
            let (fn_, fm) = label_map(big_n, level.n, level.sign)?;
            let e_fock = fock_energy(fn_, fm, &pu, b)?;
            let energy_rel_err =
                (level.energy - e_fock).norm() / level.energy.norm().max(1.0);
            let table = solve_tower(big_n, &aux, level.energy)?;
            let rec_state = assemble(big_n, &aux, &table)?;
            let fock = fock_state_raw(fn_, fm, b, &pu)?;
            let proportionality_err = proportionality_defect(&rec_state, &fock);
            let ok = energy_rel_err < ENERGY_TOL && proportionality_err < PROP_TOL;
            all_ok &= ok;
            entries.push(CrossCheckEntry {
                big_n,
                n: level.n,
                sign: level.sign,
                fock_n: fn_,
                fock_m: fm,
                energy_recurrence: level.energy,
                energy_fock: e_fock,
                energy_rel_err,
                proportionality_err,
                ok,
            });
        }
    }
    Ok(CrossCheckReport { entries, all_ok })
}
