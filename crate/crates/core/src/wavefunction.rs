//! Polynomial-times-Gaussian states
//!
//!   ψ(x, y) = P(x, y) · exp(−αx²/2 − βy²/2 + γxy)
//!
//! and the analytic calculus on them: Hamiltonian action, derivatives,
//! Gaussian moments, norms, uncertainties and sampled densities. All
//! operations stay inside this class, so no numerical integration or
//! differentiation appears anywhere in the core path.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::CoreError;
use crate::params::{AuxParams, ModelParams};
use crate::recurrence::CoefficientTable;
use crate::Result;

type Poly = BTreeMap<(u32, u32), Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Rectangle [x0, x1] × [y0, y1] for density sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyGauss {
    /// Monomial coefficients (i, j) ↦ coefficient of xⁱyʲ.
    pub coeffs: Poly,
    pub aux: AuxParams,
}

fn poly_add(p: &mut Poly, key: (u32, u32), val: Complex64) {
    let slot = p.entry(key).or_insert(Complex64::new(0.0, 0.0));
    *slot += val;
}

impl PolyGauss {
    pub fn new(coeffs: Poly, aux: AuxParams) -> Self {
        Self { coeffs, aux }
    }

    /// The ground-state envelope: P = 1.
    pub fn ground(aux: AuxParams) -> Self {
        let mut coeffs = Poly::new();
        coeffs.insert((0, 0), Complex64::new(1.0, 0.0));
        Self { coeffs, aux }
    }

    pub fn degree(&self) -> u32 {
        self.coeffs
            .keys()
            .map(|&(i, j)| i + j)
            .max()
            .unwrap_or(0)
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&k, &v)| (k, v * s)).collect(),
            aux: self.aux,
        }
    }

    /// self + s·other (same envelope assumed).
    pub fn add_scaled(&self, other: &Self, s: Complex64) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (&k, &v) in &other.coeffs {
            poly_add(&mut coeffs, k, s * v);
        }
        coeffs.retain(|_, v| v.norm() > 0.0);
        Self { coeffs, aux: self.aux }
    }

    /// Multiply the polynomial part by x^di y^dj.
    pub fn mul_monomial(&self, di: u32, dj: u32) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&(i, j), &v)| ((i + di, j + dj), v))
                .collect(),
            aux: self.aux,
        }
    }

    /// Polynomial part of ∂ψ along one axis: ∂ₓ(P e^W) = (Pₓ + P·Wₓ) e^W
    /// with Wₓ = −αx + γy and W_y = −βy + γx.
    pub fn derivative(&self, axis: Axis) -> Self {
        let (al, be, ga) = (self.aux.alpha, self.aux.beta, self.aux.gamma);
        let mut out = Poly::new();
        for (&(i, j), &v) in &self.coeffs {
            match axis {
                Axis::X => {
                    if i >= 1 {
                        poly_add(&mut out, (i - 1, j), v * i as f64);
                    }
                    poly_add(&mut out, (i + 1, j), -v * al);
                    poly_add(&mut out, (i, j + 1), v * ga);
                }
                Axis::Y => {
                    if j >= 1 {
                        poly_add(&mut out, (i, j - 1), v * j as f64);
                    }
                    poly_add(&mut out, (i, j + 1), -v * be);
                    poly_add(&mut out, (i + 1, j), v * ga);
                }
            }
        }
        Self { coeffs: out, aux: self.aux }
    }
}

/// Lay out the solved coefficient tower as a polynomial:
/// P_N = Σ_k Σ_i σ_i^{N−2k} xⁱ y^{N−i−2k}.
pub fn assemble(big_n: usize, aux: &AuxParams, table: &CoefficientTable) -> Result<PolyGauss> {
    if table.big_n != big_n || table.rows.len() != big_n / 2 + 1 {
        return Err(CoreError::ShapeMismatch(table.rows.len()));
    }
    let mut coeffs = Poly::new();
    for (k, row) in table.rows.iter().enumerate() {
        if row.len() != big_n + 1 {
            return Err(CoreError::ShapeMismatch(row.len()));
        }
        let width = table.row_width(k);
        for (i, &v) in row.iter().take(width).enumerate() {
            if v.norm() > 0.0 {
                poly_add(&mut coeffs, (i as u32, (width - 1 - i) as u32), v);
            }
        }
    }
    Ok(PolyGauss::new(coeffs, *aux))
}

/// ψ(x, y) = P(x, y) exp(−αx²/2 − βy²/2 + γxy).
pub fn evaluate(s: &PolyGauss, x: f64, y: f64) -> Complex64 {
    let mut p = Complex64::new(0.0, 0.0);
    for (&(i, j), &v) in &s.coeffs {
        p += v * x.powi(i as i32) * y.powi(j as i32);
    }
    let w = -0.5 * s.aux.alpha * x * x - 0.5 * s.aux.beta * y * y + s.aux.gamma * x * y;
    p * w.exp()
}

/// Exact action of H = −∂ₓ² + ∂ᵧ² + ν²x² + Ωy² + gxy on the class:
/// H(P e^W) = [−(Pₓₓ + 2PₓWₓ + P(Wₓ²−α)) + (Pᵧᵧ + 2PᵧW_y + P(W_y²−β))
///            + (ν²x² + Ωy² + gxy)P] e^W.
pub fn apply_hamiltonian(s: &PolyGauss, p: &ModelParams) -> PolyGauss {
    let (al, be, ga) = (s.aux.alpha, s.aux.beta, s.aux.gamma);
    let nu2 = p.nu * p.nu;
    let mut out = Poly::new();
    for (&(i, j), &cc) in &s.coeffs {
        let (fi, fj) = (i as f64, j as f64);
        // −Pₓₓ
        if i >= 2 {
            poly_add(&mut out, (i - 2, j), -cc * fi * (fi - 1.0));
        }
        // −2PₓWₓ
        if i >= 1 {
            poly_add(&mut out, (i, j), 2.0 * cc * fi * al);
            poly_add(&mut out, (i - 1, j + 1), -2.0 * cc * fi * ga);
        }
        // −P(Wₓ² − α), Wₓ² = α²x² − 2αγxy + γ²y²
        poly_add(&mut out, (i + 2, j), -cc * al * al);
        poly_add(&mut out, (i + 1, j + 1), 2.0 * cc * al * ga);
        poly_add(&mut out, (i, j + 2), -cc * ga * ga);
        poly_add(&mut out, (i, j), cc * al);
        // +Pᵧᵧ
        if j >= 2 {
            poly_add(&mut out, (i, j - 2), cc * fj * (fj - 1.0));
        }
        // +2PᵧW_y
        if j >= 1 {
            poly_add(&mut out, (i, j), -2.0 * cc * fj * be);
            poly_add(&mut out, (i + 1, j - 1), 2.0 * cc * fj * ga);
        }
        // +P(W_y² − β), W_y² = β²y² − 2βγxy + γ²x²
        poly_add(&mut out, (i, j + 2), cc * be * be);
        poly_add(&mut out, (i + 1, j + 1), -2.0 * cc * be * ga);
        poly_add(&mut out, (i + 2, j), cc * ga * ga);
        poly_add(&mut out, (i, j), -cc * be);
        // potential
        poly_add(&mut out, (i + 2, j), cc * nu2);
        poly_add(&mut out, (i, j + 2), cc * p.omega_cap);
        poly_add(&mut out, (i + 1, j + 1), cc * p.g);
    }
    out.retain(|_, v| v.norm() > 0.0);
    PolyGauss::new(out, s.aux)
}

/// max-norm of (H − E)ψ coefficients, relative to the largest coefficient
/// of ψ.
pub fn eigen_residual(s: &PolyGauss, e: Complex64, p: &ModelParams) -> f64 {
    let hs = apply_hamiltonian(s, p);
    let diff = hs.add_scaled(s, -e);
    diff.max_coeff() / s.max_coeff().max(1e-300)
}

/// Covariance pieces of the density Gaussian e^{−(αx² + βy² − 2γxy)}
/// (the squared envelope, real parts of the aux parameters).
fn density_covariance(aux: &AuxParams) -> Result<(f64, f64, f64, f64)> {
    let (al, be, ga) = (aux.alpha.re, aux.beta.re, aux.gamma.re);
    let det = al * be - ga * ga;
    if !(al > 0.0 && det > 0.0) {
        return Err(CoreError::NotNormalisable);
    }
    Ok((be / (2.0 * det), al / (2.0 * det), ga / (2.0 * det), det))
}

/// ∫ xᵖyᵍ e^{−(αx² + βy² − 2γxy)} dx dy: the centered-Gaussian moment
/// recursion times the base integral π/√(αβ−γ²). Odd p+q vanishes.
pub fn gaussian_moment(aux: &AuxParams, p: usize, q: usize) -> Result<f64> {
    let (cxx, cyy, cxy, det) = density_covariance(aux)?;
    let base = std::f64::consts::PI / det.sqrt();
    // fill m[i][j] = E[xⁱ yʲ] under the covariance (cxx, cxy, cyy)
    let mut m = vec![vec![0.0f64; q + 1]; p + 1];
    for i in 0..=p {
        for j in 0..=q {
            m[i][j] = if (i + j) % 2 == 1 {
                0.0
            } else if i == 0 && j == 0 {
                1.0
            } else if i >= 2 {
                (i as f64 - 1.0) * cxx * m[i - 2][j]
                    + if j >= 1 { j as f64 * cxy * m[i - 1][j - 1] } else { 0.0 }
            } else if i == 1 {
                j as f64 * cxy * m[0][j - 1]
            } else {
                (j as f64 - 1.0) * cyy * m[0][j - 2]
            };
        }
    }
    Ok(m[p][q] * base)
}

/// ∫ P̄ Q xᵖ yᵍ |e^W|² — the building block for norms and expectations.
fn weighted_overlap(a: &PolyGauss, b: &PolyGauss, p: usize, q: usize) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (&(i1, j1), &v1) in &a.coeffs {
        for (&(i2, j2), &v2) in &b.coeffs {
            let mom = gaussian_moment(
                &a.aux,
                (i1 + i2) as usize + p,
                (j1 + j2) as usize + q,
            )?;
            acc += v1.conj() * v2 * mom;
        }
    }
    Ok(acc)
}

/// ⟨ψ|φ⟩ for states sharing an envelope.
pub fn overlap(a: &PolyGauss, b: &PolyGauss) -> Result<Complex64> {
    weighted_overlap(a, b, 0, 0)
}

/// ⟨ψ|ψ⟩.
pub fn norm_sq(s: &PolyGauss) -> Result<f64> {
    Ok(overlap(s, s)?.re)
}

/// ⟨xᵖyᵍ⟩_ψ, normalised.
pub fn expectation(s: &PolyGauss, p: usize, q: usize) -> Result<f64> {
    let n = norm_sq(s)?;
    Ok(weighted_overlap(s, s, p, q)?.re / n)
}

/// Δx·Δp_x (or the y analogue): means vanish by parity, so this is
/// √⟨x²⟩·√⟨p_x²⟩ with ⟨p_x²⟩ = ∫|∂ₓψ|² / ∫|ψ|².
pub fn uncertainty(s: &PolyGauss, axis: Axis) -> Result<f64> {
    let n = norm_sq(s)?;
    let (p, q) = match axis {
        Axis::X => (2, 0),
        Axis::Y => (0, 2),
    };
    let pos2 = weighted_overlap(s, s, p, q)?.re / n;
    let d = s.derivative(axis);
    let mom2 = norm_sq(&d)? / n;
    Ok(pos2.sqrt() * mom2.sqrt())
}

/// |ψ|² on a uniform (nx × ny) grid over the window (row-major in y, then x;
/// endpoints included). When `normalise` is set and the state is
/// normalisable the values are divided by ‖ψ‖².
pub fn density_grid(
    s: &PolyGauss,
    window: &Window,
    nx: usize,
    ny: usize,
    normalise: bool,
) -> Result<Vec<Vec<f64>>> {
    if nx < 2 || ny < 2 || !(window.x1 > window.x0) || !(window.y1 > window.y0) {
        return Err(CoreError::BadSampling("need nx, ny >= 2 and a nonempty window"));
    }
    let norm = if normalise { norm_sq(s)? } else { 1.0 };
    let mut grid = Vec::with_capacity(ny);
    for jy in 0..ny {
        let y = window.y0 + (window.y1 - window.y0) * jy as f64 / (ny - 1) as f64;
        let mut row = Vec::with_capacity(nx);
        for ix in 0..nx {
            let x = window.x0 + (window.x1 - window.x0) * ix as f64 / (nx - 1) as f64;
            row.push(evaluate(s, x, y).norm_sqr() / norm);
        }
        grid.push(row);
    }
    Ok(grid)
}
