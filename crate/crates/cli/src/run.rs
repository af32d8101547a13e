//! Dispatch from a parsed [`Cli`] to tabular output.

use ghostosc::fock::cross_validate;
use ghostosc::params::{
    classify_domain, derive_aux, derive_aux_degenerate, AuxParams, Branch, ModelParams,
};
use ghostosc::pu_map::{pu_constants, trajectory, ModeAmplitudes, Regime};
use ghostosc::recurrence::{closed_spectrum, solve_tower, LevelSign, SpectrumLevel};
use ghostosc::wavefunction::{assemble, density_grid, uncertainty, Axis, PolyGauss, Window};
use ghostosc::CoreError;
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{Cli, Command, GRange, LevelArgs, PhysArgs};

#[derive(Debug)]
pub enum CliError {
    /// Malformed or inconsistent configuration → exit 2.
    Config(String),
    /// Typed core error (out of domain, non-normalisable, …) → exit 3.
    Domain(CoreError),
    /// Broken internal invariant → exit 4.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Domain(e) => write!(f, "domain error [{e:?}]: {e}"),
            CliError::Internal(m) => write!(f, "internal invariant failure: {m}"),
        }
    }
}

fn core_err(e: CoreError) -> CliError {
    match e {
        CoreError::ShapeMismatch(_) | CoreError::UnexpectedSingularTower(_) => {
            CliError::Internal(format!("{e:?}: {e}"))
        }
        other => CliError::Domain(other),
    }
}

/// One table cell; `Empty` renders as an empty CSV field / JSON null.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Str(String),
    Num(f64),
    Int(i64),
    Bool(bool),
    Empty,
}

#[derive(Debug, Clone)]
pub struct ErrorRecord {
    pub context: String,
    pub error: String,
}

#[derive(Debug)]
pub struct Output {
    pub config: serde_json::Value,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Field>>,
    pub errors: Vec<ErrorRecord>,
}

fn params(nu: f64, omega_cap: f64, g: f64) -> Result<ModelParams, CliError> {
    ModelParams::new(nu, omega_cap, g).map_err(core_err)
}

/// Branch parameters, falling back to the degenerate closed form on the
/// g = ±(ν²+Ω) boundary.
fn aux_for(p: &ModelParams, b: &Branch) -> Result<AuxParams, CoreError> {
    if p.is_degenerate() {
        derive_aux_degenerate(p, b)
    } else {
        derive_aux(p, b)
    }
}

fn level_label(l: &SpectrumLevel) -> String {
    format!("N{}n{}{}", l.big_n, l.n, l.sign)
}

fn branch_str(b: &Branch) -> String {
    format!("{:+},{:+}", b.epsilon.value() as i64, b.eta.value() as i64)
}

fn find_level(
    levels: &[SpectrumLevel],
    n: usize,
    sign: LevelSign,
) -> Result<SpectrumLevel, CliError> {
    levels
        .iter()
        .find(|l| l.n == n && l.sign == sign)
        .copied()
        .ok_or_else(|| {
            CliError::Config(format!(
                "no level n={n} sign={sign}; available: {}",
                levels
                    .iter()
                    .map(level_label)
                    .collect::<Vec<_>>()
                    .join(" ")
            ))
        })
}

fn solve_state(
    p: &ModelParams,
    b: &Branch,
    level: &LevelArgs,
) -> Result<(SpectrumLevel, PolyGauss), CliError> {
    let aux = aux_for(p, b).map_err(core_err)?;
    let lv = find_level(&closed_spectrum(level.big_n, &aux), level.n, level.sign.0)?;
    let table = solve_tower(level.big_n, &aux, lv.energy).map_err(core_err)?;
    let state = assemble(level.big_n, &aux, &table).map_err(core_err)?;
    Ok((lv, state))
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Spectrum { phys, branch, big_n } => spectrum(phys, &branch.0, *big_n),
        Command::Scan { nu, omega_cap, g, branch, big_n } => {
            scan(*nu, *omega_cap, g, &branch.0, *big_n)
        }
        Command::State { phys, branch, level } => state_cmd(phys, &branch.0, level),
        Command::Density { phys, branch, level, window, res } => {
            let w = Window { x0: window.x0, x1: window.x1, y0: window.y0, y1: window.y1 };
            density(phys, &branch.0, level, &w, res.nx, res.ny)
        }
        Command::Uncertainty { nu, omega_cap, g, branch, big_n, n, sign } => {
            let selector = match (big_n, n, sign) {
                (None, None, None) => None,
                (Some(bn), Some(n), Some(s)) => {
                    Some(LevelArgs { big_n: *bn, n: *n, sign: *s })
                }
                _ => {
                    return Err(CliError::Config(
                        "--N, --n, --sign must be given together".into(),
                    ))
                }
            };
            uncertainty_cmd(*nu, *omega_cap, g, &branch.0, selector)
        }
        Command::Classical { phys, t0, t1, steps, a, b } => {
            classical(phys, *t0, *t1, *steps, (a.re, a.im), (b.re, b.im))
        }
        Command::Validate { phys, branch } => validate(phys, branch.as_ref().map(|b| b.0)),
        Command::Crosscheck { phys, branch, big_n } => crosscheck(phys, &branch.0, *big_n),
    }
}

fn spectrum(phys: &PhysArgs, b: &Branch, big_n: usize) -> Result<Output, CliError> {
    let p = params(phys.nu, phys.omega_cap, phys.g)?;
    let aux = aux_for(&p, b).map_err(core_err)?;
    let rows = closed_spectrum(big_n, &aux)
        .iter()
        .map(|l| {
            vec![
                Field::Int(l.big_n as i64),
                Field::Int(l.n as i64),
                Field::Str(l.sign.to_string()),
                Field::Num(l.energy.re),
                Field::Num(l.energy.im),
            ]
        })
        .collect();
    Ok(Output {
        config: json!({
            "command": "spectrum", "nu": phys.nu, "Omega": phys.omega_cap,
            "g": phys.g, "branch": branch_str(b), "N": big_n,
        }),
        columns: vec!["N", "n", "sign", "e_re", "e_im"],
        rows,
        errors: Vec::new(),
    })
}

fn scan(
    nu: f64,
    omega_cap: f64,
    g: &GRange,
    b: &Branch,
    big_n: usize,
) -> Result<Output, CliError> {
    let gs = g.values();
    if gs.is_empty() {
        return Err(CliError::Config("empty g range".into()));
    }
    let per_point: Vec<Result<Vec<Vec<Field>>, String>> = gs
        .par_iter()
        .map(|&gv| {
            let p = ModelParams::new(nu, omega_cap, gv).map_err(|e| e.to_string())?;
            let aux = aux_for(&p, b).map_err(|e| e.to_string())?;
            let mut rows = Vec::new();
            for bn in 0..=big_n {
                for l in closed_spectrum(bn, &aux) {
                    rows.push(vec![
                        Field::Num(gv),
                        Field::Str(level_label(&l)),
                        Field::Num(l.energy.re),
                        Field::Num(l.energy.im),
                        Field::Empty,
                    ]);
                }
            }
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for (gv, res) in gs.iter().zip(per_point) {
        match res {
            Ok(mut r) => rows.append(&mut r),
            Err(msg) => {
                // boundary points stay in the table as tagged rows
                rows.push(vec![
                    Field::Num(*gv),
                    Field::Empty,
                    Field::Empty,
                    Field::Empty,
                    Field::Str(msg.clone()),
                ]);
                errors.push(ErrorRecord { context: format!("g={gv}"), error: msg });
            }
        }
    }
    Ok(Output {
        config: json!({
            "command": "scan", "nu": nu, "Omega": omega_cap,
            "g": format!("{g:?}"), "branch": branch_str(b), "N": big_n,
        }),
        columns: vec!["g", "label", "e_re", "e_im", "error"],
        rows,
        errors,
    })
}

fn state_cmd(phys: &PhysArgs, b: &Branch, level: &LevelArgs) -> Result<Output, CliError> {
    let p = params(phys.nu, phys.omega_cap, phys.g)?;
    let (lv, state) = solve_state(&p, b, level)?;
    let mut rows = vec![vec![
        Field::Str("energy".into()),
        Field::Empty,
        Field::Empty,
        Field::Num(lv.energy.re),
        Field::Num(lv.energy.im),
    ]];
    for (&(i, j), &v) in &state.coeffs {
        rows.push(vec![
            Field::Str("coeff".into()),
            Field::Int(i as i64),
            Field::Int(j as i64),
            Field::Num(v.re),
            Field::Num(v.im),
        ]);
    }
    Ok(Output {
        config: json!({
            "command": "state", "nu": phys.nu, "Omega": phys.omega_cap, "g": phys.g,
            "branch": branch_str(b), "N": level.big_n, "n": level.n,
            "sign": level.sign.0.to_string(),
        }),
        columns: vec!["kind", "i", "j", "re", "im"],
        rows,
        errors: Vec::new(),
    })
}

fn density(
    phys: &PhysArgs,
    b: &Branch,
    level: &LevelArgs,
    w: &Window,
    nx: usize,
    ny: usize,
) -> Result<Output, CliError> {
    let p = params(phys.nu, phys.omega_cap, phys.g)?;
    let (_, state) = solve_state(&p, b, level)?;
    let normalise = state.aux.is_normalisable();
    let grid = density_grid(&state, w, nx, ny, normalise).map_err(core_err)?;
    let mut rows = Vec::with_capacity(nx * ny);
    for (jy, row) in grid.iter().enumerate() {
        let y = w.y0 + (w.y1 - w.y0) * jy as f64 / (ny - 1) as f64;
        for (ix, &v) in row.iter().enumerate() {
            let x = w.x0 + (w.x1 - w.x0) * ix as f64 / (nx - 1) as f64;
            rows.push(vec![Field::Num(x), Field::Num(y), Field::Num(v)]);
        }
    }
    Ok(Output {
        config: json!({
            "command": "density", "nu": phys.nu, "Omega": phys.omega_cap, "g": phys.g,
            "branch": branch_str(b), "N": level.big_n, "n": level.n,
            "sign": level.sign.0.to_string(),
            "window": [w.x0, w.x1, w.y0, w.y1], "res": [nx, ny],
            "normalised": normalise,
        }),
        columns: vec!["x", "y", "density"],
        rows,
        errors: Vec::new(),
    })
}

fn uncertainty_cmd(
    nu: f64,
    omega_cap: f64,
    g: &GRange,
    b: &Branch,
    selector: Option<LevelArgs>,
) -> Result<Output, CliError> {
    let gs = g.values();
    if gs.is_empty() {
        return Err(CliError::Config("empty g range".into()));
    }
    let per_point: Vec<Result<(String, f64, f64), String>> = gs
        .par_iter()
        .map(|&gv| {
            let p = ModelParams::new(nu, omega_cap, gv).map_err(|e| e.to_string())?;
            let (label, state) = match &selector {
                None => {
                    let aux = aux_for(&p, b).map_err(|e| e.to_string())?;
                    ("psi0".to_string(), PolyGauss::ground(aux))
                }
                Some(level) => {
                    let (lv, state) =
                        solve_state(&p, b, level).map_err(|e| e.to_string())?;
                    (level_label(&lv), state)
                }
            };
            let ux = uncertainty(&state, Axis::X).map_err(|e| e.to_string())?;
            let uy = uncertainty(&state, Axis::Y).map_err(|e| e.to_string())?;
            Ok((label, ux, uy))
        })
        .collect();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for (gv, res) in gs.iter().zip(per_point) {
        match res {
            Ok((label, ux, uy)) => rows.push(vec![
                Field::Num(*gv),
                Field::Str(label),
                Field::Num(ux),
                Field::Num(uy),
                Field::Empty,
            ]),
            Err(msg) => {
                rows.push(vec![
                    Field::Num(*gv),
                    Field::Empty,
                    Field::Empty,
                    Field::Empty,
                    Field::Str(msg.clone()),
                ]);
                errors.push(ErrorRecord { context: format!("g={gv}"), error: msg });
            }
        }
    }
    Ok(Output {
        config: json!({
            "command": "uncertainty", "nu": nu, "Omega": omega_cap,
            "g": format!("{g:?}"), "branch": branch_str(b),
        }),
        columns: vec!["g", "state", "dx_dpx", "dy_dpy", "error"],
        rows,
        errors,
    })
}

fn classical(
    phys: &PhysArgs,
    t0: f64,
    t1: f64,
    steps: usize,
    a: (f64, f64),
    b: (f64, f64),
) -> Result<Output, CliError> {
    let p = params(phys.nu, phys.omega_cap, phys.g)?;
    let pu = pu_constants(&p).map_err(core_err)?;
    let amps = ModeAmplitudes {
        a: Complex64::new(a.0, a.1),
        b: Complex64::new(b.0, b.1),
    };
    let path = trajectory(&pu, Regime::I, &amps, t0, t1, steps).map_err(core_err)?;
    let rows = path
        .iter()
        .map(|(t, s)| {
            vec![
                Field::Num(*t),
                Field::Num(s.x),
                Field::Num(s.y),
                Field::Num(s.px),
                Field::Num(s.py),
            ]
        })
        .collect();
    Ok(Output {
        config: json!({
            "command": "classical", "nu": phys.nu, "Omega": phys.omega_cap,
            "g": phys.g, "t0": t0, "t1": t1, "steps": steps,
            "a": [a.0, a.1], "b": [b.0, b.1], "regime": "I",
        }),
        columns: vec!["t", "x", "y", "px", "py"],
        rows,
        errors: Vec::new(),
    })
}

fn validate(phys: &PhysArgs, branch: Option<Branch>) -> Result<Output, CliError> {
    let p = params(phys.nu, phys.omega_cap, phys.g)?;
    let branches: Vec<Branch> = match branch {
        Some(b) => vec![b],
        None => Branch::all().to_vec(),
    };
    let rows = branches
        .iter()
        .map(|b| {
            let rep = classify_domain(&p, b);
            vec![
                Field::Int(b.epsilon.value() as i64),
                Field::Int(b.eta.value() as i64),
                Field::Bool(rep.e0_real),
                Field::Bool(rep.normalisable),
                Field::Bool(rep.gamma_map_valid),
                Field::Bool(rep.degenerate),
            ]
        })
        .collect();
    Ok(Output {
        config: json!({
            "command": "validate", "nu": phys.nu, "Omega": phys.omega_cap, "g": phys.g,
        }),
        columns: vec![
            "epsilon",
            "eta",
            "e0_real",
            "normalisable",
            "gamma_map_valid",
            "degenerate",
        ],
        rows,
        errors: Vec::new(),
    })
}

fn crosscheck(phys: &PhysArgs, b: &Branch, big_n: usize) -> Result<Output, CliError> {
    let p = params(phys.nu, phys.omega_cap, phys.g)?;
    let rep = cross_validate(&p, b, big_n).map_err(core_err)?;
    let rows = rep
        .entries
        .iter()
        .map(|e| {
            vec![
                Field::Int(e.big_n as i64),
                Field::Int(e.n as i64),
                Field::Str(e.sign.to_string()),
                Field::Int(e.fock_n as i64),
                Field::Int(e.fock_m as i64),
                Field::Num(e.energy_recurrence.re),
                Field::Num(e.energy_recurrence.im),
                Field::Num(e.energy_fock.re),
                Field::Num(e.energy_fock.im),
                Field::Num(e.energy_rel_err),
                Field::Num(e.proportionality_err),
                Field::Bool(e.ok),
            ]
        })
        .collect();
    Ok(Output {
        config: json!({
            "command": "crosscheck", "nu": phys.nu, "Omega": phys.omega_cap,
            "g": phys.g, "branch": branch_str(b), "N": big_n, "all_ok": rep.all_ok,
        }),
        columns: vec![
            "N",
            "n",
            "sign",
            "fock_n",
            "fock_m",
            "e_rec_re",
            "e_rec_im",
            "e_fock_re",
            "e_fock_im",
            "energy_rel_err",
            "proportionality_err",
            "ok",
        ],
        rows,
        errors: Vec::new(),
    })
}
