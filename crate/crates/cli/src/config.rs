//! Flag parsing. Small wrapper types implement `FromStr` so clap surfaces
//! readable messages for malformed compound flags (ranges, windows, pairs).

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use ghostosc::params::{Branch, Sign};
use ghostosc::recurrence::LevelSign;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "ghostosc",
    about = "Exact spectral solver for the 2D ghost oscillator H = p_x² − p_y² + ν²x² + Ωy² + gxy",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Output path (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closed spectrum of polynomial level N: the N+1 energies E_{Nn}^±.
    Spectrum {
        #[command(flatten)]
        phys: PhysArgs,
        #[arg(long, allow_hyphen_values = true)]
        branch: BranchArg,
        #[arg(long = "N")]
        big_n: usize,
    },
    /// Energy levels of all N ≤ --N over a g-range (avoided-crossing data).
    Scan {
        #[arg(long, allow_hyphen_values = true)]
        nu: f64,
        #[arg(long = "Omega", allow_hyphen_values = true)]
        omega_cap: f64,
        /// Either a single value or start:end:step (inclusive start,
        /// exclusive past-end).
        #[arg(long, allow_hyphen_values = true)]
        g: GRange,
        #[arg(long, allow_hyphen_values = true)]
        branch: BranchArg,
        #[arg(long = "N")]
        big_n: usize,
    },
    /// Polynomial coefficients and energy of one eigenstate (N, n, ±).
    State {
        #[command(flatten)]
        phys: PhysArgs,
        #[arg(long, allow_hyphen_values = true)]
        branch: BranchArg,
        #[command(flatten)]
        level: LevelArgs,
    },
    /// |ψ|² on a grid over a window.
    Density {
        #[command(flatten)]
        phys: PhysArgs,
        #[arg(long, allow_hyphen_values = true)]
        branch: BranchArg,
        #[command(flatten)]
        level: LevelArgs,
        /// x0,x1,y0,y1
        #[arg(long, allow_hyphen_values = true)]
        window: WindowArg,
        /// nx,ny
        #[arg(long)]
        res: ResArg,
    },
    /// Δx·Δp_x and Δy·Δp_y over a g-range (ground state unless a level is
    /// selected).
    Uncertainty {
        #[arg(long, allow_hyphen_values = true)]
        nu: f64,
        #[arg(long = "Omega", allow_hyphen_values = true)]
        omega_cap: f64,
        #[arg(long, allow_hyphen_values = true)]
        g: GRange,
        #[arg(long, allow_hyphen_values = true)]
        branch: BranchArg,
        #[arg(long = "N")]
        big_n: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        sign: Option<SignArg>,
    },
    /// Classical trajectory (t, x, y, p_x, p_y) from mode amplitudes.
    Classical {
        #[command(flatten)]
        phys: PhysArgs,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t0: f64,
        #[arg(long, allow_hyphen_values = true)]
        t1: f64,
        #[arg(long)]
        steps: usize,
        /// Mode amplitude a as re,im
        #[arg(long, allow_hyphen_values = true)]
        a: AmpArg,
        /// Mode amplitude b as re,im
        #[arg(long, allow_hyphen_values = true)]
        b: AmpArg,
    },
    /// Domain report per branch (all four when --branch is omitted).
    Validate {
        #[command(flatten)]
        phys: PhysArgs,
        #[arg(long, allow_hyphen_values = true)]
        branch: Option<BranchArg>,
    },
    /// Recurrence-vs-Fock cross-validation up to level N.
    Crosscheck {
        #[command(flatten)]
        phys: PhysArgs,
        #[arg(long, allow_hyphen_values = true)]
        branch: BranchArg,
        #[arg(long = "N")]
        big_n: usize,
    },
}

#[derive(Parser, Debug, Clone, Copy)]
pub struct PhysArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub nu: f64,
    #[arg(long = "Omega", allow_hyphen_values = true)]
    pub omega_cap: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub g: f64,
}

#[derive(Parser, Debug, Clone, Copy)]
pub struct LevelArgs {
    #[arg(long = "N")]
    pub big_n: usize,
    #[arg(long)]
    pub n: usize,
    /// +, - or 0 (mid level of even N)
    #[arg(long, allow_hyphen_values = true)]
    pub sign: SignArg,
}

/// Either a single g or an inclusive-start, exclusive-past-end arithmetic
/// range `start:end:step`.
#[derive(Debug, Clone, Copy)]
pub enum GRange {
    Single(f64),
    Range { start: f64, end: f64, step: f64 },
}

impl GRange {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            GRange::Single(g) => vec![g],
            GRange::Range { start, end, step } => {
                let mut out = Vec::new();
                let mut k = 0u64;
                loop {
                    let g = start + step * k as f64;
                    if (step > 0.0 && g >= end) || (step < 0.0 && g <= end) {
                        break;
                    }
                    out.push(g);
                    k += 1;
                }
                out
            }
        }
    }
}

impl FromStr for GRange {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let f = |v: &str| v.parse::<f64>().map_err(|e| format!("'{v}': {e}"));
        match parts.as_slice() {
            [one] => Ok(GRange::Single(f(one)?)),
            [a, b, c] => {
                let (start, end, step) = (f(a)?, f(b)?, f(c)?);
                if step == 0.0 || !step.is_finite() {
                    return Err("step must be nonzero and finite".into());
                }
                Ok(GRange::Range { start, end, step })
            }
            _ => Err("expected <g> or start:end:step".into()),
        }
    }
}

/// `eps,eta` with values ±1, e.g. `-1,+1`.
#[derive(Debug, Clone, Copy)]
pub struct BranchArg(pub Branch);

impl FromStr for BranchArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (e, h) = s
            .split_once(',')
            .ok_or_else(|| "expected eps,eta (e.g. -1,+1)".to_string())?;
        let sign = |v: &str| match v.trim() {
            "+1" | "1" | "+" => Ok(Sign::Plus),
            "-1" | "-" => Ok(Sign::Minus),
            other => Err(format!("'{other}' is not ±1")),
        };
        Ok(BranchArg(Branch::new(sign(e)?, sign(h)?)))
    }
}

/// +, -, or 0.
#[derive(Debug, Clone, Copy)]
pub struct SignArg(pub LevelSign);

impl FromStr for SignArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+" => Ok(SignArg(LevelSign::Plus)),
            "-" => Ok(SignArg(LevelSign::Minus)),
            "0" => Ok(SignArg(LevelSign::Mid)),
            other => Err(format!("'{other}' is not one of +, -, 0")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct WindowArg {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl FromStr for WindowArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}")))
            .collect::<Result<_, _>>()?;
        if v.len() != 4 {
            return Err("expected x0,x1,y0,y1".into());
        }
        Ok(WindowArg { x0: v[0], x1: v[1], y0: v[2], y1: v[3] })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ResArg {
    pub nx: usize,
    pub ny: usize,
}

impl FromStr for ResArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(',').ok_or_else(|| "expected nx,ny".to_string())?;
        let p = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("'{t}': {e}"));
        Ok(ResArg { nx: p(a)?, ny: p(b)? })
    }
}

/// Complex amplitude as `re,im`.
#[derive(Debug, Clone, Copy)]
pub struct AmpArg {
    pub re: f64,
    pub im: f64,
}

impl FromStr for AmpArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(',').ok_or_else(|| "expected re,im".to_string())?;
        let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
        Ok(AmpArg { re: p(a)?, im: p(b)? })
    }
}
