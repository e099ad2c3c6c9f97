//! Mini-grammars for `--state`, `--packet` and `--grid`.
//!
//! ```text
//! state  := vacuum | fock:<N> | coherent:<re>[+<im>i] | coherent:<im>i
//! packet := exp:sigma=<x> | gauss:sigma=<x>[,f0=<y>][,center=<c>] | file:<path>
//! grid   := n=<N>,dt=<x>[,t0=<x>]
//! ```

use crate::error::{CliError, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;
use tdqo_core::states::StateKind;
use tdqo_core::Complex64;

/// Parsed `--state` value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateDesc(pub StateKind);

impl FromStr for StateDesc {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let kind = if s == "vacuum" {
            StateKind::Vacuum
        } else if let Some(n) = s.strip_prefix("fock:") {
            let n: u32 = n.trim().parse().map_err(|_| CliError::config(format!("bad photon number in state `{s}`")))?;
            StateKind::Fock { n }
        } else if let Some(a) = s.strip_prefix("coherent:") {
            StateKind::Coherent { alpha: parse_complex(a).ok_or_else(|| CliError::config(format!("bad amplitude in state `{s}`")))? }
        } else {
            return Err(CliError::config(format!("unknown state `{s}` (expected vacuum, fock:<N> or coherent:<re>[+<im>i])")));
        };
        kind.validate()?;
        Ok(StateDesc(kind))
    }
}

impl std::fmt::Display for StateDesc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            StateKind::Vacuum => write!(f, "vacuum"),
            StateKind::Fock { n } => write!(f, "fock:{n}"),
            StateKind::Coherent { alpha } => {
                let sign = if alpha.im.is_sign_negative() { '-' } else { '+' };
                write!(f, "coherent:{}{}{}i", crate::fmt::g17(alpha.re), sign, crate::fmt::g17(alpha.im.abs()))
            }
        }
    }
}

/// `a`, `a+bi`, `a-bi`, `bi`, `i`, `-i`.
fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    let Some(body) = s.strip_suffix('i') else {
        return s.parse().ok().map(|re| Complex64::new(re, 0.0));
    };
    // Split at the last sign that is not part of an exponent or the leading sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| -> Option<f64> {
        match t {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => t.parse().ok(),
        }
    };
    match split {
        Some(k) => Some(Complex64::new(body[..k].parse().ok()?, imag(&body[k..])?)),
        None => Some(Complex64::new(0.0, imag(body)?)),
    }
}

/// Parsed `--packet` value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum PacketDesc {
    Exp { sigma: f64 },
    Gauss {
        sigma: f64,
        #[serde(default)]
        f0: f64,
        #[serde(default)]
        center: f64,
    },
    /// CSV with columns `t,re[,im]` on the run grid.
    File { path: PathBuf },
}

pub(crate) fn key_values(s: &str, allowed: &[&str]) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| CliError::config(format!("expected key=value, got `{part}`")))?;
        let k = k.trim();
        if !allowed.contains(&k) {
            return Err(CliError::config(format!("unknown key `{k}` (allowed: {})", allowed.join(", "))));
        }
        let v: f64 = v.trim().parse().map_err(|_| CliError::config(format!("bad number for `{k}`: `{v}`")))?;
        if out.insert(k.to_string(), v).is_some() {
            return Err(CliError::config(format!("duplicate key `{k}`")));
        }
    }
    Ok(out)
}

fn required(map: &BTreeMap<String, f64>, key: &str, what: &str) -> Result<f64> {
    map.get(key).copied().ok_or_else(|| CliError::config(format!("{what} needs `{key}=`")))
}

impl FromStr for PacketDesc {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("exp:") {
            let kv = key_values(rest, &["sigma"])?;
            Ok(PacketDesc::Exp { sigma: required(&kv, "sigma", "exp packet")? })
        } else if let Some(rest) = s.strip_prefix("gauss:") {
            let kv = key_values(rest, &["sigma", "f0", "center"])?;
            Ok(PacketDesc::Gauss {
                sigma: required(&kv, "sigma", "gauss packet")?,
                f0: kv.get("f0").copied().unwrap_or(0.0),
                center: kv.get("center").copied().unwrap_or(0.0),
            })
        } else if let Some(path) = s.strip_prefix("file:") {
            if path.is_empty() {
                return Err(CliError::config("file packet needs a path"));
            }
            Ok(PacketDesc::File { path: PathBuf::from(path) })
        } else {
            Err(CliError::config(format!("unknown packet `{s}` (expected exp:, gauss: or file:)")))
        }
    }
}

/// Parsed `--grid` value; `t0` defaults per packet shape.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDesc {
    pub n: usize,
    pub dt: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
}

impl FromStr for GridDesc {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let kv = key_values(s, &["n", "dt", "t0"])?;
        let n = required(&kv, "n", "grid")?;
        if n.fract() != 0.0 || n < 0.0 {
            return Err(CliError::config(format!("grid n must be a non-negative integer, got {n}")));
        }
        Ok(GridDesc { n: n as usize, dt: required(&kv, "dt", "grid")?, t0: kv.get("t0").copied() })
    }
}

impl GridDesc {
    /// Exponential packets start at `−n/8·dt` so the onset sits inside the window;
    /// Gaussians are centered on their own center.
    pub fn default_t0(&self, packet: &PacketDesc) -> f64 {
        match packet {
            PacketDesc::Exp { .. } => -((self.n / 8) as f64) * self.dt,
            PacketDesc::Gauss { center, .. } => center - (self.n / 2) as f64 * self.dt,
            PacketDesc::File { .. } => -((self.n / 2) as f64) * self.dt,
        }
    }
}
