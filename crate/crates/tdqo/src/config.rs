//! JSON run configuration (`"schema": 1`) and its resolution into library inputs.

use crate::descriptor::{GridDesc, PacketDesc, StateDesc};
use crate::error::{CliError, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use tdqo_core::packet::{make_packet, PacketMode, PhotonPacket, Route, Shape};
use tdqo_core::transforms::TimeGrid;
use tdqo_core::{Complex64, PhysConsts};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PacketField {
    Descriptor(String),
    Object(PacketDesc),
}

impl PacketField {
    pub fn resolve(&self) -> Result<PacketDesc> {
        match self {
            PacketField::Descriptor(s) => s.parse(),
            PacketField::Object(p) => Ok(p.clone()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConstantsField {
    Named(NamedConstants),
    Explicit { z: f64, h: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedConstants {
    Natural,
    Si,
}

impl ConstantsField {
    pub fn resolve(&self) -> Result<PhysConsts> {
        match *self {
            ConstantsField::Named(NamedConstants::Natural) => Ok(PhysConsts::NATURAL),
            ConstantsField::Named(NamedConstants::Si) => Ok(PhysConsts::SI),
            ConstantsField::Explicit { z, h } => PhysConsts::new(z, h).map_err(|e| CliError::config(e.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeField {
    #[default]
    Idealized,
    BandLimited,
}

impl From<ModeField> for PacketMode {
    fn from(m: ModeField) -> Self {
        match m {
            ModeField::Idealized => PacketMode::Idealized,
            ModeField::BandLimited => PacketMode::BandLimited,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputField {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// The on-disk configuration. Every field is optional so command-line flags can fill or override it.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packet: Option<PacketField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// `spectral`, `spectral:<pad>` or `finite-part`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputField>,
}

impl RunConfig {
    pub fn empty() -> Self {
        RunConfig { schema: SCHEMA, ..Default::default() }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::config(format!("config: {e}")))?;
        if cfg.schema != SCHEMA {
            return Err(CliError::config(format!("config schema {} is not supported (expected {SCHEMA})", cfg.schema)));
        }
        Ok(cfg)
    }
}

pub fn parse_route(s: &str) -> Result<Route> {
    match s.trim() {
        "finite-part" => Ok(Route::FinitePart),
        "spectral" => Ok(Route::SPECTRAL_DEFAULT),
        other => {
            let pad = other
                .strip_prefix("spectral:")
                .and_then(|p| p.parse::<usize>().ok())
                .ok_or_else(|| CliError::config(format!("unknown route `{other}` (finite-part, spectral or spectral:<pad>)")))?;
            if pad < 2 {
                return Err(CliError::config(format!("spectral padding must be at least 2, got {pad}")));
            }
            Ok(Route::Spectral { pad_factor: pad })
        }
    }
}

pub fn route_name(r: Route) -> String {
    match r {
        Route::FinitePart => "finite-part".into(),
        Route::Spectral { pad_factor } => format!("spectral:{pad_factor}"),
    }
}

/// A fully validated run.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub packet: PhotonPacket,
    pub packet_desc: PacketDesc,
    pub state: StateDesc,
    pub consts: PhysConsts,
    pub mode: PacketMode,
    pub route: Route,
    pub tau: f64,
    pub output: OutputField,
    /// The configuration with every default filled in, echoed into sidecars.
    pub echo: RunConfig,
}

impl RunConfig {
    pub fn resolve(&self) -> Result<Resolved> {
        let packet_desc = self.packet.as_ref().ok_or_else(|| CliError::config("no packet given (--packet or config)"))?.resolve()?;
        let state: StateDesc = self.state.as_deref().unwrap_or("fock:1").parse()?;
        let consts = self.constants.unwrap_or(ConstantsField::Named(NamedConstants::Natural)).resolve()?;
        let mode = self.mode.unwrap_or_default();
        let route = parse_route(self.route.as_deref().unwrap_or("spectral"))?;
        let tau = self.tau.unwrap_or(0.0);
        if !tau.is_finite() {
            return Err(CliError::config("tau must be finite"));
        }
        let (packet, grid) = build_packet(&packet_desc, self.grid)?;
        let packet = packet.with_tau(tau);
        let echo = RunConfig {
            schema: SCHEMA,
            grid: Some(GridDesc { n: grid.n(), dt: grid.dt(), t0: Some(grid.t0()) }),
            packet: Some(PacketField::Object(packet_desc.clone())),
            state: Some(state.to_string()),
            constants: Some(ConstantsField::Explicit { z: consts.z, h: consts.h }),
            mode: Some(mode),
            tau: Some(tau),
            route: Some(route_name(route)),
            output: self.output.clone(),
        };
        Ok(Resolved {
            packet,
            packet_desc,
            state,
            consts,
            mode: mode.into(),
            route,
            tau,
            output: self.output.clone().unwrap_or_default(),
            echo,
        })
    }
}

/// Packet on its packet-local grid. File packets carry their own grid; a given
/// grid must then agree with it.
pub fn build_packet(desc: &PacketDesc, grid: Option<GridDesc>) -> Result<(PhotonPacket, TimeGrid)> {
    let shape_grid = |g: Option<GridDesc>| -> Result<TimeGrid> {
        let g = g.ok_or_else(|| CliError::config("no grid given (--grid n=..,dt=.. or config)"))?;
        Ok(TimeGrid::new(g.n, g.dt, g.t0.unwrap_or_else(|| g.default_t0(desc)))?)
    };
    let (shape, grid) = match desc {
        PacketDesc::Exp { sigma } => (Shape::ExponentialDecay { sigma_t: *sigma }, shape_grid(grid)?),
        PacketDesc::Gauss { sigma, f0, center } => {
            (Shape::Gaussian { sigma: *sigma, f0: *f0, center: *center }, shape_grid(grid)?)
        }
        PacketDesc::File { path } => {
            let trace = crate::io::read_trace(path, 2, 3)?;
            if let Some(g) = grid {
                if g.n != trace.grid.n() || (g.dt - trace.grid.dt()).abs() > 1e-9 * g.dt {
                    return Err(CliError::config(format!(
                        "packet file {} has n={}, dt={} but the grid asks for n={}, dt={}",
                        path.display(),
                        trace.grid.n(),
                        trace.grid.dt(),
                        g.n,
                        g.dt
                    )));
                }
            }
            let im = trace.columns.get(1);
            let samples = trace.columns[0]
                .iter()
                .enumerate()
                .map(|(j, &re)| Complex64::new(re, im.map_or(0.0, |c| c[j])))
                .collect();
            (Shape::Custom { samples, jumps: Vec::new() }, trace.grid)
        }
    };
    Ok((make_packet(shape, grid)?, grid))
}
