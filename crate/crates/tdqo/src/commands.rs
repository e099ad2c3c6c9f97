//! Subcommand implementations. Each returns the process exit status on success.

use crate::config::{route_name, Format, Resolved, RunConfig};
use crate::descriptor::key_values;
use crate::error::{CliError, Result};
use crate::io::{self, Column};
use crate::VERSION;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::path::{Path, PathBuf};
use tdqo_core::fieldconv::{
    auto_boundary, photon_flux, quadratures_from_voltage, voltage_from_quadratures, FieldOptions, FieldWarning,
    QuadraturePair,
};
use tdqo_core::opalgebra::ModeSystem;
use tdqo_core::packet::{
    chi_finite_part_at, compute_chi, mode_scale, positive_frequency_weight, ChiFunction, ChiOptions, PacketError,
    PacketMode, PhotonPacket, Route,
};
use tdqo_core::states::{arrival_stats, arrival_stats_with_oracle, MomentReport, Projection, StateKind, StateSpec};
use tdqo_core::transforms::{Boundary, OracleError, Signal, Unit, Warning};
use tdqo_core::{Complex64, PhysConsts};

/// χ on the packet grid. The finite-part route evaluates samples in parallel;
/// the result does not depend on the thread count.
pub fn chi_parallel(p: &PhotonPacket, route: Route, opts: &ChiOptions) -> Result<ChiFunction> {
    let Route::FinitePart = route else {
        return Ok(compute_chi(p, route, opts)?);
    };
    let w = positive_frequency_weight(p);
    let scale = mode_scale(opts.mode, w);
    let grid = *p.grid();
    let values: Vec<std::result::Result<Complex64, PacketError>> =
        (0..grid.n()).into_par_iter().map(|j| chi_finite_part_at(p, grid.time(j), &opts.quad)).collect();
    let mut chi = Vec::with_capacity(grid.n());
    let mut singular = Vec::new();
    for (j, v) in values.into_iter().enumerate() {
        match v {
            Ok(c) => chi.push(c * scale),
            Err(PacketError::Oracle(OracleError::AtJump { .. })) => {
                singular.push(j);
                chi.push(Complex64::new(f64::NAN, f64::NAN));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let chi = Signal::new(grid, chi, Unit::Dimensionless)?;
    Ok(ChiFunction { chi, route, mode: opts.mode, positive_weight: w, singular })
}

/// Moment traces for a resolved run. The vacuum skips χ entirely.
pub fn trace_moments(r: &Resolved) -> Result<MomentReport> {
    let opts = ChiOptions { mode: r.mode, ..Default::default() };
    let chi = if r.state.0 == StateKind::Vacuum {
        let w = positive_frequency_weight(&r.packet);
        ChiFunction {
            chi: Signal::zeros(*r.packet.grid(), Unit::Dimensionless),
            route: r.route,
            mode: r.mode,
            positive_weight: w,
            singular: Vec::new(),
        }
    } else {
        chi_parallel(&r.packet, r.route, &opts)?
    };
    Ok(MomentReport::from_chi(r.state.0, &chi, r.tau, r.consts)?)
}

fn mode_name(m: PacketMode) -> &'static str {
    match m {
        PacketMode::Idealized => "idealized",
        PacketMode::BandLimited => "band-limited",
    }
}

fn real(s: &Signal) -> Vec<f64> {
    s.real_parts()
}

#[derive(Serialize)]
struct TraceMeta<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a RunConfig,
    positive_frequency_weight: f64,
    f_max: f64,
    mode: &'static str,
    route: String,
    columns: [&'static str; 4],
    singular_samples: &'a [usize],
}

pub fn packet_trace(cfg: &RunConfig) -> Result<()> {
    let r = cfg.resolve()?;
    let rep = trace_moments(&r)?;
    let t: Vec<f64> = rep.grid.times().collect();
    let (mean, var, vac) = (real(&rep.mean_v), real(&rep.var_v_subtracted), real(&rep.vac_var));
    const NAMES: [&str; 4] = ["t", "mean_v", "var_v_sub", "vac_var"];
    let path = r.output.path.as_deref();
    match r.output.format {
        Format::Csv => io::emit(path, |w| {
            io::write_csv(w, &NAMES, &[Column::Float(&t), Column::Float(&mean), Column::Float(&var), Column::Float(&vac)])
        })?,
        Format::Json => io::write_json(path, &json!({"t": t, "mean_v": mean, "var_v_sub": var, "vac_var": vac}))?,
    }
    if let Some(p) = path {
        io::write_sidecar(
            p,
            &TraceMeta {
                tool: "tdqo",
                version: VERSION,
                command: "packet-trace",
                config: &r.echo,
                positive_frequency_weight: rep.meta.positive_weight,
                f_max: rep.meta.f_max,
                mode: mode_name(rep.meta.mode),
                route: route_name(rep.meta.route),
                columns: NAMES,
                singular_samples: &rep.singular,
            },
        )?;
    }
    Ok(())
}

/// `auto`, `periodic`, `zeropad` or `zeropad:<k>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryChoice {
    Auto,
    Fixed(Boundary),
}

impl std::str::FromStr for BoundaryChoice {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(BoundaryChoice::Auto),
            "periodic" => Ok(BoundaryChoice::Fixed(Boundary::Periodic)),
            "zeropad" => Ok(BoundaryChoice::Fixed(Boundary::ZeroPad(2))),
            _ => {
                let k = s
                    .strip_prefix("zeropad:")
                    .and_then(|k| k.parse::<usize>().ok())
                    .ok_or_else(|| CliError::config(format!("unknown boundary `{s}` (auto, periodic, zeropad[:k])")))?;
                if k < 2 {
                    return Err(CliError::config(format!("zero-padding factor must be at least 2, got {k}")));
                }
                Ok(BoundaryChoice::Fixed(Boundary::ZeroPad(k)))
            }
        }
    }
}

fn boundary_name(b: Boundary) -> String {
    match b {
        Boundary::Periodic => "periodic".into(),
        Boundary::ZeroPad(k) => format!("zeropad:{k}"),
    }
}

fn warning_text(w: &FieldWarning) -> String {
    match w {
        FieldWarning::Input(Warning::DcComponent { ratio }) => format!("DC component {ratio:e} of sup-norm discarded"),
        FieldWarning::Input(Warning::LowFrequencyEnergy { fraction }) => {
            format!("{:.3}% of spectral energy in the lowest bins", 100.0 * fraction)
        }
        FieldWarning::MaskMismatch => "p and q validity masks differ".into(),
    }
}

pub struct QuadArgs {
    pub input: PathBuf,
    pub output: Option<PathBuf>,
    pub consts: PhysConsts,
    pub boundary: BoundaryChoice,
    pub invert: bool,
}

#[derive(Serialize)]
struct QuadMeta {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    input: PathBuf,
    invert: bool,
    constants: serde_json::Value,
    boundary: String,
    boundary_requested: String,
    n: usize,
    dt: f64,
    t0: f64,
    valid_samples: usize,
    columns: Vec<&'static str>,
    warnings: Vec<String>,
}

pub fn quadratures(a: &QuadArgs) -> Result<()> {
    let (min, max) = if a.invert { (3, 4) } else { (2, 2) };
    let trace = io::read_trace(&a.input, min, max)?;
    let grid = trace.grid;
    let t: Vec<f64> = grid.times().collect();
    let (names, boundary, valid, warnings, cols): (Vec<&str>, Boundary, Vec<bool>, Vec<FieldWarning>, Vec<Vec<f64>>);
    if a.invert {
        let p = Signal::from_real(grid, &trace.columns[0], Unit::Dimensionless)?;
        let q = Signal::from_real(grid, &trace.columns[1], Unit::Dimensionless)?;
        let mask: Vec<bool> = match trace.columns.get(2) {
            Some(m) => m
                .iter()
                .enumerate()
                .map(|(j, &x)| match x {
                    x if x == 0.0 => Ok(false),
                    x if x == 1.0 => Ok(true),
                    _ => Err(CliError::config(format!("{}: valid column must be 0 or 1 (data row {})", a.input.display(), j + 1))),
                })
                .collect::<Result<_>>()?,
            None => vec![true; grid.n()],
        };
        boundary = resolve_boundary(a.boundary, &p);
        let pair = QuadraturePair::from_parts(p, q, a.consts, &mask, &mask)?;
        let v = voltage_from_quadratures(&pair, &FieldOptions { boundary })?;
        names = vec!["t", "v", "valid"];
        valid = pair.valid;
        warnings = v.warnings;
        cols = vec![real(&v.value)];
    } else {
        let v = Signal::from_real(grid, &trace.columns[0], Unit::Volts)?;
        boundary = resolve_boundary(a.boundary, &v);
        let out = quadratures_from_voltage(&v, a.consts, &FieldOptions { boundary })?;
        let flux = photon_flux(&out.value);
        names = vec!["t", "p", "q", "n", "valid"];
        valid = flux.valid.clone();
        warnings = out.warnings;
        cols = vec![real(&out.value.p), real(&out.value.q), real(&flux.n)];
    }
    let mut columns = vec![Column::Float(&t)];
    columns.extend(cols.iter().map(|c| Column::Float(c)));
    columns.push(Column::Flag(&valid));
    io::emit(a.output.as_deref(), |w| io::write_csv(w, &names, &columns))?;
    let warnings: Vec<String> = warnings.iter().map(warning_text).collect();
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    if let Some(p) = &a.output {
        io::write_sidecar(
            p,
            &QuadMeta {
                tool: "tdqo",
                version: VERSION,
                command: "quadratures",
                input: a.input.clone(),
                invert: a.invert,
                constants: json!({"z": a.consts.z, "h": a.consts.h}),
                boundary: boundary_name(boundary),
                boundary_requested: match a.boundary {
                    BoundaryChoice::Auto => "auto".into(),
                    BoundaryChoice::Fixed(b) => boundary_name(b),
                },
                n: grid.n(),
                dt: grid.dt(),
                t0: grid.t0(),
                valid_samples: valid.iter().filter(|&&m| m).count(),
                columns: names.clone(),
                warnings,
            },
        )?;
    }
    Ok(())
}

fn resolve_boundary(choice: BoundaryChoice, s: &Signal) -> Boundary {
    match choice {
        BoundaryChoice::Auto => auto_boundary(s),
        BoundaryChoice::Fixed(b) => b,
    }
}

/// `--oracle m=<M>,n_max=<n>,df=<Δf>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleSpec {
    pub m: usize,
    pub n_max: usize,
    pub delta_f: f64,
}

impl std::str::FromStr for OracleSpec {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        let kv = key_values(s, &["m", "n_max", "df"])?;
        let int = |k: &str| -> Result<usize> {
            let v = *kv.get(k).ok_or_else(|| CliError::config(format!("--oracle needs `{k}=`")))?;
            if v.fract() != 0.0 || v < 1.0 {
                return Err(CliError::config(format!("--oracle {k} must be a positive integer, got {v}")));
            }
            Ok(v as usize)
        };
        Ok(OracleSpec { m: int("m")?, n_max: int("n_max")?, delta_f: kv.get("df").copied().unwrap_or(1.0) })
    }
}

#[derive(Serialize)]
struct Field {
    value: f64,
    provenance: &'static str,
}

fn closed(value: f64) -> Field {
    Field { value, provenance: "closed-form" }
}

fn matrix(value: f64) -> Field {
    Field { value, provenance: "matrix-oracle" }
}

/// Arrival statistics as JSON. With an oracle, θ moments come from the truncated
/// Fock-space matrices (in packet-local time) and are tagged accordingly.
pub fn arrival(cfg: &RunConfig, oracle: Option<OracleSpec>, projection: Projection) -> Result<()> {
    let r = cfg.resolve()?;
    let spec = StateSpec::new(r.state.0, &r.packet)?;
    let report = match oracle {
        Some(o) => {
            let sys = ModeSystem::new(o.m, o.n_max, o.delta_f).map_err(|e| CliError::config(e.to_string()))?;
            arrival_stats_with_oracle(&spec, &sys, projection, r.consts)?
        }
        None => arrival_stats(&spec)?,
    };
    let mut fields = serde_json::Map::new();
    let mut put = |k: &str, f: Field| {
        fields.insert(k.into(), serde_json::to_value(f).expect("serializable"));
    };
    put("mean_arrival", closed(report.mean_arrival));
    put("intra_pulse_spread", closed(report.intra_pulse_spread));
    put("n_mean", closed(report.n_mean));
    match report.theta_oracle {
        Some(o) => {
            put("theta_mean", matrix(o.moments.theta_mean_normal));
            put("theta_mean_closed_form", closed(report.theta_mean));
            put("theta_variance", matrix(o.moments.theta_variance));
            put("theta_mean_symmetric", matrix(o.moments.theta_mean));
            put("h_mean", matrix(o.moments.h_mean));
            put("h_variance", matrix(o.moments.h_variance));
            put("n_normal", matrix(o.moments.n_normal));
            put("n_symmetric", matrix(o.moments.n_symmetric));
            put("cutoff_weight", matrix(o.moments.cutoff_weight));
        }
        None => put("theta_mean", closed(report.theta_mean)),
    }
    let out = json!({
        "schema": crate::config::SCHEMA,
        "tool": "tdqo",
        "version": VERSION,
        "config": r.echo,
        "oracle": oracle.map(|o| json!({
            "m": o.m,
            "n_max": o.n_max,
            "delta_f": o.delta_f,
            "projection": match projection { Projection::Resampled => "resampled", Projection::Normalized => "normalized" },
            "time_origin": "packet",
        })),
        "fields": fields,
    });
    let path = r.output.path.as_deref();
    io::write_json(path, &out)?;
    if let Some(p) = path {
        io::write_sidecar(p, &json!({"tool": "tdqo", "version": VERSION, "command": "arrival", "config": r.echo}))?;
    }
    Ok(())
}

/// Output path check shared by commands: parent directory must exist.
pub fn check_output(path: Option<&Path>) -> Result<()> {
    if let Some(parent) = path.and_then(Path::parent).filter(|p| !p.as_os_str().is_empty()) {
        if !parent.is_dir() {
            return Err(CliError::config(format!("output directory {} does not exist", parent.display())));
        }
    }
    Ok(())
}
