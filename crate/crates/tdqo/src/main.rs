use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use tdqo::commands::{self, BoundaryChoice, OracleSpec, QuadArgs};
use tdqo::config::{ConstantsField, Format, ModeField, NamedConstants, OutputField, PacketField, RunConfig};
use tdqo::descriptor::{GridDesc, PacketDesc, StateDesc};
use tdqo::error::Result;
use tdqo::verify::{self, Suite};
use tdqo_core::states::Projection;
use tdqo_core::PhysConsts;

const GRAMMAR: &str = "\
Descriptors:
  --state   vacuum | fock:<N> | coherent:<re>[+<im>i]      e.g. coherent:1, coherent:i, coherent:0.3-0.7i
  --packet  exp:sigma=<x> | gauss:sigma=<x>[,f0=<y>][,center=<c>] | file:<path.csv with t,re[,im]>
  --grid    n=<N>,dt=<x>[,t0=<x>]   (t0 defaults to -n/8*dt for exp, centered otherwise)
  --route   spectral | spectral:<pad> | finite-part

Exit codes: 0 success, 1 verification failure, 2 configuration error, 3 numerical failure.";

#[derive(Parser)]
#[command(name = "tdqo", version, about = "Time-domain photon-packet statistics, quadratures and operator-algebra checks", after_help = GRAMMAR)]
struct Cli {
    /// Worker threads for data-parallel loops (falls back to TDQO_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean voltage, vacuum-subtracted variance and vacuum variance traces (CSV `t,mean_v,var_v_sub,vac_var`).
    PacketTrace(RunArgs),
    /// Voltage trace (CSV `t,v`) to quadratures and photon flux (CSV `t,p,q,n,valid`).
    Quadratures(QuadCli),
    /// Runs the verification suite and prints a JSON report.
    Verify(VerifyCli),
    /// Mean arrival time and weighted-time moments as JSON.
    Arrival(ArrivalCli),
}

#[derive(Args)]
struct ConstFlags {
    /// SI constants (Z = 50 ohm, h = 6.62607015e-34 J s) instead of natural units.
    #[arg(long, conflicts_with_all = ["z", "h"])]
    si: bool,
    /// Characteristic impedance (requires --h).
    #[arg(long, requires = "h")]
    z: Option<f64>,
    /// Planck constant (requires --z).
    #[arg(long, requires = "z")]
    h: Option<f64>,
}

impl ConstFlags {
    fn field(&self) -> Option<ConstantsField> {
        match (self.si, self.z, self.h) {
            (true, _, _) => Some(ConstantsField::Named(NamedConstants::Si)),
            (_, Some(z), Some(h)) => Some(ConstantsField::Explicit { z, h }),
            _ => None,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration (`"schema": 1`); flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    packet: Option<String>,
    #[arg(long)]
    state: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    /// Emission offset τ.
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<f64>,
    #[arg(long, value_parser = ["idealized", "band-limited"])]
    mode: Option<String>,
    #[arg(long)]
    route: Option<String>,
    /// Output file; stdout when omitted (no sidecar is written then).
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[command(flatten)]
    consts: ConstFlags,
}

impl RunArgs {
    fn merged(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::empty(),
        };
        if let Some(p) = &self.packet {
            p.parse::<PacketDesc>()?;
            cfg.packet = Some(PacketField::Descriptor(p.clone()));
        }
        if let Some(s) = &self.state {
            s.parse::<StateDesc>()?;
            cfg.state = Some(s.clone());
        }
        if let Some(g) = &self.grid {
            cfg.grid = Some(g.parse::<GridDesc>()?);
        }
        if let Some(t) = self.tau {
            cfg.tau = Some(t);
        }
        if let Some(m) = &self.mode {
            cfg.mode = Some(if m == "band-limited" { ModeField::BandLimited } else { ModeField::Idealized });
        }
        if let Some(r) = &self.route {
            cfg.route = Some(r.clone());
        }
        if let Some(c) = self.consts.field() {
            cfg.constants = Some(c);
        }
        if self.output.is_some() || self.format.is_some() {
            let mut out = cfg.output.take().unwrap_or_default();
            if let Some(p) = &self.output {
                out.path = Some(p.clone());
            }
            if let Some(f) = self.format {
                out.format = f;
            }
            cfg.output = Some(out);
        }
        commands::check_output(cfg.output.as_ref().and_then(|o: &OutputField| o.path.as_deref()))?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct QuadCli {
    /// Input CSV: `t,v`, or `t,p,q[,valid]` with --invert.
    input: PathBuf,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Reconstruct the voltage from quadratures.
    #[arg(long)]
    invert: bool,
    /// Window extension: auto, periodic, zeropad or zeropad:<k>.
    #[arg(long, default_value = "auto")]
    boundary: String,
    #[command(flatten)]
    consts: ConstFlags,
}

#[derive(Args)]
struct VerifyCli {
    /// all, transforms, packet, states, fieldconv or algebra.
    #[arg(default_value = "all")]
    suite: String,
    /// Write the JSON report here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Suppress the per-check summary on stderr.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Args)]
struct ArrivalCli {
    #[command(flatten)]
    run: RunArgs,
    /// Evaluate θ moments on a truncated Fock space: m=<M>,n_max=<n>[,df=<Δf>].
    #[arg(long)]
    oracle: Option<String>,
    /// Renormalize the packet's in-band coefficients before building the oracle state.
    #[arg(long)]
    normalized: bool,
}

fn consts_of(f: &ConstFlags) -> Result<PhysConsts> {
    f.field().map_or(Ok(PhysConsts::NATURAL), |c| c.resolve())
}

fn run(cli: Cli) -> Result<ExitCode> {
    tdqo::init_threads(cli.threads)?;
    match cli.cmd {
        Command::PacketTrace(a) => commands::packet_trace(&a.merged()?)?,
        Command::Quadratures(q) => {
            commands::check_output(q.output.as_deref())?;
            commands::quadratures(&QuadArgs {
                input: q.input,
                output: q.output,
                consts: consts_of(&q.consts)?,
                boundary: q.boundary.parse::<BoundaryChoice>()?,
                invert: q.invert,
            })?
        }
        Command::Verify(v) => {
            let suite: Suite = v.suite.parse()?;
            commands::check_output(v.output.as_deref())?;
            let report = verify::run_suite(suite);
            if !v.quiet {
                for c in &report.checks {
                    eprintln!("{}", c.summary_line());
                }
            }
            tdqo::io::write_json(v.output.as_deref(), &report)?;
            return Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Arrival(a) => {
            let oracle = a.oracle.as_deref().map(str::parse::<OracleSpec>).transpose()?;
            let projection = if a.normalized { Projection::Normalized } else { Projection::Resampled };
            commands::arrival(&a.run.merged()?, oracle, projection)?
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

