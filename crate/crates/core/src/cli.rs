//! Command-line front end.
//!
//! Exit status: 0 on success, 2 for configuration and input errors, 3 when
//! the numerics fail (poles, divergence, a failed oracle check).

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{self, Settings};
use crate::discrepancy::{discrepancy_report, DiscrepancyReport};
use crate::error::{Error, Result};
use crate::fano::{fano_params_from_system, fit_fano, FanoShape, FitReport};
use crate::io::{
    artifact_paths, create_output, read_spectrum_mu, write_grid_csv, write_json, write_spectrum_csv,
};
use crate::langevin::oracle_check;
use crate::model::{normalize, Coupling, EffectiveParams};
use crate::response::{ResponseMode, DEFAULT_DELAY_STEP};
use crate::sweep::{
    generator, preset, run_spectra, run_sweep, Axis, Observable, Param, Preset, PresetKind,
    PresetOutput, SpectrumSet, StabilityPolicy, SweepResult, SweepSpec, DELAY_P_REF, PRESET_NAMES,
};

/// Probe response, Fano lineshapes and group delay of a condensate-loaded
/// optomechanical cavity.
#[derive(Debug, Parser)]
#[command(name = "becfano", version)]
pub struct Cli {
    /// Response mode: solver, solver-probe-only or printed.
    #[arg(long, global = true)]
    pub mode: Option<ResponseMode>,
    /// Output directory.
    #[arg(long, global = true, env = "BECFANO_OUT", default_value = ".")]
    pub out: PathBuf,
    /// Replace existing output files.
    #[arg(long, global = true)]
    pub force: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probe spectrum (every observable) over δ − ω_b.
    Spectrum(SpectrumArgs),
    /// One observable over one or two parameter axes.
    Sweep(SweepArgs),
    /// Group delay at δ = ω_b against pump power.
    Delay(DelayArgs),
    /// Fit the Fano form to an absorption spectrum.
    FitFano(FitArgs),
    /// Compare the sideband solver with direct time integration.
    OracleCheck(OracleArgs),
    /// Run a named figure preset.
    Preset(PresetArgs),
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// TOML configuration, or a parameter JSON written by an earlier run.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override a configuration key, e.g. `cavity.kappa_wb=0.2`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Unstable points: gap or annotate.
    #[arg(long)]
    pub stability: Option<StabilityPolicy>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Lower end of δ − ω_b, units of ω_b.
    #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
    pub from: f64,
    /// Upper end of δ − ω_b, units of ω_b.
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long, default_value_t = 2001)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Use a spectra preset instead of the configuration.
    #[arg(long)]
    pub preset: Option<String>,
    /// Output file stem (defaults to the preset name or `spectrum`).
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// `param:lo:hi:n` or `param=v1,v2,...`.
    #[arg(long)]
    pub axis1: String,
    #[arg(long)]
    pub axis2: Option<String>,
    /// mu, nu_out, t_abs2, phase or tau_g.
    #[arg(long, default_value = "mu")]
    pub observable: String,
    /// Probe detuning δ − ω_b when it is not swept.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub delta_bar: f64,
    #[arg(long, default_value = "sweep")]
    pub name: String,
}

#[derive(Debug, Args)]
pub struct DelayArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Lowest pump power, mW.
    #[arg(long, default_value_t = 0.1)]
    pub from_mw: f64,
    /// Highest pump power, mW.
    #[arg(long, default_value_t = 10.0)]
    pub to_mw: f64,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    #[arg(long, default_value = "delay")]
    pub name: String,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Fit μ from an existing spectrum CSV instead of computing one.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "fit")]
    pub name: String,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Number of random stable parameter sets.
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PresetArgs {
    /// Preset name; omit with --list.
    pub name: Option<String>,
    /// Print the available presets.
    #[arg(long)]
    pub list: bool,
}

/// Parse an axis: `param:lo:hi:n` or `param=v1,v2,...`.
pub fn parse_axis(s: &str) -> Result<Axis> {
    if let Some((name, list)) = s.split_once('=') {
        let param: Param = name.trim().parse()?;
        let values = list
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidSpec(format!("axis value `{v}` is not a number")))
            })
            .collect::<Result<Vec<_>>>()?;
        return Axis::list(param, values);
    }
    let parts: Vec<&str> = s.split(':').collect();
    let [name, lo, hi, n] = parts[..] else {
        return Err(Error::InvalidSpec(format!(
            "axis `{s}` must be param:lo:hi:n or param=v1,v2,..."
        )));
    };
    let num = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidSpec(format!("axis bound `{v}` is not a number")))
    };
    let n = n
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::InvalidSpec(format!("axis point count `{n}` is not an integer")))?;
    Axis::linspace(name.trim().parse()?, num(lo)?, num(hi)?, n)
}

struct Context {
    out: PathBuf,
    force: bool,
    mode: Option<ResponseMode>,
}

impl Context {
    fn mode(&self, settings: &Settings) -> ResponseMode {
        self.mode.or(settings.response).unwrap_or_default()
    }

    fn paths(&self, stem: &str) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(&self.out)
            .map_err(|e| Error::Config(format!("cannot create {}: {e}", self.out.display())))?;
        Ok(artifact_paths(&self.out, stem))
    }
}

fn load(args: &ParamArgs) -> Result<Settings> {
    let mut s = config::load(args.config.as_deref(), &args.overrides)?;
    if args.stability.is_some() {
        s.stability = args.stability;
    }
    Ok(s)
}

fn apply_settings(
    spec: &mut SweepSpec,
    s: &Settings,
    mode: ResponseMode,
    default_policy: StabilityPolicy,
) {
    spec.mode = mode;
    spec.stability = s.stability.unwrap_or(default_policy);
    spec.delay_step = s.delay_step.unwrap_or(DEFAULT_DELAY_STEP);
}

fn warn(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

#[derive(Serialize)]
struct SpectrumSummary<'a> {
    provenance: &'a crate::sweep::Provenance,
    discrepancy: Vec<DiscrepancyReport>,
    blocks: Vec<BlockSummary>,
}

#[derive(Serialize)]
struct BlockSummary {
    label: Option<crate::sweep::Setting>,
    params: EffectiveParams,
    stable: bool,
    rows: usize,
    gaps: usize,
}

fn write_spectra(ctx: &Context, stem: &str, set: &SpectrumSet) -> Result<()> {
    let (csv, json) = ctx.paths(stem)?;
    let mut w = create_output(&csv, ctx.force)?;
    write_spectrum_csv(&mut w, set)?;
    w.flush()?;

    let mut discrepancy = Vec::new();
    for b in &set.blocks {
        let r = discrepancy_report(
            &b.spectrum.params,
            &b.spectrum.delta_bar,
            ResponseMode::Printed,
            ResponseMode::Solver,
        )?;
        match b.label {
            Some(l) => println!("[{} = {}] {r}", l.param, l.value),
            None => println!("{r}"),
        }
        discrepancy.push(r);
    }
    let blocks = set
        .blocks
        .iter()
        .map(|b| BlockSummary {
            label: b.label,
            params: b.spectrum.params,
            stable: b.spectrum.stable,
            rows: b.spectrum.rows.len(),
            gaps: b.spectrum.gaps(),
        })
        .collect();
    write_json(
        &json,
        &SpectrumSummary {
            provenance: &set.provenance,
            discrepancy,
            blocks,
        },
        ctx.force,
    )?;
    warn(&set.provenance.warnings);
    report_unstable(
        set.provenance.unstable_points,
        set.provenance.points,
        set.provenance.stability,
    );
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}

#[derive(Serialize)]
struct GridSummary<'a> {
    provenance: &'a crate::sweep::Provenance,
    /// Row-major like the CSV body.
    unstable: &'a [bool],
}

fn write_grid(ctx: &Context, stem: &str, r: &SweepResult) -> Result<()> {
    let (csv, json) = ctx.paths(stem)?;
    let mut w = create_output(&csv, ctx.force)?;
    write_grid_csv(&mut w, r)?;
    w.flush()?;
    write_json(
        &json,
        &GridSummary {
            provenance: &r.provenance,
            unstable: &r.unstable,
        },
        ctx.force,
    )?;
    warn(&r.provenance.warnings);
    report_unstable(
        r.provenance.unstable_points,
        r.provenance.points,
        r.provenance.stability,
    );
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}

fn report_unstable(unstable: usize, points: usize, policy: StabilityPolicy) {
    if unstable > 0 {
        let what = match policy {
            StabilityPolicy::Gap => "left empty; --stability annotate evaluates them anyway",
            StabilityPolicy::Annotate => "evaluated and flagged in the summary",
        };
        eprintln!("note: {unstable} of {points} points are linearly unstable ({what})");
    }
}

fn cmd_spectrum(ctx: &Context, a: &SpectrumArgs) -> Result<()> {
    if let Some(name) = &a.preset {
        let p = preset(name)?;
        if p.kind != PresetKind::Spectra {
            return Err(Error::Config(format!(
                "preset `{name}` is not a spectrum; run `becfano preset {name}`"
            )));
        }
        let mut spec = p.spec.clone();
        if let Some(m) = ctx.mode {
            spec.mode = m;
        }
        if let Some(s) = a.params.stability {
            spec.stability = s;
        }
        let set = Preset { spec, ..p }.run()?;
        let PresetOutput::Spectra(set) = set else {
            unreachable!()
        };
        return write_spectra(ctx, a.name.as_deref().unwrap_or(name), &set);
    }
    let s = load(&a.params)?;
    let mut spec = SweepSpec::new(
        s.params.clone(),
        Axis::linspace(Param::DeltaBar, a.grid.from, a.grid.to, a.grid.points)?,
        Observable::Mu,
    );
    apply_settings(&mut spec, &s, ctx.mode(&s), StabilityPolicy::Gap);
    let set = run_spectra(&spec)?;
    write_spectra(ctx, a.name.as_deref().unwrap_or("spectrum"), &set)
}

fn cmd_sweep(ctx: &Context, a: &SweepArgs) -> Result<()> {
    let s = load(&a.params)?;
    let mut spec = SweepSpec::new(
        s.params.clone(),
        parse_axis(&a.axis1)?,
        a.observable.parse()?,
    );
    spec.axis2 = a.axis2.as_deref().map(parse_axis).transpose()?;
    spec.delta_bar = a.delta_bar;
    apply_settings(&mut spec, &s, ctx.mode(&s), StabilityPolicy::Gap);
    write_grid(ctx, &a.name, &run_sweep(&spec)?)
}

fn cmd_delay(ctx: &Context, a: &DelayArgs) -> Result<()> {
    let s = load(&a.params)?;
    if !(a.from_mw > 0.0) {
        return Err(Error::Config("pump powers must be > 0".into()));
    }
    let mut base = s.params.clone();
    if let Coupling::Direct { g } = base.coupling {
        eprintln!(
            "note: direct coupling g = {:.4} omega_b is taken as the value at {} mW and scaled linearly with pump power",
            g / base.omega_b,
            DELAY_P_REF * 1e3
        );
        base.coupling = Coupling::PumpScaled {
            g_ref: g,
            p_ref: DELAY_P_REF,
        };
    }
    let axis = Axis::linspace(Param::PumpPower, a.from_mw * 1e-3, a.to_mw * 1e-3, a.points)?;
    let mut spec = SweepSpec::new(base, axis, Observable::TauG);
    apply_settings(&mut spec, &s, ctx.mode(&s), StabilityPolicy::Gap);
    let r = run_sweep(&spec)?;
    if r.values.iter().all(Option::is_none) {
        eprintln!("note: every point is empty; see the summary for the unstable count");
    }
    write_grid(ctx, &a.name, &r)
}

#[derive(Serialize)]
struct FitSummary {
    generator: String,
    source: String,
    params: Option<EffectiveParams>,
    initial: FanoShape,
    fit: FitReport,
    iterations: usize,
}

fn cmd_fit(ctx: &Context, a: &FitArgs) -> Result<()> {
    let s = load(&a.params)?;
    let (p, _) = normalize(&s.params)?;
    let shape = fano_params_from_system(&p)?;
    let (x, y, source, params) = match &a.input {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            let (db, mu) = read_spectrum_mu(&text)?;
            let x = db.iter().map(|d| d + 1.0).collect();
            (x, mu, path.display().to_string(), None)
        }
        None => {
            let mut spec = SweepSpec::new(
                s.params.clone(),
                Axis::linspace(Param::DeltaBar, a.grid.from, a.grid.to, a.grid.points)?,
                Observable::Mu,
            );
            apply_settings(&mut spec, &s, ctx.mode(&s), StabilityPolicy::Gap);
            let set = run_spectra(&spec)?;
            let (x, y) = set.blocks[0].spectrum.mu_series();
            if x.is_empty() {
                return Err(Error::Config(
                    "the configured parameters are unstable; use --stability annotate to fit anyway".into(),
                ));
            }
            (x, y, "computed".to_owned(), Some(p))
        }
    };
    // a symmetric start has no preferred side; nudge q off zero
    let init = if shape.q == 0.0 {
        FanoShape::from_q(0.1, shape.gamma, shape.omega)
    } else {
        shape
    };
    let fit = fit_fano(&x, &y, &init)?;
    let report = FitReport::from(&fit);
    println!(
        "q_fit = {:.6}, Gamma_fit = {:.6e}, delta0 = {:.6}, amplitude = {:.6e}, rms = {:.3e}, converged = {}",
        report.q_fit, report.Gamma_fit, report.delta0, report.amplitude, report.rms_residual, report.converged
    );
    let (_, json) = ctx.paths(&a.name)?;
    write_json(
        &json,
        &FitSummary {
            generator: generator(),
            source,
            params,
            initial: init,
            fit: report,
            iterations: fit.iterations,
        },
        ctx.force,
    )?;
    println!("wrote {}", json.display());
    Ok(())
}

fn cmd_oracle(a: &OracleArgs) -> Result<()> {
    let r = oracle_check(a.n, a.seed)?;
    let max = r.max_rel_error();
    println!(
        "oracle check: {} stable sets (seed {}), max relative error {:.3e}",
        r.samples.len(),
        a.seed,
        max
    );
    if max < 0.01 {
        Ok(())
    } else {
        Err(Error::InvalidWindow(format!(
            "oracle disagreement {max:.3e} exceeds 1%"
        )))
    }
}

fn cmd_preset(ctx: &Context, a: &PresetArgs) -> Result<()> {
    if a.list || a.name.is_none() {
        for name in PRESET_NAMES {
            let p = preset(name)?;
            println!("{name:7} {}", p.description);
        }
        return Ok(());
    }
    let name = a.name.as_deref().unwrap_or_default();
    let mut p = preset(name)?;
    if let Some(m) = ctx.mode {
        p.spec.mode = m;
    }
    match p.run()? {
        PresetOutput::Spectra(set) => write_spectra(ctx, name, &set),
        PresetOutput::Grid(r) => write_grid(ctx, name, &r),
    }
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() || matches!(e, Error::InvalidWindow(_)) {
        3
    } else {
        2
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let ctx = Context {
        out: cli.out,
        force: cli.force,
        mode: cli.mode,
    };
    match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(&ctx, a),
        Command::Sweep(a) => cmd_sweep(&ctx, a),
        Command::Delay(a) => cmd_delay(&ctx, a),
        Command::FitFano(a) => cmd_fit(&ctx, a),
        Command::OracleCheck(a) => cmd_oracle(a),
        Command::Preset(a) => cmd_preset(&ctx, a),
    }
}

/// Parse `args`, run, and return the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
