//! Parameter sweeps, spectra and the named figure presets.
//!
//! Rates on every axis are in units of ω_b; `p_l` is in watts and
//! `delta_bar` is the shifted probe detuning δ − ω_b. Grids are row-major
//! with axis1 along a row, and points are evaluated in parallel but
//! gathered by index, so identical specs give identical results.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fano::{locate_landmarks, Landmarks};
use crate::model::{hz_to_rad, normalize, Coupling, EffectiveParams, SystemParams};
use crate::response::{
    group_delay, output_field, probe_response, ProbeResponse, ResponseMode, DEFAULT_DELAY_STEP,
};
use crate::stability::stability_check;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Param {
    #[serde(rename = "kappa")]
    Kappa,
    #[serde(rename = "gamma_b")]
    GammaB,
    /// Mechanical damping used by the solver, replacing γ_b.
    #[serde(rename = "damping_override")]
    DampingOverride,
    #[serde(rename = "detuning")]
    Detuning,
    #[serde(rename = "g")]
    G,
    #[serde(rename = "u_eff")]
    UEff,
    #[serde(rename = "nu")]
    Nu,
    /// Pump power in watts; g follows through the configured coupling.
    #[serde(rename = "p_l")]
    PumpPower,
    /// Probe detuning δ − ω_b.
    #[serde(rename = "delta_bar")]
    DeltaBar,
}

impl Param {
    pub const ALL: [Param; 9] = [
        Param::Kappa,
        Param::GammaB,
        Param::DampingOverride,
        Param::Detuning,
        Param::G,
        Param::UEff,
        Param::Nu,
        Param::PumpPower,
        Param::DeltaBar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::Kappa => "kappa",
            Param::GammaB => "gamma_b",
            Param::DampingOverride => "damping_override",
            Param::Detuning => "detuning",
            Param::G => "g",
            Param::UEff => "u_eff",
            Param::Nu => "nu",
            Param::PumpPower => "p_l",
            Param::DeltaBar => "delta_bar",
        }
    }

    fn valid_names() -> String {
        Param::ALL.map(Param::name).join(", ")
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let found = match s {
            "Delta" => Some(Param::Detuning),
            "U_eff" => Some(Param::UEff),
            "P_l" => Some(Param::PumpPower),
            _ => Param::ALL.into_iter().find(|p| p.name() == s),
        };
        found.ok_or_else(|| {
            Error::InvalidSpec(format!(
                "unknown parameter `{s}`; valid names: {}",
                Param::valid_names()
            ))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Mu,
    NuOut,
    TAbs2,
    /// arg(t_p) in radians, unwrapped along a `delta_bar` axis.
    Phase,
    /// Group delay in µs.
    TauG,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::Mu => "mu",
            Observable::NuOut => "nu_out",
            Observable::TAbs2 => "t_abs2",
            Observable::Phase => "phase",
            Observable::TauG => "tau_g",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Observable::Phase => "rad",
            Observable::TauG => "us",
            _ => "1",
        }
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Observable::Mu,
            Observable::NuOut,
            Observable::TAbs2,
            Observable::Phase,
            Observable::TauG,
        ]
        .into_iter()
        .find(|o| o.name() == s)
        .ok_or_else(|| {
            Error::InvalidSpec(format!(
                "unknown observable `{s}`; valid: mu, nu_out, t_abs2, phase, tau_g"
            ))
        })
    }
}

/// What to do at grid points whose homogeneous dynamics is unstable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityPolicy {
    /// Leave the cell empty.
    #[default]
    Gap,
    /// Evaluate anyway and flag the point in the unstable mask.
    Annotate,
}

impl FromStr for StabilityPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gap" => Ok(StabilityPolicy::Gap),
            "annotate" => Ok(StabilityPolicy::Annotate),
            other => Err(Error::Config(format!(
                "unknown stability policy `{other}` (expected gap or annotate)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: Param,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn linspace(param: Param, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "{param}: bounds must be finite"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidSpec(format!(
                "{param}: need at least 2 points, got {n}"
            )));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let values = (0..n)
            .map(|i| if i == n - 1 { hi } else { lo + i as f64 * step })
            .collect();
        Ok(Axis { param, values })
    }

    pub fn list(param: Param, values: Vec<f64>) -> Result<Self> {
        let axis = Axis { param, values };
        axis.validate()?;
        Ok(axis)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn validate(&self) -> Result<()> {
        if self.values.len() < 2 {
            return Err(Error::InvalidSpec(format!(
                "{}: need at least 2 points, got {}",
                self.param,
                self.values.len()
            )));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "{}: values must be finite",
                self.param
            )));
        }
        Ok(())
    }
}

/// A parameter pinned for the whole sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Setting {
    pub param: Param,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: SystemParams,
    #[serde(default)]
    pub fixed: Vec<Setting>,
    pub axis1: Axis,
    #[serde(default)]
    pub axis2: Option<Axis>,
    pub observable: Observable,
    #[serde(default)]
    pub mode: ResponseMode,
    #[serde(default)]
    pub stability: StabilityPolicy,
    /// Probe detuning δ − ω_b when `delta_bar` is not swept.
    #[serde(default)]
    pub delta_bar: f64,
    #[serde(default = "default_delay_step")]
    pub delay_step: f64,
}

fn default_delay_step() -> f64 {
    DEFAULT_DELAY_STEP
}

impl SweepSpec {
    pub fn new(base: SystemParams, axis1: Axis, observable: Observable) -> Self {
        SweepSpec {
            base,
            fixed: Vec::new(),
            axis1,
            axis2: None,
            observable,
            mode: ResponseMode::Solver,
            stability: StabilityPolicy::Gap,
            delta_bar: 0.0,
            delay_step: DEFAULT_DELAY_STEP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.axis1.validate()?;
        if let Some(a2) = &self.axis2 {
            a2.validate()?;
            if a2.param == self.axis1.param {
                return Err(Error::InvalidSpec(format!("both axes sweep {}", a2.param)));
            }
        }
        if !(self.delay_step > 0.0 && self.delay_step.is_finite()) {
            return Err(Error::InvalidSpec(
                "delay_step must be finite and > 0".into(),
            ));
        }
        if !self.delta_bar.is_finite() {
            return Err(Error::InvalidSpec("delta_bar must be finite".into()));
        }
        self.base.validate()
    }

    fn shape(&self) -> (usize, usize) {
        (self.axis1.len(), self.axis2.as_ref().map_or(1, Axis::len))
    }

    /// Parameters and probe detuning δ at one grid point.
    pub fn point(&self, i1: usize, i2: usize) -> Result<(EffectiveParams, f64)> {
        let mut assign: Vec<(Param, f64)> = self.fixed.iter().map(|s| (s.param, s.value)).collect();
        if let Some(a2) = &self.axis2 {
            assign.push((a2.param, a2.values[i2]));
        }
        assign.push((self.axis1.param, self.axis1.values[i1]));
        resolve_point(&self.base, &assign, self.delta_bar)
    }
}

/// Normalize `base` with any pump-power assignment folded in, then apply the
/// remaining assignments in order (later wins).
pub fn resolve_point(
    base: &SystemParams,
    assign: &[(Param, f64)],
    delta_bar: f64,
) -> Result<(EffectiveParams, f64)> {
    let mut sys_storage;
    let mut sys = base;
    if let Some(&(_, p_l)) = assign.iter().rev().find(|(k, _)| *k == Param::PumpPower) {
        sys_storage = base.clone();
        sys_storage.pump_power = p_l;
        sys = &sys_storage;
    }
    let (mut p, _) = normalize(sys)?;
    let mut delta = p.omega_b + delta_bar;
    for &(k, v) in assign {
        match k {
            Param::Kappa => p.kappa = v,
            Param::GammaB | Param::DampingOverride => p.gamma_b = v,
            Param::Detuning => p.detuning = v,
            Param::G => p.g = v,
            Param::UEff => p.u_eff = v,
            Param::Nu => p.nu = v,
            Param::PumpPower => {}
            Param::DeltaBar => delta = p.omega_b + v,
        }
    }
    check_effective(&p)?;
    Ok((p, delta))
}

fn check_effective(p: &EffectiveParams) -> Result<()> {
    if !(p.kappa > 0.0 && p.kappa.is_finite()) {
        return Err(Error::param(
            "kappa",
            format!("must be > 0, got {}", p.kappa),
        ));
    }
    let nonneg = [
        ("gamma_b", p.gamma_b),
        ("g", p.g),
        ("u_eff", p.u_eff),
        ("nu", p.nu),
    ];
    for (name, v) in nonneg {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::param(name, format!("must be >= 0, got {v}")));
        }
    }
    if !p.detuning.is_finite() {
        return Err(Error::param("detuning", "must be finite"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub preset: Option<String>,
    pub description: Option<String>,
    pub mode: ResponseMode,
    pub stability: StabilityPolicy,
    pub observable: Observable,
    pub unit: String,
    /// Base parameters after normalization, fixed settings applied.
    pub resolved: EffectiveParams,
    pub warnings: Vec<String>,
    pub points: usize,
    pub unstable_points: usize,
    pub empty_cells: usize,
    /// Cells left empty because the response could not be evaluated.
    pub numerical_gaps: usize,
    /// The full definition that produced this run.
    pub spec: SweepSpec,
}

pub fn generator() -> String {
    format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}

fn base_provenance(spec: &SweepSpec) -> Result<(EffectiveParams, Vec<String>)> {
    let (_, warnings) = normalize(&spec.base)?;
    let assign: Vec<_> = spec.fixed.iter().map(|s| (s.param, s.value)).collect();
    let (resolved, _) = resolve_point(&spec.base, &assign, spec.delta_bar)?;
    Ok((resolved, warnings.iter().map(ToString::to_string).collect()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis1: Axis,
    pub axis2: Option<Axis>,
    pub observable: Observable,
    /// Row-major, `axis1.len()` values per row.
    pub values: Vec<Option<f64>>,
    pub unstable: Vec<bool>,
    pub provenance: Provenance,
}

impl SweepResult {
    pub fn n1(&self) -> usize {
        self.axis1.len()
    }

    pub fn n2(&self) -> usize {
        self.axis2.as_ref().map_or(1, Axis::len)
    }

    pub fn get(&self, i1: usize, i2: usize) -> Option<f64> {
        self.values[i2 * self.n1() + i1]
    }

    pub fn row(&self, i2: usize) -> &[Option<f64>] {
        let n = self.n1();
        &self.values[i2 * n..(i2 + 1) * n]
    }

    pub fn column(&self, i1: usize) -> Vec<Option<f64>> {
        (0..self.n2()).map(|i2| self.get(i1, i2)).collect()
    }
}

struct Cell {
    value: Option<f64>,
    t_p: Option<Complex64>,
    unstable: bool,
    numerical: bool,
}

fn evaluate(spec: &SweepSpec, p: &EffectiveParams, delta: f64) -> Result<(f64, Option<Complex64>)> {
    match spec.observable {
        Observable::TauG => Ok((
            group_delay(p, delta, spec.delay_step, spec.mode)? * 1e6,
            None,
        )),
        obs => {
            let e = output_field(p, delta, spec.mode)?;
            let t = 1.0 - e;
            let v = match obs {
                Observable::Mu => e.re,
                Observable::NuOut => e.im,
                Observable::TAbs2 => t.norm_sqr(),
                _ => t.arg(),
            };
            Ok((v, Some(t)))
        }
    }
}

fn cell(spec: &SweepSpec, i1: usize, i2: usize) -> Result<Cell> {
    let (p, delta) = spec.point(i1, i2)?;
    let unstable = !stability_check(&p).stable;
    if unstable && spec.stability == StabilityPolicy::Gap {
        return Ok(Cell {
            value: None,
            t_p: None,
            unstable,
            numerical: false,
        });
    }
    match evaluate(spec, &p, delta) {
        Ok((v, t_p)) if v.is_finite() => Ok(Cell {
            value: Some(v),
            t_p,
            unstable,
            numerical: false,
        }),
        Ok(_) => Ok(Cell {
            value: None,
            t_p: None,
            unstable,
            numerical: true,
        }),
        Err(e) if e.is_numerical() => Ok(Cell {
            value: None,
            t_p: None,
            unstable,
            numerical: true,
        }),
        Err(e) => Err(e),
    }
}

/// Unwrap phases along a line of cells, restarting after every gap.
fn unwrap_line(cells: &mut [&mut Cell]) {
    let mut prev: Option<(Complex64, f64)> = None;
    for c in cells.iter_mut() {
        match (c.t_p, c.value) {
            (Some(z), Some(_)) => {
                let ph = match prev {
                    Some((zp, php)) => php + (z * zp.conj()).arg(),
                    None => z.arg(),
                };
                c.value = Some(ph);
                prev = Some((z, ph));
            }
            _ => prev = None,
        }
    }
}

/// Evaluate the observable over the grid.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    run_sweep_named(spec, None, None)
}

fn run_sweep_named(
    spec: &SweepSpec,
    preset: Option<&str>,
    description: Option<&str>,
) -> Result<SweepResult> {
    spec.validate()?;
    let (resolved, warnings) = base_provenance(spec)?;
    let (n1, n2) = spec.shape();
    let mut cells = (0..n1 * n2)
        .into_par_iter()
        .map(|k| cell(spec, k % n1, k / n1))
        .collect::<Result<Vec<Cell>>>()?;

    if spec.observable == Observable::Phase {
        if spec.axis1.param == Param::DeltaBar {
            for row in cells.chunks_mut(n1) {
                unwrap_line(&mut row.iter_mut().collect::<Vec<_>>());
            }
        } else if spec
            .axis2
            .as_ref()
            .is_some_and(|a| a.param == Param::DeltaBar)
        {
            for i1 in 0..n1 {
                let mut col: Vec<&mut Cell> = cells.iter_mut().skip(i1).step_by(n1).collect();
                unwrap_line(&mut col);
            }
        }
    }

    let values: Vec<Option<f64>> = cells.iter().map(|c| c.value).collect();
    let unstable: Vec<bool> = cells.iter().map(|c| c.unstable).collect();
    let provenance = Provenance {
        generator: generator(),
        preset: preset.map(str::to_owned),
        description: description.map(str::to_owned),
        mode: spec.mode,
        stability: spec.stability,
        observable: spec.observable,
        unit: spec.observable.unit().to_owned(),
        resolved,
        warnings,
        points: values.len(),
        unstable_points: unstable.iter().filter(|&&u| u).count(),
        empty_cells: values.iter().filter(|v| v.is_none()).count(),
        numerical_gaps: cells.iter().filter(|c| c.numerical).count(),
        spec: spec.clone(),
    };
    Ok(SweepResult {
        axis1: spec.axis1.clone(),
        axis2: spec.axis2.clone(),
        observable: spec.observable,
        values,
        unstable,
        provenance,
    })
}

/// One probe-detuning spectrum with every observable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub params: EffectiveParams,
    pub stable: bool,
    /// δ − ω_b for each row.
    pub delta_bar: Vec<f64>,
    /// Empty where the point is a gap; phase unwrapped within each run.
    pub rows: Vec<Option<ProbeResponse>>,
}

impl Spectrum {
    /// (δ, μ) over the non-empty rows.
    pub fn mu_series(&self) -> (Vec<f64>, Vec<f64>) {
        self.rows
            .iter()
            .flatten()
            .map(|r| (r.delta_bar + self.params.omega_b, r.mu))
            .unzip()
    }

    pub fn gaps(&self) -> usize {
        self.rows.iter().filter(|r| r.is_none()).count()
    }
}

/// Evaluate every observable over a δ − ω_b grid.
pub fn spectrum(
    p: &EffectiveParams,
    delta_bar: &[f64],
    mode: ResponseMode,
    policy: StabilityPolicy,
    delay_step: f64,
) -> Result<Spectrum> {
    check_effective(p)?;
    if delta_bar.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(
            "detuning grid must be strictly increasing".into(),
        ));
    }
    let stable = stability_check(p).stable;
    let mut rows: Vec<Option<ProbeResponse>> = if !stable && policy == StabilityPolicy::Gap {
        vec![None; delta_bar.len()]
    } else {
        delta_bar
            .par_iter()
            .map(
                |&db| match probe_response(p, p.omega_b + db, mode, delay_step) {
                    Ok(r) if r.mu.is_finite() && r.tau_g.is_finite() => Ok(Some(r)),
                    Ok(_) => Ok(None),
                    Err(e) if e.is_numerical() => Ok(None),
                    Err(e) => Err(e),
                },
            )
            .collect::<Result<_>>()?
    };
    let mut prev: Option<(Complex64, f64)> = None;
    for row in rows.iter_mut() {
        match row {
            Some(r) => {
                let ph = match prev {
                    Some((zp, php)) => php + (r.t_p * zp.conj()).arg(),
                    None => r.t_p.arg(),
                };
                r.phase = ph;
                prev = Some((r.t_p, ph));
            }
            None => prev = None,
        }
    }
    Ok(Spectrum {
        params: *p,
        stable,
        delta_bar: delta_bar.to_vec(),
        rows,
    })
}

/// A family of spectra, one per value of the second axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSet {
    pub blocks: Vec<SpectrumBlock>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumBlock {
    /// The second-axis assignment for this block, if any.
    pub label: Option<Setting>,
    pub spectrum: Spectrum,
}

/// Run a spec whose axis1 is `delta_bar` as full spectra.
pub fn run_spectra(spec: &SweepSpec) -> Result<SpectrumSet> {
    run_spectra_named(spec, None, None)
}

fn run_spectra_named(
    spec: &SweepSpec,
    preset: Option<&str>,
    description: Option<&str>,
) -> Result<SpectrumSet> {
    spec.validate()?;
    if spec.axis1.param != Param::DeltaBar {
        return Err(Error::InvalidSpec("spectra need delta_bar on axis1".into()));
    }
    let (resolved, warnings) = base_provenance(spec)?;
    let labels: Vec<Option<Setting>> = match &spec.axis2 {
        Some(a) => a
            .values
            .iter()
            .map(|&value| {
                Some(Setting {
                    param: a.param,
                    value,
                })
            })
            .collect(),
        None => vec![None],
    };
    let mut blocks = Vec::with_capacity(labels.len());
    for label in labels {
        let mut assign: Vec<_> = spec.fixed.iter().map(|s| (s.param, s.value)).collect();
        assign.extend(label.map(|s| (s.param, s.value)));
        let (p, _) = resolve_point(&spec.base, &assign, 0.0)?;
        let s = spectrum(
            &p,
            &spec.axis1.values,
            spec.mode,
            spec.stability,
            spec.delay_step,
        )?;
        blocks.push(SpectrumBlock { label, spectrum: s });
    }
    let points = blocks.iter().map(|b| b.spectrum.rows.len()).sum();
    let unstable_points = blocks
        .iter()
        .filter(|b| !b.spectrum.stable)
        .map(|b| b.spectrum.rows.len())
        .sum();
    let empty_cells: usize = blocks.iter().map(|b| b.spectrum.gaps()).sum();
    let numerical_gaps = blocks
        .iter()
        .filter(|b| b.spectrum.stable || spec.stability == StabilityPolicy::Annotate)
        .map(|b| b.spectrum.gaps())
        .sum();
    let provenance = Provenance {
        generator: generator(),
        preset: preset.map(str::to_owned),
        description: description.map(str::to_owned),
        mode: spec.mode,
        stability: spec.stability,
        observable: spec.observable,
        unit: spec.observable.unit().to_owned(),
        resolved,
        warnings,
        points,
        unstable_points,
        empty_cells,
        numerical_gaps,
        spec: spec.clone(),
    };
    Ok(SpectrumSet { blocks, provenance })
}

/// Landmark-ordering comparison of two μ spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipReport {
    /// None when a verdict could not be reached.
    pub flipped: Option<bool>,
    pub reason: Option<String>,
    pub first: Option<Landmarks>,
    pub second: Option<Landmarks>,
}

/// Whether sign(δ_peak − δ_zero) differs between two spectra, each given as
/// (δ grid, μ values).
pub fn asymmetry_flip_report(first: (&[f64], &[f64]), second: (&[f64], &[f64])) -> FlipReport {
    let a = locate_landmarks(first.0, first.1);
    let b = locate_landmarks(second.0, second.1);
    match (a, b) {
        (Ok(a), Ok(b)) => {
            let sa = (a.delta_at_max - a.delta_at_min).signum_or_zero();
            let sb = (b.delta_at_max - b.delta_at_min).signum_or_zero();
            FlipReport {
                flipped: Some(sa * sb < 0.0),
                reason: None,
                first: Some(a),
                second: Some(b),
            }
        }
        (a, b) => {
            let reason = [a.as_ref().err(), b.as_ref().err()]
                .into_iter()
                .flatten()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; ");
            FlipReport {
                flipped: None,
                reason: Some(reason),
                first: a.ok(),
                second: b.ok(),
            }
        }
    }
}

trait SignumOrZero {
    fn signum_or_zero(self) -> f64;
}

impl SignumOrZero for f64 {
    fn signum_or_zero(self) -> f64 {
        if self == 0.0 {
            0.0
        } else {
            self.signum()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayCurve {
    /// Pump power, W.
    pub p_l: Vec<f64>,
    /// Group delay at the probe detuning, µs.
    pub tau_g_us: Vec<Option<f64>>,
    pub unstable: Vec<bool>,
}

/// τ_g against pump power at δ = ω_b + `delta_bar`, rest fixed.
pub fn delay_curve(
    base: &SystemParams,
    p_l: &[f64],
    mode: ResponseMode,
    policy: StabilityPolicy,
) -> Result<DelayCurve> {
    if p_l.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::InvalidSpec("pump powers must be > 0".into()));
    }
    let mut spec = SweepSpec::new(
        base.clone(),
        Axis::list(Param::PumpPower, p_l.to_vec())?,
        Observable::TauG,
    );
    spec.mode = mode;
    spec.stability = policy;
    let r = run_sweep(&spec)?;
    Ok(DelayCurve {
        p_l: p_l.to_vec(),
        tau_g_us: r.values,
        unstable: r.unstable,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetKind {
    /// Stacked probe spectra, written with every observable.
    Spectra,
    /// Two-dimensional map of one observable.
    Map,
    /// One observable against one parameter.
    Curve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    pub description: String,
    pub kind: PresetKind,
    pub spec: SweepSpec,
}

pub const PRESET_NAMES: [&str; 15] = [
    "fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig4c", "fig5a", "fig5b", "fig6",
    "fig7", "fig8", "fig9", "fig10", "fig11",
];

/// Probe window δ − ω_b ∈ [−0.5, 0.5].
pub const SPECTRUM_POINTS: usize = 2001;
pub const MAP_POINTS: usize = 201;
/// Pump-power range of the delay presets, W.
pub const PUMP_RANGE: (f64, f64) = (1.0e-4, 1.0e-2);
/// Coupling at the reference pump power for the delay presets, units of ω_b.
pub const DELAY_G_REF: f64 = 0.1;
pub const DELAY_P_REF: f64 = 5.0e-3;
/// Damping rate of the spectra presets, units of ω_b.
pub const GAMMA_B_WB: f64 = 7.5e-7;

fn delay_base(detuning: f64) -> SystemParams {
    let mut base = SystemParams::figure_base(detuning, DELAY_G_REF);
    base.coupling = Coupling::PumpScaled {
        g_ref: DELAY_G_REF * base.omega_b,
        p_ref: DELAY_P_REF,
    };
    base
}

fn spectra(base: SystemParams, axis2: Option<Axis>, observable: Observable) -> Result<SweepSpec> {
    let delta_bar = Axis::linspace(Param::DeltaBar, -0.5, 0.5, SPECTRUM_POINTS)?;
    let mut spec = SweepSpec::new(base, delta_bar, observable);
    spec.axis2 = axis2;
    spec.stability = StabilityPolicy::Annotate;
    Ok(spec)
}

fn map(base: SystemParams, axis1: Axis, axis2: Axis, observable: Observable) -> SweepSpec {
    let mut spec = SweepSpec::new(base, axis1, observable);
    spec.axis2 = Some(axis2);
    spec.stability = StabilityPolicy::Annotate;
    spec
}

/// Look up a named preset. Presets annotate unstable points rather than
/// leaving gaps, so that the caption parameter sets produce data.
pub fn preset(name: &str) -> Result<Preset> {
    use Observable::*;
    use Param::*;
    let fb = SystemParams::figure_base;
    let pump = || Axis::linspace(PumpPower, PUMP_RANGE.0, PUMP_RANGE.1, MAP_POINTS);
    let (kind, description, spec) = match name {
        "fig2a" => (
            PresetKind::Spectra,
            "absorption spectra at g = 0.1, detuning 0.7 to 1.2",
            spectra(
                fb(1.0, 0.1),
                Some(Axis::list(Detuning, vec![0.7, 0.8, 0.9, 1.0, 1.1, 1.2])?),
                Mu,
            )?,
        ),
        "fig2b" => (
            PresetKind::Spectra,
            "absorption spectra at g = 1, detuning 0.7 to 1.2",
            spectra(
                fb(1.0, 1.0),
                Some(Axis::list(Detuning, vec![0.7, 0.8, 0.9, 1.0, 1.1, 1.2])?),
                Mu,
            )?,
        ),
        "fig3a" => (
            PresetKind::Spectra,
            "absorption spectra at detuning 0.8 for g = 5, 20, 50",
            spectra(
                fb(0.8, 5.0),
                Some(Axis::list(G, vec![5.0, 20.0, 50.0])?),
                Mu,
            )?,
        ),
        "fig3b" => (
            PresetKind::Spectra,
            "absorption spectra at detuning 0.8, g = 0.1, for U_eff = 1, 50, 100",
            spectra(
                fb(0.8, 0.1),
                Some(Axis::list(UEff, vec![1.0, 50.0, 100.0])?),
                Mu,
            )?,
        ),
        "fig4a" | "fig4b" | "fig4c" => {
            let (lo, hi) = match name {
                "fig4a" => (0.5, 1.0),
                "fig4b" => (1.0, 1.5),
                _ => (0.5, 1.5),
            };
            (
                PresetKind::Map,
                "absorption map over probe detuning and cavity detuning, g = 0.1",
                map(
                    fb(1.0, 0.1),
                    Axis::linspace(DeltaBar, -0.5, 0.5, MAP_POINTS)?,
                    Axis::linspace(Detuning, lo, hi, MAP_POINTS)?,
                    Mu,
                ),
            )
        }
        "fig5a" => (
            PresetKind::Spectra,
            "absorption spectra at detuning 0.8, g = 0.1, for kappa = 0.1, 0.2, 0.3",
            spectra(
                fb(0.8, 0.1),
                Some(Axis::list(Kappa, vec![0.1, 0.2, 0.3])?),
                Mu,
            )?,
        ),
        "fig5b" => (
            PresetKind::Spectra,
            "absorption spectra at detuning 0.8, g = 0.1, for gamma_b = 1, 10, 100, 1000 x 7.5e-7",
            spectra(
                fb(0.8, 0.1),
                Some(Axis::list(
                    GammaB,
                    [1.0, 10.0, 100.0, 1000.0].map(|k| k * GAMMA_B_WB).to_vec(),
                )?),
                Mu,
            )?,
        ),
        "fig6" => (
            PresetKind::Spectra,
            "transmission spectra at detuning 1 for g = 0 to 4",
            spectra(
                fb(1.0, 0.0),
                Some(Axis::list(G, vec![0.0, 1.0, 2.0, 3.0, 4.0])?),
                TAbs2,
            )?,
        ),
        "fig7" => (
            PresetKind::Spectra,
            "transmission phase at detuning 1, g = 1",
            spectra(fb(1.0, 1.0), None, Phase)?,
        ),
        "fig8" => {
            let mut spec = SweepSpec::new(delay_base(1.0), pump()?, TauG);
            spec.stability = StabilityPolicy::Annotate;
            (
                PresetKind::Curve,
                "group delay against pump power at detuning 1",
                spec,
            )
        }
        "fig9" => (
            PresetKind::Map,
            "group delay against pump power and mechanical damping (up to 2pi x 4.1 kHz)",
            map(
                delay_base(1.0),
                pump()?,
                Axis::linspace(
                    DampingOverride,
                    GAMMA_B_WB,
                    hz_to_rad(4.1e3) / hz_to_rad(10.0e3),
                    MAP_POINTS,
                )?,
                TauG,
            ),
        ),
        "fig10" => (
            PresetKind::Map,
            "group delay against pump power and U_eff",
            map(
                delay_base(1.0),
                pump()?,
                Axis::linspace(UEff, 1.0, 100.0, MAP_POINTS)?,
                TauG,
            ),
        ),
        "fig11" => (
            PresetKind::Map,
            "group delay against pump power and cavity detuning",
            map(
                delay_base(1.0),
                pump()?,
                Axis::linspace(Detuning, 0.3, 1.7, MAP_POINTS)?,
                TauG,
            ),
        ),
        other => {
            return Err(Error::InvalidSpec(format!(
                "unknown preset `{other}`; valid presets: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(Preset {
        name: name.to_owned(),
        description: description.to_owned(),
        kind,
        spec,
    })
}

/// Output of a preset run.
#[derive(Debug, Clone, PartialEq)]
pub enum PresetOutput {
    Spectra(SpectrumSet),
    Grid(SweepResult),
}

impl Preset {
    pub fn run(&self) -> Result<PresetOutput> {
        let (name, desc) = (Some(self.name.as_str()), Some(self.description.as_str()));
        match self.kind {
            PresetKind::Spectra => {
                run_spectra_named(&self.spec, name, desc).map(PresetOutput::Spectra)
            }
            _ => run_sweep_named(&self.spec, name, desc).map(PresetOutput::Grid),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fano::fano_lineshape;

    fn stable_base() -> SystemParams {
        let mut b = SystemParams::figure_base(0.9, 0.02);
        b.nu = hz_to_rad(50.0e3);
        b
    }

    #[test]
    fn param_names_roundtrip() {
        for p in Param::ALL {
            assert_eq!(p.name().parse::<Param>().unwrap(), p);
            let json = serde_json::to_string(&p).unwrap();
            assert_eq!(json, format!("\"{}\"", p.name()));
        }
        assert_eq!("Delta".parse::<Param>().unwrap(), Param::Detuning);
    }

    #[test]
    fn unknown_param_lists_names() {
        let err = "omega".parse::<Param>().unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::InvalidSpec(_)));
        for p in Param::ALL {
            assert!(msg.contains(p.name()), "{msg}");
        }
    }

    #[test]
    fn linspace_endpoints() {
        let a = Axis::linspace(Param::G, 0.1, 0.7, 7).unwrap();
        assert_eq!(a.values[0], 0.1);
        assert_eq!(a.values[6], 0.7);
        assert!(Axis::linspace(Param::G, 0.0, 1.0, 1).is_err());
        assert!(Axis::linspace(Param::G, 0.0, f64::INFINITY, 3).is_err());
    }

    #[test]
    fn constant_axis_gives_identical_columns() {
        let mut spec = SweepSpec::new(
            stable_base(),
            Axis::linspace(Param::G, 0.03, 0.03, 2).unwrap(),
            Observable::Mu,
        );
        spec.axis2 = Some(Axis::linspace(Param::DeltaBar, -0.1, 0.1, 5).unwrap());
        let r = run_sweep(&spec).unwrap();
        for i2 in 0..r.n2() {
            assert!(r.get(0, i2).is_some());
            assert_eq!(r.get(0, i2), r.get(1, i2));
        }
    }

    #[test]
    fn unstable_points_are_gaps() {
        let spec = SweepSpec::new(
            SystemParams::figure_base(1.0, 0.0),
            Axis::linspace(Param::G, 0.0, 0.2, 21).unwrap(),
            Observable::TauG,
        );
        let r = run_sweep(&spec).unwrap();
        assert!(r.provenance.unstable_points > 0);
        for (v, u) in r.values.iter().zip(&r.unstable) {
            assert_eq!(v.is_none(), *u);
        }
        let annotated = run_sweep(&SweepSpec {
            stability: StabilityPolicy::Annotate,
            ..spec
        })
        .unwrap();
        assert!(annotated.values.iter().all(Option::is_some));
        assert_eq!(annotated.unstable, r.unstable);
    }

    #[test]
    fn sweep_is_deterministic() {
        let mut spec = SweepSpec::new(
            stable_base(),
            Axis::linspace(Param::DeltaBar, -0.3, 0.3, 31).unwrap(),
            Observable::Phase,
        );
        spec.axis2 = Some(Axis::linspace(Param::Kappa, 0.1, 0.3, 4).unwrap());
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn phase_unwrapped_along_probe_axis() {
        let spec = SweepSpec::new(
            stable_base(),
            Axis::linspace(Param::DeltaBar, -0.5, 0.5, 2001).unwrap(),
            Observable::Phase,
        );
        let r = run_sweep(&spec).unwrap();
        for w in r.row(0).windows(2) {
            assert!((w[1].unwrap() - w[0].unwrap()).abs() < std::f64::consts::PI);
        }
    }

    #[test]
    fn pump_power_scales_coupling() {
        let base = delay_base(1.0);
        let (p1, _) = resolve_point(&base, &[(Param::PumpPower, DELAY_P_REF)], 0.0).unwrap();
        let (p2, _) = resolve_point(&base, &[(Param::PumpPower, 2.0 * DELAY_P_REF)], 0.0).unwrap();
        assert!((p1.g - DELAY_G_REF).abs() < 1e-15);
        assert!((p2.g - 2.0 * DELAY_G_REF).abs() < 1e-15);
        // later assignments win
        let (p3, d) = resolve_point(
            &base,
            &[
                (Param::PumpPower, 1e-3),
                (Param::G, 0.5),
                (Param::DeltaBar, 0.1),
            ],
            0.0,
        )
        .unwrap();
        assert_eq!(p3.g, 0.5);
        assert!((d - 1.1).abs() < 1e-15);
    }

    #[test]
    fn invalid_axis_values_are_config_errors() {
        let spec = SweepSpec::new(
            stable_base(),
            Axis::linspace(Param::Kappa, -0.1, 0.1, 3).unwrap(),
            Observable::Mu,
        );
        let err = run_sweep(&spec).unwrap_err();
        assert!(!err.is_numerical());
        let mut spec = SweepSpec::new(
            stable_base(),
            Axis::linspace(Param::G, 0.0, 0.1, 3).unwrap(),
            Observable::Mu,
        );
        spec.axis2 = Some(Axis::linspace(Param::G, 0.0, 0.1, 3).unwrap());
        assert!(matches!(run_sweep(&spec), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn flip_report_cases() {
        let xs: Vec<f64> = (0..2001).map(|i| -10.0 + i as f64 * 0.01).collect();
        let a: Vec<f64> = xs.iter().map(|&x| fano_lineshape(x, 2.0)).collect();
        let b: Vec<f64> = xs.iter().map(|&x| fano_lineshape(x, -2.0)).collect();
        let c: Vec<f64> = xs.iter().map(|&x| fano_lineshape(x, 1.0)).collect();
        assert_eq!(
            asymmetry_flip_report((&xs, &a), (&xs, &b)).flipped,
            Some(true)
        );
        assert_eq!(
            asymmetry_flip_report((&xs, &a), (&xs, &c)).flipped,
            Some(false)
        );
        assert_eq!(
            asymmetry_flip_report((&xs, &a), (&xs, &a)).flipped,
            Some(false)
        );
        let r = asymmetry_flip_report((&xs[..2], &a[..2]), (&xs, &a));
        assert_eq!(r.flipped, None);
        assert!(r.reason.is_some());
    }

    #[test]
    fn every_preset_builds() {
        for name in PRESET_NAMES {
            let p = preset(name).unwrap();
            p.spec.validate().unwrap();
            assert_eq!(p.name, name);
        }
        let err = preset("fig12").unwrap_err();
        assert!(err.to_string().contains("fig2a"));
    }

    #[test]
    fn preset_shapes() {
        let p = preset("fig2a").unwrap();
        assert_eq!(p.kind, PresetKind::Spectra);
        assert_eq!(p.spec.axis1.len(), SPECTRUM_POINTS);
        assert_eq!(
            p.spec.axis2.as_ref().unwrap().values,
            vec![0.7, 0.8, 0.9, 1.0, 1.1, 1.2]
        );
        let p = preset("fig4c").unwrap();
        assert_eq!(
            (p.spec.axis1.len(), p.spec.axis2.as_ref().unwrap().len()),
            (201, 201)
        );
        let p = preset("fig9").unwrap();
        let top = *p.spec.axis2.as_ref().unwrap().values.last().unwrap();
        assert!((top - 0.41).abs() < 1e-12);
        let p = preset("fig11").unwrap();
        assert_eq!(p.spec.axis2.as_ref().unwrap().values[0], 0.3);
    }

    #[test]
    fn delay_curve_decoupling_limit() {
        // P_l → 0 drives g → 0 and the delay to the bare-cavity value
        let base = delay_base(1.0);
        let c = delay_curve(
            &base,
            &[1e-10, 1e-9],
            ResponseMode::Solver,
            StabilityPolicy::Gap,
        )
        .unwrap();
        let bare = EffectiveParams {
            g: 0.0,
            ..normalize(&base).unwrap().0
        };
        let expect =
            group_delay(&bare, 1.0, DEFAULT_DELAY_STEP, ResponseMode::Solver).unwrap() * 1e6;
        assert!(expect > 0.0);
        for t in c.tau_g_us.iter() {
            assert!(
                (t.unwrap() - expect).abs() < 1e-3 * expect,
                "{t:?} vs {expect}"
            );
        }
    }

    #[test]
    fn spectrum_gap_policy() {
        let p = EffectiveParams::normalized(0.1, 7.5e-7, 1.0, 1.0, 1.0, 100.0);
        let grid: Vec<f64> = (0..11).map(|i| -0.5 + i as f64 * 0.1).collect();
        let s = spectrum(&p, &grid, ResponseMode::Solver, StabilityPolicy::Gap, 1e-4).unwrap();
        assert!(!s.stable);
        assert_eq!(s.gaps(), 11);
        let s = spectrum(
            &p,
            &grid,
            ResponseMode::Solver,
            StabilityPolicy::Annotate,
            1e-4,
        )
        .unwrap();
        assert_eq!(s.gaps(), 0);
    }
}
