//! Time-domain oracle for the sideband solver.
//!
//! Integrates the noise-free linearized equations
//!
//! ```text
//! q̈ + γ_b q̇ + ω_b² q = −g(U_eff + ν)(δc + δc*)
//! δċ = −(κ + iΔ) δc − i g q + ε_p e^{−iδt}
//! ```
//!
//! with classical RK4, then reads off the e^{−iδt} Fourier coefficient of
//! δc over whole beat periods. δc is the fluctuation about the steady
//! field, so the constant pump term is left out; [`Field::Full`] keeps it
//! and subtracts c_s instead.

use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::EffectiveParams;
use crate::response::{solve_sidebands, steady_state_cavity};
use crate::stability::stability_check;

/// Growth factor over the initial scale treated as divergence.
pub const DIVERGENCE_FACTOR: f64 = 1e9;
/// Longest transient the automatic configuration will ask for (1/ω_b).
pub const MAX_TRANSIENT: f64 = 2.0e5;

/// (q, q̇, Re δc, Im δc).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State {
    pub q: f64,
    pub qdot: f64,
    pub dc: Complex64,
}

impl State {
    fn to_array(self) -> [f64; 4] {
        [self.q, self.qdot, self.dc.re, self.dc.im]
    }

    fn from_array(a: [f64; 4]) -> Self {
        State {
            q: a[0],
            qdot: a[1],
            dc: Complex64::new(a[2], a[3]),
        }
    }

    fn norm(&self) -> f64 {
        (self.q * self.q + self.qdot * self.qdot + self.dc.norm_sqr()).sqrt()
    }

    /// |δc|² + (q̇² + ω_b² q²)/2.
    pub fn energy(&self, omega_b: f64) -> f64 {
        self.dc.norm_sqr() + 0.5 * (self.qdot * self.qdot + omega_b * omega_b * self.q * self.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Field {
    /// Fluctuation δc about c_s, no pump term.
    #[default]
    Fluctuation,
    /// Total field with the pump term; c_s is subtracted before use.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryConfig {
    /// Step in units of 1/ω_b.
    pub dt: f64,
    /// Settling time before the measurement window, units of 1/ω_b.
    pub t_transient: f64,
    /// Beat periods 2π/δ in the measurement window.
    pub n_periods: usize,
    pub state0: State,
    pub field: Field,
}

/// Largest step allowed at these parameters.
pub fn max_step(p: &EffectiveParams) -> f64 {
    let mut h = (0.01 / p.kappa).min(0.01 * TAU / p.omega_b);
    if p.detuning != 0.0 {
        h = h.min(0.01 / p.detuning.abs());
    }
    h
}

/// Shortest transient allowed: ten times the slower of κ and the capped
/// mechanical damping.
pub fn min_transient(p: &EffectiveParams) -> f64 {
    let gamma_eff = p.gamma_b.max(p.kappa / 100.0);
    10.0 / p.kappa.min(gamma_eff)
}

impl TrajectoryConfig {
    /// Defaults for a stable parameter set: the step also resolves the
    /// fastest eigenvalue, the transient is stretched to ten e-folds of the
    /// slowest one (capped at [`MAX_TRANSIENT`]), and the window is widened
    /// at δ = ω_b where the mechanical ring sits on the beat.
    pub fn auto(p: &EffectiveParams, delta: f64) -> Self {
        let report = stability_check(p);
        let fastest = report
            .eigenvalues
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let mut dt = max_step(p);
        if fastest > 0.0 {
            dt = dt.min(0.05 / fastest);
        }
        let mut t_transient = min_transient(p);
        let abscissa = report.spectral_abscissa();
        if abscissa < 0.0 {
            t_transient = t_transient.max((10.0 / -abscissa).min(MAX_TRANSIENT));
        }
        let n_periods = if (delta - p.omega_b).abs() < 1e-9 {
            50
        } else {
            20
        };
        TrajectoryConfig {
            dt,
            t_transient,
            n_periods,
            state0: State::default(),
            field: Field::Fluctuation,
        }
    }

    pub fn validate(&self, p: &EffectiveParams, delta: f64) -> Result<()> {
        if !(self.dt > 0.0) || self.dt > max_step(p) * (1.0 + 1e-12) {
            return Err(Error::param(
                "dt",
                format!("must lie in (0, {}]", max_step(p)),
            ));
        }
        if !(self.t_transient >= min_transient(p) * (1.0 - 1e-12)) {
            return Err(Error::param(
                "t_transient",
                format!("must be at least {}", min_transient(p)),
            ));
        }
        let need = if (delta - p.omega_b).abs() < 1e-9 {
            50
        } else {
            5
        };
        if self.n_periods < need {
            return Err(Error::InvalidWindow(format!(
                "{} periods requested, at least {need} required",
                self.n_periods
            )));
        }
        if !(delta > 0.0) {
            return Err(Error::InvalidWindow(
                "beat frequency must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Uniformly sampled states starting at `t0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t0: f64,
    pub dt: f64,
    pub states: Vec<State>,
}

impl Trajectory {
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn field(&self) -> Vec<Complex64> {
        self.states.iter().map(|s| s.dc).collect()
    }

    /// Columns t, q, qdot, dc_re, dc_im.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,q,qdot,dc_re,dc_im")?;
        for (i, s) in self.states.iter().enumerate() {
            writeln!(
                w,
                "{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}",
                self.time(i),
                s.q,
                s.qdot,
                s.dc.re,
                s.dc.im
            )?;
        }
        Ok(())
    }
}

struct Rhs {
    w2: f64,
    gamma: f64,
    force2: f64,
    kappa: f64,
    detuning: f64,
    g: f64,
    eps: f64,
    pump: f64,
    delta: f64,
}

impl Rhs {
    #[inline]
    fn eval(&self, t: f64, y: &[f64; 4]) -> [f64; 4] {
        let [q, v, x, im] = *y;
        let (s, c) = (self.delta * t).sin_cos();
        [
            v,
            -self.w2 * q - self.gamma * v - self.force2 * x,
            -self.kappa * x + self.detuning * im + self.pump + self.eps * c,
            -self.detuning * x - self.kappa * im - self.g * q - self.eps * s,
        ]
    }
}

#[inline]
fn axpy(y: &[f64; 4], a: f64, k: &[f64; 4]) -> [f64; 4] {
    [
        y[0] + a * k[0],
        y[1] + a * k[1],
        y[2] + a * k[2],
        y[3] + a * k[3],
    ]
}

/// Step count per beat period and the matching step, so that whole periods
/// land exactly on the grid.
fn period_grid(delta: f64, dt_max: f64) -> (usize, f64) {
    let period = TAU / delta;
    let n = (period / dt_max).ceil().max(1.0) as usize;
    (n, period / n as f64)
}

/// Integrate through the transient and return the measurement window
/// (n_periods whole beat periods, both endpoints included).
pub fn integrate(p: &EffectiveParams, delta: f64, cfg: &TrajectoryConfig) -> Result<Trajectory> {
    integrate_recording(p, delta, cfg, None).map(|(w, _)| w)
}

/// As [`integrate`], also keeping every `stride`-th state of the transient.
pub fn integrate_recording(
    p: &EffectiveParams,
    delta: f64,
    cfg: &TrajectoryConfig,
    transient_stride: Option<usize>,
) -> Result<(Trajectory, Option<Trajectory>)> {
    cfg.validate(p, delta)?;
    let (per_period, dt) = period_grid(delta, cfg.dt);
    let n_transient = (cfg.t_transient / dt).ceil() as usize;
    let n_window = per_period * cfg.n_periods;

    let pump = match cfg.field {
        Field::Fluctuation => 0.0,
        Field::Full => p.pump_amplitude,
    };
    let rhs = Rhs {
        w2: p.omega_b * p.omega_b,
        gamma: p.gamma_b,
        force2: 2.0 * p.force_coupling(),
        kappa: p.kappa,
        detuning: p.detuning,
        g: p.g,
        eps: p.probe_amplitude,
        pump,
        delta,
    };

    let scale = cfg
        .state0
        .norm()
        .max((p.probe_amplitude + pump) / p.kappa)
        .max(f64::MIN_POSITIVE);
    let limit = DIVERGENCE_FACTOR * scale;

    let mut y = cfg.state0.to_array();
    let mut window = Vec::with_capacity(n_window + 1);
    let mut transient = transient_stride.map(|_| Vec::new());
    let stride = transient_stride.unwrap_or(usize::MAX).max(1);

    let total = n_transient + n_window;
    for step in 0..=total {
        let t = step as f64 * dt;
        let state = State::from_array(y);
        if !(state.norm() <= limit) {
            return Err(Error::Divergence { step, time: t });
        }
        if step >= n_transient {
            window.push(state);
        } else if let Some(rec) = transient.as_mut() {
            if step % stride == 0 {
                rec.push(state);
            }
        }
        if step == total {
            break;
        }
        let k1 = rhs.eval(t, &y);
        let k2 = rhs.eval(t + 0.5 * dt, &axpy(&y, 0.5 * dt, &k1));
        let k3 = rhs.eval(t + 0.5 * dt, &axpy(&y, 0.5 * dt, &k2));
        let k4 = rhs.eval(t + dt, &axpy(&y, dt, &k3));
        for i in 0..4 {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }

    let measured = Trajectory {
        t0: n_transient as f64 * dt,
        dt,
        states: window,
    };
    let recorded = transient.map(|states| Trajectory {
        t0: 0.0,
        dt: dt * stride as f64,
        states,
    });
    Ok((measured, recorded))
}

/// Fourier coefficient of `series` at e^{−iδt}:
/// (δ / 2πn) ∫ z(t) e^{iδt} dt over the first `n_periods` beat periods,
/// by the trapezoid rule.
pub fn demodulate(
    series: &[Complex64],
    t0: f64,
    dt: f64,
    delta: f64,
    n_periods: usize,
) -> Result<Complex64> {
    if !(delta > 0.0) || !(dt > 0.0) || n_periods == 0 {
        return Err(Error::InvalidWindow(
            "need δ > 0, dt > 0 and at least one period".into(),
        ));
    }
    let span = TAU / delta * n_periods as f64;
    let steps = (span / dt).round() as usize;
    if ((steps as f64) * dt - span).abs() > 1e-9 * span {
        return Err(Error::InvalidWindow(format!(
            "{n_periods} periods do not fit a whole number of steps of {dt}"
        )));
    }
    if series.len() < steps + 1 {
        return Err(Error::InvalidWindow(format!(
            "series covers {} steps, {steps} needed",
            series.len().saturating_sub(1)
        )));
    }
    let phase = |i: usize| Complex64::from_polar(1.0, delta * (t0 + i as f64 * dt));
    let mut acc = 0.5 * (series[0] * phase(0) + series[steps] * phase(steps));
    for (i, z) in series.iter().enumerate().take(steps).skip(1) {
        acc += z * phase(i);
    }
    Ok(acc * dt / span)
}

/// Integrate and demodulate; in full-field mode c_s is subtracted first.
pub fn demodulated_sideband(
    p: &EffectiveParams,
    delta: f64,
    cfg: &TrajectoryConfig,
) -> Result<Complex64> {
    let traj = integrate(p, delta, cfg)?;
    let mut z = traj.field();
    if cfg.field == Field::Full {
        let cs = steady_state_cavity(p);
        z.iter_mut().for_each(|v| *v -= cs);
    }
    demodulate(&z, traj.t0, traj.dt, delta, cfg.n_periods)
}

/// One oracle comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSample {
    pub params: EffectiveParams,
    pub delta: f64,
    pub solver: Complex64,
    pub oracle: Complex64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub seed: u64,
    pub samples: Vec<OracleSample>,
    /// Unstable draws discarded before `samples` was filled.
    pub rejected: usize,
}

impl OracleReport {
    pub fn max_rel_error(&self) -> f64 {
        self.samples.iter().map(|s| s.rel_error).fold(0.0, f64::max)
    }
}

/// Draw a stable parameter set and probe detuning (ω_b units). γ_b is
/// drawn log-uniformly, everything else uniformly.
pub fn random_stable_point<R: Rng>(rng: &mut R, rejected: &mut usize) -> (EffectiveParams, f64) {
    loop {
        let kappa = rng.random_range(0.05..0.5);
        let g = rng.random_range(0.0..2.0);
        let detuning = rng.random_range(0.5..1.5);
        let delta = rng.random_range(0.5..1.5);
        let gamma_b = 10f64.powf(rng.random_range(-6.0..-2.0));
        let u_eff = rng.random_range(0.5..2.0);
        let nu = rng.random_range(1.0..100.0);
        let p = EffectiveParams::normalized(kappa, gamma_b, detuning, g, u_eff, nu);
        if stability_check(&p).stable {
            return (p, delta);
        }
        *rejected += 1;
    }
}

pub fn oracle_sample(p: &EffectiveParams, delta: f64) -> Result<OracleSample> {
    let solver = solve_sidebands(p, delta)?.c_minus;
    let oracle = demodulated_sideband(p, delta, &TrajectoryConfig::auto(p, delta))?;
    Ok(OracleSample {
        params: *p,
        delta,
        solver,
        oracle,
        rel_error: (oracle - solver).norm() / solver.norm(),
    })
}

/// Compare oracle and solver over `n` seeded random stable sets. Draws are
/// sequential and integrations run in parallel; results keep draw order.
pub fn oracle_check(n: usize, seed: u64) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rejected = 0;
    let points: Vec<_> = (0..n)
        .map(|_| random_stable_point(&mut rng, &mut rejected))
        .collect();
    let samples = points
        .par_iter()
        .map(|(p, d)| oracle_sample(p, *d))
        .collect::<Result<Vec<_>>>()?;
    Ok(OracleReport {
        seed,
        samples,
        rejected,
    })
}
