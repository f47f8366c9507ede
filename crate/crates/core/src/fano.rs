//! Asymmetric Fano lineshape near δ ≈ ω_b.
//!
//! ```text
//! μ ≈ 2/(1 + q²) · (x + q)²/(1 + x²)
//! x = (ν + U_eff − ω_b)/Γ − q,  Γ = 2κΔg/(κ² + Ω²),  q = −Ω/κ,  Ω = Δ − ω_b
//! ```
//!
//! The printed reduced coordinate carries no probe detuning. For plotting
//! and fitting the running variable is the probe offset mapped through Γ:
//! x = (δ − δ₀)/Γ − q, so the zero sits at δ = δ₀ and the maximum at
//! δ₀ + Γ(q + 1/q).

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::EffectiveParams;

/// 2(x + q)² / ((1 + q²)(1 + x²)).
#[inline]
pub fn fano_lineshape(x: f64, q: f64) -> f64 {
    let s = x + q;
    2.0 * s * s / ((1.0 + q * q) * (1.0 + x * x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FanoShape {
    pub q: f64,
    /// Linewidth Γ, units of ω_b.
    pub gamma: f64,
    /// Offset Ω = Δ − ω_b, units of ω_b.
    pub omega: f64,
    pub x_zero: f64,
    /// Absent for the symmetric q = 0 profile.
    pub x_peak: Option<f64>,
    pub peak_height: Option<f64>,
}

impl FanoShape {
    pub fn from_q(q: f64, gamma: f64, omega: f64) -> Self {
        let symmetric = q == 0.0;
        FanoShape {
            q,
            gamma,
            omega,
            x_zero: -q,
            x_peak: (!symmetric).then(|| 1.0 / q),
            peak_height: (!symmetric).then_some(2.0),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.x_peak.is_none()
    }

    /// The printed reduced coordinate x = (ν + U_eff − ω_b)/Γ − q.
    pub fn printed_x(&self, p: &EffectiveParams) -> f64 {
        (p.nu + p.u_eff - p.omega_b) / self.gamma - self.q
    }
}

/// Map the system onto (q, Γ, Ω).
pub fn fano_params_from_system(p: &EffectiveParams) -> Result<FanoShape> {
    if !(p.kappa > 0.0) {
        return Err(Error::param("kappa", "must be > 0"));
    }
    let omega = p.detuning - p.omega_b;
    // ω_b/κ − Δ/κ: exact for decimal inputs whose ratios are representable
    let q = p.omega_b / p.kappa - p.detuning / p.kappa;
    let q = if q == 0.0 { 0.0 } else { q };
    let gamma = 2.0 * p.kappa * p.detuning * p.g / (p.kappa * p.kappa + omega * omega);
    Ok(FanoShape::from_q(q, gamma, omega))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Landmarks {
    pub delta_at_min: f64,
    pub mu_min: f64,
    pub delta_at_max: f64,
    pub mu_max: f64,
}

/// Vertex of the parabola through three equally weighted neighbours.
fn refine(x: &[f64], y: &[f64], i: usize) -> (f64, f64) {
    if i == 0 || i + 1 >= x.len() {
        return (x[i], y[i]);
    }
    let (x0, x1, x2) = (x[i - 1], x[i], x[i + 1]);
    let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if a == 0.0 || !a.is_finite() {
        return (x1, y1);
    }
    let b = d01 - a * (x0 + x1);
    let c = y0 - x0 * (a * x0 + b);
    let xv = (-b / (2.0 * a)).clamp(x0, x2);
    (xv, (a * xv + b) * xv + c)
}

/// Global minimum and maximum of μ over the window, each refined by
/// three-point parabolic interpolation. Ties go to the smallest δ.
pub fn locate_landmarks(deltas: &[f64], mu: &[f64]) -> Result<Landmarks> {
    if deltas.len() != mu.len() {
        return Err(Error::InvalidInput(
            "grid and values differ in length".into(),
        ));
    }
    if deltas.len() < 3 {
        return Err(Error::InvalidInput("need at least 3 grid points".into()));
    }
    if deltas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(
            "grid must be strictly increasing".into(),
        ));
    }
    if mu.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "spectrum contains non-finite values".into(),
        ));
    }
    let mut imin = 0;
    let mut imax = 0;
    for (i, &v) in mu.iter().enumerate() {
        if v < mu[imin] {
            imin = i;
        }
        if v > mu[imax] {
            imax = i;
        }
    }
    let (delta_at_min, mu_min) = refine(deltas, mu, imin);
    let (delta_at_max, mu_max) = refine(deltas, mu, imax);
    Ok(Landmarks {
        delta_at_min,
        mu_min: mu_min.min(mu[imin]),
        delta_at_max,
        mu_max: mu_max.max(mu[imax]),
    })
}

/// Model amplitude · F((δ − δ₀)/Γ − q, q).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FanoModel {
    pub amplitude: f64,
    pub delta0: f64,
    pub gamma: f64,
    pub q: f64,
}

impl FanoModel {
    pub fn eval(&self, delta: f64) -> f64 {
        let u = (delta - self.delta0) / self.gamma;
        self.amplitude * fano_lineshape(u - self.q, self.q)
    }

    fn as_vector(&self) -> Vector4<f64> {
        Vector4::new(self.amplitude, self.delta0, self.gamma, self.q)
    }

    fn from_vector(v: &Vector4<f64>) -> Self {
        FanoModel {
            amplitude: v[0],
            delta0: v[1],
            gamma: v[2],
            q: v[3],
        }
    }

    /// Partial derivatives with respect to (A, δ₀, Γ, q).
    ///
    /// With u = (δ − δ₀)/Γ the shape is F = 2u² / ((1 + q²)(1 + (u − q)²)).
    pub fn gradient(&self, delta: f64) -> [f64; 4] {
        let q = self.q;
        let u = (delta - self.delta0) / self.gamma;
        let x = u - q;
        let d = 1.0 + x * x;
        let n = 1.0 + q * q;
        let f = 2.0 * u * u / (n * d);
        let df_du = 4.0 * u * (1.0 - q * x) / (n * d * d);
        let df_dq = -4.0 * u * u * (q * d - n * x) / (n * n * d * d);
        let a = self.amplitude;
        [
            f,
            -a * df_du / self.gamma,
            -a * df_du * u / self.gamma,
            a * df_dq,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FanoFit {
    pub model: FanoModel,
    pub rms_residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Flat record for JSON run summaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct FitReport {
    pub q_fit: f64,
    pub Gamma_fit: f64,
    pub delta0: f64,
    pub amplitude: f64,
    pub rms_residual: f64,
    pub converged: bool,
}

impl From<&FanoFit> for FitReport {
    fn from(f: &FanoFit) -> Self {
        FitReport {
            q_fit: f.model.q,
            Gamma_fit: f.model.gamma,
            delta0: f.model.delta0,
            amplitude: f.model.amplitude,
            rms_residual: f.rms_residual,
            converged: f.converged,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub max_iterations: usize,
    pub step_tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 200,
            step_tolerance: 1e-8,
        }
    }
}

fn sum_sq(deltas: &[f64], mu: &[f64], m: &FanoModel) -> f64 {
    deltas
        .iter()
        .zip(mu)
        .map(|(&d, &y)| {
            let r = m.eval(d) - y;
            r * r
        })
        .sum()
}

/// Starting point for a fit: q and Γ from `shape`, δ₀ at the located
/// minimum, amplitude so that the located maximum is matched.
pub fn initial_model(deltas: &[f64], mu: &[f64], shape: &FanoShape) -> Result<FanoModel> {
    let lm = locate_landmarks(deltas, mu)?;
    let span = deltas[deltas.len() - 1] - deltas[0];
    let gamma = if shape.gamma.is_finite() && shape.gamma.abs() > 0.0 {
        shape.gamma
    } else {
        span / 10.0
    };
    let peak = shape.peak_height.unwrap_or(2.0);
    Ok(FanoModel {
        amplitude: (lm.mu_max / peak).max(f64::MIN_POSITIVE),
        delta0: lm.delta_at_min,
        gamma,
        q: shape.q,
    })
}

/// Fit μ(δ) ≈ A·F((δ − δ₀)/Γ − q, q) by damped Gauss–Newton
/// (Levenberg–Marquardt with diagonal scaling).
///
/// Never fails on non-convergence: the best parameters found are returned
/// with `converged = false`.
pub fn fit_fano(deltas: &[f64], mu: &[f64], init: &FanoShape) -> Result<FanoFit> {
    fit_fano_from(
        deltas,
        mu,
        initial_model(deltas, mu, init)?,
        FitOptions::default(),
    )
}

pub fn fit_fano_from(
    deltas: &[f64],
    mu: &[f64],
    start: FanoModel,
    opts: FitOptions,
) -> Result<FanoFit> {
    if deltas.len() < 10 || deltas.len() != mu.len() {
        return Err(Error::InvalidInput(
            "fit needs at least 10 points and matching lengths".into(),
        ));
    }
    let mut model = start;
    let mut cost = sum_sq(deltas, mu, &model);
    if !cost.is_finite() {
        return Err(Error::InvalidInput(
            "initial model is not finite on the grid".into(),
        ));
    }
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        iterations += 1;
        let mut jtj = Matrix4::<f64>::zeros();
        let mut jtr = Vector4::<f64>::zeros();
        for (&d, &y) in deltas.iter().zip(mu) {
            let j = Vector4::from(model.gradient(d));
            let r = model.eval(d) - y;
            jtj += j * j.transpose();
            jtr += j * r;
        }

        let mut accepted = false;
        while lambda < 1e16 {
            let mut a = jtj;
            for k in 0..4 {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
            }
            let Some(step) = a.lu().solve(&(-jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = FanoModel::from_vector(&(model.as_vector() + step));
            let trial_cost = sum_sq(deltas, mu, &trial);
            if trial_cost.is_finite() && trial_cost <= cost {
                let rel = step.norm() / model.as_vector().norm().max(1e-300);
                model = trial;
                cost = trial_cost;
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                if rel < opts.step_tolerance {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if converged || cost == 0.0 {
            converged = true;
            break;
        }
        if !accepted {
            // no downhill step at any damping: stationary to working precision
            converged = jtr.norm() <= 1e-10 * (1.0 + cost.sqrt());
            break;
        }
    }

    // (Γ, q) and (−Γ, −q) describe the same curve
    if model.gamma < 0.0 {
        model.gamma = -model.gamma;
        model.q = -model.q;
    }
    Ok(FanoFit {
        model,
        rms_residual: (cost / deltas.len() as f64).sqrt(),
        converged,
        iterations,
    })
}
