//! Steady-state sideband amplitudes and the probe-field observables derived
//! from them.
//!
//! The pump-probe beat δ = ω_p − ω_l drives the linearized fluctuations
//!
//! ```text
//! q̈ + γ_b q̇ + ω_b² q = −g(U_eff + ν)(δc + δc†)
//! δċ = −(κ + iΔ) δc − i g q + ε_p e^{−iδt}
//! ```
//!
//! With δc = c₋ e^{−iδt} + c₊ e^{iδt} and q = q₋ e^{−iδt} + q₊ e^{iδt},
//! matching the e^{−iδt} coefficients gives a 3×3 complex linear system in
//! (q₋, c₋, c₊*), solved directly by [`solve_sidebands`]. The closed form
//! printed alongside the model is kept verbatim in [`c_minus_printed`] for
//! comparison; the two are not algebraically identical.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::EffectiveParams;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Default central-difference step for the group delay, units of ω_b.
pub const DEFAULT_DELAY_STEP: f64 = 1e-4;

/// Relative determinant threshold below which the sideband system is
/// treated as singular.
const SINGULAR_TOLERANCE: f64 = 1e-14;

/// Relative denominator threshold for poles of the printed closed form.
const POLE_TOLERANCE: f64 = 1e-12;

/// |t_p| below which the transmission phase is undefined.
pub const PHASE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResponseMode {
    /// Direct solve of the sideband system, counter-sideband included.
    #[default]
    Solver,
    /// Direct solve with the counter-sideband c₊ forced to zero.
    SolverProbeOnly,
    /// The printed closed form for c₋, taken as already normalized by ε_p.
    Printed,
}

impl ResponseMode {
    pub fn name(self) -> &'static str {
        match self {
            ResponseMode::Solver => "solver",
            ResponseMode::SolverProbeOnly => "solver-probe-only",
            ResponseMode::Printed => "printed",
        }
    }
}

impl std::str::FromStr for ResponseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "solver" => Ok(ResponseMode::Solver),
            "solver-probe-only" => Ok(ResponseMode::SolverProbeOnly),
            "printed" => Ok(ResponseMode::Printed),
            other => Err(Error::Config(format!(
                "unknown response mode `{other}` (expected solver, solver-probe-only or printed)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidebandSolution {
    pub c_s: Complex64,
    pub c_minus: Complex64,
    pub c_plus: Complex64,
    pub q_minus: Complex64,
    pub q_plus: Complex64,
    /// Probe-pump detuning δ, units of ω_b.
    pub delta: f64,
}

/// Per-detuning observables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeResponse {
    /// δ − ω_b, units of ω_b.
    pub delta_bar: f64,
    /// In-phase output quadrature (absorption).
    pub mu: f64,
    /// Out-of-phase output quadrature (dispersion).
    pub nu_out: f64,
    pub t_p: Complex64,
    /// arg(t_p) in radians; unwrapped when part of a spectrum.
    pub phase: f64,
    /// Group delay in seconds.
    pub tau_g: f64,
}

/// c_s = Ω_l / (κ + iΔ).
pub fn steady_state_cavity(p: &EffectiveParams) -> Complex64 {
    Complex64::new(p.pump_amplitude, 0.0) / Complex64::new(p.kappa, p.detuning)
}

/// Gaussian elimination with partial pivoting. Returns the solution and
/// the determinant.
fn solve3(mut a: [[Complex64; 3]; 3], mut b: [Complex64; 3]) -> ([Complex64; 3], Complex64) {
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap_or(col);
        if pivot != col {
            a.swap(pivot, col);
            b.swap(pivot, col);
            det = -det;
        }
        let d = a[col][col];
        det *= d;
        if d == Complex64::new(0.0, 0.0) {
            return ([Complex64::new(f64::NAN, f64::NAN); 3], det);
        }
        for row in col + 1..3 {
            let f = a[row][col] / d;
            let top = a[col];
            for (x, v) in a[row].iter_mut().zip(top).skip(col) {
                *x -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = [Complex64::new(0.0, 0.0); 3];
    for row in (0..3).rev() {
        let mut s = b[row];
        for k in row + 1..3 {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    (x, det)
}

fn frobenius(a: &[[Complex64; 3]; 3]) -> f64 {
    a.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn checked_solve(a: [[Complex64; 3]; 3], b: [Complex64; 3], delta: f64) -> Result<[Complex64; 3]> {
    let scale = frobenius(&a).powi(3);
    let (x, det) = solve3(a, b);
    if !(det.norm() >= SINGULAR_TOLERANCE * scale) || x.iter().any(|z| !z.is_finite()) {
        return Err(Error::DegenerateResponse {
            delta,
            det: det.norm(),
        });
    }
    Ok(x)
}

/// Solve the sideband system at probe detuning `delta` (units of ω_b).
///
/// The e^{−iδt} system is solved for (q₋, c₋, c₊*); the e^{+iδt} system is
/// solved separately for (q₊, c₊, c₋*), so q₊ = q₋* is a check rather than a
/// definition.
pub fn solve_sidebands(p: &EffectiveParams, delta: f64) -> Result<SidebandSolution> {
    solve_sidebands_with(p, delta, true)
}

/// As [`solve_sidebands`], optionally dropping the counter-sideband c₊.
pub fn solve_sidebands_with(
    p: &EffectiveParams,
    delta: f64,
    counter_sideband: bool,
) -> Result<SidebandSolution> {
    if !(p.kappa > 0.0) {
        return Err(Error::param("kappa", "must be > 0"));
    }
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let w2 = p.omega_b * p.omega_b;
    let force = Complex64::new(p.force_coupling(), 0.0);
    let g = Complex64::new(p.g, 0.0);
    let eps = Complex64::new(p.probe_amplitude, 0.0);
    let c_plus_force = if counter_sideband { force } else { zero };

    // unknowns (q₋, c₋, c₊*)
    let minus = [
        [
            Complex64::new(w2 - delta * delta, -delta * p.gamma_b),
            force,
            c_plus_force,
        ],
        [I * g, Complex64::new(p.kappa, p.detuning - delta), zero],
        if counter_sideband {
            [-I * g, zero, Complex64::new(p.kappa, -(p.detuning + delta))]
        } else {
            [zero, zero, one]
        },
    ];
    let [q_minus, c_minus, c_plus_conj] = checked_solve(minus, [zero, eps, zero], delta)?;

    // unknowns (q₊, c₊, c₋*)
    let plus = [
        [
            Complex64::new(w2 - delta * delta, delta * p.gamma_b),
            c_plus_force,
            force,
        ],
        if counter_sideband {
            [I * g, Complex64::new(p.kappa, p.detuning + delta), zero]
        } else {
            [zero, one, zero]
        },
        [-I * g, zero, Complex64::new(p.kappa, -p.detuning + delta)],
    ];
    let [q_plus, c_plus, _] = checked_solve(plus, [zero, zero, eps.conj()], delta)?;

    debug_assert!(
        (c_plus - c_plus_conj.conj()).norm() <= 1e-8 * (c_plus.norm() + c_minus.norm() + 1e-300)
    );

    Ok(SidebandSolution {
        c_s: steady_state_cavity(p),
        c_minus,
        c_plus,
        q_minus,
        q_plus,
        delta,
    })
}

/// The printed closed form for c₋, reproduced term by term:
///
/// ```text
///        [κ + i(Δ−δ)](δ² − iδγ_b − ω_b²) + i g (ν + U_eff)
/// c₋ = ─────────────────────────────────────────────────────────────
///      [κ² + Δ² − δ(δ + iκ)](δ² − iδγ_b − ω_b²) + 2Δ g (ν + U_eff)
/// ```
///
/// It carries no factor of ε_p and its coupling terms do not share the
/// dimension of their neighbours; it is evaluated as-is in ω_b units.
pub fn c_minus_printed(p: &EffectiveParams, delta: f64) -> Result<Complex64> {
    let mech = Complex64::new(delta * delta - p.omega_b * p.omega_b, -delta * p.gamma_b);
    let coupling = p.force_coupling();
    let num = Complex64::new(p.kappa, p.detuning - delta) * mech + I * coupling;
    let cav = Complex64::new(
        p.kappa * p.kappa + p.detuning * p.detuning - delta * delta,
        -delta * p.kappa,
    );
    let spring = 2.0 * p.detuning * coupling;
    let den = cav * mech + spring;
    let scale = (cav * mech).norm() + spring.abs();
    if !(den.norm() > POLE_TOLERANCE * scale) {
        return Err(Error::Pole { delta });
    }
    Ok(num / den)
}

/// Output field at the probe frequency, E_out = μ + iν = sqrt(2κ) c₋ / ε_p.
pub fn output_field(p: &EffectiveParams, delta: f64, mode: ResponseMode) -> Result<Complex64> {
    match mode {
        ResponseMode::Printed => Ok((2.0 * p.kappa).sqrt() * c_minus_printed(p, delta)?),
        ResponseMode::Solver | ResponseMode::SolverProbeOnly => {
            let sol = solve_sidebands_with(p, delta, mode == ResponseMode::Solver)?;
            field_from_solution(&sol, p)
        }
    }
}

fn field_from_solution(sol: &SidebandSolution, p: &EffectiveParams) -> Result<Complex64> {
    if p.probe_amplitude == 0.0 {
        return Err(Error::ZeroProbe);
    }
    Ok((2.0 * p.kappa).sqrt() * sol.c_minus / p.probe_amplitude)
}

/// (μ, ν_out) from a solved sideband system.
pub fn output_quadratures(sol: &SidebandSolution, p: &EffectiveParams) -> Result<(f64, f64)> {
    let e = field_from_solution(sol, p)?;
    Ok((e.re, e.im))
}

/// t_p = 1 − sqrt(2κ) c₋ / ε_p.
pub fn transmission(sol: &SidebandSolution, p: &EffectiveParams) -> Result<Complex64> {
    Ok(1.0 - field_from_solution(sol, p)?)
}

/// Transmission at `delta` in the given mode.
pub fn transmission_at(p: &EffectiveParams, delta: f64, mode: ResponseMode) -> Result<Complex64> {
    Ok(1.0 - output_field(p, delta, mode)?)
}

/// Unwrap arg(t_p) along a strictly increasing detuning grid so that
/// consecutive samples never jump by more than π.
pub fn phase_profile(deltas: &[f64], t: &[Complex64]) -> Result<Vec<f64>> {
    if deltas.len() != t.len() {
        return Err(Error::InvalidInput(format!(
            "grid has {} points but spectrum has {}",
            deltas.len(),
            t.len()
        )));
    }
    if deltas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(
            "detuning grid must be strictly increasing".into(),
        ));
    }
    let mut out = Vec::with_capacity(t.len());
    let mut prev: Option<(Complex64, f64)> = None;
    for (i, (&d, &z)) in deltas.iter().zip(t).enumerate() {
        if !(z.norm() >= PHASE_FLOOR) {
            return Err(Error::PhaseUndefined {
                index: i,
                delta: d,
                magnitude: z.norm(),
            });
        }
        let phase = match prev {
            None => z.arg(),
            Some((zp, ph)) => ph + (z * zp.conj()).arg(),
        };
        out.push(phase);
        prev = Some((z, phase));
    }
    Ok(out)
}

/// Central-difference derivative of arg(t) in units of 1/ω_b, with the
/// phase difference unwrapped locally.
pub fn phase_slope<F>(t: F, delta: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if !(h > 0.0) {
        return Err(Error::param("h", format!("must be > 0, got {h}")));
    }
    let lo = t(delta - h)?;
    let hi = t(delta + h)?;
    for (i, (d, z)) in [(delta - h, lo), (delta + h, hi)].into_iter().enumerate() {
        if !(z.norm() >= PHASE_FLOOR) {
            return Err(Error::PhaseUndefined {
                index: i,
                delta: d,
                magnitude: z.norm(),
            });
        }
    }
    Ok((hi * lo.conj()).arg() / (2.0 * h))
}

/// Group delay τ_g = dφ_t/dω_p at `delta`, in seconds.
pub fn group_delay(p: &EffectiveParams, delta: f64, h: f64, mode: ResponseMode) -> Result<f64> {
    let slope = phase_slope(|d| transmission_at(p, d, mode), delta, h)?;
    Ok(p.to_seconds(slope))
}

/// All observables at one detuning. `phase` is the wrapped arg(t_p).
pub fn probe_response(
    p: &EffectiveParams,
    delta: f64,
    mode: ResponseMode,
    h: f64,
) -> Result<ProbeResponse> {
    let e = output_field(p, delta, mode)?;
    let t_p = 1.0 - e;
    Ok(ProbeResponse {
        delta_bar: delta - p.omega_b,
        mu: e.re,
        nu_out: e.im,
        t_p,
        phase: t_p.arg(),
        tau_g: group_delay(p, delta, h, mode)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fig2(detuning: f64, g: f64) -> EffectiveParams {
        EffectiveParams::normalized(0.1, 7.5e-7, detuning, g, 1.0, 100.0)
    }

    #[test]
    fn steady_state_examples() {
        let mut p = fig2(0.0, 0.0);
        assert_eq!(steady_state_cavity(&p), Complex64::new(0.0, 0.0));
        p.pump_amplitude = 1.0;
        p.kappa = 1.0;
        assert_eq!(steady_state_cavity(&p), Complex64::new(1.0, 0.0));
        p.kappa = 0.1;
        p.detuning = 1.0;
        let c = steady_state_cavity(&p);
        assert_relative_eq!(c.re, 0.1 / 1.01, max_relative = 1e-14);
        assert_relative_eq!(c.im, -1.0 / 1.01, max_relative = 1e-14);
    }

    #[test]
    fn uncoupled_cavity_is_lorentzian() {
        let p = fig2(0.8, 0.0);
        for delta in [0.3, 0.8, 1.0, 1.7] {
            let s = solve_sidebands(&p, delta).unwrap();
            let expect = 1.0 / Complex64::new(0.1, 0.8 - delta);
            assert_relative_eq!(
                (s.c_minus - expect).norm(),
                0.0,
                epsilon = 1e-12 * expect.norm()
            );
            assert_eq!(s.q_minus, Complex64::new(0.0, 0.0));
            assert_eq!(s.c_plus, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn resonant_bare_cavity_quadratures() {
        let p = fig2(1.0, 0.0);
        let s = solve_sidebands(&p, 1.0).unwrap();
        let (mu, nu) = output_quadratures(&s, &p).unwrap();
        assert_relative_eq!(mu, (2.0f64 / 0.1).sqrt(), max_relative = 1e-12);
        assert!(nu.abs() < 1e-12);
        let t = transmission(&s, &p).unwrap();
        // single-ended sqrt(2κ) convention: t = 1 − sqrt(2/κ), unclipped
        assert_relative_eq!(t.re, 1.0 - (2.0f64 / 0.1).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn bare_cavity_transmission_extremal_at_resonance() {
        let p = fig2(1.0, 0.0);
        let grid: Vec<f64> = (0..401).map(|i| 0.5 + i as f64 * 0.0025).collect();
        let t2: Vec<f64> = grid
            .iter()
            .map(|&d| {
                transmission_at(&p, d, ResponseMode::Solver)
                    .unwrap()
                    .norm_sqr()
            })
            .collect();
        // sqrt(2/κ) > 2 at κ = 0.1, so the Lorentzian shows up as a peak
        let imax = (0..t2.len())
            .max_by(|&a, &b| t2[a].total_cmp(&t2[b]))
            .unwrap();
        assert!((grid[imax] - 1.0).abs() < 1e-9);
        assert!(t2[imax] > 1.0);
        let far = transmission_at(&p, 51.0, ResponseMode::Solver)
            .unwrap()
            .norm_sqr();
        assert!((far - 1.0).abs() < 0.02);
    }

    #[test]
    fn zero_probe_is_an_error() {
        let mut p = fig2(1.0, 0.1);
        p.probe_amplitude = 0.0;
        let s = solve_sidebands(&p, 1.0).unwrap();
        assert!(matches!(output_quadratures(&s, &p), Err(Error::ZeroProbe)));
    }

    #[test]
    fn purely_imaginary_field_has_zero_mu() {
        let p = fig2(1.0, 0.0);
        let sol = SidebandSolution {
            c_s: Complex64::new(0.0, 0.0),
            c_minus: Complex64::new(0.0, 0.7),
            c_plus: Complex64::new(0.0, 0.0),
            q_minus: Complex64::new(0.0, 0.0),
            q_plus: Complex64::new(0.0, 0.0),
            delta: 1.0,
        };
        assert_eq!(output_quadratures(&sol, &p).unwrap().0, 0.0);
        let sol = SidebandSolution {
            c_minus: Complex64::new(0.0, 0.0),
            ..sol
        };
        assert_eq!(transmission(&sol, &p).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn singular_system_reported() {
        // g = 0, γ_b = 0 and δ = ω_b leave the mechanical column empty
        let p = EffectiveParams::normalized(0.1, 0.0, 1.0, 0.0, 1.0, 1.0);
        assert!(matches!(
            solve_sidebands(&p, 1.0),
            Err(Error::DegenerateResponse { .. })
        ));
    }

    #[test]
    fn printed_form_reduces_at_zero_coupling() {
        let p = EffectiveParams::normalized(0.3, 0.01, 0.7, 0.0, 1.0, 5.0);
        let c = c_minus_printed(&p, 0.0).unwrap();
        let expect = 1.0 / Complex64::new(0.3, -0.7);
        assert_relative_eq!((c - expect).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn printed_form_at_double_resonance() {
        let p = EffectiveParams::normalized(0.1, 0.0, 1.0, 0.4, 1.0, 2.0);
        let c = c_minus_printed(&p, 1.0).unwrap();
        assert_relative_eq!(c.re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(c.im, 0.5, max_relative = 1e-14);
    }

    #[test]
    fn printed_pole_detected() {
        // den = (κ²+Δ²−δ²−iκδ)(δ²−1) with g = 0 vanishes at δ = ω_b = 1
        let p = EffectiveParams::normalized(0.1, 0.0, 1.0, 0.0, 1.0, 1.0);
        assert!(matches!(c_minus_printed(&p, 1.0), Err(Error::Pole { .. })));
    }

    #[test]
    fn absorption_vanishes_at_double_resonance() {
        // the nearly undamped mechanical mode pins Re E_out to zero at δ = ω_b
        for g in [0.02, 0.05, 1.0] {
            let p = fig2(1.0, g);
            let e = output_field(&p, 1.0, ResponseMode::Solver).unwrap();
            assert!(e.re.abs() < 1e-5, "g = {g}: mu = {}", e.re);
            let off = output_field(&p, 1.1, ResponseMode::Solver).unwrap();
            assert!(off.re.abs() > 100.0 * e.re.abs());
        }
    }

    #[test]
    fn unwrap_constant_and_ramp() {
        let grid: Vec<f64> = (0..100).map(|i| i as f64 * 0.01).collect();
        let ones = vec![Complex64::new(2.0, 0.0); 100];
        assert!(phase_profile(&grid, &ones)
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));

        let a = 37.0;
        let ramp: Vec<Complex64> = grid
            .iter()
            .map(|&d| Complex64::from_polar(1.0, a * d))
            .collect();
        let ph = phase_profile(&grid, &ramp).unwrap();
        for (d, v) in grid.iter().zip(&ph) {
            assert_relative_eq!(*v, a * d, epsilon = 1e-10);
        }
    }

    #[test]
    fn unwrap_errors() {
        let grid = [0.0, 0.1, 0.2];
        let t = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        assert!(matches!(
            phase_profile(&grid, &t),
            Err(Error::PhaseUndefined { index: 1, .. })
        ));
        let t = [Complex64::new(1.0, 0.0); 3];
        assert!(phase_profile(&[0.0, 0.0, 0.1], &t).is_err());
    }

    #[test]
    fn delay_of_synthetic_ramp() {
        let a = 2.5;
        let slope = phase_slope(|d| Ok(Complex64::from_polar(1.0, a * d)), 0.3, 1e-4).unwrap();
        assert_relative_eq!(slope, a, max_relative = 1e-10);
    }

    #[test]
    fn flat_phase_off_resonance() {
        let p = fig2(1.0, 0.0);
        let slope = phase_slope(
            |d| transmission_at(&p, d, ResponseMode::Solver),
            1001.0,
            DEFAULT_DELAY_STEP,
        )
        .unwrap();
        assert!(slope.abs() < 1e-6, "slope {slope}");
    }

    #[test]
    fn delay_step_richardson() {
        // stable coupling below the static spring threshold
        let p = fig2(1.0, 0.05);
        let h = DEFAULT_DELAY_STEP;
        let t1 = group_delay(&p, 1.0, h, ResponseMode::Solver).unwrap();
        let t2 = group_delay(&p, 1.0, h / 2.0, ResponseMode::Solver).unwrap();
        let rich = (4.0 * t2 - t1) / 3.0;
        assert!(((rich - t1) / t1).abs() < 1e-3);
        assert!(t1 > 0.0);
    }

    #[test]
    fn mode_parse_roundtrip() {
        for m in [
            ResponseMode::Solver,
            ResponseMode::SolverProbeOnly,
            ResponseMode::Printed,
        ] {
            assert_eq!(m.name().parse::<ResponseMode>().unwrap(), m);
        }
        assert!("exact".parse::<ResponseMode>().is_err());
    }

    fn arb_params() -> impl Strategy<Value = EffectiveParams> {
        (
            0.05f64..0.5,
            1e-6f64..1e-2,
            0.5f64..1.5,
            0.0f64..2.0,
            0.5f64..2.0,
            1.0f64..100.0,
        )
            .prop_map(|(k, gb, dl, g, u, nu)| EffectiveParams::normalized(k, gb, dl, g, u, nu))
    }

    proptest! {
        #[test]
        fn amplitudes_linear_in_probe(p in arb_params(), delta in 0.5f64..1.5, s in 0.1f64..10.0) {
            let a = solve_sidebands(&p, delta).unwrap();
            let mut p2 = p;
            p2.probe_amplitude *= s;
            let b = solve_sidebands(&p2, delta).unwrap();
            for (x, y) in [(a.c_minus, b.c_minus), (a.c_plus, b.c_plus), (a.q_minus, b.q_minus), (a.q_plus, b.q_plus)] {
                prop_assert!((y - s * x).norm() <= 1e-12 * (s * x).norm().max(1e-300));
            }
        }

        #[test]
        fn mechanical_sidebands_conjugate(p in arb_params(), delta in 0.5f64..1.5) {
            let s = solve_sidebands(&p, delta).unwrap();
            prop_assert!((s.q_plus - s.q_minus.conj()).norm() <= 1e-10 * s.q_minus.norm().max(1e-300));
        }

        #[test]
        fn weak_coupling_limit(p in arb_params(), delta in 0.5f64..1.5) {
            let mut p = p;
            p.g = 0.0;
            let s = solve_sidebands(&p, delta).unwrap();
            let expect = p.probe_amplitude / Complex64::new(p.kappa, p.detuning - delta);
            prop_assert!((s.c_minus - expect).norm() <= 1e-12 * expect.norm());
        }

        #[test]
        fn transmission_identity(p in arb_params(), delta in 0.5f64..1.5) {
            let s = solve_sidebands(&p, delta).unwrap();
            let t = transmission(&s, &p).unwrap();
            let (mu, nu) = output_quadratures(&s, &p).unwrap();
            prop_assert_eq!(t, 1.0 - Complex64::new(mu, nu));
        }
    }
}
