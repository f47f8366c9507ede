//! Physical parameters of the BEC-cavity system and their reduction to the
//! normalized effective quantities used everywhere else.
//!
//! [`SystemParams`] holds user-facing inputs in SI units (angular
//! frequencies in rad/s, powers in W). [`normalize`] turns them into
//! [`EffectiveParams`], where every rate is expressed in units of the
//! Bogoliubov frequency ω_b (so `omega_b == 1`) and the SI value of ω_b is
//! kept aside for converting delays back to seconds.
//!
//! Two ways of fixing ω_b are supported:
//!
//! * figure mode (default): ω_b is an independent input. The effective
//!   interaction U_eff and shift ν are taken as given even when they do not
//!   reproduce ω_b through the Bogoliubov relation; a
//!   [`ModelWarning::InconsistentBogoliubov`] is reported instead.
//! * derived mode: ω_b = sqrt((ν + U_eff)(ν + 3 U_eff)), optionally after
//!   deriving Δ, ν, U_eff and g from the microscopic inputs in
//!   [`Microscopic`].

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Relative mismatch between ω_b and the Bogoliubov relation above which
/// figure mode reports an inconsistency.
pub const BOGOLIUBOV_TOLERANCE: f64 = 0.01;

/// Convert an ordinary frequency in Hz to an angular frequency in rad/s.
#[inline]
pub fn hz_to_rad(f: f64) -> f64 {
    2.0 * PI * f
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ParamMode {
    /// ω_b is an independent input.
    #[default]
    Figure,
    /// ω_b follows from ν and U_eff; microscopic inputs are applied when given.
    Derived,
}

/// How the effective condensate-field coupling g is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Coupling {
    /// g given directly (rad/s).
    Direct { g: f64 },
    /// g proportional to the pump power: g = g_ref · P_l / p_ref.
    ///
    /// This is the linear dependence g ∝ |c_s|² ∝ P_l at fixed detuning,
    /// with the proportionality constant fixed by a reference point.
    PumpScaled { g_ref: f64, p_ref: f64 },
    /// g = 2 U0 J0 sqrt(N) |c_s|², using the [`Microscopic`] block.
    Microscopic,
}

/// Optional microscopic inputs. Energies are given as angular frequencies
/// (E/ħ in rad/s). Only consulted in [`ParamMode::Derived`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Microscopic {
    /// Optical lattice depth per photon U0 (rad/s).
    pub u0: Option<f64>,
    /// Wannier overlap J0 (dimensionless).
    pub j0: Option<f64>,
    /// On-site kinetic energy E0/ħ (rad/s).
    pub e0: Option<f64>,
    /// Classical potential V_cl/ħ (rad/s).
    pub v_cl: Option<f64>,
    /// Bare cavity-pump detuning Δ_c (rad/s).
    pub delta_c: Option<f64>,
    /// On-site interaction U/ħ (rad/s).
    pub interaction: Option<f64>,
}

/// User-facing physical inputs, SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Cavity amplitude decay rate κ.
    pub kappa: f64,
    /// Bogoliubov-mode damping γ_b.
    pub gamma_b: f64,
    /// Bogoliubov frequency ω_b (ignored in derived mode).
    pub omega_b: f64,
    /// Effective cavity detuning Δ.
    pub detuning: f64,
    pub coupling: Coupling,
    /// Effective on-site interaction U_eff.
    pub u_eff: f64,
    /// Composite frequency shift ν.
    pub nu: f64,
    /// Pump power P_l (W).
    pub pump_power: f64,
    /// Probe power P_p (W).
    pub probe_power: f64,
    /// Pump angular frequency ω_l.
    pub pump_frequency: f64,
    /// Probe angular frequency ω_p.
    pub probe_frequency: f64,
    pub n_atoms: u64,
    pub sites: u64,
    #[serde(default)]
    pub mode: ParamMode,
    #[serde(default)]
    pub microscopic: Microscopic,
}

/// Normalized model quantities, rates in units of ω_b.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    pub kappa: f64,
    pub gamma_b: f64,
    /// Always 1 after normalization.
    pub omega_b: f64,
    pub detuning: f64,
    pub g: f64,
    pub u_eff: f64,
    pub nu: f64,
    /// Pump amplitude Ω_l.
    pub pump_amplitude: f64,
    /// Probe amplitude ε_p.
    pub probe_amplitude: f64,
    /// ω_b in rad/s, for restoring units.
    pub omega_b_si: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "warning", rename_all = "kebab-case")]
pub enum ModelWarning {
    /// sqrt((ν+U_eff)(ν+3U_eff)) disagrees with the supplied ω_b.
    InconsistentBogoliubov { derived: f64, supplied: f64 },
    /// ν = U_eff = 0: the Bogoliubov mode has zero frequency.
    DegenerateMode,
}

impl fmt::Display for ModelWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelWarning::InconsistentBogoliubov { derived, supplied } => write!(
                f,
                "sqrt((nu+U_eff)(nu+3U_eff)) = {derived:.6e} rad/s differs from omega_b = {supplied:.6e} rad/s by more than {:.0}%",
                BOGOLIUBOV_TOLERANCE * 100.0
            ),
            ModelWarning::DegenerateMode => {
                write!(f, "nu = U_eff = 0: Bogoliubov mode frequency is zero")
            }
        }
    }
}

/// Field amplitude Ω = sqrt(2κP / ħω) injected by a laser of power `power`.
pub fn pump_amplitude_from_power(power: f64, omega: f64, kappa: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::param("omega", format!("must be > 0, got {omega}")));
    }
    if !(kappa > 0.0) {
        return Err(Error::param("kappa", format!("must be > 0, got {kappa}")));
    }
    if !(power >= 0.0) {
        return Err(Error::param("power", format!("must be >= 0, got {power}")));
    }
    Ok((2.0 * kappa * power / (HBAR * omega)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovMode {
    pub frequency: f64,
    pub degenerate: bool,
}

/// ω_b = sqrt((ν + U_eff)(ν + 3 U_eff)).
pub fn bogoliubov_frequency(nu: f64, u_eff: f64) -> Result<BogoliubovMode> {
    if !(nu >= 0.0) {
        return Err(Error::param("nu", format!("must be >= 0, got {nu}")));
    }
    if !(u_eff >= 0.0) {
        return Err(Error::param("u_eff", format!("must be >= 0, got {u_eff}")));
    }
    Ok(BogoliubovMode {
        frequency: ((nu + u_eff) * (nu + 3.0 * u_eff)).sqrt(),
        degenerate: nu == 0.0 && u_eff == 0.0,
    })
}

/// Δ = Δ_c − U0 N J0.
pub fn effective_detuning(delta_c: f64, u0: f64, n_atoms: u64, j0: f64) -> Result<f64> {
    if n_atoms < 1 {
        return Err(Error::param("n_atoms", "must be >= 1"));
    }
    Ok(delta_c - u0 * n_atoms as f64 * j0)
}

/// Intracavity steady-state photon number |c_s|² = Ω_l² / (κ² + Δ²), SI.
pub fn steady_photon_number(pump_amplitude: f64, kappa: f64, detuning: f64) -> f64 {
    pump_amplitude * pump_amplitude / (kappa * kappa + detuning * detuning)
}

impl SystemParams {
    /// Caption parameters shared by the spectra figures: κ = 0.1 ω_b,
    /// U_eff = ω_b, ν/2π = 1000 kHz, γ_b/2π = 7.5 mHz, ω_b/2π = 10 kHz,
    /// with the given Δ and g in units of ω_b.
    pub fn figure_base(detuning_wb: f64, g_wb: f64) -> Self {
        let omega_b = hz_to_rad(10.0e3);
        SystemParams {
            kappa: 0.1 * omega_b,
            gamma_b: hz_to_rad(7.5e-3),
            omega_b,
            detuning: detuning_wb * omega_b,
            coupling: Coupling::Direct { g: g_wb * omega_b },
            u_eff: omega_b,
            nu: hz_to_rad(1000.0e3),
            pump_power: 5.0e-3,
            probe_power: 1.0e-9,
            pump_frequency: hz_to_rad(3.8e14),
            probe_frequency: hz_to_rad(3.8e14),
            n_atoms: 100_000,
            sites: 1,
            mode: ParamMode::Figure,
            microscopic: Microscopic::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("kappa", self.kappa),
            ("pump_frequency", self.pump_frequency),
            ("probe_frequency", self.probe_frequency),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(
                    name,
                    format!("must be finite and > 0, got {v}"),
                ));
            }
        }
        if self.mode == ParamMode::Figure && !(self.omega_b > 0.0 && self.omega_b.is_finite()) {
            return Err(Error::param(
                "omega_b",
                format!("must be finite and > 0, got {}", self.omega_b),
            ));
        }
        let nonneg = [
            ("gamma_b", self.gamma_b),
            ("u_eff", self.u_eff),
            ("nu", self.nu),
            ("pump_power", self.pump_power),
            ("probe_power", self.probe_power),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::param(
                    name,
                    format!("must be finite and >= 0, got {v}"),
                ));
            }
        }
        if !self.detuning.is_finite() {
            return Err(Error::param("detuning", "must be finite"));
        }
        match self.coupling {
            Coupling::Direct { g } if !(g >= 0.0 && g.is_finite()) => {
                return Err(Error::param(
                    "g",
                    format!("must be finite and >= 0, got {g}"),
                ));
            }
            Coupling::PumpScaled { g_ref, p_ref } => {
                if !(g_ref >= 0.0 && g_ref.is_finite()) {
                    return Err(Error::param("g_ref", format!("must be >= 0, got {g_ref}")));
                }
                if !(p_ref > 0.0 && p_ref.is_finite()) {
                    return Err(Error::param("p_ref", format!("must be > 0, got {p_ref}")));
                }
            }
            Coupling::Microscopic
                if self.microscopic.u0.is_none() || self.microscopic.j0.is_none() =>
            {
                return Err(Error::param(
                    "coupling",
                    "microscopic coupling needs u0 and j0",
                ));
            }
            _ => {}
        }
        if self.n_atoms < 1 {
            return Err(Error::param("n_atoms", "must be >= 1"));
        }
        if self.sites < 1 {
            return Err(Error::param("sites", "must be >= 1"));
        }
        Ok(())
    }

    /// Apply the derivation chain (derived mode) and return the SI values
    /// of every effective quantity together with any warnings.
    pub fn resolve(&self) -> Result<(Resolved, Vec<ModelWarning>)> {
        self.validate()?;
        let mut warnings = Vec::new();
        let m = &self.microscopic;
        let derived = self.mode == ParamMode::Derived;

        let detuning = match (derived, m.delta_c, m.u0, m.j0) {
            (true, Some(dc), Some(u0), Some(j0)) => effective_detuning(dc, u0, self.n_atoms, j0)?,
            _ => self.detuning,
        };
        let pump_amplitude =
            pump_amplitude_from_power(self.pump_power, self.pump_frequency, self.kappa)?;
        let probe_amplitude =
            pump_amplitude_from_power(self.probe_power, self.probe_frequency, self.kappa)?;
        let photons = steady_photon_number(pump_amplitude, self.kappa, detuning);

        let g = match self.coupling {
            Coupling::Direct { g } => g,
            Coupling::PumpScaled { g_ref, p_ref } => g_ref * self.pump_power / p_ref,
            Coupling::Microscopic => {
                // validate() guarantees both are present
                let (u0, j0) = (m.u0.unwrap_or(0.0), m.j0.unwrap_or(0.0));
                2.0 * u0 * j0 * (self.n_atoms as f64).sqrt() * photons
            }
        };

        let mut nu = self.nu;
        let mut u_eff = self.u_eff;
        let omega_b = if derived {
            if let (Some(u0), Some(j0)) = (m.u0, m.j0) {
                if m.e0.is_some() || m.v_cl.is_some() {
                    nu = u0 * j0 * photons + m.v_cl.unwrap_or(0.0) * j0 + m.e0.unwrap_or(0.0);
                }
            }
            if let Some(u) = m.interaction {
                u_eff = u * self.n_atoms as f64 / self.sites as f64;
            }
            let mode = bogoliubov_frequency(nu, u_eff)?;
            if mode.degenerate {
                warnings.push(ModelWarning::DegenerateMode);
                return Err(Error::param(
                    "omega_b",
                    "derived Bogoliubov frequency is zero (nu = U_eff = 0)",
                ));
            }
            mode.frequency
        } else {
            let mode = bogoliubov_frequency(nu, u_eff)?;
            if mode.degenerate {
                warnings.push(ModelWarning::DegenerateMode);
            }
            if (mode.frequency / self.omega_b - 1.0).abs() > BOGOLIUBOV_TOLERANCE {
                warnings.push(ModelWarning::InconsistentBogoliubov {
                    derived: mode.frequency,
                    supplied: self.omega_b,
                });
            }
            self.omega_b
        };

        if !(g >= 0.0 && g.is_finite()) {
            return Err(Error::param(
                "g",
                format!("resolved coupling must be >= 0, got {g}"),
            ));
        }

        Ok((
            Resolved {
                kappa: self.kappa,
                gamma_b: self.gamma_b,
                omega_b,
                detuning,
                g,
                u_eff,
                nu,
                pump_amplitude,
                probe_amplitude,
            },
            warnings,
        ))
    }
}

/// Effective quantities in SI units, before division by ω_b.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resolved {
    pub kappa: f64,
    pub gamma_b: f64,
    pub omega_b: f64,
    pub detuning: f64,
    pub g: f64,
    pub u_eff: f64,
    pub nu: f64,
    pub pump_amplitude: f64,
    pub probe_amplitude: f64,
}

/// Divide every rate by ω_b.
pub fn normalize(params: &SystemParams) -> Result<(EffectiveParams, Vec<ModelWarning>)> {
    let (r, warnings) = params.resolve()?;
    if !(r.omega_b > 0.0) {
        return Err(Error::param(
            "omega_b",
            format!("must be > 0, got {}", r.omega_b),
        ));
    }
    let w = r.omega_b;
    Ok((
        EffectiveParams {
            kappa: r.kappa / w,
            gamma_b: r.gamma_b / w,
            omega_b: 1.0,
            detuning: r.detuning / w,
            g: r.g / w,
            u_eff: r.u_eff / w,
            nu: r.nu / w,
            pump_amplitude: r.pump_amplitude / w,
            probe_amplitude: r.probe_amplitude / w,
            omega_b_si: w,
        },
        warnings,
    ))
}

impl EffectiveParams {
    /// Parameters already in ω_b units, with unit probe amplitude and no
    /// pump. `omega_b_si` sets the unit restoration scale.
    pub fn normalized(
        kappa: f64,
        gamma_b: f64,
        detuning: f64,
        g: f64,
        u_eff: f64,
        nu: f64,
    ) -> Self {
        EffectiveParams {
            kappa,
            gamma_b,
            omega_b: 1.0,
            detuning,
            g,
            u_eff,
            nu,
            pump_amplitude: 0.0,
            probe_amplitude: 1.0,
            omega_b_si: hz_to_rad(10.0e3),
        }
    }

    /// Mechanical force coefficient g(U_eff + ν).
    #[inline]
    pub fn force_coupling(&self) -> f64 {
        self.g * (self.u_eff + self.nu)
    }

    /// Convert a duration in units of 1/ω_b to seconds.
    #[inline]
    pub fn to_seconds(&self, t: f64) -> f64 {
        t / self.omega_b_si
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn pump_amplitude_zero_power() {
        assert_eq!(pump_amplitude_from_power(0.0, 1.0e15, 1.0e3).unwrap(), 0.0);
    }

    #[test]
    fn pump_amplitude_reference_value() {
        // sqrt(2 * 2π·1e3 * 1e-12 / (ħ · 2π·3.8e14)), evaluated independently
        let v = pump_amplitude_from_power(1.0e-12, hz_to_rad(3.8e14), hz_to_rad(1.0e3)).unwrap();
        assert_relative_eq!(v, 223_401.003_252_204_83, max_relative = 1e-12);
    }

    #[test]
    fn pump_amplitude_rejects_bad_inputs() {
        assert!(pump_amplitude_from_power(1.0, 0.0, 1.0).is_err());
        assert!(pump_amplitude_from_power(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn bogoliubov_examples() {
        assert_eq!(bogoliubov_frequency(1.0, 0.0).unwrap().frequency, 1.0);
        assert_relative_eq!(
            bogoliubov_frequency(0.0, 1.0).unwrap().frequency,
            1.732_050_807_568_877_2,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            bogoliubov_frequency(1.0, 1.0).unwrap().frequency,
            2.828_427_124_746_190_3,
            max_relative = 1e-15
        );
        let d = bogoliubov_frequency(0.0, 0.0).unwrap();
        assert!(d.degenerate);
        assert_eq!(d.frequency, 0.0);
    }

    #[test]
    fn detuning_examples() {
        assert_eq!(effective_detuning(5.0, 0.0, 10, 1.0).unwrap(), 5.0);
        assert_relative_eq!(
            effective_detuning(5.0, 1e-3, 1000, 1.0).unwrap(),
            4.0,
            epsilon = 1e-12
        );
        assert_eq!(effective_detuning(0.0, 1.0, 1, 1.0).unwrap(), -1.0);
        assert!(effective_detuning(0.0, 1.0, 0, 1.0).is_err());
    }

    #[test]
    fn figure_set_normalizes_with_warning() {
        let (p, warnings) = normalize(&SystemParams::figure_base(1.0, 0.1)).unwrap();
        assert_relative_eq!(p.kappa, 0.1, max_relative = 1e-15);
        assert_relative_eq!(p.u_eff, 1.0, max_relative = 1e-15);
        assert_relative_eq!(p.nu, 100.0, max_relative = 1e-12);
        assert_eq!(p.omega_b, 1.0);
        assert_relative_eq!(p.gamma_b, 7.5e-7, max_relative = 1e-12);
        assert!(warnings
            .iter()
            .any(|w| matches!(w, ModelWarning::InconsistentBogoliubov { .. })));
    }

    #[test]
    fn delay_unit_restoration() {
        let (p, _) = normalize(&SystemParams::figure_base(1.0, 0.1)).unwrap();
        assert_relative_eq!(
            p.to_seconds(1.0),
            1.591_549_430_918_953_4e-5,
            max_relative = 1e-14
        );
    }

    #[test]
    fn derived_mode_matches_bogoliubov_relation() {
        let mut s = SystemParams::figure_base(1.0, 0.1);
        s.mode = ParamMode::Derived;
        s.nu = 3.0e4;
        s.u_eff = 2.0e4;
        let (r, w) = s.resolve().unwrap();
        let expect = ((3.0e4 + 2.0e4) * (3.0e4 + 6.0e4_f64)).sqrt();
        assert_relative_eq!(r.omega_b, expect, max_relative = 1e-12);
        assert!(w.is_empty());
    }

    #[test]
    fn derived_mode_microscopic_chain() {
        let mut s = SystemParams::figure_base(1.0, 0.1);
        s.mode = ParamMode::Derived;
        s.coupling = Coupling::Microscopic;
        s.n_atoms = 10_000;
        s.sites = 100;
        s.microscopic = Microscopic {
            u0: Some(1.0e-3),
            j0: Some(0.5),
            e0: Some(5.0e4),
            v_cl: Some(0.0),
            delta_c: Some(7.0e4),
            interaction: Some(10.0),
        };
        let (r, _) = s.resolve().unwrap();
        assert_relative_eq!(
            r.detuning,
            7.0e4 - 1.0e-3 * 1.0e4 * 0.5,
            max_relative = 1e-14
        );
        let omega_l = pump_amplitude_from_power(s.pump_power, s.pump_frequency, s.kappa).unwrap();
        let photons = omega_l * omega_l / (s.kappa * s.kappa + r.detuning * r.detuning);
        assert_relative_eq!(
            r.g,
            2.0 * 1.0e-3 * 0.5 * 100.0 * photons,
            max_relative = 1e-12
        );
        assert_relative_eq!(r.nu, 1.0e-3 * 0.5 * photons + 5.0e4, max_relative = 1e-12);
        assert_relative_eq!(r.u_eff, 10.0 * 1.0e4 / 100.0, max_relative = 1e-14);
    }

    #[test]
    fn pump_scaled_coupling_is_linear_in_power() {
        let mut s = SystemParams::figure_base(1.0, 0.0);
        s.coupling = Coupling::PumpScaled {
            g_ref: 0.1 * s.omega_b,
            p_ref: 5.0e-3,
        };
        s.pump_power = 2.5e-3;
        let (p, _) = normalize(&s).unwrap();
        assert_relative_eq!(p.g, 0.05, max_relative = 1e-14);
    }

    #[test]
    fn rejects_nonpositive_omega_b() {
        let mut s = SystemParams::figure_base(1.0, 0.1);
        s.omega_b = 0.0;
        assert!(normalize(&s).is_err());
    }

    proptest! {
        #[test]
        fn amplitude_sqrt_scaling(p in 1e-15f64..1.0, w in 1e3f64..1e16, k in 1e-3f64..1e6) {
            let a = pump_amplitude_from_power(p, w, k).unwrap();
            let b = pump_amplitude_from_power(4.0 * p, w, k).unwrap();
            prop_assert!((b - 2.0 * a).abs() <= 1e-14 * b);
        }

        #[test]
        fn bogoliubov_monotone(nu in 0.0f64..100.0, u in 0.0f64..100.0, d in 1e-6f64..10.0) {
            let base = bogoliubov_frequency(nu, u).unwrap().frequency;
            prop_assert!(bogoliubov_frequency(nu + d, u).unwrap().frequency > base);
            prop_assert!(bogoliubov_frequency(nu, u + d).unwrap().frequency > base);
        }

        #[test]
        fn normalize_idempotent_at_unit_omega_b(
            k in 0.01f64..1.0, gb in 0.0f64..0.1, dl in -2.0f64..2.0,
            g in 0.0f64..3.0, u in 0.0f64..5.0, nu in 0.0f64..50.0,
        ) {
            let mut s = SystemParams::figure_base(0.0, 0.0);
            s.omega_b = 1.0;
            s.kappa = k;
            s.gamma_b = gb;
            s.detuning = dl;
            s.coupling = Coupling::Direct { g };
            s.u_eff = u;
            s.nu = nu;
            let (p, _) = normalize(&s).unwrap();
            prop_assert_eq!((p.kappa, p.gamma_b, p.detuning, p.g, p.u_eff, p.nu), (k, gb, dl, g, u, nu));
            prop_assert_eq!(p.omega_b_si, 1.0);
        }
    }
}
