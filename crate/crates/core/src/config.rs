//! Run configuration from sectioned TOML or from a parameter JSON.
//!
//! ```toml
//! [cavity]
//! kappa_wb = 0.1
//! detuning_wb = 0.8
//!
//! [condensate]
//! omega_b_hz = 10e3
//! nu_hz = 1e6
//!
//! [drive]
//! pump_power_w = 5e-3
//!
//! [mode]
//! response = "solver"
//! ```
//!
//! Rates take a `_hz` suffix (multiplied by 2π) or `_wb` (multiples of
//! ω_b). Keys left out keep the figure-base values. Overrides of the form
//! `section.key=value` are applied after the file, and for any quantity the
//! last assignment wins.
//!
//! A JSON file holding `SystemParams`, a sweep spec (`base`) or a run
//! summary (`spec.base`) is accepted as well and is read back exactly.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{hz_to_rad, Coupling, ParamMode, SystemParams};
use crate::response::ResponseMode;
use crate::sweep::StabilityPolicy;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub params: SystemParams,
    pub response: Option<ResponseMode>,
    pub stability: Option<StabilityPolicy>,
    /// Group-delay difference step, units of ω_b.
    pub delay_step: Option<f64>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            params: SystemParams::figure_base(1.0, 0.1),
            response: None,
            stability: None,
            delay_step: None,
        }
    }
}

/// (section, quantity, accepted suffixes). Rates take `_hz` or `_wb`.
const KEYS: &[(&str, &str, &[&str])] = &[
    ("cavity", "kappa", &["_hz", "_wb"]),
    ("cavity", "detuning", &["_hz", "_wb"]),
    ("cavity", "delta_c", &["_hz", "_wb"]),
    ("cavity", "u0", &["_hz", "_wb"]),
    ("condensate", "omega_b", &["_hz"]),
    ("condensate", "gamma_b", &["_hz", "_wb"]),
    ("condensate", "u_eff", &["_hz", "_wb"]),
    ("condensate", "nu", &["_hz", "_wb"]),
    ("condensate", "g", &["_hz", "_wb"]),
    ("condensate", "e0", &["_hz", "_wb"]),
    ("condensate", "v_cl", &["_hz", "_wb"]),
    ("condensate", "interaction", &["_hz", "_wb"]),
    ("condensate", "j0", &[""]),
    ("condensate", "n_atoms", &[""]),
    ("condensate", "sites", &[""]),
    ("drive", "pump_power", &["_w"]),
    ("drive", "probe_power", &["_w"]),
    ("drive", "pump_frequency", &["_hz"]),
    ("drive", "probe_frequency", &["_hz"]),
    ("drive", "coupling", &[""]),
    ("drive", "g_ref", &["_hz", "_wb"]),
    ("drive", "p_ref", &["_w"]),
    ("mode", "params", &[""]),
    ("mode", "response", &[""]),
    ("mode", "stability", &[""]),
    ("mode", "delay_step", &["_wb"]),
];

fn valid_keys() -> String {
    KEYS.iter()
        .flat_map(|(s, q, suf)| suf.iter().map(move |x| format!("{s}.{q}{x}")))
        .collect::<Vec<_>>()
        .join(", ")
}

fn lookup(section: &str, key: &str) -> Result<(&'static str, &'static str, &'static str)> {
    for &(s, q, suffixes) in KEYS {
        if s != section {
            continue;
        }
        for &suf in suffixes {
            if key.strip_suffix(suf) == Some(q) {
                return Ok((s, q, suf));
            }
        }
    }
    Err(Error::Config(format!(
        "unknown key `{section}.{key}`; valid keys: {}",
        valid_keys()
    )))
}

#[derive(Debug, Clone)]
struct Entry {
    suffix: &'static str,
    value: toml::Value,
}

/// Assignments keyed by quantity, so `kappa_hz` and `kappa_wb` replace
/// each other.
#[derive(Debug, Default)]
struct Assignments(BTreeMap<(&'static str, &'static str), Entry>);

impl Assignments {
    fn set(&mut self, section: &str, key: &str, value: toml::Value) -> Result<()> {
        let (s, q, suffix) = lookup(section, key)?;
        self.0.insert((s, q), Entry { suffix, value });
        Ok(())
    }

    fn from_table(table: &toml::Table) -> Result<Self> {
        let mut a = Assignments::default();
        for (section, body) in table {
            let body = body.as_table().ok_or_else(|| {
                Error::Config(format!(
                    "`{section}` must be a [section] of key = value pairs"
                ))
            })?;
            for (key, value) in body {
                a.set(section, key, value.clone())?;
            }
        }
        Ok(a)
    }
}

/// Split `section.key=value`; the value is read as a TOML value, falling
/// back to a bare string.
pub fn parse_override(s: &str) -> Result<(String, String, toml::Value)> {
    let (lhs, rhs) = s.split_once('=').ok_or_else(|| {
        Error::Config(format!(
            "override `{s}` is not of the form section.key=value"
        ))
    })?;
    let (section, key) = lhs.trim().split_once('.').ok_or_else(|| {
        Error::Config(format!(
            "override `{s}` needs a section, e.g. cavity.kappa_wb"
        ))
    })?;
    let rhs = rhs.trim();
    let value = match toml::from_str::<toml::Table>(&format!("v = {rhs}")) {
        Ok(mut t) => t
            .remove("v")
            .unwrap_or_else(|| toml::Value::String(rhs.to_owned())),
        Err(_) => toml::Value::String(rhs.to_owned()),
    };
    Ok((section.to_owned(), key.to_owned(), value))
}

fn number(v: &toml::Value, name: &str) -> Result<f64> {
    match v {
        toml::Value::Float(f) => Ok(*f),
        toml::Value::Integer(i) => Ok(*i as f64),
        other => Err(Error::Config(format!(
            "`{name}` must be a number, got {other}"
        ))),
    }
}

fn count(v: &toml::Value, name: &str) -> Result<u64> {
    match v {
        toml::Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        toml::Value::Float(f) if *f >= 0.0 && f.fract() == 0.0 && *f < u64::MAX as f64 => {
            Ok(*f as u64)
        }
        other => Err(Error::Config(format!(
            "`{name}` must be a non-negative integer, got {other}"
        ))),
    }
}

fn text<'a>(v: &'a toml::Value, name: &str) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| Error::Config(format!("`{name}` must be a string, got {v}")))
}

fn apply(settings: &mut Settings, a: Assignments) -> Result<()> {
    let p = &mut settings.params;
    // ω_b first: `_wb` rates are measured against it
    if let Some(e) = a.0.get(&("condensate", "omega_b")) {
        p.omega_b = hz_to_rad(number(&e.value, "condensate.omega_b_hz")?);
    }
    let w = p.omega_b;

    let (mut kind, mut g, mut g_ref, mut p_ref) = (None, None, None, None);
    for (&(section, q), e) in &a.0 {
        let name = format!("{section}.{q}{}", e.suffix);
        let rate = || -> Result<f64> {
            let v = number(&e.value, &name)?;
            Ok(if e.suffix == "_hz" {
                hz_to_rad(v)
            } else {
                v * w
            })
        };
        match (section, q) {
            ("condensate", "omega_b") => {}
            ("cavity", "kappa") => p.kappa = rate()?,
            ("cavity", "detuning") => p.detuning = rate()?,
            ("cavity", "delta_c") => p.microscopic.delta_c = Some(rate()?),
            ("cavity", "u0") => p.microscopic.u0 = Some(rate()?),
            ("condensate", "gamma_b") => p.gamma_b = rate()?,
            ("condensate", "u_eff") => p.u_eff = rate()?,
            ("condensate", "nu") => p.nu = rate()?,
            ("condensate", "g") => g = Some(rate()?),
            ("condensate", "e0") => p.microscopic.e0 = Some(rate()?),
            ("condensate", "v_cl") => p.microscopic.v_cl = Some(rate()?),
            ("condensate", "interaction") => p.microscopic.interaction = Some(rate()?),
            ("condensate", "j0") => p.microscopic.j0 = Some(number(&e.value, &name)?),
            ("condensate", "n_atoms") => p.n_atoms = count(&e.value, &name)?,
            ("condensate", "sites") => p.sites = count(&e.value, &name)?,
            ("drive", "pump_power") => p.pump_power = number(&e.value, &name)?,
            ("drive", "probe_power") => p.probe_power = number(&e.value, &name)?,
            ("drive", "pump_frequency") => p.pump_frequency = rate()?,
            ("drive", "probe_frequency") => p.probe_frequency = rate()?,
            ("drive", "coupling") => kind = Some(text(&e.value, &name)?.to_owned()),
            ("drive", "g_ref") => g_ref = Some(rate()?),
            ("drive", "p_ref") => p_ref = Some(number(&e.value, &name)?),
            ("mode", "params") => {
                p.mode = match text(&e.value, &name)? {
                    "figure" => ParamMode::Figure,
                    "derived" => ParamMode::Derived,
                    other => {
                        return Err(Error::Config(format!(
                            "`{name}` must be figure or derived, got `{other}`"
                        )))
                    }
                }
            }
            ("mode", "response") => settings.response = Some(text(&e.value, &name)?.parse()?),
            ("mode", "stability") => settings.stability = Some(text(&e.value, &name)?.parse()?),
            ("mode", "delay_step") => settings.delay_step = Some(number(&e.value, &name)?),
            _ => unreachable!("every key in KEYS is handled"),
        }
    }

    p.coupling = resolve_coupling(p.coupling, kind.as_deref(), g, g_ref, p_ref)?;
    Ok(())
}

fn resolve_coupling(
    current: Coupling,
    kind: Option<&str>,
    g: Option<f64>,
    g_ref: Option<f64>,
    p_ref: Option<f64>,
) -> Result<Coupling> {
    let kind = match kind {
        Some(k) => k,
        None if g.is_some() => "direct",
        None => match current {
            Coupling::Direct { .. } => "direct",
            Coupling::PumpScaled { .. } => "pump-scaled",
            Coupling::Microscopic => "microscopic",
        },
    };
    match kind {
        "direct" => {
            let g = match (g, current) {
                (Some(g), _) => g,
                (None, Coupling::Direct { g }) => g,
                _ => {
                    return Err(Error::Config(
                        "direct coupling needs condensate.g_hz or g_wb".into(),
                    ))
                }
            };
            Ok(Coupling::Direct { g })
        }
        "pump-scaled" => {
            let (cur_g, cur_p) = match current {
                Coupling::PumpScaled { g_ref, p_ref } => (Some(g_ref), Some(p_ref)),
                _ => (None, None),
            };
            match (g_ref.or(cur_g), p_ref.or(cur_p)) {
                (Some(g_ref), Some(p_ref)) => Ok(Coupling::PumpScaled { g_ref, p_ref }),
                _ => Err(Error::Config(
                    "pump-scaled coupling needs drive.g_ref_hz (or _wb) and drive.p_ref_w".into(),
                )),
            }
        }
        "microscopic" => Ok(Coupling::Microscopic),
        other => Err(Error::Config(format!(
            "unknown coupling `{other}` (expected direct, pump-scaled or microscopic)"
        ))),
    }
}

/// Parse TOML text, then apply overrides.
pub fn from_toml(text: &str, overrides: &[String]) -> Result<Settings> {
    let table: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let mut a = Assignments::from_table(&table)?;
    for o in overrides {
        let (s, k, v) = parse_override(o)?;
        a.set(&s, &k, v)?;
    }
    let mut settings = Settings::default();
    apply(&mut settings, a)?;
    settings
        .params
        .validate()
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok(settings)
}

/// Parameters from JSON: a bare `SystemParams`, anything with a `base`
/// field, anything with `spec.base`, or a run summary with
/// `provenance.spec.base`.
pub fn from_json(text: &str, overrides: &[String]) -> Result<Settings> {
    let root: serde_json::Value = serde_json::from_str(text)?;
    let v = root
        .get("provenance")
        .filter(|p| p.get("spec").is_some())
        .unwrap_or(&root);
    let node = v
        .pointer("/spec/base")
        .or_else(|| v.get("base"))
        .or_else(|| v.get("params"))
        .unwrap_or(v);
    let params: SystemParams = serde_json::from_value(node.clone())
        .map_err(|e| Error::Config(format!("not a parameter record: {e}")))?;
    let mut settings = Settings {
        params,
        ..Settings::default()
    };
    if let Some(m) = v.pointer("/spec/mode").and_then(|m| m.as_str()) {
        settings.response = Some(m.parse()?);
    }
    let mut a = Assignments::default();
    for o in overrides {
        let (s, k, v) = parse_override(o)?;
        a.set(&s, &k, v)?;
    }
    apply(&mut settings, a)?;
    settings
        .params
        .validate()
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok(settings)
}

/// Load from a path (JSON by extension, TOML otherwise), or start from the
/// figure base when no path is given.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Settings> {
    match path {
        None => from_toml("", overrides),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
            if p.extension().is_some_and(|e| e == "json") {
                from_json(&text, overrides)
            } else {
                from_toml(&text, overrides)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn empty_config_is_figure_base() {
        let s = from_toml("", &[]).unwrap();
        assert_eq!(s.params, SystemParams::figure_base(1.0, 0.1));
        assert_eq!(s.response, None);
    }

    #[test]
    fn units_and_sections() {
        let s = from_toml(
            r#"
            [cavity]
            kappa_wb = 0.2
            detuning_hz = 8e3
            [condensate]
            omega_b_hz = 20e3
            g_wb = 0.5
            n_atoms = 1000
            [drive]
            pump_power_w = 1e-3
            [mode]
            response = "printed"
            stability = "annotate"
            delay_step_wb = 1e-5
            "#,
            &[],
        )
        .unwrap();
        let w = hz_to_rad(20e3);
        assert_eq!(s.params.omega_b, w);
        assert_relative_eq!(s.params.kappa, 0.2 * w);
        assert_eq!(s.params.detuning, hz_to_rad(8e3));
        assert_eq!(s.params.coupling, Coupling::Direct { g: 0.5 * w });
        assert_eq!(s.params.n_atoms, 1000);
        assert_eq!(s.params.pump_power, 1e-3);
        assert_eq!(s.response, Some(ResponseMode::Printed));
        assert_eq!(s.stability, Some(StabilityPolicy::Annotate));
        assert_eq!(s.delay_step, Some(1e-5));
    }

    #[test]
    fn overrides_last_wins() {
        let s = from_toml(
            "[cavity]\nkappa_wb = 0.2\n",
            &[
                "cavity.kappa_wb=0.3".into(),
                "cavity.kappa_hz = 500".into(),
                "cavity.kappa_wb=0.4".into(),
            ],
        )
        .unwrap();
        assert_relative_eq!(s.params.kappa, 0.4 * hz_to_rad(10e3));
    }

    #[test]
    fn pump_scaled_coupling() {
        let s = from_toml(
            "[drive]\ncoupling = \"pump-scaled\"\ng_ref_wb = 0.1\np_ref_w = 5e-3\n",
            &[],
        )
        .unwrap();
        assert_eq!(
            s.params.coupling,
            Coupling::PumpScaled {
                g_ref: 0.1 * hz_to_rad(10e3),
                p_ref: 5e-3
            }
        );
        assert!(from_toml("[drive]\ncoupling = \"pump-scaled\"\n", &[]).is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        for bad in [
            "[cavity]\nkappa = 1\n",
            "[cavity]\nomega_b_hz = 1\n",
            "[laser]\nx = 1\n",
            "[condensate]\nomega_b_wb = 1\n",
        ] {
            let err = from_toml(bad, &[]).unwrap_err();
            assert!(matches!(err, Error::Config(_)), "{bad}");
        }
        assert!(from_toml("", &["kappa_wb=1".into()]).is_err());
        assert!(from_toml("", &["cavity.kappa_wb".into()]).is_err());
        assert!(from_toml("", &["mode.response=fast".into()]).is_err());
    }

    #[test]
    fn invalid_values_are_config_errors() {
        let err = from_toml("[cavity]\nkappa_wb = -1\n", &[]).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(from_toml("[condensate]\nn_atoms = 1.5\n", &[]).is_err());
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let s = from_toml("[cavity]\nkappa_wb = 0.1234567\ndetuning_wb = 0.77\n", &[]).unwrap();
        let json = serde_json::to_string(&s.params).unwrap();
        let back = from_json(&json, &[]).unwrap();
        assert_eq!(back.params, s.params);
        let wrapped =
            serde_json::json!({ "spec": { "base": s.params, "mode": "printed" } }).to_string();
        let back = from_json(&wrapped, &[]).unwrap();
        assert_eq!(back.params, s.params);
        assert_eq!(back.response, Some(ResponseMode::Printed));
        let back = from_json(&json, &["cavity.detuning_wb=0.5".into()]).unwrap();
        assert_relative_eq!(back.params.detuning, 0.5 * s.params.omega_b);
    }
}
