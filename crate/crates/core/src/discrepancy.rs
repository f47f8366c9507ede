//! Pointwise comparison of μ between two response modes, typically the
//! printed closed form against the direct solve.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::EffectiveParams;
use crate::response::{output_field, ResponseMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub mode: ResponseMode,
    pub reference: ResponseMode,
    /// Largest |μ_mode − μ_ref| / |μ_ref|.
    pub max_rel: f64,
    pub median_rel: f64,
    /// δ − ω_b at the largest difference.
    pub delta_bar_at_max: Option<f64>,
    pub compared: usize,
    /// Points skipped because either mode has a pole there.
    pub excluded: usize,
}

fn rel_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d == 0.0 {
        0.0
    } else {
        d / b.abs()
    }
}

/// Compare μ from `mode` against μ from `reference` at probe detunings
/// δ = ω_b + δ̄ for each δ̄ in `delta_bar`.
pub fn discrepancy_report(
    p: &EffectiveParams,
    delta_bar: &[f64],
    mode: ResponseMode,
    reference: ResponseMode,
) -> Result<DiscrepancyReport> {
    let mut diffs = Vec::with_capacity(delta_bar.len());
    let mut excluded = 0;
    let mut worst: Option<(f64, f64)> = None;
    for &db in delta_bar {
        let d = p.omega_b + db;
        let pair = output_field(p, d, mode).and_then(|a| Ok((a, output_field(p, d, reference)?)));
        match pair {
            Ok((a, b)) => {
                let r = rel_diff(a.re, b.re);
                if worst.is_none_or(|(w, _)| r > w) {
                    worst = Some((r, db));
                }
                diffs.push(r);
            }
            Err(e) if e.is_numerical() => excluded += 1,
            Err(e) => return Err(e),
        }
    }
    diffs.sort_by(f64::total_cmp);
    let median_rel = match diffs.len() {
        0 => f64::NAN,
        n if n % 2 == 1 => diffs[n / 2],
        n => 0.5 * (diffs[n / 2 - 1] + diffs[n / 2]),
    };
    Ok(DiscrepancyReport {
        mode,
        reference,
        max_rel: worst.map_or(f64::NAN, |w| w.0),
        median_rel,
        delta_bar_at_max: worst.map(|w| w.1),
        compared: diffs.len(),
        excluded,
    })
}

impl std::fmt::Display for DiscrepancyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} vs {} mu: max rel diff {:.3e}",
            self.mode.name(),
            self.reference.name(),
            self.max_rel
        )?;
        if let Some(d) = self.delta_bar_at_max {
            write!(f, " at delta_bar = {d:.6}")?;
        }
        write!(
            f,
            ", median {:.3e} ({} points, {} excluded)",
            self.median_rel, self.compared, self.excluded
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn grid() -> Vec<f64> {
        (0..101).map(|i| -0.5 + i as f64 * 0.01).collect()
    }

    #[test]
    fn self_comparison_is_zero() {
        let p = EffectiveParams::normalized(0.1, 7.5e-7, 1.0, 0.05, 1.0, 100.0);
        let r =
            discrepancy_report(&p, &grid(), ResponseMode::Solver, ResponseMode::Solver).unwrap();
        assert_eq!((r.max_rel, r.median_rel), (0.0, 0.0));
        assert_eq!(r.compared, 101);
    }

    #[test]
    fn bare_cavity_disagreement() {
        // g = 0: printed form reduces to 1/(κ − iΔ)-like terms with δ mixed
        // in, the solver to 1/(κ + i(Δ − δ)); they differ away from δ = 0
        let p = EffectiveParams::normalized(0.1, 1e-3, 1.0, 0.0, 1.0, 1.0);
        let r =
            discrepancy_report(&p, &grid(), ResponseMode::Printed, ResponseMode::Solver).unwrap();
        assert!(r.max_rel > 0.1);
        let db = r.delta_bar_at_max.unwrap();
        let d = 1.0 + db;
        let printed = output_field(&p, d, ResponseMode::Printed).unwrap().re;
        let solver = ((2.0f64 * 0.1).sqrt() / Complex64::new(0.1, 1.0 - d)).re;
        assert!((r.max_rel - (printed - solver).abs() / solver.abs()).abs() < 1e-12);
    }

    #[test]
    fn poles_are_excluded() {
        // the printed denominator vanishes at δ = ω_b when g = γ_b = 0
        let p = EffectiveParams::normalized(0.1, 0.0, 1.0, 0.0, 1.0, 1.0);
        let r = discrepancy_report(
            &p,
            &[-0.1, 0.0, 0.1],
            ResponseMode::Printed,
            ResponseMode::SolverProbeOnly,
        )
        .unwrap();
        assert_eq!(r.excluded, 1);
        assert_eq!(r.compared, 2);
    }
}
