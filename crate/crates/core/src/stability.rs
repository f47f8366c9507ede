//! Linear stability of the homogeneous fluctuation dynamics.
//!
//! With δc = x + i y the undriven equations form the real system
//!
//! ```text
//! d/dt (q, q̇, x, y) = M (q, q̇, x, y)
//!
//!     |  0      1     0       0 |
//! M = | −ω_b²  −γ_b  −2G      0 |     G = g(U_eff + ν)
//!     |  0      0    −κ       Δ |
//!     | −g      0    −Δ      −κ |
//! ```
//!
//! and the steady state exists only when every eigenvalue of M has a
//! negative real part.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::EffectiveParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub stable: bool,
    pub eigenvalues: Vec<Complex64>,
}

impl StabilityReport {
    /// Largest real part, i.e. minus the slowest decay rate when stable.
    pub fn spectral_abscissa(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn dynamics_matrix(p: &EffectiveParams) -> Matrix4<f64> {
    let w2 = p.omega_b * p.omega_b;
    let force = p.force_coupling();
    #[rustfmt::skip]
    let m = Matrix4::new(
        0.0,   1.0,         0.0,          0.0,
        -w2,   -p.gamma_b,  -2.0 * force, 0.0,
        0.0,   0.0,         -p.kappa,     p.detuning,
        -p.g,  0.0,         -p.detuning,  -p.kappa,
    );
    m
}

pub fn stability_check(p: &EffectiveParams) -> StabilityReport {
    let eig = dynamics_matrix(p).complex_eigenvalues();
    let eigenvalues: Vec<Complex64> = eig.iter().map(|z| Complex64::new(z.re, z.im)).collect();
    let stable = eigenvalues.iter().all(|z| z.re < 0.0 && z.is_finite());
    StabilityReport {
        stable,
        eigenvalues,
    }
}
