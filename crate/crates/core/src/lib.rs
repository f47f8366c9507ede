//! Probe transmission, Fano lineshapes and slow light in a cavity loaded
//! with a Bose-Einstein condensate.
//!
//! The condensate's Bogoliubov mode acts as a mechanical oscillator of
//! frequency ω_b coupled to the cavity field. A strong pump and a weak probe
//! drive the cavity; the linearized sideband equations give the probe output
//! `E_out = μ + iν` and transmission `t_p = 1 − E_out`, from which the phase
//! and the group delay follow.
//!
//! Everything inside the solvers is in units of ω_b; [`model`] converts from
//! SI inputs. Delays are reported in seconds by the library and in µs in the
//! CSV artifacts.
//!
//! ```
//! use becfano::model::EffectiveParams;
//! use becfano::response::{output_field, ResponseMode};
//!
//! let p = EffectiveParams::normalized(0.1, 7.5e-7, 1.0, 0.05, 1.0, 100.0);
//! let e = output_field(&p, 1.02, ResponseMode::Solver).unwrap();
//! assert!(e.re.is_finite());
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod discrepancy;
pub mod error;
pub mod fano;
pub mod io;
pub mod langevin;
pub mod model;
pub mod response;
pub mod stability;
pub mod sweep;

pub use error::{Error, Result};
