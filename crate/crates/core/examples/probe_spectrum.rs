//! Absorption and dispersion of the probe around δ = ω_b for a stable
//! weak-coupling point, printed as a coarse table.
//!
//! cargo run --example probe_spectrum -- [detuning] [g]

use becfano::model::EffectiveParams;
use becfano::response::{probe_response, ResponseMode, DEFAULT_DELAY_STEP};
use becfano::stability::stability_check;

fn main() -> becfano::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<f64>().ok());
    let detuning = args.next().flatten().unwrap_or(1.0);
    let g = args.next().flatten().unwrap_or(0.05);
    let p = EffectiveParams::normalized(0.1, 7.5e-7, detuning, g, 1.0, 100.0);

    let report = stability_check(&p);
    println!("detuning {detuning}, g {g}: stable = {}", report.stable);

    println!(
        "{:>9} {:>12} {:>12} {:>10} {:>12}",
        "delta-wb", "mu", "nu", "|t|^2", "tau_g (us)"
    );
    for i in 0..=20 {
        let db = -0.1 + 0.01 * i as f64;
        let r = probe_response(&p, p.omega_b + db, ResponseMode::Solver, DEFAULT_DELAY_STEP)?;
        println!(
            "{db:9.3} {:12.5e} {:12.5e} {:10.4} {:12.4e}",
            r.mu,
            r.nu_out,
            r.t_p.norm_sqr(),
            r.tau_g * 1e6
        );
    }
    Ok(())
}
