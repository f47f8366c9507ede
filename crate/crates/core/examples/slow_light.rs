//! Group delay at δ = ω_b against pump power, with the coupling scaled
//! linearly from 0.1 ω_b at 5 mW. Unstable points are evaluated and marked.

use becfano::model::{Coupling, SystemParams};
use becfano::response::ResponseMode;
use becfano::sweep::{delay_curve, StabilityPolicy};

fn main() -> becfano::Result<()> {
    let mut base = SystemParams::figure_base(1.0, 0.1);
    base.coupling = Coupling::PumpScaled {
        g_ref: 0.1 * base.omega_b,
        p_ref: 5e-3,
    };

    let p_l: Vec<f64> = (1..=10).map(|i| i as f64 * 1e-3).collect();
    let curve = delay_curve(&base, &p_l, ResponseMode::Solver, StabilityPolicy::Annotate)?;
    println!("{:>8} {:>12}", "P (mW)", "tau_g (us)");
    for ((p, t), unstable) in curve.p_l.iter().zip(&curve.tau_g_us).zip(&curve.unstable) {
        let t = t.map_or("-".to_owned(), |t| format!("{t:.4}"));
        let mark = if *unstable { "  unstable" } else { "" };
        println!("{:8.2} {t:>12}{mark}", p * 1e3);
    }
    Ok(())
}
