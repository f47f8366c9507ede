//! Cross-check the frequency-domain sideband solver against direct RK4
//! integration at random stable parameter sets.
//!
//! cargo run --release --example oracle_check -- [n] [seed]

use becfano::langevin::oracle_check;

fn main() -> becfano::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);

    let t = std::time::Instant::now();
    let report = oracle_check(n, seed)?;
    println!(
        "{:>8} {:>8} {:>8} {:>8} {:>10}  rel.err",
        "kappa", "g", "Delta", "delta", "gamma_b"
    );
    for s in &report.samples {
        let p = &s.params;
        println!(
            "{:8.4} {:8.4} {:8.4} {:8.4} {:10.3e}  {:.2e}",
            p.kappa, p.g, p.detuning, s.delta, p.gamma_b, s.rel_error
        );
    }
    println!(
        "max relative error {:.3e} over {} sets ({} unstable draws rejected) in {:.1?}",
        report.max_rel_error(),
        report.samples.len(),
        report.rejected,
        t.elapsed()
    );
    Ok(())
}
