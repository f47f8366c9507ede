//! Largest coupling that keeps the linearized dynamics stable, found by
//! bisection on the eigenvalues of the drift matrix, for a few detunings.

use becfano::model::EffectiveParams;
use becfano::stability::stability_check;

fn threshold(detuning: f64) -> f64 {
    let at = |g| EffectiveParams::normalized(0.1, 7.5e-7, detuning, g, 1.0, 100.0);
    let (mut lo, mut hi) = (0.0, 10.0);
    if stability_check(&at(hi)).stable {
        return f64::INFINITY;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if stability_check(&at(mid)).stable {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn main() {
    println!("{:>9} {:>12} {:>16}", "detuning", "g_max", "abscissa(g/2)");
    for detuning in [0.3, 0.5, 0.8, 1.0, 1.2, 1.5] {
        let g = threshold(detuning);
        let half = EffectiveParams::normalized(0.1, 7.5e-7, detuning, 0.5 * g, 1.0, 100.0);
        println!(
            "{detuning:9.2} {g:12.5} {:16.4e}",
            stability_check(&half).spectral_abscissa()
        );
    }
}
