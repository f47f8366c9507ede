//! Fit the asymmetric Fano form to a synthetic noisy absorption line and
//! compare the recovered parameters with the truth.

use becfano::fano::{fit_fano, locate_landmarks, FanoModel, FanoShape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> becfano::Result<()> {
    let truth = FanoModel {
        amplitude: 0.8,
        delta0: 1.0,
        gamma: 0.02,
        q: 2.5,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let x: Vec<f64> = (0..801).map(|i| 0.8 + 0.0005 * i as f64).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|&d| truth.eval(d) + 0.01 * (rng.random::<f64>() - 0.5))
        .collect();

    let marks = locate_landmarks(&x, &y)?;
    println!(
        "landmarks: min {:.5} at {:.5}, max {:.5} at {:.5}",
        marks.mu_min, marks.delta_at_min, marks.mu_max, marks.delta_at_max
    );

    let start = FanoShape::from_q(1.0, 0.05, 0.0);
    let fit = fit_fano(&x, &y, &start)?;
    let m = fit.model;
    println!("{:>10} {:>10} {:>10}", "", "truth", "fit");
    println!("{:>10} {:10.5} {:10.5}", "q", truth.q, m.q);
    println!("{:>10} {:10.5} {:10.5}", "Gamma", truth.gamma, m.gamma);
    println!("{:>10} {:10.5} {:10.5}", "delta0", truth.delta0, m.delta0);
    println!(
        "{:>10} {:10.5} {:10.5}",
        "amplitude", truth.amplitude, m.amplitude
    );
    println!(
        "rms {:.3e} after {} iterations (converged: {})",
        fit.rms_residual, fit.iterations, fit.converged
    );
    Ok(())
}
