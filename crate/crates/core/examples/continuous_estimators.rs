//! Gaussian, Kozachenko-Leonenko and KSG estimates against closed forms.
//!
//! cargo run --release --example continuous_estimators

use infolab::estimators::{gaussian_mi, kl_entropy, ksg_mi, KnnConfig, KsgVariant};
use infolab::synth::{generate, GeneratorSpec};

fn main() -> infolab::Result<()> {
    let cfg = KnnConfig::default();
    println!("{:>5} {:>10} {:>10} {:>10} {:>10}", "rho", "truth", "gaussian", "ksg-1", "ksg-2");
    for rho in [0.0, 0.3, 0.6, 0.9] {
        let g = generate(&GeneratorSpec::CorrelatedPair { rho }, 10_000, 11)?;
        let s = g.series.continuous().expect("continuous generator");
        println!(
            "{:>5.1} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            rho,
            -0.5 * (1.0 - rho * rho).ln(),
            gaussian_mi(s, &[0], &[1])?,
            ksg_mi(s, &[0], &[1], &cfg, KsgVariant::One)?.value,
            ksg_mi(s, &[0], &[1], &cfg, KsgVariant::Two)?.value
        );
    }
    let g = generate(&GeneratorSpec::CorrelatedPair { rho: 0.0 }, 10_000, 12)?;
    let s = g.series.continuous().expect("continuous generator");
    let h = kl_entropy(s, &[0], &cfg)?;
    println!(
        "\nKL entropy of a standard normal: {:.4} nats (truth {:.4})",
        h.value,
        0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln()
    );
    println!("all values in nats");
    Ok(())
}
