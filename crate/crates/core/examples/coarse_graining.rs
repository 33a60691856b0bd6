//! Turning continuous signals into symbols: binning, point processes and
//! ordinal patterns.
//!
//! cargo run --example coarse_graining

use infolab::discretize::{bin_series, ordinal_embed, point_process, BinningSpec, OrdinalSpec, Threshold};
use infolab::estimators::plugin_entropy;
use infolab::{ContinuousSeries, Unit};
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> infolab::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let noise: Vec<f64> = (0..5000).map(|_| StandardNormal.sample(&mut rng)).collect();
    let sine: Vec<f64> = (0..5000).map(|t| (t as f64 * 0.07).sin()).collect();
    let s = ContinuousSeries::from_columns(vec![noise, sine])?.with_names(vec!["noise".into(), "sine".into()])?;

    for spec in [BinningSpec::uniform(8)?, BinningSpec::equal_frequency(8)?] {
        let d = bin_series(&s, &spec)?;
        println!(
            "{:?} 8 bins: H(noise) = {:.3} bit, H(sine) = {:.3} bit",
            spec.scheme,
            plugin_entropy(&d, &[0], Unit::Bits)?,
            plugin_entropy(&d, &[1], Unit::Bits)?
        );
    }

    let spikes = point_process(&s, Threshold::ZScore(2.0))?;
    let rate = spikes.column(0).iter().sum::<usize>() as f64 / spikes.len() as f64;
    println!("\nevents above 2 SD in the noise channel: rate {rate:.4}");
    let auto = point_process(&s, Threshold::Auto)?;
    println!("auto threshold events: {}", auto.column(0).iter().sum::<usize>());

    let ord = ordinal_embed(&s, &OrdinalSpec::new(4, 1)?)?;
    println!(
        "\npermutation entropy, d = 4 (max {:.3}): noise {:.3} bit, sine {:.3} bit",
        (24f64).log2(),
        plugin_entropy(&ord, &[0], Unit::Bits)?,
        plugin_entropy(&ord, &[1], Unit::Bits)?
    );
    Ok(())
}
