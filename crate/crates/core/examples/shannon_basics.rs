//! Entropy, divergence and mutual information on hand-built distributions.
//!
//! cargo run --example shannon_basics

use infolab::{shannon, JointDistribution};

fn main() -> infolab::Result<()> {
    let fair = JointDistribution::uniform(&[6])?;
    // a two comes up two times in three
    let o = 1.0 / 15.0;
    let loaded = JointDistribution::from_dense(&[6], &[o, 2.0 / 3.0, o, o, o, o])?;
    println!("H(fair die)   = {:.4} bit", shannon::entropy(&fair, &[0])?);
    println!("H(loaded die) = {:.4} bit", shannon::entropy(&loaded, &[0])?);
    println!("D(loaded || fair) = {:.4} bit", shannon::kl_divergence(&loaded, &fair)?);
    // surprise of each roll: a two is less surprising on the loaded die, a five more
    for face in [2, 5] {
        println!(
            "h({face}): fair {:.3} bit, loaded {:.3} bit",
            shannon::local_entropy(&fair, &[0], &[face - 1])?,
            shannon::local_entropy(&loaded, &[0], &[face - 1])?
        );
    }

    // a noisy channel: Y copies X with probability 0.9
    let channel = JointDistribution::from_dense(&[2, 2], &[0.45, 0.05, 0.05, 0.45])?;
    let mi = shannon::mutual_information(&channel, &[0], &[1])?;
    let hy_x = shannon::conditional_entropy(&channel, &[1], &[0])?;
    println!("\nbinary symmetric channel, flip 0.1");
    println!("  I(X;Y)  = {mi:.4} bit");
    println!("  H(Y|X)  = {hy_x:.4} bit");
    for (x, y) in [(0, 0), (0, 1)] {
        let i = shannon::local_mutual_information(&channel, &[0], &[1], &[x, y])?;
        println!("  i(x={x}; y={y}) = {i:+.4} bit");
    }
    Ok(())
}
