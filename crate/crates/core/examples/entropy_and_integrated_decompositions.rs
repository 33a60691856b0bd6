//! Partial entropy decomposition of a triple and integrated information
//! decomposition of a coupled two-element process.
//!
//! cargo run --example entropy_and_integrated_decompositions

use infolab::pid::{classify_dynamics, ped_decompose, phiid_decompose, PedFunction, PhiFunction};
use infolab::synth::{gate_distribution, Gate};
use infolab::DiscreteSeries;
use rand::{Rng, SeedableRng};

fn main() -> infolab::Result<()> {
    let xor = gate_distribution(Gate::Xor);
    for f in [PedFunction::Hmin, PedFunction::Hsx, PedFunction::Hcs] {
        let r = ped_decompose(&xor, &[0, 1, 2], f)?;
        let mut atoms: Vec<(String, f64)> = r.iter().filter(|(_, v)| v.abs() > 1e-9).map(|(a, v)| (a.to_string(), v)).collect();
        atoms.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()));
        atoms.truncate(4);
        println!("PED of XOR with {f}: total {:.3} bit, largest atoms {atoms:.3?}", r.total());
    }

    // two elements that swap states with noise: information moves between them
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let (mut a, mut b) = (vec![0usize], vec![1usize]);
    for t in 1..20_000 {
        let flip = |v: usize, r: &mut rand_chacha::ChaCha8Rng| v ^ usize::from(r.random::<f64>() < 0.05);
        a.push(flip(b[t - 1], &mut rng));
        b.push(flip(a[t - 1], &mut rng));
    }
    let s = DiscreteSeries::from_columns(vec![a, b])?;
    let r = phiid_decompose(&s, &[0, 1], 1, PhiFunction::Mmi)?;
    println!("\nPhiID of a noisy swap, total {:.3} bit", r.total());
    for (atom, v) in r.iter().filter(|(_, v)| v.abs() > 0.01) {
        println!("  {:<22} {:>8.4}  {}", atom.to_string(), v, classify_dynamics(atom)?);
    }
    Ok(())
}
