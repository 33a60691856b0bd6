//! Storage and transfer in a dynamic XOR: z(t) = x(t-1) xor y(t-1).
//!
//! cargo run --example information_dynamics

use infolab::dynamics::{
    active_information_storage, conditional_transfer_entropy, entropy_rate, excess_entropy, transfer_entropy,
};
use infolab::synth::{generate, Gate, GeneratorSpec, Mode};

fn main() -> infolab::Result<()> {
    let sys = generate(&GeneratorSpec::Gate { gate: Gate::Xor, mode: Mode::Dynamic }, 20_000, 7)?;
    let s = sys.series.discrete().expect("gate systems are symbolic");
    let (x, y, z) = (0, 1, 2);

    println!("TE(x -> z)          = {:.4} bit", transfer_entropy(s, x, z, 1, 1)?.expected);
    println!("TE(y -> z)          = {:.4} bit", transfer_entropy(s, y, z, 1, 1)?.expected);
    println!("TE(x -> z | y)      = {:.4} bit", conditional_transfer_entropy(s, &[x], z, &[y], 1, 1, 1)?.expected);
    println!("TE(x, y -> z)       = {:.4} bit", conditional_transfer_entropy(s, &[x, y], z, &[], 1, 1, 1)?.expected);
    println!("AIS(z), k = 1       = {:.4} bit", active_information_storage(s, z, 1)?.expected);
    println!("entropy rate of z   = {:.4} bit", entropy_rate(s, z, 1)?.expected);
    println!("excess entropy of x = {:.4} bit", excess_entropy(s, &[x], 1, 1)?.expected);

    // locals show where the transfer happens
    let cte = conditional_transfer_entropy(s, &[x], z, &[y], 1, 1, 1)?;
    let head: Vec<String> = cte.locals.values.iter().take(8).map(|v| format!("{v:.2}")).collect();
    println!("\nfirst local TE(x -> z | y) values from t = {}: {}", cte.start, head.join(" "));
    Ok(())
}
