//! Higher-order dependence: total correlation, dual total correlation,
//! O- and S-information, TSE complexity.
//!
//! cargo run --example multivariate

use infolab::multivar::{
    description_complexity, dual_total_correlation, o_information, s_information, total_correlation, tse_complexity,
    TseMode,
};
use infolab::synth::{gate_distribution, sync_distribution, Gate};

fn main() -> infolab::Result<()> {
    // ten variables locked together through eight states
    let sync = sync_distribution(10, 8)?;
    let all: Vec<usize> = (0..10).collect();
    println!("synchronized system, N = 10, 8 states");
    println!("  TC  = {:.3} bit", total_correlation(&sync, &all)?);
    println!("  DTC = {:.3} bit", dual_total_correlation(&sync, &all)?);
    println!("  C   = {:.3} bit", description_complexity(&sync, &all)?);

    println!("\n{:<5} {:>8} {:>8} {:>8} {:>8} {:>8}", "gate", "TC", "DTC", "O", "S", "TSE");
    for gate in [Gate::And, Gate::Or, Gate::Xor] {
        let d = gate_distribution(gate);
        let v = [0, 1, 2];
        println!(
            "{:<5} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4}",
            format!("{gate:?}"),
            total_correlation(&d, &v)?,
            dual_total_correlation(&d, &v)?,
            o_information(&d, &v)?,
            s_information(&d, &v)?,
            tse_complexity(&d, &v, TseMode::Exact)?.value
        );
    }
    println!("negative O-information marks synergy-dominated structure (XOR)");
    Ok(())
}
