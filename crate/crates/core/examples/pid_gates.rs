//! Partial information decomposition of logic gates under each redundancy
//! function, plus the two-bit copy.
//!
//! cargo run --example pid_gates

use infolab::pid::{build_lattice, pid_decompose, RedundancyFunction};
use infolab::synth::{gate_distribution, Gate};
use infolab::JointDistribution;

fn main() -> infolab::Result<()> {
    for n in 2..=4 {
        println!("redundancy lattice for {n} sources: {} atoms", build_lattice(n)?.len());
    }
    let functions = [
        RedundancyFunction::Wb,
        RedundancyFunction::Mmi,
        RedundancyFunction::Pm,
        RedundancyFunction::Sx,
    ];
    for gate in [Gate::And, Gate::Xor] {
        println!("\n{gate:?}: I(X1,X2; Y) split into atoms");
        println!("{:<6} {:>9} {:>9} {:>9} {:>9}", "", "{1}{2}", "{1}", "{2}", "{12}");
        let d = gate_distribution(gate);
        for f in functions {
            let r = pid_decompose(&d, &[vec![0], vec![1]], &[2], f)?;
            let a = |l: &str| r.atom(l).unwrap_or(f64::NAN);
            println!(
                "{:<6} {:>9.4} {:>9.4} {:>9.4} {:>9.4}",
                f.to_string(),
                a("{1}{2}"),
                a("{1}"),
                a("{2}"),
                a("{12}")
            );
        }
    }

    // target is the pair itself: two independent fair bits copied
    let copy = JointDistribution::new(
        infolab::Alphabet::new(vec![2, 2, 4])?,
        (0..4).map(|i| (vec![i >> 1, i & 1, i], 0.25)),
    )?;
    let r = pid_decompose(&copy, &[vec![0], vec![1]], &[2], RedundancyFunction::Wb)?;
    println!(
        "\ntwo-bit copy under the minimum-specific-information measure: redundancy {:.3} bit although the sources are independent",
        r.atom("{1}{2}").unwrap()
    );
    Ok(())
}
