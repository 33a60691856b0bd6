//! Functional and effective networks on synthetic systems with known wiring.
//!
//! cargo run --release --example network_inference

use infolab::netinf::{export_hyperedges, infer_effective, infer_fc, Correction, EffectiveConfig, Estimator, SelectionMode};
use infolab::surrogate::{SurrogateConfig, SurrogateMethod};
use infolab::synth::{generate, Gate, GeneratorSpec, Mode};

fn main() -> infolab::Result<()> {
    let surrogates = SurrogateConfig::new(SurrogateMethod::CircularShift, 199, 5, Vec::new());

    let driver = generate(&GeneratorSpec::CommonDriver { children: 3, flip: 0.1, mode: Mode::Static }, 500, 1)?;
    let fc = infer_fc(&driver.series, Estimator::Plugin, &surrogates, 0.05, Correction::BenjaminiHochberg)?;
    println!("functional network of a common driver and three children (names {:?})", driver.series.names());
    for e in &fc.edges {
        println!("  {} -- {}  I = {:.3} bit  p = {:.3}  {}", e.source, e.target, e.weight, e.p_value, if e.significant { "*" } else { "" });
    }

    let xor = generate(&GeneratorSpec::Gate { gate: Gate::Xor, mode: Mode::Dynamic }, 1000, 2)?;
    let mut cfg = EffectiveConfig::new(2, 2, surrogates);
    for mode in [SelectionMode::Bivariate, SelectionMode::Multivariate] {
        cfg.mode = mode;
        let net = infer_effective(&xor.series, &cfg)?;
        let z = &net.parents[2];
        println!("\n{mode:?} search for the parents of z (history {}):", z.history);
        for p in &z.parents {
            println!("  source {} at lag {}: {:.3} bit, p = {:.3}", p.source, p.lag, p.contribution, p.p_value);
        }
        if z.parents.is_empty() {
            println!("  none");
        }
        for h in export_hyperedges(&net.parents) {
            println!("  hyperedge {:?} -> {} (potentially synergistic)", h.sources, h.target);
        }
    }
    Ok(())
}
