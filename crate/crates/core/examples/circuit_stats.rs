//! Parse a Bristol circuit, validate it, and print its statistics and
//! round schedule.
//!
//!     cargo run --example circuit_stats -- path/to/circuit.txt
//!     cargo run --example circuit_stats -- aes128_expanded

use ringshare::circuit::{bundled, layerize, parse_bristol, validate};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "comparator8".into());
    let c = match bundled::by_name(&arg) {
        Some((c, _)) => c,
        None => parse_bristol(&std::fs::read_to_string(&arg)?)?,
    };
    let report = validate(&c);
    if !report.is_valid() {
        for v in &report.violations {
            eprintln!("{v:?}");
        }
        std::process::exit(3);
    }
    println!("{}", c.stats());

    let layering = layerize(&c);
    println!("\n{} layers, {} AND rounds", layering.layers().len(), layering.and_depth());
    for (i, layer) in layering.layers().iter().enumerate().take(12) {
        println!("  layer {i:>2}: {:>5} local, {:>5} AND", layer.local.len(), layer.and.len());
    }
    if layering.layers().len() > 12 {
        println!("  ...");
    }
    Ok(())
}
