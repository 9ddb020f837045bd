//! Evolve random data under a named equation and print the norm table.
//!
//! cargo run --release --example simulate -- crates/core/examples/configs/m2_parabolic_a2.json

use dispersive_lab::commands::{simulate, write_simulation_csv};
use dispersive_lab::config::RunConfig;

fn main() -> dispersive_lab::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/m2_dispersive_mixed.json").into());
    let cfg = RunConfig::load(&path)?;
    let sim = simulate(&cfg)?;
    eprintln!("N = {}", sim.n_used);
    write_simulation_csv(&sim, std::io::stdout().lock())
}
