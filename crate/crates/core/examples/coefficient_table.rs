//! Dump every coefficient sequence for one equation.
//!
//! cargo run --example coefficient_table -- crates/core/examples/configs/m2_elliptic_b.json

use dispersive_lab::commands::table_report;
use dispersive_lab::config::RunConfig;

fn main() -> dispersive_lab::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => RunConfig::load(path)?,
        // m = 4, elliptic at j* = 1, so the β sequences are populated
        None => RunConfig::from_json(
            r#"{"m":4,"a":[[0,1],[0,0],[0.3,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
                "b":[[0.5,0.2],[0.1,-0.4],[0,0.3],[0.2,0],[0,0],[0,0],[0,0],[0,0]]}"#,
        )?,
    };
    println!("{}", serde_json::to_string_pretty(&table_report(&cfg)?)?);
    Ok(())
}
