//! Per-frequency forward growth rates for an elliptic equation and its mirror.

use dispersive_lab::commands::named_example;
use dispersive_lab::estimates::smoothing_rate_scan;
use dispersive_lab::C64;

fn main() -> dispersive_lab::Result<()> {
    let spec = named_example("m2_elliptic_a3").unwrap();
    let mirror = spec.clone().with_a(3, C64::new(0.0, -1.0));
    for (label, s) in [("a3 = i", spec), ("a3 = -i", mirror)] {
        let scan = smoothing_rate_scan(&s, 64)?;
        println!("{label}: expected signs {:?}, xi0 = {:?}", scan.expected, scan.xi0);
        for r in scan.rows.iter().filter(|r| (r.xi as usize).is_power_of_two()) {
            println!("  xi = {:>3}  plus {:>10.4}  minus {:>10.4}", r.xi, r.rate_plus, r.rate_minus);
        }
    }
    Ok(())
}
