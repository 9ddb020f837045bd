//! The modified energy E(u; N) along a trajectory and its Gronwall envelope.

use dispersive_lab::commands::named_example;
use dispersive_lab::energy::{energy_e, gronwall_rate, select_n};
use dispersive_lab::state::{evolve_state, SpectralState};

fn main() -> dispersive_lab::Result<()> {
    let spec = named_example("m2_dispersive_mixed").unwrap();
    let k = 64;
    let n = select_n(&spec, k);
    let c = gronwall_rate(&spec, k, n)?;
    println!("N = {n}, Gronwall rate C = {c:.6}");

    let phi = SpectralState::random_hs(k, 0.0, 3, 0.05)?;
    let e0 = energy_e(&spec, &phi, n).e_value;
    for i in 0..=10 {
        let t = i as f64 / 10.0;
        let u = evolve_state(&spec, &phi, t)?;
        let r = energy_e(&spec, &u, n);
        println!(
            "t = {t:.1}  |u|^2 = {:.6}  E = {:.6}  bound = {:.6}  sandwich {}",
            r.l2_sq,
            r.e_value,
            e0 * (c * t).exp(),
            r.sandwich_holds()
        );
    }
    Ok(())
}
