//! Backward-in-time norm growth with the frequency cutoff, for a parabolic
//! and a dispersive equation.

use dispersive_lab::commands::named_example;
use dispersive_lab::state::{evolve_state, Projection, SpectralState};

fn main() -> dispersive_lab::Result<()> {
    for name in ["m2_parabolic_a2", "m2_elliptic_a3", "m2_dispersive_mixed"] {
        let spec = named_example(name).unwrap();
        println!("{name}");
        for k in [16, 32, 64, 128] {
            let phi = SpectralState::random_hs(k, 0.0, 11, 0.05)?;
            let u = evolve_state(&spec, &phi, -0.01)?;
            println!(
                "  K = {k:>3}: |u(-0.01)| / |phi| = {:>12.4e}   |P+ u|_H1/2 = {:>12.4e}",
                u.l2_norm() / phi.l2_norm(),
                u.project(Projection::Plus).sobolev_norm(0.5)
            );
        }
    }
    Ok(())
}
