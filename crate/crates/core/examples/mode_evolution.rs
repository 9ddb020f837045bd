//! Closed-form evolution of one mode pair against a Runge-Kutta integration.

use dispersive_lab::commands::named_example;
use dispersive_lab::mode::{eigen_exponents, rk4_oracle};
use dispersive_lab::{evolve_mode, ModePair, C64};

fn main() -> dispersive_lab::Result<()> {
    let spec = named_example("m2_dispersive_mixed").unwrap();
    let pair = ModePair::new(3.0, C64::new(1.0, 0.5), C64::new(-0.25, 0.75));
    for t in [0.01, 0.05, -0.05] {
        let exact = evolve_mode(&spec, &pair, t)?;
        let rk = rk4_oracle(&spec, &pair, t, 1e-5)?;
        let err = (exact.vector() - rk.vector()).norm() / exact.norm();
        println!("t = {t:>6}: |U| = {:.12} -> {:.12}, rk4 rel. diff {err:.2e}", pair.norm(), exact.norm());
    }

    let e = eigen_exponents(&spec, 3.0);
    println!("eigen-exponents of iM(3): {:.6} and {:.6}", e.mu1, e.mu2);
    Ok(())
}
