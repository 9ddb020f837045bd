//! Fourier projections and multipliers on a truncated state.

use dispersive_lab::state::{Multiplier, Projection, SpectralState};

fn main() -> dispersive_lab::Result<()> {
    let f = SpectralState::random_hs(32, 1.0, 5, 0.05)?;
    for p in [Projection::Plus, Projection::Minus, Projection::Zero, Projection::NonZero] {
        println!("{p:?}: |f| = {:.6}", f.project(p).l2_norm());
    }
    for s in [0.0, 0.5, 1.0, 2.0] {
        println!("H^{s}: {:.6}", f.sobolev_norm(s));
    }
    let d = f.multiplier(Multiplier::Dpow(-2), true)?;
    let back = d.multiplier(Multiplier::Dpow(2), true)?;
    println!("D^2 D^-2 P!=0 f recovers P!=0 f to {:.2e}", back.add(&f.project(Projection::NonZero).scaled((-1.0).into()))?.l2_norm());
    println!("{}", SpectralState::delta(4, 2)?.to_json()?);
    Ok(())
}
