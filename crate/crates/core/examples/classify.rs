//! Classify the bundled example equations.
//!
//! cargo run --example classify

use dispersive_lab::commands::named_examples;
use dispersive_lab::{classify, Kind};

fn main() {
    println!("{:<22} {:<11} {:>5}  {:<24} lambda", "name", "kind", "j*", "smoothing");
    for (name, spec) in named_examples() {
        let c = classify(&spec, spec.default_zero_tolerance());
        let jstar = c.jstar.map(|j| j.to_string()).unwrap_or_else(|| "-".into());
        println!(
            "{name:<22} {:<11} {jstar:>5}  {:<24} {:?}",
            format!("{:?}", c.kind),
            c.smoothing.describe(),
            c.lambda
        );
        if c.kind != Kind::Dispersive {
            println!("{:<22} decided by lambda_{}", "", c.deciding_index().unwrap());
        }
    }
}
