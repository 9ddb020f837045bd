//! Residual growth of the corrected energy identities, with and without the
//! correction terms.

use dispersive_lab::coefficients::CoefficientTable;
use dispersive_lab::commands::named_examples;
use dispersive_lab::estimates::{ResidualForm, Side};

fn main() -> dispersive_lab::Result<()> {
    for (name, spec) in named_examples() {
        let table = CoefficientTable::compute(&spec, spec.default_zero_tolerance())?;
        let mut forms = vec![
            (ResidualForm::prop21(&spec, &table, false), ResidualForm::prop21(&spec, &table, true)),
            (
                ResidualForm::lemma21(&spec, &table, Side::Plus, false),
                ResidualForm::lemma21(&spec, &table, Side::Plus, true),
            ),
        ];
        if table.jstar.is_some() {
            forms.push((
                ResidualForm::prop22(&spec, &table, Side::Plus, false)?,
                ResidualForm::prop22(&spec, &table, Side::Plus, true)?,
            ));
        }
        for (with, without) in forms {
            let (a, b) = (with.scan(), without.scan());
            println!(
                "{name:<22} {:<12} slope {:>6.3} (corrected)  {:>6.3} (ablated)",
                a.name, a.growth_fit, b.growth_fit
            );
        }
    }
    Ok(())
}
