//! Fit the three-stage stack and look inside it.

use aerostack::ensemble::{fit_deml, StackConfig};
use aerostack::evaluation::rmse;
use aerostack::features::{sensor_matrices, FeatureSchema};
use aerostack::learners::{Model, ModelParams};
use aerostack::synth::{generate, SynthConfig};

fn main() -> aerostack::Result<()> {
    let data = generate(&SynthConfig {
        n_days: 21,
        ..SynthConfig::default()
    })?;
    let x = sensor_matrices(data.indoor, &data.outdoor, &FeatureSchema::default())?.remove(0).matrix;
    let cut = x.n_rows() - 24;
    let train = x.select_rows(&(0..cut).collect::<Vec<_>>());
    let test = x.select_rows(&(cut..x.n_rows()).collect::<Vec<_>>());

    let stack = StackConfig::default().build(&ModelParams::default());
    let model = fit_deml(&stack, &train)?;
    for audit in model.audits() {
        audit.check()?;
    }
    for (col, w) in model.meta_oof().iter().zip(model.weights()) {
        println!("meta {:>4}: weight {w:.3}", col.name);
    }
    for col in model.base_oof() {
        println!("base {:>4}: out-of-fold RMSE {:.3}", col.name, rmse(&col.predictions, train.target())?);
    }
    let pred = model.predict(&test)?;
    println!("next-day RMSE {:.3}", rmse(&pred, test.target())?);
    Ok(())
}
