//! The four regressors on a time-ordered train/test split.

use aerostack::evaluation::{r_squared, rmse};
use aerostack::features::{sensor_matrices, FeatureSchema};
use aerostack::learners::{Learner, ModelKind, ModelParams};
use aerostack::synth::{generate, SynthConfig};

fn main() -> aerostack::Result<()> {
    let data = generate(&SynthConfig {
        n_days: 21,
        ..SynthConfig::default()
    })?;
    let x = sensor_matrices(data.indoor, &data.outdoor, &FeatureSchema::default())?.remove(0).matrix;
    let cut = x.n_rows() - 48;
    let train = x.select_rows(&(0..cut).collect::<Vec<_>>());
    let test = x.select_rows(&(cut..x.n_rows()).collect::<Vec<_>>());

    let params = ModelParams::default();
    for kind in [ModelKind::Rf, ModelKind::Gbt, ModelKind::Svr, ModelKind::Glm] {
        let model = params.spec(kind, 7).fit(&train)?;
        let pred = model.predict(&test)?;
        println!(
            "{kind:>4}: RMSE {:.3}  R2 {:.3}",
            rmse(&pred, test.target())?,
            r_squared(&pred, test.target())?
        );
    }
    Ok(())
}
