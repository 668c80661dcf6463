//! Which inputs does the random forest lean on?

use aerostack::evaluation::permutation_importance;
use aerostack::features::{sensor_matrices, FeatureSchema};
use aerostack::learners::{Learner, RegressorSpec, RfParams};
use aerostack::synth::{generate, SynthConfig};

fn main() -> aerostack::Result<()> {
    let data = generate(&SynthConfig {
        n_days: 30,
        ..SynthConfig::default()
    })?;
    let x = sensor_matrices(data.indoor, &data.outdoor, &FeatureSchema::default())?.remove(0).matrix;
    let cut = x.n_rows() - 72;
    let train = x.select_rows(&(0..cut).collect::<Vec<_>>());
    let test = x.select_rows(&(cut..x.n_rows()).collect::<Vec<_>>());

    let model = RegressorSpec::rf(RfParams::default(), 42).fit(&train)?;
    for e in permutation_importance(model.as_ref(), &test, 10, 42)?.iter().take(8) {
        println!("{:>2}. {:<16} {:.4} ± {:.4}", e.rank, e.feature, e.mean_rmse_loss, e.sd_rmse_loss);
    }
    Ok(())
}
