//! From raw readings to a model matrix: hourly means, outdoor join, lags,
//! calendar fields and lagged covariates; then z-scoring.

use aerostack::data::{hourly_aggregate, join_hourly};
use aerostack::features::{build_feature_matrix, FeatureSchema, Standardizer};
use aerostack::synth::{generate, SynthConfig};

fn main() -> aerostack::Result<()> {
    let data = generate(&SynthConfig {
        n_days: 7,
        ..SynthConfig::default()
    })?;
    let hourly = join_hourly(&hourly_aggregate(&data.indoor)?, &data.outdoor);
    let schema = FeatureSchema {
        lags: vec![1, 2, 3, 24],
        ..FeatureSchema::default()
    };
    let x = build_feature_matrix(&hourly, &schema)?;
    println!("{} hours -> {} rows x {} columns", hourly.len(), x.n_rows(), x.n_cols());
    println!("columns: {}", x.columns().join(", "));

    let z = Standardizer::fit_all(&x)?;
    let scaled = z.apply(&x)?;
    println!("first row, raw:    {:?}", &x.row(0)[..4]);
    println!("first row, scaled: {:?}", &scaled.row(0)[..4]);
    Ok(())
}
