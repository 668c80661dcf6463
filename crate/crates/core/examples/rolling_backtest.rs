//! Expanding-window backtest of the benchmarks and the stack.

use aerostack::ensemble::StackConfig;
use aerostack::evaluation::{rolling_backtest, BacktestConfig};
use aerostack::features::{sensor_matrices, FeatureSchema};
use aerostack::learners::{GbtParams, ModelParams, RfParams};
use aerostack::synth::{generate, SynthConfig};

fn main() -> aerostack::Result<()> {
    let data = generate(&SynthConfig {
        n_days: 30,
        ..SynthConfig::default()
    })?;
    let x = sensor_matrices(data.indoor, &data.outdoor, &FeatureSchema::default())?.remove(0).matrix;
    let params = ModelParams {
        rf: RfParams {
            n_trees: 40,
            ..RfParams::default()
        },
        gbt: GbtParams {
            n_rounds: 100,
            ..GbtParams::default()
        },
        ..ModelParams::default()
    };
    let cfg = BacktestConfig::default();
    let learners = cfg.learners(&StackConfig::default(), &params);
    let report = rolling_backtest(&x, &learners, &cfg)?;
    report.verify(&x)?;

    println!("test days: {:?}", report.plan.test_days);
    for m in &report.models {
        println!("{:>5}: RMSE {:.3}  R2 {:.3}  ({} windows)", m.model, m.rmse, m.r2, m.windows.len());
    }
    Ok(())
}
