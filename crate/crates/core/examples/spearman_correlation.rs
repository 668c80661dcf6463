//! Indoor/outdoor rank correlation as the outdoor coupling grows.

use aerostack::cli::correlation_table;
use aerostack::synth::{generate, SynthConfig};

fn main() -> aerostack::Result<()> {
    for alpha in [0.0, 0.3, 0.6, 0.9] {
        let data = generate(&SynthConfig {
            outdoor_coupling: alpha,
            ..SynthConfig::default()
        })?;
        let row = &correlation_table(data.indoor, &data.outdoor)?[0];
        println!(
            "alpha {alpha:.1}: r = {:+.3} over {} hours (indoor {:.2} ± {:.2}, outdoor {:.2} ± {:.2})",
            row.spearman_r, row.matched_hours, row.indoor_mean, row.indoor_sd, row.outdoor_mean, row.outdoor_sd
        );
    }
    Ok(())
}
