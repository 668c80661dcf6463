//! Generate a synthetic building with a bushfire episode and write the two CSVs.
//!
//! cargo run --example synth_dataset -- /tmp/aerostack-data

use aerostack::data::{write_indoor_csv, write_outdoor_csv};
use aerostack::synth::{generate, Bushfire, SynthConfig};

fn main() -> aerostack::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "synthetic".into());
    std::fs::create_dir_all(&dir)?;
    let cfg = SynthConfig {
        bushfire: Some(Bushfire {
            start_day: 30,
            len_days: 3,
            spike: 40.0,
        }),
        ..SynthConfig::default()
    };
    let data = generate(&cfg)?;
    write_indoor_csv(std::fs::File::create(format!("{dir}/indoor.csv"))?, &data.indoor)?;
    write_outdoor_csv(std::fs::File::create(format!("{dir}/outdoor.csv"))?, &data.outdoor)?;

    let peak = data.outdoor.iter().filter_map(|o| o.pm25_out).fold(0.0, f64::max);
    println!("{} hourly rows written to {dir}/, outdoor peak {peak:.1} µg/m³", data.indoor.len());
    Ok(())
}
