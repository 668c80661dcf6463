//! Table-1 style statistics of hourly PM2.5.

use aerostack::cli::stats_table;
use aerostack::synth::{generate, SynthConfig};

fn main() -> aerostack::Result<()> {
    let data = generate(&SynthConfig::default())?;
    for row in stats_table(data.indoor)? {
        println!(
            "{}: {} .. {}, {} sensor(s), {} days / {} hours",
            row.building_id, row.start_time, row.end_time, row.sensors, row.study_days, row.study_hours
        );
        println!(
            "  min {:.2}  median {:.2}  IQR {:.2}  mean {:.2}  sd {:.2}  max {:.2}",
            row.min, row.median, row.iqr, row.mean, row.sd, row.max
        );
    }
    Ok(())
}
