//! LOESS (span 0.2) trend of indoor PM2.5 through a bushfire episode.

use aerostack::evaluation::loess_smooth;
use aerostack::synth::{generate, Bushfire, SynthConfig};

fn main() -> aerostack::Result<()> {
    let data = generate(&SynthConfig {
        n_days: 20,
        bushfire: Some(Bushfire {
            start_day: 8,
            len_days: 4,
            spike: 30.0,
        }),
        ..SynthConfig::default()
    })?;
    let y: Vec<f64> = data.indoor.iter().map(|r| r.pm25.unwrap_or(0.0)).collect();
    let x: Vec<f64> = (0..y.len()).map(|h| h as f64).collect();
    let trend = loess_smooth(&x, &y, 0.2)?;
    for day in (0..20).step_by(2) {
        let h = day * 24 + 12;
        println!("day {day:>2}: observed {:>6.2}  trend {:>6.2}", y[h], trend[h]);
    }
    Ok(())
}
