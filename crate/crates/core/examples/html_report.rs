//! Color-coded HTML report for a date range, with default threshold bands.
//!
//! cargo run --example html_report -- report.html

use aerostack::cli::{cmd_report, ReportArgs, RunConfig};
use aerostack::data::{write_indoor_csv, write_outdoor_csv};
use aerostack::synth::{generate, Bushfire, SynthConfig};

fn main() -> aerostack::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "report.html".into());
    let dir = tempfile::tempdir()?;
    let data = generate(&SynthConfig {
        bushfire: Some(Bushfire {
            start_day: 30,
            len_days: 3,
            spike: 80.0,
        }),
        ..SynthConfig::default()
    })?;
    let indoor = dir.path().join("indoor.csv");
    let outdoor = dir.path().join("outdoor.csv");
    write_indoor_csv(std::fs::File::create(&indoor)?, &data.indoor)?;
    write_outdoor_csv(std::fs::File::create(&outdoor)?, &data.outdoor)?;

    let args = ReportArgs {
        indoor,
        outdoor: Some(outdoor),
        building: Some("B01".into()),
        from: Some("2020-01-29".into()),
        to: Some("2020-02-04".into()),
    };
    cmd_report(&args, &RunConfig::default(), out.as_ref())?;
    let html = std::fs::read_to_string(&out)?;
    println!(
        "{out}: {} good, {} moderate, {} poor cells",
        html.matches("class=\"good\"").count(),
        html.matches("class=\"moderate\"").count(),
        html.matches("class=\"poor\"").count()
    );
    Ok(())
}
