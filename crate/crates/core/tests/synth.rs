use aerostack::synth::{generate, Bushfire, SynthConfig};
use chrono::TimeDelta;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn nonnegative_and_hourly(
        seed in any::<u64>(),
        days in 2u32..6,
        alpha in 0.0f64..=1.0,
        phi in -0.95f64..0.95,
        noise in 0.0f64..4.0,
    ) {
        let d = generate(&SynthConfig {
            seed,
            n_days: days,
            outdoor_coupling: alpha,
            ar_coefficient: phi,
            noise_sd: noise,
            ..SynthConfig::default()
        })
        .unwrap();
        prop_assert_eq!(d.indoor.len(), days as usize * 24);
        for w in d.indoor.windows(2) {
            prop_assert_eq!(w[1].timestamp - w[0].timestamp, TimeDelta::hours(1));
        }
        prop_assert!(d.indoor.iter().all(|r| r.pm25.unwrap() >= 0.0 && r.pm10.unwrap() >= 0.0 && r.tvoc.unwrap() >= 0.0));
        prop_assert!(d.outdoor.iter().all(|o| o.pm25_out.unwrap() >= 0.0));
    }

    #[test]
    fn bushfire_raises_the_span_mean(seed in any::<u64>(), start in 0u32..4, len in 1u32..3, spike in 0.5f64..50.0) {
        let base = SynthConfig { seed, n_days: 8, ..SynthConfig::default() };
        let plain = generate(&base).unwrap();
        let fire = generate(&SynthConfig {
            bushfire: Some(Bushfire { start_day: start, len_days: len, spike }),
            ..base
        })
        .unwrap();
        let span = (start * 24) as usize..((start + len) * 24) as usize;
        let mean = |d: &aerostack::synth::SynthData| {
            d.outdoor[span.clone()].iter().map(|o| o.pm25_out.unwrap()).sum::<f64>() / span.len() as f64
        };
        prop_assert!(mean(&fire) > mean(&plain));
    }
}
