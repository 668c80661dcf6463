//! Seeded synthetic indoor/outdoor dataset for one building and one sensor.
//!
//! Outdoor PM2.5 is `5 + A sin(2πh/24) + AR(1)` plus an optional bushfire
//! spike, floored at zero. Indoor PM2.5 mixes an independent AR(1) around
//! 2 µg/m³ with the previous hour's outdoor value:
//! `max(0, (1-α) base(t) + α out(t-1) + noise)`. Every series draws from its
//! own ChaCha stream, so turning the bushfire on or off leaves all other
//! draws unchanged.

use chrono::{DateTime, TimeDelta, TimeZone, Timelike, Utc};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::str::FromStr;

use crate::data::{OutdoorObservation, SensorReading};
use crate::error::{Error, Result};

pub const BUILDING_ID: &str = "B01";
pub const SENSOR_ID: &str = "S01";
pub const LAT: f64 = -35.28;
pub const LON: f64 = 149.13;

/// A constant outdoor spike over whole days.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bushfire {
    pub start_day: u32,
    pub len_days: u32,
    /// µg/m³ added to outdoor PM2.5 over the span.
    pub spike: f64,
}

impl FromStr for Bushfire {
    type Err = Error;

    /// Parses `start:len:spike`, e.g. `30:3:40`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParam(format!("bushfire must be start:len:spike, got {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        let [start, len, spike] = parts[..] else {
            return Err(bad());
        };
        Ok(Self {
            start_day: start.trim().parse().map_err(|_| bad())?,
            len_days: len.trim().parse().map_err(|_| bad())?,
            spike: spike.trim().parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_days: u32,
    /// α: weight of the lagged outdoor value in indoor PM2.5.
    pub outdoor_coupling: f64,
    pub diurnal_amplitude: f64,
    /// φ of both AR(1) processes.
    pub ar_coefficient: f64,
    pub noise_sd: f64,
    pub bushfire: Option<Bushfire>,
    pub start: DateTime<Utc>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            n_days: 60,
            outdoor_coupling: 0.6,
            diurnal_amplitude: 2.0,
            ar_coefficient: 0.8,
            noise_sd: 0.5,
            bushfire: None,
            start: Utc.with_ymd_and_hms(2020, 1, 1, 0, 0, 0).unwrap(),
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_days < 2 {
            return Err(Error::InvalidParam("n_days must be >= 2".into()));
        }
        if !(0.0..=1.0).contains(&self.outdoor_coupling) {
            return Err(Error::InvalidParam("outdoor_coupling must lie in [0, 1]".into()));
        }
        if !(self.ar_coefficient.abs() < 1.0) {
            return Err(Error::InvalidParam("ar_coefficient must satisfy |φ| < 1".into()));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::InvalidParam("noise_sd must be >= 0".into()));
        }
        if !self.diurnal_amplitude.is_finite() {
            return Err(Error::NonFinite("diurnal_amplitude"));
        }
        if let Some(b) = self.bushfire {
            if b.len_days == 0 || !(b.spike > 0.0 && b.spike.is_finite()) {
                return Err(Error::InvalidParam("bushfire needs len_days >= 1 and spike > 0".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    pub indoor: Vec<SensorReading>,
    pub outdoor: Vec<OutdoorObservation>,
}

fn round3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

struct Streams {
    seed: u64,
}

impl Streams {
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// AR(1) path of length `n` with innovation SD `sd`, started from its
/// stationary distribution.
fn ar1(rng: &mut ChaCha8Rng, n: usize, phi: f64, sd: f64) -> Vec<f64> {
    let mut x = gauss(rng) * sd / (1.0 - phi * phi).sqrt();
    (0..n)
        .map(|_| {
            let v = x;
            x = phi * x + sd * gauss(rng);
            v
        })
        .collect()
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthData> {
    cfg.validate()?;
    let n = cfg.n_days as usize * 24;
    let s = Streams { seed: cfg.seed };
    let phi = cfg.ar_coefficient;
    let sd = cfg.noise_sd;
    let diurnal = |h: u32| cfg.diurnal_amplitude * (2.0 * PI * h as f64 / 24.0).sin();

    // Index 0 is the hour before the first indoor timestamp.
    let t_minus = cfg.start - TimeDelta::hours(1);
    let times: Vec<DateTime<Utc>> = (0..=n).map(|i| t_minus + TimeDelta::hours(i as i64)).collect();

    let out_ar = ar1(&mut s.rng(1), n + 1, phi, sd);
    let outdoor_pm: Vec<f64> = times
        .iter()
        .zip(&out_ar)
        .enumerate()
        .map(|(i, (t, ar))| {
            let mut v = 5.0 + diurnal(t.hour()) + ar;
            if let Some(b) = cfg.bushfire {
                let day = (i as i64 - 1).div_euclid(24);
                let from = i64::from(b.start_day);
                if day >= from && day < from + i64::from(b.len_days) {
                    v += b.spike;
                }
            }
            round3(v.max(0.0))
        })
        .collect();

    let base = ar1(&mut s.rng(2), n, phi, sd);
    let mut indoor_noise = s.rng(3);
    let mut pm10_noise = s.rng(4);
    let tvoc = ar1(&mut s.rng(5), n, 0.9, 15.0);
    let temp = ar1(&mut s.rng(6), n, 0.95, 0.3);
    let rh = ar1(&mut s.rng(7), n, 0.95, 1.5);
    let t2m = ar1(&mut s.rng(8), n + 1, 0.95, 0.6);
    let dew_gap = ar1(&mut s.rng(9), n + 1, 0.9, 0.8);
    let wind = ar1(&mut s.rng(10), n + 1, 0.85, 0.6);
    let sp = ar1(&mut s.rng(11), n + 1, 0.98, 40.0);
    let cloud = ar1(&mut s.rng(12), n + 1, 0.9, 0.1);
    let mut rain = s.rng(13);
    let rain_amount = Exp::new(1.0).map_err(|e| Error::InvalidParam(e.to_string()))?;

    let alpha = cfg.outdoor_coupling;
    let indoor = (0..n)
        .map(|i| {
            let t = times[i + 1];
            let pm25 = ((1.0 - alpha) * (2.0 + base[i]) + alpha * outdoor_pm[i] + sd * gauss(&mut indoor_noise))
                .max(0.0);
            let pm25 = round3(pm25);
            let pm10 = round3((1.6 * pm25 + sd * gauss(&mut pm10_noise)).max(0.0));
            let h = t.hour() as f64;
            SensorReading {
                timestamp: t,
                sensor_id: SENSOR_ID.into(),
                building_id: BUILDING_ID.into(),
                lat: Some(LAT),
                lon: Some(LON),
                pm25: Some(pm25),
                pm10: Some(pm10),
                tvoc: Some(round3((150.0 + tvoc[i]).max(0.0))),
                temp_c: Some(round3(22.0 + 1.0 * (2.0 * PI * (h - 9.0) / 24.0).sin() + temp[i])),
                rh_pct: Some(round3((50.0 + rh[i]).clamp(0.0, 100.0))),
            }
        })
        .collect();

    let outdoor = (1..=n)
        .map(|i| {
            let t = times[i];
            let h = t.hour() as f64;
            let air = 15.0 + 6.0 * (2.0 * PI * (h - 9.0) / 24.0).sin() + t2m[i];
            let sun = (PI * (h - 6.0) / 12.0).sin();
            let ssrd = if sun > 0.0 { 900.0 * sun * (1.0 - cloud[i].abs()).max(0.2) } else { 0.0 };
            let tp = if rain.random::<f64>() < 0.04 { rain_amount.sample(&mut rain) } else { 0.0 };
            OutdoorObservation {
                timestamp: t,
                building_id: BUILDING_ID.into(),
                pm25_out: Some(outdoor_pm[i]),
                t2m_c: Some(round3(air)),
                d2m_c: Some(round3(air - 4.0 - dew_gap[i].abs())),
                wind10m_ms: Some(round3((3.0 + wind[i]).abs())),
                sp_pa: Some(round3(101325.0 + sp[i])),
                ssrd_wm2: Some(round3(ssrd)),
                tp_mm: Some(round3(tp)),
            }
        })
        .collect();

    Ok(SynthData { indoor, outdoor })
}
