use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use aerostack::data::{parse_indoor_csv, parse_outdoor_csv};
use tempfile::TempDir;

fn aerostack(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aerostack"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

fn synth_dir(extra: &[&str]) -> (TempDir, PathBuf) {
    let tmp = TempDir::new().unwrap();
    let data = tmp.path().join("data");
    let mut args = vec!["synth", "--out", "data"];
    args.extend_from_slice(extra);
    ok(&aerostack(tmp.path(), &args));
    (tmp, data)
}

/// Smaller models so that full backtests stay quick.
const LIGHT: &str = r#"{"models":{"rf":{"n_trees":15},"gbt":{"n_rounds":30}}}"#;

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut rows = vec![r.headers().unwrap().iter().map(String::from).collect()];
    rows.extend(r.records().map(|x| x.unwrap().iter().map(String::from).collect()));
    rows
}

#[test]
fn synth_round_trips_and_repeats() {
    let (tmp, data) = synth_dir(&["--seed", "9"]);
    let indoor = parse_indoor_csv(data.join("indoor.csv")).unwrap();
    let outdoor = parse_outdoor_csv(data.join("outdoor.csv")).unwrap();
    assert_eq!(indoor.len(), 60 * 24);
    assert_eq!(outdoor.len(), 60 * 24);

    ok(&aerostack(tmp.path(), &["synth", "--seed", "9", "--out", "again"]));
    assert_eq!(read(&data, "indoor.csv"), read(&tmp.path().join("again"), "indoor.csv"));
    assert_eq!(read(&data, "outdoor.csv"), read(&tmp.path().join("again"), "outdoor.csv"));
}

#[test]
fn synth_bushfire_reaches_spike() {
    let (_tmp, data) = synth_dir(&["--bushfire", "30:3:40"]);
    let outdoor = parse_outdoor_csv(data.join("outdoor.csv")).unwrap();
    let peak = outdoor[30 * 24..33 * 24]
        .iter()
        .filter_map(|o| o.pm25_out)
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(peak >= 40.0, "{peak}");
}

#[test]
fn synth_bad_flag_exits_2() {
    let tmp = TempDir::new().unwrap();
    let out = aerostack(tmp.path(), &["synth", "--bushfire", "30:3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = aerostack(tmp.path(), &["synth", "--alpha", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stats_one_row_for_one_building() {
    let (tmp, _) = synth_dir(&[]);
    ok(&aerostack(tmp.path(), &["stats", "--indoor", "data/indoor.csv", "--out", "t1.csv"]));
    let rows = csv_rows(&read(tmp.path(), "t1.csv"));
    assert_eq!(
        rows[0],
        ["building_id", "start_time", "end_time", "sensors", "study_days", "study_hours", "min", "max", "median", "iqr", "mean", "sd"]
    );
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][0], "B01");
    assert_eq!(rows[1][4], "60");
    assert_eq!(rows[1][5], "1440");
}

#[test]
fn stats_constant_and_empty() {
    let tmp = TempDir::new().unwrap();
    let header = "timestamp,sensor_id,building_id,lat,lon,pm25,pm10,tvoc,temp_c,rh_pct\n";
    let mut body = String::from(header);
    for h in 0..5 {
        body.push_str(&format!("2020-03-16T0{h}:00:00Z,S1,B1,-35.3,149.1,7.5,10,100,21,45\n"));
    }
    std::fs::write(tmp.path().join("flat.csv"), body).unwrap();
    ok(&aerostack(tmp.path(), &["stats", "--indoor", "flat.csv", "--out", "s.csv"]));
    let rows = csv_rows(&read(tmp.path(), "s.csv"));
    assert_eq!(rows[1][11].parse::<f64>().unwrap(), 0.0);

    std::fs::write(tmp.path().join("empty.csv"), header).unwrap();
    let out = aerostack(tmp.path(), &["stats", "--indoor", "empty.csv", "--out", "e.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!tmp.path().join("e.csv").exists());
    std::fs::write(tmp.path().join("blank.csv"), "").unwrap();
    assert_eq!(aerostack(tmp.path(), &["stats", "--indoor", "blank.csv"]).status.code(), Some(2));
}

#[test]
fn backtest_writes_json_and_table() {
    let (tmp, _) = synth_dir(&["--n-days", "20"]);
    std::fs::write(tmp.path().join("light.json"), LIGHT).unwrap();
    let args = [
        "backtest", "--indoor", "data/indoor.csv", "--outdoor", "data/outdoor.csv", "--config", "light.json", "--out",
        "bt.json",
    ];
    ok(&aerostack(tmp.path(), &args));
    let json: serde_json::Value = serde_json::from_str(&read(tmp.path(), "bt.json")).unwrap();
    let entries = json.as_array().unwrap();
    let names: Vec<&str> = entries.iter().map(|e| e["model"].as_str().unwrap()).collect();
    assert_eq!(names, ["rf", "gbt", "svr", "deml"]);
    for e in entries {
        assert_eq!(e["sensor_id"], "S01");
        assert_eq!(e["windows"].as_array().unwrap().len(), 2);
        assert!(e["rmse"].as_f64().unwrap() >= 0.0);
    }

    let rows = csv_rows(&read(tmp.path(), "bt.csv"));
    assert_eq!(
        rows[0],
        ["building_id", "test_hours", "rf_r2", "rf_rmse", "gbt_r2", "gbt_rmse", "svr_r2", "svr_rmse", "deml_r2", "deml_rmse", "deml_best"]
    );
    let rmse = |i: usize| rows[1][i].parse::<f64>().unwrap();
    let deml_best = rmse(9) < rmse(3) && rmse(9) < rmse(5) && rmse(9) < rmse(7);
    assert_eq!(rows[1][10] == "*", deml_best);
    assert_eq!(rows[1][1], "48");

    // Same seed again: byte-identical.
    let mut again = args.to_vec();
    *again.last_mut().unwrap() = "bt2.json";
    ok(&aerostack(tmp.path(), &again));
    assert_eq!(read(tmp.path(), "bt.json"), read(tmp.path(), "bt2.json"));
}

#[test]
fn bad_config_exits_2() {
    let (tmp, _) = synth_dir(&["--n-days", "3"]);
    for (name, body) in [
        ("unknown.json", r#"{"modle":{}}"#),
        ("window.json", r#"{"backtest":{"horizon_hours":12}}"#),
        ("bands.json", r#"{"thresholds":{"pm25":{"breakpoints":[35,12],"bands":["good","moderate","poor"]}}}"#),
    ] {
        std::fs::write(tmp.path().join(name), body).unwrap();
        let out = aerostack(
            tmp.path(),
            &["backtest", "--indoor", "data/indoor.csv", "--outdoor", "data/outdoor.csv", "--config", name],
        );
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    }
    let out = aerostack(tmp.path(), &["stats", "--indoor", "data/indoor.csv", "--config", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn backtest_without_training_days_exits_2() {
    // Two days: lags eat the first, leaving a single day that is all test.
    let (tmp, _) = synth_dir(&["--n-days", "2"]);
    let out = aerostack(
        tmp.path(),
        &["backtest", "--indoor", "data/indoor.csv", "--outdoor", "data/outdoor.csv", "--out", "x.json"],
    );
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn singular_fit_exits_3() {
    // lat and lon are constant; without ridge the normal equations are singular.
    let (tmp, _) = synth_dir(&["--n-days", "4"]);
    std::fs::write(
        tmp.path().join("glm.json"),
        r#"{"models":{"glm":{"ridge_lambda":0}},"backtest":{"models":["glm"]}}"#,
    )
    .unwrap();
    let out = aerostack(
        tmp.path(),
        &["backtest", "--indoor", "data/indoor.csv", "--outdoor", "data/outdoor.csv", "--config", "glm.json"],
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn correlate_strong_coupling() {
    let (tmp, _) = synth_dir(&["--alpha", "0.9"]);
    ok(&aerostack(
        tmp.path(),
        &["correlate", "--indoor", "data/indoor.csv", "--outdoor", "data/outdoor.csv", "--out", "c.csv"],
    ));
    let rows = csv_rows(&read(tmp.path(), "c.csv"));
    assert_eq!(
        rows[0],
        ["building_id", "matched_hours", "indoor_mean", "indoor_sd", "outdoor_mean", "outdoor_sd", "spearman_r"]
    );
    assert!(rows[1][6].parse::<f64>().unwrap() > 0.6);
}

#[test]
fn correlate_copy_and_unmatched_building() {
    let tmp = TempDir::new().unwrap();
    let mut indoor = String::from("timestamp,sensor_id,building_id,lat,lon,pm25,pm10,tvoc,temp_c,rh_pct\n");
    let mut outdoor = String::from("timestamp,building_id,pm25_out,t2m_c,d2m_c,wind10m_ms,sp_pa,ssrd_wm2,tp_mm\n");
    for h in 0..10 {
        let v = (h * 7 % 10) as f64 + 1.0;
        indoor.push_str(&format!("2020-03-16T{h:02}:00:00Z,S1,B1,-35,149,{v},,,,\n"));
        indoor.push_str(&format!("2020-03-16T{h:02}:00:00Z,S9,B9,-35,149,{v},,,,\n"));
        outdoor.push_str(&format!("2020-03-16T{h:02}:00:00Z,B1,{v},,,,,,\n"));
    }
    std::fs::write(tmp.path().join("in.csv"), indoor).unwrap();
    std::fs::write(tmp.path().join("out.csv"), outdoor).unwrap();
    let out = aerostack(tmp.path(), &["correlate", "--indoor", "in.csv", "--outdoor", "out.csv", "--out", "c.csv"]);
    ok(&out);
    assert!(String::from_utf8_lossy(&out.stderr).contains("B9"));
    let rows = csv_rows(&read(tmp.path(), "c.csv"));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][0], "B1");
    assert_eq!(rows[1][6].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn importance_outputs() {
    let (tmp, _) = synth_dir(&["--n-days", "15"]);
    let base = ["importance", "--indoor", "data/indoor.csv", "--outdoor", "data/outdoor.csv"];
    let mut args = base.to_vec();
    args.extend(["--model", "glm", "--inject-target-copy", "--svg", "imp.svg", "--out", "imp.csv"]);
    ok(&aerostack(tmp.path(), &args));
    let rows = csv_rows(&read(tmp.path(), "imp.csv"));
    assert_eq!(rows[0], ["rank", "feature", "mean_rmse_loss", "sd_rmse_loss"]);
    assert_eq!(rows.len(), 16);
    assert_eq!(rows[1][1], "target_copy");
    assert!(read(tmp.path(), "imp.svg").starts_with("<svg"));

    let mut one = base.to_vec();
    one.extend(["--model", "glm", "--n-perm", "1", "--out", "one.csv"]);
    ok(&aerostack(tmp.path(), &one));
    let rows = csv_rows(&read(tmp.path(), "one.csv"));
    assert!(rows[1..].iter().all(|r| r[3].parse::<f64>().unwrap() == 0.0));

    let mut bad = base.to_vec();
    bad.extend(["--model", "lstm"]);
    assert_eq!(aerostack(tmp.path(), &bad).status.code(), Some(2));
}

#[test]
fn report_bushfire_and_empty_range() {
    let (tmp, _) = synth_dir(&["--bushfire", "30:3:80"]);
    ok(&aerostack(
        tmp.path(),
        &[
            "report", "--indoor", "data/indoor.csv", "--outdoor", "data/outdoor.csv", "--building", "B01", "--from",
            "2020-01-30", "--to", "2020-02-03", "--out", "r.html",
        ],
    ));
    let html = read(tmp.path(), "r.html");
    assert!(html.contains("<td class=\"poor\">"));
    assert!(html.contains("<td class=\"good\">"));
    assert!(html.contains("<svg"));
    assert!(!html.contains("no-data"));
    // 5 days of hourly rows.
    assert_eq!(html.matches("<tr><th>2020-").count(), 5 * 24);

    let out = aerostack(
        tmp.path(),
        &["report", "--indoor", "data/indoor.csv", "--from", "2021-06-01", "--to", "2021-06-02", "--out", "e.html"],
    );
    ok(&out);
    assert!(read(tmp.path(), "e.html").contains("no-data"));
}

#[test]
fn example_config_is_the_default() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("config.example.json");
    let cfg = aerostack::cli::RunConfig::load(&path).unwrap();
    assert_eq!(cfg, aerostack::cli::RunConfig::default());
}
