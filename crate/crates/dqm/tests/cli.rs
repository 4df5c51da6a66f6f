use std::path::PathBuf;
use std::process::{Command, Output};

use dqm::complex::{format_complex, parse_complex};
use dqm::report::Report;
use dqm_core::C64;
use proptest::prelude::*;
use serde_json::Value;

fn dqm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dqm")).args(args).env_remove("DQM_FIXTURES").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn schema() -> jsonschema::Validator {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

#[test]
fn list_shows_eleven_families() {
    let o = dqm(&["list"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 11);
    let v = json(&dqm(&["list", "--json"]));
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 11);
    let titles: Vec<String> =
        rows.iter().map(|r| format!("{} [{}]", r["name"].as_str().unwrap(), r["tag"].as_str().unwrap())).collect();
    assert!(titles.contains(&"continuous q-Hermite [KS3.26]".to_string()), "{titles:?}");
    assert_eq!(json(&dqm(&["list", "--output", "json"])), v);
}

#[test]
fn eval_q_hermite_first_degree() {
    let o = dqm(&["eval", "continuous-q-hermite", "--q", "0.5", "--n", "1", "--x", "1.0", "--output", "json"]);
    assert!(o.status.success());
    let v = &json(&o)[0];
    let p = v["p_recurrence"][0].as_f64().unwrap();
    assert!((p - 2.0 * 1f64.cos()).abs() < 1e-15, "{p}");
    assert!((v["energy"].as_f64().unwrap() - 1.0).abs() < 1e-15);
    assert!(v["discrepancy"].as_f64().unwrap() < 1e-14);
    assert!(v["series_warning"].is_null());
}

#[test]
fn eval_ground_level_for_every_family() {
    let v = json(&dqm(&["eval", "--n", "0", "--x", "0.7", "--output", "json"]));
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 11);
    for r in rows {
        assert_eq!(r["p_recurrence"][0].as_f64(), Some(1.0), "{r}");
        assert_eq!(r["energy"].as_f64(), Some(0.0), "{r}");
    }
}

#[test]
fn eval_reports_ill_conditioned_series() {
    let o = dqm(&["eval", "continuous-big-q-hermite", "--a", "-0.045", "--q", "0.15", "--n", "7", "--x", "0.05"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("warning"), "{}", stdout(&o));
}

#[test]
fn table_spectrum_meixner_pollaczek() {
    let o =
        dqm(&["table", "spectrum", "meixner-pollaczek", "--fixture", "sixth-turn", "--n-max", "3", "--output", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("family,n,energy"));
    for (n, line) in lines.enumerate() {
        let e: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!((e - n as f64).abs() < 1e-13, "{line}");
    }
}

#[test]
fn table_recurrence_marks_unused_entry() {
    let v = json(&dqm(&["table", "recurrence", "wilson", "--n-max", "2", "--output", "json"]));
    let rows = v[0]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[0]["C"].is_null());
    assert!(rows[1]["C"].is_number());
}

#[test]
fn table_norms_q_hermite() {
    let v = json(&dqm(&["table", "norms", "continuous-q-hermite", "--q", "0.5", "--n-max", "3", "--output", "json"]));
    let rows = v[0]["rows"].as_array().unwrap();
    let mut qq = 1.0;
    for n in 0..=3 {
        if n > 0 {
            qq *= 1.0 - 0.5f64.powi(n);
        }
        let got = rows[n as usize]["hn_over_h0"].as_f64().unwrap();
        assert!((got - qq).abs() < 1e-14, "n={n}: {got} vs {qq}");
    }
}

#[test]
fn verify_exit_codes() {
    let ok = dqm(&["verify", "--family", "askey-wilson", "--fixture", "default", "--suite", "eigen,closure"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    let fail = dqm(&["verify", "continuous-q-hermite", "--suite", "eigen", "--tol", "1e-300"]);
    assert_eq!(fail.status.code(), Some(1));
    assert!(stdout(&fail).contains("FAIL"));
    for bad in [
        vec!["verify", "al-salam-chihara", "--a", "1.2", "--a", "0.3", "--q", "0.5"],
        vec!["verify", "continuous-q-hermite", "--suite", "nonsense"],
        vec!["verify", "no-such-family"],
        vec!["verify", "continuous-q-hermite", "--q", "1.5"],
        vec!["verify", "continuous-q-hermite", "--tol", "-1"],
        vec!["verify", "continuous-q-hermite", "--n-max", "500"],
        vec!["verify", "wilson", "--fixture", "missing"],
        vec!["verify", "continuous-q-hermite", "--suite", "limit"],
        vec!["eval", "wilson", "--a", "1+"],
        vec!["verify", "--bogus-flag"],
    ] {
        let o = dqm(&bad);
        assert_eq!(o.status.code(), Some(2), "{bad:?}");
        assert!(!o.stderr.is_empty(), "{bad:?}");
    }
}

#[test]
fn fixtures_path_override() {
    let path = tmp("override.toml");
    std::fs::write(
        &path,
        "version = 1\n\n[[fixture]]\nfamily = \"continuous-q-hermite\"\nname = \"default\"\nq = 0.3\n",
    )
    .unwrap();
    let run = |env: Option<&PathBuf>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_dqm"));
        c.args(["table", "spectrum", "continuous-q-hermite", "--n-max", "1", "--output", "json"]);
        match env {
            Some(p) => c.env("DQM_FIXTURES", p),
            None => c.env_remove("DQM_FIXTURES"),
        };
        json(&c.output().unwrap())
    };
    let e1 = run(Some(&path))[0]["rows"][1]["energy"].as_f64().unwrap();
    assert!((e1 - (1.0 / 0.3 - 1.0)).abs() < 1e-14, "{e1}");
    let e1 = run(None)[0]["rows"][1]["energy"].as_f64().unwrap();
    assert!((e1 - 1.0).abs() < 1e-14, "{e1}");

    let broken = tmp("broken.toml");
    std::fs::write(&broken, "version = 99\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_dqm")).args(["list"]).env("DQM_FIXTURES", &broken).output().unwrap();
    assert!(o.status.success(), "list does not read fixtures");
    let o =
        Command::new(env!("CARGO_BIN_EXE_dqm")).args(["eval", "wilson"]).env("DQM_FIXTURES", &broken).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn report_matches_schema_and_round_trips() {
    let path = tmp("report.json");
    let o = dqm(&[
        "verify",
        "--suite",
        "eigen,shape_invariance,coherent,number-operator",
        "--seed",
        "3",
        "--report",
        path.to_str().unwrap(),
        "--output",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(file, json(&o));
    let v = schema();
    let errors: Vec<String> = v.iter_errors(&file).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:#?}");
    assert_eq!(file["version"], 1);
    assert_eq!(file["config"]["seed"], 3);
    assert_eq!(file["config"]["systems"].as_array().unwrap().len(), 11);

    let report: Report = serde_json::from_value(file.clone()).unwrap();
    assert!(report.passed());
    assert_eq!(serde_json::to_value(&report).unwrap(), file);
}

#[test]
fn failing_report_matches_schema() {
    let path = tmp("failing.json");
    let o = dqm(&["verify", "wilson", "--suite", "limit", "--report", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(schema().is_valid(&file));
    let seq = file["results"].as_array().unwrap().iter().find(|r| r["check_id"] == "limit.energy").unwrap();
    assert_eq!(seq["sequence"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--suite", "eigen,closure,ladder,hermiticity", "--seed", "11", "--output", "json"];
    let (a, b) = (dqm(&args), dqm(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let other = dqm(&["verify", "--suite", "eigen,closure,ladder,hermiticity", "--seed", "12", "--output", "json"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn csv_carries_seventeen_digits() {
    let o = dqm(&["verify", "continuous-q-laguerre", "--suite", "eigen", "--output", "csv"]);
    assert!(o.status.success());
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let headers = r.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "max_residual").unwrap();
    let mut rows = 0;
    for rec in r.records() {
        let rec = rec.unwrap();
        let field = &rec[col];
        let mantissa = field.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
        assert_eq!(mantissa.len(), 17, "{field}");
        rows += 1;
    }
    assert!(rows >= 4);
}

#[test]
fn help_lists_subcommands() {
    let o = dqm(&["--help"]);
    let text = stdout(&o);
    for cmd in ["list", "eval", "table", "verify"] {
        assert!(text.contains(cmd), "{text}");
    }
}

proptest! {
    #[test]
    fn complex_literals_round_trip(re in -1e6..1e6f64, im in -1e6..1e6f64) {
        let z = C64::new(re, im);
        let back = parse_complex(&format_complex(z)).unwrap();
        prop_assert_eq!(back, z);
    }
}
