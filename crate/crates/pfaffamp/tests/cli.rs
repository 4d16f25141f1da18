use std::path::Path;
use std::process::{Command, Output};

use pfaffamp::formats::save_state;
use pfaffamp_core::{amplitude_m_form, parse_configuration, random_state, PauliBasis, SiteAngles};
use serde_json::Value;

fn pfaffamp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfaffamp")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn amplitude_of_the_critical_ring() {
    let o = pfaffamp(&["amplitude", "--model", "tfim", "--L", "8", "--h", "1", "--J", "1", "--basis", "uniform:0,1.25,0", "--config", "++++++++"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1);
    let v: Value = serde_json::from_str(lines[0]).unwrap();
    for key in ["config", "re", "im", "modulus", "phase", "path"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let spec = pfaffamp_core::models::TfimSpec::critical(8).unwrap();
    let state = pfaffamp_core::GaussianPureState::new(pfaffamp_core::models::tfim_r_matrix_bogoliubov(&spec).unwrap());
    let basis = PauliBasis::uniform(8, SiteAngles::new(0.0, 1.25, 0.0));
    let want = amplitude_m_form(&state, &basis, &parse_configuration("++++++++").unwrap()).unwrap();
    assert!((v["re"].as_f64().unwrap() - want.re).abs() < 1e-14);
    assert!((v["modulus"].as_f64().unwrap() - want.norm()).abs() < 1e-14);
}

#[test]
fn several_configurations_as_csv() {
    let o = pfaffamp(&["amplitude", "--random-seed", "3", "--L", "4", "--basis", "x", "--config", "++--", "--config", "-+-+", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("config,re,im,modulus,phase,path"));
    assert!(lines.next().unwrap().starts_with("++--,"));
    assert!(lines.next().unwrap().starts_with("-+-+,"));
}

#[test]
fn usage_errors_exit_2() {
    let o = pfaffamp(&["amplitude", "--model", "tfim", "--L", "8"]);
    assert_eq!(o.status.code(), Some(2));
    let o = pfaffamp(&["amplitude", "--random-seed", "1", "--L", "4", "--config", "+++"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = pfaffamp(&["amplitude", "--random-seed", "1", "--L", "4", "--config", "++x+"]);
    assert_eq!(o.status.code(), Some(2));
    let o = pfaffamp(&["amplitude", "--random-seed", "1", "--model", "tfim", "--L", "4", "--config", "++++"]);
    assert_eq!(o.status.code(), Some(2));
    let o = pfaffamp(&["amplitude", "--model", "tfim", "--L", "5", "--config", "+++++"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn singular_tan_path_exits_3() {
    let o = pfaffamp(&["amplitude", "--random-seed", "1", "--L", "4", "--basis", "uniform:0,0,0", "--config", "++++", "--path", "tan"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("singular"), "{}", stderr(&o));
}

#[test]
fn enumerated_table_sums_to_one() {
    let o = pfaffamp(&["probability", "--random-seed", "5", "--L", "10", "--basis", "uniform:0.3,1.1,0.2", "--enumerate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "config,probability,path");
    assert_eq!(lines.len(), 1 + 1024 + 1);
    let footer: Vec<&str> = lines.last().unwrap().split(',').collect();
    assert_eq!(footer[0], "total");
    assert!((footer[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-9);
    let sum: f64 = lines[1..1025].iter().map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap()).sum();
    assert!((sum - 1.0).abs() < 1e-9);
}

#[test]
fn enumeration_guard_exits_3() {
    let o = pfaffamp(&["probability", "--random-seed", "5", "--L", "12", "--enumerate", "--enumeration-limit", "10"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("10"), "{}", stderr(&o));
}

#[test]
fn probability_paths_agree() {
    let run = |path: &str| {
        let o = pfaffamp(&["probability", "--random-seed", "2", "--L", "6", "--basis", "y", "--config", "+-+--+", "--path", path]);
        assert_eq!(o.status.code(), Some(0));
        stdout(&o).lines().nth(1).unwrap().split(',').nth(1).unwrap().parse::<f64>().unwrap()
    };
    assert!((run("amplitude-squared") - run("det-ratio")).abs() < 1e-12);
}

#[test]
fn entropy_report() {
    let o = pfaffamp(&["entropy", "--random-seed", "4", "--L", "6", "--basis", "x", "--alpha", "0.5,1,2", "--geometric", "--grid", "4", "--restarts", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["log"], "natural");
    let e: Vec<f64> = v["entropies"].as_array().unwrap().iter().map(|x| x["entropy"].as_f64().unwrap()).collect();
    assert!(e[0] >= e[1] && e[1] >= e[2] && e[2] > 0.0);
    let p = v["geometric"]["p_max"].as_f64().unwrap();
    assert!(p > 0.0 && p <= 1.0);
    assert!((v["geometric"]["geometric_entanglement"].as_f64().unwrap() + p.ln()).abs() < 1e-12);
}

#[test]
fn scan_then_fit() {
    let dir = tempfile::tempdir().unwrap();
    let scan = dir.path().join("scan.csv");
    let o = pfaffamp(&[
        "postmeasure", "--model", "tfim", "--L", "48", "--pattern", "x-all-plus", "--alphas", "0.5,1,2", "--dmin", "1",
        "--dmax", "8", "--out", scan.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&scan).unwrap();
    assert!(text.starts_with("L,d,alpha,entropy,P_outcome\n"));
    assert_eq!(text.lines().count(), 1 + 8 * 3);

    let o = pfaffamp(&["fit", "--input", scan.to_str().unwrap(), "--alpha", "2", "--window", "2:8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["eta", "delta1", "residual", "window"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["window"], serde_json::json!([2, 8]));
    assert!(v["eta"].as_f64().unwrap() > 0.0);

    let o = pfaffamp(&["fit", "--input", scan.to_str().unwrap(), "--alpha", "2", "--window", "7:8"]);
    assert_eq!(o.status.code(), Some(2), "too few points is an input error");
}

#[test]
fn state_file_matches_generated_state() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("state.json");
    save_state(&file, &random_state(6, 77, 0.8)).unwrap();
    let args = |src: &[&str]| {
        let mut a = vec!["amplitude", "--basis", "uniform:0.4,2.2,0.3", "--config", "+-++-+"];
        a.extend_from_slice(src);
        pfaffamp(&a)
    };
    let from_file = args(&["--state", file.to_str().unwrap()]);
    let generated = args(&["--random-seed", "77", "--L", "6", "--scale", "0.8"]);
    assert_eq!(from_file.status.code(), Some(0), "{}", stderr(&from_file));
    assert_eq!(from_file.stdout, generated.stdout);
}

#[test]
fn non_skew_state_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    std::fs::write(&file, r#"{"kind":"matrix","L":3,"entries":[[0,1,1.0,0.0],[1,0,0.5,0.0]]}"#).unwrap();
    let o = pfaffamp(&["amplitude", "--state", file.to_str().unwrap(), "--config", "+++"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("(0, 1)"), "{}", stderr(&o));
}

#[test]
fn degrees_flag_converts_angles() {
    let run = |basis: &str, degrees: bool| {
        let mut a = vec!["amplitude", "--random-seed", "9", "--L", "5", "--basis", basis, "--config", "+--+-"];
        if degrees {
            a.push("--degrees");
        }
        stdout(&pfaffamp(&a))
    };
    let deg = run("uniform:45,90,30", true);
    let rad = run(&format!("uniform:{},{},{}", 45f64.to_radians(), 90f64.to_radians(), 30f64.to_radians()), false);
    let a: Value = serde_json::from_str(&deg).unwrap();
    let b: Value = serde_json::from_str(&rad).unwrap();
    assert!((a["re"].as_f64().unwrap() - b["re"].as_f64().unwrap()).abs() < 1e-14);
    assert!((a["im"].as_f64().unwrap() - b["im"].as_f64().unwrap()).abs() < 1e-14);
}

#[test]
fn basis_file_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("basis.json");
    std::fs::write(&file, r#"{"per_site":[[0,1,0],[1,2,0],[2,3,1]]}"#).unwrap();
    let spec = format!("@{}", file.display());
    let o = pfaffamp(&["amplitude", "--random-seed", "1", "--L", "3", "--basis", &spec, "--config", "+-+"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let state = random_state(3, 1, 1.0);
    let basis = PauliBasis::per_site(vec![SiteAngles::new(0.0, 1.0, 0.0), SiteAngles::new(1.0, 2.0, 0.0), SiteAngles::new(2.0, 3.0, 1.0)]);
    let want = amplitude_m_form(&state, &basis, &parse_configuration("+-+").unwrap()).unwrap();
    assert!((v["im"].as_f64().unwrap() - want.im).abs() < 1e-14);
}

#[test]
fn help_documents_units_and_order() {
    for sub in ["amplitude", "probability", "entropy", "postmeasure", "fit", "validate"] {
        let o = pfaffamp(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        assert!(text.contains("radians") && text.contains("site 1 first"), "{sub}");
    }
}

#[test]
fn validate_passes_for_several_seeds_and_catches_mutation() {
    let o = pfaffamp(&["validate", "--seed", "1", "--seed", "2", "--trials", "4", "--max-l", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.ends_with(" ok")).count(), 22);
    let o = pfaffamp(&["validate", "--trials", "2", "--max-l", "4", "--mutate", "eq9-sign"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("tan-form vs m-form"));
}

#[test]
fn output_file_equals_standard_output() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p.csv");
    let args = ["probability", "--random-seed", "8", "--L", "7", "--basis", "x", "--enumerate"];
    let direct = pfaffamp(&args);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", file.to_str().unwrap()]);
    assert_eq!(pfaffamp(&with_out).status.code(), Some(0));
    assert_eq!(std::fs::read(Path::new(&file)).unwrap(), direct.stdout);
}
