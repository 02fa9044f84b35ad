use std::path::Path;
use std::process::{Command, Output};

fn tubegeo(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tubegeo"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn catalog_list_and_filters() {
    let dir = tempfile::tempdir().unwrap();
    let o = tubegeo(&["catalog", "list"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "sn-clifford(1,2)  n=4  m-=1 m+=2  proper=yes"));
    let o = tubegeo(&["catalog", "list", "--match", "zzz"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    let o = tubegeo(&["catalog", "list", "--match", "cartan", "--perturb-cartan", "0.01"], dir.path());
    assert_eq!(stdout(&o).trim(), "s4-cartan  GATE-FAILED(cartan-munzner)");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ok = tubegeo(&["verify", "--case", "sn-height", "--n", "4", "--suite", "minimal-focal", "--out", "a.json"], d);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    let text = std::fs::read_to_string(d.join("a.json")).unwrap();
    assert!(text.contains("\"suite\": \"minimal-focal\"") && text.contains("vacuous"));
    assert!(text.contains("\"provenance\""));

    let fail = tubegeo(&["verify", "--case", "euclidean-point", "--n", "3", "--suite", "unique-minimal", "--out", "b.json"], d);
    assert_eq!(fail.status.code(), Some(1));
    assert!(std::fs::read_to_string(d.join("b.json")).unwrap().contains("NoZero"));

    let gated = tubegeo(&["verify", "--case", "s4-cartan", "--suite", "austere", "--perturb-cartan", "0.01", "--out", "c.json"], d);
    assert_eq!(gated.status.code(), Some(1));
    assert!(d.join("c.json").exists());

    for bad in [
        vec!["verify", "--case", "torus", "--suite", "austere"],
        vec!["verify", "--case", "s2-point", "--suite", "nonsense"],
        vec!["verify", "--case", "s2-point"],
        vec!["verify", "--case", "s2-point", "--suite", "austere", "--tol", "-1"],
        vec!["verify", "--bogus-flag"],
        vec!["tube-profile", "--case", "s2-point", "--t-min", "0.5", "--t-max", "0.2"],
    ] {
        assert_eq!(tubegeo(&bad, d).status.code(), Some(2), "{bad:?}");
    }

    // past the antipodal focal point
    let blow = tubegeo(&["tube-profile", "--case", "s2-point", "--t-min", "0.1", "--t-max", "3.3", "--out", "x.csv"], d);
    assert_eq!(blow.status.code(), Some(3));
}

#[test]
fn profile_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = tubegeo(
        &["tube-profile", "--case", "s2-point", "--t-min", "0.1", "--t-max", "3.0", "--steps", "30", "--out", "p.csv"],
        d,
    );
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(d.join("p.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,H,lambda_1,riccati_residual"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 30);
    assert!(rows.windows(2).all(|w| w[0][0] < w[1][0]));
    let row = rows.iter().find(|r| (r[0] - std::f64::consts::FRAC_PI_4).abs() < 1e-15).unwrap();
    assert!((row[2] + 1.0).abs() < 1e-6);
    // 17 significant digits
    assert!(text.lines().nth(1).unwrap().starts_with("1.0000000000000001e-1,"));

    let o = tubegeo(
        &["tube-profile", "--case", "euclidean-point", "--n", "3", "--t-min", "0.5", "--t-max", "1.5", "--steps", "3", "--out", "e.csv"],
        d,
    );
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(d.join("e.csv")).unwrap();
    let row: Vec<f64> = text.lines().nth(2).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!((row[0], row[1]), (1.0, -2.0));

    let o = tubegeo(
        &["tube-profile", "--case", "sn-clifford(1,1)", "--t-min", "0.1", "--t-max", "1.4", "--steps", "30", "--out", "c.csv"],
        d,
    );
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(d.join("c.csv")).unwrap();
    let h = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse::<f64>().unwrap()).collect::<Vec<_>>())
        .find(|r| (r[0] - std::f64::consts::FRAC_PI_4).abs() < 1e-15)
        .unwrap()[1];
    assert!(h.abs() < 1e-6);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("run.json"),
        r#"{"case": "sn-height", "n": 3, "suite": "minimal-focal", "base": 4, "dirs": 3, "seed": 11, "out": "from-config.json"}"#,
    )
    .unwrap();
    let o = tubegeo(&["verify", "--config", "run.json", "--dirs", "5"], d);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(d.join("from-config.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["case"], "sn-height(3)");
    assert_eq!(v["samples"]["normal_directions"], 5);
    assert_eq!(v["samples"]["base_points"], 4);
    assert_eq!(v["provenance"]["seed"], 11);

    std::fs::write(d.join("bad.json"), r#"{"cases": "s2-point"}"#).unwrap();
    assert_eq!(tubegeo(&["verify", "--config", "bad.json"], d).status.code(), Some(2));
}

#[test]
fn default_report_names_do_not_overwrite() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for _ in 0..2 {
        let o = tubegeo(&["verify", "--case", "s2-point", "--suite", "cartan-munzner"], d);
        assert_eq!(o.status.code(), Some(0));
    }
    let names: Vec<String> = std::fs::read_dir(d)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names.len(), 2);
    assert!(names.iter().all(|n| n.starts_with("s2-point-cartan-munzner-") && n.ends_with(".json")));
}

#[test]
fn metric_expansion_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = tubegeo(&["metric-expansion", "--case", "euclidean-point", "--format", "csv", "--out", "m.csv"], d);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(d.join("m.csv")).unwrap();
    assert!(text.starts_with("patch,ray,expansion,t,remainder\n"));
    assert!(text.lines().skip(1).all(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap() < 1e-9));
}
