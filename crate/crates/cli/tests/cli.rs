use std::path::Path;
use std::process::{Command, Output};

fn csscoh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csscoh"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = csscoh(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    stdout(&out)
}

/// Data lines of a CSV with `#` provenance lines stripped, header first.
fn csv_body(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(table: &[Vec<String>], name: &str) -> Vec<String> {
    let idx = table[0]
        .iter()
        .position(|c| c == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    table[1..].iter().map(|r| r[idx].clone()).collect()
}

fn value_after(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .to_string()
}

#[test]
fn code_info_reports_parameters() {
    assert!(ok(&["code-info", "toric2d:2"]).contains("n=8 k=2 d=(2,2)"));
    assert!(ok(&["code-info", "--code", "steane"]).contains("n=7 k=1 d=(3,3)"));
    let json: serde_json::Value =
        serde_json::from_str(&ok(&["code-info", "four22", "--format", "json"])).unwrap();
    assert_eq!(json["k"], 2);
    assert_eq!(json["distance"]["dx"], 2);
}

#[test]
fn malformed_code_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.code");
    std::fs::write(&path, "css-code v1\nn 4\nHz 1\n11x1\nHx 0\n").unwrap();
    let out = csscoh(&["code-info", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
}

#[test]
fn exported_code_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.code");
    let path_s = path.to_str().unwrap();
    ok(&["export-code", "surface2d:3x2", "--out", path_s]);
    let from_file = ok(&["code-info", path_s]);
    let from_zoo = ok(&["code-info", "surface2d:3x2"]);
    assert_eq!(
        value_after(&from_file, "# code_hash"),
        value_after(&from_zoo, "# code_hash")
    );
}

#[test]
fn ic_sweep_endpoints_and_schema() {
    let text = ok(&[
        "ic-sweep",
        "--code",
        "steane",
        "--p-start",
        "0",
        "--p-stop",
        "0.5",
        "--points",
        "21",
    ]);
    assert!(text.lines().any(|l| l.starts_with("# code_hash: ")));
    assert!(text.lines().any(|l| l.starts_with("# tool: csscoh ")));
    let table = csv_body(&text);
    assert_eq!(
        table[0].join(","),
        "p_x,p_z,ic_bits,ml_success,sampling_success,jensen_lower,rel_entropy_bits"
    );
    assert_eq!(table.len(), 22);
    let ic = column(&table, "ic_bits");
    assert_eq!(ic[0].parse::<f64>().unwrap(), 1.0);
    assert!((ic[20].parse::<f64>().unwrap() + 1.0).abs() < 1e-9);
    assert_eq!(column(&table, "rel_entropy_bits")[0], "inf");
}

#[test]
fn correlated_noise_rows_carry_pauli_rates() {
    let table = csv_body(&ok(&[
        "ic-sweep",
        "--code",
        "four22",
        "--noise",
        "depolarizing",
        "--points",
        "4",
    ]));
    assert_eq!(&table[0][7..], ["pt_x", "pt_y", "pt_z"]);
    let last = &table[4];
    assert_eq!(last[7], last[8]);
    assert!((last[7].parse::<f64>().unwrap() - 0.5 / 3.0).abs() < 1e-15);
}

#[test]
fn outputs_are_deterministic_across_thread_counts() {
    let sweep = ["ic-sweep", "--code", "toric2d:2", "--points", "11"];
    let one = ok(&[&["--threads", "1"][..], &sweep[..]].concat());
    let four = ok(&[&["--threads", "4"][..], &sweep[..]].concat());
    assert_eq!(one, four);
    let mc = [
        "mc",
        "--code",
        "toric2d:3",
        "--p-list",
        "0.05,0.3",
        "--samples",
        "4",
        "--sweeps",
        "256",
        "--burn-in",
        "64",
        "--seed",
        "9",
    ];
    let one = ok(&[&["--threads", "1"][..], &mc[..]].concat());
    let three = ok(&[&["--threads", "3"][..], &mc[..]].concat());
    assert_eq!(one, three);
    let table = csv_body(&one);
    assert_eq!(
        table[0].join(","),
        "p,beta,mean_energy,energy_err,ea_overlap,ea_err,samples"
    );
    assert_eq!(table.len(), 3);
}

#[test]
fn decoder_sweep_bounds_hold() {
    let table = csv_body(&ok(&[
        "decoder-sweep",
        "--code",
        "toric2d:2",
        "--points",
        "11",
    ]));
    assert!(column(&table, "bounds_ok").iter().all(|v| v == "true"));
}

#[test]
fn verify_reports_tiny_deviation() {
    let text = ok(&["verify", "four22", "0.1"]);
    let line = value_after(&text, "sector identity (x)");
    assert!(line.starts_with("ok"), "{line}");
    let dev: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(dev < 1e-12);
}

#[test]
fn kw_check_prints_both_discrepancies() {
    let text = ok(&["kw-check", "toric2d:2", "0.4"]);
    let raw: f64 = value_after(&text, "raw_discrepancy").parse().unwrap();
    let summed: f64 = value_after(&text, "summed_discrepancy").parse().unwrap();
    assert!(raw.abs() > 1e-3);
    assert!(summed.abs() < 1e-12);
}

#[test]
fn relative_entropy_is_infinite_without_noise() {
    let text = ok(&[
        "relent-sweep",
        "steane",
        "1",
        "0",
        "--p-list",
        "0,0.1",
        "--free-energy",
    ]);
    let table = csv_body(&text);
    assert_eq!(table[1][1], "inf");
    assert_eq!(table[1][2], "inf");
    let d: f64 = table[2][1].parse().unwrap();
    let f: f64 = table[2][2].parse().unwrap();
    assert!((d - f).abs() < 1e-10);
}

#[test]
fn exported_distributions_reproduce_sweep_values() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.json");
    let z = dir.path().join("z.json");
    let path = |p: &Path| p.to_str().unwrap().to_string();
    ok(&[
        "dist-export",
        "--code",
        "steane",
        "--p",
        "0.05",
        "--side",
        "x",
        "--out",
        &path(&x),
    ]);
    ok(&[
        "dist-export",
        "--code",
        "steane",
        "--p",
        "0.05",
        "--side",
        "z",
        "--out",
        &path(&z),
    ]);
    let info = ok(&["dist-info", &path(&x), &path(&z)]);
    let sweep = csv_body(&ok(&["ic-sweep", "--code", "steane", "--p-list", "0.05"]));
    for (key, col) in [
        ("ic_bits", "ic_bits"),
        ("ml_success", "ml_success"),
        ("sampling_success", "sampling_success"),
    ] {
        let a: f64 = value_after(&info, key).parse().unwrap();
        let b: f64 = column(&sweep, col)[0].parse().unwrap();
        assert_eq!(a, b, "{key}");
    }
}

#[test]
fn sm_export_writes_model_with_provenance() {
    let text = ok(&[
        "sm-export",
        "--code",
        "toric2d:2",
        "--side",
        "z",
        "--syndrome",
        "101",
    ]);
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["model"]["num_spins"], 4);
    assert_eq!(json["provenance"]["syndrome"], "101");
    assert_eq!(json["model"]["terms"].as_array().unwrap().len(), 8);
}

#[test]
fn exit_codes_classify_failures() {
    assert_eq!(
        csscoh(&["ic-sweep", "--code", "toric2d:4", "--points", "2"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        csscoh(&[
            "ic-sweep",
            "--code",
            "four22",
            "--noise",
            "depolarizing",
            "--p-list",
            "0.1"
        ])
        .status
        .code(),
        Some(0)
    );
    assert_eq!(
        csscoh(&[
            "ic-sweep",
            "--code",
            "toric2d:3",
            "--noise",
            "depolarizing",
            "--points",
            "2"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        csscoh(&["ic-sweep", "--code", "steane", "--p-stop", "1.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        csscoh(&["ic-sweep", "--code", "steane", "--noise", "bogus"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        csscoh(&["relent-sweep", "steane", "11", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(csscoh(&["code-info", "toric2d:x"]).status.code(), Some(2));
}
