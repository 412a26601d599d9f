use std::process::{Command, Output};

fn detnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_detnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn detnet_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_detnet"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn sweep_csv_is_byte_stable_with_pinned_header() {
    let args = [
        "sweep",
        "--scenario",
        "n-det-unambiguous",
        "--n",
        "2",
        "--theta-start",
        "0.01",
        "--theta-end",
        "1.5707963",
        "--steps",
        "157",
    ];
    let first = detnet(&args);
    let second = detnet(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    assert!(text.starts_with("theta,pf_closed,pf_numeric\n"));
    assert_eq!(text.matches('\n').count(), 158);
    assert!(!text.contains('\r'));
}

#[test]
fn cluster_sweep_emits_failure_probability_columns() {
    let out = detnet(&[
        "sweep",
        "--scenario",
        "cluster-unambiguous",
        "--theta-start",
        "0.1",
        "--theta-end",
        "1.5",
        "--steps",
        "15",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("theta,pf_collective,pf_individual\n"));

    // Collective beats individual (lower failure) at small angles; the
    // curves cross further out.
    for line in text.lines().skip(1) {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        if fields[0] <= 0.5 {
            assert!(fields[1] < fields[2], "at theta {}", fields[0]);
        }
    }
}

#[test]
fn sweep_json_round_trips_and_matches_sequential() {
    let args = [
        "sweep",
        "--scenario",
        "grouped-multifire-entangled",
        "--theta-start",
        "0.2",
        "--theta-end",
        "1.2",
        "--steps",
        "11",
        "--format",
        "json",
    ];
    let parallel = detnet(&args);
    assert_eq!(code(&parallel), 0);
    let mut seq_args = args.to_vec();
    seq_args.push("--sequential");
    let sequential = detnet(&seq_args);
    assert_eq!(code(&sequential), 0);
    assert_eq!(parallel.stdout, sequential.stdout);

    let doc: serde_json::Value = serde_json::from_str(&stdout(&parallel)).unwrap();
    assert_eq!(doc["scenario"], "grouped-multifire-entangled");
    assert_eq!(doc["columns"][0], "theta");
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 11);
    for row in rows {
        let theta = row[0].as_f64().unwrap();
        let ps_closed = row[1].as_f64().unwrap();
        let expected = 0.5 + (2.0 * theta).sin() / 3.0 + (4.0 * theta).sin() / 6.0;
        assert!((ps_closed - expected).abs() < 1e-12);
    }
}

#[test]
fn sweep_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let args = [
        "sweep",
        "--scenario",
        "single-fire-two-det",
        "--theta-start",
        "0.1",
        "--theta-end",
        "0.9",
        "--steps",
        "5",
    ];
    let piped = detnet(&args);
    let mut file_args = args.to_vec();
    file_args.push("--output");
    let path_str = path.to_str().unwrap();
    file_args.push(path_str);
    let to_file = detnet(&file_args);
    assert_eq!(code(&to_file), 0);
    assert!(to_file.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&piped));
}

#[test]
fn sweep_rejects_invalid_configs_with_exit_2() {
    let base = ["sweep", "--scenario", "n-det-unambiguous"];
    let cases: Vec<Vec<&str>> = vec![
        // steps below 2
        [&base[..], &["--theta-start", "0.1", "--theta-end", "1.0", "--steps", "1"]].concat(),
        // reversed range
        [&base[..], &["--theta-start", "1.0", "--theta-end", "0.1", "--steps", "5"]].concat(),
        // unknown scenario
        vec![
            "sweep",
            "--scenario",
            "bogus",
            "--theta-start",
            "0.1",
            "--theta-end",
            "1.0",
            "--steps",
            "5",
        ],
        // priors that do not sum to one
        vec![
            "sweep",
            "--scenario",
            "two-det-min-err",
            "--theta-start",
            "0.1",
            "--theta-end",
            "1.0",
            "--steps",
            "5",
            "--p0",
            "0.4",
            "--p1",
            "0.4",
        ],
    ];
    for case in cases {
        let out = detnet(&case);
        assert_eq!(code(&out), 2, "case {case:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn sweep_reports_scenario_errors_with_exit_3() {
    // The three-way measurement degenerates at theta = 0, which this
    // grid includes.
    let out = detnet(&[
        "sweep",
        "--scenario",
        "grouped-with-no-fire-pgm",
        "--theta-start",
        "0",
        "--theta-end",
        "1.0",
        "--steps",
        "5",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn verify_passes_by_default() {
    let out = detnet(&["verify"]);
    let text = stdout(&out);
    assert_eq!(code(&out), 0, "verify failed:\n{text}");
    assert!(text.contains("grouped-product-fixture"));
    assert!(text.contains("PASS"));
    assert!(!text.contains("FAIL"));
    assert!(text.trim_end().ends_with("checks passed"));
}

#[test]
fn verify_exit_codes_follow_tolerance() {
    let tight = detnet(&["verify", "--tol", "1e-15"]);
    assert_eq!(code(&tight), 1);
    assert!(stdout(&tight).contains("FAIL"));

    let loose = detnet(&["verify", "--tol", "0.1"]);
    assert_eq!(code(&loose), 0);
}

#[test]
fn verify_honors_fixture_override() {
    let embedded = include_str!("../../detnet/fixtures/regression.csv");
    let line = embedded
        .lines()
        .nth(1)
        .expect("fixture has value rows");
    // Perturb the last digit of one stored value.
    let tampered_line = {
        let (head, last) = line.split_at(line.len() - 1);
        let digit: u32 = last.parse().expect("value ends in a digit");
        format!("{head}{}", (digit + 1) % 10)
    };
    let tampered = embedded.replacen(line, &tampered_line, 1);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fixture.csv");
    std::fs::write(&path, tampered).unwrap();
    let out = detnet_env(&["verify"], "DETNET_FIXTURES", path.to_str().unwrap());
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("grouped-product-fixture"));

    // The untouched file still passes through the override path.
    std::fs::write(&path, embedded).unwrap();
    let out = detnet_env(&["verify"], "DETNET_FIXTURES", path.to_str().unwrap());
    assert_eq!(code(&out), 0);
}

#[test]
fn crossover_locates_curve_intersection() {
    let out = detnet(&["crossover", "--lo", "0.5", "--hi", "0.9"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "theta_star,bracket_lo,bracket_hi,evaluations"
    );
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    let theta_star: f64 = fields[0].parse().unwrap();
    assert!(theta_star > 0.65 && theta_star < 0.75, "{theta_star}");
    let lo: f64 = fields[1].parse().unwrap();
    let hi: f64 = fields[2].parse().unwrap();
    assert!(hi - lo <= 2e-6);
    assert!(fields[3].parse::<u64>().unwrap() > 10);
}

#[test]
fn crossover_exit_codes() {
    let no_cross = detnet(&["crossover", "--lo", "0.05", "--hi", "0.2"]);
    assert_eq!(code(&no_cross), 4);

    let malformed = detnet(&["crossover", "--lo", "0.9", "--hi", "0.5"]);
    assert_eq!(code(&malformed), 2);

    let bad_tol = detnet(&["crossover", "--lo", "0.5", "--hi", "0.9", "--tol", "-1"]);
    assert_eq!(code(&bad_tol), 2);
}
