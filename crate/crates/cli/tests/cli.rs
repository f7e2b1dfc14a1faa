use std::io::Write as _;
use std::path::PathBuf;
use std::process::{Command, Output};

use cbr_markov::cbr::{mean_phases, CbrParameters};
use cbr_markov::{ratio, Rational};
use cbr_markov_cli::{render::Style, run, Cli};
use clap::Parser;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cbr-markov"))
        .args(args)
        .env("NO_COLOR", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn in_process(args: &[&str]) -> Result<String, String> {
    let parsed = Cli::try_parse_from(std::iter::once("cbr-markov").chain(args.iter().copied()))
        .map_err(|e| e.to_string())?;
    let mut buf = Vec::new();
    run(&parsed, &mut buf, Style::default()).map_err(|e| e.to_string())?;
    Ok(String::from_utf8(buf).unwrap())
}

fn machine(args: &[&str]) -> Value {
    let mut full = vec!["--format", "machine"];
    full.extend_from_slice(args);
    serde_json::from_str(&in_process(&full).unwrap()).unwrap()
}

fn temp_file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

fn exact_of(v: &Value) -> Rational {
    v["exact"].as_str().unwrap().parse().unwrap()
}

#[test]
fn cbr_analyze_reports_mean_phases_and_completion_steps() {
    let o = cli(&["cbr-analyze", "--p31", "1/3", "--p33", "1/3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("t = 7"));
    assert!(text.contains("completion steps = 8"));
    assert!(text.contains("7 (7.00000)"));
}

#[test]
fn cbr_evolve_last_row_is_phase_four() {
    let o = cli(&[
        "cbr-evolve",
        "--p31",
        "1/3",
        "--p33",
        "1/3",
        "--phases",
        "4",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().last().unwrap(), "P4: 1/9 1/3 1/9 4/9");
    assert!(text.contains("0.111111 0.333333 0.111111 0.444444"));
}

#[test]
fn non_absorbing_parameters_exit_one() {
    let o = cli(&["cbr-analyze", "--p31", "1/2", "--p33", "1/2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("NonAbsorbing"));
    assert!(stdout(&o).is_empty());
}

#[test]
fn usage_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &[],
        &["cbr-analyze", "--p31", "1/3"],
        &["cbr-analyze", "--p31", "1/0", "--p33", "1/3"],
        &["cbr-analyze", "--p31", "one third", "--p33", "1/3"],
        &[
            "chain-analyze",
            "--matrix",
            "m.json",
            "--p31",
            "1/3",
            "--p33",
            "1/3",
        ],
        &["chain-analyze", "--p31", "1/3"],
        &["chain-analyze"],
        &[
            "cbr-evolve",
            "--p31",
            "1/3",
            "--p33",
            "1/3",
            "--phases",
            "-1",
        ],
        &[
            "--format",
            "xml",
            "cbr-analyze",
            "--p31",
            "1/3",
            "--p33",
            "1/3",
        ],
        &["no-such-command"],
    ];
    for args in cases {
        let o = cli(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn domain_errors_exit_one_and_name_the_error() {
    let non_absorbing = temp_file(r#"{"states": ["a", "b"], "rows": [[0, 1], [1, 0]]}"#);
    let bad_sum = temp_file(r#"{"states": ["a", "b"], "rows": [["1/2", "1/3"], [0, 1]]}"#);
    let below = temp_file(r#"{"episodes": [{"name": "g", "cases": [{"id": "x", "t": 2}]}]}"#);
    let path = |p: PathBuf| p.display().to_string();
    let missing = path(fixture("does_not_exist.json"));
    let syntax = path(fixture("malformed_syntax.json"));
    let schema = path(fixture("malformed_schema.json"));
    let duplicate = path(fixture("duplicate_ids.json"));
    let bad_traj = path(fixture("bad_transition.txt"));
    let below = path(below.path().to_path_buf());
    let non_absorbing = path(non_absorbing.path().to_path_buf());
    let bad_sum = path(bad_sum.path().to_path_buf());
    let params = ["--p31", "1/3", "--p33", "1/3"];
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (
            vec!["cbr-analyze", "--p31", "2/3", "--p33", "2/3"],
            "InvalidParameters",
        ),
        (vec!["library-efficiency", "--library", &missing], "IoError"),
        (
            vec!["library-efficiency", "--library", &syntax],
            "ParseError",
        ),
        (
            vec!["library-efficiency", "--library", &schema],
            "SchemaError",
        ),
        (
            vec!["library-efficiency", "--library", &duplicate],
            "DuplicateCaseId",
        ),
        (
            vec!["library-efficiency", "--library", &below],
            "MeasureBelowBound",
        ),
        (
            vec!["estimate", "--trajectories", &bad_traj],
            "IllegalTransition",
        ),
        (
            vec!["chain-analyze", "--matrix", &non_absorbing],
            "NotAbsorbingChain",
        ),
        (vec!["chain-analyze", "--matrix", &bad_sum], "RowSumNotOne"),
        (
            [&["cbr-simulate", "--samples", "0"][..], &params].concat(),
            "InvalidConfig",
        ),
    ];
    for (args, name) in cases {
        let o = cli(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
        let err = stderr(&o);
        assert!(err.starts_with("error: "), "{err}");
        assert!(err.contains(name), "{args:?}: expected {name} in {err}");
    }
}

#[test]
fn below_bound_cases_can_be_downgraded_to_warnings() {
    let below = temp_file(
        r#"{"episodes": [{"name": "g", "cases": [{"id": "x", "t": 2}, {"id": "y", "t": 4}]}]}"#,
    );
    let path = below.path().display().to_string();
    let o = cli(&[
        "library-efficiency",
        "--library",
        &path,
        "--allow-below-bound",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning"));
    assert!(stdout(&o).contains("flat efficiency    = 3 (3.00000)"));
}

fn collect_exact(v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            if let (Some(Value::String(e)), Some(Value::String(d))) =
                (map.get("exact"), map.get("decimal"))
            {
                out.push((e.clone(), d.clone()));
            }
            map.values().for_each(|x| collect_exact(x, out));
        }
        Value::Array(xs) => xs.iter().for_each(|x| collect_exact(x, out)),
        _ => {}
    }
}

#[test]
fn machine_output_fractions_round_trip() {
    let lib = fixture("nested_library.json").display().to_string();
    let traj = fixture("trajectories.txt").display().to_string();
    let runs: Vec<Vec<&str>> = vec![
        vec!["cbr-analyze", "--p31", "2/7", "--p33", "3/11"],
        vec!["chain-analyze", "--p31", "1/3", "--p33", "1/3"],
        vec![
            "cbr-evolve",
            "--p31",
            "1/4",
            "--p33",
            "1/2",
            "--phases",
            "6",
        ],
        vec![
            "cbr-simulate",
            "--p31",
            "1/4",
            "--p33",
            "1/2",
            "--samples",
            "500",
            "--seed",
            "3",
        ],
        vec!["estimate", "--trajectories", &traj],
        vec!["library-efficiency", "--library", &lib],
    ];
    for args in runs {
        let mut numbers = Vec::new();
        collect_exact(&machine(&args), &mut numbers);
        assert!(!numbers.is_empty(), "{args:?}");
        for (text, decimal) in numbers {
            let q: Rational = text.parse().unwrap();
            assert_eq!(q.to_string(), text);
            assert_eq!(q.to_decimal(), decimal);
        }
    }
}

#[test]
fn machine_values_match_the_library() {
    let v = machine(&["cbr-analyze", "--p31", "1/4", "--p33", "1/2"]);
    assert_eq!(exact_of(&v["t"]), ratio(8, 1));
    assert_eq!(exact_of(&v["completion_steps"]), ratio(9, 1));
    let sums: Vec<Rational> = v["fundamental_matrix"]["row_sums"]
        .as_array()
        .unwrap()
        .iter()
        .map(exact_of)
        .collect();
    assert_eq!(sums, vec![ratio(8, 1), ratio(7, 1), ratio(6, 1)]);

    let ge = fixture("ge_three_cases.json").display().to_string();
    let v = machine(&["library-efficiency", "--library", &ge]);
    assert_eq!(exact_of(&v["flat_efficiency"]), ratio(6, 1));
    assert_eq!(exact_of(&v["episodes"][0]["efficiency"]), ratio(6, 1));

    let traj = temp_file("R1 R2 R3 R1 R2 R3 R3 R3 R4\n");
    let v = machine(&[
        "estimate",
        "--trajectories",
        &traj.path().display().to_string(),
    ]);
    assert_eq!(exact_of(&v["parameters"]["p33"]), ratio(1, 2));
    assert_eq!(exact_of(&v["t"]), ratio(8, 1));
}

#[test]
fn closed_form_and_generic_engine_agree_end_to_end() {
    for d in [2i64, 3, 5, 7] {
        for a in 0..d {
            for b in 0..d - a {
                let (p31, p33) = (format!("{a}/{d}"), format!("{b}/{d}"));
                let cbr = machine(&["cbr-analyze", "--p31", &p31, "--p33", &p33]);
                let chain = machine(&["chain-analyze", "--p31", &p31, "--p33", &p33]);
                let t = exact_of(&cbr["t"]);
                assert_eq!(t, exact_of(&chain["expected_steps"]["R1"]["t"]));
                let p = CbrParameters::from_return_and_stay(ratio(a, d), ratio(b, d)).unwrap();
                assert_eq!(t, mean_phases(&p).unwrap());
            }
        }
    }
}

#[test]
fn chain_analyze_reads_a_matrix_file() {
    let m = temp_file(
        r#"{"states": ["0", "1", "2", "3"], "rows": [[1, 0, 0, 0], ["1/2", 0, "1/2", 0], [0, "1/2", 0, "1/2"], [0, 0, 0, 1]]}"#,
    );
    let v = machine(&["chain-analyze", "--matrix", &m.path().display().to_string()]);
    assert_eq!(
        v["canonical_order"],
        serde_json::json!(["0", "3", "1", "2"])
    );
    assert_eq!(exact_of(&v["expected_steps"]["1"]["t"]), ratio(2, 1));
    let b: Vec<Rational> = v["absorption_probabilities"][0]
        .as_array()
        .unwrap()
        .iter()
        .map(exact_of)
        .collect();
    assert_eq!(b, vec![ratio(2, 3), ratio(1, 3)]);
}

#[test]
fn simulation_output_is_reproducible() {
    let args = [
        "--format",
        "machine",
        "cbr-simulate",
        "--p31",
        "1/3",
        "--p33",
        "1/3",
        "--samples",
        "2000",
        "--seed",
        "11",
    ];
    let a = cli(&args);
    let b = cli(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["simulation"]["num_trajectories"], 2000);
    assert_eq!(v["simulation"]["censored_count"], 0);
}

#[test]
fn no_color_output_has_no_escape_codes() {
    let o = cli(&[
        "library-efficiency",
        "--library",
        &fixture("ge_three_cases.json").display().to_string(),
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(!text.contains('\x1b'));
    assert!(text.contains("6 (6.00000)"));
}
