//! End-to-end tests of the binary: argument handling, exit codes, file
//! round-trips, and the shape of every output format.

use std::io::Write;
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_convex-layers"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .take()
        .expect("stdin piped")
        .write_all(input.as_bytes())
        .expect("stdin accepts input");
    child.wait_with_output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is utf-8")
}

#[test]
fn version_flag_prints_package_version() {
    let out = run(&["--version"]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn help_lists_every_subcommand() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    for sub in ["generate", "peel", "check-even", "experiment", "oracle-verify"] {
        assert!(text.contains(sub), "help must mention `{sub}`");
    }
}

#[test]
fn no_arguments_shows_help_and_exits_nonzero() {
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_flag_is_a_one_line_error() {
    let out = run(&["peel", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_of(&out);
    assert_eq!(err.trim().lines().count(), 1, "diagnostic: {err}");
}

#[test]
fn generate_piped_into_peel_reports_layer_count() {
    let gen = run(&["generate", "--family", "collinear", "--n", "7"]);
    assert!(gen.status.success(), "{}", stderr_of(&gen));
    let out = run_with_stdin(&["peel"], &stdout_of(&gen));
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# format=1");
    assert_eq!(lines[1], "index,layer");
    assert_eq!(lines.len(), 2 + 7 + 1);
    assert_eq!(*lines.last().unwrap(), "# L=4");
    // 7 collinear points peel from both ends: 1 1 2 2 3 3 4 in some order.
    for (i, line) in lines[2..9].iter().enumerate() {
        let (idx, layer) = line.split_once(',').expect("index,layer row");
        assert_eq!(idx.parse::<usize>().unwrap(), i);
        assert!((1..=4).contains(&layer.parse::<u32>().unwrap()));
    }
}

#[test]
fn malformed_input_cites_the_offending_line() {
    let input = "# dim=2 label=bad\n0.0,0.0\n0.1,oops\n";
    let out = run_with_stdin(&["peel"], input);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_of(&out);
    assert!(err.contains("line 3"), "diagnostic: {err}");
    assert!(err.contains("oops"), "diagnostic: {err}");
}

#[test]
fn onion_below_minimum_size_names_the_threshold() {
    let out = run(&["generate", "--family", "onion", "--n", "100"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_of(&out);
    assert!(err.contains("minimum n"), "diagnostic: {err}");
}

#[test]
fn generate_rejects_planar_family_in_3d() {
    let out = run(&["generate", "--family", "convex", "--n", "10", "--d", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("2-dimensional"));
}

#[test]
fn generate_rejects_onion_flags_on_other_families() {
    let out = run(&["generate", "--family", "grid", "--n", "16", "--params-out", "x.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("--params-out"));
}

#[test]
fn grid_in_3d_writes_matching_header_and_rows() {
    let out = run(&["generate", "--family", "grid", "--n", "27", "--d", "3"]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("# dim=3 label="), "header: {header}");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 27);
    assert!(rows.iter().all(|r| r.split(',').count() == 3));
}

#[test]
fn peel_round_trips_through_files() {
    let dir = TempDir::new().unwrap();
    let set_path = dir.path().join("grid.txt");
    let csv_path = dir.path().join("layers.csv");
    let gen = run(&[
        "generate",
        "--family",
        "grid",
        "--n",
        "25",
        "--output",
        set_path.to_str().unwrap(),
    ]);
    assert!(gen.status.success(), "{}", stderr_of(&gen));
    let out = run(&[
        "peel",
        "--input",
        set_path.to_str().unwrap(),
        "--output",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    // Only the 4 corners of a 5 by 5 grid are strictly extreme (edge points
    // sit on hull edges), so the peel runs 6 layers deep, not 3.
    assert!(csv.ends_with("# L=6\n"), "csv tail: {csv}");
}

#[test]
fn onion_generate_writes_parameter_sidecar() {
    let dir = TempDir::new().unwrap();
    let set_path = dir.path().join("onion.txt");
    let out = run(&[
        "generate",
        "--family",
        "onion",
        "--n",
        "6250",
        "--alpha",
        "4",
        "--output",
        set_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let sidecar = dir.path().join("onion.txt.params.json");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&sidecar).unwrap()).unwrap();
    assert_eq!(json["format"], 1);
    assert_eq!(json["n"], 6250);
    assert_eq!(json["alpha"], 4.0);
    for key in ["beta", "C", "M", "k", "ring_edge_length", "ring_count"] {
        assert!(json.get(key).is_some(), "sidecar missing `{key}`");
    }
    // The ring structure must describe the emitted file: one count per ring,
    // summing to the number of point rows.
    let rows = std::fs::read_to_string(&set_path).unwrap().lines().count() - 1;
    let counts: Vec<u64> = json["ring_count"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(counts.len(), json["M"].as_u64().unwrap() as usize);
    assert_eq!(counts.iter().sum::<u64>() as usize, rows);
}

#[test]
fn check_even_refutes_a_planted_pair_with_exit_code_2() {
    // A spread-out shell of lattice points plus two points a hair apart;
    // any ball around one of the pair at nearest-neighbor radius holds two
    // points against an allowance below one.
    let mut input = String::from("# dim=2 label=planted\n");
    for i in 0..12 {
        let th = std::f64::consts::TAU * i as f64 / 12.0;
        input.push_str(&format!("{:.16e},{:.16e}\n", 0.9 * th.cos(), 0.9 * th.sin()));
    }
    input.push_str("1.0e-1,1.0e-1\n");
    input.push_str("1.0e-1,1.000000001e-1\n");
    let out = run_with_stdin(&["check-even", "--alpha", "2", "--probes", "50"], &input);
    assert_eq!(out.status.code(), Some(2), "{}", stderr_of(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(json["verdict"], "refuted");
    let witness = &json["witness"];
    assert!(witness["count"].as_u64().unwrap() > witness["bound"].as_u64().unwrap());
}

#[test]
fn check_even_is_quiet_on_a_round_grid() {
    let gen = run(&["generate", "--family", "grid", "--n", "1024"]);
    assert!(gen.status.success());
    let out = run_with_stdin(
        &["check-even", "--alpha", "8", "--probes", "200", "--seed", "7"],
        &stdout_of(&gen),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_ne!(json["verdict"], "refuted");
}

#[test]
fn experiment_emits_records_and_fit() {
    let dir = TempDir::new().unwrap();
    let csv_path = dir.path().join("records.csv");
    let fit_path = dir.path().join("fit.json");
    let out = run(&[
        "experiment",
        "--family",
        "collinear",
        "--n-list",
        "16,32,64",
        "--output",
        csv_path.to_str().unwrap(),
        "--fit-out",
        fit_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "# format=1");
    assert_eq!(lines[1], "family,d,n_param,actual_size,layer_number,seed,wall_time_ms");
    assert_eq!(lines.len(), 5);
    assert!(lines[2].starts_with("collinear,2,16,16,8,0,"));
    let fit: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&fit_path).unwrap()).unwrap();
    assert_eq!(fit["format"], 1);
    // ceil(n/2) layers on powers of two fit a slope of exactly 1.
    let slope = fit["slope"].as_f64().unwrap();
    assert!((slope - 1.0).abs() < 1e-12, "slope: {slope}");
}

#[test]
fn experiment_needs_two_distinct_sizes() {
    let out = run(&["experiment", "--family", "collinear", "--n-list", "64"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("distinct sizes"), "{}", stderr_of(&out));
}

#[test]
fn oracle_verify_confirms_a_regular_polygon() {
    let gen = run(&["generate", "--family", "convex", "--n", "12"]);
    assert!(gen.status.success());
    let out = run_with_stdin(&["oracle-verify"], &stdout_of(&gen));
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(json["verdict"], "match");
    assert_eq!(json["extreme_count"], 12);
}

#[test]
fn oracle_verify_rejects_oversized_input() {
    let gen = run(&["generate", "--family", "uniform_ball", "--n", "61", "--seed", "3"]);
    assert!(gen.status.success());
    let out = run_with_stdin(&["oracle-verify"], &stdout_of(&gen));
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("60"), "{}", stderr_of(&out));
}
