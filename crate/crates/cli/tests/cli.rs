//! End-to-end tests of the `seqsteer` binary: flag handling, exit codes and
//! file formats.

use std::fs;
use std::process::{Command, Output};

use seqsteer::steering::CorrSign;
use seqsteer::MeasurementSet;
use seqsteer_cli::{parse_csv, run_symmetric_sweep, SweepMode, SweepRow, SweepSpec, CSV_HEADER};

fn seqsteer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqsteer"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

#[test]
fn symmetric_sweep_writes_header_plus_requested_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig5.csv");
    let out = seqsteer(&[
        "--mode",
        "symmetric",
        "--n",
        "3",
        "--points",
        "101",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 102);
    assert!(text.starts_with(CSV_HEADER));
    assert!(!text.contains('\r'));
}

#[test]
fn fixed_b_sweep_reproduces_the_pinned_slope() {
    let out = seqsteer(&[
        "--mode", "fixed-b", "--eta-b", "0.766", "--n", "3", "--points", "11",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = parse_csv(&stdout(&out)).unwrap();
    assert_eq!(rows.len(), 11);
    let last = rows.last().unwrap();
    assert!((last.eta_a - 1.0).abs() < 1e-12);
    assert!((last.eta_b - 0.766).abs() < 1e-12);
    assert!((last.s11 - 0.766).abs() < 1e-9);
    let first = rows.first().unwrap();
    assert!(first.s11.abs() < 1e-12);
    assert!(first.s12.abs() < 1e-12);
}

#[test]
fn csv_file_round_trips_against_the_library() {
    let spec = SweepSpec {
        mode: SweepMode::Symmetric,
        n_list: vec![2, 3],
        eta_start: 0.1,
        eta_end: 0.9,
        points: 9,
        sign: CorrSign::default(),
        custom_set: None,
    };
    let expected = run_symmetric_sweep(&spec).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let out = seqsteer(&[
        "--n",
        "2",
        "--n",
        "3",
        "--eta-start",
        "0.1",
        "--eta-end",
        "0.9",
        "--points",
        "9",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let parsed = parse_csv(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(parsed.len(), expected.len());
    for (a, b) in parsed.iter().zip(&expected) {
        for (x, y) in [
            (a.eta_a, b.eta_a),
            (a.eta_b, b.eta_b),
            (a.s11, b.s11),
            (a.s12, b.s12),
            (a.s21, b.s21),
            (a.s22, b.s22),
            (a.c_n, b.c_n),
        ] {
            assert!((x - y).abs() <= 1e-12);
        }
        assert_eq!(a.n, b.n);
        assert_eq!(a.violations, b.violations);
    }
}

fn window_from_line(line: &str) -> (f64, f64) {
    let open = line.find('[').unwrap();
    let close = line.find(']').unwrap();
    let mut parts = line[open + 1..close].split(',');
    let lo = parts.next().unwrap().trim().parse().unwrap();
    let hi = parts.next().unwrap().trim().parse().unwrap();
    (lo, hi)
}

#[test]
fn window_summary_prints_the_interval() {
    let out = seqsteer(&["--window", "--n", "3", "--tol", "1e-6"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let line = text.lines().find(|l| l.starts_with("n=3")).unwrap();
    let (lo, hi) = window_from_line(line);
    assert!((lo - 0.759836).abs() < 1e-4);
    assert!((hi - 0.768580).abs() < 1e-4);
}

#[test]
fn window_summary_reports_the_empty_square_case() {
    let out = seqsteer(&["--window", "--n", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("no simultaneous violation window"));
}

#[test]
fn dump_set_round_trips_through_set_file() {
    let out = seqsteer(&["--dump-set", "--n", "6"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table = stdout(&out);
    let set = MeasurementSet::parse_table(&table).unwrap();
    assert_eq!(set.len(), 6);
    assert!(set.is_spherical_two_design());

    // Feed it back and check the sweep matches the built-in set.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("icosa.txt");
    fs::write(&path, &table).unwrap();
    let from_file = seqsteer(&["--set-file", path.to_str().unwrap(), "--points", "5"]);
    assert!(from_file.status.success(), "{}", stderr(&from_file));
    let builtin = seqsteer(&["--n", "6", "--points", "5"]);
    assert_eq!(stdout(&from_file), stdout(&builtin));
}

#[test]
fn non_design_set_file_warns_but_runs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("square.txt");
    fs::write(&path, "1 0 1\n1 0 -1\n").unwrap();
    let out = seqsteer(&["--set-file", path.to_str().unwrap(), "--points", "3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("not a spherical 2-design"));
    let rows = parse_csv(&stdout(&out)).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0].n, 2);
}

#[test]
fn no_corr_sign_reports_the_raw_negative_average() {
    let flipped = seqsteer(&["--n", "3", "--points", "5"]);
    let raw = seqsteer(&["--n", "3", "--points", "5", "--no-corr-sign"]);
    assert!(flipped.status.success() && raw.status.success());
    let rows_flipped = parse_csv(&stdout(&flipped)).unwrap();
    let rows_raw = parse_csv(&stdout(&raw)).unwrap();
    for (a, b) in rows_flipped.iter().zip(&rows_raw) {
        assert!((a.s11 + b.s11).abs() < 1e-12);
        assert!((a.s22 + b.s22).abs() < 1e-12);
    }
}

#[test]
fn invalid_arguments_exit_with_code_1() {
    let cases: &[&[&str]] = &[
        &["--n", "5"],
        &["--mode", "fixed-b"],
        &["--eta-b", "0.5"],
        &["--points", "1"],
        &["--eta-start", "0.9", "--eta-end", "0.2"],
        &["--mode", "sideways"],
        &["--dump-set", "--n", "3", "--n", "4"],
        &["--window", "--tol", "1e-12"],
    ];
    for args in cases {
        let out = seqsteer(args);
        assert_eq!(out.status.code(), Some(1), "args = {args:?}");
    }
}

#[test]
fn io_failures_exit_with_code_2() {
    let out = seqsteer(&["--n", "3", "--points", "3", "--out", "/nonexistent/x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("/nonexistent/x.csv"));

    let missing = seqsteer(&["--set-file", "/nonexistent/set.txt"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn doubling_the_grid_moves_the_row_window_by_less_than_a_step() {
    let window_of = |points: usize| {
        let spec = SweepSpec {
            mode: SweepMode::Symmetric,
            n_list: vec![3],
            eta_start: 0.0,
            eta_end: 1.0,
            points,
            sign: CorrSign::default(),
            custom_set: None,
        };
        let rows = run_symmetric_sweep(&spec).unwrap();
        let all = |r: &SweepRow| r.violations.0.iter().all(|&v| v);
        let first = rows.iter().find(|r| all(r)).unwrap().eta_a;
        let last = rows.iter().rev().find(|r| all(r)).unwrap().eta_a;
        (first, last)
    };
    let coarse = window_of(201);
    let fine = window_of(401);
    let spacing = 1.0 / 200.0;
    assert!((coarse.0 - fine.0).abs() < spacing);
    assert!((coarse.1 - fine.1).abs() < spacing);
}
