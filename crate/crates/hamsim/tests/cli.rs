use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hamsim::formats::{parse_sparse, write_sparse};

fn hamsim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamsim"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn decompose_diagonal_writes_single_term_equal_to_input() {
    let dir = tempfile::tempdir().unwrap();
    let h = parse_sparse("n=2 d=1\n0 0 1 0\n1 1 -0.5 0\n3 3 2 0\n", "h").unwrap();
    let input = write_sparse(&h);
    fs::write(dir.path().join("h.txt"), &input).unwrap();
    let o = hamsim(&["decompose", "--input", "h.txt", "--out", "h"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("term 0 pairs=0 fixed=3\n"));
    assert_eq!(fs::read_to_string(dir.path().join("h.term0")).unwrap(), input);
    assert!(!dir.path().join("h.term1").exists());
}

#[test]
fn decompose_term_files_sum_to_input() {
    let dir = tempfile::tempdir().unwrap();
    let o = hamsim(&["decompose", "--random-d", "3", "--n", "4", "--seed", "11", "--out", "r"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let listing = stdout(&o);
    let count = listing.lines().filter(|l| l.starts_with("term ")).count();
    assert!(count >= 1);
    let mut total = None;
    for k in 0..count {
        let text = fs::read_to_string(dir.path().join(format!("r.term{k}"))).unwrap();
        let m = parse_sparse(&text, "term").unwrap().to_dense();
        assert!(m.row(0).len() == 16);
        total = Some(match total {
            None => m,
            Some(acc) => &acc + &m,
        });
    }
    let h = hamsim::random::sparse_hamiltonian(&mut hamsim::random::rng(11), 4, 3).unwrap();
    let diff = &total.unwrap() - &h.to_dense();
    assert!(diff.max_abs() <= 1e-12);
}

#[test]
fn pauli_z_circuit_dump() {
    let dir = tempfile::tempdir().unwrap();
    let o = hamsim(&["circuit", "--word", "Z", "--theta", "0.5"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o), "CIRCUIT system=1 ancilla=0\nGATE RZ targets=0 params=1.0\n");
}

#[test]
fn diagonal_circuit_dump_has_oracle_tables_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let o = hamsim(
        &["circuit", "--kind", "diagonal", "--n", "2", "--bits", "3", "--seed", "5", "--t", "0.7", "--verify"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.matches("ORACLE k=3\n").count(), 2);
    let verify = text.lines().last().unwrap();
    let dist: f64 = verify
        .split_whitespace()
        .find_map(|t| t.strip_prefix("distance="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(dist < 1e-10, "{verify}");
    assert!(verify.ends_with("ancilla_residual=0e0"));
}

#[test]
fn hhl_diag_example_row() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.txt"), "n=1 d=1\n0 0 1 0\n1 1 2 0\n").unwrap();
    fs::write(dir.path().join("b.txt"), "1 1\n").unwrap();
    fs::write(dir.path().join("m.txt"), "1 I\n").unwrap();
    let t0 = (std::f64::consts::TAU / 4.0).to_string();
    let o = hamsim(
        &["hhl", "--a", "a.txt", "--b", "b.txt", "--m", "m.txt", "--mbits", "2", "--t0", &t0, "--C", "1"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "mbits,estimate,rescaled,success_prob,classical,abs_err");
    let vals: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(vals[0], 2.0);
    assert!((vals[1] - 1.0).abs() < 1e-12);
    // |A^-1 b|^2 = 1 + 1/4.
    assert!((vals[2] - 1.25).abs() < 1e-12);
    // (|1|^2 + |1/2|^2) / 2.
    assert!((vals[3] - 0.625).abs() < 1e-12);
    assert!((vals[4] - 1.0).abs() < 1e-12);
    assert!(vals[5] < 1e-12);
}

#[test]
fn hhl_auto_parameters_with_dense_observable() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.txt"), "n=1 d=2\n0 0 2 0\n0 1 0.5 0\n1 0 0.5 0\n1 1 -3 0\n").unwrap();
    fs::write(dir.path().join("b.txt"), "0.3,0.1 -0.8\n").unwrap();
    fs::write(dir.path().join("m.txt"), "dense 2\n1 0,0.5\n0,-0.5 -1\n").unwrap();
    let o = hamsim(&["hhl", "--a", "a.txt", "--b", "b.txt", "--m", "m.txt", "--mbits", "9"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    let abs_err: f64 = row.split(',').next_back().unwrap().parse().unwrap();
    assert!(abs_err < 0.05, "{row}");
}

#[test]
fn sweep_csv_layout_and_eps_report() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("xz.txt"), "1 X\n1 Z\n").unwrap();
    let o = hamsim(
        &["sweep", "--pauli", "xz.txt", "--order", "1", "--k", "1", "--r", "16,32,64", "--eps", "1e-3", "--out", "s.csv"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# hamsim sweep pauli=xz.txt split=pauli seed=0"));
    assert_eq!(lines[1], "order,k,r,t,error,bound");
    assert_eq!(lines.iter().filter(|l| !l.starts_with('#')).count(), 7);
    let err = lines[2].split(',').nth(4).unwrap();
    let mantissa = err.split('e').next().unwrap();
    assert!(mantissa.trim_start_matches('-').replace('.', "").len() >= 12);
    assert!(csv.contains("# slope order=1 k=0 value=-"));
    assert!(csv.contains("# eps=1e-3 order=1 k=0 r_min=none"));
    assert!(csv.contains("# eps=1e-3 order=2 k=1 r_min=32"));
}

#[test]
fn model_formats() {
    let dir = tempfile::tempdir().unwrap();
    let o = hamsim(&["model", "--model", "heisenberg", "--n", "2", "--Jz", "0.5", "--format", "sparse"], dir.path());
    assert!(o.status.success());
    let h = parse_sparse(&stdout(&o), "out").unwrap();
    assert_eq!(h.n_qubits(), 2);
    let o = hamsim(&["model", "--model", "honeycomb", "--n", "4", "--graph", "ring"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 4);
}

fn assert_error(o: &Output, code: i32, kind: &str) {
    assert_eq!(o.status.code(), Some(code), "{}", stderr(o));
    let err = stderr(o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with(&format!("error kind={kind} code={code} msg=\"")), "{err}");
}

#[test]
fn exit_code_contract() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("bad.txt"), "n=1 d=1\n0 1 1\n").unwrap();
    fs::write(p.join("nonherm.txt"), "n=1 d=1\n0 1 1 0\n").unwrap();
    fs::write(p.join("big.txt"), "n=20 d=1\n").unwrap();
    fs::write(p.join("dense.txt"), "n=1 d=1\n0 0 1 0\n0 1 1 0\n1 0 1 0\n").unwrap();

    let o = hamsim(&["decompose", "--input", "bad.txt"], p);
    assert_error(&o, 1, "parse");
    assert!(stderr(&o).contains("line 2"));
    assert_error(&hamsim(&["decompose", "--input", "missing.txt"], p), 1, "parse");
    assert_error(&hamsim(&["sweep", "--n", "2", "--order", "3"], p), 1, "parse");

    let o = hamsim(&["decompose", "--input", "nonherm.txt"], p);
    assert_error(&o, 2, "invariant");
    assert!(stderr(&o).contains("(0, 1)") || stderr(&o).contains("(1, 0)"));
    assert_error(&hamsim(&["decompose", "--input", "dense.txt"], p), 2, "invariant");
    assert_error(&hamsim(&["model", "--model", "ising", "--n", "0"], p), 2, "invariant");

    assert_error(&hamsim(&["decompose", "--input", "big.txt"], p), 3, "resource");
    assert_error(&hamsim(&["evolve", "--n", "13"], p), 3, "resource");
}
