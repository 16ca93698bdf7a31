use std::path::PathBuf;
use std::process::{Command, Output};

fn bellpur(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellpur"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn verify_published_succeeds() {
    let o = bellpur(&["verify-published"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rows=16"));
}

#[test]
fn curves_row_count() {
    let o = bellpur(&["curves", "--fmin", "0.26", "--fmax", "1.0", "--points", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "F,E_formation,D_hash,D_recur_hash,D_macch_hash,KL_upper");
    assert_eq!(lines.len(), 101);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 6));
    assert!(!text.contains('\r'));
}

#[test]
fn curves_log_adds_column() {
    let o = bellpur(&["curves", "--fmin", "0.51", "--fmax", "1.0", "--points", "10", "--log"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().ends_with(",log10_F_minus_half"));
    assert_eq!(text.lines().count(), 11);
    // log grid needs F > 1/2
    assert_eq!(bellpur(&["curves", "--fmin", "0.4", "--log"]).status.code(), Some(1));
}

#[test]
fn small_block_search_reports_no_solution() {
    let o = bellpur(&["search", "--n", "2", "--m", "1", "--t", "1", "--budget", "1000000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("no solution"));
}

#[test]
fn five_pair_search_emits_gate_list() {
    let o = bellpur(&["search", "--n", "5", "--budget", "2000000", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let summary = text.lines().last().unwrap();
    assert!(summary.starts_with("ops=") && summary.contains("goodcon=1"), "{summary}");
    let gates = tmp("found.gates");
    std::fs::write(&gates, text.lines().filter(|l| !l.starts_with("ops=")).collect::<Vec<_>>().join("\n")).unwrap();
    // the code derived from the found circuit must itself correct single errors
    let o = bellpur(&["verify-code", "--gates", gates.to_str().unwrap(), "--logicals", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn seeded_output_is_byte_identical() {
    for args in [
        &["hash-sim", "--n", "5", "--F", "0.9", "--seeds", "4", "--seed", "11"][..],
        &["search", "--n", "5", "--budget", "300000", "--seed", "7"][..],
        &["direct-purify", "--pairs", "20000", "--seed", "3"][..],
        &["twirl-check", "--samples", "10", "--seed", "5"][..],
    ] {
        let a = bellpur(args);
        let b = bellpur(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn out_flag_writes_file() {
    let path = tmp("rec.csv");
    let o = bellpur(&[
        "recurrence", "--F0", "0.7", "--variant", "macchiavello", "--target", "0.99", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some("step,F,p_pass,fraction_remaining"));
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!(last[1] >= 0.99);
}

#[test]
fn hash_sim_rows() {
    let o = bellpur(&["hash-sim", "--n", "3", "--F", "0.95", "--rounds", "3", "--seeds", "2", "--seed", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("seed,round,posterior_entropy,candidates_remaining,identified"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(rows.iter().all(|r| r.len() == 5));
    assert_eq!(rows[0][1], "0");
    assert_eq!(rows[0][3], "64");
}

#[test]
fn direct_purify_near_one_eighth() {
    let o = bellpur(&["direct-purify", "--p", "0.5", "--pairs", "200000", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((row[3] - 0.125).abs() < 4.0 * row[4]);
    assert_eq!(row[7], 1.0);
}

#[test]
fn verify_code_and_twirl_pass() {
    let o = bellpur(&["verify-code", "--random-unitaries", "5", "--logicals", "4", "--seed", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().last(), Some("PASS"));
    let o = bellpur(&["twirl-check", "--samples", "20"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_code_rejects_a_bad_circuit() {
    let gates = tmp("bad.gates");
    std::fs::write(&gates, "BXOR 0 1\nBY 4\n").unwrap();
    let o = bellpur(&["verify-code", "--gates", gates.to_str().unwrap(), "--logicals", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors() {
    assert_eq!(bellpur(&["curves", "--bogus"]).status.code(), Some(1));
    assert_eq!(bellpur(&["nonsense"]).status.code(), Some(1));
    assert_eq!(bellpur(&["recurrence", "--F0", "0.4"]).status.code(), Some(1));
    assert_eq!(bellpur(&["recurrence", "--F0", "0.7", "--variant", "other"]).status.code(), Some(1));
    let help = bellpur(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    let text = stdout(&help);
    for cmd in [
        "curves",
        "recurrence",
        "hash-sim",
        "search",
        "verify-published",
        "verify-code",
        "twirl-check",
        "direct-purify",
    ] {
        assert!(text.contains(cmd), "{cmd}");
    }
}
