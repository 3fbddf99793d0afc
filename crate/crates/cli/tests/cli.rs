use std::path::Path;
use std::process::{Command, Output};

use qbf_synth::circuit::bench::parse_bench;
use qbf_synth::synthesis::verify;

fn qsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsynth"))
        .args(args)
        .env_remove("QSYNTH_SAT_SOLVER")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn gates_in(path: &Path) -> usize {
    parse_bench(&std::fs::read_to_string(path).unwrap())
        .unwrap()
        .gate_count()
}

#[test]
fn bench_gen_writes_one_file_per_parameter() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = qsynth(&["bench-gen", "add", "1..4", "-o", out]);
    assert_eq!(code(&o), 0);
    for (n, g) in [(1, 5), (2, 10), (3, 15), (4, 20)] {
        assert_eq!(gates_in(&dir.path().join(format!("add/{n}.bench"))), g);
    }
    assert!(dir.path().join("add/manifest.json").exists());

    assert_eq!(code(&qsynth(&["bench-gen", "moa", "3", "-o", out])), 0);
    assert_eq!(gates_in(&dir.path().join("moa/3.bench")), 5);
}

#[test]
fn bench_gen_rejects_invalid_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let o = qsynth(&["bench-gen", "mux", "3", "-o", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("power of two"));
    assert!(!dir.path().join("mux").exists());
}

#[test]
fn verify_exit_codes() {
    assert_eq!(code(&qsynth(&["verify", "add:1", "add:1"])), 0);
    assert_eq!(
        code(&qsynth(&["verify", "moa:3", "add:1", "--positional"])),
        0
    );

    let o = qsynth(&["verify", "add:1", "sub:1", "--positional"]);
    assert_eq!(code(&o), 1);
    // a0 = b0 = 0, borrow-in 1: the adder gives sum 1 carry 0, the subtractor difference 1 borrow 1
    assert!(stdout(&o).contains("counterexample: i0=0 i1=0 i2=1"));

    assert_eq!(code(&qsynth(&["verify", "add:1", "add:2"])), 2);
    assert_eq!(
        code(&qsynth(&["verify", "add:1", "cmp:1", "--positional"])),
        2
    );
}

#[test]
fn synthesize_compresses_the_subtractor() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sub.csv");
    let o = qsynth(&["synthesize", "sub:1", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let found = parse_bench(&stdout(&o)).unwrap();
    assert_eq!(found.gate_count(), 5);
    let psi = qbf_synth::benchgen::gen_alu(
        qbf_synth::benchgen::FamilySpec::new(qbf_synth::benchgen::Family::Sub, 1).unwrap(),
    );
    assert!(verify(&found, &psi).unwrap());

    let text = std::fs::read_to_string(csv).unwrap();
    let statuses: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap())
        .collect();
    assert_eq!(
        statuses,
        ["unsat", "unsat", "unsat", "unsat", "unsat", "sat"]
    );
}

#[test]
fn synthesize_reports_unsat_and_timeout() {
    let o = qsynth(&["synthesize", "add:1", "--max-k", "2"]);
    assert_eq!(code(&o), 1);
    let o = qsynth(&[
        "synthesize",
        "add:1",
        "--min-k",
        "4",
        "--max-k",
        "4",
        "--conflicts",
        "1",
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn synthesize_writes_verified_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = qsynth(&[
        "synthesize",
        "tt:6/2",
        "--enumerate",
        "3",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let artifacts = manifest["artifacts"].as_array().unwrap();
    assert!(!artifacts.is_empty());
    assert!(artifacts.iter().all(|a| a["verified"] == true));
}

#[test]
fn deterministic_manifests_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let m = dir.path().join(name);
        let o = qsynth(&[
            "--deterministic",
            "--manifest",
            m.to_str().unwrap(),
            "synthesize",
            "add:1",
            "--min-k",
            "4",
        ]);
        assert_eq!(code(&o), 0);
        std::fs::read(m).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn label_count_of_a_single_and() {
    let o = qsynth(&["label-count", "tt:8/2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("count=1 complete=true"));
    let o = qsynth(&["label-count", "add:1", "--limit", "2"]);
    assert!(stdout(&o).starts_with("count=2 complete=false"));
    assert_eq!(code(&o), 0);
}

#[test]
fn export_formats() {
    let o = qsynth(&["export", "add:1", "-k", "5"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let prefix: Vec<char> = text
        .lines()
        .filter_map(|l| l.chars().next().filter(|c| *c == 'e' || *c == 'a'))
        .collect();
    assert_eq!(prefix, ['e', 'a', 'e']);

    let o = qsynth(&["export", "add:1", "-k", "5", "--format", "dimacs-expanded"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("p cnf "));

    assert_eq!(code(&qsynth(&["export", "add:1", "--format", "aiger"])), 2);
}

#[test]
fn sat_with_bundled_and_external_solvers() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    std::fs::write(&cnf, "p cnf 2 3\n1 2 0\n-1 0\n-2 0\n").unwrap();
    let o = qsynth(&["sat", cnf.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("s UNSATISFIABLE"));

    std::fs::write(&cnf, "p cnf 2 2\n1 2 0\n-1 0\n").unwrap();
    let o = qsynth(&["sat", cnf.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("v -1 2 0"));

    let fake = dir.path().join("fake.sh");
    std::fs::write(&fake, "#!/bin/sh\necho garbage\n").unwrap();
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        std::fs::set_permissions(&fake, std::fs::Permissions::from_mode(0o755)).unwrap();
        let o = qsynth(&[
            "sat",
            cnf.to_str().unwrap(),
            "--solver",
            fake.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 2);
    }
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("qsynth.conf");
    std::fs::write(&cfg, "# defaults\nbasis = nand\n").unwrap();
    let o = qsynth(&["--config", cfg.to_str().unwrap(), "synthesize", "tt:8/2"]);
    assert_eq!(code(&o), 0);
    // AND needs two NAND gates
    assert_eq!(parse_bench(&stdout(&o)).unwrap().gate_count(), 2);
}
