use std::process::{Command, Output};

fn normsol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_normsol"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const RECORD_FIELDS: [&str; 10] = [
    "mu",
    "mass",
    "mass_target",
    "mass_error",
    "action",
    "j_m",
    "grad_sq",
    "pohozaev_rel",
    "classification",
    "shoot_height",
];

#[test]
fn mu_star_prints_threshold() {
    let out = normsol(&["mu-star", "--g", "cubic-quintic:a=1,b=1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "0.1875");
    let out = normsol(&["mu-star", "--g", "power:p=3"]);
    assert_eq!(stdout(&out).trim(), "inf");
}

#[test]
fn usage_errors_exit_two() {
    let out = normsol(&["find", "--g", "cubic-quintic:a=1,b=1", "--dim", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--mass"));
    assert_eq!(
        normsol(&["solve", "--g", "power:p=3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        normsol(&["solve", "--g", "nope", "--mu", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        normsol(&["scan", "--g", "power:p=3", "--plot"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        normsol(&["verify", "--suite", "nope"]).status.code(),
        Some(2)
    );
}

#[test]
fn solver_errors_exit_one() {
    let out = normsol(&[
        "solve",
        "--g",
        "cubic-quintic:a=1,b=1",
        "--dim",
        "3",
        "--mu",
        "0.2",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solve_writes_profile_and_record() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = normsol(&[
        "solve",
        "--g",
        "power:p=3",
        "--dim",
        "3",
        "--mu",
        "1",
        "--mass",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(out_dir.join("profile.csv")).unwrap();
    let profile = normsol::RadialProfile::from_csv(3, &csv).unwrap();
    assert!((profile.values()[0] - 4.337_387_68).abs() < 1e-6);
    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("result.json")).unwrap())
            .unwrap();
    for key in RECORD_FIELDS {
        assert!(record.get(key).is_some(), "{key}");
    }
    let (action, mu) = (
        record["action"].as_f64().unwrap(),
        record["mu"].as_f64().unwrap(),
    );
    assert!((record["j_m"].as_f64().unwrap() - (action - 2.0 * mu)).abs() < 1e-12);
}

#[test]
fn find_reports_two_solutions_above_well() {
    let dir = tempfile::tempdir().unwrap();
    let out = normsol(&[
        "find",
        "--g",
        "cubic-quintic:a=1,b=1",
        "--dim",
        "3",
        "--mass",
        "190",
        "--mu-min",
        "0.002",
        "--mu-max",
        "0.18",
        "--steps",
        "24",
        "--out",
        dir.path().to_str().unwrap(),
        "--plot",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let records: Vec<serde_json::Value> =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("solutions.json")).unwrap())
            .unwrap();
    assert_eq!(records.len(), 2);
    for r in &records {
        for key in RECORD_FIELDS {
            assert!(!r[key].is_null(), "{key}");
        }
        assert!(r["mass_error"].as_f64().unwrap() <= 1e-3);
    }
    assert_eq!(records[0]["classification"], "bm-local-max");
    assert_eq!(records[1]["classification"], "bm-local-min");
    let svg = std::fs::read_to_string(dir.path().join("curve.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("b_m(mu)"));
    assert!(std::fs::read_to_string(dir.path().join("curve.csv"))
        .unwrap()
        .starts_with("mu,a,c_minus,c_plus,b_m,n_states\n"));
}

#[test]
fn find_below_threshold_mass_is_empty() {
    let out = normsol(&[
        "find",
        "--g",
        "cubic-quintic:a=1,b=1",
        "--mass",
        "40",
        "--mu-min",
        "0.005",
        "--mu-max",
        "0.15",
        "--steps",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "[]");
}

#[test]
fn scan_is_deterministic_and_thread_independent() {
    let args = [
        "scan",
        "--g",
        "power:p=3",
        "--dim",
        "3",
        "--mu-min",
        "0.1",
        "--mu-max",
        "10",
        "--steps",
        "6",
        "--mass",
        "2",
    ];
    let a = normsol(&args);
    let b = normsol(&args);
    let c = Command::new(env!("CARGO_BIN_EXE_normsol"))
        .args(args)
        .env("NLS_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("mu,a,c_minus,c_plus,b_m,n_states\n"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn verify_scaling_suite_passes() {
    let out = normsol(&["verify", "--suite", "scaling"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert_eq!(
        stdout(&out)
            .lines()
            .filter(|l| l.starts_with("[PASS]"))
            .count(),
        2
    );
}
