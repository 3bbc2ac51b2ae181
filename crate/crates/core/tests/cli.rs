use std::process::Command;

use heavytail::cli::run;

const GOLDEN_SIMULATE: &str = include_str!("golden/simulate_alpha1_a1_n10_k1_seed42.csv");

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(
        std::iter::once("heavytail").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_heavytail"))
}

/// Strict CSV check: header line then rows of the same arity, every field
/// empty or a plain float literal.
fn assert_strict_csv(text: &str, header: &str) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some(header));
    let width = header.split(',').count();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), width, "{line}");
        for f in fields {
            assert!(
                f.is_empty()
                    || f.parse::<f64>().is_ok()
                    || f == "true"
                    || f == "false"
                    || f.chars().all(char::is_alphanumeric),
                "bad field {f:?}"
            );
        }
    }
    assert!(!text.contains('\r'));
}

#[test]
fn simulate_matches_golden_file() {
    let args = [
        "simulate",
        "--alpha",
        "1",
        "--a",
        "1",
        "--n",
        "10",
        "--k",
        "1",
        "--replicas",
        "100000",
        "--seed",
        "42",
    ];
    let (code, out, _) = call(&args);
    assert_eq!(code, 0);
    assert_eq!(out, GOLDEN_SIMULATE);
    assert_strict_csv(
        &out,
        "t,log10_t,p_emp,log10_p_emp,p_theory,log10_p_theory,se",
    );
    assert!(out.contains("# replicas=100000 seed=42"));
}

#[test]
fn thread_count_does_not_change_bytes() {
    let args = [
        "simulate",
        "--alpha",
        "1.5",
        "--a",
        "-0.5",
        "--n",
        "8",
        "--replicas",
        "3000",
        "--seed",
        "7",
    ];
    let one = bin()
        .args(args)
        .env("HEAVYTAIL_THREADS", "1")
        .output()
        .unwrap();
    let four = bin()
        .args(args)
        .env("HEAVYTAIL_THREADS", "4")
        .output()
        .unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    let bad = bin()
        .args(args)
        .env("HEAVYTAIL_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn tail_prints_regime_and_coefficient() {
    let (code, out, _) = call(&["tail", "--alpha", "1", "--a", "0", "--n", "10", "--k", "0"]);
    assert_eq!(code, 0);
    let line = out.lines().find(|l| l.starts_with("regime=")).unwrap();
    let coef: f64 = line.split("coef=").nth(1).unwrap().parse().unwrap();
    assert!(line.starts_with("regime=PowerHalf"));
    assert!((coef - 20.0 / std::f64::consts::PI).abs() < 1e-12);
    assert!((coef - 6.3662).abs() < 1e-4);

    let (_, out, _) = call(&[
        "tail", "--alpha", "1", "--a", "0.3", "--a0", "0.5", "--n", "20",
    ]);
    assert!(out.contains("regime=OrderOnly coef=NA"));
    assert!(out.contains("diagnostic="));

    let (_, out, _) = call(&[
        "tail", "--alpha", "1", "--a", "-0.5", "--b", "0.2", "--n", "10",
    ]);
    assert!(out.contains("regime=PowerLog"));
}

#[test]
fn matrix_dumps_shift() {
    let (code, out, _) = call(&["matrix", "--a", "0", "--n", "3", "--k", "1"]);
    assert_eq!(code, 0);
    let rows: Vec<Vec<f64>> = out
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(
        rows,
        vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0]
        ]
    );
}

#[test]
fn regions_csv_is_strict() {
    let (code, out, _) = call(&[
        "regions", "--a-min", "-2", "--a-max", "2", "--b-min", "-2", "--b-max", "1", "--steps",
        "5", "--kmax", "40",
    ]);
    assert_eq!(code, 0);
    assert_strict_csv(&out, "a,b,stable,first_covering_k,in_theorem_region,regime");
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 26);
}

#[test]
fn calibrate_echoes_grid_and_skips() {
    let (code, out, _) = call(&[
        "calibrate",
        "--alpha",
        "1",
        "--replicas",
        "1000",
        "--seed",
        "3",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("# skipped (a <= a0)=5.0000000000000000e-1"));
    assert_strict_csv(&out, "a,t_eta,risk_hat,se");
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 38);
    let (code, out, _) = call(&[
        "calibrate",
        "--alpha",
        "2",
        "--a",
        "0.9",
        "--a",
        "1.1",
        "--replicas",
        "500",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 3);
}

#[test]
fn dist_reports_quantiles() {
    let (code, out, _) = call(&["dist", "--alpha", "2", "--eta", "1e-6"]);
    assert_eq!(code, 0);
    let get = |key: &str| -> f64 {
        out.lines()
            .find_map(|l| l.strip_prefix(key))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!((get("quantile_tail=") - 707.1068).abs() < 1e-3);
    assert!((get("upper_quantile=") - 707.1057).abs() < 1e-3);
    assert!((get("tail_constant=") - 0.5).abs() < 1e-14);
}

#[test]
fn identical_invocations_identical_bytes() {
    let args = [
        "simulate",
        "--alpha",
        "2",
        "--a",
        "0.5",
        "--a0",
        "0.2",
        "--n",
        "12",
        "--replicas",
        "2000",
        "--seed",
        "1",
    ];
    assert_eq!(call(&args), call(&args));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("heavytail-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("m.csv");
    let status = bin()
        .args([
            "matrix",
            "--a",
            "0.5",
            "--n",
            "3",
            "--out",
            path.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# heavytail matrix"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    let usage = bin()
        .args(["tail", "--alpha", "1", "--bogus"])
        .output()
        .unwrap();
    assert_eq!(usage.status.code(), Some(2));
    let err = String::from_utf8(usage.stderr).unwrap();
    for flag in ["--alpha", "--a", "--b", "--n", "--k", "--a0", "--t"] {
        assert!(err.contains(flag), "help should list {flag}");
    }
    let domain = bin()
        .args(["tail", "--alpha", "0", "--a", "0.5", "--n", "10"])
        .output()
        .unwrap();
    assert_eq!(domain.status.code(), Some(1));
    assert!(String::from_utf8(domain.stderr).unwrap().contains("alpha"));
    let pre = bin()
        .args(["dist", "--alpha", "1", "--eta", "2"])
        .output()
        .unwrap();
    assert_eq!(pre.status.code(), Some(1));
    let neg = bin()
        .args(["matrix", "--a", "0.5", "--n", "4", "--k", "-2"])
        .output()
        .unwrap();
    assert_eq!(neg.status.code(), Some(1));
    let ok = bin().args(["--help"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
}
