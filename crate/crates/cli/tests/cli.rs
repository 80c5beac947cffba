//! End-to-end checks of the command-line interface: exit codes, file
//! round-trips and determinism.

use std::fs;
use std::path::Path;
use std::process::Command;

fn minklog() -> Command {
    Command::new(env!("CARGO_BIN_EXE_minklog"))
}

struct RunOut {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> RunOut {
    run_env(args, &[])
}

fn run_env(args: &[&str], envs: &[(&str, &str)]) -> RunOut {
    let mut cmd = minklog();
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("spawn minklog");
    RunOut {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn write_square_body(path: &Path) {
    fs::write(
        path,
        "n = 2\ndirections = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]\nh = [1.0, 1.0, 1.0, 1.0]\n",
    )
    .unwrap();
}

#[test]
fn solve_then_verify_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.toml");
    let r = dir.path().join("r.toml");
    let g = run(&[
        "gen-measure",
        "2",
        "8",
        "--seed",
        "7",
        "--out",
        path_str(&m),
    ]);
    assert_eq!(g.code, 0, "gen-measure failed: {}", g.stderr);

    let s = run(&[
        "solve",
        path_str(&m),
        "--b",
        "0",
        "--m",
        "2",
        "--out",
        path_str(&r),
    ]);
    assert_eq!(s.code, 0, "solve failed: {} {}", s.stdout, s.stderr);
    assert!(s.stdout.starts_with("converged"), "stdout: {}", s.stdout);

    let v = run(&["verify", path_str(&r)]);
    assert_eq!(v.code, 0, "verify failed: {} {}", v.stdout, v.stderr);
    assert!(v.stdout.starts_with("verified"));
}

#[test]
fn verify_rejects_a_perturbed_solution() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.toml");
    let r = dir.path().join("r.toml");
    run(&[
        "gen-measure",
        "2",
        "6",
        "--seed",
        "3",
        "--out",
        path_str(&m),
    ]);
    let s = run(&["solve", path_str(&m), "--out", path_str(&r)]);
    assert_eq!(s.code, 0, "{}", s.stderr);

    // Nudge one stored support number by 1%; every recomputed field moves.
    let txt = fs::read_to_string(&r).unwrap();
    let mut out = String::new();
    for line in txt.lines() {
        if let Some(rest) = line.strip_prefix("h_star = [") {
            let body = rest.trim_end_matches(']');
            let mut vals: Vec<f64> = body.split(',').map(|t| t.trim().parse().unwrap()).collect();
            vals[0] *= 1.01;
            let items: Vec<String> = vals.iter().map(|v| format!("{v}")).collect();
            out.push_str(&format!("h_star = [{}]\n", items.join(", ")));
        } else {
            out.push_str(line);
            out.push('\n');
        }
    }
    fs::write(&r, out).unwrap();

    let v = run(&["verify", path_str(&r)]);
    assert_eq!(
        v.code, 3,
        "expected mismatch exit: {} {}",
        v.stdout, v.stderr
    );
    assert!(v.stderr.contains("mismatch"), "stderr: {}", v.stderr);
}

#[test]
fn verify_rejects_a_truncated_file() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.toml");
    let r = dir.path().join("r.toml");
    run(&[
        "gen-measure",
        "2",
        "6",
        "--seed",
        "4",
        "--out",
        path_str(&m),
    ]);
    run(&["solve", path_str(&m), "--out", path_str(&r)]);

    let txt = fs::read_to_string(&r).unwrap();
    fs::write(&r, &txt[..txt.len() / 2]).unwrap();
    let v = run(&["verify", path_str(&r)]);
    assert_eq!(v.code, 1, "expected input error: {} {}", v.stdout, v.stderr);
}

#[test]
fn non_convergence_exits_2_but_still_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.toml");
    let r = dir.path().join("r.toml");
    run(&[
        "gen-measure",
        "2",
        "9",
        "--seed",
        "11",
        "--out",
        path_str(&m),
    ]);
    let s = run(&[
        "solve",
        path_str(&m),
        "--max-iters",
        "2",
        "--out",
        path_str(&r),
    ]);
    assert_eq!(s.code, 2, "{} {}", s.stdout, s.stderr);
    assert!(s.stdout.starts_with("max_iters"), "stdout: {}", s.stdout);
    let txt = fs::read_to_string(&r).unwrap();
    assert!(txt.contains("status = \"max_iters\""));
}

#[test]
fn gen_measure_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.toml");
    let b = dir.path().join("b.toml");
    let c = dir.path().join("c.toml");
    run(&[
        "gen-measure",
        "2",
        "10",
        "--seed",
        "7",
        "--out",
        path_str(&a),
    ]);
    run(&[
        "gen-measure",
        "2",
        "10",
        "--seed",
        "7",
        "--out",
        path_str(&b),
    ]);
    run(&[
        "gen-measure",
        "2",
        "10",
        "--seed",
        "8",
        "--out",
        path_str(&c),
    ]);
    let fa = fs::read(&a).unwrap();
    assert_eq!(fa, fs::read(&b).unwrap(), "same seed must reproduce bytes");
    assert_ne!(fa, fs::read(&c).unwrap(), "different seed should differ");
}

#[test]
fn gen_measure_rejects_bad_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.toml");
    assert_eq!(
        run(&["gen-measure", "2", "2", "--out", path_str(&out)]).code,
        1,
        "count below n + 1"
    );
    assert_eq!(
        run(&["gen-measure", "4", "8", "--out", path_str(&out)]).code,
        1,
        "unsupported dimension"
    );
}

#[test]
fn plot_is_planar_only() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.toml");
    let r = dir.path().join("r.toml");
    let svg = dir.path().join("p.svg");
    run(&[
        "gen-measure",
        "3",
        "8",
        "--seed",
        "5",
        "--out",
        path_str(&m),
    ]);
    let s = run(&["solve", path_str(&m), "--out", path_str(&r)]);
    assert_eq!(s.code, 0, "{}", s.stderr);

    let p = run(&["plot", path_str(&r), "--out", path_str(&svg)]);
    assert_eq!(p.code, 1, "{} {}", p.stdout, p.stderr);

    let missing = dir.path().join("absent.toml");
    assert_eq!(
        run(&["plot", path_str(&missing), "--out", path_str(&svg)]).code,
        1
    );
}

#[test]
fn plot_writes_svg_for_planar_reports() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.toml");
    let r = dir.path().join("r.toml");
    let svg = dir.path().join("p.svg");
    run(&[
        "gen-measure",
        "2",
        "7",
        "--seed",
        "9",
        "--out",
        path_str(&m),
    ]);
    run(&["solve", path_str(&m), "--out", path_str(&r)]);
    let p = run(&["plot", path_str(&r), "--out", path_str(&svg)]);
    assert_eq!(p.code, 0, "{} {}", p.stdout, p.stderr);
    let body = fs::read_to_string(&svg).unwrap();
    assert!(body.starts_with("<svg"));
    assert!(body.contains("polyline"));
}

#[test]
fn compute_rejects_p_zero_and_matches_surface_at_p_one() {
    let dir = tempfile::tempdir().unwrap();
    let body = dir.path().join("body.toml");
    write_square_body(&body);

    let z = run(&["compute", path_str(&body), "--p", "0"]);
    assert_eq!(z.code, 1, "{} {}", z.stdout, z.stderr);
    assert!(z.stderr.contains("log case"), "stderr: {}", z.stderr);

    let one = run(&["compute", path_str(&body), "--p", "1"]);
    assert_eq!(one.code, 0, "{}", one.stderr);
    let surface = extract_array(&one.stdout, "surface");
    let surface_p = extract_array(&one.stdout, "surface_p");
    assert_eq!(surface.len(), surface_p.len());
    for (a, b) in surface.iter().zip(&surface_p) {
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{a} vs {b}");
    }
}

fn extract_array(toml_text: &str, key: &str) -> Vec<f64> {
    let prefix = format!("{key} = [");
    let line = toml_text
        .lines()
        .find(|l| l.starts_with(&prefix))
        .unwrap_or_else(|| panic!("no `{key}` line in output"));
    line[prefix.len()..]
        .trim_end_matches(']')
        .split(',')
        .map(|t| t.trim().parse().unwrap())
        .collect()
}

#[test]
fn oracle_passes_clean_and_catches_biased_quadrature() {
    let dir = tempfile::tempdir().unwrap();
    let body = dir.path().join("body.toml");
    write_square_body(&body);

    let clean = run(&[
        "oracle",
        path_str(&body),
        "--samples",
        "200000",
        "--seed",
        "12",
    ]);
    assert_eq!(clean.code, 0, "{} {}", clean.stdout, clean.stderr);

    let again = run(&[
        "oracle",
        path_str(&body),
        "--samples",
        "200000",
        "--seed",
        "12",
    ]);
    assert_eq!(
        clean.stdout, again.stdout,
        "fixed seed must reproduce the z-scores"
    );

    let biased = run(&[
        "oracle",
        path_str(&body),
        "--samples",
        "200000",
        "--seed",
        "12",
        "--bias-quad",
        "0.05",
    ]);
    assert_eq!(biased.code, 3, "{} {}", biased.stdout, biased.stderr);
}

#[test]
fn concentrated_measures_are_rejected_with_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.toml");
    fs::write(
        &m,
        "n = 2\ndirections = [[1.0, 0.0], [0.8, 0.6], [0.8, -0.6], [0.6, 0.8]]\nweights = [1.0, 1.0, 1.0, 1.0]\n",
    )
    .unwrap();
    let s = run(&["solve", path_str(&m)]);
    assert_eq!(s.code, 1, "{} {}", s.stdout, s.stderr);
    assert!(
        s.stderr.contains("hemisphere"),
        "reason should name the hemisphere: {}",
        s.stderr
    );
}

#[test]
fn parameters_outside_the_variational_range_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.toml");
    run(&[
        "gen-measure",
        "2",
        "6",
        "--seed",
        "2",
        "--out",
        path_str(&m),
    ]);
    // n = 2, m = 2: the admissible range is b < 1/2.
    let s = run(&["solve", path_str(&m), "--b", "0.5", "--m", "2"]);
    assert_eq!(s.code, 1, "{} {}", s.stdout, s.stderr);
}

#[test]
fn kappa0_window_is_enforced_unless_overridden() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.toml");
    let r = dir.path().join("r.toml");
    run(&[
        "gen-measure",
        "2",
        "6",
        "--seed",
        "2",
        "--out",
        path_str(&m),
    ]);

    let tight = run(&["solve", path_str(&m), "--kappa0", "0.5"]);
    assert_eq!(tight.code, 1, "{} {}", tight.stdout, tight.stderr);

    let open = run(&[
        "solve",
        path_str(&m),
        "--kappa0",
        "0.5",
        "--allow-small-kappa",
        "--out",
        path_str(&r),
    ]);
    assert_ne!(open.code, 1, "{} {}", open.stdout, open.stderr);
}

#[test]
fn thread_env_must_be_a_positive_integer() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.toml");
    let g = run_env(
        &[
            "gen-measure",
            "2",
            "6",
            "--seed",
            "2",
            "--out",
            path_str(&m),
        ],
        &[("MINKLOG_THREADS", "zero")],
    );
    assert_eq!(g.code, 1, "{} {}", g.stdout, g.stderr);
}
