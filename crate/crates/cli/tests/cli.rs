use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn cmsflow(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmsflow"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn verify_writes_a_passing_report() {
    let dir = TempDir::new().unwrap();
    let out = cmsflow(
        &["verify", "--families", "sphere,translate", "--h", "1e-2"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("verify_report.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("identity,family,h,max_residual,order_estimate")
    );
    let identities: std::collections::BTreeSet<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert!(identities.len() >= 9, "{identities:?}");
    assert!(stdout(&out).contains("0 failed"));
}

#[test]
fn empty_family_list_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = cmsflow(&["verify", "--families", ","], dir.path());
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("family list is empty"));
}

#[test]
fn unknown_family_and_bad_flags_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        code(&cmsflow(&["verify", "--families", "cylinder"], dir.path())),
        2
    );
    assert_eq!(code(&cmsflow(&["verify", "--h", "0"], dir.path())), 2);
    assert_eq!(
        code(&cmsflow(
            &["flow", "--family", "sphere", "--snapshot-every", "0"],
            dir.path()
        )),
        2
    );
    assert_eq!(code(&cmsflow(&["flow"], dir.path())), 2);
    assert_eq!(
        code(&cmsflow(
            &["flow", "--law", "heat", "--family", "sphere"],
            dir.path()
        )),
        2
    );
}

#[test]
fn flipped_metric_sign_fails_the_metric_check() {
    let dir = TempDir::new().unwrap();
    let out = cmsflow(
        &[
            "verify",
            "--families",
            "sphere",
            "--h",
            "1e-2",
            "--mutate",
            "flip-metric-bending",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert!(err.contains("metric_evolution"), "{err}");
    assert!(!err.contains("area_evolution"), "{err}");
}

#[test]
fn sphere_flow_certifies_immediately() {
    let dir = TempDir::new().unwrap();
    let out = cmsflow(&["flow", "--family", "sphere", "--level", "3"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let cert = fs::read_to_string(dir.path().join("certificate.txt")).unwrap();
    assert!(cert.contains("steps                0"));
    assert!(cert.contains("round_sphere         yes"));
    assert!(dir.path().join("snap_000000.obj").exists());
    assert!(stdout(&out).contains("equilibrium certificate"));
}

#[test]
fn ellipsoid_relaxes_to_a_certified_sphere() {
    let dir = TempDir::new().unwrap();
    let out = cmsflow(
        &[
            "flow",
            "--family",
            "ellipsoid",
            "--level",
            "3",
            "--tau-h",
            "1e-2",
            "--snapshot-every",
            "100",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    assert!(csv.starts_with("step,time,area,volume,chi,H_mean,H_relstd,energy,sphericity,max_C\n"));
    let rows = csv.lines().count() - 1;
    assert!(rows > 100);
    let snaps = fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .file_name()
                .to_string_lossy()
                .starts_with("snap_")
        })
        .count();
    assert_eq!(
        snaps,
        (rows - 1) / 100 + 1 + usize::from(!(rows - 1).is_multiple_of(100))
    );
}

#[test]
fn torus_with_sphere_requirement_stops_at_load() {
    let dir = TempDir::new().unwrap();
    let out = cmsflow(
        &["flow", "--family", "torus", "--require-sphere"],
        dir.path(),
    );
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("not simply connected"));
    assert!(!dir.path().join("diagnostics.csv").exists());
}

#[test]
fn step_budget_is_non_convergence() {
    let dir = TempDir::new().unwrap();
    let out = cmsflow(
        &[
            "flow",
            "--family",
            "ellipsoid",
            "--level",
            "2",
            "--max-steps",
            "5",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("did not converge"));
    assert_eq!(
        fs::read_to_string(dir.path().join("diagnostics.csv"))
            .unwrap()
            .lines()
            .count(),
        7
    );
}

#[test]
fn degenerate_mesh_is_a_topology_error() {
    let dir = TempDir::new().unwrap();
    let mesh = dir.path().join("open.obj");
    fs::write(
        &mesh,
        "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 1 2 3\nf 1 2 4\n",
    )
    .unwrap();
    let out = cmsflow(&["flow", "--mesh", mesh.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn inward_oriented_mesh_is_rejected() {
    let dir = TempDir::new().unwrap();
    let mesh = dir.path().join("tet.obj");
    fs::write(
        &mesh,
        "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 1 2 3\nf 1 4 2\nf 1 3 4\nf 2 4 3\n",
    )
    .unwrap();
    let out = cmsflow(&["flow", "--mesh", mesh.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn missing_mesh_file_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = cmsflow(&["flow", "--mesh", "/nonexistent/shape.obj"], dir.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn curve_snapshots_are_obj_polylines() {
    let dir = TempDir::new().unwrap();
    let out = cmsflow(
        &[
            "flow", "--family", "ellipse", "--level", "1", "--tau-h", "1e-2",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let snap = fs::read_to_string(dir.path().join("snap_000000.obj")).unwrap();
    assert_eq!(
        snap.lines().last(),
        Some(
            format!(
                "l {} 1",
                (1..=32)
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            )
            .as_str()
        )
    );
}

#[test]
fn diagnostics_are_byte_identical_across_runs_and_thread_counts() {
    let run = |threads: &str| {
        let dir = TempDir::new().unwrap();
        let out = Command::new(env!("CARGO_BIN_EXE_cmsflow"))
            .args([
                "flow",
                "--family",
                "bumpy",
                "--level",
                "2",
                "--max-steps",
                "40",
                "--out",
            ])
            .arg(dir.path())
            .env("CMSFLOW_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&out), 4);
        fs::read(dir.path().join("diagnostics.csv")).unwrap()
    };
    let first = run("1");
    assert_eq!(first, run("1"));
    assert_eq!(first, run("3"));
}

#[test]
fn invalid_thread_count_is_rejected() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_cmsflow"))
        .args(["verify", "--out"])
        .arg(dir.path())
        .env("CMSFLOW_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("CMSFLOW_THREADS"));
}

#[test]
fn config_file_sets_values_and_flags_override() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.ini");
    fs::write(
        &cfg,
        "[run]\nmode = flow\nfamily = ellipsoid\nlevel = 2\n\n[flow]\nmax_steps = 3\n\n[flow.controller]\nsafety = 0.25\n",
    )
    .unwrap();
    let out = cmsflow(&["--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 4);
    let rows = |p: &Path| {
        fs::read_to_string(p.join("diagnostics.csv"))
            .unwrap()
            .lines()
            .count()
    };
    assert_eq!(rows(dir.path()), 5);
    let out = cmsflow(
        &["--config", cfg.to_str().unwrap(), "--max-steps", "6"],
        dir.path(),
    );
    assert_eq!(code(&out), 4);
    assert_eq!(rows(dir.path()), 8);

    fs::write(&cfg, "[flow]\nunknown_key = 1\n").unwrap();
    let out = cmsflow(
        &[
            "flow",
            "--family",
            "sphere",
            "--config",
            cfg.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("unknown_key"));
}

#[test]
fn pde_demos_pass_and_log_mass() {
    let dir = TempDir::new().unwrap();
    let out = cmsflow(
        &["pde-demo", "--level", "2", "--snapshot-every", "250"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}{}", stdout(&out), stderr(&out));
    let report = fs::read_to_string(dir.path().join("pde_report.txt")).unwrap();
    assert_eq!(
        report.lines().filter(|l| l.ends_with("PASS")).count(),
        5,
        "{report}"
    );
    let csv = fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    assert!(csv.lines().next().unwrap().ends_with(",mass_total"));
    assert_eq!(csv.lines().count(), 1002);
    let density = fs::read_to_string(dir.path().join("density_000250.csv")).unwrap();
    assert!(density.starts_with("vertex_id,value\n0,"));
}

#[test]
fn help_documents_defaults() {
    let out = Command::new(env!("CARGO_BIN_EXE_cmsflow"))
        .arg("--help")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for key in [
        "[flow.controller]",
        "tau_h=1e-3",
        "CMSFLOW_THREADS",
        "Exit codes",
    ] {
        assert!(text.contains(key), "{key}");
    }
}
