use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn frustsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frustsim"))
        .args(args)
        .env_remove("FRUSTSIM_OUT")
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn samples(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_str().unwrap().starts_with("samples_"))
        .collect();
    v.sort();
    v
}

fn header(path: &Path) -> Vec<String> {
    let text = fs::read_to_string(path).unwrap();
    text.lines().next().unwrap().split(',').map(String::from).collect()
}

#[test]
fn quench_writes_one_file_per_anneal_time() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("q");
    ok(&frustsim(&["quench", "--ta-sweep", "1:8:4", "--reads", "50", "-o", s(&out)]));
    assert_eq!(samples(&out).len(), 4);
    assert!(out.join("config.json").exists());
    let index = fs::read_to_string(out.join("quench_index.csv")).unwrap();
    assert_eq!(index.lines().count(), 5);
    let body = fs::read_to_string(&samples(&out)[0]).unwrap();
    assert!(body.contains("config_hash"));
}

#[test]
fn quench_is_independent_of_thread_count() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for (dir, threads) in [(&a, "1"), (&b, "3")] {
        ok(&frustsim(&[
            "--threads", threads, "quench", "--ta-sweep", "0.5:4:3", "--reads", "40", "--seed", "9", "-o", s(dir),
        ]));
    }
    for (x, y) in samples(&a).iter().zip(samples(&b).iter()) {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
    }
    assert_eq!(fs::read(a.join("config.json")).unwrap(), fs::read(b.join("config.json")).unwrap());
}

#[test]
fn missing_schedule_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let o = frustsim(&["quench", "--schedule", "/no/such/schedule.csv", "-o", s(tmp.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/no/such/schedule.csv"));
}

#[test]
fn oversized_lattice_is_refused() {
    let tmp = TempDir::new().unwrap();
    let o = frustsim(&["quench", "--lx", "6", "--ly", "6", "-o", s(tmp.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("coarsen"));
}

#[test]
fn analyze_columns_follow_the_model() {
    let tmp = TempDir::new().unwrap();
    let tri = tmp.path().join("tri");
    let vil = tmp.path().join("vil");
    ok(&frustsim(&["quench", "--ta-sweep", "0.5:4:3", "--reads", "200", "-o", s(&tri)]));
    ok(&frustsim(&[
        "quench", "--model", "villain", "--lx", "4", "--ly", "4", "--ta-sweep", "0.5:4:3", "--reads", "200", "-o",
        s(&vil),
    ]));

    let a = tmp.path().join("a_tri");
    let mut args = vec!["analyze".to_string()];
    args.extend(samples(&tri).iter().map(|p| s(p).to_string()));
    args.extend(["--fit", "--plot", "-o", s(&a)].map(String::from));
    ok(&frustsim(&args.iter().map(String::as_str).collect::<Vec<_>>()));
    assert_eq!(header(&a.join("observables.csv")), ["t_a", "reads", "m_tri", "defect_density", "xi_x", "xi_y"]);
    let fits = fs::read_to_string(a.join("fits.csv")).unwrap();
    assert!(fits.lines().any(|l| l.starts_with("m_tri,")));
    assert!(fits.lines().any(|l| l.starts_with("defect_density,")));
    assert!(a.join("m_tri.svg").exists());

    let b = tmp.path().join("a_vil");
    let mut args = vec!["analyze".to_string()];
    args.extend(samples(&vil).iter().map(|p| s(p).to_string()));
    args.extend(["-o", s(&b)].map(String::from));
    ok(&frustsim(&args.iter().map(String::as_str).collect::<Vec<_>>()));
    assert_eq!(header(&b.join("observables.csv")), ["t_a", "reads", "m_vil", "xi_x", "xi_y"]);

    let mixed = [s(&samples(&tri)[0]).to_string(), s(&samples(&vil)[0]).to_string()];
    let o = frustsim(&["analyze", &mixed[0], &mixed[1], "-o", s(&tmp.path().join("m"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(&mixed[1]));

    let o = frustsim(&["analyze", &mixed[0], "--fit", "-o", s(&tmp.path().join("one"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn coarsen_is_reproducible() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        ok(&frustsim(&[
            "coarsen", "--l", "16", "--replicas", "3", "--steps", "40", "--window", "5:40", "--fit-r", "2:6", "-o",
            s(dir),
        ]));
    }
    let csv = fs::read_to_string(a.join("coarsening.csv")).unwrap();
    assert_eq!(csv.lines().count(), 41);
    assert_eq!(csv, fs::read_to_string(b.join("coarsening.csv")).unwrap());
    assert!(a.join("exponents.csv").exists());
}

#[test]
fn coarsen_rejects_fit_range_beyond_the_grid() {
    let tmp = TempDir::new().unwrap();
    let o = frustsim(&["coarsen", "--l", "16", "-o", s(tmp.path())]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn shim_resume_matches_an_uninterrupted_run() {
    let tmp = TempDir::new().unwrap();
    let base = ["shim", "--lx", "3", "--ly", "6", "--sampler", "exact", "--samples", "50", "--eval-samples", "200"];
    let run = |extra: &[&str], dir: &Path| {
        let mut a: Vec<&str> = base.to_vec();
        a.extend_from_slice(extra);
        a.extend(["-o", s(dir)]);
        ok(&frustsim(&a))
    };
    let (full, half, rest) = (tmp.path().join("full"), tmp.path().join("half"), tmp.path().join("rest"));
    run(&["--iterations", "30"], &full);
    run(&["--iterations", "15"], &half);
    let state = half.join("shim_state.json");
    run(&["--iterations", "30", "--resume", s(&state)], &rest);
    for f in ["flux.csv", "offsets.csv", "couplers.csv", "shim_history.csv", "magnetizations.csv"] {
        assert_eq!(fs::read(full.join(f)).unwrap(), fs::read(rest.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn shim_with_no_iterations_leaves_controls_nominal() {
    let tmp = TempDir::new().unwrap();
    ok(&frustsim(&[
        "shim", "--lx", "3", "--ly", "6", "--sampler", "exact", "--iterations", "0", "-o", s(tmp.path()),
    ]));
    let m = fs::read_to_string(tmp.path().join("magnetizations.csv")).unwrap();
    for line in m.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[1], f[2]);
    }
}

#[test]
fn output_directory_comes_from_the_environment() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("from-env");
    let o = Command::new(env!("CARGO_BIN_EXE_frustsim"))
        .args(["quench", "--ta-sweep", "1", "--reads", "10"])
        .env("FRUSTSIM_OUT", &out)
        .output()
        .unwrap();
    ok(&o);
    assert_eq!(samples(&out).len(), 1);
}

#[test]
fn zero_threads_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let o = frustsim(&["--threads", "0", "quench", "-o", s(tmp.path())]);
    assert_eq!(o.status.code(), Some(2));
}
