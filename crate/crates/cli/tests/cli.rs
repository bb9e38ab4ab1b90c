use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bandlattice"));
    cmd.env_remove("BANDLATTICE_OUT");
    cmd
}

fn run(args: &[&str], out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn csv_column(path: &Path, col: usize) -> Vec<f64> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect()
}

fn files(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            out.extend(files(&path));
        } else {
            out.push(path);
        }
    }
    out.sort();
    out
}

#[test]
fn every_command_passes_on_small_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    for (cmd, extra) in [
        ("reconstruct", vec![]),
        ("dispersion", vec![]),
        ("translate", vec![]),
        ("kernel-sweep", vec!["--m-max", "1000", "--l-max", "10000"]),
        ("conserve", vec!["--n", "17", "--ensemble", "4"]),
    ] {
        let dir = tmp.path().join(cmd);
        let mut args = vec![cmd];
        args.extend(extra);
        let o = run(&args, &dir);
        assert_eq!(code(&o), 0, "{cmd}: {}", String::from_utf8_lossy(&o.stdout));
        let r = report(&dir);
        assert_eq!(r["command"], cmd);
        assert!(r["checks"]
            .as_array()
            .unwrap()
            .iter()
            .all(|c| c["pass"] == true));
    }
    let d = tmp.path();
    for f in [
        "reconstruct/samples.csv",
        "reconstruct/samples.json",
        "reconstruct/reconstruction.csv",
        "reconstruct/error.csv",
        "dispersion/dispersion_kg.csv",
        "dispersion/dispersion_chain.csv",
        "translate/original.csv",
        "translate/reconstructed.csv",
        "translate/shifted_curve.csv",
        "translate/shifted_samples.csv",
        "kernel-sweep/kernel_sweep.csv",
        "kernel-sweep/s_convergence.csv",
        "kernel-sweep/basel.csv",
        "kernel-sweep/kernel_d_toeplitz.csv",
        "conserve/conservation_report.json",
        "conserve/trajectory_klein_gordon_cubic.csv",
        "conserve/snapshots/klein_gordon_0000.csv",
    ] {
        assert!(d.join(f).exists(), "{f}");
    }
}

#[test]
fn invalid_configurations_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    for args in [
        vec!["dispersion", "--n", "256"],
        vec!["reconstruct", "--b", "1.5"],
        vec!["reconstruct", "--dx", "0"],
        vec!["dispersion", "--boundary", "truncated"],
        vec!["conserve", "--n", "17", "--cutoff", "9"],
        vec!["reconstruct", "--boundary", "sideways"],
        vec!["explode"],
    ] {
        assert_eq!(code(&run(&args, &out)), 2, "{args:?}");
    }
    let cfg = tmp.path().join("bad.json");
    std::fs::write(&cfg, r#"{"dx": 1.0, "colour": "blue"}"#).unwrap();
    let o = bin()
        .args(["reconstruct", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    let o = bin()
        .args(["reconstruct", "--config", "/nonexistent.json", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn tolerance_failures_exit_with_one() {
    // Edge effects of a truncated lattice break the conservation kernel.
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "conserve",
            "--n",
            "17",
            "--boundary",
            "truncated",
            "--ensemble",
            "2",
        ],
        tmp.path(),
    );
    assert_eq!(code(&o), 1);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(
        stdout.contains("FAIL quadratic_kernel_residual"),
        "{stdout}"
    );
}

#[test]
fn flags_override_config_which_overrides_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"n": 33, "dx": 0.5, "seed": 4, "boundary": "periodic"}"#,
    )
    .unwrap();
    let out = tmp.path().join("o");
    let o = bin()
        .args(["reconstruct", "--n", "17", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let c = &report(&out)["config"];
    assert_eq!(c["n"], 17);
    assert_eq!(c["dx"], 0.5);
    assert_eq!(c["seed"], 4);
    assert_eq!(c["mass"], 1.0);
    assert_eq!(c["lambda"], 0.1);
    assert_eq!(c["b"], 0.0);
}

#[test]
fn output_directory_falls_back_to_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let env_dir = tmp.path().join("from-env");
    let o = bin()
        .args(["reconstruct", "--n", "9"])
        .env("BANDLATTICE_OUT", &env_dir)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(env_dir.join("report.json").exists());

    let flag_dir = tmp.path().join("from-flag");
    let o = bin()
        .args(["reconstruct", "--n", "9", "--out"])
        .arg(&flag_dir)
        .env("BANDLATTICE_OUT", tmp.path().join("unused"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(flag_dir.join("report.json").exists());
    assert!(!tmp.path().join("unused").exists());
}

#[test]
fn same_config_gives_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    for (cmd, extra) in [
        ("reconstruct", vec!["--seed", "12"]),
        ("translate", vec!["--seed", "3", "--a", "0.3"]),
        (
            "conserve",
            vec!["--n", "17", "--ensemble", "3", "--seed", "5"],
        ),
    ] {
        let (a, b) = (
            tmp.path().join(format!("{cmd}-a")),
            tmp.path().join(format!("{cmd}-b")),
        );
        let mut args = vec![cmd];
        args.extend(extra);
        assert_eq!(code(&run(&args, &a)), 0);
        assert_eq!(code(&run(&args, &b)), 0);
        let (fa, fb) = (files(&a), files(&b));
        assert_eq!(fa.len(), fb.len());
        for (x, y) in fa.iter().zip(&fb) {
            assert_eq!(x.strip_prefix(&a).unwrap(), y.strip_prefix(&b).unwrap());
            assert_eq!(
                std::fs::read(x).unwrap(),
                std::fs::read(y).unwrap(),
                "{}",
                x.display()
            );
        }
    }
    let c = tmp.path().join("other-seed");
    assert_eq!(code(&run(&["reconstruct", "--seed", "13"], &c)), 0);
    assert_ne!(
        std::fs::read(c.join("samples.csv")).unwrap(),
        std::fs::read(tmp.path().join("reconstruct-a/samples.csv")).unwrap()
    );
}

#[test]
fn reconstruct_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let (one, two, zero) = (
        tmp.path().join("1"),
        tmp.path().join("2"),
        tmp.path().join("0"),
    );
    assert_eq!(code(&run(&["reconstruct", "--n", "65"], &one)), 0);
    assert_eq!(
        code(&run(
            &["reconstruct", "--n", "65", "--oversample", "2"],
            &two
        )),
        0
    );
    for col in [1, 2] {
        let (a, b) = (
            csv_column(&one.join("reconstruction.csv"), col),
            csv_column(&two.join("reconstruction.csv"), col),
        );
        assert_eq!(a.len(), b.len());
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-9));
    }
    assert_eq!(
        code(&run(
            &["reconstruct", "--n", "33", "--amplitude", "0"],
            &zero
        )),
        0
    );
    for (file, cols) in [
        ("samples.csv", vec![2, 3]),
        ("reconstruction.csv", vec![1, 2]),
        ("error.csv", vec![1, 2, 3]),
    ] {
        for col in cols {
            assert!(
                csv_column(&zero.join(file), col).iter().all(|v| *v == 0.0),
                "{file}"
            );
        }
    }
}

#[test]
fn dispersion_reads_hamiltonian_spec_files() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = tmp.path().join("h.json");
    std::fs::write(
        &spec,
        r#"{"type": "klein_gordon", "params": {"mass": 2.0}, "dx": 0.5, "n": 33, "boundary": "periodic"}"#,
    )
    .unwrap();
    let out = tmp.path().join("o");
    let o = bin()
        .args(["dispersion", "--n", "33", "--mass", "2", "--hamiltonian"])
        .arg(&spec)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out.join("dispersion_spec.csv")).unwrap();
    let zero_mode = text.lines().find(|l| l.starts_with("0,")).unwrap();
    let omega2: f64 = zero_mode.split(',').nth(2).unwrap().parse().unwrap();
    assert!((omega2 - 4.0).abs() < 1e-9);
}

#[test]
fn conserve_without_cubic_term_repeats_the_quadratic_report() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        &["conserve", "--n", "17", "--ensemble", "2", "--lambda", "0"],
        tmp.path(),
    );
    assert_eq!(code(&o), 0);
    let entries: Vec<Value> = serde_json::from_str(
        &std::fs::read_to_string(tmp.path().join("conservation_report.json")).unwrap(),
    )
    .unwrap();
    let kg = entries
        .iter()
        .find(|e| e["hamiltonian"] == "klein-gordon")
        .unwrap();
    let cubic = entries
        .iter()
        .find(|e| e["hamiltonian"] == "klein-gordon+cubic")
        .unwrap();
    for key in [
        "kernel_residual",
        "fock_residual",
        "flow_drift",
        "energy_drift",
        "scalar_residual",
    ] {
        assert_eq!(kg[key], cubic[key], "{key}");
    }
}

#[test]
fn translate_by_one_spacing_rolls_samples() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&run(
            &["translate", "--n", "33", "--dx", "0.5", "--a", "0.5"],
            tmp.path()
        )),
        0
    );
    let original = csv_column(&tmp.path().join("original.csv"), 2);
    let shifted = csv_column(&tmp.path().join("shifted_samples.csv"), 2);
    let n = original.len();
    for j in 0..n {
        assert_eq!(shifted[(j + 1) % n], original[j]);
    }
    let checks = report(tmp.path())["checks"].clone();
    let names: Vec<&str> = checks
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"generator_vs_derivative"));
    assert!(names.contains(&"momentum_offset_invariance"));
}

#[test]
fn kernel_sweep_tables() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&run(
            &[
                "kernel-sweep",
                "--n",
                "9",
                "--m-max",
                "100",
                "--l-max",
                "1000"
            ],
            tmp.path()
        )),
        0
    );
    let toeplitz = std::fs::read_to_string(tmp.path().join("kernel_d_toeplitz.csv")).unwrap();
    assert!(toeplitz.contains("\n-1,1e0\n0,0e0\n1,-1e0\n"));
    let sweep = std::fs::read_to_string(tmp.path().join("kernel_sweep.csv")).unwrap();
    let ms: Vec<&str> = sweep
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(ms, ["10", "100"]);
    let s = std::fs::read_to_string(tmp.path().join("s_convergence.csv")).unwrap();
    assert_eq!(s.lines().count(), 1 + 4 * 3);
}
