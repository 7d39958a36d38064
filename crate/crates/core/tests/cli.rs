use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn momrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_momrep")).args(args).output().unwrap()
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs").join(name)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const FLUID: &str = "[params]
tau = 1.0
n_particles = 100
volume = 1000
statistics = \"bose\"

[grid]
dim = 3
spacing = 0.5
extent = 8.0
";

#[test]
fn fluid_csv_sums_to_n() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "f.toml", FLUID);
    let out = dir.path().join("rho.csv");
    let run = momrep(&["fluid", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# config_sha256="));
    assert!(text.contains("# n_particles=1.0000000000000000e2"));
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("px,py,pz,rho"));
    let sum: f64 = lines.map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap()).sum();
    assert!((sum * 0.5f64.powi(3) - 100.0).abs() < 1e-6 * 100.0, "{sum}");
}

#[test]
fn identical_configs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("crystal.toml");
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let run = momrep(&["crystal", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(run.status.code(), Some(0));
    }
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let text = String::from_utf8(text).unwrap();
    assert!(text.contains("px,py,pz,rho,eps0,psi0_sq"));
    assert!(text.lines().any(|l| l.starts_with("0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0,")));
}

#[test]
fn condensate_single_peak() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[params]
tau = -1.0
n_particles = 10
volume = 1
statistics = \"bose\"

[condensate]
n_c = 6
p0 = [0.5]
",
    );
    let run = momrep(&["condensate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    let peaks = doc["peaks"].as_array().unwrap();
    assert_eq!(peaks.len(), 1);
    assert_eq!(peaks[0]["weight"], 6.0);
    assert_eq!(doc["total_momentum"][0], 3.0);
}

#[test]
fn broadened_file_is_labelled() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("peaks.json");
    let run = momrep(&[
        "condensate",
        "--config",
        config("condensate.toml").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--broaden",
        "0.2",
    ]);
    assert_eq!(run.status.code(), Some(0));
    let smooth = std::fs::read_to_string(dir.path().join("peaks.json.broadened.csv")).unwrap();
    assert!(smooth.starts_with("# visualization only"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", &FLUID.replace("volume = 1000", "volume = 1000\nvolumee = 3"));
    let run = momrep(&["fluid", "--config", bad.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    let err = String::from_utf8(run.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("kind=config") && err.contains("line=5") && err.contains("volumee"), "{err}");

    let missing = write(dir.path(), "m.toml", &FLUID.replace("dim = 3", "dim = 1"));
    let run = momrep(&["crystal", "--config", missing.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8(run.stderr).unwrap().contains("key=lattice"));

    let small = write(dir.path(), "s.toml", &FLUID.replace("extent = 8.0", "extent = 1.5"));
    let run = momrep(&["fluid", "--config", small.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(3));
    assert!(String::from_utf8(run.stderr).unwrap().starts_with("momrep: error kind=numerical"));

    assert_eq!(momrep(&["fluid"]).status.code(), Some(2));
    assert_eq!(momrep(&["sideways"]).status.code(), Some(2));
    assert_eq!(momrep(&["--help"]).status.code(), Some(0));
}

#[test]
fn wigner_pair_marginals_agree() {
    let run = momrep(&["wigner", "--config", config("wigner_pair.toml").to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    let a = doc["position_quadrature"].as_f64().unwrap();
    let b = doc["momentum_quadrature"].as_f64().unwrap();
    assert!((a - b).abs() < 1e-6 * a);
    assert_eq!(doc["order"], 2);
}
