//! End-to-end runs of the `xyjoint` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use toml::Table;

use xyjoint::analysis::{collapse_pair_counts, csquared_from_patterns, estimate_vx, estimate_vy};
use xyjoint::sim::{OutcomeCounts4, PairCounts16};
use xyjoint::qubit::{Axis, Sign};
use xyjoint_cli::bundle::{manifest_path, CountsFile, RunManifest};

const R3: &str = "0.5773502691896258";

fn xyjoint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xyjoint")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn table(path: &Path) -> Table {
    fs::read_to_string(path).unwrap().parse().unwrap()
}

fn floats(t: &Table, section: &str, key: &str) -> Vec<f64> {
    t[section][key].as_array().unwrap().iter().map(|v| v.as_float().unwrap()).collect()
}

fn float(t: &Table, section: &str, key: &str) -> f64 {
    t[section][key].as_float().unwrap()
}

fn simulate(dir: &TempDir, name: &str, extra: &[&str]) -> PathBuf {
    let out = dir.path().join(name);
    let mut args = vec!["simulate", "--out", path_str(&out)];
    args.extend_from_slice(extra);
    let run = xyjoint(&args);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    out
}

#[test]
fn build_povm_writes_four_elements() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("povm.toml");
    let run = xyjoint(&["build-povm", "--vx", R3, "--vy", R3, "--vz", R3, "--out", path_str(&out)]);
    assert_eq!(code(&run), 0);
    let t = table(&out);
    assert_eq!(t["schema"].as_str(), Some("xyjoint.povm/1"));
    let elements = t["element"].as_array().unwrap();
    assert_eq!(elements.len(), 4);
    for e in elements {
        // rank one: zero smallest eigenvalue and trace 1/2
        assert!(e["min_eigenvalue"].as_float().unwrap().abs() < 1e-10);
        let re: Vec<f64> = e["re"].as_array().unwrap().iter().map(|v| v.as_float().unwrap()).collect();
        assert!((re[0] + re[3] - 0.5).abs() < 1e-15);
    }
    assert!(manifest_path(&out).exists());
}

#[test]
fn build_povm_projective_x() {
    let run = xyjoint(&["build-povm", "--vx", "1", "--vy", "0", "--vz", "0"]);
    assert_eq!(code(&run), 0);
    let t: Table = String::from_utf8(run.stdout).unwrap().parse().unwrap();
    let elements = t["element"].as_array().unwrap();
    let expect_off = [0.25, 0.25, -0.25, -0.25];
    for (e, off) in elements.iter().zip(expect_off) {
        let re: Vec<f64> = e["re"].as_array().unwrap().iter().map(|v| v.as_float().unwrap()).collect();
        assert_eq!(re, vec![0.25, off, off, 0.25]);
    }
}

#[test]
fn build_povm_rejects_non_positive_triples() {
    let run = xyjoint(&["build-povm", "--vx", "0.8", "--vy", "0.8", "--vz", "0"]);
    assert_eq!(code(&run), 2);
    assert!(stderr(&run).contains("1.28"), "{}", stderr(&run));
}

#[test]
fn malformed_flags_exit_one() {
    assert_eq!(code(&xyjoint(&["build-povm", "--vx", "abc", "--vy", "0", "--vz", "0"])), 1);
    assert_eq!(code(&xyjoint(&["no-such-command"])), 1);
    assert_eq!(code(&xyjoint(&["--help"])), 0);
    assert_eq!(code(&xyjoint(&["--version"])), 0);
}

#[test]
fn invalid_mode_combinations_exit_one() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("c");
    let out = path_str(&out);
    let v = ["--vx", "0.5", "--vy", "0.5", "--vz", "0.5", "--shots", "10"];
    let cases: [&[&str]; 5] = [
        &["--mode", "eigenstate", "--axis", "Z"],
        &["--mode", "eigenstate"],
        &["--mode", "eigenstate", "--axis", "X", "--werner-p", "0.5"],
        &["--mode", "pair", "--axis", "X"],
        &["--mode", "pair", "--randomize-flips"],
    ];
    for extra in cases {
        let mut args = vec!["simulate", "--out", out];
        args.extend_from_slice(&v);
        args.extend_from_slice(extra);
        let run = xyjoint(&args);
        assert_eq!(code(&run), 1, "{extra:?}: {}", stderr(&run));
    }
    let mut args = vec!["simulate", "--out", out, "--mode", "pair", "--werner-p", "1.5"];
    args.extend_from_slice(&v);
    assert_eq!(code(&xyjoint(&args)), 1);
}

#[test]
fn projective_x_never_reports_the_wrong_x() {
    let dir = TempDir::new().unwrap();
    let out = simulate(&dir, "x.counts", &["--mode", "eigenstate", "--axis", "X", "--vx", "1", "--vy", "0", "--vz", "0", "--shots", "100000"]);
    let file = CountsFile::load(&out).unwrap();
    assert_eq!(file.counts[2] + file.counts[3], 0);
    assert_eq!(file.counts.iter().sum::<u64>(), 100_000);
}

#[test]
fn symmetric_boundary_pairs_never_repeat() {
    let dir = TempDir::new().unwrap();
    let out = simulate(&dir, "p.counts", &["--mode", "pair", "--vx", R3, "--vy", R3, "--vz", R3, "--seed", "4"]);
    let file = CountsFile::load(&out).unwrap();
    assert_eq!(file.counts.len(), 16);
    let repeated: u64 = [0, 5, 10, 15].iter().map(|&k| file.counts[k]).sum();
    assert!(repeated < 5);
}

#[test]
fn counts_reference_an_existing_manifest() {
    let dir = TempDir::new().unwrap();
    let out = simulate(&dir, "y.counts", &["--mode", "eigenstate", "--axis", "Y", "--value", "-1", "--vx", "0.3", "--vy", "0.7", "--vz", "0.2", "--shots", "5000", "--randomize-flips"]);
    let file = CountsFile::load(&out).unwrap();
    let manifest_file = dir.path().join(&file.manifest);
    let manifest = RunManifest::from_text(&fs::read_to_string(&manifest_file).unwrap(), "m").unwrap();
    assert_eq!(manifest.command, "simulate");
    assert_eq!(manifest.config.as_ref(), Some(&file.config));
    assert_eq!(manifest.outputs, vec![out.display().to_string()]);
    assert!(!fs::read_to_string(&out).unwrap().contains("timestamp"));
}

fn bundle(dir: &TempDir, v: [&str; 3], shots: &str) -> [PathBuf; 3] {
    let common = ["--vx", v[0], "--vy", v[1], "--vz", v[2], "--shots", shots];
    let with = |extra: &[&str]| -> Vec<String> {
        extra.iter().chain(common.iter()).map(|s| s.to_string()).collect()
    };
    let run = |name: &str, extra: &[&str]| {
        let args = with(extra);
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        simulate(dir, name, &refs)
    };
    [
        run("x.counts", &["--mode", "eigenstate", "--axis", "X", "--seed", "11"]),
        run("y.counts", &["--mode", "eigenstate", "--axis", "Y", "--seed", "12"]),
        run("p.counts", &["--mode", "pair", "--seed", "13"]),
    ]
}

fn estimate(dir: &TempDir, inputs: &[PathBuf], extra: &[&str]) -> (Output, PathBuf) {
    let out = dir.path().join("report.toml");
    let mut args = vec!["estimate", "--out", path_str(&out)];
    args.extend_from_slice(extra);
    args.extend(inputs.iter().map(|p| path_str(p)));
    (xyjoint(&args), out)
}

#[test]
fn symmetric_boundary_is_non_classical() {
    let dir = TempDir::new().unwrap();
    let inputs = bundle(&dir, [R3, R3, R3], "1000000");
    let (run, out) = estimate(&dir, &inputs, &["--full"]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let t = table(&out);
    let c2 = float(&t, "correlation", "c_squared");
    let se = float(&t, "correlation", "stderr");
    assert!((c2 + 1.0 / 3.0).abs() < 0.01, "{c2}");
    assert!(se > 5e-4 && se < 3e-3);
    assert_eq!(t["correlation"]["verdict"].as_str(), Some("non-classical"));
    assert!((float(&t, "exact", "c_squared") + 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(t["crosscheck"]["vx2_consistent"].as_bool(), Some(true));
}

#[test]
fn planar_device_is_consistent_with_classical() {
    let dir = TempDir::new().unwrap();
    let inputs = bundle(&dir, ["0.6", "0.8", "0"], "1000000");
    let (run, out) = estimate(&dir, &inputs, &[]);
    assert_eq!(code(&run), 0);
    let t = table(&out);
    assert!(float(&t, "correlation", "c_squared").abs() < 3.0 * float(&t, "correlation", "stderr"));
    assert_eq!(t["correlation"]["verdict"].as_str(), Some("consistent-with-classical"));
    assert!((float(&t, "vx", "value") - 0.6).abs() < 5.0 * float(&t, "vx", "stderr"));
}

#[test]
fn uniform_device_estimates_vanish() {
    let dir = TempDir::new().unwrap();
    let inputs = bundle(&dir, ["0", "0", "0"], "200000");
    let (run, out) = estimate(&dir, &inputs, &[]);
    assert_eq!(code(&run), 0);
    let t = table(&out);
    for (s, k) in [("vx", "value"), ("vy", "value"), ("vsquared", "vx2"), ("vsquared", "vy2"), ("correlation", "c_squared")] {
        assert!(float(&t, s, k).abs() < 0.02, "{s}.{k}");
    }
}

#[test]
fn report_is_recomputable_from_its_counts() {
    let dir = TempDir::new().unwrap();
    let inputs = bundle(&dir, ["0.45", "0.55", "-0.6"], "300000");
    let (run, out) = estimate(&dir, &inputs, &[]);
    assert_eq!(code(&run), 0);
    let t = table(&out);
    let load = |p: &PathBuf| CountsFile::load(p).unwrap();
    let x: OutcomeCounts4 = load(&inputs[0]).eigenstate_counts().unwrap();
    let y = load(&inputs[1]).eigenstate_counts().unwrap();
    let pair: PairCounts16 = load(&inputs[2]).pair_counts().unwrap();
    let vx = estimate_vx(&x).unwrap();
    let vy = estimate_vy(&y).unwrap();
    let stats = collapse_pair_counts(&pair).unwrap();
    let c = csquared_from_patterns(&stats);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    assert!(close(float(&t, "vx", "value"), vx.value));
    assert!(close(float(&t, "vx", "stderr"), vx.stderr));
    assert!(close(float(&t, "vy", "value"), vy.value));
    assert!(close(float(&t, "correlation", "c_squared"), c.c_squared));
    assert!(close(float(&t, "correlation", "stderr"), c.stderr));
    for (a, b) in floats(&t, "patterns", "e").iter().zip(stats.e()) {
        assert!(close(*a, *b));
    }
    let e = stats.e();
    assert!(close(float(&t, "correlation", "s"), e[1] + e[2] - e[0] - e[3]));
}

#[test]
fn minus_inputs_pool_with_plus_inputs() {
    let dir = TempDir::new().unwrap();
    let v = ["--vx", "0.7", "--vy", "0.2", "--vz", "0.1", "--shots", "200000"];
    let mk = |name: &str, value: &str, seed: &str| {
        let mut args = vec!["--mode", "eigenstate", "--axis", "X", "--value", value, "--seed", seed];
        args.extend_from_slice(&v);
        simulate(&dir, name, &args)
    };
    let inputs = [mk("a", "+1", "1"), mk("b", "-1", "2")];
    let (run, out) = estimate(&dir, &inputs, &[]);
    assert_eq!(code(&run), 0);
    let t = table(&out);
    assert_eq!(t["vx"]["shots"].as_integer(), Some(400_000));
    assert!((float(&t, "vx", "value") - 0.7).abs() < 5.0 * float(&t, "vx", "stderr"));
    let missing: Vec<&str> = t["missing"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(missing, ["Y-eigenstate run", "pair run"]);
}

#[test]
fn estimate_lists_absent_measurements() {
    let dir = TempDir::new().unwrap();
    let x = simulate(&dir, "x", &["--mode", "eigenstate", "--axis", "X", "--vx", "0.5", "--vy", "0.5", "--vz", "0", "--shots", "100"]);
    let (run, _) = estimate(&dir, &[x], &["--full"]);
    assert_eq!(code(&run), 1);
    let msg = stderr(&run);
    assert!(msg.contains("Y-eigenstate run") && msg.contains("pair run"), "{msg}");
    let (run, _) = estimate(&dir, &[], &[]);
    assert_eq!(code(&run), 1);
}

#[test]
fn werner_correction_restores_singlet_patterns() {
    let dir = TempDir::new().unwrap();
    let p = simulate(&dir, "p", &["--mode", "pair", "--vx", R3, "--vy", R3, "--vz", R3, "--werner-p", "0.8", "--seed", "21"]);
    let (run, out) = estimate(&dir, &[p], &["--werner-correct"]);
    assert_eq!(code(&run), 0);
    let t = table(&out);
    assert_eq!(t["patterns"]["werner_corrected"].as_bool(), Some(true));
    let c2 = float(&t, "correlation", "c_squared");
    assert!((c2 + 1.0 / 3.0).abs() < 5.0 * float(&t, "correlation", "stderr"), "{c2}");
}

fn kd_entries(t: &Table) -> Vec<(f64, f64)> {
    floats(t, "kd", "re").into_iter().zip(floats(t, "kd", "im")).collect()
}

#[test]
fn reconstruct_z_plus_exactly() {
    let run = xyjoint(&["reconstruct", "--exact-state", "z+", "--vx", R3, "--vy", R3, "--vz", R3]);
    assert_eq!(code(&run), 0);
    let t: Table = String::from_utf8(run.stdout).unwrap().parse().unwrap();
    let expected = [(0.25, 0.25), (0.25, -0.25), (0.25, -0.25), (0.25, 0.25)];
    for ((re, im), (er, ei)) in kd_entries(&t).into_iter().zip(expected) {
        assert!((re - er).abs() < 1e-12 && (im - ei).abs() < 1e-12);
    }
    assert!(float(&t, "deviation", "max_abs") < 1e-12);
}

#[test]
fn reconstruct_mixed_state_is_uniform() {
    let run = xyjoint(&["reconstruct", "--exact-state", "mixed", "--vx", "0.3", "--vy", "0.4", "--vz", "-0.5"]);
    assert_eq!(code(&run), 0);
    let t: Table = String::from_utf8(run.stdout).unwrap().parse().unwrap();
    for (re, im) in kd_entries(&t) {
        assert!((re - 0.25).abs() < 1e-12 && im.abs() < 1e-12);
    }
}

#[test]
fn reconstruct_with_zero_vz_names_it() {
    let run = xyjoint(&["reconstruct", "--exact-state", "z+", "--vx", "0.5", "--vy", "0.5", "--vz", "0"]);
    assert_eq!(code(&run), 2);
    assert!(stderr(&run).contains("vz"), "{}", stderr(&run));
    let run = xyjoint(&["reconstruct", "--exact-state", "z+", "--vx", "0", "--vy", "0.5", "--vz", "0.5"]);
    assert_eq!(code(&run), 2);
    assert!(stderr(&run).contains("vx"));
}

#[test]
fn reconstruct_from_counts_and_report() {
    let dir = TempDir::new().unwrap();
    let inputs = bundle(&dir, [R3, R3, R3], "1000000");
    let (run, report) = estimate(&dir, &inputs, &[]);
    assert_eq!(code(&run), 0);
    let out = dir.path().join("kd.toml");
    let run = xyjoint(&["reconstruct", "--counts", path_str(&inputs[0]), "--report", path_str(&report), "--out", path_str(&out)]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let t = table(&out);
    assert_eq!(t["state"].as_str(), Some("X+"));
    let re_err = floats(&t, "kd", "re_stderr");
    let dev = floats(&t, "deviation", "re");
    // the visibilities are themselves estimates, so allow a generous margin
    for (d, e) in dev.iter().zip(&re_err) {
        assert!(d.abs() < 10.0 * e + 5e-3, "{d} vs {e}");
    }

    let run = xyjoint(&["reconstruct", "--counts", path_str(&inputs[2]), "--vx", "0.5", "--vy", "0.5", "--vz", "0.5"]);
    assert_eq!(code(&run), 1);
}

#[test]
fn reconstruct_falls_back_to_configured_visibilities() {
    let dir = TempDir::new().unwrap();
    let y = simulate(&dir, "y", &["--mode", "eigenstate", "--axis", "Y", "--vx", "0.5", "--vy", "0.6", "--vz", "0.5", "--seed", "3"]);
    let run = xyjoint(&["reconstruct", "--counts", path_str(&y)]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let t: Table = String::from_utf8(run.stdout).unwrap().parse().unwrap();
    assert_eq!(float(&t, "visibilities", "vy"), 0.6);
    let dev = floats(&t, "deviation", "im");
    let err = floats(&t, "kd", "im_stderr");
    for (d, e) in dev.iter().zip(&err) {
        assert!(d.abs() <= 5.0 * e);
    }
}

#[test]
fn verify_passes_and_catches_injected_faults() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("verify.toml");
    let run = xyjoint(&["verify", "--grid", "5", "--out", path_str(&out)]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stdout));
    let t = table(&out);
    assert_eq!(t["passed"].as_bool(), Some(true));
    assert!(t["check"].as_array().unwrap().len() >= 10);

    for fault in ["y-sign", "element-sign"] {
        let run = xyjoint(&["verify", "--grid", "3", "--inject-fault", fault]);
        assert_eq!(code(&run), 3, "{fault}");
        assert!(String::from_utf8_lossy(&run.stdout).contains("FAIL"));
    }
}

#[test]
fn verify_default_grid_passes() {
    let run = xyjoint(&["verify"]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stdout));
}

#[test]
fn counts_and_reports_are_rerun_stable() {
    let dir = TempDir::new().unwrap();
    let a = simulate(&dir, "a", &["--mode", "eigenstate", "--axis", "X", "--vx", "0.4", "--vy", "0.4", "--vz", "0.4", "--randomize-flips", "--threads", "1"]);
    let text_a = fs::read(&a).unwrap();
    let (run, report) = estimate(&dir, std::slice::from_ref(&a), &[]);
    assert_eq!(code(&run), 0);
    let report_a = fs::read(&report).unwrap();
    let a2 = simulate(&dir, "a", &["--mode", "eigenstate", "--axis", "X", "--vx", "0.4", "--vy", "0.4", "--vz", "0.4", "--randomize-flips", "--threads", "4"]);
    assert_eq!(fs::read(&a2).unwrap(), text_a);
    estimate(&dir, &[a], &[]);
    assert_eq!(fs::read(&report).unwrap(), report_a);
    let counts = CountsFile::load(&a2).unwrap().eigenstate_counts().unwrap();
    assert_eq!((counts.input_axis, counts.input_value), (Axis::X, Sign::Plus));
}
