//! End-to-end runs of the installed binary: every command is exercised
//! through its public interface, checking outputs, determinism, schemas,
//! and the error contract (exit 0 iff outputs written, single-line stderr).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn boxchan(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boxchan"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn assert_single_line_failure(out: &Output, needle: &str) {
    assert!(!out.status.success(), "command unexpectedly succeeded");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.trim_end().lines().count(), 1, "stderr: {stderr}");
    assert!(stderr.starts_with("boxchan: "), "stderr: {stderr}");
    assert!(stderr.contains(needle), "stderr: {stderr}");
}

fn files_with_suffix(dir: &Path, suffix: &str) -> Vec<PathBuf> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().ends_with(suffix))
        .collect();
    paths.sort();
    paths
}

#[test]
fn preset_list_names_every_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = boxchan(dir.path(), &["preset", "list"]);
    assert_success(&out);
    let stdout = String::from_utf8_lossy(&out.stdout);
    for name in ["sc1", "sc2", "sc3", "cm1", "cm4", "cm9"] {
        assert!(stdout.contains(name), "missing {name} in:\n{stdout}");
    }
    assert!(stdout.contains("enclosure") && stdout.contains("cluster"));
}

#[test]
fn synth_writes_deterministic_tagged_unit_power_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out_dir in [&a, &b] {
        let out = boxchan(
            dir.path(),
            &[
                "synth",
                "sc1",
                "--count",
                "2",
                "--out",
                out_dir.to_str().unwrap(),
                "--seed",
                "9",
            ],
        );
        assert_success(&out);
    }
    // Identical flags and seed → byte-identical outputs.
    let names = ["sc1-0000.profile.csv", "sc1-0000.cir.csv", "sc1-0000.meta.json", "sc1-0001.profile.csv"];
    for name in names {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name} differs between reruns"
        );
    }
    // A different seed changes the draw.
    let c = dir.path().join("c");
    let out = boxchan(
        dir.path(),
        &["synth", "sc1", "--count", "1", "--out", c.to_str().unwrap(), "--seed", "10"],
    );
    assert_success(&out);
    assert_ne!(
        fs::read(a.join("sc1-0000.profile.csv")).unwrap(),
        fs::read(c.join("sc1-0000.profile.csv")).unwrap()
    );

    // Exported profiles are normalized to unit total power; the absolute
    // level travels in the sidecar.
    let profile = fs::read_to_string(a.join("sc1-0000.profile.csv")).unwrap();
    let total: f64 = profile
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-9, "total power {total}");
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.join("sc1-0000.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["model_label"], "sc1");
    assert_eq!(meta["distance_m"], 0.4);
    assert!(meta["seed"].is_u64());
    assert!(meta["large_scale_gain_db"].is_number());
}

#[test]
fn synth_count_zero_writes_nothing_and_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = boxchan(dir.path(), &["synth", "sc2", "--count", "0"]);
    assert_success(&out);
    assert!(files_with_suffix(dir.path(), ".csv").is_empty());
}

#[test]
fn synth_rejects_unknown_presets() {
    let dir = tempfile::tempdir().unwrap();
    let out = boxchan(dir.path(), &["synth", "sc9"]);
    assert_single_line_failure(&out, "sc9");
}

#[test]
fn extract_report_carries_the_specified_schema() {
    // One realization per published receiver position, so the sidecars
    // carry 96 distinct distances and every report group is fittable.
    let dir = tempfile::tempdir().unwrap();
    let out = boxchan(dir.path(), &["synth", "sc1", "--at-grid", "--seed", "4"]);
    assert_success(&out);
    let cir_files = files_with_suffix(dir.path(), ".cir.csv");
    assert_eq!(cir_files.len(), 96);

    let mut args: Vec<&str> = vec!["extract"];
    let owned: Vec<String> = cir_files
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    args.extend(owned.iter().map(String::as_str));
    let out = boxchan(dir.path(), &args);
    assert_success(&out);

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    for key in [
        "/threshold_db",
        "/rds/mean",
        "/rds/std",
        "/path_loss/pl_d0",
        "/path_loss/alpha",
        "/path_loss/sigma",
        "/gamma/gaussian/mu",
        "/gamma/gaussian/sigma",
        "/gamma/gamma/shape",
        "/gamma/gamma/scale",
        "/gamma/weibull/scale",
        "/gamma/weibull/shape",
        "/arrivals/lambda",
        "/arrivals/lambda1",
        "/arrivals/lambda2",
        "/arrivals/b",
        "/threshold_sweep",
    ] {
        assert!(report.pointer(key).is_some(), "missing {key}");
    }
    assert_eq!(report["n_files"], 96);
    assert_eq!(report["rds_per_file_ns"].as_array().unwrap().len(), 96);
    // Synthesized around 175 ns decay: the per-file RDS values are O(100 ns).
    let mean_rds = report["rds"]["mean"].as_f64().unwrap();
    assert!(mean_rds > 50.0 && mean_rds < 400.0, "mean RDS {mean_rds} ns");
}

#[test]
fn extract_requires_distance_tags_only_when_some_exist() {
    let dir = tempfile::tempdir().unwrap();
    let out = boxchan(dir.path(), &["synth", "sc2", "--count", "2", "--seed", "1"]);
    assert_success(&out);
    // Remove one sidecar: path-loss is still requested by the other tag, so
    // the missing one is an error naming the untagged file.
    fs::remove_file(dir.path().join("sc2-0001.meta.json")).unwrap();
    let out = boxchan(
        dir.path(),
        &["extract", "sc2-0000.cir.csv", "sc2-0001.cir.csv"],
    );
    assert_single_line_failure(&out, "sc2-0001");
    // With no tags at all the report simply omits the path-loss group.
    fs::remove_file(dir.path().join("sc2-0000.meta.json")).unwrap();
    let out = boxchan(
        dir.path(),
        &["extract", "sc2-0000.cir.csv", "sc2-0001.cir.csv"],
    );
    assert_success(&out);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert!(report.get("path_loss").is_none());
}

#[test]
fn cir_transforms_a_flat_sweep_into_an_impulse() {
    let dir = tempfile::tempdir().unwrap();
    let n = 64;
    let spacing = 5e9 / n as f64;
    let mut sweep = String::from("freq_hz,re,im\n");
    for i in 0..n {
        sweep.push_str(&format!("{},1,0\n", 57e9 + i as f64 * spacing));
    }
    fs::write(dir.path().join("flat.csv"), &sweep).unwrap();

    // Identity calibration: measured equals reference, no window.
    let out = boxchan(
        dir.path(),
        &["cir", "flat.csv", "--reference", "flat.csv", "--window", "none"],
    );
    assert_success(&out);
    let cir = fs::read_to_string(dir.path().join("flat.cir.csv")).unwrap();
    let rows: Vec<(f64, f64)> = cir
        .lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split(',');
            it.next();
            (
                it.next().unwrap().parse().unwrap(),
                it.next().unwrap().parse().unwrap(),
            )
        })
        .collect();
    assert_eq!(rows.len(), n);
    assert!((rows[0].0 - 1.0).abs() < 1e-9, "first tap {:?}", rows[0]);
    for (re, im) in &rows[1..] {
        assert!(re.abs() < 1e-9 && im.abs() < 1e-9);
    }

    // Malformed input: the error names the offending line.
    fs::write(dir.path().join("bad.csv"), "freq_hz,re,im\n57e9,1,0\n58e9,x,0\n").unwrap();
    let out = boxchan(dir.path(), &["cir", "bad.csv"]);
    assert_single_line_failure(&out, "line 3");
}

#[test]
fn design_reproduces_the_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = boxchan(
        dir.path(),
        &[
            "design",
            "--bandwidth",
            "5e9",
            "--t-max",
            "1e-6",
            "--n",
            "8192",
            "--nu",
            "6720",
        ],
    );
    assert_success(&out);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("design.json")).unwrap())
            .unwrap();
    assert_eq!(report["n_cp"], 5000);
    assert_eq!(report["n_fft"], 8192);
    let rate = report["rate_bps"].as_f64().unwrap();
    let latency = report["latency_s"].as_f64().unwrap();
    assert!((rate / 1e9 - 2.547).abs() < 0.002, "rate {rate}");
    assert!((latency * 1e6 - 2.638).abs() < 0.002, "latency {latency}");
    assert_eq!(report["check"]["cp_ok"], true);
    // Zero speed → no Doppler spread → the product check passes trivially.
    assert_eq!(report["check"]["doppler_ok"], true);
    assert_eq!(report["envelope"]["doppler_hz"], 0.0);

    // A channel too long for any prefix within the transform is refused.
    let out = boxchan(
        dir.path(),
        &[
            "design",
            "--bandwidth",
            "5e9",
            "--t-max",
            "1e-3",
            "--n",
            "8192",
            "--nu",
            "6720",
        ],
    );
    assert_single_line_failure(&out, "infeasible");
}

#[test]
fn ber_curves_are_reproducible_and_carry_theory_columns() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"n_fft":64,"n_cp":4,"n_user":48,"bits_per_symbol":1,"bandwidth":5e9}"#,
    )
    .unwrap();
    let args = [
        "ber",
        "--design",
        "cfg.json",
        "--channel",
        "rayleigh:1",
        "--ebno",
        "0:5:10",
        "--min-bits",
        "20000",
        "--min-errors",
        "10",
        "--max-bits",
        "40000",
        "--theory",
        "--seed",
        "3",
    ];
    let out = boxchan(dir.path(), &args);
    assert_success(&out);
    let first = fs::read(dir.path().join("ber-rayleigh-1.csv")).unwrap();
    let text = String::from_utf8_lossy(&first);
    assert!(text.starts_with("ebn0_db,ber,bits,errors,awgn_theory,rayleigh_theory\n"));
    assert_eq!(text.lines().count(), 4, "3 grid points plus header");
    let out = boxchan(dir.path(), &args);
    assert_success(&out);
    assert_eq!(fs::read(dir.path().join("ber-rayleigh-1.csv")).unwrap(), first);
}

#[test]
fn ber_refuses_channels_longer_than_the_prefix() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"n_fft":64,"n_cp":4,"n_user":48,"bits_per_symbol":1,"bandwidth":5e9}"#,
    )
    .unwrap();
    // 21 taps at 0.2 ns spacing: spans 101 samples, prefix admits 5.
    let mut profile = String::from("delay_s,power_linear\n");
    for i in 0..21 {
        profile.push_str(&format!("{},0.05\n", i as f64 * 1e-9));
    }
    fs::write(dir.path().join("long.profile.csv"), &profile).unwrap();
    let out = boxchan(
        dir.path(),
        &["ber", "--design", "cfg.json", "--channel", "long.profile.csv", "--ebno", "10"],
    );
    assert_single_line_failure(&out, "101");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains('5'), "stderr: {stderr}");
}
