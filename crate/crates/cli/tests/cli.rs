//! End-to-end checks of the `gsac` binary: output formats, determinism and
//! exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

use gsac_core::channel::{channel_to_csv, generate_channel, ChannelParams, ChannelProfile};

fn gsac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsac"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("gsac-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn partitions_prints_the_reference_listing() {
    let out = gsac(&["partitions", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "(4)\n(3,1)\n(2,2)\n(2,1,1)\n(1,1,1,1)\n");
}

#[test]
fn partitions_rejects_out_of_range() {
    let out = gsac(&["partitions", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let out = gsac(&["partitions", "65"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    let out = gsac(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(1));
    let out = gsac(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

fn write_test_channel(n_t: usize, n_r: usize, seed: u64, path: &PathBuf) {
    let params = ChannelParams::new(ChannelProfile::default_mmwave(), n_t, n_r, seed);
    let ch = generate_channel(&params).unwrap();
    std::fs::write(path, channel_to_csv(ch.h())).unwrap();
}

#[test]
fn design_writes_precoder_and_rate() {
    let channel = temp_path("design-h.csv");
    let precoder = temp_path("design-p.csv");
    write_test_channel(8, 4, 11, &channel);

    let out = gsac(&[
        "design",
        "--channel",
        channel.to_str().unwrap(),
        "--cfg",
        "(2,2)",
        "--scheme",
        "gsac-sic",
        "--snr-db",
        "0",
        "--out",
        precoder.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).starts_with("rate = "));
    let text = std::fs::read_to_string(&precoder).unwrap();
    assert!(text.starts_with("# cfg=(2,2)\n"));
    assert!(text.contains("# f_rf rows=8 cols=4"));
    assert!(text.contains("# f_bb rows=4 cols=4"));

    // fc-omp on a file channel runs on the grid dictionary.
    let out = gsac(&[
        "design",
        "--channel",
        channel.to_str().unwrap(),
        "--cfg",
        "(4)",
        "--scheme",
        "fc-omp",
        "--out",
        precoder.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let _ = std::fs::remove_file(&channel);
    let _ = std::fs::remove_file(&precoder);
}

#[test]
fn design_validation_failures_exit_one() {
    let channel = temp_path("design-bad-h.csv");
    write_test_channel(8, 4, 12, &channel);
    // Partition does not divide the antenna count.
    let out = gsac(&[
        "design",
        "--channel",
        channel.to_str().unwrap(),
        "--cfg",
        "(3,2)",
        "--scheme",
        "gsac-sic",
    ]);
    assert_eq!(out.status.code(), Some(1));
    // Unreadable channel file is a runtime error.
    let out = gsac(&[
        "design",
        "--channel",
        "/nonexistent/h.csv",
        "--cfg",
        "(2,2)",
        "--scheme",
        "gsac-sic",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let _ = std::fs::remove_file(&channel);
}

const SPEC: &str = "\
experiment = cli-demo
sweep = snr_db
snr_db = -5, 0
n_t = 16
n_r = 4
n_rf = 4
n_cl = 4
n_ray = 2
schemes = gsac-sic, sac-sic
rf_configs = (2,2)
trials = 4
seed = 17
";

#[test]
fn sweep_is_deterministic_across_runs_and_workers() {
    let spec = temp_path("sweep.cfg");
    std::fs::write(&spec, SPEC).unwrap();
    let raw_a = temp_path("raw-a.csv");
    let raw_b = temp_path("raw-b.csv");

    let out_a = gsac(&[
        "sweep",
        spec.to_str().unwrap(),
        "--raw",
        raw_a.to_str().unwrap(),
    ]);
    assert_eq!(out_a.status.code(), Some(0));
    let agg_a = stdout(&out_a);
    assert!(agg_a
        .starts_with("experiment,scheme,cfg,snr_db,mean_rate,std_rate,power_w,mean_ee,trials\n"));
    // 2 sweep points x 2 schemes + header.
    assert_eq!(agg_a.lines().count(), 1 + 4);

    let out_b = Command::new(env!("CARGO_BIN_EXE_gsac"))
        .args([
            "sweep",
            spec.to_str().unwrap(),
            "--raw",
            raw_b.to_str().unwrap(),
        ])
        .env("GSAC_WORKERS", "3")
        .output()
        .unwrap();
    assert_eq!(out_b.status.code(), Some(0));
    assert_eq!(
        agg_a,
        stdout(&out_b),
        "aggregate CSV must be byte-identical"
    );
    assert_eq!(
        std::fs::read(&raw_a).unwrap(),
        std::fs::read(&raw_b).unwrap(),
        "raw CSV must be byte-identical"
    );

    let _ = std::fs::remove_file(&spec);
    let _ = std::fs::remove_file(&raw_a);
    let _ = std::fs::remove_file(&raw_b);
}

#[test]
fn sweep_rejects_unknown_keys() {
    let spec = temp_path("sweep-bad.cfg");
    std::fs::write(&spec, format!("{SPEC}typo_key = 1\n")).unwrap();
    let out = gsac(&["sweep", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("typo_key"));
    let _ = std::fs::remove_file(&spec);
}

#[test]
fn search_emits_candidates_and_winner() {
    let out = gsac(&[
        "search", "--n-t", "16", "--n-r", "4", "--n-rf", "4", "--trials", "5", "--seed", "9",
        "--n-cl", "4", "--n-ray", "2",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.starts_with("cfg,n_ps,power_w,mean_rate,mean_ee,skipped_reason\n"));
    // 5 candidates for 4 chains, then the winner and boundary lines.
    assert_eq!(text.lines().count(), 1 + 5 + 2);
    assert!(text.contains("\nbest ("));

    // Indivisible antenna split across every candidate is a validation error.
    let out = gsac(&[
        "search", "--n-t", "18", "--n-r", "4", "--n-rf", "4", "--trials", "2", "--seed", "9",
    ]);
    assert_eq!(out.status.code(), Some(1));
}
