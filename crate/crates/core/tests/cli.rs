use std::path::PathBuf;
use std::process::Command;

use tr_boson::cli::{cmd_analyze, cmd_protocol, cmd_sample};
use tr_boson::config::RunConfig;
use tr_boson::Error;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tr-boson-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn config(dir: &std::path::Path, extra: &[&str]) -> RunConfig {
    let mut o = vec![format!("output_dir={}", dir.display()), "sampler.n_events=5000".into()];
    o.extend(extra.iter().map(|s| s.to_string()));
    RunConfig::with_overrides(&o).unwrap()
}

#[test]
fn sampling_ignores_thread_count() {
    let dir = scratch("threads");
    let cfg = config(&dir, &["network.phi=0.8"]);
    let files: Vec<Vec<u8>> = [1, 2, 5]
        .iter()
        .map(|&n| {
            let path = dir.join(format!("events-{n}.csv"));
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
            pool.install(|| cmd_sample(&cfg, Some(&path))).unwrap();
            std::fs::read(&path).unwrap()
        })
        .collect();
    assert!(files.windows(2).all(|w| w[0] == w[1]));
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let a = pool.install(|| cmd_protocol(&config(&dir, &["protocol.batches=50000"]))).unwrap();
    let b = cmd_protocol(&config(&dir, &["protocol.batches=50000"])).unwrap();
    assert_eq!(a.report, b.report);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn analyze_refuses_mismatched_hashes_unless_forced() {
    let dir = scratch("hash");
    let a = config(&dir, &["sampler.seed=1"]);
    let b = config(&dir, &["sampler.seed=2"]);
    let ea = dir.join("a.csv");
    let eb = dir.join("b.csv");
    cmd_sample(&a, Some(&ea)).unwrap();
    cmd_sample(&b, Some(&eb)).unwrap();
    let err = cmd_analyze(&a, &ea, &eb, false).unwrap_err();
    assert!(matches!(err, Error::HashMismatch { .. }), "{err}");
    let out = cmd_analyze(&a, &ea, &eb, true).unwrap();
    assert!(out.report.contains("fidelity"));
    assert!(dir.join("report.toml").exists() && dir.join("report.kv").exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn binary_reports_errors_with_kind_and_exit_code() {
    let dir = scratch("bin");
    let bad = dir.join("bad.csv");
    std::fs::write(&bad, "# tr-boson events v1\n# config_hash = none\nevent_id,batch_id,port1,t1_ns,port2,t2_ns,port3,t3_ns,flags\n0,0,1,x,2,0,3,0,0\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_trbs"))
        .args(["analyze", "--events"])
        .arg(&bad)
        .arg("--theory")
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("kind=parse") && stderr.contains("bad.csv:4"), "{stderr}");

    let out = Command::new(env!("CARGO_BIN_EXE_trbs")).args(["--set", "schema_versio=1", "network"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = Command::new(env!("CARGO_BIN_EXE_trbs")).args(["network"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("anchors = pass"));
    std::fs::remove_dir_all(&dir).ok();
}
