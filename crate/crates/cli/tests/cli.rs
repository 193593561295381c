use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use serde_json::Value;
use tempfile::TempDir;

fn opuc(out: &Path, cache: Option<&Path>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_opuc"));
    cmd.arg("--out").arg(out).args(args);
    match cache {
        Some(c) => cmd.env("OPUC_CACHE_DIR", c),
        None => cmd.env_remove("OPUC_CACHE_DIR"),
    };
    cmd.output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn extract_twice_hits_cache_with_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let first = opuc(&out, None, &["extract", "--epsilon", "0.1", "--n", "512"]);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    assert!(stderr(&first).contains("cache miss"));
    let file = out.join("fh_gamma_eps0.1_N512.json");
    let bytes = fs::read(&file).unwrap();

    let second = opuc(&out, None, &["extract", "--epsilon", "0.1", "--n", "512"]);
    assert_eq!(second.status.code(), Some(0));
    assert!(stderr(&second).contains("cache hit"), "{}", stderr(&second));
    assert_eq!(fs::read(&file).unwrap(), bytes);

    let v = read_json(&file);
    assert_eq!(v["extraction"]["n"], 512);
    assert_eq!(v["extraction"]["scheme"]["gamma"].as_array().unwrap().len(), 512);
    assert_eq!(v["extraction"]["provenance"]["source"], "closed-form");
    assert_eq!(v["meta"]["config_hash"].as_str().unwrap().len(), 64);
    assert!(v["meta"]["modules"]["opuc-core"].is_string());
}

#[test]
fn invalid_configs_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    let out = dir.path();
    for args in [
        &["extract", "--epsilon", "0"][..],
        &["extract", "--epsilon", "0.5"],
        &["extract", "--n", "0"],
        &["construct", "--n", "16", "--grid", "1022"],
        &["verify", "--suite", "growth", "--n-list", "16,x"],
        &["verify", "--suite", "bogus"],
    ] {
        let o = opuc(out, None, args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    assert!(stderr(&opuc(out, None, &["extract", "--epsilon", "0"])).contains("(0, 0.3]"));
}

#[test]
fn verify_l4_consumes_cached_extraction() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let cache = dir.path().join("shared-cache");
    let e = opuc(&out, Some(&cache), &["extract", "--epsilon", "0.1", "--n", "1024"]);
    assert_eq!(e.status.code(), Some(0), "{}", stderr(&e));
    assert!(fs::read_dir(&cache).unwrap().count() >= 1);
    assert!(!out.join("cache").exists());

    let v = opuc(&out, Some(&cache), &["verify", "--suite", "l4", "--epsilon", "0.1"]);
    assert!(stderr(&v).contains("cache hit"), "{}", stderr(&v));
    assert!(!stderr(&v).contains("cache miss"));
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
    let report = read_json(&out.join("verify_l4.json"));
    assert_eq!(report["passed"], true);
    assert_eq!(report["reports"][0]["results"].as_array().unwrap().len(), 4);
}

#[test]
fn construct_emits_three_files_deterministically() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let names = [
        "steklov_weight_eps0.1_n16.csv",
        "steklov_scheme_eps0.1_n16.json",
        "steklov_report_eps0.1_n16.json",
    ];
    let o = opuc(&out, None, &["construct", "--epsilon", "0.1", "--n", "16"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let first: Vec<Vec<u8>> = names.iter().map(|n| fs::read(out.join(n)).unwrap()).collect();

    let report = read_json(&out.join(names[2]));
    assert!(report["report"]["steklov_min"].as_f64().unwrap() > 0.0);
    assert_eq!(report["report"]["steklov_certified"], true);
    assert!((report["report"]["integral"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    let scheme = read_json(&out.join(names[1]));
    assert_eq!(scheme["scheme"]["gamma"]["gamma"].as_array().unwrap().len(), 49);
    let csv = String::from_utf8(first[0].clone()).unwrap();
    assert!(csv.starts_with("# command=construct\n# config_hash="));
    assert!(csv.contains("\ntheta,re,im\n"));

    let again = opuc(&out, None, &["construct", "--epsilon", "0.1", "--n", "16"]);
    assert_eq!(again.status.code(), Some(0));
    for (n, bytes) in names.iter().zip(&first) {
        assert_eq!(&fs::read(out.join(n)).unwrap(), bytes, "{n}");
    }
}

#[test]
fn verify_identities_smoke_run() {
    let dir = TempDir::new().unwrap();
    let t = Instant::now();
    let o = opuc(dir.path(), None, &["verify", "--suite", "identities", "--seed", "42"]);
    assert!(t.elapsed().as_secs_f64() < 10.0);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let lines: Vec<&str> = stdout(&o).lines().filter(|l| l.starts_with("PASS ") || l.starts_with("FAIL ")).map(|_| "").collect();
    assert_eq!(lines.len(), 17);
    let r = read_json(&dir.path().join("verify_identities.json"));
    assert_eq!(r["passed"], true);
    assert_eq!(r["reports"][0]["criteria_version"], 1);
}

#[test]
fn verify_growth_emits_ratio_table_and_reports_the_trend_failure() {
    let dir = TempDir::new().unwrap();
    let o = opuc(dir.path(), None, &["verify", "--suite", "growth", "--epsilon", "0.1", "--n-list", "64,128,256,512"]);
    // The ratio sup|phi_2n+1| / ln n decreases over this range; that
    // criterion fails and the exit status says so. Everything else passes.
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let r = read_json(&dir.path().join("verify_growth.json"));
    let results = r["reports"][0]["results"].as_array().unwrap();
    let failed: Vec<&str> = results.iter().filter(|c| c["passed"] == false).map(|c| c["id"].as_str().unwrap()).collect();
    assert_eq!(failed, ["growth[eps=0.1].ratio_trend"]);
    let rows = r["reports"][0]["details"]["growth"].as_array().unwrap();
    assert_eq!(rows.iter().map(|x| x["n"].as_u64().unwrap()).collect::<Vec<_>>(), [64, 128, 256, 512]);
    assert!(rows.iter().all(|x| x["ratio"].as_f64().unwrap() > 0.0));

    let e = opuc(dir.path(), None, &["export", "--what", "supnorm_curve", "--epsilon", "0.1"]);
    assert_eq!(e.status.code(), Some(0), "{}", stderr(&e));
    let csv = fs::read_to_string(dir.path().join("supnorm_curve_eps0.1.csv")).unwrap();
    let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "n,sup,log_n,ratio");
    assert_eq!(body.len(), 5);
}

#[test]
fn verify_all_aggregates_and_fails_if_a_suite_fails() {
    let dir = TempDir::new().unwrap();
    let o = opuc(dir.path(), None, &["verify", "--suite", "all"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let all = read_json(&dir.path().join("verify_all.json"));
    assert_eq!(all["passed"], false);
    let suites: Vec<&str> = all["reports"].as_array().unwrap().iter().map(|r| r["suite"].as_str().unwrap()).collect();
    assert_eq!(suites, ["identities", "l4", "l4", "l4", "growth", "l1"]);
    for s in ["identities", "l1"] {
        assert_eq!(read_json(&dir.path().join(format!("verify_{s}.json")))["passed"], true, "{s}");
    }
    assert!(stdout(&o).lines().last().unwrap().ends_with("FAIL"));
}

#[test]
fn exports_name_their_producer_and_follow_schemas() {
    let dir = TempDir::new().unwrap();
    let out = dir.path();
    for (what, producer) in [
        ("gamma_vs_main", "opuc extract"),
        ("weight", "opuc construct"),
        ("supnorm_curve", "opuc verify --suite growth"),
    ] {
        let o = opuc(out, None, &["export", "--what", what, "--n", "32"]);
        assert_eq!(o.status.code(), Some(2));
        assert!(stderr(&o).contains(producer), "{what}: {}", stderr(&o));
    }

    assert_eq!(opuc(out, None, &["extract", "--n", "32"]).status.code(), Some(0));
    assert_eq!(opuc(out, None, &["construct", "--n", "32"]).status.code(), Some(0));
    assert_eq!(opuc(out, None, &["export", "--what", "gamma_vs_main", "--n", "32"]).status.code(), Some(0));
    assert_eq!(opuc(out, None, &["export", "--what", "weight", "--n", "32"]).status.code(), Some(0));

    let body = |name: &str| -> Vec<String> {
        fs::read_to_string(out.join(name)).unwrap().lines().filter(|l| !l.starts_with('#')).map(String::from).collect()
    };
    let g = body("gamma_vs_main_eps0.1_n32.csv");
    assert_eq!(g[0], "j,gamma_re,main_re,residual_abs");
    assert_eq!(g.len(), 33);
    let w = body("weight_eps0.1_n32.csv");
    assert_eq!(w[0], "theta,w");
    assert_eq!(w.len(), 1 + opuc_core::steklov::suite_grid(32, None));
}

#[test]
fn lock_file_blocks_a_second_command() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join(".opuc.lock"), "1\n").unwrap();
    let o = opuc(dir.path(), None, &["extract", "--n", "8"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("another command"));
    fs::remove_file(dir.path().join(".opuc.lock")).unwrap();
    assert_eq!(opuc(dir.path(), None, &["extract", "--n", "8"]).status.code(), Some(0));
    assert!(!dir.path().join(".opuc.lock").exists());
}

#[test]
fn high_precision_is_cached_separately_and_agrees() {
    let dir = TempDir::new().unwrap();
    let out = dir.path();
    assert_eq!(opuc(out, None, &["extract", "--n", "64"]).status.code(), Some(0));
    let std_v = read_json(&out.join("fh_gamma_eps0.1_N64.json"));
    let hp = opuc(out, None, &["--precision", "high", "extract", "--n", "64"]);
    assert_eq!(hp.status.code(), Some(0), "{}", stderr(&hp));
    assert!(stderr(&hp).contains("cache miss"));
    let hp_v = read_json(&out.join("fh_gamma_eps0.1_N64.json"));
    assert_eq!(hp_v["extraction"]["provenance"]["precision"], "high");
    assert_ne!(std_v["meta"]["config_hash"], hp_v["meta"]["config_hash"]);
    let a = std_v["extraction"]["scheme"]["gamma"].as_array().unwrap();
    let b = hp_v["extraction"]["scheme"]["gamma"].as_array().unwrap();
    for (x, y) in a.iter().zip(b) {
        assert!((x["re"].as_f64().unwrap() - y["re"].as_f64().unwrap()).abs() < 1e-13);
    }
}
