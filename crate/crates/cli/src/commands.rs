//! The four verbs. Every emitted file starts with a metadata block carrying
//! the config hash and module versions, and contains nothing time- or
//! locale-dependent.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use opuc_core::steklov::sup_phi;
use opuc_core::verify::{self, Criteria, SuiteReport};
use opuc_core::{
    build_scheme, extract_fh, l4_main_term, steklov_weight, Extraction, FHWeightSpec, GrowthRow,
    Precision, SteklovScheme,
};
use serde::{Deserialize, Serialize};

use crate::cache::{cache_key, code_version, write_atomic, Cache};
use crate::config::{format_epsilon, RunConfig};
use crate::{stage, CliError, Outcome, Suite, What};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub command: String,
    pub config_hash: String,
    pub code_version: String,
    pub modules: BTreeMap<String, String>,
}

impl Meta {
    pub fn new<T: Serialize>(command: &str, params: &T) -> Self {
        let mut modules = BTreeMap::new();
        modules.insert("opuc-core".to_string(), opuc_core::VERSION.to_string());
        modules.insert("opuc-cli".to_string(), env!("CARGO_PKG_VERSION").to_string());
        Meta { command: command.into(), config_hash: cache_key(command, params), code_version: code_version(), modules }
    }

    /// `# key=value` lines for CSV files.
    pub fn csv_lines(&self) -> Vec<(String, String)> {
        let mut v = vec![
            ("command".to_string(), self.command.clone()),
            ("config_hash".to_string(), self.config_hash.clone()),
            ("code_version".to_string(), self.code_version.clone()),
        ];
        v.extend(self.modules.iter().map(|(k, ver)| (format!("module.{k}"), ver.clone())));
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractFile {
    pub meta: Meta,
    pub extraction: Extraction,
}

#[derive(Debug, Clone, Copy, Serialize)]
struct ExtractParams {
    epsilon: f64,
    n: usize,
    precision: Precision,
}

pub fn extract_file_name(epsilon: f64, n: usize) -> String {
    format!("fh_gamma_eps{}_N{n}.json", format_epsilon(epsilon))
}

pub fn weight_file_name(epsilon: f64, n: usize) -> String {
    format!("steklov_weight_eps{}_n{n}.csv", format_epsilon(epsilon))
}

pub fn scheme_file_name(epsilon: f64, n: usize) -> String {
    format!("steklov_scheme_eps{}_n{n}.json", format_epsilon(epsilon))
}

pub fn construct_report_name(epsilon: f64, n: usize) -> String {
    format!("steklov_report_eps{}_n{n}.json", format_epsilon(epsilon))
}

pub fn verify_report_name(suite: &str) -> String {
    format!("verify_{suite}.json")
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn cache_key_for(p: &ExtractParams) -> String {
    cache_key("extract", p)
}

/// Cached extraction for `(epsilon, n, precision)`; computes and stores it on
/// a miss. Reports the cache outcome on stderr.
pub fn load_or_extract(cfg: &RunConfig, epsilon: f64, n: usize) -> Result<Extraction, CliError> {
    let params = ExtractParams { epsilon, n, precision: cfg.precision };
    let cache = Cache::locate(&cfg.out_dir);
    let key = cache_key_for(&params);
    if let Some(ex) = cache.get::<Extraction>(&key) {
        eprintln!("cache hit: extract eps={} N={n} ({})", format_epsilon(epsilon), &key[..12]);
        return Ok(ex);
    }
    eprintln!("cache miss: extracting eps={} N={n}", format_epsilon(epsilon));
    let spec = stage("configure weight", FHWeightSpec::new(epsilon))?;
    let ex = stage("extract", extract_fh(&spec, n, cfg.precision))?;
    cache.put(&key, &ex)?;
    Ok(ex)
}

/// Writes `fh_gamma_eps<eps>_N<N>.json`.
pub fn cmd_extract(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let n = cfg.n_or(512);
    let ex = load_or_extract(cfg, cfg.epsilon, n)?;
    let params = ExtractParams { epsilon: cfg.epsilon, n, precision: cfg.precision };
    let file = ExtractFile { meta: Meta::new("extract", &params), extraction: ex };
    let path = cfg.out_dir.join(extract_file_name(cfg.epsilon, n));
    write_atomic(&path, &to_json(&file))?;
    println!("wrote {}", path.display());
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructReport {
    pub epsilon: f64,
    pub n: usize,
    pub m: usize,
    pub integral: f64,
    /// `min 2 pi w~`; positive certifies membership in the Steklov class.
    pub steklov_min: f64,
    pub steklov_certified: bool,
    pub sup_phi: f64,
    pub ratio_log: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeFile {
    pub meta: Meta,
    pub scheme: SteklovScheme,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructFile {
    pub meta: Meta,
    pub report: ConstructReport,
}

#[derive(Debug, Clone, Copy, Serialize)]
struct ConstructParams {
    epsilon: f64,
    n: usize,
    m: usize,
    precision: Precision,
}

/// Weight CSV, scheme JSON and report for block size `n`.
pub fn cmd_construct(cfg: &RunConfig) -> Result<[PathBuf; 3], CliError> {
    let n = cfg.n_or(16);
    let m = opuc_core::steklov::suite_grid(n, cfg.m);
    let alpha = load_or_extract(cfg, cfg.epsilon, n)?.scheme;
    let scheme = stage("build_scheme", build_scheme(&alpha, n))?.with_epsilon(cfg.epsilon);
    let w = stage("steklov_weight", steklov_weight(&scheme, &alpha, m))?;
    let sup = stage("sup_phi", sup_phi(&scheme, m))?;
    let min = w.values().iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
    let steklov_min = 2.0 * std::f64::consts::PI * min;
    let report = ConstructReport {
        epsilon: cfg.epsilon,
        n,
        m,
        integral: w.integral().re,
        steklov_min,
        steklov_certified: steklov_min > 0.0,
        sup_phi: sup,
        ratio_log: (n >= 2).then(|| sup / (n as f64).ln()),
    };
    let meta = Meta::new("construct", &ConstructParams { epsilon: cfg.epsilon, n, m, precision: cfg.precision });

    let wpath = cfg.out_dir.join(weight_file_name(cfg.epsilon, n));
    let mut buf = Vec::new();
    let mut lines = meta.csv_lines();
    lines.push(("epsilon".into(), format_epsilon(cfg.epsilon)));
    lines.push(("n".into(), n.to_string()));
    lines.push(("m".into(), m.to_string()));
    w.write_csv(&mut buf, &lines).map_err(|e| CliError::io(&wpath, e))?;
    write_atomic(&wpath, &buf)?;

    let spath = cfg.out_dir.join(scheme_file_name(cfg.epsilon, n));
    write_atomic(&spath, &to_json(&SchemeFile { meta: meta.clone(), scheme }))?;
    let rpath = cfg.out_dir.join(construct_report_name(cfg.epsilon, n));
    write_atomic(&rpath, &to_json(&ConstructFile { meta, report: report.clone() }))?;
    println!(
        "n = {n}, m = {m}: integral {:.16}, steklov_min {:.6} ({}), sup|phi_2n+1| {:.6}",
        report.integral,
        report.steklov_min,
        if report.steklov_certified { "certified" } else { "NOT certified" },
        report.sup_phi
    );
    for p in [&wpath, &spath, &rpath] {
        println!("wrote {}", p.display());
    }
    Ok([wpath, spath, rpath])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyFile {
    pub meta: Meta,
    pub passed: bool,
    pub reports: Vec<SuiteReport>,
}

#[derive(Debug, Clone, Serialize)]
struct VerifyParams<'a> {
    suite: &'a str,
    epsilons: &'a [f64],
    n: Option<usize>,
    n_list: &'a [usize],
    m: Option<usize>,
    precision: Precision,
    seed: u64,
    criteria_version: u32,
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::L4 => "l4",
        Suite::L1 => "l1",
        Suite::Growth => "growth",
        Suite::Identities => "identities",
        Suite::All => "all",
    }
}

fn run_suite(cfg: &RunConfig, suite: Suite, epsilons: &[f64], criteria: &Criteria) -> Result<Vec<SuiteReport>, CliError> {
    match suite {
        Suite::Identities => Ok(vec![stage("identities", verify::identities_suite(cfg.seed, criteria))?]),
        Suite::L4 => {
            let n = cfg.n_or(criteria.l4.n);
            epsilons
                .iter()
                .map(|&eps| {
                    let alpha = load_or_extract(cfg, eps, n)?.scheme;
                    Ok(stage("l4", verify::l4_suite(eps, &alpha, criteria))?.0)
                })
                .collect()
        }
        Suite::Growth => {
            let n_max = cfg.n_list.iter().copied().max().unwrap_or(1).max(criteria.growth.round_trip_n);
            let alpha = load_or_extract(cfg, cfg.epsilon, n_max)?.scheme;
            let m = cfg.m.unwrap_or(criteria.growth.m);
            Ok(vec![stage("growth", verify::growth_suite(cfg.epsilon, &alpha, &cfg.n_list, m, criteria))?.0])
        }
        Suite::L1 => {
            let n_max = cfg.n_list.iter().copied().max().unwrap_or(1);
            let alpha = load_or_extract(cfg, cfg.epsilon, n_max)?.scheme;
            let m = cfg.m.unwrap_or(criteria.l1.m);
            Ok(vec![stage("l1", verify::l1_suite(cfg.epsilon, &alpha, &cfg.n_list, m, criteria))?.0])
        }
        Suite::All => unreachable!("expanded by the caller"),
    }
}

fn write_verify(cfg: &RunConfig, suite: Suite, epsilons: &[f64], reports: Vec<SuiteReport>, criteria: &Criteria) -> Result<bool, CliError> {
    let name = suite_name(suite);
    let params = VerifyParams {
        suite: name,
        epsilons,
        n: cfg.n,
        n_list: &cfg.n_list,
        m: cfg.m,
        precision: cfg.precision,
        seed: cfg.seed,
        criteria_version: criteria.version,
    };
    let passed = reports.iter().all(SuiteReport::passed);
    let file = VerifyFile { meta: Meta::new("verify", &params), passed, reports };
    let path = cfg.out_dir.join(verify_report_name(name));
    write_atomic(&path, &to_json(&file))?;
    println!("wrote {}", path.display());
    Ok(passed)
}

fn print_report(r: &SuiteReport) {
    for c in &r.results {
        println!("{}", c.line());
    }
    for note in &r.notes {
        println!("note: {note}");
    }
}

/// Runs the suite, prints one line per criterion and writes
/// `verify_<suite>.json`. `verify all` also writes each sub-suite file.
/// `epsilons` applies to the l4 suite; the others use `cfg.epsilon`.
pub fn cmd_verify(cfg: &RunConfig, suite: Suite, epsilons: &[f64]) -> Result<Outcome, CliError> {
    let criteria = Criteria::embedded();
    let parts: Vec<Suite> = match suite {
        Suite::All => vec![Suite::Identities, Suite::L4, Suite::Growth, Suite::L1],
        s => vec![s],
    };
    let mut all = Vec::new();
    for s in parts {
        let eps: Vec<f64> = if s == Suite::L4 { epsilons.to_vec() } else { vec![cfg.epsilon] };
        let reports = run_suite(cfg, s, &eps, &criteria)?;
        reports.iter().for_each(print_report);
        if suite == Suite::All {
            write_verify(cfg, s, &eps, reports.clone(), &criteria)?;
        }
        all.extend(reports);
    }
    let passed = write_verify(cfg, suite, epsilons, all, &criteria)?;
    println!("verify {}: {}", suite_name(suite), if passed { "PASS" } else { "FAIL" });
    Ok(if passed { Outcome::Pass } else { Outcome::CriterionFailed })
}

fn read_text(path: &Path, what: &'static str, command: String) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|_| CliError::MissingArtifact { what, path: path.to_path_buf(), command })
}

#[derive(Debug, Clone, Serialize)]
struct ExportParams {
    what: &'static str,
    epsilon: f64,
    n: Option<usize>,
    precision: Precision,
}

/// Writes `<what>_eps<eps>[_n<n>].csv` from upstream artifacts.
pub fn cmd_export(cfg: &RunConfig, what: What) -> Result<PathBuf, CliError> {
    let eps = format_epsilon(cfg.epsilon);
    let mut body = String::new();
    let (name, n) = match what {
        What::GammaVsMain => {
            let n = cfg.n_or(Criteria::embedded().l4.n);
            let key = cache_key_for(&ExtractParams { epsilon: cfg.epsilon, n, precision: cfg.precision });
            let cache = Cache::locate(&cfg.out_dir);
            let ex: Extraction = cache.get(&key).ok_or_else(|| CliError::MissingArtifact {
                what: "cached extraction",
                path: cache.dir().join(format!("{key}.json")),
                command: format!("opuc extract --epsilon {eps} --n {n}"),
            })?;
            body.push_str("j,gamma_re,main_re,residual_abs\n");
            for j in 0..n {
                let g = ex.scheme.get(j);
                let main = l4_main_term(j, cfg.epsilon);
                writeln!(body, "{j},{:.16e},{:.16e},{:.16e}", g.re, main.re, (g - main).norm()).unwrap();
            }
            ("gamma_vs_main", Some(n))
        }
        What::Weight => {
            let n = cfg.n_or(16);
            let path = cfg.out_dir.join(weight_file_name(cfg.epsilon, n));
            let text = read_text(&path, "weight CSV", format!("opuc construct --epsilon {eps} --n {n}"))?;
            let w = stage("read weight", opuc_core::GridFunction::read_csv(text.as_bytes()))?;
            body.push_str("theta,w\n");
            for (k, v) in w.values().iter().enumerate() {
                writeln!(body, "{:.16e},{:.16e}", w.theta(k), v.re).unwrap();
            }
            ("weight", Some(n))
        }
        What::SupnormCurve => {
            let path = cfg.out_dir.join(verify_report_name("growth"));
            let command = format!("opuc verify --suite growth --epsilon {eps}");
            let text = read_text(&path, "growth report", command.clone())?;
            let file: VerifyFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Stage { stage: "read growth report", source: opuc_core::Error::Parse(e.to_string()) })?;
            let report = file
                .reports
                .iter()
                .find(|r| r.suite == "growth" && r.details["epsilon"].as_f64() == Some(cfg.epsilon))
                .ok_or_else(|| CliError::MissingArtifact { what: "growth report at this epsilon", path: path.clone(), command })?;
            let rows: Vec<GrowthRow> = serde_json::from_value(report.details["growth"].clone())
                .map_err(|e| CliError::Stage { stage: "read growth report", source: opuc_core::Error::Parse(e.to_string()) })?;
            body.push_str("n,sup,log_n,ratio\n");
            for r in rows {
                writeln!(body, "{},{:.16e},{:.16e},{:.16e}", r.n, r.sup_phi, r.log_n, r.ratio).unwrap();
            }
            ("supnorm_curve", None)
        }
    };
    let meta = Meta::new("export", &ExportParams { what: name, epsilon: cfg.epsilon, n, precision: cfg.precision });
    let mut out = String::new();
    for (k, v) in meta.csv_lines() {
        writeln!(out, "# {k}={v}").unwrap();
    }
    out.push_str(&body);
    let file = match n {
        Some(n) => format!("{name}_eps{eps}_n{n}.csv"),
        None => format!("{name}_eps{eps}.csv"),
    };
    let path = cfg.out_dir.join(file);
    write_atomic(&path, out.as_bytes())?;
    println!("wrote {}", path.display());
    Ok(path)
}
