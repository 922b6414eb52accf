//! Command-line front end. The library is the primary interface; this
//! stays a thin layer that resolves scenarios, calls [`crate::sim`], and
//! writes artifacts.
//!
//! Exit codes: 0 success, 1 validation/usage failure, 2 I/O failure.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::mac::AccessPolicy;
use crate::metrics::{self, FlowSummary, SUMMARY_HEADER};
use crate::report;
use crate::scenario::{parse_duration, Scenario, BUILTIN_NAMES};
use crate::sim;

#[derive(Parser)]
#[command(name = "dfdcf-sim", version, about = "Deterministic 802.11 access-policy simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario under one access method and write CSV artifacts.
    Run {
        /// Builtin scenario name or path to a config file
        #[arg(long)]
        scenario: String,
        /// Access method: dcf, difs, or dfdcf
        #[arg(long)]
        method: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output directory (created if missing)
        #[arg(long)]
        out: PathBuf,
        /// Override the scenario duration, e.g. "30s" or "500ms"
        #[arg(long)]
        duration: Option<String>,
    },
    /// Run the same scenario+seed under several methods and join the summaries.
    Compare {
        #[arg(long)]
        scenario: String,
        /// Comma-separated methods, e.g. "difs,dfdcf" (at least two)
        #[arg(long)]
        methods: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        duration: Option<String>,
    },
    /// Independent runs over several seeds, one subdirectory per seed.
    Sweep {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        method: String,
        /// Comma-separated seeds, e.g. "1,2,3" (duplicates rejected)
        #[arg(long)]
        seeds: String,
        #[arg(long)]
        out: PathBuf,
        /// Parallel workers; defaults to available parallelism
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        duration: Option<String>,
    },
    /// Render timeseries CSVs into SVG line charts.
    Report {
        /// One or more timeseries CSV files
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// List builtin scenarios.
    ListScenarios,
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
        }
    }
    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Io(m) => m,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Run { scenario, method, seed, out, duration } => {
            let sc = resolve_scenario(&scenario, duration.as_deref())?;
            let method = parse_method(&method)?;
            run_one(&sc, method, seed, &out)?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Cmd::Compare { scenario, methods, seed, out, duration } => {
            let sc = resolve_scenario(&scenario, duration.as_deref())?;
            let methods = parse_methods(&methods)?;
            compare(&sc, &methods, seed, &out)
        }
        Cmd::Sweep { scenario, method, seeds, out, jobs, duration } => {
            let sc = resolve_scenario(&scenario, duration.as_deref())?;
            let method = parse_method(&method)?;
            let seeds = parse_seeds(&seeds)?;
            sweep(&sc, method, &seeds, &out, jobs)
        }
        Cmd::Report { input, out } => report_cmd(&input, &out),
        Cmd::ListScenarios => {
            for name in BUILTIN_NAMES {
                let sc = Scenario::builtin(name).expect("builtin");
                let flows: Vec<&str> = sc.flows.iter().map(|f| f.name.as_str()).collect();
                println!("{name}: {} stations, flows {}", sc.station_numbers().len(), flows.join(","));
            }
            Ok(())
        }
    }
}

fn parse_method(s: &str) -> Result<AccessPolicy, CliError> {
    AccessPolicy::from_str(s).map_err(CliError::Validation)
}

fn parse_methods(s: &str) -> Result<Vec<AccessPolicy>, CliError> {
    let methods: Vec<AccessPolicy> = s
        .split(',')
        .map(|m| parse_method(m.trim()))
        .collect::<Result<_, _>>()?;
    if methods.len() < 2 {
        return Err(CliError::Validation("compare needs at least two methods".into()));
    }
    let uniq: BTreeSet<&str> = methods.iter().map(|m| m.label()).collect();
    if uniq.len() != methods.len() {
        return Err(CliError::Validation("duplicate method listed".into()));
    }
    Ok(methods)
}

fn parse_seeds(s: &str) -> Result<Vec<u64>, CliError> {
    let mut seen = BTreeSet::new();
    let mut seeds = Vec::new();
    for part in s.split(',') {
        let seed: u64 = part
            .trim()
            .parse()
            .map_err(|e| CliError::Validation(format!("bad seed `{part}`: {e}")))?;
        if !seen.insert(seed) {
            return Err(CliError::Validation(format!("duplicate seed {seed}")));
        }
        seeds.push(seed);
    }
    if seeds.is_empty() {
        return Err(CliError::Validation("sweep needs at least one seed".into()));
    }
    Ok(seeds)
}

/// Resolve a builtin name or config-file path, then apply a duration override.
fn resolve_scenario(name_or_path: &str, duration: Option<&str>) -> Result<Scenario, CliError> {
    let mut sc = if BUILTIN_NAMES.contains(&name_or_path) {
        Scenario::builtin(name_or_path).expect("builtin")
    } else {
        let path = Path::new(name_or_path);
        if !path.exists() {
            return Err(CliError::Validation(format!(
                "unknown scenario `{name_or_path}` (builtins: {})",
                BUILTIN_NAMES.join(", ")
            )));
        }
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Scenario::parse(&text).map_err(|e| CliError::Validation(e.to_string()))?
    };
    if let Some(d) = duration {
        sc.duration = parse_duration(d).map_err(|e| CliError::Validation(format!("bad --duration: {e}")))?;
    }
    sc.validate().map_err(|e| CliError::Validation(e.to_string()))?;
    Ok(sc)
}

/// Everything needed to reproduce a run, stamped into each output dir.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct Manifest {
    pub tool_version: String,
    pub scenario: String,
    pub scenario_sha256: String,
    pub method: String,
    pub seed: u64,
    pub duration_ns: u64,
    /// Canonical scenario text; re-runnable without access to the
    /// original input file.
    pub scenario_config: String,
}

impl Manifest {
    fn new(sc: &Scenario, method: AccessPolicy, seed: u64) -> Manifest {
        let config = sc.to_config_string();
        let mut hasher = Sha256::new();
        hasher.update(config.as_bytes());
        Manifest {
            tool_version: crate::TOOL_VERSION.to_string(),
            scenario: sc.name.clone(),
            scenario_sha256: format!("{:x}", hasher.finalize()),
            method: method.label().to_string(),
            seed,
            duration_ns: sc.duration.as_ns(),
            scenario_config: config,
        }
    }
}

/// Run one (scenario, method, seed) and write timeseries.csv,
/// summary.csv, and manifest.json into `out`.
pub fn run_one(sc: &Scenario, method: AccessPolicy, seed: u64, out: &Path) -> Result<Vec<FlowSummary>, CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let result = sim::run_scenario(sc, method, seed);
    metrics::write_timeseries_csv(&result.stats, &out.join("timeseries.csv"))?;
    let window = (crate::engine::SimTime::ZERO, crate::engine::SimTime::ZERO + sc.duration);
    let summaries: Vec<FlowSummary> = result.stats.iter().map(|fs| fs.summarize(window)).collect();
    fs::write(out.join("summary.csv"), metrics::summary_csv(&summaries))?;
    let manifest = Manifest::new(sc, method, seed);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(out.join("manifest.json"), json + "\n")?;
    Ok(summaries)
}

fn compare(sc: &Scenario, methods: &[AccessPolicy], seed: u64, out: &Path) -> Result<(), CliError> {
    let mut joined = String::from("method,");
    joined.push_str(SUMMARY_HEADER);
    joined.push('\n');
    for method in methods {
        let dir = out.join(method.label());
        let summaries = run_one(sc, *method, seed, &dir)?;
        for s in &summaries {
            joined.push_str(method.label());
            joined.push(',');
            joined.push_str(&s.csv_row());
            joined.push('\n');
        }
    }
    fs::create_dir_all(out)?;
    fs::write(out.join("compare.csv"), joined)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn sweep(sc: &Scenario, method: AccessPolicy, seeds: &[u64], out: &Path, jobs: Option<usize>) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let jobs = jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
        .max(1);
    let queue: Mutex<Vec<u64>> = Mutex::new(seeds.to_vec());
    let failures: Mutex<Vec<String>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(seeds.len()) {
            scope.spawn(|| loop {
                let seed = match queue.lock().unwrap().pop() {
                    Some(s) => s,
                    None => break,
                };
                let dir = out.join(format!("seed-{seed}"));
                if let Err(e) = run_one(sc, method, seed, &dir) {
                    failures.lock().unwrap().push(format!("seed {seed}: {}", e.message()));
                }
            });
        }
    });
    let failures = failures.into_inner().unwrap();
    if failures.is_empty() {
        println!("wrote {} ({} seeds)", out.display(), seeds.len());
        Ok(())
    } else {
        Err(CliError::Io(failures.join("; ")))
    }
}

fn report_cmd(inputs: &[PathBuf], out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out)?;
    let mut per_input: Vec<(String, std::collections::BTreeMap<String, PathBuf>)> = Vec::new();
    for input in inputs {
        let stem = input
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("input")
            .to_string();
        // when rendering a run directory's timeseries.csv, label the
        // panel by the directory (usually the method name)
        let label = if stem == "timeseries" {
            input
                .parent()
                .and_then(|p| p.file_name())
                .and_then(|s| s.to_str())
                .unwrap_or(&stem)
                .to_string()
        } else {
            stem
        };
        let dir = if inputs.len() > 1 { out.join(&label) } else { out.to_path_buf() };
        let written = report::render_timeseries_charts(input, &dir).map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => CliError::Validation(e.to_string()),
            _ => CliError::Io(e.to_string()),
        })?;
        let mut by_metric = std::collections::BTreeMap::new();
        for name in written {
            let metric = name.trim_end_matches(".svg").to_string();
            by_metric.insert(metric, dir.join(&name));
        }
        per_input.push((label, by_metric));
    }
    // side-by-side panels for paired inputs, one per shared metric
    if per_input.len() > 1 {
        let shared: Vec<String> = per_input[0]
            .1
            .keys()
            .filter(|m| per_input.iter().all(|(_, map)| map.contains_key(*m)))
            .cloned()
            .collect();
        for metric in shared {
            let panels: Vec<(String, String)> = per_input
                .iter()
                .map(|(label, map)| {
                    let svg = fs::read_to_string(&map[&metric])?;
                    Ok::<_, std::io::Error>((label.clone(), svg))
                })
                .collect::<Result<_, _>>()?;
            let combined = combine_panels(&panels);
            fs::write(out.join(format!("{metric}-panels.svg")), combined)?;
        }
    }
    println!("wrote {}", out.display());
    Ok(())
}

/// Place chart SVGs side by side with (a)/(b)/... panel captions.
fn combine_panels(panels: &[(String, String)]) -> String {
    let w = 720.0;
    let h = 360.0;
    let caption = 24.0;
    let total_w = w * panels.len() as f64;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{total_w}\" height=\"{}\" font-family=\"sans-serif\" font-size=\"13\">\n",
        h + caption
    );
    for (i, (label, svg)) in panels.iter().enumerate() {
        let x = w * i as f64;
        out.push_str(&format!("<svg x=\"{x}\" y=\"0\" width=\"{w}\" height=\"{h}\">\n"));
        // strip the outer <svg ...> wrapper of the child document
        let inner = svg
            .splitn(2, '>')
            .nth(1)
            .unwrap_or("")
            .trim_end()
            .trim_end_matches("</svg>");
        out.push_str(inner);
        out.push_str("\n</svg>\n");
        let letter = (b'a' + (i % 26) as u8) as char;
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">({letter}) {label}</text>\n",
            x + w / 2.0,
            h + caption - 8.0
        ));
    }
    out.push_str("</svg>\n");
    out
}
