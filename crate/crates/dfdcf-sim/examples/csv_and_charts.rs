//! Produce the on-disk artifacts programmatically — per-run CSV time
//! series, summary table, manifest — then render SVG charts from the CSV.
//! This mirrors what `dfdcf-sim run` and `dfdcf-sim report` do.
//!
//!     cargo run --release --example csv_and_charts

use dfdcf_sim::cli::run_one;
use dfdcf_sim::engine::{Dur, SimTime};
use dfdcf_sim::mac::AccessPolicy;
use dfdcf_sim::report::render_timeseries_charts;
use dfdcf_sim::scenario::Scenario;

fn main() {
    // shorten the builtin scenario so the example finishes quickly
    let mut scenario = Scenario::builtin("udp3").expect("builtin scenario");
    for (i, flow) in scenario.flows.iter_mut().enumerate() {
        flow.start = SimTime::from_secs(i as u64);
    }
    scenario.duration = Dur::from_secs(12);

    let out = std::env::temp_dir().join("dfdcf-sim-example");
    let summaries = run_one(&scenario, AccessPolicy::DfDcf, 1, &out).expect("run succeeds");
    println!("wrote run artifacts to {}", out.display());
    for file in ["timeseries.csv", "summary.csv", "manifest.json"] {
        let len = std::fs::metadata(out.join(file)).unwrap().len();
        println!("  {file:<16} {len:>8} bytes");
    }
    println!("  {} summary rows", summaries.len());

    let charts = out.join("charts");
    let written = render_timeseries_charts(&out.join("timeseries.csv"), &charts).expect("charts render");
    println!("\nrendered {} charts under {}", written.len(), charts.display());
    for name in &written {
        println!("  {name}");
    }
}
