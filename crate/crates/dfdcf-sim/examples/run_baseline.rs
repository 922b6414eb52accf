//! Run the three-station CBR scenario under plain DCF and print a
//! per-flow summary for the steady-state window.
//!
//!     cargo run --release --example run_baseline

use dfdcf_sim::engine::SimTime;
use dfdcf_sim::mac::AccessPolicy;
use dfdcf_sim::scenario::Scenario;
use dfdcf_sim::sim::run_scenario;

fn main() {
    let scenario = Scenario::builtin("udp3").expect("builtin scenario");
    let result = run_scenario(&scenario, AccessPolicy::Dcf, 1);

    println!(
        "scenario {} | policy {} | seed 1 | {} events",
        scenario.name,
        result.policy.label(),
        result.events_executed
    );
    assert!(result.audit.clean(), "structural audit must be clean");

    let window = (SimTime::from_secs(160), SimTime::from_secs(250));
    println!("\nsteady-state window [160 s, 250 s):");
    println!(
        "{:<8} {:>8} {:>10} {:>12} {:>12} {:>10}",
        "flow", "sent", "delivered", "delay ms", "tput kb/s", "drops"
    );
    for stats in &result.stats {
        let s = stats.summarize(window);
        println!(
            "{:<8} {:>8} {:>10} {:>12} {:>12} {:>10}",
            s.flow,
            s.sent,
            s.delivered,
            s.mean_delay_ms.map_or("NA".into(), |v| format!("{v:.1}")),
            s.throughput_kbps.map_or("NA".into(), |v| format!("{v:.1}")),
            s.drops.iter().sum::<u64>(),
        );
    }

    // every flow satisfies exact conservation: sent = delivered + drops + in flight
    for stats in &result.stats {
        assert!(stats.conservation_holds(), "conservation for {}", stats.name);
    }
    println!("\nconservation holds for every flow");
}
