//! Shared helpers for integration tests: cached full-length runs and a
//! randomized mini-scenario generator for property checks.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;

use dfdcf_sim::engine::{Dur, SimTime};
use dfdcf_sim::mac::AccessPolicy;
use dfdcf_sim::scenario::{ClassSpec, FlowKind, FlowSpec, Scenario};
use dfdcf_sim::sim::{run_scenario, SimResult};

type Key = (String, &'static str, u64);

fn cache() -> &'static Mutex<HashMap<Key, Arc<SimResult>>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<SimResult>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Full-length builtin run, memoized so criteria sharing a configuration
/// reuse the same result.
pub fn cached_run(scenario: &str, policy: AccessPolicy, seed: u64) -> Arc<SimResult> {
    let key = (scenario.to_string(), policy.label(), seed);
    if let Some(r) = cache().lock().unwrap().get(&key) {
        return Arc::clone(r);
    }
    let sc = Scenario::builtin(scenario).expect("builtin scenario");
    let result = Arc::new(run_scenario(&sc, policy, seed));
    cache().lock().unwrap().insert(key, Arc::clone(&result));
    result
}

pub const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

/// The steady-state evaluation window: all flows active, transients gone.
pub fn steady_window() -> (SimTime, SimTime) {
    (SimTime::from_secs(160), SimTime::from_secs(250))
}

/// A small random-but-valid scenario for invariant checking.
pub fn random_scenario(rng: &mut impl Rng) -> (Scenario, AccessPolicy, u64) {
    let n_classes = rng.gen_range(1..=3usize);
    let mut classes = Vec::new();
    for i in 0..n_classes {
        let lo_slots: u64 = rng.gen_range(2..=8);
        let hi_slots: u64 = lo_slots + rng.gen_range(1..=6);
        classes.push(ClassSpec {
            name: format!("C{i}"),
            temax: Dur::from_ms(rng.gen_range(40..=400)),
            difs_min: Dur::from_us(10 + lo_slots * 20),
            difs_max: Dur::from_us(10 + hi_slots * 20),
        });
    }
    let n_flows = rng.gen_range(1..=4usize);
    let mut flows = Vec::new();
    for i in 0..n_flows {
        let class = format!("C{}", rng.gen_range(0..n_classes));
        let station = rng.gen_range(1..=3u32);
        let kind = if rng.gen_bool(0.6) { FlowKind::Cbr } else { FlowKind::Ftp };
        flows.push(FlowSpec {
            name: format!("f{i}"),
            kind,
            class,
            station,
            start: SimTime::from_ms(rng.gen_range(0..500)),
            stop: None,
            packet_bytes: match kind {
                FlowKind::Cbr => rng.gen_range(200..=2312),
                FlowKind::Ftp => rng.gen_range(300..=1460),
            },
            interval: match kind {
                FlowKind::Cbr => Some(Dur::from_ms(rng.gen_range(5..=50))),
                FlowKind::Ftp => None,
            },
        });
    }
    let mut sc = Scenario::builtin("udp3").expect("template");
    sc.name = "random".to_string();
    sc.classes = classes;
    sc.flows = flows;
    sc.duration = Dur::from_ms(rng.gen_range(1000..=3000));
    sc.validate().expect("generated scenario must validate");
    let policy = match rng.gen_range(0..3) {
        0 => AccessPolicy::Dcf,
        1 => AccessPolicy::DifsDiff,
        _ => AccessPolicy::DfDcf,
    };
    (sc, policy, rng.gen())
}
