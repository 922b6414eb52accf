//! Deterministic discrete-event simulator for 802.11 DCF access policies.
//!
//! Compares three medium-access policies on a shared wireless cell:
//! plain DCF, static per-class DIFS differentiation, and a
//! deadline-driven policy that maps each frame's remaining lifetime to
//! an instantaneous DIFS and drops frames that outlive their deadline.
//!
//! Entry points: [`scenario::Scenario`] describes a run,
//! [`sim::run_scenario`] executes it, [`metrics`] turns the result into
//! CSV, [`report`] renders SVG charts. See the `examples/` directory
//! for end-to-end usage.

pub mod engine;
pub mod policy;
pub mod mac;
pub mod transport;
pub mod metrics;
pub mod scenario;
pub mod sim;
pub mod report;
pub mod cli;

/// Version stamp written into run manifests.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
