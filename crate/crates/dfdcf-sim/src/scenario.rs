//! Scenario definition and the plain-text configuration format, plus the
//! four built-in scenarios (three stations around an access point, a
//! wired sink, staggered flow starts at 50/100/150 s, 250 s horizon).
//!
//! Configuration is sectioned key-value text:
//!
//! ```text
//! [run]                 # name, duration, seed
//! [phy]                 # sifs, slot_time, data_rate_bps, plcp_overhead, ...
//! [mac]                 # cw_min, cw_max, retry_limit, queue_capacity
//! [wired]               # rate_bps, delay, queue_capacity
//! [class.<ID>]          # temax, difs_min, difs_max
//! [flow.<id>]           # kind, class, station, start, [stop,] packet_bytes, [interval]
//! ```
//!
//! Durations accept the suffixes ns, us, ms and s. Every DIFS value must
//! be SIFS plus an integral number of slots.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::engine::{Dur, SimTime};
use crate::mac::MacConfig;
use crate::policy::{nb_slots_from_difs, PhyParams, PolicyError};

pub const BUILTIN_NAMES: [&str; 4] = ["udp3", "tcp3-naive", "tcp3", "mixed"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowKind {
    Cbr,
    Ftp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSpec {
    pub name: String,
    pub temax: Dur,
    pub difs_min: Dur,
    pub difs_max: Dur,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowSpec {
    pub name: String,
    pub kind: FlowKind,
    pub class: String,
    pub station: u32,
    pub start: SimTime,
    pub stop: Option<SimTime>,
    pub packet_bytes: u32,
    pub interval: Option<Dur>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WiredParams {
    pub rate_bps: u64,
    pub delay: Dur,
    pub queue_capacity: usize,
}

impl Default for WiredParams {
    fn default() -> Self {
        WiredParams {
            rate_bps: 10_000_000,
            delay: Dur::from_ms(2),
            queue_capacity: 50,
        }
    }
}

/// A fully validated simulation setup. The access method is chosen at
/// run time, not stored here, so one scenario file serves all three
/// methods.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub phy: PhyParams,
    pub mac: MacConfig,
    pub classes: Vec<ClassSpec>,
    pub flows: Vec<FlowSpec>,
    pub wired: WiredParams,
    pub duration: Dur,
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown key `{key}` in section [{section}]")]
    UnknownKey { line: usize, section: String, key: String },
    #[error("section [{section}]: missing required field `{field}`")]
    MissingField { section: String, field: String },
    #[error("flow `{flow}` references undefined class `{class}`")]
    DanglingClass { flow: String, class: String },
    #[error("duplicate {what} `{name}`")]
    Duplicate { what: &'static str, name: String },
    #[error("scenario has no flows")]
    NoFlows,
    #[error("flow `{flow}`: {msg}")]
    BadFlow { flow: String, msg: String },
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("unknown scenario `{0}` (built-ins: udp3, tcp3-naive, tcp3, mixed)")]
    UnknownBuiltin(String),
}

impl Scenario {
    /// The exact paper configurations, by name.
    pub fn builtin(name: &str) -> Result<Scenario, ConfigError> {
        let c = |name: &str, temax_ms: u64, lo_us: u64, hi_us: u64| ClassSpec {
            name: name.to_string(),
            temax: Dur::from_ms(temax_ms),
            difs_min: Dur::from_us(lo_us),
            difs_max: Dur::from_us(hi_us),
        };
        let cbr = |name: &str, class: &str, station: u32, start_s: u64| FlowSpec {
            name: name.to_string(),
            kind: FlowKind::Cbr,
            class: class.to_string(),
            station,
            start: SimTime::from_secs(start_s),
            stop: None,
            packet_bytes: 2312,
            interval: Some(Dur::from_ms(20)),
        };
        let ftp = |name: &str, class: &str, station: u32, start_s: u64| FlowSpec {
            name: name.to_string(),
            kind: FlowKind::Ftp,
            class: class.to_string(),
            station,
            start: SimTime::from_secs(start_s),
            stop: None,
            packet_bytes: 1100,
            interval: None,
        };
        let (classes, flows) = match name {
            "udp3" => (
                vec![c("CBR1", 150, 50, 130), c("CBR2", 250, 130, 210), c("CBR3", 350, 210, 290)],
                vec![cbr("cbr1", "CBR1", 1, 50), cbr("cbr2", "CBR2", 2, 100), cbr("cbr3", "CBR3", 3, 150)],
            ),
            "tcp3-naive" => (
                vec![c("FTP1", 300, 50, 130), c("FTP2", 500, 130, 210), c("FTP3", 700, 210, 290)],
                vec![ftp("ftp1", "FTP1", 1, 50), ftp("ftp2", "FTP2", 2, 100), ftp("ftp3", "FTP3", 3, 150)],
            ),
            "tcp3" => (
                // equal deadline budget for every class; priority comes from
                // the DIFS ranges alone (class row names follow the source
                // table verbatim)
                vec![c("FTP1", 375, 50, 130), c("FTP2", 375, 130, 210), c("CBR3", 375, 210, 290)],
                vec![ftp("ftp1", "FTP1", 1, 50), ftp("ftp2", "FTP2", 2, 100), ftp("ftp3", "CBR3", 3, 150)],
            ),
            "mixed" => (
                vec![c("CBR3", 150, 50, 130), c("CBR2", 250, 130, 210), c("FTP1", 1000, 210, 290)],
                vec![ftp("ftp1", "FTP1", 1, 50), cbr("cbr2", "CBR2", 2, 100), cbr("cbr3", "CBR3", 3, 150)],
            ),
            other => return Err(ConfigError::UnknownBuiltin(other.to_string())),
        };
        let s = Scenario {
            name: name.to_string(),
            phy: PhyParams::dsss_1mbps(),
            mac: MacConfig::default(),
            classes,
            flows,
            wired: WiredParams::default(),
            duration: Dur::from_secs(250),
            seed: 1,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.phy.validate()?;
        if self.flows.is_empty() {
            return Err(ConfigError::NoFlows);
        }
        let mut class_names = BTreeSet::new();
        for class in &self.classes {
            if !class_names.insert(class.name.as_str()) {
                return Err(ConfigError::Duplicate { what: "class", name: class.name.clone() });
            }
            // surfaces non-integral slot counts and reversed bounds
            crate::policy::ServiceClass::new(
                crate::policy::ClassId(0),
                &class.name,
                class.temax,
                class.difs_min,
                class.difs_max,
                &self.phy,
            )?;
        }
        let mut flow_names = BTreeSet::new();
        for flow in &self.flows {
            if !flow_names.insert(flow.name.as_str()) {
                return Err(ConfigError::Duplicate { what: "flow", name: flow.name.clone() });
            }
            if !class_names.contains(flow.class.as_str()) {
                return Err(ConfigError::DanglingClass {
                    flow: flow.name.clone(),
                    class: flow.class.clone(),
                });
            }
            if flow.station == 0 {
                return Err(ConfigError::BadFlow {
                    flow: flow.name.clone(),
                    msg: "station numbers start at 1".to_string(),
                });
            }
            if flow.kind == FlowKind::Cbr && flow.interval.is_none() {
                return Err(ConfigError::BadFlow {
                    flow: flow.name.clone(),
                    msg: "cbr flows need an interval".to_string(),
                });
            }
            if flow.packet_bytes == 0 {
                return Err(ConfigError::BadFlow {
                    flow: flow.name.clone(),
                    msg: "packet_bytes must be positive".to_string(),
                });
            }
            let stop = flow.stop.unwrap_or(SimTime::ZERO + self.duration);
            if flow.start >= stop {
                return Err(ConfigError::BadFlow {
                    flow: flow.name.clone(),
                    msg: "start must precede stop".to_string(),
                });
            }
        }
        Ok(())
    }

    /// Distinct wireless station numbers, ascending.
    pub fn station_numbers(&self) -> Vec<u32> {
        let set: BTreeSet<u32> = self.flows.iter().map(|f| f.station).collect();
        set.into_iter().collect()
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.name == name)
    }

    /// Canonical text form; `parse` of this round-trips to an equal
    /// scenario, and the run manifest hashes this string.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[run]");
        let _ = writeln!(s, "name = {}", self.name);
        let _ = writeln!(s, "duration = {}", fmt_dur(self.duration));
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "\n[phy]");
        let _ = writeln!(s, "sifs = {}", fmt_dur(self.phy.sifs));
        let _ = writeln!(s, "slot_time = {}", fmt_dur(self.phy.slot_time));
        let _ = writeln!(s, "data_rate_bps = {}", self.phy.data_rate_bps);
        let _ = writeln!(s, "plcp_overhead = {}", fmt_dur(self.phy.plcp_overhead));
        let _ = writeln!(s, "mac_header_bytes = {}", self.phy.mac_header_bytes);
        let _ = writeln!(s, "ack_frame_bytes = {}", self.phy.ack_frame_bytes);
        let _ = writeln!(s, "\n[mac]");
        let _ = writeln!(s, "cw_min = {}", self.mac.cw_min);
        let _ = writeln!(s, "cw_max = {}", self.mac.cw_max);
        let _ = writeln!(s, "retry_limit = {}", self.mac.retry_limit);
        let _ = writeln!(s, "queue_capacity = {}", self.mac.queue_capacity);
        let _ = writeln!(s, "\n[wired]");
        let _ = writeln!(s, "rate_bps = {}", self.wired.rate_bps);
        let _ = writeln!(s, "delay = {}", fmt_dur(self.wired.delay));
        let _ = writeln!(s, "queue_capacity = {}", self.wired.queue_capacity);
        for class in &self.classes {
            let _ = writeln!(s, "\n[class.{}]", class.name);
            let _ = writeln!(s, "temax = {}", fmt_dur(class.temax));
            let _ = writeln!(s, "difs_min = {}", fmt_dur(class.difs_min));
            let _ = writeln!(s, "difs_max = {}", fmt_dur(class.difs_max));
        }
        for flow in &self.flows {
            let _ = writeln!(s, "\n[flow.{}]", flow.name);
            let _ = writeln!(s, "kind = {}", if flow.kind == FlowKind::Cbr { "cbr" } else { "ftp" });
            let _ = writeln!(s, "class = {}", flow.class);
            let _ = writeln!(s, "station = {}", flow.station);
            let _ = writeln!(s, "start = {}", fmt_dur(flow.start - SimTime::ZERO));
            if let Some(stop) = flow.stop {
                let _ = writeln!(s, "stop = {}", fmt_dur(stop - SimTime::ZERO));
            }
            let _ = writeln!(s, "packet_bytes = {}", flow.packet_bytes);
            if let Some(iv) = flow.interval {
                let _ = writeln!(s, "interval = {}", fmt_dur(iv));
            }
        }
        s
    }

    /// Parse the sectioned key-value format. Unknown keys and sections,
    /// missing fields, non-integral-slot DIFS values and dangling flow
    /// references are all errors with context.
    pub fn parse(text: &str) -> Result<Scenario, ConfigError> {
        let mut scenario = Scenario {
            name: "custom".to_string(),
            phy: PhyParams::dsss_1mbps(),
            mac: MacConfig::default(),
            classes: Vec::new(),
            flows: Vec::new(),
            wired: WiredParams::default(),
            duration: Dur::from_secs(250),
            seed: 1,
        };
        let mut section = String::new();
        let mut current_class: Option<ClassBuilder> = None;
        let mut current_flow: Option<FlowBuilder> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('[') {
                let header = header.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                    line: line_no,
                    msg: "unterminated section header".to_string(),
                })?;
                finish_builders(&mut scenario, &mut current_class, &mut current_flow)?;
                match header.split_once('.') {
                    Some(("class", name)) => {
                        current_class = Some(ClassBuilder::new(name, line_no));
                        section = format!("class.{name}");
                    }
                    Some(("flow", name)) => {
                        current_flow = Some(FlowBuilder::new(name, line_no));
                        section = format!("flow.{name}");
                    }
                    None if ["run", "phy", "mac", "wired"].contains(&header) => {
                        section = header.to_string();
                    }
                    _ => {
                        return Err(ConfigError::Syntax {
                            line: line_no,
                            msg: format!("unknown section [{header}]"),
                        })
                    }
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: line_no,
                msg: "expected `key = value`".to_string(),
            })?;
            let key = key.trim();
            let value = value.trim();
            let unknown = || ConfigError::UnknownKey {
                line: line_no,
                section: section.clone(),
                key: key.to_string(),
            };
            match section.as_str() {
                "run" => match key {
                    "name" => scenario.name = value.to_string(),
                    "duration" => scenario.duration = parse_dur(value, line_no)?,
                    "seed" => scenario.seed = parse_num(value, line_no)?,
                    _ => return Err(unknown()),
                },
                "phy" => match key {
                    "sifs" => scenario.phy.sifs = parse_dur(value, line_no)?,
                    "slot_time" => scenario.phy.slot_time = parse_dur(value, line_no)?,
                    "data_rate_bps" => scenario.phy.data_rate_bps = parse_num(value, line_no)?,
                    "plcp_overhead" => scenario.phy.plcp_overhead = parse_dur(value, line_no)?,
                    "mac_header_bytes" => scenario.phy.mac_header_bytes = parse_num(value, line_no)? as u32,
                    "ack_frame_bytes" => scenario.phy.ack_frame_bytes = parse_num(value, line_no)? as u32,
                    _ => return Err(unknown()),
                },
                "mac" => match key {
                    "cw_min" => scenario.mac.cw_min = parse_num(value, line_no)? as u32,
                    "cw_max" => scenario.mac.cw_max = parse_num(value, line_no)? as u32,
                    "retry_limit" => scenario.mac.retry_limit = parse_num(value, line_no)? as u32,
                    "queue_capacity" => scenario.mac.queue_capacity = parse_num(value, line_no)? as usize,
                    _ => return Err(unknown()),
                },
                "wired" => match key {
                    "rate_bps" => scenario.wired.rate_bps = parse_num(value, line_no)?,
                    "delay" => scenario.wired.delay = parse_dur(value, line_no)?,
                    "queue_capacity" => scenario.wired.queue_capacity = parse_num(value, line_no)? as usize,
                    _ => return Err(unknown()),
                },
                _ if section.starts_with("class.") => {
                    let b = current_class.as_mut().unwrap();
                    match key {
                        "temax" => b.temax = Some(parse_dur(value, line_no)?),
                        "difs_min" => b.difs_min = Some(parse_dur(value, line_no)?),
                        "difs_max" => b.difs_max = Some(parse_dur(value, line_no)?),
                        _ => return Err(unknown()),
                    }
                }
                _ if section.starts_with("flow.") => {
                    let b = current_flow.as_mut().unwrap();
                    match key {
                        "kind" => {
                            b.kind = Some(match value {
                                "cbr" => FlowKind::Cbr,
                                "ftp" => FlowKind::Ftp,
                                other => {
                                    return Err(ConfigError::Syntax {
                                        line: line_no,
                                        msg: format!("unknown flow kind `{other}` (cbr or ftp)"),
                                    })
                                }
                            })
                        }
                        "class" => b.class = Some(value.to_string()),
                        "station" => b.station = Some(parse_num(value, line_no)? as u32),
                        "start" => b.start = Some(SimTime::ZERO + parse_dur(value, line_no)?),
                        "stop" => b.stop = Some(SimTime::ZERO + parse_dur(value, line_no)?),
                        "packet_bytes" => b.packet_bytes = Some(parse_num(value, line_no)? as u32),
                        "interval" => b.interval = Some(parse_dur(value, line_no)?),
                        _ => return Err(unknown()),
                    }
                }
                _ => {
                    return Err(ConfigError::Syntax {
                        line: line_no,
                        msg: "key-value pair outside any section".to_string(),
                    })
                }
            }
        }
        finish_builders(&mut scenario, &mut current_class, &mut current_flow)?;
        scenario.validate()?;
        Ok(scenario)
    }
}

struct ClassBuilder {
    name: String,
    temax: Option<Dur>,
    difs_min: Option<Dur>,
    difs_max: Option<Dur>,
}

impl ClassBuilder {
    fn new(name: &str, _line: usize) -> Self {
        ClassBuilder {
            name: name.to_string(),
            temax: None,
            difs_min: None,
            difs_max: None,
        }
    }
    fn build(self) -> Result<ClassSpec, ConfigError> {
        let section = format!("class.{}", self.name);
        let need = |field: &str| ConfigError::MissingField {
            section: section.clone(),
            field: field.to_string(),
        };
        Ok(ClassSpec {
            temax: self.temax.ok_or_else(|| need("temax"))?,
            difs_min: self.difs_min.ok_or_else(|| need("difs_min"))?,
            difs_max: self.difs_max.ok_or_else(|| need("difs_max"))?,
            name: self.name,
        })
    }
}

struct FlowBuilder {
    name: String,
    kind: Option<FlowKind>,
    class: Option<String>,
    station: Option<u32>,
    start: Option<SimTime>,
    stop: Option<SimTime>,
    packet_bytes: Option<u32>,
    interval: Option<Dur>,
}

impl FlowBuilder {
    fn new(name: &str, _line: usize) -> Self {
        FlowBuilder {
            name: name.to_string(),
            kind: None,
            class: None,
            station: None,
            start: None,
            stop: None,
            packet_bytes: None,
            interval: None,
        }
    }
    fn build(self) -> Result<FlowSpec, ConfigError> {
        let section = format!("flow.{}", self.name);
        let need = |field: &str| ConfigError::MissingField {
            section: section.clone(),
            field: field.to_string(),
        };
        Ok(FlowSpec {
            kind: self.kind.ok_or_else(|| need("kind"))?,
            class: self.class.ok_or_else(|| need("class"))?,
            station: self.station.ok_or_else(|| need("station"))?,
            start: self.start.ok_or_else(|| need("start"))?,
            stop: self.stop,
            packet_bytes: self.packet_bytes.ok_or_else(|| need("packet_bytes"))?,
            interval: self.interval,
            name: self.name,
        })
    }
}

fn finish_builders(
    scenario: &mut Scenario,
    class: &mut Option<ClassBuilder>,
    flow: &mut Option<FlowBuilder>,
) -> Result<(), ConfigError> {
    if let Some(b) = class.take() {
        scenario.classes.push(b.build()?);
    }
    if let Some(b) = flow.take() {
        scenario.flows.push(b.build()?);
    }
    Ok(())
}

fn parse_num(value: &str, line: usize) -> Result<u64, ConfigError> {
    value.parse().map_err(|_| ConfigError::Syntax {
        line,
        msg: format!("expected an integer, got `{value}`"),
    })
}

fn parse_dur(value: &str, line: usize) -> Result<Dur, ConfigError> {
    let bad = || ConfigError::Syntax {
        line,
        msg: format!("expected a duration like 20ms/50us/250s, got `{value}`"),
    };
    // longest suffix first so "ms" is not read as "s"
    for (suffix, scale) in [("ns", 1u64), ("us", 1_000), ("ms", 1_000_000), ("s", 1_000_000_000)] {
        if let Some(num) = value.strip_suffix(suffix) {
            if suffix == "s" && (num.ends_with('n') || num.ends_with('u') || num.ends_with('m')) {
                continue;
            }
            let n: u64 = num.trim().parse().map_err(|_| bad())?;
            return Ok(Dur::from_ns(n * scale));
        }
    }
    Err(bad())
}

/// Parse a standalone duration string like "30s", "500ms", "20us".
pub fn parse_duration(value: &str) -> Result<Dur, String> {
    parse_dur(value, 0).map_err(|e| e.to_string())
}

fn fmt_dur(d: Dur) -> String {
    let ns = d.as_ns();
    if ns % 1_000_000_000 == 0 {
        format!("{}s", ns / 1_000_000_000)
    } else if ns % 1_000_000 == 0 {
        format!("{}ms", ns / 1_000_000)
    } else if ns % 1_000 == 0 {
        format!("{}us", ns / 1_000)
    } else {
        format!("{ns}ns")
    }
}

/// The integral-slot check every configured DIFS must pass, re-exported
/// for acceptance checks.
pub fn check_class_slots(scenario: &Scenario) -> Result<(), PolicyError> {
    for class in &scenario.classes {
        nb_slots_from_difs(class.difs_min, &scenario.phy)?;
        nb_slots_from_difs(class.difs_max, &scenario.phy)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_udp3_matches_table() {
        let s = Scenario::builtin("udp3").unwrap();
        let cbr1 = &s.classes[0];
        assert_eq!(cbr1.name, "CBR1");
        assert_eq!(cbr1.difs_min, Dur::from_us(50));
        assert_eq!(cbr1.difs_max, Dur::from_us(130));
        assert_eq!(cbr1.temax, Dur::from_ms(150));
        assert_eq!(s.flows[0].packet_bytes, 2312);
        assert_eq!(s.flows[0].interval, Some(Dur::from_ms(20)));
        assert_eq!(s.flows[2].start, SimTime::from_secs(150));
        assert_eq!(s.duration, Dur::from_secs(250));
    }

    #[test]
    fn builtin_tcp3_equal_temax() {
        let s = Scenario::builtin("tcp3").unwrap();
        assert!(s.classes.iter().all(|c| c.temax == Dur::from_ms(375)));
    }

    #[test]
    fn builtin_mixed_ftp_budget_is_one_second() {
        let s = Scenario::builtin("mixed").unwrap();
        let ftp1 = s.classes.iter().find(|c| c.name == "FTP1").unwrap();
        assert_eq!(ftp1.temax, Dur::from_secs(1));
    }

    #[test]
    fn unknown_builtin_lists_alternatives() {
        let err = Scenario::builtin("nope").unwrap_err();
        assert!(err.to_string().contains("udp3"));
    }

    #[test]
    fn all_builtins_round_trip_through_config_text() {
        for name in BUILTIN_NAMES {
            let s = Scenario::builtin(name).unwrap();
            let parsed = Scenario::parse(&s.to_config_string()).unwrap();
            assert_eq!(s, parsed, "round trip for {name}");
        }
    }

    #[test]
    fn non_integral_slot_difs_rejected() {
        let s = Scenario::builtin("udp3").unwrap();
        let mut text = s.to_config_string();
        text = text.replace("difs_min = 50us", "difs_min = 55us");
        let err = Scenario::parse(&text).unwrap_err();
        assert!(err.to_string().contains("integral"), "got: {err}");
    }

    #[test]
    fn dangling_class_reference_rejected() {
        let s = Scenario::builtin("udp3").unwrap();
        let text = s.to_config_string().replace("class = CBR1", "class = NOPE");
        let err = Scenario::parse(&text).unwrap_err();
        assert!(matches!(err, ConfigError::DanglingClass { .. }));
    }

    #[test]
    fn unknown_key_is_an_error_with_line() {
        let text = "[run]\nbogus = 1\n";
        let err = Scenario::parse(text).unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn duration_suffixes() {
        assert_eq!(parse_dur("20ms", 1).unwrap(), Dur::from_ms(20));
        assert_eq!(parse_dur("50us", 1).unwrap(), Dur::from_us(50));
        assert_eq!(parse_dur("250s", 1).unwrap(), Dur::from_secs(250));
        assert_eq!(parse_dur("7ns", 1).unwrap(), Dur::from_ns(7));
        assert!(parse_dur("20", 1).is_err());
    }

    #[test]
    fn station_numbers_deduplicated_sorted() {
        let mut s = Scenario::builtin("udp3").unwrap();
        s.flows[2].station = 1;
        assert_eq!(s.station_numbers(), vec![1, 2]);
    }
}
