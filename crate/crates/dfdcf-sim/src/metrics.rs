//! Per-flow measurement: MAC delay, delay jitter, transport RTT, bucketed
//! throughput and goodput, categorized losses, and CSV serialization.
//!
//! Delay is measured from MAC enqueue to MAC-ACK receipt at the sender.
//! Jitter is the absolute difference between consecutive delivered
//! frames' delays. Throughput buckets are one simulated second wide and
//! credited with payload bits on delivery; goodput buckets are credited
//! with transport-level progress (cumulative-ACK advance for TCP, payload
//! delivery for CBR).

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::engine::{Dur, SimTime};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DropCause {
    Deadline,
    Retry,
    Queue,
    Wired,
}

impl DropCause {
    pub const ALL: [DropCause; 4] = [DropCause::Deadline, DropCause::Retry, DropCause::Queue, DropCause::Wired];

    fn idx(self) -> usize {
        match self {
            DropCause::Deadline => 0,
            DropCause::Retry => 1,
            DropCause::Queue => 2,
            DropCause::Wired => 3,
        }
    }

    pub fn metric_name(self) -> &'static str {
        match self {
            DropCause::Deadline => "drop_deadline",
            DropCause::Retry => "drop_retry",
            DropCause::Queue => "drop_queue",
            DropCause::Wired => "drop_wired",
        }
    }
}

/// Counters and time series for one flow (one direction of traffic).
#[derive(Debug, Clone)]
pub struct FlowStats {
    pub name: String,
    pub sent: u64,
    pub delivered: u64,
    drops: [u64; 4],
    pub sent_events: Vec<SimTime>,
    pub drop_events: Vec<(SimTime, DropCause)>,
    pub delay_series: Vec<(SimTime, Dur)>,
    pub jitter_series: Vec<(SimTime, Dur)>,
    pub rtt_series: Vec<(SimTime, Dur)>,
    /// Delivered payload bits per whole simulated second.
    pub throughput_buckets: Vec<u64>,
    /// Transport-level progress bits per whole simulated second.
    pub goodput_buckets: Vec<u64>,
    pub in_flight_at_end: u64,
    last_delay: Option<Dur>,
}

impl FlowStats {
    pub fn new(name: &str) -> Self {
        FlowStats {
            name: name.to_string(),
            sent: 0,
            delivered: 0,
            drops: [0; 4],
            sent_events: Vec::new(),
            drop_events: Vec::new(),
            delay_series: Vec::new(),
            jitter_series: Vec::new(),
            rtt_series: Vec::new(),
            throughput_buckets: Vec::new(),
            goodput_buckets: Vec::new(),
            in_flight_at_end: 0,
            last_delay: None,
        }
    }

    pub fn record_sent(&mut self, now: SimTime) {
        self.sent += 1;
        self.sent_events.push(now);
    }

    pub fn record_delivery(&mut self, enqueue_time: SimTime, ack_time: SimTime, payload_bits: u64) {
        debug_assert!(ack_time >= enqueue_time);
        let delay = ack_time - enqueue_time;
        self.delay_series.push((ack_time, delay));
        if let Some(prev) = self.last_delay {
            let jitter = if delay > prev { delay - prev } else { prev - delay };
            self.jitter_series.push((ack_time, jitter));
        }
        self.last_delay = Some(delay);
        self.delivered += 1;
        bucket_credit(&mut self.throughput_buckets, ack_time, payload_bits);
    }

    pub fn record_drop(&mut self, cause: DropCause, now: SimTime) {
        self.drops[cause.idx()] += 1;
        self.drop_events.push((now, cause));
    }

    pub fn record_rtt(&mut self, now: SimTime, rtt: Dur) {
        self.rtt_series.push((now, rtt));
    }

    pub fn credit_goodput(&mut self, now: SimTime, bits: u64) {
        bucket_credit(&mut self.goodput_buckets, now, bits);
    }

    pub fn drop_count(&self, cause: DropCause) -> u64 {
        self.drops[cause.idx()]
    }

    pub fn drops_total(&self) -> u64 {
        self.drops.iter().sum()
    }

    /// sent = delivered + Σ drops + in-flight-at-end, exactly.
    pub fn conservation_holds(&self) -> bool {
        self.sent == self.delivered + self.drops_total() + self.in_flight_at_end
    }

    /// jitter samples = max(0, delivered - 1), exactly.
    pub fn jitter_count_law_holds(&self) -> bool {
        self.jitter_series.len() as u64 == self.delivered.saturating_sub(1)
    }

    pub fn delivered_bits(&self) -> u64 {
        self.throughput_buckets.iter().sum()
    }

    pub fn summarize(&self, window: (SimTime, SimTime)) -> FlowSummary {
        let in_win = |t: &SimTime| *t >= window.0 && *t < window.1;
        let delays: Vec<f64> = self
            .delay_series
            .iter()
            .filter(|(t, _)| in_win(t))
            .map(|(_, d)| d.as_millis_f64())
            .collect();
        let jitters: Vec<f64> = self
            .jitter_series
            .iter()
            .filter(|(t, _)| in_win(t))
            .map(|(_, d)| d.as_millis_f64())
            .collect();
        let rtts: Vec<f64> = self
            .rtt_series
            .iter()
            .filter(|(t, _)| in_win(t))
            .map(|(_, d)| d.as_millis_f64())
            .collect();
        let sent_in_window = self.sent_events.iter().filter(|t| in_win(t)).count() as u64;
        let mut drops_in_window = [0u64; 4];
        for (t, cause) in &self.drop_events {
            if in_win(t) {
                drops_in_window[cause.idx()] += 1;
            }
        }
        let goodput_bits = bucket_sum_in_window(&self.goodput_buckets, window);
        let throughput_bits = bucket_sum_in_window(&self.throughput_buckets, window);
        let span_s = (window.1 - window.0).as_secs_f64();

        FlowSummary {
            flow: self.name.clone(),
            window,
            delivered: delays.len() as u64,
            sent: sent_in_window,
            mean_delay_ms: mean(&delays),
            median_delay_ms: percentile(&delays, 50.0),
            p95_delay_ms: percentile(&delays, 95.0),
            mean_jitter_ms: mean(&jitters),
            std_jitter_ms: std_dev(&jitters),
            mean_rtt_ms: mean(&rtts),
            throughput_kbps: if span_s > 0.0 { Some(throughput_bits as f64 / span_s / 1e3) } else { None },
            goodput_kbps: if span_s > 0.0 { Some(goodput_bits as f64 / span_s / 1e3) } else { None },
            drops: drops_in_window,
        }
    }
}

fn bucket_credit(buckets: &mut Vec<u64>, at: SimTime, bits: u64) {
    let idx = at.whole_secs() as usize;
    if buckets.len() <= idx {
        buckets.resize(idx + 1, 0);
    }
    buckets[idx] += bits;
}

fn bucket_sum_in_window(buckets: &[u64], window: (SimTime, SimTime)) -> u64 {
    let lo = window.0.whole_secs() as usize;
    let hi = (window.1.whole_secs() as usize).min(buckets.len());
    if lo >= buckets.len() {
        return 0;
    }
    buckets[lo..hi].iter().sum()
}

fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

fn std_dev(xs: &[f64]) -> Option<f64> {
    let m = mean(xs)?;
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64;
    Some(var.sqrt())
}

fn percentile(xs: &[f64], p: f64) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = (p / 100.0 * (sorted.len() - 1) as f64).round() as usize;
    Some(sorted[rank])
}

/// Aggregates over one (flow, window). Fields with no samples are None
/// and serialize as the explicit marker `NA`, never fabricated zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSummary {
    pub flow: String,
    pub window: (SimTime, SimTime),
    pub delivered: u64,
    pub sent: u64,
    pub mean_delay_ms: Option<f64>,
    pub median_delay_ms: Option<f64>,
    pub p95_delay_ms: Option<f64>,
    pub mean_jitter_ms: Option<f64>,
    pub std_jitter_ms: Option<f64>,
    pub mean_rtt_ms: Option<f64>,
    pub throughput_kbps: Option<f64>,
    pub goodput_kbps: Option<f64>,
    pub drops: [u64; 4],
}

pub const SUMMARY_HEADER: &str = "flow,window_start_s,window_end_s,sent,delivered,mean_delay_ms,median_delay_ms,p95_delay_ms,mean_jitter_ms,std_jitter_ms,mean_rtt_ms,throughput_kbps,goodput_kbps,drop_deadline,drop_retry,drop_queue,drop_wired";

impl FlowSummary {
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| match v {
            Some(x) => format!("{x:.6}"),
            None => "NA".to_string(),
        };
        format!(
            "{},{:.6},{:.6},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.flow,
            self.window.0.as_secs_f64(),
            self.window.1.as_secs_f64(),
            self.sent,
            self.delivered,
            opt(self.mean_delay_ms),
            opt(self.median_delay_ms),
            opt(self.p95_delay_ms),
            opt(self.mean_jitter_ms),
            opt(self.std_jitter_ms),
            opt(self.mean_rtt_ms),
            opt(self.throughput_kbps),
            opt(self.goodput_kbps),
            self.drops[0],
            self.drops[1],
            self.drops[2],
            self.drops[3],
        )
    }
}

pub const TIMESERIES_HEADER: &str = "time_s,flow,metric,value";

/// Serialize all flows' time series, rows sorted by (time, flow, metric).
/// Rewriting with the same inputs is byte-identical.
pub fn timeseries_csv(stats: &[FlowStats]) -> String {
    let mut rows: Vec<(u64, &str, &str, String)> = Vec::new();
    for fs in stats {
        for (t, d) in &fs.delay_series {
            rows.push((t.as_ns(), &fs.name, "delay_ms", format!("{:.6}", d.as_millis_f64())));
        }
        for (t, d) in &fs.jitter_series {
            rows.push((t.as_ns(), &fs.name, "jitter_ms", format!("{:.6}", d.as_millis_f64())));
        }
        for (t, d) in &fs.rtt_series {
            rows.push((t.as_ns(), &fs.name, "rtt_ms", format!("{:.6}", d.as_millis_f64())));
        }
        for (i, bits) in fs.throughput_buckets.iter().enumerate() {
            if *bits > 0 {
                let t = SimTime::from_secs(i as u64);
                rows.push((t.as_ns(), &fs.name, "throughput_kbps", format!("{:.6}", *bits as f64 / 1e3)));
            }
        }
        for (t, cause) in &fs.drop_events {
            if *cause != DropCause::Wired {
                rows.push((t.as_ns(), &fs.name, cause.metric_name(), "1".to_string()));
            }
        }
    }
    rows.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
    let mut out = String::with_capacity(rows.len() * 40 + 32);
    out.push_str(TIMESERIES_HEADER);
    out.push('\n');
    for (t, flow, metric, value) in rows {
        let _ = writeln!(out, "{:.6},{},{},{}", t as f64 / 1e9, flow, metric, value);
    }
    out
}

pub fn write_timeseries_csv(stats: &[FlowStats], path: &Path) -> io::Result<()> {
    fs::write(path, timeseries_csv(stats))
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

pub fn summary_csv(summaries: &[FlowSummary]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for s in summaries {
        out.push_str(&s.csv_row());
        out.push('\n');
    }
    out
}
