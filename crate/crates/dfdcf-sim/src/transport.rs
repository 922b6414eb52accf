//! Traffic generation and end-to-end protocols: constant-bit-rate UDP
//! sources, a simplified Reno TCP sender/receiver pair, and the wired
//! link between the access point and the fixed sink.
//!
//! The TCP model is deliberately small: slow start, congestion avoidance,
//! fast retransmit on the third duplicate ACK, RTO with exponential
//! backoff, and Karn's rule for RTT sampling. Every segment is ACKed (no
//! delayed ACKs) so the downlink contention the scenarios depend on is
//! not blurred.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::engine::{Dur, SimTime};
use crate::mac::FlowId;

pub const RTO_MIN: Dur = Dur::from_secs(1);
pub const RTO_MAX: Dur = Dur::from_secs(64);
pub const RTO_INITIAL: Dur = Dur::from_secs(3);
pub const TRANSPORT_ACK_BYTES: u32 = 40;

/// Constant-bit-rate source: one packet of `packet_bytes` every
/// `interval`, from `start` (inclusive) until `stop` (exclusive).
#[derive(Debug, Clone)]
pub struct CbrSource {
    pub flow: FlowId,
    pub packet_bytes: u32,
    pub interval: Dur,
    pub start: SimTime,
    pub stop: SimTime,
    pub next_seq: u64,
}

impl CbrSource {
    pub fn new(flow: FlowId, packet_bytes: u32, interval: Dur, start: SimTime, stop: SimTime) -> Self {
        assert!(interval > Dur::ZERO && start < stop);
        CbrSource {
            flow,
            packet_bytes,
            interval,
            start,
            stop,
            next_seq: 0,
        }
    }

    /// Emit the packet due at `now` and report when the next one is due,
    /// if still before `stop`.
    pub fn tick(&mut self, now: SimTime) -> (u64, Option<SimTime>) {
        debug_assert!(now >= self.start && now < self.stop);
        let seq = self.next_seq;
        self.next_seq += 1;
        let next = now + self.interval;
        (seq, if next < self.stop { Some(next) } else { None })
    }

    /// Number of emissions over the whole [start, stop) window.
    pub fn emission_count(&self) -> u64 {
        let span = (self.stop - self.start).as_ns();
        let iv = self.interval.as_ns();
        span / iv + u64::from(span % iv != 0)
    }
}

#[derive(Debug, Clone, Copy)]
struct SegmentMeta {
    sent_at: SimTime,
    retransmitted: bool,
}

/// What the sender wants done after processing an ACK.
#[derive(Debug, Default)]
pub struct AckOutcome {
    pub new_data_acked: u64,
    pub retransmit: Option<u64>,
    pub rtt_sample: Option<Dur>,
}

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("ACK for never-sent sequence {ack} (next to send is {next})")]
    AckBeyondSent { ack: u64, next: u64 },
}

/// Simplified Reno sender. Sequence numbers count MSS-sized segments; the
/// congestion window is kept in bytes.
#[derive(Debug)]
pub struct TcpConnection {
    pub flow: FlowId,
    pub mss_bytes: u32,
    pub cwnd: f64,
    pub ssthresh: f64,
    pub next_seq: u64,
    pub highest_acked: u64,
    pub dup_acks: u32,
    pub srtt: Option<Dur>,
    pub rttvar: Dur,
    pub rto: Dur,
    segments: HashMap<u64, SegmentMeta>,
}

impl TcpConnection {
    pub fn new(flow: FlowId, mss_bytes: u32) -> Self {
        let mss = mss_bytes as f64;
        TcpConnection {
            flow,
            mss_bytes,
            cwnd: mss,
            ssthresh: 64.0 * mss,
            next_seq: 0,
            highest_acked: 0,
            dup_acks: 0,
            srtt: None,
            rttvar: Dur::ZERO,
            rto: RTO_INITIAL,
            segments: HashMap::new(),
        }
    }

    pub fn bytes_in_flight(&self) -> f64 {
        (self.next_seq - self.highest_acked) as f64 * self.mss_bytes as f64
    }

    /// Emit new segments while the window has room (the FTP source has an
    /// infinite backlog). Returns the sequence numbers to hand to the MAC.
    pub fn try_send(&mut self, now: SimTime) -> Vec<u64> {
        let mut out = Vec::new();
        while self.bytes_in_flight() + self.mss_bytes as f64 <= self.cwnd {
            let seq = self.next_seq;
            self.next_seq += 1;
            self.segments.insert(
                seq,
                SegmentMeta {
                    sent_at: now,
                    retransmitted: false,
                },
            );
            out.push(seq);
        }
        out
    }

    /// Cumulative ACK: `ack_seq` is the receiver's next expected segment.
    pub fn on_ack(&mut self, ack_seq: u64, now: SimTime) -> Result<AckOutcome, TransportError> {
        if ack_seq > self.next_seq {
            return Err(TransportError::AckBeyondSent {
                ack: ack_seq,
                next: self.next_seq,
            });
        }
        let mut out = AckOutcome::default();
        if ack_seq > self.highest_acked {
            out.new_data_acked = ack_seq - self.highest_acked;
            // Karn: sample only from a never-retransmitted segment
            if let Some(meta) = self.segments.get(&(ack_seq - 1)) {
                if !meta.retransmitted {
                    let sample = now - meta.sent_at;
                    self.rtt_update(sample);
                    out.rtt_sample = Some(sample);
                }
            }
            for seq in self.highest_acked..ack_seq {
                self.segments.remove(&seq);
            }
            self.highest_acked = ack_seq;
            self.dup_acks = 0;
            let mss = self.mss_bytes as f64;
            for _ in 0..out.new_data_acked {
                if self.cwnd < self.ssthresh {
                    self.cwnd += mss; // slow start
                } else {
                    self.cwnd += mss * mss / self.cwnd; // congestion avoidance
                }
            }
        } else if self.next_seq > self.highest_acked {
            self.dup_acks += 1;
            if self.dup_acks == 3 {
                let mss = self.mss_bytes as f64;
                self.ssthresh = (self.bytes_in_flight() / 2.0).max(2.0 * mss);
                self.cwnd = self.ssthresh;
                out.retransmit = Some(self.mark_retransmit(self.highest_acked, now));
            }
        }
        Ok(out)
    }

    /// Retransmission timer fired. Returns the segment to retransmit, or
    /// None when nothing is outstanding (stale timer).
    pub fn on_rto(&mut self, now: SimTime) -> Option<u64> {
        if self.next_seq == self.highest_acked {
            return None;
        }
        let mss = self.mss_bytes as f64;
        self.ssthresh = (self.bytes_in_flight() / 2.0).max(2.0 * mss);
        self.cwnd = mss;
        self.rto = RTO_MAX.min(self.rto * 2);
        self.dup_acks = 0;
        Some(self.mark_retransmit(self.highest_acked, now))
    }

    fn mark_retransmit(&mut self, seq: u64, now: SimTime) -> u64 {
        let meta = self.segments.entry(seq).or_insert(SegmentMeta {
            sent_at: now,
            retransmitted: true,
        });
        meta.retransmitted = true;
        meta.sent_at = now;
        seq
    }

    /// RFC-style SRTT/RTTVAR estimator; resets any RTO backoff.
    pub fn rtt_update(&mut self, sample: Dur) {
        match self.srtt {
            None => {
                self.srtt = Some(sample);
                self.rttvar = Dur::from_ns(sample.as_ns() / 2);
            }
            Some(srtt) => {
                let diff = if srtt > sample { srtt - sample } else { sample - srtt };
                self.rttvar = Dur::from_ns((3 * self.rttvar.as_ns() + diff.as_ns()) / 4);
                self.srtt = Some(Dur::from_ns((7 * srtt.as_ns() + sample.as_ns()) / 8));
            }
        }
        let raw = self.srtt.unwrap() + self.rttvar * 4;
        self.rto = raw.max(RTO_MIN).min(RTO_MAX);
    }

    pub fn outstanding(&self) -> bool {
        self.next_seq > self.highest_acked
    }
}

/// Per-flow TCP receiver at the wired sink: cumulative ACK with an
/// out-of-order buffer.
#[derive(Debug, Default)]
pub struct TcpReceiver {
    pub expected: u64,
    out_of_order: BTreeSet<u64>,
}

impl TcpReceiver {
    pub fn new() -> Self {
        Self::default()
    }

    /// Accept a data segment; returns the cumulative ACK to send back
    /// (next expected sequence).
    pub fn on_data(&mut self, seq: u64) -> u64 {
        if seq >= self.expected {
            self.out_of_order.insert(seq);
            while self.out_of_order.remove(&self.expected) {
                self.expected += 1;
            }
        }
        self.expected
    }

    /// In-order prefix is everything below `expected`; buffered segments
    /// beyond it have not been delivered to the application.
    pub fn delivered_prefix(&self) -> u64 {
        self.expected
    }
}

/// Point-to-point wired link, one direction: FIFO serialization at a
/// fixed rate plus propagation delay, drop-tail queue.
#[derive(Debug)]
pub struct WiredLink {
    pub rate_bps: u64,
    pub delay: Dur,
    pub capacity: usize,
    busy_until: SimTime,
    departures: VecDeque<SimTime>,
}

impl WiredLink {
    pub fn new(rate_bps: u64, delay: Dur, capacity: usize) -> Self {
        assert!(rate_bps > 0 && capacity > 0);
        WiredLink {
            rate_bps,
            delay,
            capacity,
            busy_until: SimTime::ZERO,
            departures: VecDeque::new(),
        }
    }

    /// Accept a packet at `now`; returns its arrival time at the far end,
    /// or None when the queue is full.
    pub fn deliver(&mut self, bytes: u32, now: SimTime) -> Option<SimTime> {
        while let Some(&front) = self.departures.front() {
            if front <= now {
                self.departures.pop_front();
            } else {
                break;
            }
        }
        if self.departures.len() >= self.capacity {
            return None;
        }
        let ser = Dur::from_ns((bytes as u128 * 8 * 1_000_000_000 / self.rate_bps as u128) as u64);
        let start = self.busy_until.max(now);
        let done = start + ser;
        self.busy_until = done;
        self.departures.push_back(done);
        Some(done + self.delay)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cbr_cadence_and_count() {
        let mut src = CbrSource::new(
            FlowId(0),
            2312,
            Dur::from_ms(20),
            SimTime::from_secs(50),
            SimTime::from_secs(250),
        );
        let (seq, next) = src.tick(SimTime::from_secs(50));
        assert_eq!(seq, 0);
        assert_eq!(next, Some(SimTime::from_ns(50_020_000_000)));
        assert_eq!(src.emission_count(), 10_000);
        // ~0.92 Mb/s per flow: three such flows saturate a 1 Mb/s link
        let load_bps = 2312.0 * 8.0 / 0.02;
        assert!(load_bps * 3.0 > 1e6 && load_bps < 1e6);
    }

    #[test]
    fn cbr_boundary_stops_before_stop_time() {
        let mut src = CbrSource::new(FlowId(0), 100, Dur::from_ms(20), SimTime::ZERO, SimTime::from_ms(40));
        let (_, next) = src.tick(SimTime::ZERO);
        assert_eq!(next, Some(SimTime::from_ms(20)));
        let (_, next) = src.tick(SimTime::from_ms(20));
        assert_eq!(next, None); // next would be exactly stop
        assert_eq!(src.emission_count(), 2);
    }

    #[test]
    fn initial_window_sends_exactly_one() {
        let mut conn = TcpConnection::new(FlowId(0), 1100);
        assert_eq!(conn.try_send(SimTime::ZERO), vec![0]);
        assert!(conn.try_send(SimTime::ZERO).is_empty());
    }

    #[test]
    fn window_room_controls_emission() {
        let mut conn = TcpConnection::new(FlowId(0), 1100);
        conn.cwnd = 4.0 * 1100.0;
        let sent = conn.try_send(SimTime::ZERO);
        assert_eq!(sent, vec![0, 1, 2, 3]);
        assert!(conn.try_send(SimTime::ZERO).is_empty());
        // two acked: room for two more
        conn.on_ack(2, SimTime::from_ms(10)).unwrap();
        conn.cwnd = 4.0 * 1100.0;
        assert_eq!(conn.try_send(SimTime::from_ms(10)).len(), 2);
    }

    #[test]
    fn slow_start_increments_one_mss_per_ack() {
        let mut conn = TcpConnection::new(FlowId(0), 1100);
        conn.cwnd = 2.0 * 1100.0;
        conn.try_send(SimTime::ZERO);
        conn.on_ack(1, SimTime::from_ms(5)).unwrap();
        assert_eq!(conn.cwnd, 3.0 * 1100.0);
    }

    #[test]
    fn congestion_avoidance_increment() {
        let mut conn = TcpConnection::new(FlowId(0), 1100);
        conn.cwnd = 8.0 * 1100.0;
        conn.ssthresh = 8.0 * 1100.0;
        conn.try_send(SimTime::ZERO);
        conn.on_ack(1, SimTime::from_ms(5)).unwrap();
        assert!((conn.cwnd - 8.125 * 1100.0).abs() < 1e-9);
    }

    #[test]
    fn third_dup_ack_triggers_fast_retransmit() {
        let mut conn = TcpConnection::new(FlowId(0), 1100);
        conn.cwnd = 8.0 * 1100.0;
        conn.try_send(SimTime::ZERO);
        let flight = conn.bytes_in_flight();
        for i in 0..3 {
            let out = conn.on_ack(0, SimTime::from_ms(5 + i)).unwrap();
            if i < 2 {
                assert!(out.retransmit.is_none());
            } else {
                assert_eq!(out.retransmit, Some(0));
            }
        }
        assert!((conn.ssthresh - flight / 2.0).abs() < 1e-9);
        assert_eq!(conn.cwnd, conn.ssthresh);
    }

    #[test]
    fn rto_collapses_window_and_doubles_timer() {
        let mut conn = TcpConnection::new(FlowId(0), 1100);
        conn.cwnd = 16.0 * 1100.0;
        conn.try_send(SimTime::ZERO);
        conn.rto = RTO_MIN;
        assert_eq!(conn.on_rto(SimTime::from_secs(1)), Some(0));
        assert_eq!(conn.cwnd, 1100.0);
        assert!((conn.ssthresh - 8.0 * 1100.0).abs() < 1e-9);
        assert_eq!(conn.rto, Dur::from_secs(2));
        conn.on_rto(SimTime::from_secs(3));
        assert_eq!(conn.rto, Dur::from_secs(4));
    }

    #[test]
    fn rto_resends_only_the_oldest_unacked_segment() {
        let mut conn = TcpConnection::new(FlowId(0), 1100);
        conn.cwnd = 8.0 * 1100.0;
        conn.try_send(SimTime::ZERO);
        conn.rto = RTO_MIN;
        assert_eq!(conn.on_rto(SimTime::from_secs(1)), Some(0));
        // everything else stays in flight; the collapsed window admits
        // nothing new until the hole is acked
        assert!(conn.try_send(SimTime::from_secs(1)).is_empty());
        assert_eq!(conn.on_rto(SimTime::from_secs(3)), Some(0));
    }

    #[test]
    fn rto_with_nothing_in_flight_is_ignored() {
        let mut conn = TcpConnection::new(FlowId(0), 1100);
        assert_eq!(conn.on_rto(SimTime::from_secs(1)), None);
    }

    #[test]
    fn rtt_estimator_first_and_subsequent_samples() {
        let mut conn = TcpConnection::new(FlowId(0), 1100);
        conn.rtt_update(Dur::from_ms(100));
        assert_eq!(conn.srtt, Some(Dur::from_ms(100)));
        assert_eq!(conn.rttvar, Dur::from_ms(50));
        assert_eq!(conn.rto, RTO_MIN); // clamp(300ms, 1s, 64s)

        let mut conn = TcpConnection::new(FlowId(0), 1100);
        conn.srtt = Some(Dur::from_ms(100));
        conn.rttvar = Dur::from_ms(10);
        conn.rtt_update(Dur::from_ms(100));
        assert_eq!(conn.srtt, Some(Dur::from_ms(100)));
        assert_eq!(conn.rttvar, Dur::from_ns(7_500_000));
    }

    #[test]
    fn karn_no_sample_from_retransmitted_segment() {
        let mut conn = TcpConnection::new(FlowId(0), 1100);
        conn.try_send(SimTime::ZERO);
        conn.rto = RTO_MIN;
        conn.on_rto(SimTime::from_secs(1));
        let out = conn.on_ack(1, SimTime::from_secs(2)).unwrap();
        assert!(out.rtt_sample.is_none());
        assert!(conn.srtt.is_none());
    }

    #[test]
    fn ack_beyond_sent_is_protocol_violation() {
        let mut conn = TcpConnection::new(FlowId(0), 1100);
        assert!(conn.on_ack(5, SimTime::ZERO).is_err());
    }

    #[test]
    fn receiver_cumulative_ack_with_reordering() {
        let mut rx = TcpReceiver::new();
        assert_eq!(rx.on_data(0), 1);
        assert_eq!(rx.on_data(2), 1); // gap at 1
        assert_eq!(rx.on_data(1), 3); // fills the gap
        assert_eq!(rx.on_data(1), 3); // duplicate is harmless
        assert_eq!(rx.delivered_prefix(), 3);
    }

    #[test]
    fn wired_link_serialization_and_delay() {
        let mut link = WiredLink::new(10_000_000, Dur::from_ms(2), 50);
        // 1100 B at 10 Mb/s = 0.88 ms serialization
        let arr = link.deliver(1100, SimTime::ZERO).unwrap();
        assert_eq!(arr, SimTime::from_ns(880_000 + 2_000_000));
        // 40 B ACK queued behind it
        let arr2 = link.deliver(40, SimTime::ZERO).unwrap();
        assert_eq!(arr2, SimTime::from_ns(880_000 + 32_000 + 2_000_000));
    }

    #[test]
    fn wired_link_overflow_drops() {
        let mut link = WiredLink::new(1_000, Dur::ZERO, 2);
        assert!(link.deliver(1000, SimTime::ZERO).is_some());
        assert!(link.deliver(1000, SimTime::ZERO).is_some());
        assert!(link.deliver(1000, SimTime::ZERO).is_none());
    }
}
