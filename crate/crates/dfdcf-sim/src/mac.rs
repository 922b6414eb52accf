//! Per-station CSMA/CA state machine and the shared single-collision-domain
//! channel.
//!
//! A station cycles through DIFS wait, backoff, transmission and ACK wait.
//! The access policy decides the DIFS: the standard scheme uses a fixed
//! 2-slot DIFS for everyone, static differentiation uses the class's
//! difs_min, and the deadline-driven scheme recomputes a per-frame DIFS
//! from the frame's current service level each time the idle wait
//! restarts. Under the deadline-driven scheme expired frames are dropped
//! at head selection, at each idle-wait start and immediately before
//! airtime, so no frame past its deadline is ever put on the air.

use std::collections::VecDeque;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{Dur, EventHandle, SimTime};
use crate::policy::{
    frame_service_level, instantaneous_difs, is_expired, priority_key, ClassId, PhyParams,
    ServiceClass,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlowId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StationId(pub u32);

impl fmt::Display for StationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sta{}", self.0)
    }
}

/// Lookup table from class id to class definition. Ids are dense and
/// assigned in definition order.
#[derive(Debug, Clone, Default)]
pub struct ClassTable {
    classes: Vec<ServiceClass>,
}

impl ClassTable {
    pub fn new(classes: Vec<ServiceClass>) -> Self {
        for (i, c) in classes.iter().enumerate() {
            assert_eq!(c.id.0 as usize, i, "class ids must be dense and in order");
        }
        ClassTable { classes }
    }
    pub fn get(&self, id: ClassId) -> &ServiceClass {
        &self.classes[id.0 as usize]
    }
    pub fn all(&self) -> &[ServiceClass] {
        &self.classes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameKind {
    Data,
    TransportAck,
}

/// A MAC-layer data unit. `arrival` is stamped at MAC enqueue and is the
/// reference point for the frame's service level and deadline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub flow: FlowId,
    pub class: ClassId,
    pub arrival: SimTime,
    pub payload_bytes: u32,
    pub seq: u64,
    pub kind: FrameKind,
    pub retries: u32,
}

impl Frame {
    pub fn new(flow: FlowId, class: ClassId, payload_bytes: u32, seq: u64, kind: FrameKind) -> Self {
        assert!(payload_bytes > 0, "frames carry a non-empty payload");
        Frame {
            flow,
            class,
            arrival: SimTime::ZERO,
            payload_bytes,
            seq,
            kind,
            retries: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccessPolicy {
    Dcf,
    DifsDiff,
    DfDcf,
}

impl AccessPolicy {
    pub fn label(self) -> &'static str {
        match self {
            AccessPolicy::Dcf => "dcf",
            AccessPolicy::DifsDiff => "difs",
            AccessPolicy::DfDcf => "dfdcf",
        }
    }
}

impl std::str::FromStr for AccessPolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dcf" => Ok(AccessPolicy::Dcf),
            "difs" => Ok(AccessPolicy::DifsDiff),
            "dfdcf" => Ok(AccessPolicy::DfDcf),
            other => Err(format!("unknown method `{other}` (allowed: dcf, difs, dfdcf)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacConfig {
    pub cw_min: u32,
    pub cw_max: u32,
    pub retry_limit: u32,
    pub queue_capacity: usize,
    pub policy: AccessPolicy,
}

impl Default for MacConfig {
    fn default() -> Self {
        // 802.11 DSSS constants
        MacConfig {
            cw_min: 31,
            cw_max: 1023,
            retry_limit: 7,
            queue_capacity: 50,
            policy: AccessPolicy::Dcf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MacState {
    Idle,
    Contend,
    Transmitting,
    AwaitAck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnqueueOutcome {
    Accepted,
    DroppedQueueFull,
}

/// What the state machine decided after an ACK or its timeout.
#[derive(Debug, PartialEq, Eq)]
pub enum AckResult {
    Delivered(Frame),
    Retry,
    RetryDrop(Frame),
    DeadlineDrop(Frame),
}

#[derive(Debug)]
pub struct StationMac {
    pub id: StationId,
    pub cfg: MacConfig,
    pub queue: VecDeque<Frame>,
    pub current: Option<Frame>,
    pub state: MacState,
    pub cw: u32,
    pub backoff_remaining: u32,
    rng: ChaCha8Rng,
    // idle-wait bookkeeping, managed by the simulation driver
    pub timer: Option<EventHandle>,
    pub timer_at: SimTime,
    pub wait_start: SimTime,
    pub difs_in_use: Dur,
    pub tx_start: SimTime,
}

impl StationMac {
    pub fn new(id: StationId, cfg: MacConfig, seed: u64) -> Self {
        let cw = cfg.cw_min;
        StationMac {
            id,
            cfg,
            queue: VecDeque::new(),
            current: None,
            state: MacState::Idle,
            cw,
            backoff_remaining: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            timer: None,
            timer_at: SimTime::ZERO,
            wait_start: SimTime::ZERO,
            difs_in_use: Dur::ZERO,
            tx_start: SimTime::ZERO,
        }
    }

    /// Append a frame, stamping its arrival time. A full queue drops the
    /// frame (drop-tail); that is an outcome, not an error.
    pub fn enqueue(&mut self, mut frame: Frame, now: SimTime) -> EnqueueOutcome {
        if self.queue.len() >= self.cfg.queue_capacity {
            return EnqueueOutcome::DroppedQueueFull;
        }
        frame.arrival = now;
        self.queue.push_back(frame);
        EnqueueOutcome::Accepted
    }

    /// Move the next frame to transmit into `current`. Under the
    /// deadline-driven policy all expired frames are removed first (and
    /// returned as drops) and the live frame with minimal service level is
    /// chosen, ties broken by earlier arrival, then class priority, then
    /// lower sequence number. The static policies are strict FIFO with no
    /// expiry drops.
    pub fn select_head(&mut self, now: SimTime, classes: &ClassTable) -> Vec<Frame> {
        debug_assert!(self.current.is_none(), "head selected while a frame is in service");
        let mut dropped = Vec::new();
        match self.cfg.policy {
            AccessPolicy::Dcf | AccessPolicy::DifsDiff => {
                self.current = self.queue.pop_front();
            }
            AccessPolicy::DfDcf => {
                let mut i = 0;
                while i < self.queue.len() {
                    let f = &self.queue[i];
                    if is_expired(classes.get(f.class), f.arrival, now) {
                        dropped.push(self.queue.remove(i).unwrap());
                    } else {
                        i += 1;
                    }
                }
                if !self.queue.is_empty() {
                    let best = (0..self.queue.len())
                        .min_by(|&a, &b| {
                            let fa = &self.queue[a];
                            let fb = &self.queue[b];
                            let la = frame_service_level(classes.get(fa.class), fa.arrival, now).0;
                            let lb = frame_service_level(classes.get(fb.class), fb.arrival, now).0;
                            la.partial_cmp(&lb)
                                .unwrap()
                                .then(fa.arrival.cmp(&fb.arrival))
                                .then(priority_key(classes.get(fa.class)).cmp(&priority_key(classes.get(fb.class))))
                                .then(fa.seq.cmp(&fb.seq))
                        })
                        .unwrap();
                    self.current = self.queue.remove(best);
                }
            }
        }
        dropped
    }

    /// DIFS to observe for the current frame at this idle-wait start.
    pub fn access_wait_duration(&self, now: SimTime, classes: &ClassTable, phy: &PhyParams) -> Dur {
        let frame = self.current.as_ref().expect("no frame in service");
        match self.cfg.policy {
            AccessPolicy::Dcf => crate::policy::fixed_difs(2, phy),
            AccessPolicy::DifsDiff => classes.get(frame.class).difs_min,
            AccessPolicy::DfDcf => {
                let class = classes.get(frame.class);
                let fsl = frame_service_level(class, frame.arrival, now);
                instantaneous_difs(class, fsl, phy)
            }
        }
    }

    /// Uniform draw in [0, cw] from the station's seeded substream.
    pub fn draw_backoff(&mut self) -> u32 {
        self.rng.gen_range(0..=self.cw)
    }

    /// Channel went busy at `busy_at` while this station was counting down
    /// its idle wait: consume the backoff slots that fully elapsed after
    /// the DIFS and freeze. The engine timer is cancelled by the caller.
    pub fn note_busy(&mut self, busy_at: SimTime, slot: Dur) {
        if self.state != MacState::Contend {
            return;
        }
        let difs_end = self.wait_start + self.difs_in_use;
        if busy_at > difs_end {
            let elapsed = (busy_at - difs_end) / slot;
            self.backoff_remaining = self.backoff_remaining.saturating_sub(elapsed as u32);
        }
        self.timer = None;
    }

    /// Whether the current frame is past its deadline (deadline-driven
    /// policy only; the static policies never expire frames).
    pub fn current_expired(&self, now: SimTime, classes: &ClassTable) -> bool {
        if self.cfg.policy != AccessPolicy::DfDcf {
            return false;
        }
        match &self.current {
            Some(f) => is_expired(classes.get(f.class), f.arrival, now),
            None => false,
        }
    }

    /// ACK received or its timeout fired while awaiting the MAC ACK.
    pub fn on_ack_or_timeout(&mut self, acked: bool, now: SimTime, classes: &ClassTable) -> AckResult {
        debug_assert_eq!(self.state, MacState::AwaitAck);
        if acked {
            self.cw = self.cfg.cw_min;
            let frame = self.current.take().expect("ack without a frame in service");
            self.state = MacState::Idle;
            return AckResult::Delivered(frame);
        }
        let frame = self.current.as_mut().expect("timeout without a frame in service");
        frame.retries += 1;
        self.cw = self.cfg.cw_max.min((self.cw + 1) * 2 - 1);
        if frame.retries > self.cfg.retry_limit {
            self.cw = self.cfg.cw_min;
            let frame = self.current.take().unwrap();
            self.state = MacState::Idle;
            return AckResult::RetryDrop(frame);
        }
        // expiry re-check before any retransmission attempt
        if self.current_expired(now, classes) {
            self.cw = self.cfg.cw_min;
            let frame = self.current.take().unwrap();
            self.state = MacState::Idle;
            return AckResult::DeadlineDrop(frame);
        }
        AckResult::Retry
    }
}

/// On-air payload: a data frame heading to `dest`, or a MAC-level ACK
/// confirming `data_from`'s transmission.
#[derive(Debug, Clone)]
pub enum AirFrame {
    Data { frame: Frame, src: StationId, dest: StationId },
    MacAck { data_from: StationId },
}

#[derive(Debug, Clone)]
struct ActiveTx {
    id: u64,
    end: SimTime,
    collided: bool,
    payload: AirFrame,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TxOutcome {
    Clean,
    Collided,
}

/// Ideal shared medium: zero propagation delay, no capture, no bit
/// errors. Any two transmissions that overlap in time are both collided.
#[derive(Debug)]
pub struct Channel {
    active: Vec<ActiveTx>,
    pub idle_since: SimTime,
    next_tx_id: u64,
}

impl Channel {
    pub fn new() -> Self {
        Channel {
            active: Vec::new(),
            idle_since: SimTime::ZERO,
            next_tx_id: 0,
        }
    }

    pub fn busy(&self) -> bool {
        !self.active.is_empty()
    }

    /// Start a transmission ending at `end`. Returns its id and whether
    /// the channel was idle beforehand (a busy start means a collision was
    /// just created).
    pub fn begin(&mut self, payload: AirFrame, end: SimTime) -> (u64, bool) {
        let was_idle = self.active.is_empty();
        let collided = !was_idle;
        if collided {
            for tx in &mut self.active {
                tx.collided = true;
            }
        }
        let id = self.next_tx_id;
        self.next_tx_id += 1;
        self.active.push(ActiveTx {
            id,
            end,
            collided,
            payload,
        });
        (id, was_idle)
    }

    /// A transmission reached its end time. Returns the payload, its
    /// outcome, and whether the channel is idle now.
    pub fn finish(&mut self, tx_id: u64, now: SimTime) -> (AirFrame, TxOutcome, bool) {
        let idx = self
            .active
            .iter()
            .position(|tx| tx.id == tx_id)
            .expect("finishing a transmission that is not active");
        debug_assert_eq!(self.active[idx].end, now);
        let tx = self.active.remove(idx);
        let idle = self.active.is_empty();
        if idle {
            self.idle_since = now;
        }
        let outcome = if tx.collided { TxOutcome::Collided } else { TxOutcome::Clean };
        (tx.payload, outcome, idle)
    }

    /// Number of currently active transmissions not marked collided.
    /// Channel exclusivity demands this never exceeds one.
    pub fn clean_in_flight(&self) -> usize {
        self.active.iter().filter(|tx| !tx.collided).count()
    }
}

impl Default for Channel {
    fn default() -> Self {
        Self::new()
    }
}

/// Airtime of a data frame: PLCP overhead plus (MAC header + payload)
/// serialized at the radio rate.
pub fn frame_airtime(payload_bytes: u32, phy: &PhyParams) -> Dur {
    let bits = (phy.mac_header_bytes as u64 + payload_bytes as u64) * 8;
    phy.plcp_overhead + serialize_ns(bits, phy.data_rate_bps)
}

/// Airtime of a MAC-level ACK (no MAC data header).
pub fn ack_airtime(phy: &PhyParams) -> Dur {
    phy.plcp_overhead + serialize_ns(phy.ack_frame_bytes as u64 * 8, phy.data_rate_bps)
}

/// How long a sender waits for the MAC ACK before declaring a loss.
pub fn ack_timeout(phy: &PhyParams) -> Dur {
    phy.sifs + ack_airtime(phy) + phy.slot_time * 2
}

fn serialize_ns(bits: u64, rate_bps: u64) -> Dur {
    Dur::from_ns((bits as u128 * 1_000_000_000 / rate_bps as u128) as u64)
}
