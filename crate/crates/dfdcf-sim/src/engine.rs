//! Deterministic discrete-event core: virtual clock, time-ordered event
//! queue, cancellation handles.
//!
//! Time is kept as integer nanoseconds so every configured duration
//! (µs, ms, s) converts exactly and two runs with the same inputs replay
//! the same event sequence. Events with equal timestamps execute in
//! insertion order.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Sub};

/// An instant on the simulation clock, in nanoseconds since start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SimTime(u64);

/// A span of simulated time, in nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Dur(u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);

    pub const fn from_ns(ns: u64) -> Self {
        SimTime(ns)
    }
    pub const fn from_us(us: u64) -> Self {
        SimTime(us * 1_000)
    }
    pub const fn from_ms(ms: u64) -> Self {
        SimTime(ms * 1_000_000)
    }
    pub const fn from_secs(s: u64) -> Self {
        SimTime(s * 1_000_000_000)
    }
    pub const fn as_ns(self) -> u64 {
        self.0
    }
    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / 1e9
    }
    /// Whole seconds elapsed, rounding down. Used for per-second buckets.
    pub const fn whole_secs(self) -> u64 {
        self.0 / 1_000_000_000
    }
    pub fn saturating_sub(self, other: SimTime) -> Dur {
        Dur(self.0.saturating_sub(other.0))
    }
}

impl Dur {
    pub const ZERO: Dur = Dur(0);

    pub const fn from_ns(ns: u64) -> Self {
        Dur(ns)
    }
    pub const fn from_us(us: u64) -> Self {
        Dur(us * 1_000)
    }
    pub const fn from_ms(ms: u64) -> Self {
        Dur(ms * 1_000_000)
    }
    pub const fn from_secs(s: u64) -> Self {
        Dur(s * 1_000_000_000)
    }
    pub const fn as_ns(self) -> u64 {
        self.0
    }
    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / 1e9
    }
    pub fn as_millis_f64(self) -> f64 {
        self.0 as f64 / 1e6
    }
}

impl Add<Dur> for SimTime {
    type Output = SimTime;
    fn add(self, rhs: Dur) -> SimTime {
        SimTime(self.0 + rhs.0)
    }
}
impl AddAssign<Dur> for SimTime {
    fn add_assign(&mut self, rhs: Dur) {
        self.0 += rhs.0;
    }
}
impl Sub<SimTime> for SimTime {
    type Output = Dur;
    fn sub(self, rhs: SimTime) -> Dur {
        Dur(self.0 - rhs.0)
    }
}
impl Sub<Dur> for SimTime {
    type Output = SimTime;
    fn sub(self, rhs: Dur) -> SimTime {
        SimTime(self.0 - rhs.0)
    }
}
impl Add for Dur {
    type Output = Dur;
    fn add(self, rhs: Dur) -> Dur {
        Dur(self.0 + rhs.0)
    }
}
impl Sub for Dur {
    type Output = Dur;
    fn sub(self, rhs: Dur) -> Dur {
        Dur(self.0 - rhs.0)
    }
}
impl Mul<u64> for Dur {
    type Output = Dur;
    fn mul(self, rhs: u64) -> Dur {
        Dur(self.0 * rhs)
    }
}
impl Div<Dur> for Dur {
    type Output = u64;
    fn div(self, rhs: Dur) -> u64 {
        self.0 / rhs.0
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}s", self.as_secs_f64())
    }
}
impl fmt::Display for Dur {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}ns", self.0)
    }
}

/// Opaque ticket for a pending event; valid until the event fires or is
/// cancelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EventHandle(u64);

/// Event queue plus virtual clock. `E` is the payload the simulation
/// dispatches on.
#[derive(Debug)]
pub struct Engine<E> {
    now: SimTime,
    next_seq: u64,
    heap: BinaryHeap<Reverse<(SimTime, u64)>>,
    pending: HashMap<u64, E>,
}

impl<E> Engine<E> {
    pub fn new() -> Self {
        Engine {
            now: SimTime::ZERO,
            next_seq: 0,
            heap: BinaryHeap::new(),
            pending: HashMap::new(),
        }
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    /// Schedule `event` at `fire_at`. Scheduling in the past is a
    /// programming error and panics.
    pub fn schedule(&mut self, fire_at: SimTime, event: E) -> EventHandle {
        assert!(
            fire_at >= self.now,
            "schedule in the past: fire_at {} < now {}",
            fire_at,
            self.now
        );
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Reverse((fire_at, seq)));
        self.pending.insert(seq, event);
        EventHandle(seq)
    }

    /// Convenience: schedule `delay` after the current clock.
    pub fn schedule_in(&mut self, delay: Dur, event: E) -> EventHandle {
        self.schedule(self.now + delay, event)
    }

    /// Remove a pending event. Returns true iff it was still pending;
    /// cancelled events never fire.
    pub fn cancel(&mut self, handle: EventHandle) -> bool {
        self.pending.remove(&handle.0).is_some()
    }

    pub fn pending_len(&self) -> usize {
        self.pending.len()
    }

    fn pop_due(&mut self, until: SimTime) -> Option<(SimTime, E)> {
        while let Some(&Reverse((t, seq))) = self.heap.peek() {
            if t > until {
                return None;
            }
            self.heap.pop();
            if let Some(ev) = self.pending.remove(&seq) {
                debug_assert!(t >= self.now, "clock would move backwards");
                self.now = t;
                return Some((t, ev));
            }
            // cancelled entry, skip the tombstone
        }
        None
    }

    /// Execute every event with `fire_at <= until` in (fire_at, insertion)
    /// order, calling `handler` for each. The clock ends at `until`.
    /// Returns the number of events executed.
    pub fn run<F>(&mut self, until: SimTime, mut handler: F) -> u64
    where
        F: FnMut(&mut Engine<E>, SimTime, E),
    {
        let mut executed = 0;
        while let Some((t, ev)) = self.pop_due(until) {
            handler(self, t, ev);
            executed += 1;
        }
        if until > self.now {
            self.now = until;
        }
        executed
    }
}

impl<E> Default for Engine<E> {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_timestamp_executes_in_insertion_order() {
        let mut eng = Engine::new();
        let t = SimTime::from_ms(5);
        eng.schedule(t, "a");
        eng.schedule(t, "b");
        eng.schedule(SimTime::ZERO, "first");
        let mut seen = Vec::new();
        eng.run(SimTime::from_secs(1), |_, _, e| seen.push(e));
        assert_eq!(seen, vec!["first", "a", "b"]);
    }

    #[test]
    fn schedule_at_now_fires_before_later_events() {
        let mut eng: Engine<u32> = Engine::new();
        eng.schedule(SimTime::from_ms(1), 2);
        eng.schedule(SimTime::ZERO, 1);
        let mut seen = Vec::new();
        eng.run(SimTime::from_secs(1), |_, _, e| seen.push(e));
        assert_eq!(seen, vec![1, 2]);
    }

    #[test]
    #[should_panic(expected = "schedule in the past")]
    fn schedule_in_the_past_rejected() {
        let mut eng = Engine::new();
        eng.schedule(SimTime::from_secs(1), ());
        eng.run(SimTime::from_secs(2), |_, _, _| {});
        eng.schedule(SimTime::from_secs(1), ());
    }

    #[test]
    fn cancel_pending_then_again() {
        let mut eng = Engine::new();
        let h = eng.schedule(SimTime::from_ms(1), ());
        assert!(eng.cancel(h));
        assert!(!eng.cancel(h));
        let n = eng.run(SimTime::from_secs(1), |_, _, _| {});
        assert_eq!(n, 0);
    }

    #[test]
    fn cancel_after_fire_returns_false() {
        let mut eng = Engine::new();
        let h = eng.schedule(SimTime::from_ms(1), ());
        eng.run(SimTime::from_secs(1), |_, _, _| {});
        assert!(!eng.cancel(h));
    }

    #[test]
    fn empty_run_advances_clock_to_horizon() {
        let mut eng: Engine<()> = Engine::new();
        let n = eng.run(SimTime::from_secs(250), |_, _, _| {});
        assert_eq!(n, 0);
        assert_eq!(eng.now(), SimTime::from_secs(250));
    }

    #[test]
    fn staggered_events_execute_in_time_order() {
        let mut eng = Engine::new();
        for s in [100u64, 50, 150] {
            eng.schedule(SimTime::from_secs(s), s);
        }
        let mut seen = Vec::new();
        let n = eng.run(SimTime::from_secs(250), |_, t, e| seen.push((t, e)));
        assert_eq!(n, 3);
        assert_eq!(
            seen,
            vec![
                (SimTime::from_secs(50), 50),
                (SimTime::from_secs(100), 100),
                (SimTime::from_secs(150), 150),
            ]
        );
    }

    #[test]
    fn event_beyond_horizon_stays_pending() {
        let mut eng = Engine::new();
        eng.schedule(SimTime::from_secs(150), ());
        let n = eng.run(SimTime::from_secs(100), |_, _, _| {});
        assert_eq!(n, 0);
        assert_eq!(eng.pending_len(), 1);
        assert_eq!(eng.now(), SimTime::from_secs(100));
    }

    #[test]
    fn events_scheduled_during_run_execute() {
        let mut eng = Engine::new();
        eng.schedule(SimTime::from_ms(1), 0u32);
        let mut seen = Vec::new();
        eng.run(SimTime::from_secs(1), |eng, t, depth| {
            seen.push(depth);
            if depth < 3 {
                eng.schedule(t + Dur::from_ms(1), depth + 1);
            }
        });
        assert_eq!(seen, vec![0, 1, 2, 3]);
    }
}
