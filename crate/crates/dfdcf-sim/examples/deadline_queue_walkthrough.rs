//! Drive a single station queue by hand: enqueue frames of two classes,
//! watch the deadline scheduler pick the most urgent head, and see an
//! expired frame shed at selection time.
//!
//!     cargo run --release --example deadline_queue_walkthrough

use dfdcf_sim::engine::{Dur, SimTime};
use dfdcf_sim::mac::{
    AccessPolicy, ClassTable, FlowId, Frame, FrameKind, MacConfig, StationId, StationMac,
};
use dfdcf_sim::policy::{ClassId, PhyParams, ServiceClass};

fn main() {
    let phy = PhyParams::dsss_1mbps();
    let classes = ClassTable::new(vec![
        ServiceClass::new(ClassId(0), "slow", Dur::from_ms(300), Dur::from_us(50), Dur::from_us(130), &phy)
            .unwrap(),
        ServiceClass::new(ClassId(1), "fast", Dur::from_ms(150), Dur::from_us(50), Dur::from_us(130), &phy)
            .unwrap(),
    ]);

    let cfg = MacConfig { policy: AccessPolicy::DfDcf, ..MacConfig::default() };
    let mut station = StationMac::new(StationId(1), cfg, 7);

    // a slow-class frame at t = 0, a fast-class frame at t = 100 ms
    station.enqueue(Frame::new(FlowId(0), ClassId(0), 500, 0, FrameKind::Data), SimTime::ZERO);
    station.enqueue(Frame::new(FlowId(1), ClassId(1), 500, 0, FrameKind::Data), SimTime::from_ms(100));

    // before their urgency curves cross, the older slow frame leads
    let before = SimTime::from_ms(150);
    station.select_head(before, &classes);
    let head = station.current.as_ref().unwrap().class;
    println!("head at 150 ms: class {head:?}");
    assert_eq!(head, ClassId(0));

    // after the crossing at 200 ms, the fast frame has become more urgent
    let after = SimTime::from_ms(201);
    station.select_head(after, &classes);
    let head = station.current.as_ref().unwrap().class;
    println!("head at 201 ms: class {head:?}");
    assert_eq!(head, ClassId(1));

    // the access wait shrinks as the head frame approaches its deadline
    for ms in [201u64, 230, 249] {
        let wait = station.access_wait_duration(SimTime::from_ms(ms), &classes, &phy);
        println!("access wait at {ms} ms: {} us (DIFS + drawn backoff)", wait.as_ns() / 1_000);
    }

    // past a frame's deadline, selection sheds it instead of serving it
    let mut late = StationMac::new(StationId(2), MacConfig { policy: AccessPolicy::DfDcf, ..MacConfig::default() }, 9);
    late.enqueue(Frame::new(FlowId(1), ClassId(1), 500, 1, FrameKind::Data), SimTime::ZERO);
    let dropped = late.select_head(SimTime::from_ms(150), &classes);
    println!("frames shed at selection once expired: {}", dropped.len());
    assert_eq!(dropped.len(), 1);
    assert!(late.current.is_none());
}
