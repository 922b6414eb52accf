//! The arithmetic behind deadline-driven access, worked by hand: how a
//! frame's service level decays over its lifetime, how that level maps to
//! an instantaneous DIFS, and when two frames of different classes swap
//! urgency.
//!
//!     cargo run --release --example service_level_math

use dfdcf_sim::engine::{Dur, SimTime};
use dfdcf_sim::policy::{
    frame_service_level, fsl_crossing_time, instantaneous_difs, is_expired, Crossing, ClassId,
    PhyParams, ServiceClass,
};

fn main() {
    let phy = PhyParams::dsss_1mbps();
    // 300 ms lifetime, DIFS interpolated between 50 µs (urgent) and 130 µs (fresh)
    let a = ServiceClass::new(ClassId(0), "A", Dur::from_ms(300), Dur::from_us(50), Dur::from_us(130), &phy)
        .expect("integral slot counts");
    // tighter class: 150 ms lifetime, same DIFS range
    let b = ServiceClass::new(ClassId(1), "B", Dur::from_ms(150), Dur::from_us(50), Dur::from_us(130), &phy)
        .expect("integral slot counts");

    // a frame of class A arrives at t = 0; its service level is an affine
    // countdown from 1 at arrival to 0 at the deadline
    let arrival = SimTime::ZERO;
    println!("class A frame arriving at 0 ms:");
    for ms in [0u64, 75, 150, 225, 300] {
        let now = SimTime::from_ms(ms);
        let level = frame_service_level(&a, arrival, now);
        let difs = instantaneous_difs(&a, level, &phy);
        println!(
            "  t = {ms:>3} ms  level {:>5.3}  DIFS {:>3} us  expired: {}",
            level.value(),
            difs.as_ns() / 1_000,
            is_expired(&a, arrival, now)
        );
    }

    // a class-B frame arriving 100 ms later decays faster; the two curves
    // cross and the scheduler's preference flips at that instant
    let b_arrival = SimTime::from_ms(100);
    match fsl_crossing_time(&a, arrival, &b, b_arrival) {
        Crossing::At(t) => {
            println!("\nthe class-B frame arriving at 100 ms overtakes at t = {t}");
            let la = frame_service_level(&a, arrival, t).value();
            let lb = frame_service_level(&b, b_arrival, t).value();
            println!("both levels equal {la:.4} / {lb:.4} at the crossing");
            assert_eq!(t, SimTime::from_ms(200));
        }
        other => panic!("expected a crossing, got {other:?}"),
    }
}
