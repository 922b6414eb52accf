//! Service classes and the deadline-driven access policy math: per-frame
//! service level, fixed and instantaneous DIFS, expiry testing, class
//! priority ordering.
//!
//! A service class is the triplet (temax, difs_min, difs_max). A frame's
//! service level starts at 1.0 on arrival and decays linearly to 0.0 at
//! arrival + temax; the instantaneous DIFS interpolates between the class
//! DIFS bounds by that level, so a frame nearing its deadline waits less
//! before contending. A frame whose level reaches zero is dropped, never
//! transmitted.

use std::fmt;

use thiserror::Error;

use crate::engine::{Dur, SimTime};

/// Numeric class identifier; assignment order doubles as the final
/// priority tiebreak.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassId(pub u32);

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "class#{}", self.0)
    }
}

/// Physical-layer constants shared by every station.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhyParams {
    pub sifs: Dur,
    pub slot_time: Dur,
    pub data_rate_bps: u64,
    pub plcp_overhead: Dur,
    pub mac_header_bytes: u32,
    pub ack_frame_bytes: u32,
}

impl PhyParams {
    /// 802.11 DSSS defaults at 1 Mb/s radio rate.
    pub fn dsss_1mbps() -> Self {
        PhyParams {
            sifs: Dur::from_us(10),
            slot_time: Dur::from_us(20),
            data_rate_bps: 1_000_000,
            plcp_overhead: Dur::from_us(192),
            mac_header_bytes: 28,
            ack_frame_bytes: 14,
        }
    }

    pub fn validate(&self) -> Result<(), PolicyError> {
        if self.sifs == Dur::ZERO || self.slot_time == Dur::ZERO || self.data_rate_bps == 0 {
            return Err(PolicyError::InvalidPhy);
        }
        Ok(())
    }
}

/// One QoS class: deadline budget plus the DIFS interpolation range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceClass {
    pub id: ClassId,
    pub name: String,
    pub temax: Dur,
    pub difs_min: Dur,
    pub difs_max: Dur,
    pub nb_slot_min: u64,
    pub nb_slot_max: u64,
}

impl ServiceClass {
    /// Build a class, checking that both DIFS bounds sit on integral slot
    /// boundaries above SIFS and that the bounds are ordered.
    pub fn new(
        id: ClassId,
        name: &str,
        temax: Dur,
        difs_min: Dur,
        difs_max: Dur,
        phy: &PhyParams,
    ) -> Result<Self, PolicyError> {
        if temax == Dur::ZERO {
            return Err(PolicyError::ZeroTemax { class: name.to_string() });
        }
        let nb_slot_min = nb_slots_from_difs(difs_min, phy)?;
        let nb_slot_max = nb_slots_from_difs(difs_max, phy)?;
        if nb_slot_min > nb_slot_max {
            return Err(PolicyError::DifsBoundsReversed {
                class: name.to_string(),
                difs_min,
                difs_max,
            });
        }
        Ok(ServiceClass {
            id,
            name: name.to_string(),
            temax,
            difs_min,
            difs_max,
            nb_slot_min,
            nb_slot_max,
        })
    }
}

/// Residual-lifetime fraction of a frame: 1.0 at arrival, 0.0 at the
/// deadline. Values at or below zero mean the frame has expired and must
/// be dropped by the caller, never clamped and used.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ServiceLevel(pub f64);

impl ServiceLevel {
    pub fn value(self) -> f64 {
        self.0
    }
    pub fn expired(self) -> bool {
        self.0 <= 0.0
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolicyError {
    #[error("DIFS {difs} is not SIFS + an integral number of slots (slot {slot})")]
    NonIntegralSlots { difs: Dur, slot: Dur },
    #[error("DIFS {difs} is below SIFS {sifs}")]
    DifsBelowSifs { difs: Dur, sifs: Dur },
    #[error("class {class}: temax must be positive")]
    ZeroTemax { class: String },
    #[error("class {class}: difs_min {difs_min} exceeds difs_max {difs_max}")]
    DifsBoundsReversed { class: String, difs_min: Dur, difs_max: Dur },
    #[error("phy parameters must be positive")]
    InvalidPhy,
}

/// Service level of a frame of `class` that arrived at `arrival`,
/// evaluated at `now`: (temax + arrival - now) / temax.
pub fn frame_service_level(class: &ServiceClass, arrival: SimTime, now: SimTime) -> ServiceLevel {
    debug_assert!(now >= arrival, "service level evaluated before arrival");
    let temax = class.temax.as_ns() as i128;
    let numer = temax + arrival.as_ns() as i128 - now.as_ns() as i128;
    ServiceLevel(numer as f64 / temax as f64)
}

/// A frame is expired once `now` reaches arrival + temax; the boundary
/// counts as expired.
pub fn is_expired(class: &ServiceClass, arrival: SimTime, now: SimTime) -> bool {
    now >= arrival + class.temax
}

/// Per-frame DIFS for the deadline-driven policy:
/// SIFS + (nb_min + (nb_max - nb_min) * fsl) * SlotTime, rounded to the
/// nearest nanosecond (ties up). Monotone non-decreasing in `fsl` and
/// always inside [difs_min, difs_max].
pub fn instantaneous_difs(class: &ServiceClass, fsl: ServiceLevel, phy: &PhyParams) -> Dur {
    let v = fsl.value();
    assert!(
        (0.0..=1.0).contains(&v),
        "instantaneous DIFS for out-of-range service level {v}; expired frames must be dropped upstream"
    );
    let slots = class.nb_slot_min as f64 + (class.nb_slot_max - class.nb_slot_min) as f64 * v;
    let ns = phy.sifs.as_ns() as f64 + slots * phy.slot_time.as_ns() as f64;
    let rounded = Dur::from_ns((ns + 0.5).floor() as u64);
    rounded.clamp(class.difs_min, class.difs_max)
}

/// Fixed DIFS of the standard/static schemes: SIFS + nb_slots * SlotTime.
pub fn fixed_difs(nb_slots: u64, phy: &PhyParams) -> Dur {
    phy.sifs + phy.slot_time * nb_slots
}

/// Invert `fixed_difs`: the integral slot count for a configured DIFS.
/// Non-integral counts are configuration errors.
pub fn nb_slots_from_difs(difs: Dur, phy: &PhyParams) -> Result<u64, PolicyError> {
    if difs < phy.sifs {
        return Err(PolicyError::DifsBelowSifs { difs, sifs: phy.sifs });
    }
    let excess = (difs - phy.sifs).as_ns();
    let slot = phy.slot_time.as_ns();
    if excess % slot != 0 {
        return Err(PolicyError::NonIntegralSlots { difs, slot: phy.slot_time });
    }
    Ok(excess / slot)
}

/// Most- to least-priority ordering: ascending temax, then difs_min, then
/// difs_max, then id.
pub fn class_priority_order(classes: &[ServiceClass]) -> Vec<ClassId> {
    let mut order: Vec<&ServiceClass> = classes.iter().collect();
    order.sort_by_key(|c| (c.temax, c.difs_min, c.difs_max, c.id));
    order.into_iter().map(|c| c.id).collect()
}

/// Rank of a class in the priority order; lower ranks sooner. Used as a
/// head-selection tiebreak.
pub fn priority_key(class: &ServiceClass) -> (Dur, Dur, Dur, ClassId) {
    (class.temax, class.difs_min, class.difs_max, class.id)
}

/// Where two frames' service-level lines intersect, if anywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    /// Unique intersection inside both lifetimes.
    At(SimTime),
    /// Coincident lines: the two levels are equal at every instant.
    AlwaysEqual,
    /// Parallel or out-of-lifetime intersection.
    None,
}

/// Solve FSL_a(t) = FSL_b(t) for two live frames. The intersection is
/// reported only if it falls inside both frames' lifetimes.
pub fn fsl_crossing_time(
    class_a: &ServiceClass,
    arrival_a: SimTime,
    class_b: &ServiceClass,
    arrival_b: SimTime,
) -> Crossing {
    let ta = class_a.temax.as_ns() as i128;
    let tb = class_b.temax.as_ns() as i128;
    let aa = arrival_a.as_ns() as i128;
    let ab = arrival_b.as_ns() as i128;
    if ta == tb {
        return if aa == ab { Crossing::AlwaysEqual } else { Crossing::None };
    }
    // (Ta + aa - t)/Ta = (Tb + ab - t)/Tb  =>  t = (Ta*ab - Tb*aa)/(Ta - Tb)
    let t = div_round_half_up(ta * ab - tb * aa, ta - tb);
    let lo = aa.max(ab);
    let hi = (aa + ta).min(ab + tb);
    if t < lo || t > hi || t < 0 {
        return Crossing::None;
    }
    Crossing::At(SimTime::from_ns(t as u64))
}

fn div_round_half_up(num: i128, den: i128) -> i128 {
    // normalize so the divisor is positive, then round half toward +inf
    let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
    (2 * num + den).div_euclid(2 * den)
}

impl Dur {
    fn clamp(self, lo: Dur, hi: Dur) -> Dur {
        if self < lo {
            lo
        } else if self > hi {
            hi
        } else {
            self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phy() -> PhyParams {
        PhyParams::dsss_1mbps()
    }

    fn cbr1() -> ServiceClass {
        ServiceClass::new(
            ClassId(0),
            "CBR1",
            Dur::from_ms(150),
            Dur::from_us(50),
            Dur::from_us(130),
            &phy(),
        )
        .unwrap()
    }

    #[test]
    fn fsl_fresh_frame_is_one() {
        let t = SimTime::from_secs(50);
        assert_eq!(frame_service_level(&cbr1(), t, t).value(), 1.0);
    }

    #[test]
    fn fsl_at_deadline_is_zero() {
        let arr = SimTime::from_secs(50);
        let now = arr + Dur::from_ms(150);
        assert_eq!(frame_service_level(&cbr1(), arr, now).value(), 0.0);
    }

    #[test]
    fn fsl_midlife_half() {
        let arr = SimTime::from_secs(50);
        let now = SimTime::from_ns(50_075_000_000);
        assert_eq!(frame_service_level(&cbr1(), arr, now).value(), 0.5);
    }

    #[test]
    fn expiry_boundary_counts_as_expired() {
        let c = cbr1();
        let arr = SimTime::from_secs(50);
        assert!(is_expired(&c, arr, arr + c.temax));
        assert!(!is_expired(&c, arr, arr + (c.temax - Dur::from_ns(1))));
        assert!(is_expired(&c, arr, SimTime::from_ms(50_200)));
    }

    #[test]
    fn instantaneous_difs_endpoints_and_midpoint() {
        let c = cbr1();
        let p = phy();
        assert_eq!(instantaneous_difs(&c, ServiceLevel(0.0), &p), Dur::from_us(50));
        assert_eq!(instantaneous_difs(&c, ServiceLevel(1.0), &p), Dur::from_us(130));
        assert_eq!(instantaneous_difs(&c, ServiceLevel(0.5), &p), Dur::from_us(90));
    }

    #[test]
    #[should_panic(expected = "out-of-range service level")]
    fn instantaneous_difs_rejects_expired_level() {
        instantaneous_difs(&cbr1(), ServiceLevel(-0.1), &phy());
    }

    #[test]
    fn fixed_difs_values() {
        let p = phy();
        assert_eq!(fixed_difs(2, &p), Dur::from_us(50));
        assert_eq!(fixed_difs(6, &p), Dur::from_us(130));
        assert_eq!(fixed_difs(0, &p), p.sifs);
    }

    #[test]
    fn slot_inversion() {
        let p = phy();
        assert_eq!(nb_slots_from_difs(Dur::from_us(290), &p).unwrap(), 14);
        assert_eq!(nb_slots_from_difs(Dur::from_us(210), &p).unwrap(), 10);
        assert!(matches!(
            nb_slots_from_difs(Dur::from_us(55), &p),
            Err(PolicyError::NonIntegralSlots { .. })
        ));
    }

    #[test]
    fn priority_order_table1() {
        let p = phy();
        let classes = vec![
            ServiceClass::new(ClassId(0), "CBR1", Dur::from_ms(150), Dur::from_us(50), Dur::from_us(130), &p).unwrap(),
            ServiceClass::new(ClassId(1), "CBR2", Dur::from_ms(250), Dur::from_us(130), Dur::from_us(210), &p).unwrap(),
            ServiceClass::new(ClassId(2), "CBR3", Dur::from_ms(350), Dur::from_us(210), Dur::from_us(290), &p).unwrap(),
        ];
        assert_eq!(class_priority_order(&classes), vec![ClassId(0), ClassId(1), ClassId(2)]);
    }

    #[test]
    fn priority_order_equal_temax_falls_to_difs_min() {
        let p = phy();
        let t = Dur::from_ms(375);
        let classes = vec![
            ServiceClass::new(ClassId(2), "C", t, Dur::from_us(210), Dur::from_us(290), &p).unwrap(),
            ServiceClass::new(ClassId(0), "A", t, Dur::from_us(50), Dur::from_us(130), &p).unwrap(),
            ServiceClass::new(ClassId(1), "B", t, Dur::from_us(130), Dur::from_us(210), &p).unwrap(),
        ];
        assert_eq!(class_priority_order(&classes), vec![ClassId(0), ClassId(1), ClassId(2)]);
    }

    #[test]
    fn priority_order_identical_classes_by_id() {
        let p = phy();
        let t = Dur::from_ms(375);
        let classes = vec![
            ServiceClass::new(ClassId(5), "B", t, Dur::from_us(50), Dur::from_us(130), &p).unwrap(),
            ServiceClass::new(ClassId(3), "A", t, Dur::from_us(50), Dur::from_us(130), &p).unwrap(),
        ];
        assert_eq!(class_priority_order(&classes), vec![ClassId(3), ClassId(5)]);
    }

    #[test]
    fn crossing_worked_example() {
        let p = phy();
        let a = ServiceClass::new(ClassId(0), "A", Dur::from_ms(300), Dur::from_us(50), Dur::from_us(130), &p).unwrap();
        let b = ServiceClass::new(ClassId(1), "B", Dur::from_ms(150), Dur::from_us(130), Dur::from_us(210), &p).unwrap();
        let cross = fsl_crossing_time(&a, SimTime::ZERO, &b, SimTime::from_ms(100));
        assert_eq!(cross, Crossing::At(SimTime::from_ms(200)));
        // both levels are 1/3 at the crossing
        let t = SimTime::from_ms(200);
        let la = frame_service_level(&a, SimTime::ZERO, t).value();
        let lb = frame_service_level(&b, SimTime::from_ms(100), t).value();
        assert!((la - lb).abs() < 1e-12);
        assert!((la - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn crossing_coincident_and_parallel() {
        let p = phy();
        let a = ServiceClass::new(ClassId(0), "A", Dur::from_ms(150), Dur::from_us(50), Dur::from_us(130), &p).unwrap();
        let b = ServiceClass::new(ClassId(1), "B", Dur::from_ms(150), Dur::from_us(130), Dur::from_us(210), &p).unwrap();
        assert_eq!(fsl_crossing_time(&a, SimTime::ZERO, &b, SimTime::ZERO), Crossing::AlwaysEqual);
        assert_eq!(
            fsl_crossing_time(&a, SimTime::ZERO, &b, SimTime::from_ms(50)),
            Crossing::None
        );
    }
}
