//! The eight uplink/downlink rate regions and the geometry used to compare
//! them.
//!
//! All rates are in bits per complex channel use and all logarithms are base
//! 2. Outer regions are cut-set style bounds; inner regions are what the
//! lattice uplink and the three-phase downlink achieve. Each inner region is
//! its outer region shifted by a constant gap vector, except for the
//! instantaneous-state downlink where inner and outer coincide.

mod export;
mod gap;
mod geometry;
mod types;

pub use export::{vertices_csv, RegionRecord, SnrDb};
pub use gap::{gap_certificate, GapCertificate, GapWitness, GAP_TOL};
pub use geometry::{
    Bound, HalfPlane, Link, RateRegion, RegionKind, StateInfo, DEDUP_TOL, FEAS_TOL,
};
pub use types::{
    cap, ActivityProb, ChannelConfig, GapVector, RatePair, Snr, REFERENCE_STRONG_DB,
    REFERENCE_WEAK_DB,
};

pub(crate) use types::log2_1p;

use crate::error::Result;

fn c(x: f64) -> f64 {
    log2_1p(x)
}

/// Uplink constraints with the two uplink SNRs already substituted.
fn uplink_constraints(p: f64, s1: f64, s2: f64) -> Vec<HalfPlane> {
    let sum = p * ((1.0 - p) * (c(s1) + c(s2)) + p * c(s1 + s2 + 2.0 * (s1 * s2).sqrt()));
    vec![
        HalfPlane::r1_at_most(p * c(s1)).expect("finite"),
        HalfPlane::r2_at_most(p * c(s2)).expect("finite"),
        HalfPlane::sum_at_most(sum).expect("finite"),
    ]
}

pub fn ul_outer_delayed(cfg: &ChannelConfig) -> RateRegion {
    RateRegion::new(
        RegionKind::link(Link::Uplink, StateInfo::Delayed, Bound::Outer),
        uplink_constraints(cfg.p(), cfg.snr_r1(), cfg.snr_r2()),
    )
}

pub fn ul_inner_delayed(cfg: &ChannelConfig) -> RateRegion {
    ul_outer_delayed(cfg)
        .ominus(uplink_gap())
        .with_kind(RegionKind::link(
            Link::Uplink,
            StateInfo::Delayed,
            Bound::Inner,
        ))
}

/// Uplink with instantaneous state: every uplink SNR becomes `SNR / p`
/// (on/off power allocation). The inner variant is shifted by `(1, 1)`.
pub fn ul_instant(cfg: &ChannelConfig, bound: Bound) -> RateRegion {
    let p = cfg.p();
    let outer = RateRegion::new(
        RegionKind::link(Link::Uplink, StateInfo::Instantaneous, Bound::Outer),
        uplink_constraints(p, cfg.snr_r1() / p, cfg.snr_r2() / p),
    );
    match bound {
        Bound::Outer => outer,
        Bound::Inner => outer.ominus(uplink_gap()).with_kind(RegionKind::link(
            Link::Uplink,
            StateInfo::Instantaneous,
            Bound::Inner,
        )),
    }
}

/// Uplink inner regions sit `(1, 1)` below their outer regions.
pub fn uplink_gap() -> GapVector {
    GapVector::new(1.0, 1.0).expect("positive")
}

/// Downlink outer bound with delayed state at the relay:
///
/// ```text
/// R2/p                   <= C(SNR_2R)
/// R1/p + R2/(p(2-p))     <= C(SNR_1R)
/// R1/(p(2-p)) + R2/p     <= (C(SNR_1R) - C(SNR_2R))/(2-p) + C(SNR_2R)
/// ```
pub fn dl_outer_delayed(cfg: &ChannelConfig) -> RateRegion {
    let p = cfg.p();
    let q = p * (2.0 - p);
    let (c1, c2) = (c(cfg.snr_1r()), c(cfg.snr_2r()));
    RateRegion::new(
        RegionKind::link(Link::Downlink, StateInfo::Delayed, Bound::Outer),
        vec![
            HalfPlane::new(0.0, 1.0 / p, c2).expect("finite"),
            HalfPlane::new(1.0 / p, 1.0 / q, c1).expect("finite"),
            HalfPlane::new(1.0 / q, 1.0 / p, (c1 - c2) / (2.0 - p) + c2).expect("finite"),
        ],
    )
}

/// Gap between the delayed-state downlink outer and inner regions.
pub fn delta_gaps(p: ActivityProb) -> GapVector {
    let p = p.value();
    let w_erased = p * (1.0 - p) / (3.0 - p);
    let w_direct = p / (3.0 - p);
    let two_pi_e_over_12 = 2.0 * std::f64::consts::PI * std::f64::consts::E / 12.0;
    let d1 = w_erased * 3f64.log2() + w_direct * two_pi_e_over_12.log2();
    let d2 = p.max(w_erased * 10f64.log2() + w_direct);
    GapVector::new(d1, d2).expect("non-negative for p in (0, 1]")
}

pub fn dl_inner_delayed(cfg: &ChannelConfig) -> RateRegion {
    dl_outer_delayed(cfg)
        .ominus(delta_gaps(ActivityProb::new(cfg.p()).expect("validated")))
        .with_kind(RegionKind::link(
            Link::Downlink,
            StateInfo::Delayed,
            Bound::Inner,
        ))
}

/// Downlink with instantaneous state at the relay. The SNRs become
/// `SNR / (p(2-p))`; inner and outer regions are identical, so `bound` only
/// sets the tag.
pub fn dl_instant(cfg: &ChannelConfig, bound: Bound) -> RateRegion {
    let p = cfg.p();
    let q = p * (2.0 - p);
    let (s1, s2) = (cfg.snr_1r() / q, cfg.snr_2r() / q);
    let sum = p * ((1.0 - p) * (c(s1) + c(s2)) + p * c(s1 + s2));
    RateRegion::new(
        RegionKind::link(Link::Downlink, StateInfo::Instantaneous, bound),
        vec![
            HalfPlane::r1_at_most(p * c(s1)).expect("finite"),
            HalfPlane::r2_at_most(p * c(s2)).expect("finite"),
            HalfPlane::sum_at_most(sum).expect("finite"),
        ],
    )
}

/// Build any of the eight link regions.
pub fn link_region(cfg: &ChannelConfig, link: Link, info: StateInfo, bound: Bound) -> RateRegion {
    match (link, info, bound) {
        (Link::Uplink, StateInfo::Delayed, Bound::Outer) => ul_outer_delayed(cfg),
        (Link::Uplink, StateInfo::Delayed, Bound::Inner) => ul_inner_delayed(cfg),
        (Link::Uplink, StateInfo::Instantaneous, b) => ul_instant(cfg, b),
        (Link::Downlink, StateInfo::Delayed, Bound::Outer) => dl_outer_delayed(cfg),
        (Link::Downlink, StateInfo::Delayed, Bound::Inner) => dl_inner_delayed(cfg),
        (Link::Downlink, StateInfo::Instantaneous, b) => dl_instant(cfg, b),
    }
}

/// All eight link regions in a fixed order: uplink before downlink, delayed
/// before instantaneous, outer before inner.
pub fn all_regions(cfg: &ChannelConfig) -> Vec<RateRegion> {
    let mut out = Vec::with_capacity(8);
    for link in [Link::Uplink, Link::Downlink] {
        for info in StateInfo::ALL {
            for bound in [Bound::Outer, Bound::Inner] {
                out.push(link_region(cfg, link, info, bound));
            }
        }
    }
    out
}

/// Uplink region for the users' state information intersected with the
/// downlink region for the relay's.
pub fn capacity_region(
    cfg: &ChannelConfig,
    users: StateInfo,
    relay: StateInfo,
    bound: Bound,
) -> RateRegion {
    link_region(cfg, Link::Uplink, users, bound)
        .intersect(&link_region(cfg, Link::Downlink, relay, bound))
        .with_kind(RegionKind::Capacity {
            users,
            relay,
            bound,
        })
}

/// The two corner points of the delayed-state downlink outer region.
///
/// Corner A is where the two weighted-sum constraints meet; corner B is where
/// the `R2` cap meets the constraint weighted towards `R2`.
pub fn dl_delayed_corners(cfg: &ChannelConfig) -> (RatePair, RatePair) {
    let p = cfg.p();
    let (c1, c2) = (c(cfg.snr_1r()), c(cfg.snr_2r()));
    let shared = p * (2.0 - p) / (3.0 - p) * c2;
    let a = RatePair::new(p * (c1 - c2) + shared, shared);
    let b = RatePair::new(p * (c1 - c2), p * c2);
    (a, b)
}

/// Convenience: validate raw inputs and build a config.
pub fn config(p: f64, snr_r1: f64, snr_r2: f64, snr_1r: f64, snr_2r: f64) -> Result<ChannelConfig> {
    ChannelConfig::from_linear(p, snr_r1, snr_r2, snr_1r, snr_2r)
}
