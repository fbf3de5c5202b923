//! Closed-form rate budgets of the Gaussian downlink schemes, compared with
//! the corner points of the delayed-state downlink outer region.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use super::sr::sr_distortions;
use crate::error::{Error, Result};
use crate::regions::{
    delta_gaps, dl_delayed_corners, log2_1p, ActivityProb, ChannelConfig, GapVector, RatePair,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreePhaseBudget {
    pub achievable: RatePair,
    /// Corner where the two weighted-sum constraints of the outer region meet.
    pub corner: RatePair,
    /// `corner - achievable`, componentwise.
    pub gap: RatePair,
    pub delta: GapVector,
}

impl ThreePhaseBudget {
    pub fn within_delta(&self, tol: f64) -> bool {
        self.gap.r1 <= self.delta.d1() + tol && self.gap.r2 <= self.delta.d2() + tol
    }
}

fn downlink_config(p: f64, snr_1r: f64, snr_2r: f64) -> Result<ChannelConfig> {
    // uplink SNRs play no part in the downlink corners
    ChannelConfig::from_linear(p, snr_1r, snr_2r, snr_1r, snr_2r)
}

/// Rates of the three-phase scheme (dirty-paper Phase II, successive
/// refinement Phase III):
///
/// ```text
/// R2 = [p(1-p) C((1 - 1/s2)/(10/s2)) + p C((1 - 1/s2)/(2/s2))] / (3-p)
/// R1 = p(2-p)/(3-p) C(s1) - p(1-p)/(3-p) log2 3
///      + p/(3-p) (log2(s1/s2) - log2(2 pi e/12))
/// ```
pub fn three_phase_budget(p: ActivityProb, snr_1r: f64, snr_2r: f64) -> Result<ThreePhaseBudget> {
    sr_distortions(snr_1r, snr_2r)?;
    let (p, s1, s2) = (p.value(), snr_1r, snr_2r);
    // Phase III: the common index competes with the refinement layer (1/s2)
    // and the quantisation noise bound (8/s2) on top of the noise (1/s2)
    let r2 = (p * (1.0 - p) * log2_1p((1.0 - 1.0 / s2) / (10.0 / s2))
        + p * log2_1p((1.0 - 1.0 / s2) / (2.0 / s2)))
        / (3.0 - p);
    let r1 = p * (2.0 - p) / (3.0 - p) * log2_1p(s1) - p * (1.0 - p) / (3.0 - p) * 3f64.log2()
        + p / (3.0 - p) * ((s1 / s2).log2() - (2.0 * PI * E / 12.0).log2());
    let achievable = RatePair::new(r1, r2);
    let (corner, _) = dl_delayed_corners(&downlink_config(p, s1, s2)?);
    Ok(ThreePhaseBudget {
        achievable,
        corner,
        gap: RatePair::new(corner.r1 - r1, corner.r2 - r2),
        delta: delta_gaps(ActivityProb::new(p)?),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionBudget {
    pub achievable: RatePair,
    /// Corner where the `R2` cap meets the `R2`-weighted constraint.
    pub corner: RatePair,
    pub gap_r2: f64,
}

/// Plain superposition coding towards the `R2`-heavy corner:
/// `(p (C(s1) - C(s2)), p C(s2) - p)`.
pub fn superposition_corner_budget(
    p: ActivityProb,
    snr_1r: f64,
    snr_2r: f64,
) -> Result<SuperpositionBudget> {
    sr_distortions(snr_1r, snr_2r)?;
    let p = p.value();
    let (c1, c2) = (log2_1p(snr_1r), log2_1p(snr_2r));
    let achievable = RatePair::new(p * (c1 - c2), p * c2 - p);
    let (_, corner) = dl_delayed_corners(&downlink_config(p, snr_1r, snr_2r)?);
    let gap_r2 = corner.r2 - achievable.r2;
    if (gap_r2 - p).abs() > 1e-9 * corner.r2.max(1.0) {
        return Err(Error::Invariant(format!(
            "superposition gap {gap_r2} differs from p = {p}"
        )));
    }
    Ok(SuperpositionBudget {
        achievable,
        corner,
        gap_r2,
    })
}
