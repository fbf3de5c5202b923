use serde::{Deserialize, Serialize};

use super::geometry::{RateRegion, FEAS_TOL};
use super::types::{GapVector, RatePair};
use crate::error::{Error, Result};

/// Bisection resolution for gap certificates, in bits.
pub const GAP_TOL: f64 = 1e-6;

/// An outer vertex paired with the inner point reached by sliding it down
/// the diagonal (clipped at the axes).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapWitness {
    pub outer_vertex: RatePair,
    pub inner_point: RatePair,
}

/// Certificate that `outer ⊖ (g1, g2) ⊆ inner`.
///
/// `gap` is the smallest equal-component shift (to [`GAP_TOL`]).
/// `max_gap_r1` / `max_gap_r2` tighten that shift one axis at a time and are
/// themselves a valid shift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapCertificate {
    pub gap: f64,
    pub max_gap_r1: f64,
    pub max_gap_r2: f64,
    pub witness: Vec<GapWitness>,
}

impl GapCertificate {
    /// Re-check `outer ⊖ (max_gap_r1, max_gap_r2) ⊆ inner`.
    pub fn is_valid(&self, outer: &RateRegion, inner: &RateRegion) -> bool {
        GapVector::new(self.max_gap_r1, self.max_gap_r2)
            .ok()
            .map(|g| shifted_inside(outer, inner, g).unwrap_or(false))
            .unwrap_or(false)
    }
}

fn shifted_inside(outer: &RateRegion, inner: &RateRegion, g: GapVector) -> Result<bool> {
    inner.contains_region(&outer.ominus(g), FEAS_TOL)
}

/// Smallest `x` in `[lo, hi]` with `ok(x)`, assuming `ok` is monotone and
/// `ok(hi)` holds. Returns the upper end of the final bracket.
fn bisect(mut lo: f64, mut hi: f64, mut ok: impl FnMut(f64) -> Result<bool>) -> Result<f64> {
    if ok(lo)? {
        return Ok(lo);
    }
    while hi - lo > GAP_TOL {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

pub fn gap_certificate(outer: &RateRegion, inner: &RateRegion) -> Result<GapCertificate> {
    let outer_vs = outer.vertices()?;
    for v in inner.vertices()? {
        if !outer.contains(v, FEAS_TOL) {
            return Err(Error::NotNested(v));
        }
    }

    let uniform = |g: f64| GapVector::uniform(g).and_then(|g| shifted_inside(outer, inner, g));
    let mut hi = 1.0;
    while !uniform(hi)? {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Invariant("gap search diverged".into()));
        }
    }
    let gap = bisect(0.0, hi, uniform)?;

    let max_gap_r1 = bisect(0.0, gap, |g1| {
        GapVector::new(g1, gap).and_then(|g| shifted_inside(outer, inner, g))
    })?;
    let max_gap_r2 = bisect(0.0, gap, |g2| {
        GapVector::new(max_gap_r1, g2).and_then(|g| shifted_inside(outer, inner, g))
    })?;

    let mut witness = Vec::with_capacity(outer_vs.len());
    for v in outer_vs {
        let slide = |t: f64| RatePair::new((v.r1 - t).max(0.0), (v.r2 - t).max(0.0));
        let reach = v.r1.max(v.r2).max(0.0);
        let t = if inner.is_empty() {
            reach
        } else {
            bisect(0.0, reach, |t| Ok(inner.contains(slide(t), FEAS_TOL)))?
        };
        witness.push(GapWitness {
            outer_vertex: v,
            inner_point: slide(t),
        });
    }

    Ok(GapCertificate {
        gap,
        max_gap_r1,
        max_gap_r2,
        witness,
    })
}
