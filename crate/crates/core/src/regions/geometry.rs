//! Half-plane polytopes in the positive quadrant of the `(R1, R2)` plane.
//!
//! Every constraint has the form `a*R1 + b*R2 <= c` with `a, b >= 0`, stored
//! with `max(a, b) = 1`. The quadrant constraints `R1, R2 >= 0` are implicit.
//! Because all normals point into the positive quadrant, a region is empty
//! exactly when some constraint has `c < 0`, and it is bounded exactly when at
//! least one constraint caps each axis.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::types::{GapVector, RatePair};
use crate::error::{Error, Result};

/// Feasibility tolerance used when enumerating vertices.
pub const FEAS_TOL: f64 = 1e-9;
/// Two vertices closer than this (max-norm) are the same vertex.
pub const DEDUP_TOL: f64 = 1e-9;

/// `a*R1 + b*R2 <= c`, normalised so that `max(a, b) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    a: f64,
    b: f64,
    c: f64,
}

impl HalfPlane {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a >= 0.0 && b >= 0.0) || !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::Domain(format!(
                "half-plane needs finite a, b >= 0 and finite c, got ({a}, {b}, {c})"
            )));
        }
        let scale = a.max(b);
        if scale == 0.0 {
            return Err(Error::Domain(
                "half-plane normal (a, b) must be nonzero".into(),
            ));
        }
        Ok(Self {
            a: a / scale,
            b: b / scale,
            c: c / scale,
        })
    }

    /// `R1 <= c`
    pub fn r1_at_most(c: f64) -> Result<Self> {
        Self::new(1.0, 0.0, c)
    }

    /// `R2 <= c`
    pub fn r2_at_most(c: f64) -> Result<Self> {
        Self::new(0.0, 1.0, c)
    }

    /// `R1 + R2 <= c`
    pub fn sum_at_most(c: f64) -> Result<Self> {
        Self::new(1.0, 1.0, c)
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn eval(&self, pt: RatePair) -> f64 {
        self.a * pt.r1 + self.b * pt.r2
    }

    /// `c - (a*R1 + b*R2)`; negative when `pt` violates the constraint.
    pub fn slack(&self, pt: RatePair) -> f64 {
        self.c - self.eval(pt)
    }

    pub fn shifted(&self, g: GapVector) -> Self {
        Self {
            a: self.a,
            b: self.b,
            c: self.c - self.a * g.d1() - self.b * g.d2(),
        }
    }

    fn same_normal(&self, other: &Self) -> bool {
        (self.a - other.a).abs() <= 1e-12 && (self.b - other.b).abs() <= 1e-12
    }
}

impl fmt::Display for HalfPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}*R1 + {:.6}*R2 <= {:.6}", self.a, self.b, self.c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    Uplink,
    Downlink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateInfo {
    Delayed,
    Instantaneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Inner,
    Outer,
}

impl Link {
    fn tag(self) -> &'static str {
        match self {
            Link::Uplink => "ul",
            Link::Downlink => "dl",
        }
    }
}

impl StateInfo {
    pub const ALL: [StateInfo; 2] = [StateInfo::Delayed, StateInfo::Instantaneous];

    fn tag(self) -> &'static str {
        match self {
            StateInfo::Delayed => "d",
            StateInfo::Instantaneous => "i",
        }
    }
}

impl Bound {
    fn tag(self) -> &'static str {
        match self {
            Bound::Inner => "in",
            Bound::Outer => "out",
        }
    }
}

/// What a region represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionKind {
    /// One of the eight uplink/downlink regions.
    Link {
        link: Link,
        info: StateInfo,
        bound: Bound,
    },
    /// Uplink region intersected with downlink region, indexed by the state
    /// information at the end users and at the relay.
    Capacity {
        users: StateInfo,
        relay: StateInfo,
        bound: Bound,
    },
    /// Anything built by hand.
    Custom,
}

impl RegionKind {
    pub fn link(link: Link, info: StateInfo, bound: Bound) -> Self {
        RegionKind::Link { link, info, bound }
    }

    /// Short label such as `ul_out_d` or `cap_in_di`.
    pub fn label(&self) -> String {
        match *self {
            RegionKind::Link { link, info, bound } => {
                format!("{}_{}_{}", link.tag(), bound.tag(), info.tag())
            }
            RegionKind::Capacity {
                users,
                relay,
                bound,
            } => {
                format!("cap_{}_{}{}", bound.tag(), users.tag(), relay.tag())
            }
            RegionKind::Custom => "custom".to_string(),
        }
    }
}

impl fmt::Display for RegionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Convex region `{ (R1, R2) >= 0 : every constraint holds }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRegion {
    kind: RegionKind,
    constraints: Vec<HalfPlane>,
}

impl RateRegion {
    pub fn new(kind: RegionKind, constraints: Vec<HalfPlane>) -> Self {
        Self { kind, constraints }
    }

    pub fn custom(constraints: Vec<HalfPlane>) -> Self {
        Self::new(RegionKind::Custom, constraints)
    }

    pub fn kind(&self) -> RegionKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: RegionKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn constraints(&self) -> &[HalfPlane] {
        &self.constraints
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.iter().any(|h| h.c < 0.0)
    }

    pub fn is_bounded(&self) -> bool {
        let caps_r1 = self.constraints.iter().any(|h| h.a > 0.0);
        let caps_r2 = self.constraints.iter().any(|h| h.b > 0.0);
        caps_r1 && caps_r2
    }

    /// True iff `pt >= 0` and every constraint holds to within `tol`.
    /// Always false for an empty region.
    pub fn contains(&self, pt: RatePair, tol: f64) -> bool {
        if self.is_empty() {
            return false;
        }
        pt.r1 >= -tol && pt.r2 >= -tol && self.constraints.iter().all(|h| h.slack(pt) >= -tol)
    }

    /// Pointwise minus: `x` is in the result iff `x >= 0` and `x + g` is in
    /// `self`.
    pub fn ominus(&self, g: GapVector) -> RateRegion {
        RateRegion {
            kind: self.kind,
            constraints: self.constraints.iter().map(|h| h.shifted(g)).collect(),
        }
    }

    /// Extreme points, counter-clockwise. Empty for an empty region.
    pub fn vertices(&self) -> Result<Vec<RatePair>> {
        if self.is_empty() {
            return Ok(Vec::new());
        }
        if !self.is_bounded() {
            return Err(Error::Unbounded);
        }
        let mut lines: Vec<(f64, f64, f64)> =
            self.constraints.iter().map(|h| (h.a, h.b, h.c)).collect();
        lines.push((1.0, 0.0, 0.0)); // R1 = 0
        lines.push((0.0, 1.0, 0.0)); // R2 = 0

        let mut found: Vec<RatePair> = Vec::new();
        for i in 0..lines.len() {
            for j in (i + 1)..lines.len() {
                let (a1, b1, c1) = lines[i];
                let (a2, b2, c2) = lines[j];
                let det = a1 * b2 - a2 * b1;
                if det.abs() < 1e-14 {
                    continue;
                }
                let pt = RatePair::new((c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det);
                if !self.contains(pt, FEAS_TOL) {
                    continue;
                }
                let pt = RatePair::new(pt.r1.max(0.0), pt.r2.max(0.0));
                if !found.iter().any(|v| v.dist_inf(pt) <= DEDUP_TOL) {
                    found.push(pt);
                }
            }
        }
        sort_ccw(&mut found);
        Ok(found)
    }

    /// Every vertex of `other` lies in `self` (within `tol`).
    pub fn contains_region(&self, other: &RateRegion, tol: f64) -> Result<bool> {
        Ok(other.vertices()?.into_iter().all(|v| self.contains(v, tol)))
    }

    /// Intersection with redundant half-planes removed. A half-plane is
    /// redundant when dropping it leaves the vertex set unchanged.
    pub fn intersect(&self, other: &RateRegion) -> RateRegion {
        let mut merged: Vec<HalfPlane> = Vec::new();
        for h in self.constraints.iter().chain(other.constraints.iter()) {
            match merged.iter_mut().find(|m| m.same_normal(h)) {
                Some(m) => m.c = m.c.min(h.c),
                None => merged.push(*h),
            }
        }
        let mut region = RateRegion::custom(merged);
        region.prune();
        region
    }

    fn prune(&mut self) {
        if self.is_empty() || !self.is_bounded() {
            return;
        }
        let Ok(reference) = self.vertices() else {
            return;
        };
        let mut i = 0;
        while i < self.constraints.len() {
            let mut trial = self.constraints.clone();
            trial.remove(i);
            let candidate = RateRegion::custom(trial);
            let same = candidate.is_bounded()
                && candidate
                    .vertices()
                    .map(|v| same_vertex_set(&v, &reference))
                    .unwrap_or(false);
            if same {
                self.constraints = candidate.constraints;
            } else {
                i += 1;
            }
        }
    }
}

fn same_vertex_set(a: &[RatePair], b: &[RatePair]) -> bool {
    a.len() == b.len()
        && a.iter()
            .all(|v| b.iter().any(|w| v.dist_inf(*w) <= DEDUP_TOL))
}

fn sort_ccw(pts: &mut [RatePair]) {
    if pts.len() < 2 {
        return;
    }
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p.r1).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p.r2).sum::<f64>() / n;
    pts.sort_by(|p, q| {
        let ap = (p.r2 - cy).atan2(p.r1 - cx);
        let aq = (q.r2 - cy).atan2(q.r1 - cx);
        ap.partial_cmp(&aq).unwrap_or(Ordering::Equal)
    });
}
