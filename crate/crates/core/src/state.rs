//! The two activity-state processes `S1[t]`, `S2[t]`: independent i.i.d.
//! Bernoulli(p) sequences, one per pair.
//!
//! A [`StateView`] restricts what a terminal may look at in slot `t`: with
//! delayed state information it sees `s[1..t-1]`, with instantaneous state
//! information `s[1..t]`. Slots are 1-indexed in the view API.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regions::ActivityProb;
use crate::rng::{self, streams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateTrace {
    s1: Vec<bool>,
    s2: Vec<bool>,
    p: f64,
    seed: u64,
}

impl StateTrace {
    /// Draw `len` slots of both processes. Each process has its own
    /// counter-based stream, so the result depends only on `(p, len, seed)`
    /// and a longer trace extends a shorter one with the same seed.
    pub fn generate(p: ActivityProb, len: usize, seed: u64) -> Result<Self> {
        if len == 0 {
            return Err(Error::Domain(
                "state trace length must be at least 1".into(),
            ));
        }
        let draw = |stream: u64| {
            let mut rng = rng::stream(seed, stream);
            (0..len)
                .map(|_| rng.random_bool(p.value()))
                .collect::<Vec<_>>()
        };
        Ok(Self {
            s1: draw(streams::STATE_S1),
            s2: draw(streams::STATE_S2),
            p: p.value(),
            seed,
        })
    }

    /// Rebuild a trace from explicit sequences (e.g. a replayed dump).
    pub fn from_parts(s1: Vec<bool>, s2: Vec<bool>, p: ActivityProb, seed: u64) -> Result<Self> {
        if s1.len() != s2.len() || s1.is_empty() {
            return Err(Error::Domain(format!(
                "state sequences must be non-empty and equally long, got {} and {}",
                s1.len(),
                s2.len()
            )));
        }
        Ok(Self {
            s1,
            s2,
            p: p.value(),
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.s1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s1.is_empty()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn s1(&self) -> &[bool] {
        &self.s1
    }

    pub fn s2(&self) -> &[bool] {
        &self.s2
    }

    /// `(S1[t], S2[t])` for a 0-indexed slot.
    pub fn at(&self, t: usize) -> (bool, bool) {
        (self.s1[t], self.s2[t])
    }

    /// Slots `range` of this trace as a new trace (same `p` and seed).
    pub fn slice(&self, range: std::ops::Range<usize>) -> Result<Self> {
        Self::from_parts(
            self.s1[range.clone()].to_vec(),
            self.s2[range].to_vec(),
            ActivityProb::new(self.p)?,
            self.seed,
        )
    }

    /// One byte per slot: bit 0 is `S1`, bit 1 is `S2`.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.s1
            .iter()
            .zip(&self.s2)
            .map(|(&a, &b)| a as u8 | (b as u8) << 1)
            .collect()
    }

    /// Inverse of [`to_bytes`](Self::to_bytes). Bytes with bits other than
    /// 0 and 1 set are rejected.
    pub fn from_bytes(bytes: &[u8], p: ActivityProb, seed: u64) -> Result<Self> {
        if let Some(bad) = bytes.iter().position(|&b| b > 3) {
            return Err(Error::Domain(format!(
                "state dump byte {bad} has reserved bits set"
            )));
        }
        Self::from_parts(
            bytes.iter().map(|&b| b & 1 == 1).collect(),
            bytes.iter().map(|&b| b & 2 == 2).collect(),
            p,
            seed,
        )
    }

    /// Counts of `(S1, S2)` over the whole trace, indexed as
    /// `[(0,0), (0,1), (1,0), (1,1)]`.
    pub fn joint_histogram(&self) -> JointHistogram {
        let mut counts = [0usize; 4];
        for (&a, &b) in self.s1.iter().zip(&self.s2) {
            counts[(a as usize) << 1 | b as usize] += 1;
        }
        JointHistogram { counts }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointHistogram {
    /// `[(0,0), (0,1), (1,0), (1,1)]`
    pub counts: [usize; 4],
}

impl JointHistogram {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn count(&self, s1: bool, s2: bool) -> usize {
        self.counts[(s1 as usize) << 1 | s2 as usize]
    }

    pub fn fraction(&self, s1: bool, s2: bool) -> f64 {
        self.count(s1, s2) as f64 / self.total() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViewMode {
    Delayed,
    Instantaneous,
}

/// Read-only window onto a trace as seen by a terminal.
#[derive(Debug, Clone, Copy)]
pub struct StateView<'a> {
    mode: ViewMode,
    trace: &'a StateTrace,
}

impl<'a> StateView<'a> {
    pub fn new(trace: &'a StateTrace, mode: ViewMode) -> Self {
        Self { mode, trace }
    }

    pub fn mode(&self) -> ViewMode {
        self.mode
    }

    /// States visible when encoding slot `t` (1-indexed, `1 <= t <= T`):
    /// `(s1[..k], s2[..k])` with `k = t - 1` (delayed) or `k = t`.
    pub fn visible_at(&self, t: usize) -> Result<(&'a [bool], &'a [bool])> {
        let len = self.trace.len();
        if t == 0 || t > len {
            return Err(Error::OutOfRange { index: t, len });
        }
        let k = match self.mode {
            ViewMode::Delayed => t - 1,
            ViewMode::Instantaneous => t,
        };
        Ok((&self.trace.s1[..k], &self.trace.s2[..k]))
    }
}
