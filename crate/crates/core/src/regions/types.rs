use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `log2(1 + x)`, the AWGN capacity in bits per complex channel use.
pub fn cap(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "cap() needs a finite x >= 0, got {x}"
        )));
    }
    Ok(log2_1p(x))
}

#[inline]
pub(crate) fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// Signal-to-noise ratio as a linear power ratio.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Snr(f64);

impl Snr {
    pub fn new(linear: f64) -> Result<Self> {
        if !(linear >= 0.0) || !linear.is_finite() {
            return Err(Error::Domain(format!(
                "SNR must be finite and >= 0, got {linear}"
            )));
        }
        Ok(Self(linear))
    }

    pub fn from_db(db: f64) -> Result<Self> {
        if !db.is_finite() {
            return Err(Error::Domain(format!("SNR in dB must be finite, got {db}")));
        }
        Self::new(10f64.powf(db / 10.0))
    }

    pub fn linear(self) -> f64 {
        self.0
    }

    /// Decibel value; `-inf` for a zero SNR.
    pub fn db(self) -> f64 {
        10.0 * self.0.log10()
    }
}

/// Probability that a pair can reach the relay in a given slot.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActivityProb(f64);

impl ActivityProb {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Domain(format!(
                "activity probability must lie in (0, 1], got {p}"
            )));
        }
        Ok(Self(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Symmetric channel: activity probability plus the two uplink
/// (end user to relay) and two downlink (relay to end user) SNRs.
///
/// Pair 1 is the pair with the stronger downlink, `snr_1r >= snr_2r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    p: ActivityProb,
    snr_r1: Snr,
    snr_r2: Snr,
    snr_1r: Snr,
    snr_2r: Snr,
}

impl ChannelConfig {
    pub fn new(
        p: ActivityProb,
        snr_r1: Snr,
        snr_r2: Snr,
        snr_1r: Snr,
        snr_2r: Snr,
    ) -> Result<Self> {
        if snr_1r < snr_2r {
            return Err(Error::Config(format!(
                "downlink SNRs must satisfy snr_1r >= snr_2r, got {} < {}",
                snr_1r.linear(),
                snr_2r.linear()
            )));
        }
        Ok(Self {
            p,
            snr_r1,
            snr_r2,
            snr_1r,
            snr_2r,
        })
    }

    /// Build from raw numbers: `p` and four linear SNRs.
    pub fn from_linear(p: f64, snr_r1: f64, snr_r2: f64, snr_1r: f64, snr_2r: f64) -> Result<Self> {
        Self::new(
            ActivityProb::new(p)?,
            Snr::new(snr_r1)?,
            Snr::new(snr_r2)?,
            Snr::new(snr_1r)?,
            Snr::new(snr_2r)?,
        )
    }

    /// Same SNR pair on the uplink and the downlink.
    pub fn mirrored(p: f64, strong: f64, weak: f64) -> Result<Self> {
        Self::from_linear(p, strong, weak, strong, weak)
    }

    /// `p = 0.6`, strong links at `30 + 20 log10(1.5)` dB (2250 linear),
    /// weak links at 30 dB (1000 linear).
    pub fn reference() -> Self {
        let strong = Snr::from_db(REFERENCE_STRONG_DB).expect("finite");
        let weak = Snr::from_db(REFERENCE_WEAK_DB).expect("finite");
        Self::new(
            ActivityProb::new(0.6).expect("valid p"),
            strong,
            weak,
            strong,
            weak,
        )
        .expect("ordered SNRs")
    }

    pub fn p(&self) -> f64 {
        self.p.value()
    }
    pub fn snr_r1(&self) -> f64 {
        self.snr_r1.linear()
    }
    pub fn snr_r2(&self) -> f64 {
        self.snr_r2.linear()
    }
    pub fn snr_1r(&self) -> f64 {
        self.snr_1r.linear()
    }
    pub fn snr_2r(&self) -> f64 {
        self.snr_2r.linear()
    }
}

/// `30 + 20 log10(1.5)` dB.
pub const REFERENCE_STRONG_DB: f64 = 33.521_825_181_113_63;
pub const REFERENCE_WEAK_DB: f64 = 30.0;

/// Symmetric rate pair `(R1, R2)` in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePair {
    pub r1: f64,
    pub r2: f64,
}

impl RatePair {
    pub const ZERO: RatePair = RatePair { r1: 0.0, r2: 0.0 };

    pub fn new(r1: f64, r2: f64) -> Self {
        Self { r1, r2 }
    }

    /// Validated constructor: both components finite and non-negative.
    pub fn checked(r1: f64, r2: f64) -> Result<Self> {
        if !(r1 >= 0.0 && r2 >= 0.0 && r1.is_finite() && r2.is_finite()) {
            return Err(Error::Domain(format!(
                "rate pair must be finite and >= 0, got ({r1}, {r2})"
            )));
        }
        Ok(Self { r1, r2 })
    }

    pub fn dist_inf(self, other: RatePair) -> f64 {
        (self.r1 - other.r1).abs().max((self.r2 - other.r2).abs())
    }
}

/// Rate shift `(d1, d2)` applied by the pointwise-minus operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapVector {
    d1: f64,
    d2: f64,
}

impl GapVector {
    pub const ZERO: GapVector = GapVector { d1: 0.0, d2: 0.0 };

    pub fn new(d1: f64, d2: f64) -> Result<Self> {
        if !(d1 >= 0.0 && d2 >= 0.0 && d1.is_finite() && d2.is_finite()) {
            return Err(Error::Domain(format!(
                "gap vector must be finite and >= 0, got ({d1}, {d2})"
            )));
        }
        Ok(Self { d1, d2 })
    }

    pub fn uniform(g: f64) -> Result<Self> {
        Self::new(g, g)
    }

    pub fn d1(&self) -> f64 {
        self.d1
    }
    pub fn d2(&self) -> f64 {
        self.d2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_values() {
        assert_eq!(cap(0.0).unwrap(), 0.0);
        assert!((cap(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((cap(1000.0).unwrap() - 9.96722).abs() < 1e-4);
        assert!(cap(-1e-3).is_err());
        assert!(cap(f64::NAN).is_err());
    }

    #[test]
    fn reference_config_is_2250_and_1000() {
        let cfg = ChannelConfig::reference();
        assert!((cfg.snr_1r() - 2250.0).abs() < 1e-9);
        assert!((cfg.snr_2r() - 1000.0).abs() < 1e-9);
        assert!((cfg.snr_r1() - 2250.0).abs() < 1e-9);
        assert_eq!(cfg.p(), 0.6);
    }

    #[test]
    fn config_rejects_misordered_downlink() {
        let err = ChannelConfig::from_linear(0.5, 1.0, 1.0, 10.0, 20.0).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn activity_prob_range() {
        assert!(ActivityProb::new(0.0).is_err());
        assert!(ActivityProb::new(1.0).is_ok());
        assert!(ActivityProb::new(1.0 + 1e-12).is_err());
        assert!(ActivityProb::new(f64::NAN).is_err());
    }

    #[test]
    fn gap_vector_rejects_negative() {
        assert!(GapVector::new(-0.1, 0.0).is_err());
        assert!(GapVector::new(0.0, 0.0).is_ok());
    }

    proptest::proptest! {
        #[test]
        fn db_round_trip(db in -50.0f64..90.0) {
            let s = Snr::from_db(db).unwrap();
            proptest::prop_assert!((s.db() - db).abs() < 1e-9);
        }

        #[test]
        fn cap_is_monotone(x in 0.0f64..1e6, dx in 1e-6f64..10.0) {
            proptest::prop_assert!(cap(x + dx).unwrap() > cap(x).unwrap());
        }
    }
}
