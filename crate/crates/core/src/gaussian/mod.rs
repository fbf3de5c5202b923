//! Signal-level pieces of the Gaussian three-phase scheme and the uplink.
//!
//! Simulations run one real dimension per sample with noise variance 1/2,
//! which is a unit-variance complex noise split over its two components.
//! Powers and variances reported per complex symbol are twice the
//! per-real-dimension values.

mod budget;
mod dpc;
mod sr;
pub mod stats;
mod uplink;

pub use budget::{
    superposition_corner_budget, three_phase_budget, SuperpositionBudget, ThreePhaseBudget,
};
pub use dpc::{dpc_report, dpc_run, dpc_simulate, Codeword, DpcConfig, DpcStats};
pub use sr::{
    sr_budget, sr_distortions, sr_feasibility, sr_rates, sr_test_channel_sim, SrBudget,
    SrDistortions, SrFeasibility, SrSource,
};
pub use uplink::{uplink_sum_rate, UplinkMode};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Noise variance per real dimension.
pub const REAL_NOISE_VAR: f64 = 0.5;

/// Relative tolerance for Monte Carlo variances and distortions.
pub const VAR_REL_TOL: f64 = 0.02;

/// One measured quantity next to its closed-form reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub empirical: f64,
    pub analytic: f64,
    /// `|empirical - analytic|`
    pub gap: f64,
}

impl Metric {
    pub fn new(name: &str, empirical: f64, analytic: f64) -> Self {
        Self {
            name: name.into(),
            empirical,
            analytic,
            gap: (empirical - analytic).abs(),
        }
    }

    pub fn rel_gap(&self) -> f64 {
        self.gap / self.analytic.abs()
    }
}

/// A pass/fail check with the value and the threshold it was held to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value <= threshold`.
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            passed: value <= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussReport {
    pub kind: String,
    pub metrics: Vec<Metric>,
    pub checks: Vec<Check>,
    pub samples: usize,
    pub seed: Option<u64>,
    pub notes: Vec<String>,
}

impl GaussReport {
    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// `Err` naming the first failed check, if any.
    pub fn into_result(self) -> Result<Self> {
        match self.checks.iter().find(|c| !c.passed) {
            Some(c) => Err(Error::Invariant(format!(
                "{}: {} = {:.6e} exceeds {:.6e}",
                self.kind, c.name, c.value, c.threshold
            ))),
            None => Ok(self),
        }
    }
}

/// Linear MMSE estimate of `X` from `Y = h X + Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mmse {
    pub w: f64,
    /// `E[((w h - 1) X + w Z)^2]` at the optimum.
    pub residual: f64,
}

/// MMSE scaling for gain `sqrt(h_sq)`, signal power `sigx_sq` and noise
/// power `sigz_sq`: `w = sqrt(h_sq) sigx_sq / (h_sq sigx_sq + sigz_sq)`.
pub fn mmse_coefficient(h_sq: f64, sigx_sq: f64, sigz_sq: f64) -> Result<Mmse> {
    if !(h_sq >= 0.0 && h_sq.is_finite()) || !(sigx_sq >= 0.0 && sigx_sq.is_finite()) {
        return Err(Error::Domain(format!(
            "gain and signal power must be finite and non-negative, got {h_sq} and {sigx_sq}"
        )));
    }
    if !(sigz_sq > 0.0 && sigz_sq.is_finite()) {
        return Err(Error::Domain(format!(
            "noise power must be positive, got {sigz_sq}"
        )));
    }
    let denom = h_sq * sigx_sq + sigz_sq;
    Ok(Mmse {
        w: h_sq.sqrt() * sigx_sq / denom,
        residual: sigx_sq * sigz_sq / denom,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_residual() {
        let m = mmse_coefficient(2250.0, 1.0 / 1000.0, 1.0).unwrap();
        assert!((m.residual - 1.0 / 3250.0).abs() < 1e-15);
        assert!((m.residual - 3.0769e-4).abs() < 1e-8);
    }

    #[test]
    fn zero_signal_power_gives_zero_scaling() {
        assert_eq!(mmse_coefficient(10.0, 0.0, 1.0).unwrap().w, 0.0);
    }

    #[test]
    fn noiseless_limit() {
        let h_sq = 1e12;
        let m = mmse_coefficient(h_sq, 1.0, 1.0).unwrap();
        assert!((m.w * h_sq.sqrt() - 1.0).abs() < 1e-9);
        assert!(m.residual < 1e-11);
    }

    #[test]
    fn invalid_inputs() {
        assert!(mmse_coefficient(-1.0, 1.0, 1.0).is_err());
        assert!(mmse_coefficient(1.0, -1.0, 1.0).is_err());
        assert!(mmse_coefficient(1.0, 1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn w_minimises_the_residual(h_sq in 0.01f64..1e4, sx in 1e-4f64..10.0, sz in 1e-3f64..10.0) {
            let m = mmse_coefficient(h_sq, sx, sz).unwrap();
            let h = h_sq.sqrt();
            let mse = |w: f64| (w * h - 1.0).powi(2) * sx + w * w * sz;
            prop_assert!((mse(m.w) - m.residual).abs() <= 1e-9 * sx.max(1.0));
            for dw in [-1e-3, 1e-3] {
                prop_assert!(mse(m.w + dw * m.w.abs().max(1e-6)) >= m.residual - 1e-12);
            }
        }
    }
}
