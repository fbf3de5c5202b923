//! Successive-refinement quantisation of the Phase III source.
//!
//! The relay quantises the sum of two erased unit-power symbols (variance 2)
//! into a common index, decodable by the weaker receiver at distortion `D2`,
//! and a refinement index that lets the stronger receiver reach `D1`.

use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use super::stats::{centered_mod, covariance, variance};
use super::{mmse_coefficient, Check, GaussReport, Metric, REAL_NOISE_VAR, VAR_REL_TOL};
use crate::error::{Error, Result};
use crate::regions::log2_1p;
use crate::rng::{self, streams};

/// Slack tolerance for the feasibility inequalities.
pub const SLACK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SrDistortions {
    pub d1: f64,
    pub d2: f64,
    /// `2 / snr_1r`, an upper bound on `d1`.
    pub d1_upper: f64,
    /// `8 / snr_2r`, an upper bound on `d2`.
    pub d2_upper: f64,
}

fn check_regime(snr_1r: f64, snr_2r: f64) -> Result<()> {
    if !(snr_2r >= 2.0) || !snr_2r.is_finite() {
        return Err(Error::Unsupported(format!(
            "snr_2r must be at least 2, got {snr_2r}"
        )));
    }
    if !(snr_1r >= snr_2r) || !snr_1r.is_finite() {
        return Err(Error::Config(format!(
            "need snr_1r >= snr_2r, got ({snr_1r}, {snr_2r})"
        )));
    }
    Ok(())
}

/// `D2 = 4/(snr_2r - 1)` and `D1 = 4/(snr_1r + snr_2r)`.
pub fn sr_distortions(snr_1r: f64, snr_2r: f64) -> Result<SrDistortions> {
    check_regime(snr_1r, snr_2r)?;
    Ok(SrDistortions {
        d1: 4.0 / (snr_1r + snr_2r),
        d2: 4.0 / (snr_2r - 1.0),
        d1_upper: 2.0 / snr_1r,
        d2_upper: 8.0 / snr_2r,
    })
}

/// Common rate `log2(1 + 2/d2)` and refinement rate `log2(1 + 2/d1)` minus
/// the common rate.
pub fn sr_rates(d1: f64, d2: f64) -> Result<(f64, f64)> {
    if !(d1 > 0.0 && d1 <= d2) {
        return Err(Error::Domain(format!(
            "need 0 < d1 <= d2, got ({d1}, {d2})"
        )));
    }
    let rc = log2_1p(2.0 / d2);
    let rr = (log2_1p(2.0 / d1) - rc).max(0.0);
    Ok((rc, rr))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SrBudget {
    pub d1: f64,
    pub d2: f64,
    pub rc: f64,
    pub rr: f64,
    /// Power fraction of the common index.
    pub snr_c: f64,
    /// Power fraction of the refinement index.
    pub snr_r: f64,
}

pub fn sr_budget(snr_1r: f64, snr_2r: f64) -> Result<SrBudget> {
    let d = sr_distortions(snr_1r, snr_2r)?;
    let (rc, rr) = sr_rates(d.d1, d.d2)?;
    let snr_r = 1.0 / snr_2r;
    Ok(SrBudget {
        d1: d.d1,
        d2: d.d2,
        rc,
        rr,
        snr_c: 1.0 - snr_r,
        snr_r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SrFeasibility {
    pub budget: SrBudget,
    /// `C(snr_2r snr_c / (snr_2r snr_r + 1)) - rc`
    pub common_slack: f64,
    /// `C(snr_1r / snr_2r) - rr`
    pub refinement_slack: f64,
}

/// Check that both indices fit through their Phase III channels. The block
/// lengths `T p (1 - p)` on both sides cancel, so `p` only has to be valid.
pub fn sr_feasibility(p: f64, snr_1r: f64, snr_2r: f64) -> Result<SrFeasibility> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("p must lie in (0, 1], got {p}")));
    }
    let budget = sr_budget(snr_1r, snr_2r)?;
    let common = snr_2r * budget.snr_c / (snr_2r * budget.snr_r + 1.0);
    let f = SrFeasibility {
        budget,
        common_slack: log2_1p(common) - budget.rc,
        refinement_slack: log2_1p(snr_1r / snr_2r) - budget.rr,
    };
    if f.common_slack < -SLACK_TOL || f.refinement_slack < -SLACK_TOL {
        return Err(Error::Infeasible(format!(
            "common slack {:.3e}, refinement slack {:.3e}",
            f.common_slack, f.refinement_slack
        )));
    }
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SrSource {
    Gaussian,
    /// A Phase I Gaussian symbol plus a Phase II superposition `X1R + X2R`
    /// drawn from the dirty-paper channel with these SNRs.
    DpcMixture {
        snr_1r: f64,
        snr_2r: f64,
    },
}

/// Draw the source per real dimension: variance 1, i.e. 2 per complex
/// symbol.
fn draw_source(source: SrSource, samples: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = rng::stream(seed, streams::SR_MIXTURE);
    match source {
        SrSource::Gaussian => {
            let n = Normal::new(0.0, 1.0).expect("finite");
            Ok((0..samples).map(|_| n.sample(&mut rng)).collect())
        }
        SrSource::DpcMixture { snr_1r, snr_2r } => {
            let cfg = super::DpcConfig::new(snr_1r, snr_2r, samples.max(2), seed)?;
            let l = cfg.modulus();
            let wh = cfg.effective_w() * cfg.gain();
            let lattice = Uniform::new(-0.5 * l, 0.5 * l).expect("L > 0");
            let phase1 = Normal::new(0.0, REAL_NOISE_VAR.sqrt()).expect("finite");
            let x2_law = Normal::new(0.0, cfg.x2_power().sqrt()).expect("finite");
            Ok((0..samples)
                .map(|_| {
                    let (c, d) = (lattice.sample(&mut rng), lattice.sample(&mut rng));
                    let x2 = x2_law.sample(&mut rng);
                    let x1 = centered_mod(c - wh * x2 - d, l);
                    phase1.sample(&mut rng) + x1 + x2
                })
                .collect())
        }
    }
}

/// Simulate the degraded test channels `V1 = X + Z`, `V2 = V1 + Z'` with
/// `Var Z = d1` and `Var Z' = d2 - d1` (per complex symbol) and measure the
/// linear-MMSE reconstruction error from each.
pub fn sr_test_channel_sim(
    d1: f64,
    d2: f64,
    source: SrSource,
    samples: usize,
    seed: u64,
) -> Result<GaussReport> {
    if !(d1 > 0.0 && d1 <= d2 && d2.is_finite()) {
        return Err(Error::Domain(format!(
            "need 0 < d1 <= d2, got ({d1}, {d2})"
        )));
    }
    if samples < 2 {
        return Err(Error::Config("need at least two samples".into()));
    }
    let x = draw_source(source, samples, seed)?;
    let mut rng = rng::stream(seed, streams::SR);
    let z1 = Normal::new(0.0, (0.5 * d1).sqrt()).expect("finite");
    let z2 = Normal::new(0.0, (0.5 * (d2 - d1)).sqrt()).expect("finite");
    let v1: Vec<f64> = x.iter().map(|xi| xi + z1.sample(&mut rng)).collect();
    let v2: Vec<f64> = v1.iter().map(|vi| vi + z2.sample(&mut rng)).collect();

    // per complex symbol: twice the per-real error
    let lmmse = |v: &[f64]| {
        let a = covariance(&x, v) / variance(v);
        let err: Vec<f64> = x.iter().zip(v).map(|(xi, vi)| xi - a * vi).collect();
        2.0 * err.iter().map(|e| e * e).sum::<f64>() / err.len() as f64
    };
    let (mse1, mse2) = (lmmse(&v1), lmmse(&v2));
    let closed = |d: f64| mmse_coefficient(1.0, 2.0, d).expect("positive").residual;

    let mut metrics = vec![
        Metric::new("mse_v1", mse1, closed(d1)),
        Metric::new("mse_v2", mse2, closed(d2)),
        Metric::new("source_var", 2.0 * variance(&x), 2.0),
    ];
    let mut checks = vec![
        Check::at_most("mse_v1_over_d1", mse1 / d1, 1.0 + VAR_REL_TOL),
        Check::at_most("mse_v2_over_d2", mse2 / d2, 1.0 + VAR_REL_TOL),
        Check::at_most(
            "degradation_var_v1_minus_v2",
            variance(&v1) - variance(&v2),
            0.0,
        ),
        Check::at_most("degradation_mse_v1_minus_v2", mse1 - mse2, 0.0),
    ];
    if source == SrSource::Gaussian {
        checks.push(Check::at_most(
            "mse_v1_rel_gap",
            metrics[0].rel_gap(),
            VAR_REL_TOL,
        ));
        checks.push(Check::at_most(
            "mse_v2_rel_gap",
            metrics[1].rel_gap(),
            VAR_REL_TOL,
        ));
    }
    let kind = match source {
        SrSource::Gaussian => "sr_test_channel_gaussian",
        SrSource::DpcMixture { .. } => "sr_test_channel_dpc_mixture",
    };
    metrics.push(Metric::new("d1", d1, d1));
    metrics.push(Metric::new("d2", d2, d2));
    GaussReport {
        kind: kind.into(),
        metrics,
        checks,
        samples,
        seed: Some(seed),
        notes: vec!["one real dimension per sample; distortions are per complex symbol".into()],
    }
    .into_result()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_distortions_and_rates() {
        let d = sr_distortions(2250.0, 1000.0).unwrap();
        assert!((d.d2 - 4.0 / 999.0).abs() < 1e-15);
        assert!((d.d1 - 4.0 / 3250.0).abs() < 1e-15);
        assert!((d.d2 - 4.004e-3).abs() < 1e-6);
        assert!((d.d1 - 1.2308e-3).abs() < 1e-7);
        let (rc, rr) = sr_rates(d.d1, d.d2).unwrap();
        assert!((rc - 500.5f64.log2()).abs() < 1e-12);
        assert!((rc - 8.9672).abs() < 1e-4);
        assert!((rr - 1.6999).abs() < 1e-4);
    }

    #[test]
    fn boundaries() {
        assert!((sr_distortions(7.0, 7.0).unwrap().d1 - 2.0 / 7.0).abs() < 1e-15);
        assert_eq!(sr_distortions(5.0, 2.0).unwrap().d2, 4.0);
        assert!(matches!(
            sr_distortions(5.0, 1.9),
            Err(Error::Unsupported(_))
        ));
        assert!(sr_distortions(5.0, 6.0).is_err());
        assert_eq!(sr_rates(0.3, 0.3).unwrap().1, 0.0);
        assert!(sr_rates(1e-3, 1e12).unwrap().0 < 1e-11);
        assert!(sr_rates(0.5, 0.2).is_err());
    }

    #[test]
    fn reference_feasibility() {
        let f = sr_feasibility(0.6, 2250.0, 1000.0).unwrap();
        assert!(f.common_slack.abs() < 1e-9);
        assert!((f.refinement_slack - (3.25f64.log2() - f.budget.rr)).abs() < 1e-12);
        assert!((f.refinement_slack - 5.544e-4).abs() < 1e-6);
        assert_eq!(f.budget.snr_c + f.budget.snr_r, 1.0);
    }

    #[test]
    fn equal_snr_is_feasible() {
        for s in [2.0, 10.0, 1e4] {
            let f = sr_feasibility(0.5, s, s).unwrap();
            assert!(f.common_slack >= -SLACK_TOL && f.refinement_slack >= -SLACK_TOL);
        }
    }

    #[test]
    fn gaussian_test_channel_matches_closed_form() {
        let d = sr_distortions(2250.0, 1000.0).unwrap();
        let rep = sr_test_channel_sim(d.d1, d.d2, SrSource::Gaussian, 200_000, 4).unwrap();
        assert!((rep.metric("mse_v1").unwrap().analytic - 1.2300e-3).abs() < 1e-7);
        assert!((rep.metric("mse_v2").unwrap().analytic - 3.9960e-3).abs() < 1e-7);
    }

    #[test]
    fn equal_distortions_give_equal_errors() {
        let rep = sr_test_channel_sim(0.01, 0.01, SrSource::Gaussian, 10_000, 5).unwrap();
        assert_eq!(
            rep.metric("mse_v1").unwrap().empirical,
            rep.metric("mse_v2").unwrap().empirical
        );
    }

    #[test]
    fn dpc_mixture_within_distortion() {
        let d = sr_distortions(2250.0, 1000.0).unwrap();
        let src = SrSource::DpcMixture {
            snr_1r: 2250.0,
            snr_2r: 1000.0,
        };
        let rep = sr_test_channel_sim(d.d1, d.d2, src, 200_000, 6).unwrap();
        assert!((rep.metric("source_var").unwrap().empirical - 2.0).abs() < 0.05);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn ordering_and_slacks(s2 in 2.0f64..1e6, ratio in 1.0f64..1e4) {
            let s1 = s2 * ratio;
            let f = sr_feasibility(0.5, s1, s2).unwrap();
            prop_assert!(f.budget.d1 <= f.budget.d2);
            prop_assert!(f.budget.rr >= 0.0);
            prop_assert!(f.common_slack >= -SLACK_TOL);
            prop_assert!(f.refinement_slack >= -SLACK_TOL);
        }
    }
}
