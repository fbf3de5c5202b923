//! Ergodic sum rate of joint lattice decoding on the intermittent uplink.

use serde::{Deserialize, Serialize};

use super::{Check, GaussReport, Metric};
use crate::error::Result;
use crate::regions::{log2_1p, ul_outer_delayed, ActivityProb, ChannelConfig};
use crate::state::StateTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum UplinkMode {
    Exact,
    MonteCarlo {
        #[serde(rename = "T")]
        block_len: usize,
        seed: u64,
    },
}

/// Largest allowed distance between the achievable sum rate and the outer
/// sum-rate constraint.
pub const UPLINK_SUM_GAP: f64 = 2.0;

/// `E[C(S1 snr_r1 + S2 snr_r2)] - 1`, averaged over the four state pairs.
pub fn exact_sum_rate(p: f64, snr_r1: f64, snr_r2: f64) -> f64 {
    p * p * log2_1p(snr_r1 + snr_r2) + p * (1.0 - p) * (log2_1p(snr_r1) + log2_1p(snr_r2)) - 1.0
}

/// Achievable uplink sum rate, exactly or by Monte Carlo over a state trace,
/// together with its distance to the outer sum-rate constraint.
pub fn uplink_sum_rate(cfg: &ChannelConfig, mode: UplinkMode) -> Result<GaussReport> {
    let (p, s1, s2) = (cfg.p(), cfg.snr_r1(), cfg.snr_r2());
    let exact = exact_sum_rate(p, s1, s2);
    let (rate, samples, seed) = match mode {
        UplinkMode::Exact => (exact, 0, None),
        UplinkMode::MonteCarlo { block_len, seed } => {
            let trace = StateTrace::generate(ActivityProb::new(p)?, block_len, seed)?;
            // Each slot contributes two real dimensions with per-dimension
            // signal power g/2 over noise 1/2.
            let total: f64 = trace
                .s1()
                .iter()
                .zip(trace.s2())
                .map(|(&a, &b)| {
                    let g = a as u8 as f64 * s1 + b as u8 as f64 * s2;
                    2.0 * ((0.5 + 0.5 * g).log2() - 0.5f64.log2())
                })
                .sum();
            (total / (2 * block_len) as f64 - 1.0, block_len, Some(seed))
        }
    };
    let outer_sum = ul_outer_delayed(cfg)
        .constraints()
        .iter()
        .find(|h| h.a() == 1.0 && h.b() == 1.0)
        .map(|h| h.c())
        .expect("uplink outer region has a sum constraint");
    let to_outer = Metric::new("gap_to_outer_sum", rate, outer_sum);
    let checks = vec![Check::at_most(
        "gap_to_outer_sum",
        to_outer.gap,
        UPLINK_SUM_GAP,
    )];
    Ok(GaussReport {
        kind: "uplink_sum_rate".into(),
        metrics: vec![Metric::new("sum_rate", rate, exact), to_outer],
        checks,
        samples,
        seed,
        notes: vec![
            "rates in bits per complex channel use; the Monte Carlo average runs over 2T real dimensions".into(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::config;
    use proptest::prelude::*;

    #[test]
    fn reference_exact() {
        let rep = uplink_sum_rate(&ChannelConfig::reference(), UplinkMode::Exact).unwrap();
        let expect = 0.36 * 3251f64.log2() + 0.24 * 2251f64.log2() + 0.24 * 1001f64.log2() - 1.0;
        let m = rep.metric("sum_rate").unwrap();
        assert!((m.empirical - expect).abs() < 1e-12);
        assert!((m.empirical - 8.2648).abs() < 1e-3);
        assert!(rep.all_passed());
    }

    #[test]
    fn static_relay_is_single_state() {
        let cfg = config(1.0, 30.0, 12.0, 30.0, 12.0).unwrap();
        let rep = uplink_sum_rate(&cfg, UplinkMode::Exact).unwrap();
        assert_eq!(
            rep.metric("sum_rate").unwrap().empirical,
            43f64.log2() - 1.0
        );
    }

    #[test]
    fn monte_carlo_close_to_exact() {
        let mode = UplinkMode::MonteCarlo {
            block_len: 200_000,
            seed: 8,
        };
        let rep = uplink_sum_rate(&ChannelConfig::reference(), mode).unwrap();
        assert!(rep.metric("sum_rate").unwrap().gap < 0.03);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn within_two_bits_of_outer_sum(
            p in 0.01f64..=1.0,
            a_db in -10.0f64..60.0,
            b_db in -10.0f64..60.0,
        ) {
            let (a, b) = (10f64.powf(a_db / 10.0), 10f64.powf(b_db / 10.0));
            let cfg = config(p, a, b, a.max(b), a.min(b)).unwrap();
            let rep = uplink_sum_rate(&cfg, UplinkMode::Exact).unwrap();
            prop_assert!(rep.all_passed(), "{:?}", rep.metrics);
        }
    }
}
