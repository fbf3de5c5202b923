//! One-dimensional modulo-lattice dirty-paper channel of Phase II.
//!
//! The relay superposes `X1R` (for `B1`) on `X2R` (for `B2`). `X1R` is
//! pre-coded against the interference `X2R` that `B1` will see:
//!
//! ```text
//! X1R = (C1R - w h X2R - d) mod L
//! ```
//!
//! and `B1` computes `(w Y1 + d) mod L = (C1R + E_L) mod L` with
//! `E_L = (w h - 1) X1R + w Z`.

use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use super::stats::{
    centered_mod, circular_distance, correlation, ks_critical_1pct, ks_uniform, variance,
};
use super::{mmse_coefficient, Check, GaussReport, Metric, REAL_NOISE_VAR, VAR_REL_TOL};
use crate::error::{Error, Result};
use crate::rng::{self, streams};

/// Distribution of the codeword symbol `C1R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Codeword {
    /// Uniform on `[-L/2, L/2)`.
    Uniform,
    /// Zero-mean Gaussian with the power of the uniform one, `L^2/12`.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpcConfig {
    pub snr_1r: f64,
    pub snr_2r: f64,
    pub samples: usize,
    pub seed: u64,
    /// Override for the MMSE scaling.
    pub w: Option<f64>,
    pub dither: bool,
    pub codeword: Codeword,
    /// Whether `X2R` is transmitted at all.
    pub interference: bool,
}

impl DpcConfig {
    pub fn new(snr_1r: f64, snr_2r: f64, samples: usize, seed: u64) -> Result<Self> {
        if !(snr_2r > 1.0 && snr_2r.is_finite()) || !(snr_1r >= snr_2r && snr_1r.is_finite()) {
            return Err(Error::Config(format!(
                "need snr_1r >= snr_2r > 1, got ({snr_1r}, {snr_2r})"
            )));
        }
        if samples < 2 {
            return Err(Error::Config("need at least two samples".into()));
        }
        Ok(Self {
            snr_1r,
            snr_2r,
            samples,
            seed,
            w: None,
            dither: true,
            codeword: Codeword::Uniform,
            interference: true,
        })
    }

    /// `L` with `L^2/12` equal to the per-real-dimension power of `X1R`,
    /// `1/(2 snr_2r)`.
    pub fn modulus(&self) -> f64 {
        (6.0 / self.snr_2r).sqrt()
    }

    /// Per-real-dimension power of `X1R`.
    pub fn x1_power(&self) -> f64 {
        0.5 / self.snr_2r
    }

    /// Per-real-dimension power of `X2R`.
    pub fn x2_power(&self) -> f64 {
        0.5 * (1.0 - 1.0 / self.snr_2r)
    }

    pub fn gain(&self) -> f64 {
        self.snr_1r.sqrt()
    }

    pub fn mmse_w(&self) -> f64 {
        mmse_coefficient(self.snr_1r, self.x1_power(), REAL_NOISE_VAR)
            .expect("validated")
            .w
    }

    pub fn effective_w(&self) -> f64 {
        self.w.unwrap_or_else(|| self.mmse_w())
    }

    /// `Var(E_L)` per complex symbol for the scaling in use.
    pub fn analytic_el_var(&self) -> f64 {
        let (w, h) = (self.effective_w(), self.gain());
        2.0 * ((w * h - 1.0).powi(2) * self.x1_power() + w * w * REAL_NOISE_VAR)
    }
}

/// Raw statistics of one DPC run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpcStats {
    pub modulus: f64,
    pub w: f64,
    pub ks_stat: f64,
    pub ks_critical: f64,
    pub corr_x1_x2: f64,
    pub corr_x1_c: f64,
    /// `Var(E_L)` per complex symbol.
    pub el_var: f64,
    pub el_var_analytic: f64,
    /// Largest receiver-identity error divided by its per-sample tolerance.
    pub identity_worst_ratio: f64,
    pub identity_failures: usize,
    pub samples: usize,
}

pub fn dpc_run(cfg: &DpcConfig) -> Result<DpcStats> {
    let n = cfg.samples;
    let l = cfg.modulus();
    let (w, h) = (cfg.effective_w(), cfg.gain());
    if !w.is_finite() {
        return Err(Error::Config(format!("scaling w must be finite, got {w}")));
    }
    let mut rng = rng::stream(cfg.seed, streams::DPC);
    let lattice = Uniform::new(-0.5 * l, 0.5 * l).expect("L > 0");
    let gauss_c = Normal::new(0.0, cfg.x1_power().sqrt()).expect("finite");
    let x2_law = Normal::new(0.0, cfg.x2_power().sqrt()).expect("finite");
    let noise = Normal::new(0.0, REAL_NOISE_VAR.sqrt()).expect("finite");

    let mut x1s = Vec::with_capacity(n);
    let mut x2s = Vec::with_capacity(n);
    let mut cs = Vec::with_capacity(n);
    let mut els = Vec::with_capacity(n);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..n {
        let c = match cfg.codeword {
            Codeword::Uniform => lattice.sample(&mut rng),
            Codeword::Gaussian => gauss_c.sample(&mut rng),
        };
        let d = if cfg.dither {
            lattice.sample(&mut rng)
        } else {
            0.0
        };
        let x2 = if cfg.interference {
            x2_law.sample(&mut rng)
        } else {
            0.0
        };
        let z = noise.sample(&mut rng);

        let x1 = centered_mod(c - w * h * x2 - d, l);
        let y = h * (x1 + x2) + z;
        let e = (w * h - 1.0) * x1 + w * z;
        let lhs = centered_mod(w * y + d, l);
        let rhs = centered_mod(c + e, l);

        let scale = l + (w * y).abs() + d.abs() + c.abs() + (w * h * x2).abs() + e.abs();
        let ratio = circular_distance(lhs, rhs, l) / (10.0 * f64::EPSILON * scale);
        worst = worst.max(ratio);
        if ratio > 1.0 {
            failures += 1;
        }
        x1s.push(x1);
        x2s.push(x2);
        cs.push(c);
        els.push(e);
    }

    Ok(DpcStats {
        modulus: l,
        w,
        ks_stat: ks_uniform(&x1s, -0.5 * l, 0.5 * l),
        ks_critical: ks_critical_1pct(n),
        corr_x1_x2: correlation(&x1s, &x2s),
        corr_x1_c: correlation(&x1s, &cs),
        el_var: 2.0 * variance(&els),
        el_var_analytic: cfg.analytic_el_var(),
        identity_worst_ratio: worst,
        identity_failures: failures,
        samples: n,
    })
}

/// Run the channel and hold it to the uniformity, independence, receiver
/// identity and effective-noise checks. Any failed check is an error.
pub fn dpc_simulate(cfg: &DpcConfig) -> Result<GaussReport> {
    dpc_report(cfg, &dpc_run(cfg)?).into_result()
}

pub fn dpc_report(cfg: &DpcConfig, s: &DpcStats) -> GaussReport {
    let corr_bound = 3.0 / (s.samples as f64).sqrt();
    let el = Metric::new("el_var", s.el_var, s.el_var_analytic);
    let mut checks = vec![
        Check::at_most("ks_x1_uniform", s.ks_stat, s.ks_critical),
        Check::at_most("identity_worst_ratio", s.identity_worst_ratio, 1.0),
        Check::at_most("el_var_rel_gap", el.rel_gap(), VAR_REL_TOL),
    ];
    if cfg.interference {
        checks.push(Check::at_most(
            "abs_corr_x1_x2",
            s.corr_x1_x2.abs(),
            corr_bound,
        ));
    }
    if cfg.dither {
        checks.push(Check::at_most(
            "abs_corr_x1_c",
            s.corr_x1_c.abs(),
            corr_bound,
        ));
    }
    GaussReport {
        kind: "dpc".into(),
        metrics: vec![
            el,
            Metric::new("x1_power", cfg.x1_power(), s.modulus * s.modulus / 12.0),
        ],
        checks,
        samples: s.samples,
        seed: Some(cfg.seed),
        notes: vec![
            format!("L = {:.6e}, w = {:.6e}", s.modulus, s.w),
            "one real dimension per sample; el_var is reported per complex symbol (twice the per-real value)".into(),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_effective_noise() {
        let cfg = DpcConfig::new(2250.0, 1000.0, 200_000, 1).unwrap();
        assert!((cfg.analytic_el_var() - 1.0 / 3250.0).abs() < 1e-12);
        let rep = dpc_simulate(&cfg).unwrap();
        assert!(rep.all_passed());
        assert!(rep.metric("el_var").unwrap().rel_gap() < 0.02);
    }

    #[test]
    fn identity_holds_without_scaling() {
        let mut cfg = DpcConfig::new(2250.0, 1000.0, 50_000, 2).unwrap();
        cfg.w = Some(0.0);
        let s = dpc_run(&cfg).unwrap();
        assert_eq!(s.identity_failures, 0);
        // with w = 0 the effective noise is -X1R
        assert!((s.el_var / (2.0 * cfg.x1_power()) - 1.0).abs() < 0.03);
    }

    #[test]
    fn undithered_gaussian_control_is_not_uniform() {
        let n = 100_000;
        let mut control = DpcConfig::new(2250.0, 1000.0, n, 3).unwrap();
        control.dither = false;
        control.codeword = Codeword::Gaussian;
        control.interference = false;
        let s = dpc_run(&control).unwrap();
        assert!(s.ks_stat > s.ks_critical, "ks = {}", s.ks_stat);
        assert!(dpc_simulate(&control).is_err());

        let dithered = dpc_run(&DpcConfig {
            dither: true,
            ..control
        })
        .unwrap();
        assert!(dithered.ks_stat < dithered.ks_critical);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(DpcConfig::new(10.0, 20.0, 100, 0).is_err());
        assert!(DpcConfig::new(10.0, 1.0, 100, 0).is_err());
        assert!(DpcConfig::new(10.0, 5.0, 1, 0).is_err());
    }
}
