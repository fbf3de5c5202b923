//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the binary exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twr_core::be_sim::{self, BeConfig, Phase3Mode};
use twr_core::gaussian::{
    dpc_simulate, sr_distortions, sr_feasibility, sr_rates, sr_test_channel_sim,
    three_phase_budget, uplink_sum_rate, DpcConfig, SrSource, UplinkMode,
};
use twr_core::regions::{
    all_regions, config, delta_gaps, dl_delayed_corners, dl_inner_delayed, dl_instant,
    dl_outer_delayed, gap_certificate, ul_inner_delayed, ul_instant, ul_outer_delayed, GAP_TOL,
};
use twr_core::rng::trial_seed;
use twr_core::{ActivityProb, Bound, ChannelConfig, RatePair};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(start: Instant, limit: Duration) -> Result<(), String> {
    let spent = start.elapsed();
    ensure(spent < limit, || {
        format!("runtime {spent:.2?} exceeds {limit:?}")
    })
}

fn prob(p: f64) -> ActivityProb {
    ActivityProb::new(p).unwrap()
}

fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

/// Random configuration with `snr_1r >= snr_2r >= 2`.
fn random_supported(rng: &mut ChaCha8Rng) -> ChannelConfig {
    let p = rng.random_range(0.05..=1.0);
    let weak = rng.random_range(3.02..50.0);
    let strong = weak + rng.random_range(0.0..30.0);
    let (ul1, ul2) = (rng.random_range(0.0..50.0), rng.random_range(0.0..50.0));
    config(p, db(ul1), db(ul2), db(strong), db(weak)).unwrap()
}

fn region_reproduction() -> Outcome {
    let start = Instant::now();
    let cfg = ChannelConfig::reference();
    for r in all_regions(&cfg) {
        r.vertices()
            .map_err(|e| format!("{} failed to build: {e}", r.kind().label()))?;
    }
    let bottleneck = dl_inner_delayed(&cfg);
    let others = [
        ul_inner_delayed(&cfg),
        ul_instant(&cfg, Bound::Inner),
        dl_instant(&cfg, Bound::Inner),
    ];
    let mut outside = Vec::new();
    for v in bottleneck.vertices().unwrap() {
        for o in &others {
            if !o.contains(v, 1e-9) {
                outside.push(format!(
                    "({:.4}, {:.4}) not in {}",
                    v.r1,
                    v.r2,
                    o.kind().label()
                ));
            }
        }
    }
    ensure(outside.is_empty(), || {
        format!("dl_in_d not contained: {}", outside.join("; "))
    })?;
    within_budget(start, Duration::from_secs(1))?;
    Ok("all eight regions built; dl_in_d inside every other inner region".into())
}

fn corner_identities() -> Outcome {
    let cfg = ChannelConfig::reference();
    let (a, b) = dl_delayed_corners(&cfg);
    let near =
        |x: RatePair, r1: f64, r2: f64| (x.r1 - r1).abs() <= 1e-3 && (x.r2 - r2).abs() <= 1e-3;
    ensure(near(a, 4.1901, 3.4885), || format!("corner A = {a:?}"))?;
    ensure(near(b, 0.7016, 5.9803), || format!("corner B = {b:?}"))?;
    let h = dl_outer_delayed(&cfg).constraints().to_vec();
    // A: both weighted sums tight. B: R2 cap and the R2-weighted sum tight.
    let residuals = [h[1].slack(a), h[2].slack(a), h[0].slack(b), h[2].slack(b)];
    let worst = residuals.iter().map(|r| r.abs()).fold(0.0, f64::max);
    ensure(worst < 1e-9, || {
        format!("active-constraint residual {worst:.3e}")
    })?;
    Ok(format!(
        "A = ({:.4}, {:.4}), B = ({:.4}, {:.4}), residual {worst:.1e}",
        a.r1, a.r2, b.r1, b.r2
    ))
}

fn gap_audit() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut configs = vec![ChannelConfig::reference()];
    configs.extend((0..200).map(|_| random_supported(&mut rng)));
    let (mut worst_ul, mut worst_dl) = (0.0f64, f64::NEG_INFINITY);
    for cfg in &configs {
        let ul = gap_certificate(&ul_outer_delayed(cfg), &ul_inner_delayed(cfg))
            .map_err(|e| e.to_string())?;
        let dl = gap_certificate(&dl_outer_delayed(cfg), &dl_inner_delayed(cfg))
            .map_err(|e| e.to_string())?;
        let delta = delta_gaps(prob(cfg.p()));
        let bound = delta.d1().max(delta.d2());
        ensure(ul.gap <= 1.0 + GAP_TOL, || {
            format!("ul gap {} at p = {}", ul.gap, cfg.p())
        })?;
        ensure(dl.gap <= bound + GAP_TOL, || {
            format!("dl gap {} above {bound} at p = {}", dl.gap, cfg.p())
        })?;
        worst_ul = worst_ul.max(ul.gap);
        worst_dl = worst_dl.max(dl.gap - bound);
    }
    let cfg = ChannelConfig::reference();
    let dl = gap_certificate(&dl_outer_delayed(&cfg), &dl_inner_delayed(&cfg)).unwrap();
    ensure(dl.gap <= 0.6 + GAP_TOL, || {
        format!("reference dl gap {}", dl.gap)
    })?;
    within_budget(start, Duration::from_secs(10))?;
    Ok(format!(
        "reference dl gap {:.6}; 201 configs: max ul gap {worst_ul:.6}, max dl gap minus bound {worst_dl:.2e}",
        dl.gap
    ))
}

fn be_scheme_rate() -> Outcome {
    let start = Instant::now();
    let acc = BeConfig::new(prob(0.6), 3, 2, 1_000_000, Phase3Mode::Accounting, 2024).unwrap();
    let r = be_sim::simulate(&acc).map_err(|e| e.to_string())?;
    let rates = r
        .empirical_rates
        .ok_or("accounting run reported no rates")?;
    let rel = ((rates.r1 / 1.3 - 1.0).abs(), (rates.r2 / 0.7 - 1.0).abs());
    ensure(rel.0 <= 0.02 && rel.1 <= 0.02, || {
        format!("rates {rates:?} vs (1.3, 0.7)")
    })?;

    let one = BeConfig::new(prob(1.0), 3, 2, 10_000, Phase3Mode::Accounting, 1).unwrap();
    let exact = be_sim::simulate(&one)
        .map_err(|e| e.to_string())?
        .empirical_rates;
    ensure(exact == Some(RatePair::new(2.0, 1.0)), || {
        format!("p = 1 gave {exact:?}")
    })?;

    let rlnc = BeConfig::new(prob(0.6), 3, 2, 209, Phase3Mode::Rlnc, 77).unwrap();
    ensure(rlnc.target_len() == 50, || {
        format!("target_len {}", rlnc.target_len())
    })?;
    let mut decoded = 0;
    for k in 0..100 {
        // simulate() fails on any payload mismatch, so Ok means bit-exact
        let rep =
            be_sim::simulate(&rlnc.with_seed(trial_seed(77, k))).map_err(|e| e.to_string())?;
        decoded += rep.decode_success as usize;
    }
    ensure(decoded >= 99, || format!("rlnc decoded {decoded}/100"))?;
    within_budget(start, Duration::from_secs(30))?;
    Ok(format!(
        "T=1e6 rates ({:.4}, {:.4}); p=1 exact; rlnc {decoded}/100 decoded",
        rates.r1, rates.r2
    ))
}

fn dpc_effective_noise() -> Outcome {
    let start = Instant::now();
    let cfg = DpcConfig::new(2250.0, 1000.0, 1_000_000, 5).unwrap();
    let rep = dpc_simulate(&cfg).map_err(|e| e.to_string())?;
    let el = rep.metric("el_var").unwrap();
    ensure((el.analytic - 3.0769e-4).abs() < 1e-8, || {
        format!("analytic {}", el.analytic)
    })?;
    ensure(el.rel_gap() <= 0.02, || {
        format!("Var(E_L) {} vs {}", el.empirical, el.analytic)
    })?;
    let ks = rep.check("ks_x1_uniform").unwrap();
    ensure(ks.passed, || {
        format!("KS {} above {}", ks.value, ks.threshold)
    })?;
    let id = rep.check("identity_worst_ratio").unwrap();
    ensure(id.passed, || format!("identity error ratio {}", id.value))?;
    within_budget(start, Duration::from_secs(10))?;
    Ok(format!(
        "Var(E_L) = {:.4e} ({:.2}% off), KS {:.2e} < {:.2e}",
        el.empirical,
        100.0 * el.rel_gap(),
        ks.value,
        ks.threshold
    ))
}

fn sr_budgets() -> Outcome {
    let d = sr_distortions(2250.0, 1000.0).map_err(|e| e.to_string())?;
    let (rc, rr) = sr_rates(d.d1, d.d2).map_err(|e| e.to_string())?;
    let f = sr_feasibility(0.6, 2250.0, 1000.0).map_err(|e| e.to_string())?;
    ensure((d.d2 - 4.0 / 999.0).abs() <= 1e-3, || {
        format!("d2 {}", d.d2)
    })?;
    ensure((d.d1 - 4.0 / 3250.0).abs() <= 1e-3, || {
        format!("d1 {}", d.d1)
    })?;
    ensure(
        (rc - 8.9672).abs() <= 1e-3 && (rr - 1.6999).abs() <= 1e-3,
        || format!("rates ({rc}, {rr})"),
    )?;
    ensure(f.common_slack.abs() <= 1e-9, || {
        format!("common slack {}", f.common_slack)
    })?;
    ensure(f.refinement_slack >= 0.0, || {
        format!("refinement slack {}", f.refinement_slack)
    })?;
    let rep = sr_test_channel_sim(d.d1, d.d2, SrSource::Gaussian, 1_000_000, 6)
        .map_err(|e| e.to_string())?;
    for name in ["mse_v1", "mse_v2"] {
        let m = rep.metric(name).unwrap();
        ensure(m.rel_gap() <= 0.02, || {
            format!("{name} {} vs {}", m.empirical, m.analytic)
        })?;
    }
    Ok(format!(
        "rc {rc:.4}, rr {rr:.4}, slacks ({:.1e}, {:.3e})",
        f.common_slack, f.refinement_slack
    ))
}

fn three_phase_vs_corner() -> Outcome {
    let b = three_phase_budget(prob(0.6), 2250.0, 1000.0).map_err(|e| e.to_string())?;
    ensure(
        (b.gap.r1 - 0.2857).abs() <= 1e-3 && (b.gap.r2 - 0.581).abs() <= 1e-3,
        || format!("gaps {:?}", b.gap),
    )?;
    ensure(
        (b.delta.d1() - 0.28581).abs() <= 1e-5 && (b.delta.d2() - 0.6).abs() <= 1e-12,
        || format!("delta {:?}", b.delta),
    )?;
    ensure(b.within_delta(0.0), || {
        format!("gap {:?} exceeds delta {:?}", b.gap, b.delta)
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let cfg = random_supported(&mut rng);
        let r = three_phase_budget(prob(cfg.p()), cfg.snr_1r(), cfg.snr_2r())
            .map_err(|e| e.to_string())?;
        ensure(r.within_delta(1e-9), || {
            format!("gap {:?} exceeds {:?} at p = {}", r.gap, r.delta, cfg.p())
        })?;
        let pt = RatePair::new(r.achievable.r1.max(0.0), r.achievable.r2.max(0.0));
        ensure(dl_outer_delayed(&cfg).contains(pt, 1e-9), || {
            format!("budget {pt:?} outside outer region")
        })?;
    }
    Ok(format!(
        "gaps ({:.4}, {:.4}) within ({:.5}, {:.1}); 200 random configs hold",
        b.gap.r1,
        b.gap.r2,
        b.delta.d1(),
        b.delta.d2()
    ))
}

fn uplink_sum() -> Outcome {
    let cfg = ChannelConfig::reference();
    let exact = uplink_sum_rate(&cfg, UplinkMode::Exact).map_err(|e| e.to_string())?;
    let rate = exact.metric("sum_rate").unwrap().empirical;
    let cap = exact.metric("gap_to_outer_sum").unwrap();
    ensure((rate - 8.2648).abs() <= 1e-3, || {
        format!("exact sum rate {rate}")
    })?;
    ensure((cap.analytic - 9.6044).abs() <= 1e-3, || {
        format!("outer sum {}", cap.analytic)
    })?;
    ensure(cap.gap <= 2.0, || format!("gap to outer {}", cap.gap))?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..1000 {
        let p = rng.random_range(0.01..=1.0);
        let (a, b) = (
            db(rng.random_range(-10.0..60.0)),
            db(rng.random_range(-10.0..60.0)),
        );
        let c = config(p, a, b, a.max(b), a.min(b)).unwrap();
        let rep = uplink_sum_rate(&c, UplinkMode::Exact).map_err(|e| e.to_string())?;
        ensure(rep.all_passed(), || {
            format!("gap above 2 at p = {p}, snr ({a}, {b})")
        })?;
    }
    let mc = uplink_sum_rate(
        &cfg,
        UplinkMode::MonteCarlo {
            block_len: 1_000_000,
            seed: 9,
        },
    )
    .map_err(|e| e.to_string())?;
    let mc_rate = mc.metric("sum_rate").unwrap();
    ensure(mc_rate.gap <= 0.01, || {
        format!("Monte Carlo {} vs exact {rate}", mc_rate.empirical)
    })?;
    Ok(format!(
        "exact {rate:.4}, gap to cap {:.4}, Monte Carlo off by {:.4}",
        cap.gap, mc_rate.gap
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("region reproduction", region_reproduction),
        ("corner-point identities", corner_identities),
        ("gap audit", gap_audit),
        ("binary expansion scheme rate", be_scheme_rate),
        ("dirty-paper effective noise", dpc_effective_noise),
        ("successive-refinement budgets", sr_budgets),
        ("three-phase budget vs corner", three_phase_vs_corner),
        ("uplink sum rate", uplink_sum),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail} [{took:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {why} [{took:.2?}]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
