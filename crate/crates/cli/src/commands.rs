use std::fmt::Write as _;

use clap::Args;
use serde::Serialize;

use twr_core::be_sim::{self, BeConfig, BeSimReport, Phase3Mode};
use twr_core::gaussian::{
    dpc_report, dpc_run, sr_distortions, sr_feasibility, sr_test_channel_sim,
    superposition_corner_budget, three_phase_budget, uplink_sum_rate, Codeword, DpcConfig,
    GaussReport, SrDistortions, SrFeasibility, SrSource, SuperpositionBudget, ThreePhaseBudget,
    UplinkMode,
};
use twr_core::regions::{
    all_regions, capacity_region, delta_gaps, gap_certificate, link_region, vertices_csv,
    RegionRecord, GAP_TOL, REFERENCE_STRONG_DB, REFERENCE_WEAK_DB,
};
use twr_core::{
    ActivityProb, Bound, ChannelConfig, Error, GapCertificate, GapVector, Link, RatePair,
    RateRegion, Snr, StateInfo,
};

use crate::output::{to_json, Format, Sink};
use crate::{usage, CliError, Common};

#[derive(Debug, Clone, Args, Serialize)]
pub struct ChannelArgs {
    /// Activity probability of each user pair.
    #[arg(long, default_value_t = 0.6)]
    p: f64,
    /// Uplink SNR from user 1 to the relay, in dB.
    #[arg(long, default_value_t = REFERENCE_STRONG_DB)]
    snr_r1_db: f64,
    /// Uplink SNR from user 2 to the relay, in dB.
    #[arg(long, default_value_t = REFERENCE_WEAK_DB)]
    snr_r2_db: f64,
    /// Downlink SNR from the relay to receiver 1, in dB.
    #[arg(long, default_value_t = REFERENCE_STRONG_DB)]
    snr_1r_db: f64,
    /// Downlink SNR from the relay to receiver 2, in dB.
    #[arg(long, default_value_t = REFERENCE_WEAK_DB)]
    snr_2r_db: f64,
}

impl ChannelArgs {
    fn config(&self) -> Result<ChannelConfig, CliError> {
        let snr = |db: f64| Snr::from_db(db).map_err(usage);
        ChannelConfig::new(
            ActivityProb::new(self.p).map_err(usage)?,
            snr(self.snr_r1_db)?,
            snr(self.snr_r2_db)?,
            snr(self.snr_1r_db)?,
            snr(self.snr_2r_db)?,
        )
        .map_err(usage)
    }
}

fn prob(p: f64) -> Result<ActivityProb, CliError> {
    ActivityProb::new(p).map_err(usage)
}

fn linear(db: f64) -> Result<f64, CliError> {
    Snr::from_db(db).map(Snr::linear).map_err(usage)
}

const REGION_CHOICES: [&str; 17] = [
    "all",
    "ul_out_d",
    "ul_in_d",
    "ul_out_i",
    "ul_in_i",
    "dl_out_d",
    "dl_in_d",
    "dl_out_i",
    "dl_in_i",
    "cap_out_dd",
    "cap_in_dd",
    "cap_out_di",
    "cap_in_di",
    "cap_out_id",
    "cap_in_id",
    "cap_out_ii",
    "cap_in_ii",
];

#[derive(Debug, Clone, Args, Serialize)]
pub struct RegionsArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    /// `all`, or one region label.
    #[arg(long, default_value = "all", value_parser = clap::builder::PossibleValuesParser::new(REGION_CHOICES))]
    which: String,
    #[command(flatten)]
    pub common: Common,
}

/// The eight link regions followed by the eight uplink/downlink
/// intersections (users' state information first, then the relay's).
fn every_region(cfg: &ChannelConfig) -> Vec<RateRegion> {
    let mut out = all_regions(cfg);
    for bound in [Bound::Outer, Bound::Inner] {
        for users in StateInfo::ALL {
            for relay in StateInfo::ALL {
                out.push(capacity_region(cfg, users, relay, bound));
            }
        }
    }
    out
}

pub fn regions(args: &RegionsArgs, sink: &mut Sink) -> Result<(), CliError> {
    let cfg = args.channel.config()?;
    let chosen: Vec<RateRegion> = every_region(&cfg)
        .into_iter()
        .filter(|r| args.which == "all" || r.kind().label() == args.which)
        .collect();
    match (args.common.format, args.common.out.is_some()) {
        (Format::Json, true) => {
            for r in &chosen {
                sink.emit(
                    &format!("{}.json", r.kind().label()),
                    &to_json(&RegionRecord::new(&cfg, r)?),
                )?;
            }
        }
        (Format::Json, false) => {
            let records = chosen
                .iter()
                .map(|r| RegionRecord::new(&cfg, r))
                .collect::<Result<Vec<_>, _>>()?;
            sink.emit("regions.json", &to_json(&records))?;
        }
        (Format::Csv, true) => {
            for r in &chosen {
                sink.emit(&format!("{}.csv", r.kind().label()), &vertices_csv(r)?)?;
            }
        }
        (Format::Csv, false) => {
            let mut table = String::from("kind,r1,r2\n");
            for r in &chosen {
                for v in r.vertices()? {
                    writeln!(table, "{},{},{}", r.kind().label(), v.r1, v.r2).unwrap();
                }
            }
            sink.emit("regions.csv", &table)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Accounting,
    Rlnc,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BeSimArgs {
    #[arg(long, default_value_t = 0.6)]
    p: f64,
    /// Levels above the noise floor at receiver 1.
    #[arg(long, default_value_t = 3)]
    n1: usize,
    /// Levels above the noise floor at receiver 2.
    #[arg(long, default_value_t = 2)]
    n2: usize,
    /// Phase I and Phase II block length.
    #[arg(long = "T", default_value_t = 100_000)]
    #[serde(rename = "T")]
    block_len: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Accounting)]
    mode: ModeArg,
    /// Independent runs; trial `k` uses seed `seed ^ k`.
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct BeSummary {
    trials: u64,
    decoded: usize,
    mean_rates: Option<RatePair>,
    target: RatePair,
}

#[derive(Serialize)]
struct BeOutput {
    summary: BeSummary,
    reports: Vec<BeSimReport>,
}

pub fn be_sim(args: &BeSimArgs, sink: &mut Sink) -> Result<(), CliError> {
    let mode = match args.mode {
        ModeArg::Accounting => Phase3Mode::Accounting,
        ModeArg::Rlnc => Phase3Mode::Rlnc,
    };
    let cfg = BeConfig::new(
        prob(args.p)?,
        args.n1,
        args.n2,
        args.block_len,
        mode,
        args.common.seed,
    )
    .map_err(usage)?;
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let reports = be_sim::simulate_trials(&cfg, args.trials)?;
    let rated: Vec<RatePair> = reports.iter().filter_map(|r| r.empirical_rates).collect();
    let mean_rates = (!rated.is_empty()).then(|| {
        let n = rated.len() as f64;
        RatePair::new(
            rated.iter().map(|r| r.r1).sum::<f64>() / n,
            rated.iter().map(|r| r.r2).sum::<f64>() / n,
        )
    });
    let summary = BeSummary {
        trials: args.trials,
        decoded: rated.len(),
        mean_rates,
        target: cfg.target(),
    };
    match args.common.format {
        Format::Json => sink.emit("be_sim.json", &to_json(&BeOutput { summary, reports })),
        Format::Csv => {
            let mut t = String::from(
                "seed,bits_delivered_b1,bits_delivered_b2,total_slots,phase3_slots,decode_success,r1,r2,target_r1,target_r2\n",
            );
            for r in &reports {
                let (r1, r2) = r
                    .empirical_rates
                    .map_or((f64::NAN, f64::NAN), |x| (x.r1, x.r2));
                writeln!(
                    t,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.seed,
                    r.bits_delivered_b1,
                    r.bits_delivered_b2,
                    r.total_slots,
                    r.phase3_slots,
                    r.decode_success,
                    r1,
                    r2,
                    r.target.r1,
                    r.target.r2
                )
                .unwrap();
            }
            sink.emit("be_sim.csv", &t)
        }
    }
}

fn metrics_csv(rep: &GaussReport) -> String {
    let mut t = String::from("name,empirical,analytic,gap\n");
    for m in &rep.metrics {
        writeln!(t, "{},{},{},{}", m.name, m.empirical, m.analytic, m.gap).unwrap();
    }
    for c in &rep.checks {
        writeln!(
            t,
            "check:{},{},{},{}",
            c.name, c.value, c.threshold, c.passed as u8
        )
        .unwrap();
    }
    t
}

/// Write the report, then fail if any of its checks did not pass.
fn emit_report(
    sink: &mut Sink,
    stem: &str,
    format: Format,
    rep: GaussReport,
) -> Result<(), CliError> {
    let text = match format {
        Format::Json => to_json(&rep),
        Format::Csv => metrics_csv(&rep),
    };
    sink.emit(&format!("{stem}.{}", format.ext()), &text)?;
    rep.into_result().map(|_| ()).map_err(CliError::Run)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DpcArgs {
    /// Downlink SNR to receiver 1 (the dirty-paper receiver), in dB.
    #[arg(long, default_value_t = REFERENCE_STRONG_DB)]
    snr1_db: f64,
    /// Downlink SNR to receiver 2, in dB.
    #[arg(long, default_value_t = REFERENCE_WEAK_DB)]
    snr2_db: f64,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    /// Override the MMSE scaling coefficient.
    #[arg(long)]
    w: Option<f64>,
    /// Turn the dither off.
    #[arg(long)]
    no_dither: bool,
    /// Switch off the interfering signal for receiver 2.
    #[arg(long)]
    no_interference: bool,
    /// Distribution of the codeword symbol.
    #[arg(long, value_enum, default_value_t = CodewordArg::Uniform)]
    codeword: CodewordArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CodewordArg {
    Uniform,
    Gaussian,
}

pub fn dpc(args: &DpcArgs, sink: &mut Sink) -> Result<(), CliError> {
    let mut cfg = DpcConfig::new(
        linear(args.snr1_db)?,
        linear(args.snr2_db)?,
        args.samples,
        args.common.seed,
    )
    .map_err(usage)?;
    cfg.w = args.w;
    cfg.dither = !args.no_dither;
    cfg.interference = !args.no_interference;
    cfg.codeword = match args.codeword {
        CodewordArg::Uniform => Codeword::Uniform,
        CodewordArg::Gaussian => Codeword::Gaussian,
    };
    let stats = dpc_run(&cfg).map_err(usage)?;
    emit_report(sink, "dpc", args.common.format, dpc_report(&cfg, &stats))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceArg {
    Gaussian,
    DpcMixture,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SrArgs {
    #[arg(long, default_value_t = 0.6)]
    p: f64,
    /// Downlink SNR to receiver 1, in dB.
    #[arg(long, default_value_t = REFERENCE_STRONG_DB)]
    snr1_db: f64,
    /// Downlink SNR to receiver 2, in dB.
    #[arg(long, default_value_t = REFERENCE_WEAK_DB)]
    snr2_db: f64,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = SourceArg::Gaussian)]
    source: SourceArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct SrOutput {
    distortions: SrDistortions,
    feasibility: SrFeasibility,
    three_phase: ThreePhaseBudget,
    superposition: SuperpositionBudget,
    test_channel: GaussReport,
}

pub fn sr_check(args: &SrArgs, sink: &mut Sink) -> Result<(), CliError> {
    let (s1, s2) = (linear(args.snr1_db)?, linear(args.snr2_db)?);
    let p = prob(args.p)?;
    let distortions = sr_distortions(s1, s2).map_err(usage)?;
    let feasibility = sr_feasibility(args.p, s1, s2)?;
    let three_phase = three_phase_budget(p, s1, s2)?;
    let superposition = superposition_corner_budget(p, s1, s2)?;
    let source = match args.source {
        SourceArg::Gaussian => SrSource::Gaussian,
        SourceArg::DpcMixture => SrSource::DpcMixture {
            snr_1r: s1,
            snr_2r: s2,
        },
    };
    let test_channel = sr_test_channel_sim(
        distortions.d1,
        distortions.d2,
        source,
        args.samples,
        args.common.seed,
    )?;
    let out = SrOutput {
        distortions,
        feasibility,
        three_phase,
        superposition,
        test_channel,
    };
    match args.common.format {
        Format::Json => sink.emit("sr_check.json", &to_json(&out)),
        Format::Csv => {
            let b = &out.feasibility.budget;
            let mut t = String::from("name,value\n");
            for (name, v) in [
                ("d1", b.d1),
                ("d2", b.d2),
                ("rc", b.rc),
                ("rr", b.rr),
                ("common_slack", out.feasibility.common_slack),
                ("refinement_slack", out.feasibility.refinement_slack),
                ("three_phase_r1", out.three_phase.achievable.r1),
                ("three_phase_r2", out.three_phase.achievable.r2),
                ("three_phase_gap_r1", out.three_phase.gap.r1),
                ("three_phase_gap_r2", out.three_phase.gap.r2),
                ("superposition_r1", out.superposition.achievable.r1),
                ("superposition_r2", out.superposition.achievable.r2),
            ] {
                writeln!(t, "{name},{v}").unwrap();
            }
            for m in &out.test_channel.metrics {
                writeln!(t, "{},{}", m.name, m.empirical).unwrap();
            }
            sink.emit("sr_check.csv", &t)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UplinkModeArg {
    Exact,
    Montecarlo,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct UplinkArgs {
    #[arg(long, default_value_t = 0.6)]
    p: f64,
    /// Uplink SNR from user 1, in dB.
    #[arg(long, default_value_t = REFERENCE_STRONG_DB)]
    snr1_db: f64,
    /// Uplink SNR from user 2, in dB.
    #[arg(long, default_value_t = REFERENCE_WEAK_DB)]
    snr2_db: f64,
    #[arg(long, value_enum, default_value_t = UplinkModeArg::Montecarlo)]
    mode: UplinkModeArg,
    /// Slots in the Monte Carlo state trace.
    #[arg(long = "T", default_value_t = 1_000_000)]
    #[serde(rename = "T")]
    block_len: usize,
    #[command(flatten)]
    pub common: Common,
}

pub fn uplink(args: &UplinkArgs, sink: &mut Sink) -> Result<(), CliError> {
    let (a, b) = (linear(args.snr1_db)?, linear(args.snr2_db)?);
    // downlink SNRs do not enter the uplink sum rate
    let cfg = ChannelConfig::from_linear(args.p, a, b, a.max(b), a.min(b)).map_err(usage)?;
    let mode = match args.mode {
        UplinkModeArg::Exact => UplinkMode::Exact,
        UplinkModeArg::Montecarlo => {
            if args.block_len == 0 {
                return Err(CliError::Usage("--T must be at least 1".into()));
            }
            UplinkMode::MonteCarlo {
                block_len: args.block_len,
                seed: args.common.seed,
            }
        }
    };
    let rep = uplink_sum_rate(&cfg, mode)?;
    emit_report(sink, "uplink", args.common.format, rep)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GapArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct GapEntry {
    outer: String,
    inner: String,
    bound: f64,
    passed: bool,
    certificate: GapCertificate,
}

#[derive(Serialize)]
struct GapAudit {
    p: f64,
    delta: GapVector,
    entries: Vec<GapEntry>,
    passed: bool,
}

pub fn gap_audit(args: &GapArgs, sink: &mut Sink) -> Result<(), CliError> {
    let cfg = args.channel.config()?;
    let delta = delta_gaps(prob(cfg.p())?);
    let mut entries = Vec::new();
    for (link, info, bound) in [
        (Link::Uplink, StateInfo::Delayed, 1.0),
        (Link::Uplink, StateInfo::Instantaneous, 1.0),
        (
            Link::Downlink,
            StateInfo::Delayed,
            delta.d1().max(delta.d2()),
        ),
        (Link::Downlink, StateInfo::Instantaneous, 0.0),
    ] {
        let outer = link_region(&cfg, link, info, Bound::Outer);
        let inner = link_region(&cfg, link, info, Bound::Inner);
        let certificate = gap_certificate(&outer, &inner)?;
        entries.push(GapEntry {
            outer: outer.kind().label(),
            inner: inner.kind().label(),
            bound,
            passed: certificate.gap <= bound + GAP_TOL,
            certificate,
        });
    }
    let passed = entries.iter().all(|e| e.passed);
    let audit = GapAudit {
        p: cfg.p(),
        delta,
        entries,
        passed,
    };
    match args.common.format {
        Format::Json => sink.emit("gap_audit.json", &to_json(&audit))?,
        Format::Csv => {
            let mut t = String::from("outer,inner,gap,max_gap_r1,max_gap_r2,bound,passed\n");
            for e in &audit.entries {
                let c = &e.certificate;
                writeln!(
                    t,
                    "{},{},{},{},{},{},{}",
                    e.outer, e.inner, c.gap, c.max_gap_r1, c.max_gap_r2, e.bound, e.passed
                )
                .unwrap();
            }
            sink.emit("gap_audit.csv", &t)?;
        }
    }
    if passed {
        Ok(())
    } else {
        Err(CliError::Run(Error::Invariant(
            "a region pair exceeds its gap bound".into(),
        )))
    }
}
