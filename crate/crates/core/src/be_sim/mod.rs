//! Bit-exact simulation of the three-phase downlink scheme on the
//! deterministic binary expansion model.
//!
//! The relay serves `B1` (strong, `n1` levels) and `B2` (weak, `n2` levels)
//! with delayed knowledge of which receivers were active:
//!
//! 1. Phase I sends fresh `B1` bits on all `n1` levels. Slots where only `B2`
//!    listened leave `B2` holding the top `n2` levels of a symbol `B1` missed.
//! 2. Phase II sends fresh `B2` bits on the top `n2` levels and extra `B1`
//!    bits underneath. Slots where only `B1` listened leave `B1` holding a
//!    symbol `B2` missed.
//! 3. Phase III sends XORs of the two erased sequences. Each receiver
//!    cancels the half it already knows.
//!
//! Every credited bit is checked against the transmitted payload.

mod gf2;
mod level;

pub use gf2::Gf2Decoder;
pub use level::{be_receive, LevelVector, MAX_LEVELS};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regions::{ActivityProb, RatePair};
use crate::rng::{self, streams};
use crate::state::StateTrace;

/// Largest erased-sequence length the random linear coding mode accepts.
pub const RLNC_MAX_SYMBOLS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase3Mode {
    /// Each Phase III reception delivers the next XOR symbol, as an ideal
    /// erasure code would on average.
    Accounting,
    /// Random GF(2) combinations of the XOR symbols, decoded by elimination.
    Rlnc,
}

impl std::str::FromStr for Phase3Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "accounting" => Ok(Self::Accounting),
            "rlnc" => Ok(Self::Rlnc),
            _ => Err(Error::Config(format!("unknown phase III mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeConfig {
    p: f64,
    n1: usize,
    n2: usize,
    block_len: usize,
    mode: Phase3Mode,
    seed: u64,
}

impl BeConfig {
    pub fn new(
        p: ActivityProb,
        n1: usize,
        n2: usize,
        block_len: usize,
        mode: Phase3Mode,
        seed: u64,
    ) -> Result<Self> {
        if n2 == 0 || n1 < n2 {
            return Err(Error::Config(format!(
                "need n1 >= n2 >= 1, got ({n1}, {n2})"
            )));
        }
        if n1 > MAX_LEVELS {
            return Err(Error::Config(format!(
                "at most {MAX_LEVELS} levels supported, got {n1}"
            )));
        }
        if block_len == 0 {
            return Err(Error::Config("block length T must be at least 1".into()));
        }
        let cfg = Self {
            p: p.value(),
            n1,
            n2,
            block_len,
            mode,
            seed,
        };
        if mode == Phase3Mode::Rlnc && cfg.target_len() > RLNC_MAX_SYMBOLS {
            return Err(Error::Config(format!(
                "rlnc mode handles at most {RLNC_MAX_SYMBOLS} erased symbols, T = {block_len} gives {}",
                cfg.target_len()
            )));
        }
        Ok(cfg)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    /// Number of levels in a transmitted symbol.
    pub fn q(&self) -> usize {
        self.n1
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn mode(&self) -> Phase3Mode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    /// Length of each erased sequence after truncation or padding,
    /// `floor(T p (1 - p))`.
    pub fn target_len(&self) -> usize {
        (self.block_len as f64 * self.p * (1.0 - self.p) + 1e-9).floor() as usize
    }

    /// Phase III length in accounting mode, `ceil(T (1 - p))`.
    pub fn accounting_phase3_len(&self) -> usize {
        (self.block_len as f64 * (1.0 - self.p) - 1e-9)
            .ceil()
            .max(0.0) as usize
    }

    /// Slot cap in rlnc mode, `ceil(4 target_len / p)`.
    pub fn rlnc_slot_cap(&self) -> usize {
        (4.0 * self.target_len() as f64 / self.p).ceil() as usize
    }

    /// Rate pair the scheme approaches as `T` grows:
    /// `(p (n1 - n2) + p(2-p)/(3-p) n2, p(2-p)/(3-p) n2)`.
    pub fn target(&self) -> RatePair {
        be_target(self.p, self.n1, self.n2)
    }
}

pub fn be_target(p: f64, n1: usize, n2: usize) -> RatePair {
    let shared = p * (2.0 - p) / (3.0 - p) * n2 as f64;
    RatePair::new(p * (n1 - n2) as f64 + shared, shared)
}

/// What each receiver heard in one phase, slot by slot.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseReceptions {
    /// Transmitted symbols, `q` levels each.
    pub tx: Vec<LevelVector>,
    /// `B1` observations (all `n1` levels) or `None` when inactive.
    pub b1: Vec<Option<LevelVector>>,
    /// `B2` observations (top `n2` levels) or `None` when inactive.
    pub b2: Vec<Option<LevelVector>>,
    /// Slots overheard only by the unintended receiver, with the content the
    /// intended receiver is missing (as a `q`-level vector).
    pub erased: Vec<(usize, LevelVector)>,
}

fn draw_bits(rng: &mut impl Rng, n: usize) -> u32 {
    if n == 0 {
        0
    } else {
        rng.random::<u32>() & level::low_mask(n)
    }
}

fn observe(
    cfg: &BeConfig,
    trace: &StateTrace,
    tx: &[LevelVector],
) -> (Vec<Option<LevelVector>>, Vec<Option<LevelVector>>) {
    tx.iter()
        .enumerate()
        .map(|(t, &x)| {
            let (s1, s2) = trace.at(t);
            (be_receive(x, s1, cfg.n1), be_receive(x, s2, cfg.n2))
        })
        .unzip()
}

/// Phase I: fresh `B1` bits on all `n1` levels for `T` slots.
pub fn run_phase1(
    cfg: &BeConfig,
    trace: &StateTrace,
    payload: &mut impl Rng,
) -> Result<PhaseReceptions> {
    check_len(cfg, trace)?;
    let q = cfg.q();
    let tx: Vec<LevelVector> = (0..cfg.block_len)
        .map(|_| LevelVector::new(draw_bits(payload, q), q))
        .collect::<Result<_>>()?;
    let (b1, b2) = observe(cfg, trace, &tx);
    let erased = (0..cfg.block_len)
        .filter(|&t| trace.at(t) == (false, true))
        .map(|t| (t, tx[t]))
        .collect();
    Ok(PhaseReceptions { tx, b1, b2, erased })
}

/// Phase II: fresh `B2` bits on the top `n2` levels, fresh `B1` bits on the
/// bottom `n1 - n2` levels.
pub fn run_phase2(
    cfg: &BeConfig,
    trace: &StateTrace,
    payload: &mut impl Rng,
) -> Result<PhaseReceptions> {
    check_len(cfg, trace)?;
    let (q, low) = (cfg.q(), cfg.n1 - cfg.n2);
    let tx: Vec<LevelVector> = (0..cfg.block_len)
        .map(|_| {
            let top = draw_bits(payload, cfg.n2);
            let bottom = draw_bits(payload, low);
            LevelVector::new(top << low | bottom, q)
        })
        .collect::<Result<_>>()?;
    let (b1, b2) = observe(cfg, trace, &tx);
    let erased = (0..cfg.block_len)
        .filter(|&t| trace.at(t) == (true, false))
        .map(|t| (t, tx[t].clear_bottom(low)))
        .collect();
    Ok(PhaseReceptions { tx, b1, b2, erased })
}

fn check_len(cfg: &BeConfig, trace: &StateTrace) -> Result<()> {
    if trace.len() < cfg.block_len {
        return Err(Error::Domain(format!(
            "state trace has {} slots, phase needs {}",
            trace.len(),
            cfg.block_len
        )));
    }
    Ok(())
}

/// Erased sequences of both phases, each cut or zero-padded to the same
/// length, with the maps back to the original slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErasureLog {
    pub target_len: usize,
    pub xe1: Vec<LevelVector>,
    pub xe2: Vec<LevelVector>,
    /// `pi1[t']` is the Phase I slot of `xe1[t']`, for the kept prefix only.
    pub pi1: Vec<usize>,
    pub pi2: Vec<usize>,
    /// Erasure counts before truncation or padding.
    pub t1_raw: usize,
    pub t2_raw: usize,
}

impl ErasureLog {
    pub fn build(
        raw1: &[(usize, LevelVector)],
        raw2: &[(usize, LevelVector)],
        target_len: usize,
        q: usize,
    ) -> Self {
        let fit = |raw: &[(usize, LevelVector)]| {
            let kept = &raw[..raw.len().min(target_len)];
            let mut xs: Vec<LevelVector> = kept.iter().map(|&(_, x)| x).collect();
            xs.resize(target_len, LevelVector::zero(q));
            (xs, kept.iter().map(|&(t, _)| t).collect::<Vec<_>>())
        };
        let (xe1, pi1) = fit(raw1);
        let (xe2, pi2) = fit(raw2);
        Self {
            target_len,
            xe1,
            xe2,
            pi1,
            pi2,
            t1_raw: raw1.len(),
            t2_raw: raw2.len(),
        }
    }

    /// Phase III symbol `t'`: `xe1[t'] ⊕ xe2[t']`. The top `n2` levels mix
    /// both sequences; the rest is `xe1` alone.
    pub fn xor_symbol(&self, t: usize) -> LevelVector {
        self.xe1[t].xor(&self.xe2[t])
    }
}

/// What each receiver recovered from Phase III: the XOR symbols (`q` levels
/// for `B1`, top `n2` for `B2`), indexed by erased-sequence position.
#[derive(Debug, Clone, PartialEq)]
pub struct Phase3Receptions {
    pub slots: usize,
    pub b1: Vec<Option<LevelVector>>,
    pub b2: Vec<Option<LevelVector>>,
    pub decode_success: bool,
}

/// Phase III over `trace3`, which must hold at least as many slots as the
/// mode may use ([`BeConfig::accounting_phase3_len`] or
/// [`BeConfig::rlnc_slot_cap`]).
pub fn run_phase3(
    cfg: &BeConfig,
    trace3: Option<&StateTrace>,
    log: &ErasureLog,
) -> Result<Phase3Receptions> {
    let k = log.target_len;
    if k == 0 {
        // nothing was erased, so nothing is sent
        return Ok(Phase3Receptions {
            slots: 0,
            b1: vec![],
            b2: vec![],
            decode_success: true,
        });
    }
    let budget = match cfg.mode {
        Phase3Mode::Accounting => cfg.accounting_phase3_len(),
        Phase3Mode::Rlnc => cfg.rlnc_slot_cap(),
    };
    if trace3.is_none_or(|t| t.len() < budget) {
        return Err(Error::Domain(format!(
            "phase III needs a state trace of {budget} slots"
        )));
    }
    let empty = || vec![None; k];
    let trace3 = trace3.expect("checked above");
    match cfg.mode {
        Phase3Mode::Accounting => {
            let (mut b1, mut b2) = (empty(), empty());
            let (mut c1, mut c2) = (0, 0);
            for t in 0..budget {
                let (s1, s2) = trace3.at(t);
                if c1 < k {
                    if let Some(y) = be_receive(log.xor_symbol(c1), s1, cfg.n1) {
                        b1[c1] = Some(y);
                        c1 += 1;
                    }
                }
                if c2 < k {
                    if let Some(y) = be_receive(log.xor_symbol(c2), s2, cfg.n2) {
                        b2[c2] = Some(y);
                        c2 += 1;
                    }
                }
            }
            Ok(Phase3Receptions {
                slots: budget,
                b1,
                b2,
                decode_success: c1 == k && c2 == k,
            })
        }
        Phase3Mode::Rlnc => {
            let words = k.div_ceil(64);
            let mut coeff_rng = rng::stream(cfg.seed, streams::BE_RLNC_COEFF);
            let (mut d1, mut d2) = (Gf2Decoder::new(k), Gf2Decoder::new(k));
            let symbols: Vec<LevelVector> = (0..k).map(|t| log.xor_symbol(t)).collect();
            let mut slots = 0;
            while slots < budget && !(d1.is_complete() && d2.is_complete()) {
                let mut coeffs: Vec<u64> = (0..words).map(|_| coeff_rng.random()).collect();
                if !k.is_multiple_of(64) {
                    coeffs[words - 1] &= (1u64 << (k % 64)) - 1;
                }
                let mut combo = LevelVector::zero(cfg.q());
                for (j, x) in symbols.iter().enumerate() {
                    if coeffs[j / 64] >> (j % 64) & 1 == 1 {
                        combo = combo.xor(x);
                    }
                }
                let (s1, s2) = trace3.at(slots);
                if let Some(y) = be_receive(combo, s1, cfg.n1) {
                    d1.insert(&coeffs, y.bits());
                }
                if let Some(y) = be_receive(combo, s2, cfg.n2) {
                    d2.insert(&coeffs, y.bits());
                }
                slots += 1;
            }
            let unpack = |dec: &Gf2Decoder, n: usize| -> Result<Vec<Option<LevelVector>>> {
                match dec.solve() {
                    Some(xs) => xs
                        .into_iter()
                        .map(|b| LevelVector::new(b, n).map(Some))
                        .collect(),
                    None => Ok(empty()),
                }
            };
            Ok(Phase3Receptions {
                slots,
                b1: unpack(&d1, cfg.n1)?,
                b2: unpack(&d2, cfg.n2)?,
                decode_success: d1.is_complete() && d2.is_complete(),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeSimReport {
    pub p: f64,
    pub n1: usize,
    pub n2: usize,
    #[serde(rename = "T")]
    pub block_len: usize,
    pub mode: Phase3Mode,
    pub seed: u64,
    pub bits_delivered_b1: u64,
    pub bits_delivered_b2: u64,
    pub total_slots: usize,
    /// `None` when rlnc decoding hit the slot cap.
    pub empirical_rates: Option<RatePair>,
    pub target: RatePair,
    pub phase3_slots: usize,
    pub decode_success: bool,
    pub target_len: usize,
    pub t1_raw: usize,
    pub t2_raw: usize,
}

fn mismatch(what: &str, at: usize) -> Error {
    Error::Invariant(format!(
        "{what} does not match the transmitted payload at slot {at}"
    ))
}

/// Cancel side information, verify every bit against the payload and count
/// the delivered bits.
pub fn decode_and_score(
    cfg: &BeConfig,
    ph1: &PhaseReceptions,
    ph2: &PhaseReceptions,
    log: &ErasureLog,
    ph3: &Phase3Receptions,
) -> Result<BeSimReport> {
    let (n1, n2, q) = (cfg.n1, cfg.n2, cfg.q());
    let low = n1 - n2;
    let mut bits1 = 0u64;
    let mut bits2 = 0u64;

    for (t, rx) in ph1.b1.iter().enumerate() {
        if let Some(y) = rx {
            if *y != ph1.tx[t] {
                return Err(mismatch("B1 phase I reception", t));
            }
            bits1 += n1 as u64;
        }
    }
    for (t, rx) in ph2.b1.iter().enumerate() {
        if let Some(y) = rx {
            if y.bottom_bits(low) != ph2.tx[t].bottom_bits(low) {
                return Err(mismatch("B1 phase II bottom levels", t));
            }
            bits1 += low as u64;
        }
    }
    for (t, rx) in ph2.b2.iter().enumerate() {
        if let Some(y) = rx {
            if *y != ph2.tx[t].top(n2) {
                return Err(mismatch("B2 phase II reception", t));
            }
            bits2 += n2 as u64;
        }
    }

    let credit = cfg.mode == Phase3Mode::Accounting || ph3.decode_success;
    if credit {
        for (tp, rx) in ph3.b1.iter().enumerate() {
            let Some(y) = rx else { continue };
            // B1 heard xe2[t'] directly in phase II, or it is padding.
            let known = match log.pi2.get(tp) {
                Some(&t) => ph2.b1[t]
                    .ok_or_else(|| mismatch("B1 side information for xe2", t))?
                    .clear_bottom(low),
                None => LevelVector::zero(q),
            };
            let xe1 = y.xor(&known);
            if let Some(&t) = log.pi1.get(tp) {
                if xe1 != ph1.tx[t] {
                    return Err(mismatch("B1 recycled symbol", t));
                }
                bits1 += n1 as u64;
            } else if xe1 != LevelVector::zero(q) {
                return Err(Error::Invariant(format!(
                    "B1 padding at {tp} decoded as nonzero"
                )));
            }
        }
        for (tp, rx) in ph3.b2.iter().enumerate() {
            let Some(y) = rx else { continue };
            // B2 heard the top of xe1[t'] in phase I, or it is padding.
            let known = match log.pi1.get(tp) {
                Some(&t) => ph1.b2[t].ok_or_else(|| mismatch("B2 side information for xe1", t))?,
                None => LevelVector::zero(n2),
            };
            let xe2 = y.xor(&known);
            if let Some(&t) = log.pi2.get(tp) {
                if xe2 != ph2.tx[t].top(n2) {
                    return Err(mismatch("B2 recycled symbol", t));
                }
                bits2 += n2 as u64;
            } else if xe2 != LevelVector::zero(n2) {
                return Err(Error::Invariant(format!(
                    "B2 padding at {tp} decoded as nonzero"
                )));
            }
        }
    }

    let total_slots = 2 * cfg.block_len + ph3.slots;
    let decode_success = match cfg.mode {
        Phase3Mode::Accounting => true,
        Phase3Mode::Rlnc => ph3.decode_success,
    };
    let empirical_rates = decode_success.then(|| {
        RatePair::new(
            bits1 as f64 / total_slots as f64,
            bits2 as f64 / total_slots as f64,
        )
    });
    Ok(BeSimReport {
        p: cfg.p,
        n1,
        n2,
        block_len: cfg.block_len,
        mode: cfg.mode,
        seed: cfg.seed,
        bits_delivered_b1: bits1,
        bits_delivered_b2: bits2,
        total_slots,
        empirical_rates,
        target: cfg.target(),
        phase3_slots: ph3.slots,
        decode_success,
        target_len: log.target_len,
        t1_raw: log.t1_raw,
        t2_raw: log.t2_raw,
    })
}

/// Everything produced by one run, for inspection and replay.
#[derive(Debug, Clone)]
pub struct BeRun {
    pub trace: StateTrace,
    pub trace3: Option<StateTrace>,
    pub phase1: PhaseReceptions,
    pub phase2: PhaseReceptions,
    pub log: ErasureLog,
    pub phase3: Phase3Receptions,
    pub report: BeSimReport,
}

/// Run all three phases for one seed. Phases I and II use slots `0..T` and
/// `T..2T` of the state trace; Phase III uses its own state stream.
pub fn run(cfg: &BeConfig) -> Result<BeRun> {
    let p = ActivityProb::new(cfg.p)?;
    let trace = StateTrace::generate(p, 2 * cfg.block_len, cfg.seed)?;
    let mut payload = rng::stream(cfg.seed, streams::BE_PAYLOAD);
    let phase1 = run_phase1(cfg, &trace.slice(0..cfg.block_len)?, &mut payload)?;
    let phase2 = run_phase2(
        cfg,
        &trace.slice(cfg.block_len..2 * cfg.block_len)?,
        &mut payload,
    )?;
    let log = ErasureLog::build(&phase1.erased, &phase2.erased, cfg.target_len(), cfg.q());

    let len3 = match cfg.mode {
        Phase3Mode::Accounting => cfg.accounting_phase3_len(),
        Phase3Mode::Rlnc => cfg.rlnc_slot_cap(),
    };
    let trace3 = if len3 > 0 && log.target_len > 0 {
        Some(phase3_trace(p, len3, cfg.seed))
    } else {
        None
    };
    let phase3 = run_phase3(cfg, trace3.as_ref(), &log)?;
    let report = decode_and_score(cfg, &phase1, &phase2, &log, &phase3)?;
    Ok(BeRun {
        trace,
        trace3,
        phase1,
        phase2,
        log,
        phase3,
        report,
    })
}

fn phase3_trace(p: ActivityProb, len: usize, seed: u64) -> StateTrace {
    let mut r1 = rng::stream(seed, streams::BE_PHASE3_STATE);
    let s1: Vec<bool> = (0..len).map(|_| r1.random_bool(p.value())).collect();
    let s2: Vec<bool> = (0..len).map(|_| r1.random_bool(p.value())).collect();
    StateTrace::from_parts(s1, s2, p, seed).expect("equal non-empty lengths")
}

pub fn simulate(cfg: &BeConfig) -> Result<BeSimReport> {
    run(cfg).map(|r| r.report)
}

/// Independent runs with seeds `seed ^ k`, `k = 0..trials`.
pub fn simulate_trials(cfg: &BeConfig, trials: u64) -> Result<Vec<BeSimReport>> {
    (0..trials)
        .map(|k| simulate(&cfg.with_seed(rng::trial_seed(cfg.seed, k))))
        .collect()
}
