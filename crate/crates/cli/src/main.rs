//! `twr`: command-line front end for the two-way relay toolkit.
//!
//! Every subcommand writes a JSON (or CSV) report plus a `manifest.json`
//! describing how to reproduce it. Exit codes: 0 on success, 1 when a
//! simulation or invariant check fails, 2 on bad usage.

mod commands;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use output::{Format, RunManifest, Sink};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "TWR_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "twr",
    version,
    about = "Two-way relay channel with an intermittent relay: regions, gap audits and simulators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Base seed for every random stream.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory. Without it the report goes to stdout and the
    /// manifest to stderr.
    #[arg(long, env = OUT_DIR_ENV)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Constraints and vertices of the rate regions and their intersections.
    Regions(commands::RegionsArgs),
    /// Bit-exact three-phase downlink on the binary expansion model.
    BeSim(commands::BeSimArgs),
    /// Modulo-lattice dirty-paper channel Monte Carlo.
    Dpc(commands::DpcArgs),
    /// Successive-refinement distortions, rates, feasibility and test channels.
    SrCheck(commands::SrArgs),
    /// Uplink lattice-decoding sum rate, exact or Monte Carlo.
    UplinkMc(commands::UplinkArgs),
    /// Gap certificates between outer and inner regions.
    GapAudit(commands::GapArgs),
    /// Re-run the command recorded in a manifest.
    Rerun {
        manifest: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or an invalid flag combination.
    Usage(String),
    /// A simulation or check failed.
    Run(twr_core::Error),
    Io(String),
}

impl CliError {
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io(output::io_message(path, err))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Run(_) | CliError::Io(_) => 1,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        let (kind, message) = match self {
            CliError::Usage(m) => ("usage", m.clone()),
            CliError::Io(m) => ("io", m.clone()),
            CliError::Run(e) => (core_error_kind(e), e.to_string()),
        };
        serde_json::json!({ "error": { "kind": kind, "message": message } })
    }
}

fn core_error_kind(e: &twr_core::Error) -> &'static str {
    use twr_core::Error::*;
    match e {
        Domain(_) => "domain",
        Config(_) => "config",
        Unsupported(_) => "unsupported",
        Unbounded => "unbounded",
        NotNested(_) => "not_nested",
        OutOfRange { .. } => "out_of_range",
        Invariant(_) => "invariant",
        Infeasible(_) => "infeasible",
    }
}

impl From<twr_core::Error> for CliError {
    fn from(e: twr_core::Error) -> Self {
        CliError::Run(e)
    }
}

/// Turn a core error raised while validating flags into a usage error.
pub fn usage(e: twr_core::Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn run(command: Command, argv: Vec<String>) -> Result<(), CliError> {
    let start = Instant::now();
    let (name, common, params) = match &command {
        Command::Regions(a) => ("regions", a.common.clone(), serde_json::to_value(a)),
        Command::BeSim(a) => ("be-sim", a.common.clone(), serde_json::to_value(a)),
        Command::Dpc(a) => ("dpc", a.common.clone(), serde_json::to_value(a)),
        Command::SrCheck(a) => ("sr-check", a.common.clone(), serde_json::to_value(a)),
        Command::UplinkMc(a) => ("uplink-mc", a.common.clone(), serde_json::to_value(a)),
        Command::GapAudit(a) => ("gap-audit", a.common.clone(), serde_json::to_value(a)),
        Command::Rerun { manifest, common } => return rerun(manifest, common),
    };
    let mut params = params.expect("arguments serialise");
    if let Some(obj) = params.as_object_mut() {
        // the output location is not part of what determines the results
        if let Some(common) = obj.get_mut("common").and_then(|c| c.as_object_mut()) {
            common.remove("out");
        }
    }
    let mut sink = Sink::new(common.out.clone())?;
    let outcome = match command {
        Command::Regions(a) => commands::regions(&a, &mut sink),
        Command::BeSim(a) => commands::be_sim(&a, &mut sink),
        Command::Dpc(a) => commands::dpc(&a, &mut sink),
        Command::SrCheck(a) => commands::sr_check(&a, &mut sink),
        Command::UplinkMc(a) => commands::uplink(&a, &mut sink),
        Command::GapAudit(a) => commands::gap_audit(&a, &mut sink),
        Command::Rerun { .. } => unreachable!(),
    };
    // a report that failed its checks still gets a manifest
    if !sink.has_output() {
        return outcome;
    }
    sink.finish(RunManifest {
        subcommand: name.into(),
        params,
        seed: common.seed,
        version: env!("CARGO_PKG_VERSION"),
        argv,
        outputs: Vec::new(),
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })?;
    outcome
}

/// Replay the `argv` of a manifest, optionally into a different directory.
fn rerun(manifest: &Path, common: &Common) -> Result<(), CliError> {
    let text = std::fs::read_to_string(manifest).map_err(|e| CliError::io(manifest, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", manifest.display())))?;
    let mut argv: Vec<String> = value["argv"]
        .as_array()
        .ok_or_else(|| CliError::Usage("manifest has no argv".into()))?
        .iter()
        .filter_map(|a| a.as_str().map(String::from))
        .collect();
    strip_out(&mut argv);
    if let Some(dir) = &common.out {
        argv.push("--out".into());
        argv.push(dir.display().to_string());
    }
    let cli = Cli::try_parse_from(std::iter::once("twr".to_string()).chain(argv.iter().cloned()))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if matches!(cli.command, Command::Rerun { .. }) {
        return Err(CliError::Usage(
            "a manifest cannot rerun another manifest".into(),
        ));
    }
    run(cli.command, argv)
}

fn strip_out(argv: &mut Vec<String>) {
    let mut i = 0;
    while i < argv.len() {
        if argv[i] == "--out" {
            argv.drain(i..(i + 2).min(argv.len()));
        } else if argv[i].starts_with("--out=") {
            argv.remove(i);
        } else {
            i += 1;
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    match run(cli.command, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
