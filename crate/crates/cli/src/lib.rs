//! The `reconfn` command line: single protocol runs, benchmark sweeps,
//! lower-bound verification, cost-model analysis and instance generation.
//!
//! Exit status: 0 on success, 1 when a run or verification fails, 2 on
//! usage errors.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use reconfn_core::analysis::{self, AnalysisParams, InstanceMode, SimulationParams};
use reconfn_core::engine::{RunOptions, Status, DEFAULT_ROUND_CAP};
use reconfn_core::model::{random_instance, Instance};
use reconfn_core::protocols::{run_protocol, Protocol, ProtocolParams};
use reconfn_core::rectangles::{bounds_report, BoundKind, VerifyMode, MIN_SAMPLED_PAIRS};
use reconfn_core::sweep::{run_bench, BenchConfig};
use reconfn_core::Error;

#[derive(Debug, Parser)]
#[command(name = "reconfn", version, about = "Protocols for functions of reconciled sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one protocol on one instance and print the outcome.
    Run(RunArgs),
    /// Monte Carlo sweep over a grid of instance sizes.
    Bench(BenchArgs),
    /// Build and check the fooling families behind the lower bounds.
    VerifyBounds(VerifyArgs),
    /// Evaluate the lv-sum cost model, optionally against simulation.
    Analyze(AnalyzeArgs),
    /// Write a random instance file.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// JSON output (default).
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// CSV output.
    #[arg(long)]
    pub csv: bool,
    /// Write to a file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Sizes of a random instance, written `n=8,ma=20,mb=20,m0=16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSpec {
    pub n: u32,
    pub m_a: usize,
    pub m_b: usize,
    pub m0: usize,
}

impl FromStr for RandomSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (mut n, mut m_a, mut m_b, mut m0) = (None, None, None, None);
        for part in s.split([',', ' ']).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{part}`"))?;
            let v: u64 = value.parse().map_err(|_| format!("`{value}` is not a number"))?;
            match key {
                "n" => n = Some(v as u32),
                "ma" => m_a = Some(v as usize),
                "mb" => m_b = Some(v as usize),
                "m0" => m0 = Some(v as usize),
                other => return Err(format!("unknown size `{other}` (n, ma, mb, m0)")),
            }
        }
        Ok(RandomSpec {
            n: n.ok_or("missing n")?,
            m_a: m_a.ok_or("missing ma")?,
            m_b: m_b.ok_or("missing mb")?,
            m0: m0.unwrap_or(0),
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub protocol: String,
    /// Instance file (JSON with hex elements).
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    pub instance: Option<PathBuf>,
    /// Random instance sizes, e.g. n=8,ma=20,mb=20,m0=16.
    #[arg(long)]
    pub random: Option<RandomSpec>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Hash width for lv-sum.
    #[arg(long)]
    pub k: Option<u32>,
    /// Subprotocol for disj-via-sum and sum-via-intersection.
    #[arg(long)]
    pub sub: Option<String>,
    /// disj-via-sum: A reports the verdict to B.
    #[arg(long)]
    pub verdict: bool,
    /// lv-sum: send deduplicated hash sets.
    #[arg(long)]
    pub dedup: bool,
    #[arg(long, default_value_t = DEFAULT_ROUND_CAP)]
    pub round_cap: usize,
    #[arg(long)]
    pub count_control_bits: bool,
    /// Write the transcript dump (JSON) here.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn comma_list<T: FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .filter(|p| !p.is_empty())
        .map(|p| p.trim().parse::<T>().map_err(|_| format!("bad list item `{p}`")))
        .collect()
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Comma-separated protocol ids.
    #[arg(long, default_value = "trivial-sum,lv-sum")]
    pub protocols: String,
    #[arg(long, default_value = "2,4,8")]
    pub n: String,
    #[arg(long, default_value = "2")]
    pub ma: String,
    #[arg(long, default_value = "2")]
    pub mb: String,
    #[arg(long, default_value = "1")]
    pub m0: String,
    #[arg(long, default_value = "2")]
    pub k: String,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_ROUND_CAP)]
    pub round_cap: usize,
    #[arg(long)]
    pub count_control_bits: bool,
    #[arg(long)]
    pub dedup: bool,
    /// Add per-trial wall-clock time (output is then not reproducible).
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl BenchArgs {
    pub fn config(&self) -> anyhow::Result<BenchConfig> {
        let usage = |e: String| Usage(e);
        Ok(BenchConfig {
            protocols: comma_list(&self.protocols).map_err(usage)?,
            n: comma_list(&self.n).map_err(usage)?,
            m_a: comma_list(&self.ma).map_err(usage)?,
            m_b: comma_list(&self.mb).map_err(usage)?,
            m0: comma_list(&self.m0).map_err(usage)?,
            k: comma_list(&self.k).map_err(usage)?,
            trials: self.trials,
            seed: self.seed,
            round_cap: self.round_cap,
            count_control_bits: self.count_control_bits,
            dedup: self.dedup,
            timing: self.timing,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// sum or product.
    #[arg(long)]
    pub kind: BoundKind,
    #[arg(long)]
    pub n: u32,
    /// Check this many random pairs instead of all (at least 10^6). Default
    /// for n = 4.
    #[arg(long)]
    pub sampled_pairs: Option<u64>,
    /// Check every pair even at n = 4.
    #[arg(long, conflicts_with = "sampled_pairs")]
    pub full: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub n: u32,
    /// Hash width; defaults to the optimal k.
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub mb: u64,
    #[arg(long)]
    pub da: u32,
    /// Round bound for the bounded expectation.
    #[arg(long)]
    pub r: Option<u64>,
    /// Constant in the heuristic k = log2(d_A / c).
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Include E[T_inf] for every k.
    #[arg(long)]
    pub sweep_k: bool,
    /// Also run this many lv-sum trials.
    #[arg(long)]
    pub simulate: Option<u64>,
    /// Shared elements of simulated instances.
    #[arg(long, default_value_t = 0)]
    pub m0: u64,
    /// Reuse one instance across simulated trials.
    #[arg(long)]
    pub fixed_instance: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_ROUND_CAP)]
    pub round_cap: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    /// Sizes as n=2 ma=2 mb=2 m0=1 (space or comma separated).
    #[arg(required_unless_present = "random")]
    pub sizes: Vec<String>,
    #[arg(long, conflicts_with = "sizes")]
    pub random: Option<RandomSpec>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// An argument error detected after parsing; exits with status 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
        }
    }
}

/// Exit status for an error: 2 for bad arguments or parameters, 1 otherwise.
pub fn error_exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(
            Error::BitWidth(_)
            | Error::OutOfRange { .. }
            | Error::Duplicate(_)
            | Error::InfeasibleSizes(_)
            | Error::HashWidth { .. }
            | Error::TooLarge { .. }
            | Error::NotApplicable { .. }
            | Error::UnknownProtocol(_)
            | Error::Parse(_)
            | Error::InvalidParameter(_),
        ) => 2,
        _ => 1,
    }
}

fn sink<'a>(out: &Option<PathBuf>, stdout: &'a mut dyn Write) -> anyhow::Result<Box<dyn Write + 'a>> {
    Ok(match out {
        Some(path) => Box::new(io::BufWriter::new(
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(stdout),
    })
}

fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

fn write_csv<T: Serialize>(w: &mut dyn Write, rows: impl IntoIterator<Item = T>) -> anyhow::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Runs a parsed command, writing reports to `stdout` unless `--out` is given.
pub fn execute(cli: Cli, stdout: &mut dyn Write) -> anyhow::Result<Verdict> {
    match cli.command {
        Command::Run(a) => cmd_run(&a, stdout),
        Command::Bench(a) => cmd_bench(&a, stdout),
        Command::VerifyBounds(a) => cmd_verify_bounds(&a, stdout),
        Command::Analyze(a) => cmd_analyze(&a, stdout),
        Command::Gen(a) => cmd_gen(&a, stdout),
    }
}

fn load_instance(path: &PathBuf) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Instance::from_json(&text)?)
}

#[derive(Serialize)]
struct RunRow {
    protocol: String,
    status: Status,
    value_at_a: Option<String>,
    value_at_b: Option<String>,
    oracle_value: String,
    oracle_match: bool,
    bits: u64,
    payload_bits: u64,
    control_bits: u64,
    rounds: usize,
    loop_iterations: usize,
}

pub fn cmd_run(a: &RunArgs, stdout: &mut dyn Write) -> anyhow::Result<Verdict> {
    let params = ProtocolParams {
        k: a.k,
        dedup: a.dedup,
        sub: a.sub.clone(),
        verdict: a.verdict,
    };
    let protocol = Protocol::from_id(&a.protocol, &params)?;
    let inst = match (&a.instance, a.random) {
        (Some(path), _) => load_instance(path)?,
        (None, Some(r)) => random_instance(r.n, r.m_a, r.m_b, r.m0, a.seed)?,
        (None, None) => bail!(Usage("one of --instance or --random is required".into())),
    };
    let opts = RunOptions {
        round_cap: a.round_cap,
        count_control_bits: a.count_control_bits,
    };
    let out = run_protocol(&protocol, &inst, a.seed, &opts)?;
    if let Some(path) = &a.transcript {
        fs::write(path, out.transcript.dump_json()).with_context(|| format!("writing {}", path.display()))?;
    }
    let mut w = sink(&a.output.out, stdout)?;
    if a.output.csv {
        let t = out.transcript.summary();
        write_csv(
            &mut *w,
            [RunRow {
                protocol: out.protocol.clone(),
                status: out.status,
                value_at_a: out.value_at_a.as_ref().map(ToString::to_string),
                value_at_b: out.value_at_b.as_ref().map(ToString::to_string),
                oracle_value: out.oracle.to_string(),
                oracle_match: out.oracle_match,
                bits: out.bits(),
                payload_bits: t.payload_bits,
                control_bits: t.control_bits,
                rounds: t.rounds,
                loop_iterations: out.loop_iterations(),
            }],
        )?;
    } else {
        write_json(&mut *w, &out.report())?;
    }
    w.flush()?;
    Ok(Verdict::from_bool(out.status == Status::Ok && out.oracle_match))
}

pub fn cmd_bench(a: &BenchArgs, stdout: &mut dyn Write) -> anyhow::Result<Verdict> {
    let cfg = a.config()?;
    let records = run_bench(&cfg)?;
    let mut w = sink(&a.output.out, stdout)?;
    if a.output.csv {
        write_csv(&mut *w, &records)?;
    } else {
        write_json(&mut *w, &records)?;
    }
    w.flush()?;
    Ok(Verdict::Pass)
}

#[derive(Serialize)]
struct FamilyRow<'a> {
    kind: BoundKind,
    n: u32,
    label: String,
    size: usize,
    value_dec: &'a str,
}

pub fn cmd_verify_bounds(a: &VerifyArgs, stdout: &mut dyn Write) -> anyhow::Result<Verdict> {
    let mode = match (a.sampled_pairs, a.full) {
        (Some(p), _) => {
            if p < MIN_SAMPLED_PAIRS {
                bail!(Usage(format!("--sampled-pairs must be at least {MIN_SAMPLED_PAIRS}")));
            }
            VerifyMode::Sampled { pairs: p, seed: a.seed }
        }
        (None, true) => VerifyMode::Full,
        (None, false) => match VerifyMode::default_for(a.n) {
            VerifyMode::Sampled { pairs, .. } => VerifyMode::Sampled { pairs, seed: a.seed },
            m => m,
        },
    };
    let report = bounds_report(a.n, a.kind, mode)?;
    let mut w = sink(&a.output.out, stdout)?;
    if a.output.csv {
        write_csv(
            &mut *w,
            report.families.iter().map(|f| FamilyRow {
                kind: report.kind,
                n: report.n,
                label: f.label.to_string(),
                size: f.size,
                value_dec: &f.value_dec,
            }),
        )?;
    } else {
        write_json(&mut *w, &report)?;
    }
    w.flush()?;
    Ok(Verdict::from_bool(report.pass))
}

pub fn cmd_analyze(a: &AnalyzeArgs, stdout: &mut dyn Write) -> anyhow::Result<Verdict> {
    let k = match a.k {
        Some(k) => k,
        None if a.da >= 1 && a.mb >= 1 => analysis::optimal_k(a.n, a.mb, a.da)?.k,
        None => bail!(Usage("--k is required when --da or --mb is 0".into())),
    };
    let params = AnalysisParams {
        n: a.n,
        k,
        m_b: a.mb,
        d_a: a.da,
        r: a.r,
        c: a.c,
    };
    let mut report = analysis::analyze(&params, a.sweep_k)?;
    if let Some(trials) = a.simulate {
        let mut sim = SimulationParams::new(a.n, k, a.mb, a.da, a.m0, trials, a.seed);
        sim.round_cap = a.round_cap;
        if a.fixed_instance {
            sim.instance_mode = InstanceMode::Fixed;
        }
        let s = analysis::simulate_vs_formula(&sim)?;
        report.empirical = Some(s.empirical);
        report.rel_err = Some(s.rel_err);
    }
    let mut w = sink(&a.output.out, stdout)?;
    if a.output.csv {
        match &report.sweep {
            Some(sweep) => write_csv(&mut *w, sweep)?,
            None => write_csv(&mut *w, [&report.model])?,
        }
    } else {
        write_json(&mut *w, &report)?;
    }
    w.flush()?;
    Ok(Verdict::Pass)
}

pub fn cmd_gen(a: &GenArgs, stdout: &mut dyn Write) -> anyhow::Result<Verdict> {
    let spec = match a.random {
        Some(r) => r,
        None => a.sizes.join(",").parse::<RandomSpec>().map_err(Usage)?,
    };
    let inst = random_instance(spec.n, spec.m_a, spec.m_b, spec.m0, a.seed)?;
    let mut w = sink(&a.out, stdout)?;
    writeln!(w, "{}", inst.to_json())?;
    w.flush()?;
    Ok(Verdict::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_spec_parsing() {
        let r: RandomSpec = "n=8,ma=20,mb=20,m0=16".parse().unwrap();
        assert_eq!((r.n, r.m_a, r.m_b, r.m0), (8, 20, 20, 16));
        let r: RandomSpec = "n=2 ma=2 mb=2".parse().unwrap();
        assert_eq!(r.m0, 0);
        assert!("n=2,ma=2".parse::<RandomSpec>().is_err());
        assert!("n=2,ma=2,mb=1,x=4".parse::<RandomSpec>().is_err());
    }

    #[test]
    fn usage_errors_map_to_two() {
        assert_eq!(error_exit_code(&anyhow::Error::new(Usage("x".into()))), 2);
        assert_eq!(
            error_exit_code(&anyhow::Error::new(Error::UnknownProtocol("x".into()))),
            2
        );
        assert_eq!(error_exit_code(&anyhow::Error::new(Error::Stalled)), 1);
    }
}
