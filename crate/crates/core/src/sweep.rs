//! Monte Carlo benchmark over a grid of instance sizes.
//!
//! Every (n, m_a, m_b, m0) cell draws `trials` random instances, shared by all
//! protocols of the cell. Instance and protocol seeds are derived from the
//! base seed and the cell parameters alone, so a record does not depend on
//! the grid around it or on the thread count. Records are sorted by cell key.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis;
use crate::engine::{RunOptions, Status, DEFAULT_ROUND_CAP};
use crate::error::{Error, Result};
use crate::model::random_instance;
use crate::protocols::{run_protocol, Protocol, ProtocolParams};
use crate::rectangles::{comm_lower_bound, BoundKind};
use crate::seed;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchConfig {
    pub protocols: Vec<String>,
    pub n: Vec<u32>,
    pub m_a: Vec<usize>,
    pub m_b: Vec<usize>,
    pub m0: Vec<usize>,
    /// Hash widths, used by protocols that take one.
    pub k: Vec<u32>,
    pub trials: u64,
    pub seed: u64,
    pub round_cap: usize,
    pub count_control_bits: bool,
    pub dedup: bool,
    /// Record wall-clock time per trial (makes output vary between runs).
    pub timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            protocols: vec!["trivial-sum".into(), "lv-sum".into()],
            n: vec![2, 4, 8],
            m_a: vec![2],
            m_b: vec![2],
            m0: vec![1],
            k: vec![2],
            trials: 100,
            seed: 0,
            round_cap: DEFAULT_ROUND_CAP,
            count_control_bits: false,
            dedup: false,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub n: u32,
    pub m_a: usize,
    pub m_b: usize,
    pub m0: usize,
    pub d_a: usize,
    pub protocol: String,
    pub k: Option<u32>,
    pub trials: u64,
    pub successes: u64,
    pub failures: u64,
    pub bits_mean: Option<f64>,
    pub bits_min: Option<u64>,
    pub bits_max: Option<u64>,
    pub payload_mean: Option<f64>,
    pub rounds_mean: Option<f64>,
    pub iterations_mean: Option<f64>,
    /// Rectangle bound for the sum: 2^n + n - 1.
    pub lower_bound: Option<u128>,
    /// Cost of the deterministic sum protocol: 2^n + 2n - 2.
    pub trivial_upper: Option<u128>,
    /// E[T_inf] for lv-sum cells.
    pub lv_model: Option<f64>,
    pub lv_rel_err: Option<f64>,
    pub wall_us_per_trial: Option<f64>,
    pub warning: Option<String>,
}

impl BenchRecord {
    fn empty(n: u32, m_a: usize, m_b: usize, m0: usize, protocol: &str, k: Option<u32>) -> Self {
        Self {
            n,
            m_a,
            m_b,
            m0,
            d_a: m_a.saturating_sub(m0),
            protocol: protocol.to_string(),
            k,
            trials: 0,
            successes: 0,
            failures: 0,
            bits_mean: None,
            bits_min: None,
            bits_max: None,
            payload_mean: None,
            rounds_mean: None,
            iterations_mean: None,
            lower_bound: comm_lower_bound(n, BoundKind::Sum).ok(),
            trivial_upper: (n <= 64).then(|| (1u128 << n) + 2 * n as u128 - 2),
            lv_model: None,
            lv_rel_err: None,
            wall_us_per_trial: None,
            warning: None,
        }
    }

    fn key(&self) -> (u32, usize, usize, usize, &str, Option<u32>) {
        (self.n, self.m_a, self.m_b, self.m0, &self.protocol, self.k)
    }
}

#[derive(Debug, Clone)]
struct Job {
    n: u32,
    m_a: usize,
    m_b: usize,
    m0: usize,
    protocol: String,
    k: Option<u32>,
}

fn jobs(cfg: &BenchConfig) -> Vec<Job> {
    let mut out = Vec::new();
    for &n in &cfg.n {
        for &m_a in &cfg.m_a {
            for &m_b in &cfg.m_b {
                for &m0 in &cfg.m0 {
                    for p in &cfg.protocols {
                        let ks: Vec<Option<u32>> = if p == "lv-sum" {
                            cfg.k.iter().map(|&k| Some(k)).collect()
                        } else {
                            vec![None]
                        };
                        for k in ks {
                            out.push(Job {
                                n,
                                m_a,
                                m_b,
                                m0,
                                protocol: p.clone(),
                                k,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

fn instance_seed(base: u64, job: &Job, trial: u64) -> u64 {
    seed::derive(
        base,
        &[job.n as u64, job.m_a as u64, job.m_b as u64, job.m0 as u64, trial],
    )
}

fn run_job(cfg: &BenchConfig, job: &Job) -> BenchRecord {
    let mut rec = BenchRecord::empty(job.n, job.m_a, job.m_b, job.m0, &job.protocol, job.k);
    let params = ProtocolParams {
        k: job.k,
        dedup: cfg.dedup,
        ..Default::default()
    };
    let protocol = match Protocol::from_id(&job.protocol, &params) {
        Ok(p) => p,
        Err(e) => {
            rec.warning = Some(e.to_string());
            return rec;
        }
    };
    let opts = RunOptions {
        round_cap: cfg.round_cap,
        count_control_bits: cfg.count_control_bits,
    };

    let mut bits = Vec::with_capacity(cfg.trials as usize);
    let mut payload = 0u128;
    let mut rounds = 0u128;
    let mut iterations = 0u128;
    let mut failures = 0u64;
    let start = Instant::now();
    for t in 0..cfg.trials {
        let s = instance_seed(cfg.seed, job, t);
        let out = random_instance(job.n, job.m_a, job.m_b, job.m0, s)
            .and_then(|inst| run_protocol(&protocol, &inst, seed::derive(s, &[1]), &opts));
        let out = match out {
            Ok(o) => o,
            Err(e) => {
                rec.warning = Some(e.to_string());
                return rec;
            }
        };
        if out.status != Status::Ok || !out.oracle_match {
            failures += 1;
            continue;
        }
        bits.push(out.bits());
        payload += out.payload_bits() as u128;
        rounds += out.transcript.rounds() as u128;
        iterations += out.loop_iterations() as u128;
    }
    let elapsed = start.elapsed();

    rec.trials = cfg.trials;
    rec.successes = bits.len() as u64;
    rec.failures = failures;
    if !bits.is_empty() {
        let c = bits.len() as f64;
        rec.bits_mean = Some(bits.iter().map(|&b| b as u128).sum::<u128>() as f64 / c);
        rec.bits_min = bits.iter().min().copied();
        rec.bits_max = bits.iter().max().copied();
        rec.payload_mean = Some(payload as f64 / c);
        rec.rounds_mean = Some(rounds as f64 / c);
        if matches!(protocol, Protocol::LasVegasSum { .. }) {
            rec.iterations_mean = Some(iterations as f64 / c);
        }
    }
    if let (Protocol::LasVegasSum { k, dedup: false }, Ok(d_a)) = (&protocol, u32::try_from(rec.d_a)) {
        if let Ok(model) = analysis::expected_bits_unbounded(job.n, *k, job.m_b as u64, d_a) {
            rec.lv_model = Some(model);
            rec.lv_rel_err = rec.payload_mean.map(|m| (m - model) / model);
        }
    }
    if cfg.timing && cfg.trials > 0 {
        rec.wall_us_per_trial = Some(elapsed.as_secs_f64() * 1e6 / cfg.trials as f64);
    }
    rec
}

/// Runs every (cell, protocol) job of the grid. Infeasible cells yield records
/// with a warning and zero trials.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    if cfg.protocols.is_empty() {
        return Err(Error::InvalidParameter("no protocols selected".into()));
    }
    let mut records: Vec<BenchRecord> = jobs(cfg).par_iter().map(|j| run_job(cfg, j)).collect();
    records.sort_by(|a, b| a.key().cmp(&b.key()));
    Ok(records)
}
