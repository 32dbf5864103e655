//! Cost model of the Las Vegas sum protocol.
//!
//! Per-iteration costs: t0 = k * m_B (B's hashes), t1 = t2 = 2n - 1 (the two
//! sums). The model treats each of A's d_A private elements as colliding
//! independently with probability
//!
//! ```text
//! coll = (2^(n-k) - 1) / (2^n - 1)
//! p_a  = (1 - coll)^d_A
//! E[T_r]   = sum_{i<r} p_n^i p_a ((i+1) t0 + t1) + t2
//! E[T_inf] = t0 / p_a + t1 + t2
//! ```
//!
//! Formulas are evaluated in exact rational arithmetic and converted to `f64`
//! at the end. [`simulate_vs_formula`] runs the protocol to compare.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{RunOptions, Status, DEFAULT_ROUND_CAP};
use crate::error::{Error, Result};
use crate::model::random_instance;
use crate::protocols::{run_protocol, Protocol};
use crate::seed;

fn check_nk(n: u32, k: u32) -> Result<()> {
    if !(1..=64).contains(&n) {
        return Err(Error::BitWidth(n));
    }
    if k < 1 || k > n {
        return Err(Error::HashWidth { n, k });
    }
    Ok(())
}

fn pow2(e: u32) -> BigInt {
    BigInt::one() << e
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Probability that a uniformly chosen balanced linear hash maps two fixed
/// distinct inputs to the same value: (2^(n-k) - 1) / (2^n - 1).
pub fn collision_probability(n: u32, k: u32) -> Result<BigRational> {
    check_nk(n, k)?;
    Ok(BigRational::new(pow2(n - k) - 1, pow2(n) - 1))
}

/// Numerator and denominator of 1 - coll, unreduced:
/// (2^n - 2^(n-k)) / (2^n - 1).
fn no_collision_parts(n: u32, k: u32) -> (BigInt, BigInt) {
    (pow2(n) - pow2(n - k), pow2(n) - 1)
}

/// p_a = (1 - coll)^d_a, reduced.
pub fn accept_probability(n: u32, k: u32, d_a: u32) -> Result<BigRational> {
    check_nk(n, k)?;
    let (num, den) = no_collision_parts(n, k);
    Ok(BigRational::new(num.pow(d_a), den.pow(d_a)))
}

/// Per-statement bit costs (t0, t1, t2).
pub fn statement_costs(n: u32, k: u32, m_b: u64) -> (u128, u128, u128) {
    let t = 2 * n as u128 - 1;
    (k as u128 * m_b as u128, t, t)
}

/// E[T_r] as an exact rational. The sum is accumulated over the common
/// denominator q^r, where p_n = a/q, so no intermediate gcd is needed.
pub fn expected_bits_bounded_exact(n: u32, k: u32, m_b: u64, d_a: u32, r: u64) -> Result<BigRational> {
    check_nk(n, k)?;
    if r == 0 {
        return Err(Error::InvalidParameter("round bound r must be at least 1".into()));
    }
    let (t0, t1, t2) = statement_costs(n, k, m_b);
    let (num, den) = no_collision_parts(n, k);
    let q = den.pow(d_a);
    let accept_num = num.pow(d_a);
    let a = &q - &accept_num;
    let (t0, t1) = (BigInt::from(t0), BigInt::from(t1));

    let mut acc = BigInt::zero();
    let mut a_pow = BigInt::one();
    let mut cost = &t0 + &t1;
    for _ in 0..r {
        acc = acc * &q + &a_pow * &accept_num * &cost;
        a_pow *= &a;
        cost += &t0;
    }
    let denom = q.pow(r as u32);
    Ok(BigRational::new_raw(acc, denom) + BigRational::from_integer(BigInt::from(t2)))
}

pub fn expected_bits_bounded(n: u32, k: u32, m_b: u64, d_a: u32, r: u64) -> Result<f64> {
    Ok(to_f64(&expected_bits_bounded_exact(n, k, m_b, d_a, r)?))
}

/// E[T_inf] = k m_B (1 - coll)^(-d_A) + 4n - 2, exact.
pub fn expected_bits_unbounded_exact(n: u32, k: u32, m_b: u64, d_a: u32) -> Result<BigRational> {
    check_nk(n, k)?;
    let (num, den) = no_collision_parts(n, k);
    let inv_accept = BigRational::new(den.pow(d_a), num.pow(d_a));
    let head = BigRational::from_integer(BigInt::from(k as u128 * m_b as u128)) * inv_accept;
    Ok(head + BigRational::from_integer(BigInt::from(4 * n as u64 - 2)))
}

pub fn expected_bits_unbounded(n: u32, k: u32, m_b: u64, d_a: u32) -> Result<f64> {
    Ok(to_f64(&expected_bits_unbounded_exact(n, k, m_b, d_a)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct KSweepEntry {
    pub k: u32,
    pub e_bits_inf: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimalK {
    pub k: u32,
    pub e_bits_inf: f64,
    /// E[T_inf] for every k in 1..=n.
    pub sweep: Vec<KSweepEntry>,
}

/// Exact argmin of E[T_inf] over k in 1..=n, ties to the smaller k.
pub fn optimal_k(n: u32, m_b: u64, d_a: u32) -> Result<OptimalK> {
    check_nk(n, 1)?;
    if d_a == 0 || m_b == 0 {
        return Err(Error::InvalidParameter("optimal k needs d_a >= 1 and m_b >= 1".into()));
    }
    let values: Vec<BigRational> = (1..=n)
        .into_par_iter()
        .map(|k| expected_bits_unbounded_exact(n, k, m_b, d_a))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    Ok(OptimalK {
        k: best as u32 + 1,
        e_bits_inf: to_f64(&values[best]),
        sweep: values
            .iter()
            .enumerate()
            .map(|(i, v)| KSweepEntry {
                k: i as u32 + 1,
                e_bits_inf: to_f64(v),
            })
            .collect(),
    })
}

/// Continuous approximation k = log2(d_a / c).
pub fn heuristic_k(d_a: u32, c: f64) -> Result<f64> {
    if d_a == 0 {
        return Err(Error::InvalidParameter("heuristic k needs d_a >= 1".into()));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("constant c must be positive, got {c}")));
    }
    Ok((d_a as f64 / c).log2())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceMode {
    /// A new random instance per trial.
    Fresh,
    /// One random instance, new shared randomness per trial.
    Fixed,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationParams {
    pub n: u32,
    pub k: u32,
    pub m_b: u64,
    pub d_a: u32,
    pub m0: u64,
    pub trials: u64,
    pub seed: u64,
    pub round_cap: usize,
    pub instance_mode: InstanceMode,
}

impl SimulationParams {
    pub fn new(n: u32, k: u32, m_b: u64, d_a: u32, m0: u64, trials: u64, seed: u64) -> Self {
        Self {
            n,
            k,
            m_b,
            d_a,
            m0,
            trials,
            seed,
            round_cap: DEFAULT_ROUND_CAP,
            instance_mode: InstanceMode::Fresh,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelValues {
    pub collision: f64,
    pub p_a: f64,
    pub e_bits_r: Option<f64>,
    pub e_bits_inf: f64,
    pub k_opt: Option<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Empirical {
    /// Fraction of runs accepted in the first iteration.
    pub p_hat: f64,
    /// Standard error of `p_hat`.
    pub p_hat_se: f64,
    pub rounds_mean: f64,
    pub bits_mean: f64,
    pub completed: u64,
    pub round_cap_hits: u64,
    pub wrong_values: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RelErr {
    pub p_a: f64,
    pub bits: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub params: SimulationParams,
    pub model: ModelValues,
    pub empirical: Empirical,
    pub rel_err: RelErr,
    /// k/n > 1/2, outside the regime the approximation k << n assumes.
    pub wide_k: bool,
}

struct Trial {
    iterations: u64,
    bits: u64,
    ok: bool,
    correct: bool,
}

/// Runs lv-sum on `trials` seeded instances with |S_A \ S0| = d_a, |S_B| = m_b,
/// |S0| = m0 and sets the measurements beside the model.
pub fn simulate_vs_formula(p: &SimulationParams) -> Result<SimulationReport> {
    check_nk(p.n, p.k)?;
    if p.trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let m_a = p.d_a as usize + p.m0 as usize;
    let (m_b, m0) = (p.m_b as usize, p.m0 as usize);
    // Fail early on infeasible sizes.
    let fixed = random_instance(p.n, m_a, m_b, m0, seed::derive(p.seed, &[u64::MAX]))?;
    let protocol = Protocol::LasVegasSum { k: p.k, dedup: false };
    let opts = RunOptions {
        round_cap: p.round_cap,
        count_control_bits: false,
    };

    let trials: Vec<Trial> = (0..p.trials)
        .into_par_iter()
        .map(|t| {
            let inst = match p.instance_mode {
                InstanceMode::Fixed => fixed.clone(),
                InstanceMode::Fresh => random_instance(p.n, m_a, m_b, m0, seed::derive(p.seed, &[t, 0]))?,
            };
            let out = run_protocol(&protocol, &inst, seed::derive(p.seed, &[t, 1]), &opts)?;
            let ok = out.status == Status::Ok;
            Ok(Trial {
                iterations: out.loop_iterations() as u64,
                bits: out.payload_bits(),
                ok,
                correct: !ok || out.oracle_match,
            })
        })
        .collect::<Result<_>>()?;

    let done: Vec<&Trial> = trials.iter().filter(|t| t.ok).collect();
    let completed = done.len() as u64;
    let first_accept = trials.iter().filter(|t| t.ok && t.iterations == 1).count() as f64;
    let total = p.trials as f64;
    let p_hat = first_accept / total;
    let mean = |f: fn(&Trial) -> u64| {
        if completed == 0 {
            f64::NAN
        } else {
            done.iter().map(|t| f(t) as u128).sum::<u128>() as f64 / completed as f64
        }
    };
    let rounds_mean = mean(|t| t.iterations);
    let bits_mean = mean(|t| t.bits);

    let p_a = to_f64(&accept_probability(p.n, p.k, p.d_a)?);
    let e_inf = expected_bits_unbounded(p.n, p.k, p.m_b, p.d_a)?;
    let k_opt = optimal_k(p.n, p.m_b, p.d_a).ok().map(|o| o.k);
    Ok(SimulationReport {
        params: p.clone(),
        model: ModelValues {
            collision: to_f64(&collision_probability(p.n, p.k)?),
            p_a,
            e_bits_r: None,
            e_bits_inf: e_inf,
            k_opt,
        },
        empirical: Empirical {
            p_hat,
            p_hat_se: (p_a * (1.0 - p_a) / total).sqrt(),
            rounds_mean,
            bits_mean,
            completed,
            round_cap_hits: p.trials - completed,
            wrong_values: trials.iter().filter(|t| !t.correct).count() as u64,
        },
        rel_err: RelErr {
            p_a: (p_hat - p_a) / p_a,
            bits: (bits_mean - e_inf) / e_inf,
        },
        wide_k: 2 * p.k > p.n,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisParams {
    pub n: u32,
    pub k: u32,
    pub m_b: u64,
    pub d_a: u32,
    pub r: Option<u64>,
    pub c: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HeuristicK {
    pub c: f64,
    pub k: f64,
    /// k* - round(heuristic k).
    pub gap: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub params: AnalysisParams,
    pub collision_exact: String,
    pub t0: u128,
    pub t1: u128,
    pub t2: u128,
    pub model: ModelValues,
    pub p_n: f64,
    pub heuristic: Option<HeuristicK>,
    pub sweep: Option<Vec<KSweepEntry>>,
    pub wide_k: bool,
    pub empirical: Option<Empirical>,
    pub rel_err: Option<RelErr>,
}

/// Model values for one parameter set; `sweep` adds the E[T_inf] sweep over k.
pub fn analyze(params: &AnalysisParams, sweep: bool) -> Result<AnalysisReport> {
    let AnalysisParams { n, k, m_b, d_a, r, c } = *params;
    let coll = collision_probability(n, k)?;
    let p_a = to_f64(&accept_probability(n, k, d_a)?);
    let (t0, t1, t2) = statement_costs(n, k, m_b);
    let opt = if d_a >= 1 && m_b >= 1 {
        Some(optimal_k(n, m_b, d_a)?)
    } else {
        None
    };
    let heuristic = if d_a >= 1 {
        let hk = heuristic_k(d_a, c)?;
        Some(HeuristicK {
            c,
            k: hk,
            gap: opt.as_ref().map_or(0, |o| o.k as i64 - hk.round() as i64),
        })
    } else {
        None
    };
    Ok(AnalysisReport {
        params: params.clone(),
        collision_exact: format!("{}/{}", coll.numer(), coll.denom()),
        t0,
        t1,
        t2,
        model: ModelValues {
            collision: to_f64(&coll),
            p_a,
            e_bits_r: r.map(|r| expected_bits_bounded(n, k, m_b, d_a, r)).transpose()?,
            e_bits_inf: expected_bits_unbounded(n, k, m_b, d_a)?,
            k_opt: opt.as_ref().map(|o| o.k),
        },
        p_n: 1.0 - p_a,
        heuristic,
        sweep: if sweep { opt.map(|o| o.sweep) } else { None },
        wide_k: 2 * k > n,
        empirical: None,
        rel_err: None,
    })
}

/// Exact value of a rational as `f64`, for callers holding exact results.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    to_f64(r)
}

/// Product of (1 - 2^(i-n)) for i < k: the chance a uniform k x n matrix has
/// full rank, exactly.
pub fn full_rank_fraction(n: u32, k: u32) -> Result<BigRational> {
    check_nk(n, k)?;
    let mut acc = BigRational::one();
    for i in 0..k {
        acc *= BigRational::new(pow2(n) - pow2(i), pow2(n));
    }
    Ok(acc)
}
