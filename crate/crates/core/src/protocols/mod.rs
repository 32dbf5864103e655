//! The protocol roster and the entry point that runs one protocol on one
//! instance.
//!
//! Every protocol is a pair of [`Party`] state machines driven by
//! [`engine::execute`]. Compound protocols (the disjointness reduction and the
//! intersection-based sum) wrap the parties of a subprotocol.

mod compose;
mod idempotent;
mod intersection;
mod las_vegas;
mod reconcile;
mod trivial_sum;

use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::engine::{self, Party, RunOptions, Status};
use crate::error::{Error, Result};
use crate::model::{self, FunctionKind, Instance, Role, Value, CHAR_VECTOR_MAX_N};
use crate::seed;
use crate::transcript::{MessageKind, Transcript, TranscriptSummary};

pub use compose::{DisjointnessViaSum, SumViaIntersection};
pub use idempotent::{Idempotent, IdempotentOp};
pub use intersection::{list_encoding_bits, NaiveIntersection};
pub use las_vegas::LasVegasSum;
pub use reconcile::{Reconcile, ReconcileFn};
pub use trivial_sum::TrivialSum;

/// Stable identifiers accepted by [`Protocol::from_id`].
pub const PROTOCOL_IDS: &[&str] = &[
    "idempotent-max",
    "idempotent-min",
    "idempotent-or",
    "idempotent-and",
    "trivial-sum",
    "lv-sum",
    "disj-via-sum",
    "sum-via-intersection",
    "naive-intersection",
    "reconcile-sum",
    "reconcile-product",
    "reconcile-max",
    "reconcile-min",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Protocol {
    Idempotent(IdempotentOp),
    TrivialSum,
    LasVegasSum { k: u32, dedup: bool },
    DisjointnessViaSum { sum: Box<Protocol>, verdict: bool },
    SumViaIntersection { intersection: Box<Protocol> },
    NaiveIntersection,
    Reconcile(ReconcileFn),
}

/// Parameters consulted when building a protocol from its identifier.
#[derive(Debug, Clone, Default)]
pub struct ProtocolParams {
    /// Hash width for `lv-sum` (also used when it is a subprotocol).
    pub k: Option<u32>,
    /// Send deduplicated hash sets instead of one field per element.
    pub dedup: bool,
    /// Subprotocol id for compound protocols.
    pub sub: Option<String>,
    /// Disjointness reduction: A reports its verdict to B.
    pub verdict: bool,
}

impl Protocol {
    pub fn from_id(id: &str, params: &ProtocolParams) -> Result<Self> {
        let p = match id {
            "idempotent-max" => Protocol::Idempotent(IdempotentOp::Max),
            "idempotent-min" => Protocol::Idempotent(IdempotentOp::Min),
            "idempotent-or" => Protocol::Idempotent(IdempotentOp::BitOr),
            "idempotent-and" => Protocol::Idempotent(IdempotentOp::BitAnd),
            "trivial-sum" => Protocol::TrivialSum,
            "lv-sum" => Protocol::LasVegasSum {
                k: params
                    .k
                    .ok_or_else(|| Error::InvalidParameter("lv-sum needs a hash width k".into()))?,
                dedup: params.dedup,
            },
            "disj-via-sum" => {
                let sub = params.sub.as_deref().unwrap_or("trivial-sum");
                let inner = Protocol::from_id(
                    sub,
                    &ProtocolParams {
                        sub: None,
                        ..params.clone()
                    },
                )?;
                if inner.function() != FunctionKind::Sum {
                    return Err(Error::InvalidParameter(format!("{sub} does not compute a sum")));
                }
                Protocol::DisjointnessViaSum {
                    sum: Box::new(inner),
                    verdict: params.verdict,
                }
            }
            "sum-via-intersection" => {
                let sub = params.sub.as_deref().unwrap_or("naive-intersection");
                let inner = Protocol::from_id(
                    sub,
                    &ProtocolParams {
                        sub: None,
                        ..params.clone()
                    },
                )?;
                if inner.function() != FunctionKind::Intersection {
                    return Err(Error::InvalidParameter(format!(
                        "{sub} does not compute an intersection"
                    )));
                }
                Protocol::SumViaIntersection {
                    intersection: Box::new(inner),
                }
            }
            "naive-intersection" => Protocol::NaiveIntersection,
            "reconcile-sum" => Protocol::Reconcile(ReconcileFn::Sum),
            "reconcile-product" => Protocol::Reconcile(ReconcileFn::Product),
            "reconcile-max" => Protocol::Reconcile(ReconcileFn::Max),
            "reconcile-min" => Protocol::Reconcile(ReconcileFn::Min),
            other => return Err(Error::UnknownProtocol(other.to_string())),
        };
        Ok(p)
    }

    pub fn id(&self) -> &'static str {
        match self {
            Protocol::Idempotent(op) => match op {
                IdempotentOp::Max => "idempotent-max",
                IdempotentOp::Min => "idempotent-min",
                IdempotentOp::BitOr => "idempotent-or",
                IdempotentOp::BitAnd => "idempotent-and",
            },
            Protocol::TrivialSum => "trivial-sum",
            Protocol::LasVegasSum { .. } => "lv-sum",
            Protocol::DisjointnessViaSum { .. } => "disj-via-sum",
            Protocol::SumViaIntersection { .. } => "sum-via-intersection",
            Protocol::NaiveIntersection => "naive-intersection",
            Protocol::Reconcile(f) => match f {
                ReconcileFn::Sum => "reconcile-sum",
                ReconcileFn::Product => "reconcile-product",
                ReconcileFn::Max => "reconcile-max",
                ReconcileFn::Min => "reconcile-min",
            },
        }
    }

    pub fn function(&self) -> FunctionKind {
        match self {
            Protocol::Idempotent(op) => op.function(),
            Protocol::TrivialSum | Protocol::LasVegasSum { .. } | Protocol::SumViaIntersection { .. } => {
                FunctionKind::Sum
            }
            Protocol::DisjointnessViaSum { .. } => FunctionKind::Disjointness,
            Protocol::NaiveIntersection => FunctionKind::Intersection,
            Protocol::Reconcile(f) => f.function(),
        }
    }

    /// Checks the protocol's preconditions against an instance.
    pub fn check_applicable(&self, inst: &Instance) -> Result<()> {
        let fail = |reason: String| {
            Err(Error::NotApplicable {
                protocol: self.id().to_string(),
                reason,
            })
        };
        match self {
            Protocol::Idempotent(_) => {
                if inst.m_a() == 0 || inst.m_b() == 0 {
                    return fail("both sets must be nonempty".into());
                }
            }
            Protocol::TrivialSum => {
                if inst.n() > CHAR_VECTOR_MAX_N {
                    return fail(format!("characteristic vector needs n <= {CHAR_VECTOR_MAX_N}"));
                }
            }
            Protocol::LasVegasSum { k, .. } => {
                if *k < 1 || *k > inst.n() {
                    return fail(format!("hash width k={k} outside 1..={}", inst.n()));
                }
            }
            Protocol::DisjointnessViaSum { sum, .. } => sum.check_applicable(inst)?,
            Protocol::SumViaIntersection { intersection } => intersection.check_applicable(inst)?,
            Protocol::NaiveIntersection => {
                if inst.n() > CHAR_VECTOR_MAX_N
                    && list_encoding_bits(inst.n(), inst.m_a(), inst.kappa()) >= 1u128 << inst.n().min(127)
                {
                    return fail("list encoding longer than a characteristic vector".into());
                }
            }
            Protocol::Reconcile(f) => {
                if inst.n() > CHAR_VECTOR_MAX_N {
                    return fail(format!("characteristic vector needs n <= {CHAR_VECTOR_MAX_N}"));
                }
                if matches!(f, ReconcileFn::Max | ReconcileFn::Min) && inst.m_a() + inst.m_b() == 0 {
                    return fail("max/min of an empty union is undefined".into());
                }
            }
        }
        Ok(())
    }

    /// Builds the two party state machines.
    pub fn parties(
        &self,
        inst: &Instance,
        shared_seed: u64,
        opts: &RunOptions,
    ) -> Result<(Box<dyn Party>, Box<dyn Party>)> {
        self.check_applicable(inst)?;
        let view = |role: Role| {
            let private = seed::derive(shared_seed, &[role as u64 + 1]);
            inst.view(role, shared_seed, private)
        };
        let pair: (Box<dyn Party>, Box<dyn Party>) = match self {
            Protocol::Idempotent(op) => (
                Box::new(Idempotent::new(view(Role::A), *op)),
                Box::new(Idempotent::new(view(Role::B), *op)),
            ),
            Protocol::TrivialSum => (
                Box::new(TrivialSum::new(view(Role::A))),
                Box::new(TrivialSum::new(view(Role::B))),
            ),
            Protocol::LasVegasSum { k, dedup } => (
                Box::new(LasVegasSum::new(view(Role::A), *k, *dedup, opts.round_cap)?),
                Box::new(LasVegasSum::new(view(Role::B), *k, *dedup, opts.round_cap)?),
            ),
            Protocol::DisjointnessViaSum { sum, verdict } => {
                let (ia, ib) = sum.parties(inst, shared_seed, opts)?;
                (
                    Box::new(DisjointnessViaSum::new(view(Role::A), ia, *verdict)),
                    Box::new(DisjointnessViaSum::new(view(Role::B), ib, *verdict)),
                )
            }
            Protocol::SumViaIntersection { intersection } => {
                let (ia, ib) = intersection.parties(inst, shared_seed, opts)?;
                (
                    Box::new(SumViaIntersection::new(view(Role::A), ia)),
                    Box::new(SumViaIntersection::new(view(Role::B), ib)),
                )
            }
            Protocol::NaiveIntersection => (
                Box::new(NaiveIntersection::new(view(Role::A))),
                Box::new(NaiveIntersection::new(view(Role::B))),
            ),
            Protocol::Reconcile(f) => (
                Box::new(Reconcile::new(view(Role::A), *f)),
                Box::new(Reconcile::new(view(Role::B), *f)),
            ),
        };
        Ok(pair)
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Protocol::LasVegasSum { k, dedup } => {
                write!(f, "lv-sum(k={k}{})", if *dedup { ",dedup" } else { "" })
            }
            Protocol::DisjointnessViaSum { sum, .. } => write!(f, "disj-via-sum({sum})"),
            Protocol::SumViaIntersection { intersection } => write!(f, "sum-via-intersection({intersection})"),
            other => f.write_str(other.id()),
        }
    }
}

impl FromStr for Protocol {
    type Err = Error;

    /// Parses an id with default parameters; `lv-sum` needs [`Protocol::from_id`].
    fn from_str(s: &str) -> Result<Self> {
        Protocol::from_id(s, &ProtocolParams::default())
    }
}

/// Registry entry describing a protocol id.
#[derive(Debug, Clone, Serialize)]
pub struct ProtocolDescriptor {
    pub id: &'static str,
    pub function: FunctionKind,
    pub needs_k: bool,
    pub max_n: Option<u32>,
}

pub fn registry() -> Vec<ProtocolDescriptor> {
    let params = ProtocolParams {
        k: Some(1),
        ..Default::default()
    };
    PROTOCOL_IDS
        .iter()
        .map(|&id| {
            let p = Protocol::from_id(id, &params).expect("registry ids parse");
            let max_n = match p {
                Protocol::TrivialSum | Protocol::Reconcile(_) | Protocol::DisjointnessViaSum { .. } => {
                    Some(CHAR_VECTOR_MAX_N)
                }
                _ => None,
            };
            ProtocolDescriptor {
                id,
                function: p.function(),
                needs_k: id == "lv-sum",
                max_n,
            }
        })
        .collect()
}

/// Result of one protocol run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub protocol: String,
    pub value_at_a: Option<Value>,
    pub value_at_b: Option<Value>,
    pub oracle: Value,
    pub transcript: Transcript,
    pub status: Status,
    /// Every reported value equals the oracle and at least one is reported.
    pub oracle_match: bool,
    pub count_control_bits: bool,
}

impl Outcome {
    pub fn payload_bits(&self) -> u64 {
        self.transcript.payload_bits()
    }

    /// Bit total under the run's accounting option.
    pub fn bits(&self) -> u64 {
        self.transcript.counted_bits(self.count_control_bits)
    }

    /// Iterations of the hash loop: one control message per iteration.
    pub fn loop_iterations(&self) -> usize {
        self.transcript
            .messages()
            .iter()
            .filter(|m| m.kind == MessageKind::Control && m.direction.sender() == Role::A)
            .count()
    }

    /// The agreed value when the run succeeded and every reporting party agrees.
    pub fn value(&self) -> Option<&Value> {
        if self.status != Status::Ok {
            return None;
        }
        match (&self.value_at_a, &self.value_at_b) {
            (Some(a), Some(b)) if a == b => Some(a),
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b),
            _ => None,
        }
    }

    pub fn report(&self) -> OutcomeReport<'_> {
        OutcomeReport {
            protocol: &self.protocol,
            status: self.status,
            value_at_a: self.value_at_a.as_ref(),
            value_at_b: self.value_at_b.as_ref(),
            oracle_value: &self.oracle,
            oracle_match: self.oracle_match,
            bits: self.bits(),
            transcript: self.transcript.summary(),
            loop_iterations: self.loop_iterations(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct OutcomeReport<'a> {
    pub protocol: &'a str,
    pub status: Status,
    pub value_at_a: Option<&'a Value>,
    pub value_at_b: Option<&'a Value>,
    pub oracle_value: &'a Value,
    pub oracle_match: bool,
    pub bits: u64,
    #[serde(flatten)]
    pub transcript: TranscriptSummary,
    pub loop_iterations: usize,
}

/// Runs `protocol` on `inst` and checks the result against the oracle.
/// Deterministic in `(protocol, inst, shared_seed)`.
pub fn run_protocol(protocol: &Protocol, inst: &Instance, shared_seed: u64, opts: &RunOptions) -> Result<Outcome> {
    let (mut a, mut b) = protocol.parties(inst, shared_seed, opts)?;
    let oracle = model::oracle_value(inst, protocol.function())?;
    let run = engine::execute(a.as_mut(), b.as_mut())?;
    let reported: Vec<&Value> = run.value_at_a.iter().chain(run.value_at_b.iter()).collect();
    let oracle_match = run.status == Status::Ok && !reported.is_empty() && reported.iter().all(|v| **v == oracle);
    Ok(Outcome {
        protocol: protocol.to_string(),
        value_at_a: run.value_at_a,
        value_at_b: run.value_at_b,
        oracle,
        transcript: run.transcript,
        status: run.status,
        oracle_match,
        count_control_bits: opts.count_control_bits,
    })
}

/// Reads a value carried as an integer by a subprotocol.
pub(crate) fn value_as_u128(v: &Value) -> Result<u128> {
    v.as_int()
        .and_then(|i| i.to_u128())
        .ok_or_else(|| Error::Malformed(format!("expected an integer below 2^128, got {v}")))
}

/// Pulls exactly one message out of a turn's inbox.
pub(crate) fn single<'a>(
    inbox: &'a [crate::transcript::Message],
    what: &str,
) -> Result<Option<&'a crate::transcript::Message>> {
    match inbox {
        [] => Ok(None),
        [m] => Ok(Some(m)),
        _ => Err(Error::Malformed(format!(
            "expected one {what} message, got {}",
            inbox.len()
        ))),
    }
}
