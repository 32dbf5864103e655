//! One-directional reconciliation: A sends its full characteristic vector,
//! B forms the union, evaluates the function and sends the value back.

use num_bigint::BigUint;

use crate::bits::BitString;
use crate::engine::{Halt, Outgoing, Party};
use crate::error::Error;
use crate::model::{set_product, sum_width, FunctionKind, PartyView, Role, Value};
use crate::transcript::Message;

use super::single;

/// Width of the length prefix in front of a product value.
pub const PRODUCT_LEN_BITS: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReconcileFn {
    Sum,
    Product,
    Max,
    Min,
}

impl ReconcileFn {
    pub fn function(self) -> FunctionKind {
        match self {
            ReconcileFn::Sum => FunctionKind::Sum,
            ReconcileFn::Product => FunctionKind::Product,
            ReconcileFn::Max => FunctionKind::Max,
            ReconcileFn::Min => FunctionKind::Min,
        }
    }
}

pub struct Reconcile {
    view: PartyView,
    phi: ReconcileFn,
    sent: bool,
    result: Option<BigUint>,
}

impl Reconcile {
    pub fn new(view: PartyView, phi: ReconcileFn) -> Self {
        Self {
            view,
            phi,
            sent: false,
            result: None,
        }
    }

    fn encode(&self, union: &[u64]) -> Result<(BigUint, BitString), Error> {
        let n = self.view.n;
        let mut bits = BitString::new();
        let value = match self.phi {
            ReconcileFn::Sum => {
                let s: u128 = union.iter().map(|&x| x as u128).sum();
                bits.push_u128(s, sum_width(n));
                BigUint::from(s)
            }
            ReconcileFn::Max | ReconcileFn::Min => {
                let v = if self.phi == ReconcileFn::Max {
                    union.iter().max()
                } else {
                    union.iter().min()
                };
                let v = *v.ok_or(Error::Undefined("max/min of empty union"))?;
                bits.push_u64(v, n);
                BigUint::from(v)
            }
            ReconcileFn::Product => {
                let p = set_product(union);
                bits.push_u64(p.bits(), PRODUCT_LEN_BITS);
                bits.push_biguint(&p, p.bits());
                p
            }
        };
        Ok((value, bits))
    }

    fn decode(&self, msg: &Message) -> Result<BigUint, Error> {
        let n = self.view.n;
        let mut r = msg.bits.reader();
        let v = match self.phi {
            ReconcileFn::Sum => BigUint::from(r.read_u128(sum_width(n))?),
            ReconcileFn::Max | ReconcileFn::Min => BigUint::from(r.read_u64(n)?),
            ReconcileFn::Product => {
                let len = r.read_u64(PRODUCT_LEN_BITS)?;
                r.read_biguint(len)?
            }
        };
        r.finish()?;
        Ok(v)
    }
}

impl Party for Reconcile {
    fn take_turn(&mut self, inbox: &[Message]) -> Result<Vec<Outgoing>, Halt> {
        let n = self.view.n;
        let msg = single(inbox, "reconcile")?;
        match self.view.role {
            Role::A => {
                if let Some(msg) = msg {
                    self.result = Some(self.decode(msg)?);
                }
                if self.sent {
                    return Ok(vec![]);
                }
                self.sent = true;
                let mut marks = vec![false; 1usize << n];
                for &x in &self.view.own_set {
                    marks[x as usize] = true;
                }
                Ok(vec![Outgoing::payload(marks.into_iter().collect())])
            }
            Role::B => {
                let Some(msg) = msg else { return Ok(vec![]) };
                if msg.bits.len() != 1usize << n {
                    return Err(Error::Malformed(format!("characteristic vector of {} bits", msg.bits.len())).into());
                }
                let mut union: Vec<u64> = (0..1u64 << n)
                    .filter(|&x| msg.bits.get(x as usize) == Some(true))
                    .collect();
                union.extend(self.view.own_set.iter().copied());
                union.sort_unstable();
                union.dedup();
                let (value, bits) = self.encode(&union)?;
                self.result = Some(value);
                self.sent = true;
                Ok(vec![Outgoing::payload(bits)])
            }
        }
    }

    fn is_done(&self) -> bool {
        self.sent && self.result.is_some()
    }

    fn output(&self) -> Option<Value> {
        self.result.clone().map(Value::Int)
    }
}
