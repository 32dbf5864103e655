//! Idempotent functions: each party folds its own set, the two n-bit partial
//! results are exchanged (A first), and both apply the operation once more.

use crate::bits::BitString;
use crate::engine::{Halt, Outgoing, Party};
use crate::model::{FunctionKind, PartyView, Value};
use crate::transcript::Message;

use super::single;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdempotentOp {
    Max,
    Min,
    BitOr,
    BitAnd,
}

impl IdempotentOp {
    pub fn apply(self, x: u64, y: u64) -> u64 {
        match self {
            IdempotentOp::Max => x.max(y),
            IdempotentOp::Min => x.min(y),
            IdempotentOp::BitOr => x | y,
            IdempotentOp::BitAnd => x & y,
        }
    }

    pub fn fold(self, set: &[u64]) -> Option<u64> {
        set.iter().copied().reduce(|x, y| self.apply(x, y))
    }

    pub fn function(self) -> FunctionKind {
        match self {
            IdempotentOp::Max => FunctionKind::Max,
            IdempotentOp::Min => FunctionKind::Min,
            IdempotentOp::BitOr => FunctionKind::BitOr,
            IdempotentOp::BitAnd => FunctionKind::BitAnd,
        }
    }
}

pub struct Idempotent {
    n: u32,
    op: IdempotentOp,
    own: u64,
    sent: bool,
    result: Option<u64>,
}

impl Idempotent {
    /// The view's set must be nonempty; `Protocol::check_applicable` enforces it.
    pub fn new(view: PartyView, op: IdempotentOp) -> Self {
        Self {
            n: view.n,
            op,
            own: op.fold(&view.own_set).expect("nonempty set"),
            sent: false,
            result: None,
        }
    }
}

impl Party for Idempotent {
    fn take_turn(&mut self, inbox: &[Message]) -> Result<Vec<Outgoing>, Halt> {
        if let Some(msg) = single(inbox, "partial result")? {
            let mut r = msg.bits.reader();
            let other = r.read_u64(self.n)?;
            r.finish()?;
            self.result = Some(self.op.apply(self.own, other));
        }
        if self.sent {
            return Ok(vec![]);
        }
        self.sent = true;
        let mut bits = BitString::with_capacity(self.n as usize);
        bits.push_u64(self.own, self.n);
        Ok(vec![Outgoing::payload(bits)])
    }

    fn is_done(&self) -> bool {
        self.sent && self.result.is_some()
    }

    fn output(&self) -> Option<Value> {
        self.result.map(Value::int)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::RunOptions;
    use crate::model::make_instance;
    use crate::protocols::{run_protocol, Protocol};

    fn run(op: IdempotentOp, n: u32, a: Vec<u64>, b: Vec<u64>) -> crate::protocols::Outcome {
        let inst = make_instance(n, a, b).unwrap();
        run_protocol(&Protocol::Idempotent(op), &inst, 0, &RunOptions::default()).unwrap()
    }

    #[test]
    fn max_example() {
        let out = run(IdempotentOp::Max, 2, vec![1, 3], vec![2]);
        assert_eq!(out.value_at_a, Some(Value::int(3u32)));
        assert_eq!(out.value_at_b, Some(Value::int(3u32)));
        assert_eq!(out.payload_bits(), 4);
        assert_eq!(out.transcript.rounds(), 2);
        assert!(out.oracle_match);
    }

    #[test]
    fn min_identical_sets() {
        let out = run(IdempotentOp::Min, 3, vec![5], vec![5]);
        assert_eq!(out.value(), Some(&Value::int(5u32)));
        assert_eq!(out.payload_bits(), 6);
    }

    #[test]
    fn bitwise_or_disjoint_masks() {
        let out = run(IdempotentOp::BitOr, 2, vec![0b01], vec![0b10]);
        assert_eq!(out.value(), Some(&Value::int(0b11u32)));
        let out = run(IdempotentOp::BitAnd, 4, vec![0b1110, 0b0111], vec![0b1111]);
        assert_eq!(out.value(), Some(&Value::int(0b0110u32)));
    }

    #[test]
    fn empty_set_rejected() {
        let inst = make_instance(2, vec![], vec![1]).unwrap();
        assert!(run_protocol(
            &Protocol::Idempotent(IdempotentOp::Max),
            &inst,
            0,
            &RunOptions::default()
        )
        .is_err());
    }
}
