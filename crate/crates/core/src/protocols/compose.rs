//! Protocols built on a subprotocol.
//!
//! A wrapper forwards whole turns to the inner party while the inner protocol
//! runs. Once the inner party is done, the wrapper stays silent for the rest
//! of that turn and sends its own messages from the next turn on, so an inbox
//! never mixes inner messages with the wrapper's.

use crate::bits::BitString;
use crate::engine::{Halt, Outgoing, Party};
use crate::error::Error;
use crate::model::{sum_width, PartyView, Role, Value};
use crate::transcript::{Message, MessageKind};

use super::{single, value_as_u128};

fn sum_field(n: u32, value: u128) -> Outgoing {
    let mut bits = BitString::new();
    bits.push_u128(value, sum_width(n));
    Outgoing::payload(bits)
}

fn read_sum_field(n: u32, msg: &Message) -> Result<u128, Error> {
    let mut r = msg.bits.reader();
    let v = r.read_u128(sum_width(n))?;
    r.finish()?;
    Ok(v)
}

/// B's early-halt announcement: a single control bit 0. No sum subprotocol
/// opens with that message from B (an empty hash set is a control bit 1).
fn is_halt(msg: &Message) -> bool {
    msg.kind == MessageKind::Control && msg.bits.len() == 1 && msg.bits.get(0) == Some(false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DisjPhase {
    Start,
    /// A: the reply to the zero bit is either B's halt or the subprotocol.
    Decide,
    Inner,
    /// Inner done; wrapper messages start next turn.
    Post,
    AwaitVerdict,
    Done,
}

/// Set disjointness from any sum protocol.
///
/// 1. A sends one bit: whether 0 is in S_A. If 0 is in both sets B answers
///    with a one-bit control message and both output 0.
/// 2. Otherwise the parties run the sum subprotocol and learn y.
/// 3. B sends x_B (its own sum) in 2n - 1 bits; A outputs 1 iff x_A + x_B = y.
/// 4. With `verdict`, A sends the answer to B in one more bit.
///
/// Without `verdict` B learns nothing except in the early-halt case.
pub struct DisjointnessViaSum {
    view: PartyView,
    inner: Box<dyn Party>,
    verdict: bool,
    phase: DisjPhase,
    y: Option<u128>,
    result: Option<bool>,
}

impl DisjointnessViaSum {
    pub fn new(view: PartyView, inner: Box<dyn Party>, verdict: bool) -> Self {
        Self {
            view,
            inner,
            verdict,
            phase: DisjPhase::Start,
            y: None,
            result: None,
        }
    }

    fn zero_in_own(&self) -> bool {
        self.view.own_set.first() == Some(&0)
    }

    fn run_inner(&mut self, inbox: &[Message]) -> Result<Vec<Outgoing>, Halt> {
        let out = self.inner.take_turn(inbox)?;
        if self.inner.is_done() {
            let y = self
                .inner
                .output()
                .ok_or_else(|| Error::Malformed("sum subprotocol reported no value".into()))?;
            self.y = Some(value_as_u128(&y)?);
            self.phase = DisjPhase::Post;
        }
        Ok(out)
    }

    fn turn_a(&mut self, inbox: &[Message]) -> Result<Vec<Outgoing>, Halt> {
        match self.phase {
            DisjPhase::Start => {
                self.phase = DisjPhase::Decide;
                Ok(vec![Outgoing::payload(std::iter::once(self.zero_in_own()).collect())])
            }
            DisjPhase::Decide => {
                if self.zero_in_own() && inbox.first().is_some_and(is_halt) {
                    single(inbox, "halt announcement")?;
                    self.result = Some(false);
                    self.phase = DisjPhase::Done;
                    return Ok(vec![]);
                }
                self.phase = DisjPhase::Inner;
                self.run_inner(inbox)
            }
            DisjPhase::Inner => self.run_inner(inbox),
            DisjPhase::Post => {
                let Some(msg) = single(inbox, "x_B")? else {
                    return Ok(vec![]);
                };
                let x_b = read_sum_field(self.view.n, msg)?;
                let disjoint = self.view.own_sum() + x_b == self.y.expect("set on inner completion");
                self.result = Some(disjoint);
                self.phase = DisjPhase::Done;
                if self.verdict {
                    Ok(vec![Outgoing::payload(std::iter::once(disjoint).collect())])
                } else {
                    Ok(vec![])
                }
            }
            DisjPhase::AwaitVerdict | DisjPhase::Done => Ok(vec![]),
        }
    }

    fn turn_b(&mut self, inbox: &[Message]) -> Result<Vec<Outgoing>, Halt> {
        match self.phase {
            DisjPhase::Start => {
                let Some(msg) = single(inbox, "zero bit")? else {
                    return Ok(vec![]);
                };
                let zero_in_a = msg.bits.get(0) == Some(true);
                if zero_in_a && self.zero_in_own() {
                    self.result = Some(false);
                    self.phase = DisjPhase::Done;
                    return Ok(vec![Outgoing::control(false)]);
                }
                self.phase = DisjPhase::Inner;
                self.run_inner(&[])
            }
            DisjPhase::Inner => self.run_inner(inbox),
            DisjPhase::Post => {
                self.phase = if self.verdict {
                    DisjPhase::AwaitVerdict
                } else {
                    DisjPhase::Done
                };
                Ok(vec![sum_field(self.view.n, self.view.own_sum())])
            }
            DisjPhase::AwaitVerdict => {
                if let Some(msg) = single(inbox, "verdict")? {
                    self.result = Some(msg.bits.get(0) == Some(true));
                    self.phase = DisjPhase::Done;
                }
                Ok(vec![])
            }
            DisjPhase::Decide | DisjPhase::Done => Ok(vec![]),
        }
    }
}

impl Party for DisjointnessViaSum {
    fn take_turn(&mut self, inbox: &[Message]) -> Result<Vec<Outgoing>, Halt> {
        match self.view.role {
            Role::A => self.turn_a(inbox),
            Role::B => self.turn_b(inbox),
        }
    }

    fn is_done(&self) -> bool {
        self.phase == DisjPhase::Done
    }

    fn output(&self) -> Option<Value> {
        self.result.map(|d| Value::int(d as u32))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SviPhase {
    Inner,
    Post,
    Exchange,
    Done,
}

/// Sum of the union from any intersection protocol: after both parties know
/// S_A ∩ S_B they exchange x_A and x_B (2n - 1 bits each) and output
/// x_A + x_B - sum(S_A ∩ S_B).
pub struct SumViaIntersection {
    view: PartyView,
    inner: Box<dyn Party>,
    phase: SviPhase,
    common_sum: u128,
    other_sum: Option<u128>,
    result: Option<u128>,
}

impl SumViaIntersection {
    pub fn new(view: PartyView, inner: Box<dyn Party>) -> Self {
        Self {
            view,
            inner,
            phase: SviPhase::Inner,
            common_sum: 0,
            other_sum: None,
            result: None,
        }
    }

    fn absorb(&mut self, inbox: &[Message]) -> Result<(), Error> {
        if let Some(msg) = single(inbox, "partial sum")? {
            self.other_sum = Some(read_sum_field(self.view.n, msg)?);
        }
        Ok(())
    }

    fn finish_if_ready(&mut self) {
        if let (SviPhase::Exchange, Some(other)) = (self.phase, self.other_sum) {
            self.result = Some(self.view.own_sum() + other - self.common_sum);
            self.phase = SviPhase::Done;
        }
    }
}

impl Party for SumViaIntersection {
    fn take_turn(&mut self, inbox: &[Message]) -> Result<Vec<Outgoing>, Halt> {
        match self.phase {
            SviPhase::Inner => {
                let out = self.inner.take_turn(inbox)?;
                if self.inner.is_done() {
                    let common = self
                        .inner
                        .output()
                        .and_then(|v| v.as_set().map(<[u64]>::to_vec))
                        .ok_or_else(|| Error::Malformed("intersection subprotocol reported no set".into()))?;
                    self.common_sum = common.iter().map(|&x| x as u128).sum();
                    self.phase = SviPhase::Post;
                }
                Ok(out)
            }
            SviPhase::Post => {
                self.absorb(inbox)?;
                self.phase = SviPhase::Exchange;
                self.finish_if_ready();
                Ok(vec![sum_field(self.view.n, self.view.own_sum())])
            }
            SviPhase::Exchange => {
                self.absorb(inbox)?;
                self.finish_if_ready();
                Ok(vec![])
            }
            SviPhase::Done => Ok(vec![]),
        }
    }

    fn is_done(&self) -> bool {
        self.phase == SviPhase::Done
    }

    fn output(&self) -> Option<Value> {
        self.result.map(Value::int)
    }
}
