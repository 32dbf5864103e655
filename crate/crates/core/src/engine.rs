//! Alternating-turn execution of two party state machines.
//!
//! Turns alternate A, B, A, ... starting with A. On its turn a party reads
//! every message sent since its previous turn and may send any number of
//! messages, including none. A protocol that starts with B simply has A pass
//! its first turn. The run ends once both parties report done; two
//! consecutive silent turns before that is a stall.

use serde::Serialize;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::model::{Role, Value};
use crate::transcript::{Direction, Message, MessageKind, Transcript};

pub const DEFAULT_ROUND_CAP: usize = 10_000;

/// A message a party wants to send this turn.
#[derive(Debug, Clone)]
pub struct Outgoing {
    pub kind: MessageKind,
    pub bits: BitString,
}

impl Outgoing {
    pub fn payload(bits: BitString) -> Self {
        Self {
            kind: MessageKind::Payload,
            bits,
        }
    }

    pub fn control(bit: bool) -> Self {
        Self {
            kind: MessageKind::Control,
            bits: std::iter::once(bit).collect(),
        }
    }
}

/// Why a party stopped without a value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Halt {
    RoundCapExceeded { rounds: usize },
    Failed(Error),
}

impl From<Error> for Halt {
    fn from(e: Error) -> Self {
        Halt::Failed(e)
    }
}

pub trait Party {
    fn take_turn(&mut self, inbox: &[Message]) -> Result<Vec<Outgoing>, Halt>;

    /// True once the party expects no further messages.
    fn is_done(&self) -> bool;

    /// The party's computed value, if it learns one.
    fn output(&self) -> Option<Value>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    RoundCapExceeded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Maximum loop iterations for protocols with an unbounded loop.
    pub round_cap: usize,
    /// Count control bits in the reported bit total.
    pub count_control_bits: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            round_cap: DEFAULT_ROUND_CAP,
            count_control_bits: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EngineRun {
    pub value_at_a: Option<Value>,
    pub value_at_b: Option<Value>,
    pub transcript: Transcript,
    pub status: Status,
}

pub fn execute(a: &mut dyn Party, b: &mut dyn Party) -> Result<EngineRun> {
    let mut transcript = Transcript::new();
    let mut inbox_a: Vec<Message> = Vec::new();
    let mut inbox_b: Vec<Message> = Vec::new();
    let mut speaker = Role::A;
    let mut silent = 0;

    while !(a.is_done() && b.is_done()) {
        let (party, inbox, other_inbox): (&mut dyn Party, _, _) = match speaker {
            Role::A => (&mut *a, &mut inbox_a, &mut inbox_b),
            Role::B => (&mut *b, &mut inbox_b, &mut inbox_a),
        };
        let received = std::mem::take(inbox);
        let sent = match party.take_turn(&received) {
            Ok(sent) => sent,
            Err(Halt::RoundCapExceeded { .. }) => {
                return Ok(EngineRun {
                    value_at_a: None,
                    value_at_b: None,
                    transcript,
                    status: Status::RoundCapExceeded,
                })
            }
            Err(Halt::Failed(e)) => return Err(e),
        };
        if sent.is_empty() {
            silent += 1;
            if silent >= 2 {
                return Err(Error::Stalled);
            }
        } else {
            silent = 0;
        }
        for out in sent {
            let msg = Message::new(Direction::from_sender(speaker), out.kind, out.bits)?;
            transcript.push(msg.clone());
            other_inbox.push(msg);
        }
        speaker = speaker.other();
    }

    Ok(EngineRun {
        value_at_a: a.output(),
        value_at_b: b.output(),
        transcript,
        status: Status::Ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Sends `count` one-bit messages, one per turn, then stops.
    struct Chatter {
        left: usize,
    }

    impl Party for Chatter {
        fn take_turn(&mut self, _: &[Message]) -> Result<Vec<Outgoing>, Halt> {
            if self.left == 0 {
                return Ok(vec![]);
            }
            self.left -= 1;
            Ok(vec![Outgoing::payload(std::iter::once(true).collect())])
        }
        fn is_done(&self) -> bool {
            self.left == 0
        }
        fn output(&self) -> Option<Value> {
            None
        }
    }

    struct Waiter;

    impl Party for Waiter {
        fn take_turn(&mut self, _: &[Message]) -> Result<Vec<Outgoing>, Halt> {
            Ok(vec![])
        }
        fn is_done(&self) -> bool {
            false
        }
        fn output(&self) -> Option<Value> {
            None
        }
    }

    #[test]
    fn alternation_records_directions() {
        let run = execute(&mut Chatter { left: 2 }, &mut Chatter { left: 2 }).unwrap();
        let dirs: Vec<_> = run.transcript.messages().iter().map(|m| m.direction).collect();
        assert_eq!(
            dirs,
            [Direction::AToB, Direction::BToA, Direction::AToB, Direction::BToA]
        );
        assert_eq!(run.status, Status::Ok);
    }

    #[test]
    fn stall_detected() {
        assert_eq!(execute(&mut Waiter, &mut Waiter).unwrap_err(), Error::Stalled);
    }

    #[test]
    fn round_cap_reports_no_value() {
        struct Capped;
        impl Party for Capped {
            fn take_turn(&mut self, _: &[Message]) -> Result<Vec<Outgoing>, Halt> {
                Err(Halt::RoundCapExceeded { rounds: 3 })
            }
            fn is_done(&self) -> bool {
                false
            }
            fn output(&self) -> Option<Value> {
                Some(Value::int(1u32))
            }
        }
        let run = execute(&mut Capped, &mut Waiter).unwrap();
        assert_eq!(run.status, Status::RoundCapExceeded);
        assert!(run.value_at_a.is_none() && run.value_at_b.is_none());
    }
}
