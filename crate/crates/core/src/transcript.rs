//! Bit-exact record of every message exchanged during a run.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::model::Role;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "A->B")]
    AToB,
    #[serde(rename = "B->A")]
    BToA,
}

impl Direction {
    pub fn from_sender(role: Role) -> Self {
        match role {
            Role::A => Direction::AToB,
            Role::B => Direction::BToA,
        }
    }

    pub fn sender(self) -> Role {
        match self {
            Direction::AToB => Role::A,
            Direction::BToA => Role::B,
        }
    }
}

/// Payload bits are what the protocol's cost accounting charges; control
/// bits only signal loop continuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MessageKind {
    Payload,
    Control,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub direction: Direction,
    pub kind: MessageKind,
    pub bits: BitString,
}

impl Message {
    pub fn new(direction: Direction, kind: MessageKind, bits: BitString) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Malformed("empty message".into()));
        }
        Ok(Self { direction, kind, bits })
    }

    pub fn len_bits(&self) -> usize {
        self.bits.len()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    messages: Vec<Message>,
    payload_bits: u64,
    control_bits: u64,
    bits_a_to_b: u64,
    bits_b_to_a: u64,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, msg: Message) {
        let len = msg.len_bits() as u64;
        match msg.kind {
            MessageKind::Payload => self.payload_bits += len,
            MessageKind::Control => self.control_bits += len,
        }
        match msg.direction {
            Direction::AToB => self.bits_a_to_b += len,
            Direction::BToA => self.bits_b_to_a += len,
        }
        self.messages.push(msg);
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }
    pub fn payload_bits(&self) -> u64 {
        self.payload_bits
    }
    pub fn control_bits(&self) -> u64 {
        self.control_bits
    }
    pub fn bits_a_to_b(&self) -> u64 {
        self.bits_a_to_b
    }
    pub fn bits_b_to_a(&self) -> u64 {
        self.bits_b_to_a
    }
    /// Number of messages.
    pub fn rounds(&self) -> usize {
        self.messages.len()
    }

    /// Payload bits, plus control bits when requested.
    pub fn counted_bits(&self, include_control: bool) -> u64 {
        self.payload_bits + if include_control { self.control_bits } else { 0 }
    }

    pub fn summary(&self) -> TranscriptSummary {
        TranscriptSummary {
            payload_bits: self.payload_bits,
            control_bits: self.control_bits,
            bits_a_to_b: self.bits_a_to_b,
            bits_b_to_a: self.bits_b_to_a,
            rounds: self.rounds(),
        }
    }

    pub fn dump(&self) -> Vec<DumpEntry> {
        self.messages
            .iter()
            .map(|m| DumpEntry {
                dir: m.direction,
                kind: m.kind,
                len_bits: m.len_bits(),
                bits_hex: m.bits.to_hex(),
            })
            .collect()
    }

    pub fn dump_json(&self) -> String {
        serde_json::to_string_pretty(&self.dump()).expect("transcript serializes")
    }

    pub fn from_dump(entries: &[DumpEntry]) -> Result<Self> {
        let mut t = Transcript::new();
        for e in entries {
            let bits = BitString::from_hex(&e.bits_hex, e.len_bits)?;
            t.push(Message::new(e.dir, e.kind, bits)?);
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TranscriptSummary {
    pub payload_bits: u64,
    pub control_bits: u64,
    pub bits_a_to_b: u64,
    pub bits_b_to_a: u64,
    pub rounds: usize,
}

/// One element of the transcript dump file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DumpEntry {
    pub dir: Direction,
    pub kind: MessageKind,
    pub len_bits: usize,
    pub bits_hex: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn msg(dir: Direction, kind: MessageKind, v: u64, w: u32) -> Message {
        let mut b = BitString::new();
        b.push_u64(v, w);
        Message::new(dir, kind, b).unwrap()
    }

    #[test]
    fn totals_partition() {
        let mut t = Transcript::new();
        t.push(msg(Direction::BToA, MessageKind::Payload, 5, 6));
        t.push(msg(Direction::AToB, MessageKind::Control, 1, 1));
        t.push(msg(Direction::AToB, MessageKind::Payload, 3, 3));
        assert_eq!(t.payload_bits(), 9);
        assert_eq!(t.control_bits(), 1);
        assert_eq!(t.bits_a_to_b() + t.bits_b_to_a(), t.payload_bits() + t.control_bits());
        assert_eq!(t.rounds(), 3);
        assert_eq!(t.counted_bits(true), 10);
    }

    #[test]
    fn empty_message_rejected() {
        assert!(Message::new(Direction::AToB, MessageKind::Payload, BitString::new()).is_err());
    }

    #[test]
    fn dump_format() {
        let mut t = Transcript::new();
        t.push(msg(Direction::AToB, MessageKind::Payload, 0b101, 3));
        t.push(msg(Direction::BToA, MessageKind::Control, 1, 1));
        let json = t.dump_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(
            v,
            serde_json::json!([
                {"dir": "A->B", "kind": "payload", "len_bits": 3, "bits_hex": "a0"},
                {"dir": "B->A", "kind": "control", "len_bits": 1, "bits_hex": "80"}
            ])
        );
        let entries: Vec<DumpEntry> = serde_json::from_str(&json).unwrap();
        assert_eq!(Transcript::from_dump(&entries).unwrap(), t);
    }
}
