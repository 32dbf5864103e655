//! Las Vegas sum using a shared sequence of balanced linear hashes.
//!
//! Iteration i: B sends the hashes of its elements under h_i. A keeps the
//! elements whose hash B did not send. Elements of the intersection always
//! hash into B's set, so the kept list is a subset of A's private elements,
//! and it has exactly d_A entries only when it is all of them. A then signals
//! stop (control bit 1) and sends their sum; B adds its own sum and replies.
//! Otherwise A signals continue (control bit 0) and the loop repeats with
//! h_{i+1}. The output is never wrong; only the number of iterations is
//! random.
//!
//! Wire format of B's hash message: m_B fields of k bits, one per element in
//! ascending element order, duplicates kept. In dedup mode: a (k+1)-bit count
//! followed by the distinct hash values, ascending. An empty S_B is signalled
//! by a single control bit since it carries no hash fields.

use std::collections::HashSet;

use crate::bits::BitString;
use crate::engine::{Halt, Outgoing, Party};
use crate::error::{Error, Result};
use crate::gf2::{HashSequence, LinearHash};
use crate::model::{sum_width, PartyView, Role, Value};
use crate::transcript::{Message, MessageKind};

/// A's state after processing one iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundState {
    pub index: u64,
    /// Hash values received from B.
    pub hashes: Vec<u64>,
    /// A's elements whose hash is not among `hashes`.
    pub list: Vec<u64>,
    pub accepted: bool,
}

/// Elements of `own` whose hash under `h` is not in `received`.
pub fn unmatched(h: &LinearHash, own: &[u64], received: &[u64]) -> Vec<u64> {
    let seen: HashSet<u64> = received.iter().copied().collect();
    own.iter().copied().filter(|&x| !seen.contains(&h.apply(x))).collect()
}

/// B's hash message under `h`.
pub fn encode_hashes(h: &LinearHash, set: &[u64], dedup: bool) -> Outgoing {
    if set.is_empty() {
        return Outgoing::control(true);
    }
    let k = h.k();
    let mut values: Vec<u64> = set.iter().map(|&x| h.apply(x)).collect();
    if dedup {
        values.sort_unstable();
        values.dedup();
        let mut bits = BitString::with_capacity((k as usize + 1) * (values.len() + 1));
        bits.push_u64(values.len() as u64, k + 1);
        for v in values {
            bits.push_u64(v, k);
        }
        Outgoing::payload(bits)
    } else {
        let mut bits = BitString::with_capacity(k as usize * values.len());
        for v in values {
            bits.push_u64(v, k);
        }
        Outgoing::payload(bits)
    }
}

pub fn decode_hashes(msg: &Message, k: u32, dedup: bool) -> Result<Vec<u64>> {
    if msg.kind == MessageKind::Control {
        return Ok(vec![]);
    }
    let mut r = msg.bits.reader();
    let count = if dedup {
        r.read_u64(k + 1)? as usize
    } else {
        if !msg.bits.len().is_multiple_of(k as usize) {
            return Err(Error::Malformed(format!(
                "{} bits is not a multiple of k={k}",
                msg.bits.len()
            )));
        }
        msg.bits.len() / k as usize
    };
    let values = (0..count).map(|_| r.read_u64(k)).collect::<Result<Vec<_>>>()?;
    r.finish()?;
    Ok(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    /// B: send the hash message for the current iteration.
    SendHashes,
    /// B: waiting for A's continue/stop bit. A: waiting for hashes.
    AwaitLoop,
    AwaitSum,
    Done,
}

pub struct LasVegasSum {
    view: PartyView,
    hashes: HashSequence,
    dedup: bool,
    round_cap: usize,
    iteration: u64,
    phase: Phase,
    result: Option<u128>,
    last_round: Option<RoundState>,
}

impl LasVegasSum {
    pub fn new(view: PartyView, k: u32, dedup: bool, round_cap: usize) -> Result<Self> {
        let hashes = HashSequence::new(view.shared_seed, view.n, k)?;
        let phase = match view.role {
            Role::A => Phase::AwaitLoop,
            Role::B => Phase::SendHashes,
        };
        Ok(Self {
            view,
            hashes,
            dedup,
            round_cap: round_cap.max(1),
            iteration: 0,
            phase,
            result: None,
            last_round: None,
        })
    }

    pub fn last_round(&self) -> Option<&RoundState> {
        self.last_round.as_ref()
    }

    fn turn_a(&mut self, inbox: &[Message]) -> Result<Vec<Outgoing>, Halt> {
        let n = self.view.n;
        let mut out = Vec::new();
        for msg in inbox {
            match self.phase {
                Phase::AwaitLoop => {
                    let h = self.hashes.get(self.iteration);
                    let received = decode_hashes(msg, h.k(), self.dedup)?;
                    let list = unmatched(&h, &self.view.own_set, &received);
                    let accepted = list.len() == self.view.known_d_own;
                    if accepted {
                        let s: u128 = list.iter().map(|&x| x as u128).sum();
                        out.push(Outgoing::control(true));
                        let mut bits = BitString::new();
                        bits.push_u128(s, sum_width(n));
                        out.push(Outgoing::payload(bits));
                        self.phase = Phase::AwaitSum;
                    } else {
                        if self.iteration + 1 >= self.round_cap as u64 {
                            return Err(Halt::RoundCapExceeded { rounds: self.round_cap });
                        }
                        out.push(Outgoing::control(false));
                    }
                    self.last_round = Some(RoundState {
                        index: self.iteration,
                        hashes: received,
                        list,
                        accepted,
                    });
                    if !accepted {
                        self.iteration += 1;
                    }
                }
                Phase::AwaitSum => {
                    let mut r = msg.bits.reader();
                    self.result = Some(r.read_u128(sum_width(n))?);
                    r.finish()?;
                    self.phase = Phase::Done;
                }
                _ => return Err(Error::Malformed("message after completion".into()).into()),
            }
        }
        Ok(out)
    }

    fn turn_b(&mut self, inbox: &[Message]) -> Result<Vec<Outgoing>, Halt> {
        let n = self.view.n;
        let mut out = Vec::new();
        for msg in inbox {
            match self.phase {
                Phase::AwaitLoop => {
                    if msg.kind != MessageKind::Control {
                        return Err(Error::Malformed("expected a loop control bit".into()).into());
                    }
                    if msg.bits.get(0) == Some(true) {
                        self.phase = Phase::AwaitSum;
                    } else {
                        self.iteration += 1;
                        self.phase = Phase::SendHashes;
                    }
                }
                Phase::AwaitSum => {
                    let mut r = msg.bits.reader();
                    let s = r.read_u128(sum_width(n))?;
                    r.finish()?;
                    let total = s + self.view.own_sum();
                    let mut bits = BitString::new();
                    bits.push_u128(total, sum_width(n));
                    out.push(Outgoing::payload(bits));
                    self.result = Some(total);
                    self.phase = Phase::Done;
                }
                _ => return Err(Error::Malformed("unexpected message".into()).into()),
            }
        }
        if self.phase == Phase::SendHashes {
            let h = self.hashes.get(self.iteration);
            out.push(encode_hashes(&h, &self.view.own_set, self.dedup));
            self.phase = Phase::AwaitLoop;
        }
        Ok(out)
    }
}

impl Party for LasVegasSum {
    fn take_turn(&mut self, inbox: &[Message]) -> Result<Vec<Outgoing>, Halt> {
        match self.view.role {
            Role::A => self.turn_a(inbox),
            Role::B => self.turn_b(inbox),
        }
    }

    fn is_done(&self) -> bool {
        self.phase == Phase::Done
    }

    fn output(&self) -> Option<Value> {
        self.result.map(Value::int)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{execute, RunOptions, Status};
    use crate::model::{make_instance, random_instance, Instance};
    use crate::protocols::{run_protocol, Protocol};
    use crate::transcript::Direction;

    fn lv(k: u32) -> Protocol {
        Protocol::LasVegasSum { k, dedup: false }
    }

    fn check_accounting(inst: &Instance, k: u32, out: &crate::protocols::Outcome) {
        let n = inst.n() as usize;
        let msgs = out.transcript.messages();
        let iterations = out.loop_iterations();
        // [hashes, control] per iteration, then s and s'.
        assert_eq!(msgs.len(), 2 * iterations + 2);
        for it in 0..iterations {
            let hm = &msgs[2 * it];
            assert_eq!(hm.direction, Direction::BToA);
            if inst.m_b() > 0 {
                assert_eq!(hm.kind, MessageKind::Payload);
                assert_eq!(hm.len_bits(), k as usize * inst.m_b());
            }
            let c = &msgs[2 * it + 1];
            assert_eq!(
                (c.direction, c.kind, c.len_bits()),
                (Direction::AToB, MessageKind::Control, 1)
            );
        }
        let tail = &msgs[msgs.len() - 2..];
        assert_eq!((tail[0].direction, tail[0].len_bits()), (Direction::AToB, 2 * n - 1));
        assert_eq!((tail[1].direction, tail[1].len_bits()), (Direction::BToA, 2 * n - 1));
        assert_eq!(
            out.payload_bits(),
            (k as usize * inst.m_b() * iterations + 2 * (2 * n - 1)) as u64
        );
    }

    #[test]
    fn no_difference_accepts_immediately() {
        let inst = random_instance(8, 10, 14, 10, 1).unwrap();
        assert_eq!(inst.d_a(), 0);
        for seed in 0..20 {
            let out = run_protocol(&lv(2), &inst, seed, &RunOptions::default()).unwrap();
            assert_eq!(out.loop_iterations(), 1);
            assert_eq!(out.payload_bits(), 2 * 14 + 4 * 8 - 2);
            assert!(out.oracle_match);
        }
    }

    #[test]
    fn full_width_hash_is_injective() {
        for seed in 0..20 {
            let inst = random_instance(6, 12, 9, 4, seed).unwrap();
            let out = run_protocol(&lv(6), &inst, seed, &RunOptions::default()).unwrap();
            assert_eq!(out.loop_iterations(), 1);
            assert_eq!(out.payload_bits(), 6 * 9 + 4 * 6 - 2);
            assert!(out.oracle_match);
        }
    }

    #[test]
    fn accounting_and_correctness_over_seeds() {
        for seed in 0..300u64 {
            let n = 4 + (seed % 7) as u32;
            let k = 1 + (seed as u32 % n);
            let m = (1usize << n).min(12);
            let m0 = (seed as usize) % (m / 2 + 1);
            let inst = random_instance(n, m / 2, m / 2, m0.min(m / 2), seed).unwrap();
            let out = run_protocol(&lv(k), &inst, seed ^ 0xabc, &RunOptions::default()).unwrap();
            if out.status == Status::Ok {
                assert!(out.oracle_match, "seed {seed}");
                check_accounting(&inst, k, &out);
            }
        }
    }

    #[test]
    fn kept_list_never_contains_shared_elements() {
        let inst = random_instance(7, 8, 8, 4, 3).unwrap();
        let shared: HashSet<u64> = inst.intersection().into_iter().collect();
        let private: Vec<u64> = inst.set_a().iter().copied().filter(|x| !shared.contains(x)).collect();
        let seq = HashSequence::new(5, 7, 6).unwrap();
        let mut accepted = 0;
        for i in 0..2000 {
            let h = seq.get(i);
            let received: Vec<u64> = inst.set_b().iter().map(|&x| h.apply(x)).collect();
            let list = unmatched(&h, inst.set_a(), &received);
            assert!(list.iter().all(|x| !shared.contains(x)));
            if list.len() == inst.d_a() {
                assert_eq!(list, private);
                accepted += 1;
            }
        }
        assert!(accepted > 0);
    }

    #[test]
    fn final_round_state_matches_difference() {
        let inst = random_instance(8, 6, 6, 3, 8).unwrap();
        let opts = RunOptions::default();
        let (mut a, mut b) = (
            LasVegasSum::new(inst.view(Role::A, 11, 0), 5, false, opts.round_cap).unwrap(),
            LasVegasSum::new(inst.view(Role::B, 11, 0), 5, false, opts.round_cap).unwrap(),
        );
        let run = execute(&mut a, &mut b).unwrap();
        assert_eq!(run.status, Status::Ok);
        let last = a.last_round().unwrap();
        assert!(last.accepted);
        let shared: HashSet<u64> = inst.intersection().into_iter().collect();
        let private: Vec<u64> = inst.set_a().iter().copied().filter(|x| !shared.contains(x)).collect();
        assert_eq!(last.list, private);
        assert_eq!(last.hashes.len(), inst.m_b());
    }

    #[test]
    fn empty_sets() {
        let both = make_instance(4, vec![], vec![]).unwrap();
        let out = run_protocol(&lv(2), &both, 0, &RunOptions::default()).unwrap();
        assert_eq!(out.value(), Some(&Value::int(0u32)));
        assert_eq!(out.payload_bits(), 14);

        let only_a = make_instance(4, vec![3, 9], vec![]).unwrap();
        let out = run_protocol(&lv(2), &only_a, 0, &RunOptions::default()).unwrap();
        assert_eq!(out.value(), Some(&Value::int(12u32)));
        assert_eq!(out.payload_bits(), 14);

        let only_b = make_instance(4, vec![], vec![3, 9]).unwrap();
        let out = run_protocol(&lv(2), &only_b, 0, &RunOptions::default()).unwrap();
        assert_eq!(out.value(), Some(&Value::int(12u32)));
        assert_eq!(out.payload_bits(), 2 * 2 + 14);
    }

    #[test]
    fn round_cap_never_yields_a_value() {
        // k = 1 with many B elements almost surely covers both hash values.
        let inst = random_instance(10, 20, 40, 0, 2).unwrap();
        let opts = RunOptions {
            round_cap: 5,
            ..Default::default()
        };
        let out = run_protocol(&lv(1), &inst, 9, &opts).unwrap();
        assert_eq!(out.status, Status::RoundCapExceeded);
        assert!(out.value().is_none() && out.value_at_a.is_none() && out.value_at_b.is_none());
        assert!(!out.oracle_match);
        assert_eq!(out.loop_iterations(), 4);
    }

    #[test]
    fn deterministic_transcripts() {
        let inst = random_instance(9, 15, 15, 7, 4).unwrap();
        let a = run_protocol(&lv(4), &inst, 21, &RunOptions::default()).unwrap();
        let b = run_protocol(&lv(4), &inst, 21, &RunOptions::default()).unwrap();
        assert_eq!(a.transcript, b.transcript);
    }

    #[test]
    fn dedup_mode() {
        let inst = random_instance(8, 10, 20, 5, 6).unwrap();
        let p = Protocol::LasVegasSum { k: 3, dedup: true };
        let out = run_protocol(&p, &inst, 2, &RunOptions::default()).unwrap();
        if out.status == Status::Ok {
            assert!(out.oracle_match);
        }
        let first = &out.transcript.messages()[0];
        let distinct = decode_hashes(first, 3, true).unwrap();
        assert!(distinct.len() <= 8);
        assert_eq!(first.len_bits(), 4 + 3 * distinct.len());
    }

    #[test]
    fn hash_message_round_trip() {
        let h = HashSequence::new(3, 10, 4).unwrap().get(0);
        let set = [1u64, 5, 700, 1023];
        for dedup in [false, true] {
            let out = encode_hashes(&h, &set, dedup);
            let msg = Message::new(Direction::BToA, out.kind, out.bits).unwrap();
            let mut got = decode_hashes(&msg, 4, dedup).unwrap();
            let mut want: Vec<u64> = set.iter().map(|&x| h.apply(x)).collect();
            if dedup {
                want.sort_unstable();
                want.dedup();
            }
            got.sort_unstable();
            want.sort_unstable();
            assert_eq!(got, want);
        }
    }
}
