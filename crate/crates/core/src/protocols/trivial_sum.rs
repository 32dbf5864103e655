//! Deterministic sum: A sends the characteristic vector of its set restricted
//! to 1..2^n - 1 (zero contributes nothing), B replies with the union's sum in
//! 2n - 1 bits. Total cost 2^n + 2n - 2 bits on every input.

use crate::bits::BitString;
use crate::engine::{Halt, Outgoing, Party};
use crate::model::{sum_width, PartyView, Role, Value};
use crate::transcript::Message;

use super::single;

pub struct TrivialSum {
    view: PartyView,
    sent: bool,
    result: Option<u128>,
}

impl TrivialSum {
    pub fn new(view: PartyView) -> Self {
        Self {
            view,
            sent: false,
            result: None,
        }
    }
}

/// Bits for indices 1..2^n - 1.
fn nonzero_char_vector(n: u32, set: &[u64]) -> BitString {
    let len = (1usize << n) - 1;
    let mut marks = vec![false; len + 1];
    for &x in set {
        marks[x as usize] = true;
    }
    marks[1..].iter().copied().collect()
}

impl Party for TrivialSum {
    fn take_turn(&mut self, inbox: &[Message]) -> Result<Vec<Outgoing>, Halt> {
        let n = self.view.n;
        let msg = single(inbox, "trivial-sum")?;
        match self.view.role {
            Role::A => {
                if let Some(msg) = msg {
                    let mut r = msg.bits.reader();
                    self.result = Some(r.read_u128(sum_width(n))?);
                    r.finish()?;
                }
                if self.sent {
                    return Ok(vec![]);
                }
                self.sent = true;
                Ok(vec![Outgoing::payload(nonzero_char_vector(n, &self.view.own_set))])
            }
            Role::B => {
                let Some(msg) = msg else { return Ok(vec![]) };
                if msg.bits.len() != (1usize << n) - 1 {
                    return Err(crate::error::Error::Malformed(format!(
                        "characteristic vector of {} bits",
                        msg.bits.len()
                    ))
                    .into());
                }
                let mut from_a: u128 = 0;
                let mut in_a = vec![false; 1usize << n];
                let mut r = msg.bits.reader();
                for (x, mark) in in_a.iter_mut().enumerate().skip(1) {
                    if r.read_bit()? {
                        *mark = true;
                        from_a += x as u128;
                    }
                }
                let only_b: u128 = self
                    .view
                    .own_set
                    .iter()
                    .filter(|&&x| !in_a[x as usize])
                    .map(|&x| x as u128)
                    .sum();
                let total = from_a + only_b;
                self.result = Some(total);
                self.sent = true;
                let mut bits = BitString::new();
                bits.push_u128(total, sum_width(n));
                Ok(vec![Outgoing::payload(bits)])
            }
        }
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
    use crate::engine::RunOptions;
    use crate::model::{make_instance, random_instance, Value};
    use crate::protocols::{run_protocol, Protocol};

    #[test]
    fn figure_one_cell() {
        let inst = make_instance(2, vec![1, 2], vec![2, 3]).unwrap();
        let out = run_protocol(&Protocol::TrivialSum, &inst, 0, &RunOptions::default()).unwrap();
        assert_eq!(out.value(), Some(&Value::int(6u32)));
        assert_eq!(out.payload_bits(), 6);
        assert_eq!(out.transcript.messages()[0].len_bits(), 3);
        assert_eq!(out.transcript.messages()[1].len_bits(), 3);
    }

    #[test]
    fn empty_sets_still_send_vector() {
        let inst = make_instance(2, vec![], vec![]).unwrap();
        let out = run_protocol(&Protocol::TrivialSum, &inst, 0, &RunOptions::default()).unwrap();
        assert_eq!(out.value(), Some(&Value::int(0u32)));
        assert_eq!(out.payload_bits(), 6);
    }

    #[test]
    fn closed_form_cost() {
        for n in 1..=10u32 {
            let inst = random_instance(n, 1, 1, 0, n as u64).unwrap();
            let out = run_protocol(&Protocol::TrivialSum, &inst, 0, &RunOptions::default()).unwrap();
            assert_eq!(out.payload_bits(), (1u64 << n) + 2 * n as u64 - 2);
            assert!(out.oracle_match);
        }
    }

    #[test]
    fn zero_in_a_is_harmless() {
        let inst = make_instance(3, vec![0, 7], vec![0, 1]).unwrap();
        let out = run_protocol(&Protocol::TrivialSum, &inst, 0, &RunOptions::default()).unwrap();
        assert_eq!(out.value(), Some(&Value::int(8u32)));
    }

    #[test]
    fn too_wide_rejected() {
        let inst = make_instance(25, vec![1], vec![]).unwrap();
        assert!(run_protocol(&Protocol::TrivialSum, &inst, 0, &RunOptions::default()).is_err());
    }
}
