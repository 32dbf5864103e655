//! Naive intersection: A sends its set in whichever encoding is shorter (a
//! 2^n-bit characteristic vector or a count-prefixed element list), B replies
//! with the intersection as a count-prefixed list.
//!
//! The count prefix is wide enough for the public size bound kappa (at least
//! one bit). B tells the encodings apart by length: the list is used only
//! when strictly shorter than 2^n, so the two lengths never coincide.

use crate::bits::BitString;
use crate::engine::{Halt, Outgoing, Party};
use crate::error::Error;
use crate::model::{PartyView, Role, Value, CHAR_VECTOR_MAX_N};
use crate::transcript::Message;

use super::single;

/// Width of the element-count prefix.
pub fn count_width(kappa: usize) -> u32 {
    (usize::BITS - kappa.leading_zeros()).max(1)
}

/// Bits of the list encoding of `m` elements.
pub fn list_encoding_bits(n: u32, m: usize, kappa: usize) -> u128 {
    m as u128 * n as u128 + count_width(kappa) as u128
}

fn uses_char_vector(n: u32, m: usize, kappa: usize) -> bool {
    n <= CHAR_VECTOR_MAX_N && (1u128 << n) <= list_encoding_bits(n, m, kappa)
}

fn encode_list(n: u32, set: &[u64], kappa: usize) -> BitString {
    let w = count_width(kappa);
    let mut bits = BitString::with_capacity(w as usize + set.len() * n as usize);
    bits.push_u64(set.len() as u64, w);
    for &x in set {
        bits.push_u64(x, n);
    }
    bits
}

fn decode_list(n: u32, msg: &Message, kappa: usize) -> crate::error::Result<Vec<u64>> {
    let mut r = msg.bits.reader();
    let count = r.read_u64(count_width(kappa))?;
    let set = (0..count)
        .map(|_| r.read_u64(n))
        .collect::<crate::error::Result<Vec<_>>>()?;
    r.finish()?;
    Ok(set)
}

pub struct NaiveIntersection {
    view: PartyView,
    sent: bool,
    result: Option<Vec<u64>>,
}

impl NaiveIntersection {
    pub fn new(view: PartyView) -> Self {
        Self {
            view,
            sent: false,
            result: None,
        }
    }
}

impl Party for NaiveIntersection {
    fn take_turn(&mut self, inbox: &[Message]) -> Result<Vec<Outgoing>, Halt> {
        let (n, kappa) = (self.view.n, self.view.kappa);
        let msg = single(inbox, "intersection")?;
        match self.view.role {
            Role::A => {
                if let Some(msg) = msg {
                    self.result = Some(decode_list(n, msg, kappa)?);
                }
                if self.sent {
                    return Ok(vec![]);
                }
                self.sent = true;
                let own = &self.view.own_set;
                let bits = if uses_char_vector(n, own.len(), kappa) {
                    let mut marks = vec![false; 1usize << n];
                    for &x in own {
                        marks[x as usize] = true;
                    }
                    marks.into_iter().collect()
                } else {
                    encode_list(n, own, kappa)
                };
                Ok(vec![Outgoing::payload(bits)])
            }
            Role::B => {
                let Some(msg) = msg else { return Ok(vec![]) };
                let from_a: Vec<u64> = if n <= CHAR_VECTOR_MAX_N && msg.bits.len() == 1usize << n {
                    (0..1u64 << n)
                        .filter(|&x| msg.bits.get(x as usize) == Some(true))
                        .collect()
                } else {
                    decode_list(n, msg, kappa)?
                };
                if from_a.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Malformed("element list not strictly ascending".into()).into());
                }
                let common: Vec<u64> = self
                    .view
                    .own_set
                    .iter()
                    .copied()
                    .filter(|x| from_a.binary_search(x).is_ok())
                    .collect();
                let bits = encode_list(n, &common, kappa);
                self.result = Some(common);
                self.sent = true;
                Ok(vec![Outgoing::payload(bits)])
            }
        }
    }

    fn is_done(&self) -> bool {
        self.sent && self.result.is_some()
    }

    fn output(&self) -> Option<Value> {
        self.result.clone().map(Value::Set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::RunOptions;
    use crate::model::{make_instance, random_instance};
    use crate::protocols::{run_protocol, Protocol};

    fn run(n: u32, a: Vec<u64>, b: Vec<u64>) -> crate::protocols::Outcome {
        let inst = make_instance(n, a, b).unwrap();
        run_protocol(&Protocol::NaiveIntersection, &inst, 0, &RunOptions::default()).unwrap()
    }

    #[test]
    fn small_cases() {
        assert_eq!(run(2, vec![1, 2], vec![2, 3]).value(), Some(&Value::Set(vec![2])));
        assert_eq!(run(2, vec![], vec![1, 3]).value(), Some(&Value::Set(vec![])));
        assert_eq!(run(2, vec![1], vec![1]).value(), Some(&Value::Set(vec![1])));
    }

    #[test]
    fn picks_shorter_encoding() {
        // n=2, kappa=2: list would be 2*2+2 = 6 bits > 4.
        let out = run(2, vec![1, 2], vec![2, 3]);
        assert_eq!(out.transcript.messages()[0].len_bits(), 4);
        // n=10, 3 elements: list is 3*10+2 = 32 bits < 1024.
        let out = run(10, vec![1, 500, 1023], vec![500]);
        assert_eq!(out.transcript.messages()[0].len_bits(), 32);
        assert_eq!(out.value(), Some(&Value::Set(vec![500])));
        assert_eq!(out.transcript.messages()[1].len_bits(), 2 + 10);
    }

    #[test]
    fn matches_oracle_on_random_instances() {
        for seed in 0..200 {
            let n = 1 + (seed % 40) as u32;
            let cap = if n >= 6 { 30 } else { 1 << (n - 1) };
            let m = (seed as usize * 7) % (cap + 1);
            let m0 = m / 3;
            let inst = random_instance(n, m, m, m0, seed).unwrap();
            let out = run_protocol(&Protocol::NaiveIntersection, &inst, 0, &RunOptions::default()).unwrap();
            assert!(out.oracle_match, "seed {seed}");
            assert!(out.transcript.messages()[0].len_bits() as u128 <= list_encoding_bits(n, m, m));
        }
    }

    #[test]
    fn count_width_values() {
        assert_eq!(count_width(0), 1);
        assert_eq!(count_width(1), 1);
        assert_eq!(count_width(2), 2);
        assert_eq!(count_width(255), 8);
        assert_eq!(count_width(256), 9);
    }
}
