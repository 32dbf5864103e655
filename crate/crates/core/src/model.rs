//! Instances, party views, function values, and the brute-force oracle.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest bit width for which a characteristic vector (2^n bits) is materialized.
pub const CHAR_VECTOR_MAX_N: u32 = 24;

/// Number of bits that hold any sum of distinct n-bit values.
pub fn sum_width(n: u32) -> u32 {
    2 * n - 1
}

/// Two parties' sets of n-bit values, with derived sizes precomputed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n: u32,
    set_a: Vec<u64>,
    set_b: Vec<u64>,
    m0: usize,
}

impl Instance {
    /// Validates and sorts the two sets.
    pub fn new(n: u32, set_a: Vec<u64>, set_b: Vec<u64>) -> Result<Self> {
        if !(1..=64).contains(&n) {
            return Err(Error::BitWidth(n));
        }
        let set_a = validate(n, set_a)?;
        let set_b = validate(n, set_b)?;
        let m0 = count_common(&set_a, &set_b);
        Ok(Self { n, set_a, set_b, m0 })
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn set_a(&self) -> &[u64] {
        &self.set_a
    }
    pub fn set_b(&self) -> &[u64] {
        &self.set_b
    }
    pub fn set(&self, role: Role) -> &[u64] {
        match role {
            Role::A => &self.set_a,
            Role::B => &self.set_b,
        }
    }
    pub fn m_a(&self) -> usize {
        self.set_a.len()
    }
    pub fn m_b(&self) -> usize {
        self.set_b.len()
    }
    pub fn m0(&self) -> usize {
        self.m0
    }
    pub fn d_a(&self) -> usize {
        self.m_a() - self.m0
    }
    pub fn d_b(&self) -> usize {
        self.m_b() - self.m0
    }
    pub fn d(&self) -> usize {
        self.d_a() + self.d_b()
    }
    pub fn kappa(&self) -> usize {
        self.m_a().max(self.m_b())
    }

    /// What `role` is allowed to know before the protocol starts.
    pub fn view(&self, role: Role, shared_seed: u64, private_seed: u64) -> PartyView {
        PartyView {
            role,
            n: self.n,
            own_set: self.set(role).to_vec(),
            known_d_own: match role {
                Role::A => self.d_a(),
                Role::B => self.d_b(),
            },
            known_m0: self.m0,
            kappa: self.kappa(),
            shared_seed,
            private_seed,
        }
    }

    pub fn intersection(&self) -> Vec<u64> {
        let b: HashSet<u64> = self.set_b.iter().copied().collect();
        self.set_a.iter().copied().filter(|x| b.contains(x)).collect()
    }

    pub fn union(&self) -> Vec<u64> {
        self.set_a
            .iter()
            .chain(&self.set_b)
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            n: self.n,
            set_a: self.set_a.iter().map(|x| format!("{x:#x}")).collect(),
            set_b: self.set_b.iter().map(|x| format!("{x:#x}")).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_instance()
    }
}

fn validate(n: u32, mut set: Vec<u64>) -> Result<Vec<u64>> {
    if let Some(&bad) = set.iter().find(|&&x| n < 64 && x >> n != 0) {
        return Err(Error::OutOfRange { value: bad, n });
    }
    set.sort_unstable();
    if let Some(w) = set.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Duplicate(w[0]));
    }
    Ok(set)
}

fn count_common(a: &[u64], b: &[u64]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

pub fn make_instance(n: u32, set_a: Vec<u64>, set_b: Vec<u64>) -> Result<Instance> {
    Instance::new(n, set_a, set_b)
}

/// Samples an instance with exact sizes: m0 shared values, then m_a - m0 and
/// m_b - m0 private ones, all distinct and uniform without replacement.
pub fn random_instance(n: u32, m_a: usize, m_b: usize, m0: usize, seed: u64) -> Result<Instance> {
    if !(1..=64).contains(&n) {
        return Err(Error::BitWidth(n));
    }
    if m0 > m_a.min(m_b) {
        return Err(Error::InfeasibleSizes(format!(
            "m0={m0} exceeds min(m_a={m_a}, m_b={m_b})"
        )));
    }
    let total = m_a + m_b - m0;
    if n < 64 && total as u128 > 1u128 << n {
        return Err(Error::InfeasibleSizes(format!(
            "{total} distinct values do not fit in {n} bits"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values: Vec<u64> = if n <= 32 {
        rand::seq::index::sample(&mut rng, 1usize << n, total)
            .into_iter()
            .map(|v| v as u64)
            .collect()
    } else {
        let mut seen = HashSet::with_capacity(total);
        let mut out = Vec::with_capacity(total);
        while out.len() < total {
            let v = if n == 64 {
                rng.gen::<u64>()
            } else {
                rng.gen_range(0..1u64 << n)
            };
            if seen.insert(v) {
                out.push(v);
            }
        }
        out
    };
    values.shuffle(&mut rng);
    let (shared, rest) = values.split_at(m0);
    let (only_a, only_b) = rest.split_at(m_a - m0);
    let set_a = shared.iter().chain(only_a).copied().collect();
    let set_b = shared.iter().chain(only_b).copied().collect();
    Instance::new(n, set_a, set_b)
}

/// On-disk instance: elements as `0x`-prefixed hex strings.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct InstanceFile {
    pub n: u32,
    pub set_a: Vec<String>,
    pub set_b: Vec<String>,
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<Instance> {
        let parse = |v: &[String]| -> Result<Vec<u64>> { v.iter().map(|s| parse_hex(s)).collect() };
        Instance::new(self.n, parse(&self.set_a)?, parse(&self.set_b)?)
    }
}

pub fn parse_hex(s: &str) -> Result<u64> {
    let digits = s
        .strip_prefix("0x")
        .or_else(|| s.strip_prefix("0X"))
        .ok_or_else(|| Error::Parse(format!("`{s}` lacks 0x prefix")))?;
    u64::from_str_radix(digits, 16).map_err(|e| Error::Parse(format!("`{s}`: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    A,
    B,
}

impl Role {
    pub fn other(self) -> Role {
        match self {
            Role::A => Role::B,
            Role::B => Role::A,
        }
    }
}

/// A party's prior knowledge. d_own and m0 are copied from the instance,
/// never estimated in-protocol.
#[derive(Debug, Clone)]
pub struct PartyView {
    pub role: Role,
    pub n: u32,
    pub own_set: Vec<u64>,
    pub known_d_own: usize,
    pub known_m0: usize,
    /// Public bound on both set sizes.
    pub kappa: usize,
    pub shared_seed: u64,
    pub private_seed: u64,
}

impl PartyView {
    pub fn own_sum(&self) -> u128 {
        self.own_set.iter().map(|&x| x as u128).sum()
    }
}

/// Functions of the two sets that protocols compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionKind {
    Sum,
    Product,
    Max,
    Min,
    BitOr,
    BitAnd,
    Disjointness,
    Intersection,
    Union,
}

/// A computed function value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Int(BigUint),
    Set(Vec<u64>),
}

impl Value {
    pub fn int(v: impl Into<BigUint>) -> Self {
        Value::Int(v.into())
    }

    pub fn as_int(&self) -> Option<&BigUint> {
        match self {
            Value::Int(v) => Some(v),
            Value::Set(_) => None,
        }
    }

    pub fn as_set(&self) -> Option<&[u64]> {
        match self {
            Value::Set(s) => Some(s),
            Value::Int(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Set(s) => {
                write!(f, "{{")?;
                for (i, x) in s.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x:#x}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

// Integers as decimal strings (they may exceed 2^64), sets as hex string arrays.
impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Value::Int(v) => s.serialize_str(&v.to_string()),
            Value::Set(set) => {
                let hex: Vec<String> = set.iter().map(|x| format!("{x:#x}")).collect();
                hex.serialize(s)
            }
        }
    }
}

/// Brute-force evaluation over the explicitly materialized union.
pub fn oracle_value(instance: &Instance, kind: FunctionKind) -> Result<Value> {
    let union = instance.union();
    let value = match kind {
        FunctionKind::Sum => Value::Int(union.iter().map(|&x| BigUint::from(x)).sum()),
        FunctionKind::Product => Value::Int(union.iter().fold(BigUint::one(), |acc, &x| acc * BigUint::from(x))),
        FunctionKind::Max => Value::int(*union.iter().max().ok_or(Error::Undefined("max of empty union"))?),
        FunctionKind::Min => Value::int(*union.iter().min().ok_or(Error::Undefined("min of empty union"))?),
        FunctionKind::BitOr => {
            if union.is_empty() {
                return Err(Error::Undefined("bitwise or of empty union"));
            }
            Value::int(union.iter().fold(0u64, |acc, &x| acc | x))
        }
        FunctionKind::BitAnd => {
            if union.is_empty() {
                return Err(Error::Undefined("bitwise and of empty union"));
            }
            Value::int(union.iter().fold(u64::MAX, |acc, &x| acc & x))
        }
        FunctionKind::Disjointness => {
            let b: HashSet<u64> = instance.set_b().iter().copied().collect();
            let disjoint = !instance.set_a().iter().any(|x| b.contains(x));
            Value::int(disjoint as u32)
        }
        FunctionKind::Intersection => Value::Set(instance.intersection()),
        FunctionKind::Union => Value::Set(union),
    };
    Ok(value)
}

/// Sum of a slice of distinct n-bit values; always fits in 2n - 1 bits.
pub fn set_sum(set: &[u64]) -> u128 {
    set.iter().map(|&x| x as u128).sum()
}

pub fn set_product(set: &[u64]) -> BigUint {
    if set.contains(&0) {
        return BigUint::zero();
    }
    set.iter().fold(BigUint::one(), |acc, &x| acc * x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_sizes() {
        let inst = make_instance(2, vec![1, 2], vec![2, 3]).unwrap();
        assert_eq!((inst.m0(), inst.d_a(), inst.d_b(), inst.kappa()), (1, 1, 1, 2));
        assert_eq!(inst.d(), 2);

        let empty = make_instance(2, vec![], vec![]).unwrap();
        assert_eq!(
            (empty.m_a(), empty.m_b(), empty.m0(), empty.d(), empty.kappa()),
            (0, 0, 0, 0, 0)
        );
    }

    #[test]
    fn range_and_duplicates_rejected() {
        assert_eq!(
            make_instance(2, vec![1, 4], vec![]),
            Err(Error::OutOfRange { value: 4, n: 2 })
        );
        assert_eq!(make_instance(3, vec![5, 5], vec![]), Err(Error::Duplicate(5)));
        assert!(make_instance(0, vec![], vec![]).is_err());
        assert!(make_instance(64, vec![u64::MAX], vec![0]).is_ok());
    }

    #[test]
    fn unsorted_input_is_sorted() {
        let inst = make_instance(4, vec![9, 3, 1], vec![]).unwrap();
        assert_eq!(inst.set_a(), &[1, 3, 9]);
    }

    #[test]
    fn random_instance_sizes() {
        let full = random_instance(4, 3, 3, 3, 11).unwrap();
        assert_eq!(full.set_a(), full.set_b());
        assert_eq!(full.d(), 0);

        let sat = random_instance(4, 16, 16, 16, 5).unwrap();
        assert_eq!(sat.set_a(), (0..16).collect::<Vec<_>>().as_slice());
        assert_eq!(sat.set_b(), sat.set_a());

        let inst = random_instance(8, 10, 12, 4, 99).unwrap();
        assert_eq!(
            (inst.m_a(), inst.m_b(), inst.m0(), inst.d_a(), inst.d_b()),
            (10, 12, 4, 6, 8)
        );

        let wide = random_instance(64, 50, 40, 10, 1).unwrap();
        assert_eq!((wide.d_a(), wide.d_b()), (40, 30));
    }

    #[test]
    fn random_instance_is_seeded() {
        assert_eq!(random_instance(10, 20, 20, 5, 3), random_instance(10, 20, 20, 5, 3));
        assert_ne!(random_instance(10, 20, 20, 5, 3), random_instance(10, 20, 20, 5, 4));
    }

    #[test]
    fn random_instance_infeasible() {
        assert!(matches!(random_instance(4, 2, 3, 3, 0), Err(Error::InfeasibleSizes(_))));
        assert!(matches!(random_instance(2, 3, 3, 1, 0), Err(Error::InfeasibleSizes(_))));
    }

    #[test]
    fn oracle_examples() {
        let inst = make_instance(2, vec![1, 2], vec![2, 3]).unwrap();
        assert_eq!(oracle_value(&inst, FunctionKind::Sum).unwrap(), Value::int(6u32));
        assert_eq!(
            oracle_value(&inst, FunctionKind::Intersection).unwrap(),
            Value::Set(vec![2])
        );
        assert_eq!(
            oracle_value(&inst, FunctionKind::Union).unwrap(),
            Value::Set(vec![1, 2, 3])
        );

        let empty = make_instance(2, vec![], vec![]).unwrap();
        assert_eq!(oracle_value(&empty, FunctionKind::Sum).unwrap(), Value::int(0u32));
        assert_eq!(oracle_value(&empty, FunctionKind::Product).unwrap(), Value::int(1u32));
        assert!(matches!(
            oracle_value(&empty, FunctionKind::Max),
            Err(Error::Undefined(_))
        ));
        assert!(matches!(
            oracle_value(&empty, FunctionKind::Min),
            Err(Error::Undefined(_))
        ));

        let zero = make_instance(2, vec![0, 3], vec![2]).unwrap();
        assert_eq!(oracle_value(&zero, FunctionKind::Product).unwrap(), Value::int(0u32));

        let same = make_instance(2, vec![1], vec![1]).unwrap();
        assert_eq!(
            oracle_value(&same, FunctionKind::Disjointness).unwrap(),
            Value::int(0u32)
        );
        let apart = make_instance(2, vec![1, 2], vec![3]).unwrap();
        assert_eq!(
            oracle_value(&apart, FunctionKind::Disjointness).unwrap(),
            Value::int(1u32)
        );
    }

    #[test]
    fn json_round_trip() {
        let inst = make_instance(8, vec![0xff, 0x10], vec![0x3]).unwrap();
        let text = inst.to_json();
        assert!(text.contains("\"0xff\""));
        assert_eq!(Instance::from_json(&text).unwrap(), inst);
        assert!(Instance::from_json(r#"{"n":2,"set_a":["7"],"set_b":[]}"#).is_err());
    }

    #[test]
    fn views_carry_prior_knowledge() {
        let inst = make_instance(3, vec![1, 2, 5], vec![2, 7]).unwrap();
        let a = inst.view(Role::A, 1, 2);
        let b = inst.view(Role::B, 1, 3);
        assert_eq!((a.known_d_own, a.known_m0), (2, 1));
        assert_eq!((b.known_d_own, b.known_m0), (1, 1));
        assert_eq!(a.own_sum(), 8);
    }
}
