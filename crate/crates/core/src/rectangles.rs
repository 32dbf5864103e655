//! Fooling families for the sum and product functions and the rectangle
//! counting bound they certify.
//!
//! A family is a list of input pairs (Y, Y') sharing one function value v such
//! that for any two pairs i != j, f(Y_i, Y'_j) != v or f(Y_j, Y'_i) != v. No
//! monochromatic rectangle can then hold two pairs of a family, and families
//! with distinct values need distinct rectangles, so the total pair count
//! lower-bounds the number of rectangles in any protocol partition and its
//! log2 lower-bounds the communication.
//!
//! Sets are subsets of {0, .., 2^n - 1} stored as bit masks (bit x = element x),
//! which limits materialization to n <= 4.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest n whose families are materialized.
pub const FAMILY_MAX_N: u32 = 4;
/// Largest n for which the counting bound is evaluated as an exact integer.
pub const EXACT_COUNT_MAX_N: u32 = 24;
/// Minimum number of sampled pairs in sampled verification.
pub const MIN_SAMPLED_PAIRS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Sum,
    Product,
}

impl BoundKind {
    /// f(S) for the set with mask `mask`.
    pub fn eval_mask(self, mask: u64) -> BigUint {
        match self {
            BoundKind::Sum => BigUint::from(mask_elements(mask).map(u128::from).sum::<u128>()),
            BoundKind::Product => mask_elements(mask).fold(BigUint::one(), |acc, x| acc * x),
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Sum => "sum",
            BoundKind::Product => "product",
        })
    }
}

impl std::str::FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(BoundKind::Sum),
            "product" => Ok(BoundKind::Product),
            other => Err(Error::Parse(format!("unknown function kind {other:?} (sum|product)"))),
        }
    }
}

/// Elements of a mask in ascending order.
pub fn mask_elements(mask: u64) -> impl Iterator<Item = u64> {
    (0..64u64).filter(move |&x| mask >> x & 1 == 1)
}

pub fn mask_of(elements: &[u64]) -> u64 {
    elements.iter().fold(0, |m, &x| m | 1 << x)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetPair {
    pub y: u64,
    pub y_prime: u64,
    pub value: BigUint,
}

impl SubsetPair {
    pub fn new(kind: BoundKind, y: u64, y_prime: u64) -> Self {
        Self {
            y,
            y_prime,
            value: kind.eval_mask(y | y_prime),
        }
    }

    pub fn y_elements(&self) -> Vec<u64> {
        mask_elements(self.y).collect()
    }

    pub fn y_prime_elements(&self) -> Vec<u64> {
        mask_elements(self.y_prime).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyLabel {
    /// The family over the full ground set.
    Base,
    /// The family whose ground set omits element l.
    Without(u64),
    /// The single pair with value 0.
    Zero,
}

impl fmt::Display for FamilyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyLabel::Base => f.write_str("F0"),
            FamilyLabel::Without(l) => write!(f, "F{l}"),
            FamilyLabel::Zero => f.write_str("zero"),
        }
    }
}

impl Serialize for FamilyLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone)]
pub struct FoolingFamily {
    pub kind: BoundKind,
    pub label: FamilyLabel,
    pub common_value: BigUint,
    pub pairs: Vec<SubsetPair>,
    /// Mask of the ground set the pairs split.
    pub ground: u64,
}

impl FoolingFamily {
    /// All splits (Y, ground \ Y).
    fn splits(kind: BoundKind, label: FamilyLabel, ground: u64) -> Self {
        let elements: Vec<u64> = mask_elements(ground).collect();
        let pairs: Vec<SubsetPair> = (0..1u64 << elements.len())
            .map(|sel| {
                let y = mask_elements(sel).fold(0, |m, i| m | 1 << elements[i as usize]);
                SubsetPair::new(kind, y, ground & !y)
            })
            .collect();
        Self {
            kind,
            label,
            common_value: kind.eval_mask(ground),
            pairs,
            ground,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

fn check_family_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::BitWidth(n));
    }
    if n > FAMILY_MAX_N {
        return Err(Error::TooLarge {
            n,
            limit: FAMILY_MAX_N,
            what: "fooling families",
        });
    }
    Ok(())
}

/// Sum families: F0 splits {1, .., 2^n - 1}; F_l splits the same set without l.
pub fn sum_fooling_families(n: u32) -> Result<Vec<FoolingFamily>> {
    check_family_n(n)?;
    let full = (1u64 << (1u64 << n)) - 1;
    let phi = full & !1;
    let mut out = vec![FoolingFamily::splits(BoundKind::Sum, FamilyLabel::Base, phi)];
    for l in 1..1u64 << n {
        out.push(FoolingFamily::splits(
            BoundKind::Sum,
            FamilyLabel::Without(l),
            phi & !(1 << l),
        ));
    }
    Ok(out)
}

/// Product families: F0 splits {2, .., 2^n - 1}; F_l splits it without l;
/// plus the single pair ({0}, {}) with value 0.
pub fn product_fooling_families(n: u32) -> Result<Vec<FoolingFamily>> {
    check_family_n(n)?;
    let full = (1u64 << (1u64 << n)) - 1;
    let phi = full & !0b11;
    let mut out = vec![FoolingFamily::splits(BoundKind::Product, FamilyLabel::Base, phi)];
    for l in 2..1u64 << n {
        out.push(FoolingFamily::splits(
            BoundKind::Product,
            FamilyLabel::Without(l),
            phi & !(1 << l),
        ));
    }
    out.push(FoolingFamily {
        kind: BoundKind::Product,
        label: FamilyLabel::Zero,
        common_value: BigUint::zero(),
        pairs: vec![SubsetPair::new(BoundKind::Product, 1, 0)],
        ground: 1,
    });
    Ok(out)
}

pub fn fooling_families(n: u32, kind: BoundKind) -> Result<Vec<FoolingFamily>> {
    match kind {
        BoundKind::Sum => sum_fooling_families(n),
        BoundKind::Product => product_fooling_families(n),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Every unordered pair within every family.
    Full,
    /// `pairs` random within-family pairs (at least [`MIN_SAMPLED_PAIRS`]).
    Sampled { pairs: u64, seed: u64 },
}

impl VerifyMode {
    /// Full up to n = 3, sampled above.
    pub fn default_for(n: u32) -> Self {
        if n <= 3 {
            VerifyMode::Full
        } else {
            VerifyMode::Sampled {
                pairs: MIN_SAMPLED_PAIRS,
                seed: 0,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Violation {
    /// A pair whose value differs from its family's value.
    WrongValue {
        family: String,
        index: usize,
        value_dec: String,
    },
    /// A repeated pair inside a family.
    DuplicatePair { family: String, i: usize, j: usize },
    /// Two pairs whose crossed inputs both keep the family value.
    Fooling { family: String, i: usize, j: usize },
    /// Two families sharing a value.
    SharedValue {
        first: String,
        second: String,
        value_dec: String,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub violation_count: u64,
    /// The first ten violations found.
    pub violations: Vec<Violation>,
    /// Pairs (i, j) whose two crossed evaluations were checked.
    pub checked_pairs: u64,
    pub sampled: bool,
}

const MAX_LISTED: usize = 10;

/// Function values for every mask over `2^n` elements, if they fit in u128.
fn value_table(kind: BoundKind, families: &[FoolingFamily]) -> Option<Vec<u128>> {
    let top = families
        .iter()
        .flat_map(|f| f.pairs.iter())
        .map(|p| p.y | p.y_prime)
        .fold(0, |a, b| a | b);
    let bits = 64 - top.leading_zeros();
    if bits > 16 {
        return None;
    }
    let table: Option<Vec<u128>> = (0..1u64 << bits)
        .map(|m| {
            let v = kind.eval_mask(m);
            let digits = v.to_u64_digits();
            match digits.len() {
                0 => Some(0),
                1 => Some(digits[0] as u128),
                2 => Some(digits[0] as u128 | (digits[1] as u128) << 64),
                _ => None,
            }
        })
        .collect();
    table
}

struct Evaluator<'a> {
    kind: BoundKind,
    table: Option<&'a [u128]>,
}

impl Evaluator<'_> {
    /// Whether f(a ∪ b) equals the family value (given both ways).
    fn equals(&self, a: u64, b: u64, value: u128, big: &BigUint) -> bool {
        match self.table {
            Some(t) => t[(a | b) as usize] == value,
            None => self.kind.eval_mask(a | b) == *big,
        }
    }
}

fn big_to_u128(v: &BigUint) -> u128 {
    let d = v.to_u64_digits();
    d.first().copied().unwrap_or(0) as u128 | (d.get(1).copied().unwrap_or(0) as u128) << 64
}

/// Checks each family's pairs against its value, the crossed-pair condition
/// within each family, and that family values are pairwise distinct.
pub fn verify_fooling(families: &[FoolingFamily], kind: BoundKind, mode: VerifyMode) -> VerifyReport {
    let mut violations: Vec<Violation> = Vec::new();
    let mut count = 0u64;
    let mut note = |v: Violation, violations: &mut Vec<Violation>| {
        count += 1;
        if violations.len() < MAX_LISTED {
            violations.push(v);
        }
    };

    for (fi, fam) in families.iter().enumerate() {
        for (idx, p) in fam.pairs.iter().enumerate() {
            let v = kind.eval_mask(p.y | p.y_prime);
            if v != fam.common_value || p.value != v {
                note(
                    Violation::WrongValue {
                        family: fam.label.to_string(),
                        index: idx,
                        value_dec: v.to_string(),
                    },
                    &mut violations,
                );
            }
        }
        let mut sorted: Vec<(u64, u64, usize)> =
            fam.pairs.iter().enumerate().map(|(i, p)| (p.y, p.y_prime, i)).collect();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                note(
                    Violation::DuplicatePair {
                        family: fam.label.to_string(),
                        i: w[0].2,
                        j: w[1].2,
                    },
                    &mut violations,
                );
            }
        }
        for other in &families[fi + 1..] {
            if other.common_value == fam.common_value {
                note(
                    Violation::SharedValue {
                        first: fam.label.to_string(),
                        second: other.label.to_string(),
                        value_dec: fam.common_value.to_string(),
                    },
                    &mut violations,
                );
            }
        }
    }

    let table = value_table(kind, families);
    let eval = Evaluator {
        kind,
        table: table.as_deref(),
    };
    let (checked, fooling) = match mode {
        VerifyMode::Full => check_all_pairs(families, &eval),
        VerifyMode::Sampled { pairs, seed } => check_sampled_pairs(families, &eval, pairs.max(MIN_SAMPLED_PAIRS), seed),
    };
    let unlisted = fooling.total - fooling.found_len();
    for (fi, i, j) in fooling.found {
        note(
            Violation::Fooling {
                family: families[fi].label.to_string(),
                i,
                j,
            },
            &mut violations,
        );
    }
    count += unlisted;

    VerifyReport {
        pass: count == 0,
        violation_count: count,
        violations,
        checked_pairs: checked,
        sampled: matches!(mode, VerifyMode::Sampled { .. }),
    }
}

#[derive(Default)]
struct FoolingHits {
    total: u64,
    found: Vec<(usize, usize, usize)>,
}

impl FoolingHits {
    fn found_len(&self) -> u64 {
        self.found.len() as u64
    }

    fn merge(mut self, other: FoolingHits) -> FoolingHits {
        self.total += other.total;
        for f in other.found {
            if self.found.len() < MAX_LISTED {
                self.found.push(f);
            }
        }
        self
    }

    fn hit(&mut self, at: (usize, usize, usize)) {
        self.total += 1;
        if self.found.len() < MAX_LISTED {
            self.found.push(at);
        }
    }
}

fn crossed_ok(fam: &FoolingFamily, eval: &Evaluator, v: u128, i: usize, j: usize) -> bool {
    let (a, b) = (&fam.pairs[i], &fam.pairs[j]);
    !eval.equals(a.y, b.y_prime, v, &fam.common_value) || !eval.equals(b.y, a.y_prime, v, &fam.common_value)
}

fn check_all_pairs(families: &[FoolingFamily], eval: &Evaluator) -> (u64, FoolingHits) {
    let mut checked = 0u64;
    let mut hits = FoolingHits::default();
    for (fi, fam) in families.iter().enumerate() {
        let v = big_to_u128(&fam.common_value);
        let m = fam.len();
        checked += (m * m.saturating_sub(1) / 2) as u64;
        let mut found = (0..m)
            .into_par_iter()
            .map(|i| {
                let mut h = FoolingHits::default();
                for j in i + 1..m {
                    if !crossed_ok(fam, eval, v, i, j) {
                        h.hit((fi, i, j));
                    }
                }
                h
            })
            .reduce(FoolingHits::default, FoolingHits::merge);
        found.found.sort_unstable();
        hits = hits.merge(found);
    }
    (checked, hits)
}

fn check_sampled_pairs(families: &[FoolingFamily], eval: &Evaluator, pairs: u64, seed: u64) -> (u64, FoolingHits) {
    // Sample families in proportion to their number of unordered pairs.
    let weights: Vec<u64> = families
        .iter()
        .map(|f| (f.len() * f.len().saturating_sub(1) / 2) as u64)
        .collect();
    let total_weight: u64 = weights.iter().sum();
    if total_weight == 0 {
        return (0, FoolingHits::default());
    }
    const CHUNK: u64 = 1 << 14;
    let chunks = pairs.div_ceil(CHUNK);
    let mut hits = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(crate::seed::derive(seed, &[c]));
            let mut h = FoolingHits::default();
            let todo = CHUNK.min(pairs - c * CHUNK);
            for _ in 0..todo {
                let mut w = rng.gen_range(0..total_weight);
                let fi = weights
                    .iter()
                    .position(|&x| {
                        if w < x {
                            true
                        } else {
                            w -= x;
                            false
                        }
                    })
                    .expect("weight in range");
                let fam = &families[fi];
                let m = fam.len();
                let i = rng.gen_range(0..m);
                let mut j = rng.gen_range(0..m - 1);
                if j >= i {
                    j += 1;
                }
                let (i, j) = (i.min(j), i.max(j));
                if !crossed_ok(fam, eval, big_to_u128(&fam.common_value), i, j) {
                    h.hit((fi, i, j));
                }
            }
            h
        })
        .reduce(FoolingHits::default, FoolingHits::merge);
    hits.found.sort_unstable();
    (pairs, hits)
}

/// Total pairs over all families of the construction:
/// sum: 2^(2^n - 1) + (2^n - 1) 2^(2^n - 2);
/// product: 2^(2^n - 2) + (2^n - 2) 2^(2^n - 3) + 1.
pub fn rectangle_count_lower_bound(n: u32, kind: BoundKind) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::BitWidth(n));
    }
    if n > EXACT_COUNT_MAX_N {
        return Err(Error::TooLarge {
            n,
            limit: EXACT_COUNT_MAX_N,
            what: "exact rectangle count",
        });
    }
    let q = 1usize << n;
    let pow = |e: usize| BigUint::one() << e;
    Ok(match kind {
        BoundKind::Sum => pow(q - 1) + BigUint::from(q - 1) * pow(q - 2),
        BoundKind::Product => {
            let tail = if q > 2 {
                BigUint::from(q - 2) * pow(q - 3)
            } else {
                BigUint::zero()
            };
            pow(q - 2) + tail + BigUint::one()
        }
    })
}

/// ceil(log2 x) for x >= 1.
pub fn ceil_log2(x: &BigUint) -> u64 {
    let bits = x.bits();
    if x.count_ones() == 1 {
        bits - 1
    } else {
        bits
    }
}

/// Closed form of the bound: 2^n + n - 1 for sum, 2^n + n - 2 for product.
pub fn comm_lower_bound_closed_form(n: u32, kind: BoundKind) -> u128 {
    let base = (1u128 << n) + n as u128;
    match kind {
        BoundKind::Sum => base - 1,
        BoundKind::Product => base - 2,
    }
}

/// ceil(log2 R) bits for the rectangle count R; the closed form beyond the
/// exactly evaluated range.
pub fn comm_lower_bound(n: u32, kind: BoundKind) -> Result<u128> {
    if !(1..=64).contains(&n) {
        return Err(Error::BitWidth(n));
    }
    if n > EXACT_COUNT_MAX_N {
        return Ok(comm_lower_bound_closed_form(n, kind));
    }
    let bits = ceil_log2(&rectangle_count_lower_bound(n, kind)?) as u128;
    debug_assert_eq!(bits, comm_lower_bound_closed_form(n, kind));
    Ok(bits)
}

/// Bounds implied by the set-disjointness reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LiteratureBounds {
    /// Deterministic disjointness: 2^n + 1.
    pub disj_det: u128,
    /// Deterministic sum via the reduction: 2^n - 2n + 1.
    pub sum_det: u128,
    /// Order of the randomized sum bound: 2^n.
    pub sum_randomized_order: u128,
}

pub fn literature_bounds(n: u32) -> Result<LiteratureBounds> {
    if !(1..=64).contains(&n) {
        return Err(Error::BitWidth(n));
    }
    let q = 1u128 << n;
    Ok(LiteratureBounds {
        disj_det: q + 1,
        sum_det: q + 1 - 2 * n as u128,
        sum_randomized_order: q,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilySummary {
    pub label: FamilyLabel,
    pub size: usize,
    pub value_dec: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub kind: BoundKind,
    pub n: u32,
    pub families: Vec<FamilySummary>,
    /// Decimal string; exceeds 64 bits quickly.
    pub count_lower_bound: String,
    pub comm_lower_bound_bits: u128,
    pub closed_form_bits: u128,
    pub pass: bool,
    pub verification: VerifyReport,
}

/// Builds the families, verifies them and compares the counting bound with
/// the closed form. `pass` requires both.
pub fn bounds_report(n: u32, kind: BoundKind, mode: VerifyMode) -> Result<BoundsReport> {
    let families = fooling_families(n, kind)?;
    let verification = verify_fooling(&families, kind, mode);
    let total: usize = families.iter().map(FoolingFamily::len).sum();
    let count = BigUint::from(total);
    let bits = ceil_log2(&count) as u128;
    let closed = comm_lower_bound_closed_form(n, kind);
    let formula_count = rectangle_count_lower_bound(n, kind)?;
    Ok(BoundsReport {
        kind,
        n,
        families: families
            .iter()
            .map(|f| FamilySummary {
                label: f.label,
                size: f.len(),
                value_dec: f.common_value.to_string(),
            })
            .collect(),
        count_lower_bound: count.to_string(),
        comm_lower_bound_bits: bits,
        closed_form_bits: closed,
        pass: verification.pass && bits == closed && count == formula_count,
        verification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sizes_and_values(fams: &[FoolingFamily]) -> (Vec<usize>, Vec<String>) {
        (
            fams.iter().map(FoolingFamily::len).collect(),
            fams.iter().map(|f| f.common_value.to_string()).collect(),
        )
    }

    #[test]
    fn sum_n2_matches_worked_example() {
        let fams = sum_fooling_families(2).unwrap();
        let (sizes, values) = sizes_and_values(&fams);
        assert_eq!(sizes, vec![8, 4, 4, 4]);
        assert_eq!(values, vec!["6", "5", "4", "3"]);
        let f0 = &fams[0];
        assert!(f0
            .pairs
            .iter()
            .any(|p| p.y == mask_of(&[1]) && p.y_prime == mask_of(&[2, 3])));
        let report = verify_fooling(&fams, BoundKind::Sum, VerifyMode::Full);
        assert!(report.pass, "{report:?}");
        assert_eq!(
            rectangle_count_lower_bound(2, BoundKind::Sum).unwrap(),
            BigUint::from(20u32)
        );
        assert_eq!(comm_lower_bound(2, BoundKind::Sum).unwrap(), 5);
    }

    #[test]
    fn product_n2() {
        let fams = product_fooling_families(2).unwrap();
        let (sizes, values) = sizes_and_values(&fams);
        assert_eq!(sizes, vec![4, 2, 2, 1]);
        assert_eq!(values, vec!["6", "3", "2", "0"]);
        assert!(fams[0]
            .pairs
            .iter()
            .any(|p| p.y == mask_of(&[2]) && p.y_prime == mask_of(&[3])));
        assert!(verify_fooling(&fams, BoundKind::Product, VerifyMode::Full).pass);
        assert_eq!(comm_lower_bound(2, BoundKind::Product).unwrap(), 4);
    }

    #[test]
    fn n3_counts() {
        let sum = sum_fooling_families(3).unwrap();
        assert_eq!(sum.iter().map(FoolingFamily::len).sum::<usize>(), 576);
        assert_eq!(sum[0].common_value, BigUint::from(28u32));
        let prod = product_fooling_families(3).unwrap();
        assert_eq!(prod.iter().map(FoolingFamily::len).sum::<usize>(), 257);
        assert_eq!(prod[0].common_value, BigUint::from(5040u32));
        assert_eq!(comm_lower_bound(3, BoundKind::Sum).unwrap(), 10);
        assert_eq!(comm_lower_bound(3, BoundKind::Product).unwrap(), 9);
    }

    #[test]
    fn crafted_family_fails() {
        let fam = FoolingFamily {
            kind: BoundKind::Sum,
            label: FamilyLabel::Base,
            common_value: BigUint::from(3u32),
            pairs: vec![
                SubsetPair::new(BoundKind::Sum, mask_of(&[1]), mask_of(&[2])),
                SubsetPair::new(BoundKind::Sum, mask_of(&[1, 2]), mask_of(&[2])),
            ],
            ground: mask_of(&[1, 2]),
        };
        let report = verify_fooling(&[fam], BoundKind::Sum, VerifyMode::Full);
        assert!(!report.pass);
        assert_eq!(
            report.violations,
            vec![Violation::Fooling {
                family: "F0".into(),
                i: 0,
                j: 1
            }]
        );
    }

    #[test]
    fn shared_values_are_violations() {
        let mut fams = sum_fooling_families(2).unwrap();
        fams.push(fams[1].clone());
        let report = verify_fooling(&fams, BoundKind::Sum, VerifyMode::Full);
        assert!(!report.pass);
        assert!(matches!(report.violations[0], Violation::SharedValue { .. }));
    }

    #[test]
    fn closed_forms_agree() {
        for n in 1..=EXACT_COUNT_MAX_N.min(16) {
            for kind in [BoundKind::Sum, BoundKind::Product] {
                let c = rectangle_count_lower_bound(n, kind).unwrap();
                assert_eq!(
                    ceil_log2(&c) as u128,
                    comm_lower_bound_closed_form(n, kind),
                    "n={n} {kind}"
                );
            }
        }
        assert_eq!(
            rectangle_count_lower_bound(1, BoundKind::Sum).unwrap(),
            BigUint::from(3u32)
        );
        assert_eq!(
            rectangle_count_lower_bound(1, BoundKind::Product).unwrap(),
            BigUint::from(2u32)
        );
        assert_eq!(comm_lower_bound(40, BoundKind::Sum).unwrap(), (1u128 << 40) + 39);
    }

    #[test]
    fn literature_values() {
        assert_eq!(literature_bounds(4).unwrap().sum_det, 9);
        assert_eq!(literature_bounds(2).unwrap().disj_det, 5);
        assert_eq!(literature_bounds(3).unwrap().sum_det, 3);
    }

    #[test]
    fn n4_too_large_for_five() {
        assert!(sum_fooling_families(5).is_err());
        assert!(product_fooling_families(0).is_err());
    }
}
