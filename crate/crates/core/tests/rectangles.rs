use num_bigint::BigUint;

use reconfn_core::model::{make_instance, oracle_value, FunctionKind, Value};
use reconfn_core::rectangles::{
    bounds_report, comm_lower_bound, fooling_families, verify_fooling, BoundKind, FamilyLabel, FoolingFamily,
    SubsetPair, VerifyMode,
};

#[test]
fn pair_values_agree_with_oracle() {
    for kind in [BoundKind::Sum, BoundKind::Product] {
        let function = match kind {
            BoundKind::Sum => FunctionKind::Sum,
            BoundKind::Product => FunctionKind::Product,
        };
        for n in 2..=3 {
            for fam in fooling_families(n, kind).unwrap() {
                for p in &fam.pairs {
                    let inst = make_instance(n, p.y_elements(), p.y_prime_elements()).unwrap();
                    let Value::Int(v) = oracle_value(&inst, function).unwrap() else {
                        panic!("integer function");
                    };
                    assert_eq!(v, p.value);
                    assert_eq!(v, fam.common_value);
                }
            }
        }
    }
}

#[test]
fn sampled_n4() {
    for kind in [BoundKind::Sum, BoundKind::Product] {
        let r = bounds_report(4, kind, VerifyMode::default_for(4)).unwrap();
        assert!(r.pass, "{kind}");
        assert!(r.verification.sampled);
        assert!(r.verification.checked_pairs >= 1_000_000);
    }
}

#[test]
fn closed_form_counts() {
    assert_eq!(comm_lower_bound(2, BoundKind::Sum).unwrap(), 5);
    assert_eq!(comm_lower_bound(3, BoundKind::Sum).unwrap(), 10);
    for n in 2..=3 {
        let r = bounds_report(n, BoundKind::Sum, VerifyMode::Full).unwrap();
        assert_eq!(r.comm_lower_bound_bits, r.closed_form_bits);
    }
}

#[test]
fn crafted_family_is_rejected() {
    // ({0,3}, {}) and ({3}, {0}) both cross to a sum of 3.
    let fam = FoolingFamily {
        kind: BoundKind::Sum,
        label: FamilyLabel::Base,
        common_value: BigUint::from(3u32),
        pairs: vec![
            SubsetPair::new(BoundKind::Sum, 0b1001, 0b0000),
            SubsetPair::new(BoundKind::Sum, 0b1000, 0b0001),
        ],
        ground: 0b1001,
    };
    let r = verify_fooling(std::slice::from_ref(&fam), BoundKind::Sum, VerifyMode::Full);
    assert!(!r.pass);
    assert_eq!(r.violation_count, 1);

    let mut wrong = fam;
    wrong.pairs = vec![SubsetPair::new(BoundKind::Sum, 0b0100, 0b0001)];
    assert!(!verify_fooling(&[wrong], BoundKind::Sum, VerifyMode::Full).pass);
}

#[test]
fn families_need_small_n() {
    assert!(fooling_families(5, BoundKind::Sum).is_err());
    assert!(fooling_families(0, BoundKind::Product).is_err());
}
