use proptest::prelude::*;

use reconfn_core::model::{oracle_value, random_instance, FunctionKind, Value};
use reconfn_core::protocols::{run_protocol, Protocol, ProtocolParams};
use reconfn_core::{make_instance, RunOptions, Status};

fn protocol(id: &str, params: ProtocolParams) -> Protocol {
    Protocol::from_id(id, &params).unwrap()
}

fn sizes() -> impl Strategy<Value = (u32, usize, usize, usize, u64)> {
    (2u32..=7).prop_flat_map(|n| {
        let cap = (1usize << n).min(12);
        (Just(n), 0..=cap, 0..=cap, 0..=cap, any::<u64>()).prop_filter_map("infeasible", move |(n, a, b, m0, s)| {
            (m0 <= a && m0 <= b && a + b - m0 <= 1 << n).then_some((n, a, b, m0, s))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn deterministic_protocols_match_oracle((n, a, b, m0, s) in sizes()) {
        let inst = random_instance(n, a, b, m0, s).unwrap();
        for id in ["trivial-sum", "naive-intersection", "sum-via-intersection", "disj-via-sum",
                   "reconcile-sum", "reconcile-product"] {
            let out = run_protocol(&protocol(id, ProtocolParams::default()), &inst, s, &RunOptions::default()).unwrap();
            prop_assert_eq!(out.status, Status::Ok, "{}", id);
            prop_assert!(out.oracle_match, "{}", id);
        }
    }

    #[test]
    fn idempotent_cost_is_fixed((n, a, b, m0, s) in sizes()) {
        prop_assume!(a > 0 && b > 0);
        let inst = random_instance(n, a, b, m0, s).unwrap();
        for id in ["idempotent-max", "idempotent-min", "idempotent-or", "idempotent-and"] {
            let out = run_protocol(&protocol(id, ProtocolParams::default()), &inst, s, &RunOptions::default()).unwrap();
            prop_assert!(out.oracle_match);
            prop_assert_eq!(out.payload_bits(), 2 * n as u64);
        }
    }

    #[test]
    fn lv_sum_never_wrong((n, a, b, m0, s) in sizes(), k in 1u32..=7) {
        let k = k.min(n);
        let inst = random_instance(n, a, b, m0, s).unwrap();
        let p = protocol("lv-sum", ProtocolParams { k: Some(k), ..Default::default() });
        let opts = RunOptions { round_cap: 200, ..Default::default() };
        let out = run_protocol(&p, &inst, s, &opts).unwrap();
        prop_assert!(out.status == Status::Ok || out.status == Status::RoundCapExceeded);
        if out.status == Status::Ok {
            prop_assert!(out.oracle_match);
        }
    }
}

#[test]
fn trivial_sum_small_example() {
    let inst = make_instance(2, vec![0b01, 0b10], vec![0b10, 0b11]).unwrap();
    let out = run_protocol(
        &protocol("trivial-sum", ProtocolParams::default()),
        &inst,
        0,
        &RunOptions::default(),
    )
    .unwrap();
    assert_eq!(out.value(), Some(&Value::int(6u32)));
    assert_eq!(out.payload_bits(), 4 + 2 * 2 - 2);
}

#[test]
fn same_seed_same_transcript() {
    let inst = random_instance(10, 30, 40, 20, 3).unwrap();
    let p = protocol(
        "lv-sum",
        ProtocolParams {
            k: Some(6),
            ..Default::default()
        },
    );
    let a = run_protocol(&p, &inst, 11, &RunOptions::default()).unwrap();
    let b = run_protocol(&p, &inst, 11, &RunOptions::default()).unwrap();
    assert_eq!(a.transcript.dump_json(), b.transcript.dump_json());
}

#[test]
fn disjointness_values() {
    let disjoint = make_instance(3, vec![1, 2], vec![3, 4]).unwrap();
    let shared = make_instance(3, vec![1, 2], vec![2, 4]).unwrap();
    let p = protocol(
        "disj-via-sum",
        ProtocolParams {
            verdict: true,
            ..Default::default()
        },
    );
    for inst in [&disjoint, &shared] {
        let out = run_protocol(&p, inst, 0, &RunOptions::default()).unwrap();
        assert!(out.oracle_match);
        assert_eq!(
            out.value(),
            Some(&oracle_value(inst, FunctionKind::Disjointness).unwrap())
        );
    }
}

#[test]
fn unknown_protocol_rejected() {
    assert!(Protocol::from_id("nope", &ProtocolParams::default()).is_err());
    assert!(Protocol::from_id("lv-sum", &ProtocolParams::default()).is_err());
}
