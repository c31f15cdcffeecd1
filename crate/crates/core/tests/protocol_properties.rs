// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

use std::collections::HashSet;
use std::sync::Arc;

use commhash::group::{Backend, GroupParams, GroupSize, ModpMode};
use commhash::net::{run_basic_session, BasicRun, FaultPlan, Mutation};
use commhash::protocol::basic::Phase;
use commhash::protocol::{Frame, MsgType};
use commhash::{generate_group, reference_digest, ParticipantKeys};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn param_pool() -> Vec<Arc<GroupParams>> {
    let mut pool = vec![
        Arc::new(GroupParams::toy_subgroup()),
        Arc::new(GroupParams::toy_primitive()),
        Arc::new(GroupParams::toy_ec()),
        Arc::new(GroupParams::secp256k1()),
    ];
    for (bits, mode, seed) in [(64, ModpMode::Subgroup, 1), (96, ModpMode::Primitive, 2)] {
        pool.push(Arc::new(generate_group(Backend::Modp, GroupSize::Bits(bits), mode, seed).unwrap()));
    }
    pool
}

#[test]
fn end_to_end_matches_reference() {
    let pool = param_pool();
    let mut rng = ChaCha20Rng::seed_from_u64(100);
    for trial in 0..120 {
        let params = &pool[trial % pool.len()];
        let n = rng.gen_range(1..=8);
        let keys: Vec<_> = (0..n).map(|_| ParticipantKeys::random(params, &mut rng)).collect();
        let m = params.random_key(&mut rng);
        let owner = rng.gen_range(1..=n) as u16;
        let expected = reference_digest(params, &m, &keys).unwrap();
        let run = BasicRun::new(Arc::clone(params), keys, owner, m, rng.gen());
        let out = run_basic_session(&run, FaultPlan::new()).unwrap();
        assert_eq!(out.phase, Some(Phase::Done));
        assert_eq!(out.digest, Some(expected), "trial {trial}");
    }
}

#[test]
fn owner_position_and_order_invariance() {
    let params = Arc::new(GroupParams::toy_ec());
    let mut rng = ChaCha20Rng::seed_from_u64(101);
    for _ in 0..40 {
        let n = rng.gen_range(2..=5);
        let mut keys: Vec<_> = (0..n).map(|_| ParticipantKeys::random(&params, &mut rng)).collect();
        let m = params.random_key(&mut rng);
        let mut digests = HashSet::new();
        for owner in 1..=n as u16 {
            keys.shuffle(&mut rng);
            let run = BasicRun::new(Arc::clone(&params), keys.clone(), owner, m.clone(), rng.gen());
            let out = run_basic_session(&run, FaultPlan::new()).unwrap();
            digests.insert(params.encode_element(&out.digest.unwrap()).unwrap());
        }
        assert_eq!(digests.len(), 1);
    }
}

#[test]
fn distinct_messages_give_distinct_digests() {
    let params = Arc::new(GroupParams::toy_subgroup());
    let f = params.scalars().clone();
    let keys = vec![ParticipantKeys::from_u64(&params, 2, 3), ParticipantKeys::from_u64(&params, 4, 6)];
    let digests: HashSet<_> = (0..11)
        .map(|m| {
            let run = BasicRun::new(Arc::clone(&params), keys.clone(), 1, f.from_u64(m), m);
            params.encode_element(&run_basic_session(&run, FaultPlan::new()).unwrap().digest.unwrap()).unwrap()
        })
        .collect();
    assert_eq!(digests.len(), 11);
}

#[test]
fn tampering_never_yields_a_wrong_digest() {
    let params = Arc::new(GroupParams::toy_subgroup());
    let mut rng = ChaCha20Rng::seed_from_u64(102);
    let mut failures = 0;
    for case in 0..1000 {
        let n = rng.gen_range(1..=4);
        let keys: Vec<_> = (0..n).map(|_| ParticipantKeys::random(&params, &mut rng)).collect();
        let m = params.random_key(&mut rng);
        let run = BasicRun::new(Arc::clone(&params), keys, rng.gen_range(1..=n) as u16, m, rng.gen());
        let clean = run_basic_session(&run, FaultPlan::new()).unwrap();
        let targets: Vec<_> = clean
            .report
            .submitted
            .iter()
            .filter(|e| matches!(Frame::decode(&e.bytes).unwrap().msg_type, MsgType::Share | MsgType::Nonce))
            .collect();
        let target = targets[rng.gen_range(0..targets.len())];
        let mutation = match rng.gen_range(0..5) {
            0 => Mutation::FlipByte(rng.gen_range(0..target.bytes.len())),
            1 => Mutation::ReplaceNonce,
            2 => Mutation::Drop,
            3 => Mutation::Duplicate,
            _ => Mutation::Reorder,
        };
        let out = run_basic_session(&run, FaultPlan::new().with(target.ordinal, mutation)).unwrap();
        match out.phase {
            Some(Phase::Done) => assert_eq!(out.digest, clean.digest, "case {case}: {mutation:?}"),
            _ => {
                assert!(out.digest.is_none());
                failures += 1;
            }
        }
    }
    assert!(failures > 500);
}
