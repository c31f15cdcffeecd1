// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

use std::sync::OnceLock;

use commhash::group::{GroupParams, ModpMode};
use commhash::pke::{self, Ciphertext, KeyPair};
use commhash::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn all_params() -> &'static [GroupParams] {
    static PARAMS: OnceLock<Vec<GroupParams>> = OnceLock::new();
    PARAMS.get_or_init(|| vec![
        GroupParams::toy_subgroup(),
        GroupParams::toy_primitive(),
        GroupParams::toy_ec(),
        GroupParams::secp256k1(),
        GroupParams::modp_2048(ModpMode::Subgroup),
    ])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn element_and_scalar_round_trip(which in 0usize..4, seed in any::<u64>()) {
        let params = &all_params()[which];
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let s = params.scalars().random(&mut rng);
        let g = params.power(&params.gen_a(), &s).unwrap();
        let bytes = params.encode_element(&g).unwrap();
        prop_assert_eq!(params.decode_element(&bytes).unwrap(), g);
        let sb = params.encode_scalar(&s);
        prop_assert_eq!(sb.len(), params.scalars().width());
        prop_assert_eq!(params.decode_scalar(&sb).unwrap(), s);
    }

    #[test]
    fn pke_round_trip_and_corruption(
        which in 0usize..4,
        seed in any::<u64>(),
        msg in proptest::collection::vec(any::<u8>(), 0..96),
        flip in any::<prop::sample::Index>(),
    ) {
        let params = &all_params()[which];
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let kp = KeyPair::generate(params, &mut rng);
        let ct = pke::encrypt(params, kp.public(), &msg, &mut rng).unwrap();
        let bytes = ct.encode(params).unwrap();
        let back = Ciphertext::decode(params, &bytes).unwrap();
        prop_assert_eq!(pke::decrypt(params, kp.secret(), &back).unwrap(), msg);

        let mut bad = bytes.clone();
        let i = flip.index(bad.len());
        bad[i] ^= 0x01;
        let rejected = match Ciphertext::decode(params, &bad) {
            Err(_) => true,
            Ok(c) => pke::decrypt(params, kp.secret(), &c).is_err(),
        };
        prop_assert!(rejected);
    }
}

#[test]
fn params_round_trip_and_reject_garbage() {
    for p in all_params() {
        let bytes = p.to_bytes();
        assert_eq!(&GroupParams::from_bytes(&bytes).unwrap(), p);
        assert_eq!(p.fingerprint(), GroupParams::from_bytes(&bytes).unwrap().fingerprint());
        assert!(GroupParams::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }
    assert_ne!(GroupParams::toy_subgroup().fingerprint(), GroupParams::toy_primitive().fingerprint());
}

#[test]
fn elements_outside_the_group_are_rejected() {
    let sub = GroupParams::toy_subgroup();
    // 5 is a non-residue mod 23.
    assert!(matches!(sub.decode_element(&[5]), Err(Error::NotInGroup)));
    assert!(matches!(sub.decode_element(&[23]), Err(Error::NonCanonical(_))));
    assert!(matches!(sub.decode_element(&[0]), Err(Error::NotInGroup)));
    let ec = GroupParams::toy_ec();
    assert!(ec.decode_element(&[0x04, 1]).is_err());
}
