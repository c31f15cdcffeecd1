// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use commhash::group::{GroupParams, Scalar, ScalarField};
use commhash::hash::cvhp;
use commhash::threshold::{
    lagrange_at_zero, lagrange_from_quotients, reconstruct, run_local, Polynomial, QuotientTable, ThresholdCluster,
};
use commhash::OwnerVariant;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == k {
            out.push((0..n).filter(|i| mask & (1 << i) != 0).collect());
        }
    }
    out
}

fn shamir_exhaustive(field: &ScalarField, rng: &mut ChaCha20Rng) {
    for n in 1..=6usize {
        for k in 1..=n {
            let secret = field.random(rng);
            let poly = Polynomial::random(field, secret.clone(), k, rng);
            let mut xs: Vec<Scalar> = Vec::new();
            while xs.len() < n {
                let x = field.random_nonzero(rng);
                if !xs.contains(&x) {
                    xs.push(x);
                }
            }
            for subset in subsets(n, k) {
                let shares: Vec<_> = subset.iter().map(|&i| (xs[i].clone(), poly.eval(field, &xs[i]))).collect();
                assert_eq!(reconstruct(field, &shares).unwrap(), secret, "n={n} k={k} {subset:?}");
            }
        }
    }
}

#[test]
fn shamir_every_subset_reconstructs() {
    let mut rng = ChaCha20Rng::seed_from_u64(200);
    shamir_exhaustive(&ScalarField::new(BigUint::from(11u32)), &mut rng);
    let secp = GroupParams::secp256k1();
    shamir_exhaustive(secp.scalars(), &mut rng);
}

#[test]
fn quotient_path_matches_direct_lagrange() {
    let mut rng = ChaCha20Rng::seed_from_u64(201);
    let fields = [ScalarField::new(BigUint::from(1_000_003u32)), GroupParams::secp256k1().scalars().clone()];
    for case in 0..500 {
        let field = &fields[case % 2];
        let n = rng.gen_range(2..=8);
        let xs: Vec<Scalar> = (0..n).map(|_| field.random_nonzero(&mut rng)).collect();
        let table = QuotientTable::from_points(field, &xs).unwrap();
        let k = rng.gen_range(1..=n);
        let mut subset: Vec<u16> = (1..=n as u16).collect();
        rand::seq::SliceRandom::shuffle(subset.as_mut_slice(), &mut rng);
        subset.truncate(k);
        let points: Vec<_> = subset.iter().map(|&i| xs[i as usize - 1].clone()).collect();
        let direct = lagrange_at_zero(field, &points).unwrap();
        for (pos, &i) in subset.iter().enumerate() {
            assert_eq!(lagrange_from_quotients(field, &table, &subset, i).unwrap(), direct[pos]);
        }
    }
}

#[test]
fn multiply_is_exact_and_blinded() {
    let mut rng = ChaCha20Rng::seed_from_u64(202);
    let field = GroupParams::secp256k1().scalars().clone();
    for _ in 0..1000 {
        let x = field.random_nonzero(&mut rng);
        let y = field.random_nonzero(&mut rng);
        let blinds: Vec<Scalar> = (0..3).map(|_| field.random_nonzero(&mut rng)).collect();
        let t = run_local(&field, &x, &y, [&blinds[0], &blinds[1], &blinds[2]]).unwrap();
        let (product, sent) = t.split_last().unwrap();
        assert_eq!(product, &field.mul(&x, &y));
        for v in sent {
            assert_ne!(v, &x);
            assert_ne!(v, &y);
        }
    }
}

#[test]
fn threshold_digest_identity_on_both_backends() {
    let mut rng = ChaCha20Rng::seed_from_u64(203);
    for params in [GroupParams::modp_2048(commhash::ModpMode::Subgroup), GroupParams::secp256k1()] {
        let params = Arc::new(params);
        let f = params.scalars().clone();
        let secrets = (f.random(&mut rng), f.random(&mut rng));
        let mut cluster = ThresholdCluster::setup(Arc::clone(&params), secrets.clone(), 3, 5, &mut rng).unwrap();
        let m = f.random(&mut rng);
        let expected = cvhp(&params, &f.add(&m, &secrets.0), &secrets.1).unwrap();
        for subset in subsets(5, 3).into_iter().take(4) {
            let subset: Vec<u16> = subset.into_iter().map(|i| i as u16 + 1).collect();
            let d = cluster.hash(subset[0], m.clone(), OwnerVariant::Plain, Some(subset), &mut rng).unwrap();
            assert_eq!(d, expected);
        }
    }
}
