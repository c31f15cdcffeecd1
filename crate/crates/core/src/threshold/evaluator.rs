// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

//! Server-side evaluation of the dealer polynomials on encrypted points.
//!
//! The server holds `Enc_i(x_i)` and needs `Enc_i(f(x_i))` without learning
//! `x_i`. [`HomomorphicEvaluator`] is that capability. [`SealedEvaluator`]
//! implements it by simulation: participants deposit their decryption keys
//! into a sealed box that decrypts, evaluates and re-encrypts internally. The
//! server only handles ciphertext bytes and never sees a key or a plaintext.

use std::collections::HashMap;
use std::sync::Arc;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::shamir::Polynomial;
use crate::error::{Error, Result};
use crate::group::{GroupParams, Scalar};
use crate::pke::{self, Ciphertext, KeyPair};

/// An encrypted exponent-field scalar, opaque to the server.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncryptedScalar(pub Vec<u8>);

/// Participant side: encrypt a scalar under one's own key.
pub fn encrypt_scalar<R: rand::RngCore + rand::CryptoRng + ?Sized>(
    params: &GroupParams,
    keypair: &KeyPair,
    value: &Scalar,
    rng: &mut R,
) -> Result<EncryptedScalar> {
    let ct = pke::encrypt(params, keypair.public(), &params.encode_scalar(value), rng)?;
    Ok(EncryptedScalar(ct.encode(params)?))
}

/// Participant side: decrypt a scalar returned by the evaluator.
pub fn decrypt_scalar(params: &GroupParams, keypair: &KeyPair, ct: &EncryptedScalar) -> Result<Scalar> {
    let ct = Ciphertext::decode(params, &ct.0)?;
    params.decode_scalar(&pke::decrypt(params, keypair.secret(), &ct)?)
}

pub trait HomomorphicEvaluator: Send {
    /// Highest polynomial degree this evaluator supports.
    fn max_degree(&self) -> usize;

    /// `Enc_i(x) ↦ Enc_i(poly(x))` for the participant with `index`.
    fn evaluate(&mut self, index: u16, ct: &EncryptedScalar, poly: &Polynomial) -> Result<EncryptedScalar>;
}

/// Simulation backend. See the module docs.
pub struct SealedEvaluator {
    params: Arc<GroupParams>,
    max_degree: usize,
    keys: HashMap<u16, KeyPair>,
    rng: ChaCha20Rng,
}

impl std::fmt::Debug for SealedEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SealedEvaluator")
            .field("max_degree", &self.max_degree)
            .field("sealed_keys", &self.keys.len())
            .finish()
    }
}

impl SealedEvaluator {
    pub fn new(params: Arc<GroupParams>, max_degree: usize, seed: u64) -> Self {
        Self {
            params,
            max_degree,
            keys: HashMap::new(),
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    /// Participant deposits its key into the sealed box.
    pub fn seal_key(&mut self, index: u16, keypair: KeyPair) {
        self.keys.insert(index, keypair);
    }
}

impl HomomorphicEvaluator for SealedEvaluator {
    fn max_degree(&self) -> usize {
        self.max_degree
    }

    fn evaluate(&mut self, index: u16, ct: &EncryptedScalar, poly: &Polynomial) -> Result<EncryptedScalar> {
        if poly.degree() > self.max_degree {
            return Err(Error::UnsupportedDegree {
                degree: poly.degree(),
                limit: self.max_degree,
            });
        }
        let kp = self
            .keys
            .get(&index)
            .ok_or(Error::InvalidState("no sealed key for participant"))?;
        let x = decrypt_scalar(&self.params, kp, ct)?;
        let y = poly.eval(self.params.scalars(), &x);
        encrypt_scalar(&self.params, kp, &y, &mut self.rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sealed_evaluation_matches_plain() {
        let params = Arc::new(GroupParams::toy_subgroup());
        let f = params.scalars();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let kp = KeyPair::generate(&params, &mut rng);
        let mut ev = SealedEvaluator::new(Arc::clone(&params), 1, 2);
        ev.seal_key(3, kp.clone());

        let poly = Polynomial::new(vec![f.from_u64(5), f.from_u64(3)]);
        let ct = encrypt_scalar(&params, &kp, &f.from_u64(2), &mut rng).unwrap();
        let out = ev.evaluate(3, &ct, &poly).unwrap();
        assert_ne!(out, ct);
        assert_eq!(decrypt_scalar(&params, &kp, &out).unwrap(), f.zero());

        let constant = Polynomial::new(vec![f.from_u64(7)]);
        for x in [1, 4, 9] {
            let ct = encrypt_scalar(&params, &kp, &f.from_u64(x), &mut rng).unwrap();
            let out = ev.evaluate(3, &ct, &constant).unwrap();
            assert_eq!(decrypt_scalar(&params, &kp, &out).unwrap(), f.from_u64(7));
        }

        let quadratic = Polynomial::new(vec![f.one(), f.one(), f.one()]);
        assert!(matches!(
            ev.evaluate(3, &ct, &quadratic),
            Err(Error::UnsupportedDegree { degree: 2, limit: 1 })
        ));
        assert!(ev.evaluate(4, &ct, &poly).is_err());
    }
}
