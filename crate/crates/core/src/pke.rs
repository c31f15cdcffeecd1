// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

//! Hashed ElGamal over the protocol group.
//!
//! `ephemeral = a^e`, `shared = pub^e`; both keys come from SHA-256 over the
//! canonical encoding of `shared`. The body is XORed with a SHA-256 counter
//! stream and authenticated with HMAC-SHA256 truncated to 16 bytes. The tag
//! covers `ephemeral ‖ body ‖ ad`; plain [`encrypt`] uses empty `ad`.
//!
//! Ciphertext encoding: `ephemeral ‖ u16-BE body length ‖ body ‖ tag`.

use hmac::{Hmac, Mac};
use rand::{CryptoRng, RngCore};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams, Scalar};

pub const TAG_LEN: usize = 16;
pub const MAX_PLAINTEXT: usize = u16::MAX as usize;

type HmacSha256 = Hmac<Sha256>;

#[derive(Clone, PartialEq, Eq)]
pub struct KeyPair {
    secret: Scalar,
    public: GroupElement,
}

impl std::fmt::Debug for KeyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KeyPair")
            .field("public", &self.public)
            .finish_non_exhaustive()
    }
}

impl KeyPair {
    /// Deterministic key generation from a 64-bit seed.
    pub fn generate_seeded(params: &GroupParams, seed: u64) -> Self {
        Self::generate(params, &mut ChaCha20Rng::seed_from_u64(seed))
    }

    pub fn generate<R: RngCore + CryptoRng + ?Sized>(params: &GroupParams, rng: &mut R) -> Self {
        let secret = params.scalars().random_nonzero(rng);
        Self::from_secret(params, secret).expect("nonzero secret")
    }

    pub fn from_secret(params: &GroupParams, secret: Scalar) -> Result<Self> {
        if secret.is_zero() {
            return Err(Error::NotInvertible);
        }
        let public = params.power(&params.gen_a(), &secret)?;
        Ok(Self { secret, public })
    }

    pub fn secret(&self) -> &Scalar {
        &self.secret
    }

    pub fn public(&self) -> &GroupElement {
        &self.public
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ciphertext {
    pub ephemeral: GroupElement,
    pub body: Vec<u8>,
    pub tag: [u8; TAG_LEN],
}

struct DerivedKeys {
    enc: [u8; 32],
    mac: [u8; 32],
}

fn derive_keys(params: &GroupParams, shared: &GroupElement) -> Result<DerivedKeys> {
    let material = params.encode_element(shared)?;
    let kdf = |label: &[u8]| -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(label);
        h.update(&material);
        h.finalize().into()
    };
    Ok(DerivedKeys {
        enc: kdf(b"commhash-pke/enc"),
        mac: kdf(b"commhash-pke/mac"),
    })
}

fn apply_stream(key: &[u8; 32], data: &mut [u8]) {
    for (i, chunk) in data.chunks_mut(32).enumerate() {
        let mut h = Sha256::new();
        h.update(key);
        h.update((i as u32).to_be_bytes());
        let block = h.finalize();
        chunk.iter_mut().zip(block.iter()).for_each(|(b, k)| *b ^= k);
    }
}

fn mac(key: &[u8; 32], ephemeral: &[u8], body: &[u8], ad: &[u8]) -> HmacSha256 {
    let mut m = HmacSha256::new_from_slice(key).expect("HMAC accepts any key length");
    m.update(ephemeral);
    m.update(body);
    m.update(ad);
    m
}

pub fn encrypt<R: RngCore + CryptoRng + ?Sized>(
    params: &GroupParams,
    public: &GroupElement,
    plaintext: &[u8],
    rng: &mut R,
) -> Result<Ciphertext> {
    encrypt_with_ad(params, public, plaintext, &[], rng)
}

pub fn decrypt(params: &GroupParams, secret: &Scalar, ct: &Ciphertext) -> Result<Vec<u8>> {
    decrypt_with_ad(params, secret, ct, &[])
}

/// Encrypt and authenticate `ad` alongside the ciphertext.
pub fn encrypt_with_ad<R: RngCore + CryptoRng + ?Sized>(
    params: &GroupParams,
    public: &GroupElement,
    plaintext: &[u8],
    ad: &[u8],
    rng: &mut R,
) -> Result<Ciphertext> {
    if plaintext.len() > MAX_PLAINTEXT {
        return Err(Error::PlaintextTooLong(MAX_PLAINTEXT));
    }
    let e = params.scalars().random_nonzero(rng);
    let ephemeral = params.power(&params.gen_a(), &e)?;
    let shared = params.power(public, &e)?;
    let keys = derive_keys(params, &shared)?;

    let mut body = plaintext.to_vec();
    apply_stream(&keys.enc, &mut body);
    let eph_bytes = params.encode_element(&ephemeral)?;
    let full = mac(&keys.mac, &eph_bytes, &body, ad).finalize().into_bytes();
    let mut tag = [0u8; TAG_LEN];
    tag.copy_from_slice(&full[..TAG_LEN]);
    Ok(Ciphertext {
        ephemeral,
        body,
        tag,
    })
}

pub fn decrypt_with_ad(
    params: &GroupParams,
    secret: &Scalar,
    ct: &Ciphertext,
    ad: &[u8],
) -> Result<Vec<u8>> {
    if params.is_identity(&ct.ephemeral) || !params.contains(&ct.ephemeral) {
        return Err(Error::NotInGroup);
    }
    let shared = params.power(&ct.ephemeral, secret)?;
    let keys = derive_keys(params, &shared)?;
    let eph_bytes = params.encode_element(&ct.ephemeral)?;
    mac(&keys.mac, &eph_bytes, &ct.body, ad)
        .verify_truncated_left(&ct.tag)
        .map_err(|_| Error::AuthenticationFailed)?;
    let mut pt = ct.body.clone();
    apply_stream(&keys.enc, &mut pt);
    Ok(pt)
}

impl Ciphertext {
    pub fn encode(&self, params: &GroupParams) -> Result<Vec<u8>> {
        let mut out = params.encode_element(&self.ephemeral)?;
        out.extend_from_slice(&(self.body.len() as u16).to_be_bytes());
        out.extend_from_slice(&self.body);
        out.extend_from_slice(&self.tag);
        Ok(out)
    }

    /// Decode a ciphertext occupying exactly `bytes`.
    pub fn decode(params: &GroupParams, bytes: &[u8]) -> Result<Self> {
        let (ct, used) = Self::decode_prefix(params, bytes)?;
        if used != bytes.len() {
            return Err(Error::Malformed("trailing bytes after ciphertext"));
        }
        Ok(ct)
    }

    /// Decode a ciphertext at the head of `bytes`, returning the bytes used.
    pub fn decode_prefix(params: &GroupParams, bytes: &[u8]) -> Result<(Self, usize)> {
        let eph_len = params.element_len_prefix(bytes)?;
        if bytes.len() < eph_len + 2 {
            return Err(Error::Malformed("truncated ciphertext"));
        }
        let ephemeral = params.decode_element(&bytes[..eph_len])?;
        let body_len = u16::from_be_bytes([bytes[eph_len], bytes[eph_len + 1]]) as usize;
        let start = eph_len + 2;
        let end = start + body_len + TAG_LEN;
        if bytes.len() < end {
            return Err(Error::Malformed("truncated ciphertext"));
        }
        let body = bytes[start..start + body_len].to_vec();
        let mut tag = [0u8; TAG_LEN];
        tag.copy_from_slice(&bytes[start + body_len..end]);
        Ok((
            Ciphertext {
                ephemeral,
                body,
                tag,
            },
            end,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_key_from_secret_four() {
        let g = GroupParams::toy_subgroup();
        let kp = KeyPair::from_secret(&g, g.scalars().from_u64(4)).unwrap();
        assert_eq!(kp.public(), &GroupElement::Modp(16u32.into()));
        assert!(KeyPair::from_secret(&g, g.scalars().zero()).is_err());
    }

    #[test]
    fn seeded_generation() {
        let g = GroupParams::secp256k1();
        let a = KeyPair::generate_seeded(&g, 1);
        let b = KeyPair::generate_seeded(&g, 2);
        assert_eq!(a, KeyPair::generate_seeded(&g, 1));
        assert_ne!(a.secret(), b.secret());
        // Tiny field: every seed must still avoid the zero secret.
        let toy = GroupParams::toy_subgroup();
        for seed in 0..200 {
            assert!(!KeyPair::generate_seeded(&toy, seed).secret().is_zero());
        }
    }

    #[test]
    fn nonce_round_trip_and_tamper() {
        let g = GroupParams::secp256k1();
        let kp = KeyPair::generate_seeded(&g, 9);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let nonce = [0xA5u8; 32];
        let ct = encrypt(&g, kp.public(), &nonce, &mut rng).unwrap();
        assert_eq!(decrypt(&g, kp.secret(), &ct).unwrap(), nonce);

        let mut flipped = ct.clone();
        flipped.body[0] ^= 1;
        assert!(matches!(
            decrypt(&g, kp.secret(), &flipped),
            Err(Error::AuthenticationFailed)
        ));

        let ct2 = encrypt(&g, kp.public(), &nonce, &mut rng).unwrap();
        assert_ne!(ct, ct2);

        let bytes = ct.encode(&g).unwrap();
        assert_eq!(bytes.len(), 33 + 2 + 32 + TAG_LEN);
        assert_eq!(Ciphertext::decode(&g, &bytes).unwrap(), ct);
        assert!(Ciphertext::decode(&g, &bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn associated_data_is_bound() {
        let g = GroupParams::toy_ec();
        let kp = KeyPair::generate_seeded(&g, 4);
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let ct = encrypt_with_ad(&g, kp.public(), b"nonce", b"share-1", &mut rng).unwrap();
        assert_eq!(decrypt_with_ad(&g, kp.secret(), &ct, b"share-1").unwrap(), b"nonce");
        assert!(matches!(
            decrypt_with_ad(&g, kp.secret(), &ct, b"share-2"),
            Err(Error::AuthenticationFailed)
        ));
        assert!(decrypt(&g, kp.secret(), &ct).is_err());
    }

    #[test]
    fn rejects_oversized_plaintext() {
        let g = GroupParams::toy_subgroup();
        let kp = KeyPair::generate_seeded(&g, 1);
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let big = vec![0u8; MAX_PLAINTEXT + 1];
        assert!(matches!(
            encrypt(&g, kp.public(), &big, &mut rng),
            Err(Error::PlaintextTooLong(_))
        ));
    }
}
