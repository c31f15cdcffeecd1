// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

//! Primality testing, safe-prime search and root finding.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};

/// Miller-Rabin rounds; error probability is at most 4^-64.
pub const MR_ROUNDS: usize = 64;

const SMALL_PRIMES: [u32; 54] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251,
];

/// Probabilistic primality check. Witnesses come from a ChaCha stream keyed by
/// the candidate, so the answer is reproducible.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let mut seed = [0u8; 32];
    let bytes = n.to_bytes_le();
    for (i, b) in bytes.iter().enumerate() {
        seed[i % 32] ^= b.rotate_left((i / 32) as u32);
    }
    let mut rng = ChaCha20Rng::from_seed(seed);
    is_probable_prime_with(n, MR_ROUNDS, &mut rng)
}

pub fn is_probable_prime_with<R: RngCore + ?Sized>(n: &BigUint, rounds: usize, rng: &mut R) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    for &p in SMALL_PRIMES.iter() {
        let p = BigUint::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }

    let n_minus_one = n - 1u32;
    let s = n_minus_one.trailing_zeros().expect("n > 2");
    let d = &n_minus_one >> s;

    'witness: for _ in 0..rounds {
        let a = rng.gen_biguint_range(&two, &n_minus_one);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_one {
                continue 'witness;
            }
            if x.is_one() {
                return false;
            }
        }
        return false;
    }
    true
}

/// Attempts allowed per bit of requested size.
const ATTEMPTS_PER_BIT: usize = 2_000;

/// Search for a safe prime `p = 2q + 1` with exactly `bits` bits. Returns
/// `(p, q)`. Deterministic in `seed`.
pub fn find_safe_prime(bits: u32, seed: u64) -> Result<(BigUint, BigUint)> {
    if bits < 6 {
        return Err(Error::UnsupportedSize(format!("{bits}-bit safe prime")));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let budget = ATTEMPTS_PER_BIT * bits as usize;
    for _ in 0..budget {
        // q has bits-1 bits, top bit set, q ≡ 11 mod 12 keeps both q and
        // 2q+1 clear of 2 and 3.
        let mut q = rng.gen_biguint((bits - 1) as u64);
        q.set_bit((bits - 2) as u64, true);
        let r = (&q % 12u32).to_u32_digits().first().copied().unwrap_or(0);
        q += (11 + 12 - r) % 12;
        if q.bits() != (bits - 1) as u64 {
            continue;
        }
        let p: BigUint = (&q << 1) + 1u32;
        if sieve_rejects(&q) || sieve_rejects(&p) {
            continue;
        }
        // Cheap base-2 Fermat on p before the full test on q.
        if !BigUint::from(2u32).modpow(&(&p - 1u32), &p).is_one() {
            continue;
        }
        if is_probable_prime_with(&q, MR_ROUNDS, &mut rng)
            && is_probable_prime_with(&p, MR_ROUNDS, &mut rng)
        {
            return Ok((p, q));
        }
    }
    Err(Error::SearchExhausted(budget))
}

fn sieve_rejects(n: &BigUint) -> bool {
    SMALL_PRIMES.iter().any(|&sp| {
        let sp = BigUint::from(sp);
        n != &sp && (n % &sp).is_zero()
    })
}

/// Smallest primitive root of a safe prime `p = 2q + 1`: `g^2 != 1` and
/// `g^q != 1`.
pub fn smallest_primitive_root(p: &BigUint, q: &BigUint) -> BigUint {
    let mut g = BigUint::from(2u32);
    loop {
        if is_primitive_root(&g, p, q) {
            return g;
        }
        g += 1u32;
    }
}

pub fn is_primitive_root(g: &BigUint, p: &BigUint, q: &BigUint) -> bool {
    let g = g % p;
    !g.is_zero() && !(&g * &g % p).is_one() && !g.modpow(q, p).is_one()
}

/// Legendre symbol test: is `v` a nonzero square mod odd prime `p`?
pub fn is_quadratic_residue(v: &BigUint, p: &BigUint) -> bool {
    let v = v % p;
    if v.is_zero() {
        return false;
    }
    let e = (p - 1u32) >> 1;
    v.modpow(&e, p).is_one()
}

/// Square root mod an odd prime (Tonelli-Shanks). `None` if `v` is a non-residue.
pub fn sqrt_mod(v: &BigUint, p: &BigUint) -> Option<BigUint> {
    let v = v % p;
    if v.is_zero() {
        return Some(v);
    }
    if !is_quadratic_residue(&v, p) {
        return None;
    }
    if (p % 4u32) == BigUint::from(3u32) {
        let e = (p + 1u32) >> 2;
        return Some(v.modpow(&e, p));
    }

    let p_minus_one = p - 1u32;
    let s = p_minus_one.trailing_zeros().expect("p > 2");
    let q = &p_minus_one >> s;
    let mut z = BigUint::from(2u32);
    while is_quadratic_residue(&z, p) {
        z += 1u32;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = v.modpow(&q, p);
    let mut r = v.modpow(&((&q + 1u32) >> 1), p);
    while !t.is_one() {
        let mut i = 0u64;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = &t2 * &t2 % p;
            i += 1;
        }
        let b = c.modpow(&(BigUint::one() << (m - i - 1)), p);
        m = i;
        c = &b * &b % p;
        t = t * &c % p;
        r = r * b % p;
    }
    Some(r)
}

/// True iff `n` is odd (used to pick the canonical square root).
pub fn is_odd(n: &BigUint) -> bool {
    n.is_odd()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_prime(n: u64) -> bool {
        n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn matches_trial_division_below_5000() {
        for n in 0u64..5000 {
            assert_eq!(is_probable_prime(&BigUint::from(n)), brute_prime(n), "n = {n}");
        }
    }

    #[test]
    fn rejects_carmichael_numbers() {
        for n in [561u64, 1105, 1729, 2465, 2821, 6601, 8911, 41041, 825265] {
            assert!(!is_probable_prime(&BigUint::from(n)));
        }
    }

    #[test]
    fn known_large_primes() {
        // 2^127 - 1
        let m127 = (BigUint::one() << 127u32) - 1u32;
        assert!(is_probable_prime(&m127));
        assert!(!is_probable_prime(&(&m127 + 2u32)));
    }

    #[test]
    fn safe_prime_search_is_deterministic() {
        let (p, q) = find_safe_prime(64, 7).unwrap();
        assert_eq!(p.bits(), 64);
        assert_eq!(p, (&q << 1) + 1u32);
        assert!(is_probable_prime(&p) && is_probable_prime(&q));
        assert_eq!(find_safe_prime(64, 7).unwrap().0, p);
        assert_ne!(find_safe_prime(64, 8).unwrap().0, p);
    }

    #[test]
    fn primitive_root_of_23_is_5() {
        let p = BigUint::from(23u32);
        let q = BigUint::from(11u32);
        assert_eq!(smallest_primitive_root(&p, &q), BigUint::from(5u32));
    }

    #[test]
    fn sqrt_against_enumeration() {
        for p in [17u32, 23, 41, 97, 113] {
            let pb = BigUint::from(p);
            for v in 0..p {
                let has_root = (0..p).any(|r| r * r % p == v);
                match sqrt_mod(&BigUint::from(v), &pb) {
                    Some(r) => assert_eq!(&r * &r % &pb, BigUint::from(v)),
                    None => assert!(!has_root, "missed root of {v} mod {p}"),
                }
            }
        }
    }
}
