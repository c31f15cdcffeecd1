// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

//! Exponent-domain arithmetic modulo the hash-exponent modulus.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;

use crate::error::{Error, Result};

/// An integer in `[0, M)`. Only a [`ScalarField`] can construct one, so the
/// value is always reduced.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar(BigUint);

impl Scalar {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", self.0)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarOp {
    Add,
    Sub,
    Mul,
    Inv,
    Neg,
}

/// Integers modulo `M`. For SUBGROUP and EC groups `M` is prime and this is a
/// field; for PRIMITIVE mode groups `M = p - 1` and only units invert.
#[derive(Clone, PartialEq, Eq)]
pub struct ScalarField {
    modulus: Arc<BigUint>,
    width: usize,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarField(mod {})", self.modulus)
    }
}

impl ScalarField {
    pub fn new(modulus: BigUint) -> Self {
        assert!(modulus > BigUint::one(), "scalar modulus must exceed 1");
        let width = byte_len(&modulus);
        Self {
            modulus: Arc::new(modulus),
            width,
        }
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// Fixed encoding width in bytes.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn zero(&self) -> Scalar {
        Scalar(BigUint::zero())
    }

    pub fn one(&self) -> Scalar {
        Scalar(BigUint::one())
    }

    pub fn from_u64(&self, v: u64) -> Scalar {
        self.reduce(&BigUint::from(v))
    }

    pub fn reduce(&self, v: &BigUint) -> Scalar {
        Scalar(v % self.modulus.as_ref())
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        let m = BigInt::from(self.modulus.as_ref().clone());
        let r = BigInt::from(v).mod_floor(&m);
        Scalar(r.to_biguint().expect("mod_floor is non-negative"))
    }

    pub fn random<R: RngCore + ?Sized>(&self, rng: &mut R) -> Scalar {
        Scalar(rng.gen_biguint_below(&self.modulus))
    }

    pub fn random_nonzero<R: RngCore + ?Sized>(&self, rng: &mut R) -> Scalar {
        loop {
            let s = self.random(rng);
            if !s.is_zero() {
                return s;
            }
        }
    }

    /// Uniform in `[0, bound)`, reduced into this ring.
    pub fn random_below<R: RngCore + ?Sized>(&self, bound: &BigUint, rng: &mut R) -> Scalar {
        self.reduce(&rng.gen_biguint_below(bound))
    }

    pub fn add(&self, u: &Scalar, v: &Scalar) -> Scalar {
        self.reduce(&(&u.0 + &v.0))
    }

    pub fn sub(&self, u: &Scalar, v: &Scalar) -> Scalar {
        self.add(u, &self.neg(v))
    }

    pub fn mul(&self, u: &Scalar, v: &Scalar) -> Scalar {
        self.reduce(&(&u.0 * &v.0))
    }

    pub fn neg(&self, u: &Scalar) -> Scalar {
        if u.is_zero() {
            u.clone()
        } else {
            Scalar(self.modulus.as_ref() - &u.0)
        }
    }

    pub fn inv(&self, u: &Scalar) -> Result<Scalar> {
        if u.is_zero() {
            return Err(Error::NotInvertible);
        }
        let m = BigInt::from(self.modulus.as_ref().clone());
        let ext = BigInt::from(u.0.clone()).extended_gcd(&m);
        if !ext.gcd.is_one() {
            return Err(Error::NotInvertible);
        }
        Ok(Scalar(
            ext.x.mod_floor(&m).to_biguint().expect("non-negative"),
        ))
    }

    pub fn div(&self, u: &Scalar, v: &Scalar) -> Result<Scalar> {
        Ok(self.mul(u, &self.inv(v)?))
    }

    pub fn sum<'a>(&self, items: impl IntoIterator<Item = &'a Scalar>) -> Scalar {
        items
            .into_iter()
            .fold(self.zero(), |acc, s| self.add(&acc, s))
    }

    pub fn product<'a>(&self, items: impl IntoIterator<Item = &'a Scalar>) -> Scalar {
        items
            .into_iter()
            .fold(self.one(), |acc, s| self.mul(&acc, s))
    }

    /// Unary ops ignore `v`; binary ops require it.
    pub fn apply(&self, op: ScalarOp, u: &Scalar, v: Option<&Scalar>) -> Result<Scalar> {
        let rhs = || v.ok_or(Error::InvalidState("binary scalar op needs two operands"));
        match op {
            ScalarOp::Add => Ok(self.add(u, rhs()?)),
            ScalarOp::Sub => Ok(self.sub(u, rhs()?)),
            ScalarOp::Mul => Ok(self.mul(u, rhs()?)),
            ScalarOp::Inv => self.inv(u),
            ScalarOp::Neg => Ok(self.neg(u)),
        }
    }

    pub fn encode(&self, s: &Scalar) -> Vec<u8> {
        to_fixed_be(&s.0, self.width)
    }

    pub fn decode(&self, bytes: &[u8]) -> Result<Scalar> {
        if bytes.len() != self.width {
            return Err(Error::Malformed("scalar has wrong length"));
        }
        let v = BigUint::from_bytes_be(bytes);
        if &v >= self.modulus.as_ref() {
            return Err(Error::NonCanonical("scalar not reduced"));
        }
        Ok(Scalar(v))
    }
}

pub(crate) fn byte_len(v: &BigUint) -> usize {
    (v.bits() as usize).div_ceil(8).max(1)
}

pub(crate) fn to_fixed_be(v: &BigUint, width: usize) -> Vec<u8> {
    let raw = v.to_bytes_be();
    assert!(raw.len() <= width || v.is_zero(), "value wider than field");
    let mut out = vec![0u8; width];
    if !v.is_zero() {
        out[width - raw.len()..].copy_from_slice(&raw);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f11() -> ScalarField {
        ScalarField::new(BigUint::from(11u32))
    }

    #[test]
    fn small_field_examples() {
        let f = f11();
        assert_eq!(f.inv(&f.from_u64(5)).unwrap(), f.from_u64(9));
        assert_eq!(f.add(&f.from_u64(8), &f.from_u64(3)), f.zero());
        assert_eq!(f.neg(&f.zero()), f.zero());
        assert_eq!(f.from_i64(-1), f.from_u64(10));
    }

    #[test]
    fn inverse_of_zero_fails() {
        let f = f11();
        assert!(matches!(f.inv(&f.zero()), Err(Error::NotInvertible)));
    }

    #[test]
    fn non_unit_in_composite_ring() {
        let f = ScalarField::new(BigUint::from(22u32));
        assert!(f.inv(&f.from_u64(2)).is_err());
        assert_eq!(f.inv(&f.from_u64(3)).unwrap(), f.from_u64(15));
    }

    #[test]
    fn apply_dispatch() {
        let f = f11();
        let a = f.from_u64(4);
        let b = f.from_u64(9);
        assert_eq!(f.apply(ScalarOp::Sub, &a, Some(&b)).unwrap(), f.from_u64(6));
        assert_eq!(f.apply(ScalarOp::Mul, &a, Some(&b)).unwrap(), f.from_u64(3));
        assert!(f.apply(ScalarOp::Add, &a, None).is_err());
    }

    #[test]
    fn decode_rejects_unreduced() {
        let f = f11();
        assert!(matches!(f.decode(&[11]), Err(Error::NonCanonical(_))));
        assert!(matches!(f.decode(&[0, 1]), Err(Error::Malformed(_))));
        assert_eq!(f.decode(&[10]).unwrap(), f.from_u64(10));
    }
}
