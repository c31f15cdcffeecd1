// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

//! The two-generator hash `h(x, y) = a^x · b^y` and its commutative
//! multiparty combination.
//!
//! Every participant contributes one share `h(x_i, y_i)`; the data owner
//! shifts its first exponent by the message. The group product of all shares
//! equals `h(m + Σx_i, Σy_i)`, which does not depend on who owned the
//! message or in which order shares arrive.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams, Scalar};

/// A participant's secret exponent pair. On curves these play the role of
/// `(k, l)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParticipantKeys {
    pub x: Scalar,
    pub y: Scalar,
}

impl ParticipantKeys {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        Self { x, y }
    }

    pub fn from_u64(params: &GroupParams, x: u64, y: u64) -> Self {
        let f = params.scalars();
        Self::new(f.from_u64(x), f.from_u64(y))
    }

    pub fn random<R: RngCore + ?Sized>(params: &GroupParams, rng: &mut R) -> Self {
        Self::new(params.random_key(rng), params.random_key(rng))
    }
}

/// How the data owner folds its message into its share.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum OwnerVariant {
    /// `h(x + m, y)`
    Plain,
    /// `h(x + R·m, y)` for a group-agreed blinding factor `R`.
    Blinded(Scalar),
    /// `h(x + m, y + m2)`: a second message scalar doubles the plaintext space.
    Dual(Scalar),
}

impl OwnerVariant {
    /// The exponent shifts `(Δx, Δy)` the owner applies for message `m`.
    pub fn shifts(&self, params: &GroupParams, m: &Scalar) -> Result<(Scalar, Scalar)> {
        let f = params.scalars();
        match self {
            OwnerVariant::Plain => Ok((m.clone(), f.zero())),
            OwnerVariant::Blinded(r) => {
                if r.is_zero() {
                    return Err(Error::ZeroBlinding);
                }
                Ok((f.mul(r, m), f.zero()))
            }
            OwnerVariant::Dual(m2) => Ok((m.clone(), m2.clone())),
        }
    }
}

pub fn cvhp(params: &GroupParams, x: &Scalar, y: &Scalar) -> Result<GroupElement> {
    let ax = params.power(&params.gen_a(), x)?;
    let by = params.power(&params.gen_b(), y)?;
    params.combine(&ax, &by)
}

/// A non-owner's share `h(x_i, y_i)`.
pub fn member_share(params: &GroupParams, keys: &ParticipantKeys) -> Result<GroupElement> {
    cvhp(params, &keys.x, &keys.y)
}

/// The data owner's share.
pub fn owner_share(
    params: &GroupParams,
    keys: &ParticipantKeys,
    m: &Scalar,
    variant: &OwnerVariant,
) -> Result<GroupElement> {
    let f = params.scalars();
    let (dx, dy) = variant.shifts(params, m)?;
    cvhp(params, &f.add(&keys.x, &dx), &f.add(&keys.y, &dy))
}

/// Group product (MODP) or sum (EC) of all shares.
pub fn combine_shares(params: &GroupParams, shares: &[GroupElement]) -> Result<GroupElement> {
    let (first, rest) = shares.split_first().ok_or(Error::EmptyShares)?;
    rest.iter()
        .try_fold(first.clone(), |acc, s| params.combine(&acc, s))
}

/// `h(m + Σx_i, Σy_i)` computed directly from all keys. No protocol party
/// can evaluate this; it exists to check protocol outputs.
pub fn reference_digest(
    params: &GroupParams,
    m: &Scalar,
    keys: &[ParticipantKeys],
) -> Result<GroupElement> {
    reference_digest_with(params, m, &OwnerVariant::Plain, keys)
}

pub fn reference_digest_with(
    params: &GroupParams,
    m: &Scalar,
    variant: &OwnerVariant,
    keys: &[ParticipantKeys],
) -> Result<GroupElement> {
    if keys.is_empty() {
        return Err(Error::EmptyShares);
    }
    let f = params.scalars();
    let (dx, dy) = variant.shifts(params, m)?;
    let sx = f.add(&dx, &f.sum(keys.iter().map(|k| &k.x)));
    let sy = f.add(&dy, &f.sum(keys.iter().map(|k| &k.y)));
    cvhp(params, &sx, &sy)
}

/// Turn a collision `h(k, l) = h(k', l')` with `l != l'` into
/// `log_A(B) = (k - k') / (l' - l)`. Needs a prime-order group.
pub fn collision_to_dlog(
    params: &GroupParams,
    first: (&Scalar, &Scalar),
    second: (&Scalar, &Scalar),
) -> Result<Scalar> {
    let (k, l) = first;
    let (k2, l2) = second;
    if l == l2 {
        return Err(Error::DegenerateCollision);
    }
    if cvhp(params, k, l)? != cvhp(params, k2, l2)? {
        return Err(Error::NotACollision);
    }
    let f = params.scalars();
    let d = f.div(&f.sub(k, k2), &f.sub(l2, l))?;
    debug_assert_eq!(params.power(&params.gen_a(), &d)?, params.gen_b());
    Ok(d)
}
