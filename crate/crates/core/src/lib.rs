// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

//! Multiparty commutative hashing over discrete-log groups.
//!
//! A set of participants, each holding a secret exponent pair, jointly
//! compute `a^(m + Σx_i) · b^(Σy_i)` for a message `m` known only to one of
//! them. A server collects one share per participant, checks that every
//! participant echoed its server-issued nonce, and stores the product. The
//! digest does not depend on which participant held the message.
//!
//! Modules:
//! * [`group`]: MODP and elliptic-curve groups, scalars, encodings.
//! * [`hash`]: the two-generator hash, shares and the reference digest.
//! * [`pke`]: hashed ElGamal used for nonce echoes and point encryption.
//! * [`protocol`]: wire frames and the n-party session state machines.
//! * [`threshold`]: the k-of-n variant built on Shamir sharing.
//! * [`net`]: deterministic in-process router, fault injection, TCP links.
//! * [`bench`]: timing harness and linear fits.

pub mod bench;
pub mod error;
pub mod group;
pub mod hash;
pub mod net;
pub mod pke;
pub mod protocol;
pub mod threshold;

pub use error::{Error, Result};
pub use group::{
    generate_group, Backend, GroupElement, GroupParams, GroupSize, ModpMode, Scalar, ScalarField,
};
pub use hash::{
    collision_to_dlog, combine_shares, cvhp, member_share, owner_share, reference_digest,
    OwnerVariant, ParticipantKeys,
};
