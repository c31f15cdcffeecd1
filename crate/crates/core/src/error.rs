// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::protocol::ErrorCode;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported group size: {0}")]
    UnsupportedSize(String),
    #[error("parameter search exhausted after {0} attempts")]
    SearchExhausted(usize),
    #[error("inputs belong to different groups")]
    BackendMismatch,
    #[error("inversion of zero or of a non-unit")]
    NotInvertible,
    #[error("malformed encoding: {0}")]
    Malformed(&'static str),
    #[error("non-canonical encoding: {0}")]
    NonCanonical(&'static str),
    #[error("element is not in the group")]
    NotInGroup,
    #[error("share list is empty")]
    EmptyShares,
    #[error("blinding factor must be nonzero")]
    ZeroBlinding,
    #[error("inputs do not collide")]
    NotACollision,
    #[error("k must equal k' when l = l'; nothing to extract")]
    DegenerateCollision,
    #[error("ciphertext failed authentication")]
    AuthenticationFailed,
    #[error("plaintext longer than {0} bytes")]
    PlaintextTooLong(usize),
    #[error("protocol failure: {0}")]
    Protocol(ErrorCode),
    #[error("message belongs to a different session")]
    WrongSession,
    #[error("participant count must be at least 1")]
    NoParticipants,
    #[error("invalid session state: {0}")]
    InvalidState(&'static str),
    #[error("evaluation points must be nonzero and pairwise distinct")]
    DegeneratePoints,
    #[error("no quotient stored for pair starting at index {0}")]
    MissingQuotient(u16),
    #[error("multiply message received out of order")]
    OutOfOrder,
    #[error("multiply values must be nonzero")]
    ZeroValue,
    #[error("polynomial degree {degree} exceeds evaluator limit {limit}")]
    UnsupportedDegree { degree: usize, limit: usize },
    #[error("threshold must satisfy 1 < k <= n (k = {k}, n = {n})")]
    InvalidThreshold { k: usize, n: usize },
    #[error("invalid participant subset: {0}")]
    InvalidSubset(&'static str),
    #[error("threshold hashing requires a prime-order group (SUBGROUP or EC)")]
    PrimitiveMode,
    #[error("unknown destination {0}")]
    UnknownDestination(String),
    #[error("fault plan targets ordinal {0}, trace has {1} messages")]
    FaultOutOfRange(usize, usize),
    #[error("peer uses a different parameter set")]
    ParamsMismatch,
    #[error("all sample points share the same N; fit is singular")]
    SingularFit,
    #[error("benchmark aborted: {0}")]
    Bench(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
