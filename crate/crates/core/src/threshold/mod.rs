// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

//! k-of-n hashing: Shamir shares of `(s_0, t_0)` stand in for per-participant
//! keys, and the server derives Lagrange coefficients from blinded quotients.
//!
//! All arithmetic is over the exponent field, so the group must have prime
//! order (SUBGROUP mode or an elliptic curve).

pub mod evaluator;
pub mod multiply;
pub mod quotient;
pub mod session;
pub mod shamir;

pub use evaluator::{EncryptedScalar, HomomorphicEvaluator, SealedEvaluator};
pub use multiply::{run_local, MultiplyOutput, MultiplyRole, MultiplySession};
pub use quotient::{lagrange_from_quotients, QuotientTable};
pub use session::{threshold_session, ThresholdCluster, ThresholdParticipant, ThresholdRun, ThresholdServer};
pub use shamir::{lagrange_at_zero, reconstruct, Polynomial};
