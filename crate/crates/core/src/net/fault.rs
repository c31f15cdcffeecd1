// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

//! Fault plans: per-ordinal frame mutations.

use std::sync::Arc;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::Envelope;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams};
use crate::protocol::basic::{decode_share_payload, encode_share_payload, seal_echo, Nonce};
use crate::protocol::{Frame, MsgType, NONCE_LEN};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// XOR the byte at this offset of the encoded frame with 0xFF.
    FlipByte(usize),
    /// Swap the nonce for a fresh random one. On NONCE frames the payload is
    /// replaced; on SHARE frames the echo is re-sealed, so the share still
    /// decrypts and only the nonce check can catch it.
    ReplaceNonce,
    Drop,
    Duplicate,
    /// Jump ahead of frames already queued on the same link.
    Reorder,
}

/// What [`Mutation::ReplaceNonce`] needs to forge a well-formed echo.
#[derive(Debug, Clone)]
pub struct FaultContext {
    pub params: Arc<GroupParams>,
    pub server_public: GroupElement,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FaultPlan {
    faults: Vec<(usize, Mutation)>,
}

impl FaultPlan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, ordinal: usize, mutation: Mutation) -> Self {
        self.faults.push((ordinal, mutation));
        self
    }

    pub fn is_empty(&self) -> bool {
        self.faults.is_empty()
    }

    pub fn len(&self) -> usize {
        self.faults.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, Mutation)> {
        self.faults.iter()
    }

    /// Remove and return every mutation for `ordinal`, in plan order.
    pub(crate) fn take(&mut self, ordinal: usize) -> Vec<Mutation> {
        let mut out = Vec::new();
        self.faults.retain(|&(o, m)| {
            if o == ordinal {
                out.push(m);
                false
            } else {
                true
            }
        });
        out
    }
}

fn replace_nonce<R: RngCore + ?Sized>(bytes: &[u8], ctx: Option<&FaultContext>, rng: &mut R) -> Result<Vec<u8>> {
    let mut frame = Frame::decode(bytes)?;
    match frame.msg_type {
        MsgType::Nonce | MsgType::ThNonce => {
            let old = frame.payload.clone();
            while frame.payload == old {
                frame.payload = Nonce::random(rng).0.to_vec();
            }
        }
        MsgType::Share | MsgType::ThShare => {
            let ctx = ctx.ok_or(Error::InvalidState("replace-nonce needs a fault context"))?;
            let (share, _) = decode_share_payload(&ctx.params, &frame.payload)?;
            let mut nonce = [0u8; NONCE_LEN];
            rng.fill_bytes(&mut nonce);
            let mut seed = [0u8; 32];
            rng.fill_bytes(&mut seed);
            let mut crng = ChaCha20Rng::from_seed(seed);
            let echo = seal_echo(
                &ctx.params,
                &ctx.server_public,
                frame.session,
                frame.sender,
                &share,
                &nonce,
                &mut crng,
            )?;
            frame.payload = encode_share_payload(&ctx.params, &share, &echo)?;
        }
        _ => return Err(Error::Malformed("replace-nonce needs a NONCE or SHARE frame")),
    }
    Ok(frame.encode())
}

/// Apply one non-reorder mutation to every copy of a frame.
pub(crate) fn apply<R: RngCore + ?Sized>(
    m: &Mutation,
    copies: Vec<Envelope>,
    ctx: Option<&FaultContext>,
    rng: &mut R,
) -> Result<Vec<Envelope>> {
    let mut out = Vec::with_capacity(copies.len() * 2);
    for mut env in copies {
        match *m {
            Mutation::Drop => {}
            Mutation::Duplicate => {
                out.push(env.clone());
                out.push(env);
            }
            Mutation::FlipByte(offset) => {
                let len = env.bytes.len();
                let b = env.bytes.get_mut(offset).ok_or(Error::FaultOutOfRange(offset, len))?;
                *b ^= 0xFF;
                out.push(env);
            }
            Mutation::ReplaceNonce => {
                env.bytes = replace_nonce(&env.bytes, ctx, rng)?;
                out.push(env);
            }
            Mutation::Reorder => out.push(env),
        }
    }
    Ok(out)
}

/// Apply `plan` to a recorded trace. Each mutation applies exactly once; a
/// reordered envelope swaps places with its successor.
pub fn inject<R: RngCore + ?Sized>(
    plan: &FaultPlan,
    trace: &[Envelope],
    ctx: Option<&FaultContext>,
    rng: &mut R,
) -> Result<Vec<Envelope>> {
    for &(ordinal, _) in plan.iter() {
        if !trace.iter().any(|e| e.ordinal == ordinal) {
            return Err(Error::FaultOutOfRange(ordinal, trace.len()));
        }
    }
    let mut out: Vec<Envelope> = Vec::with_capacity(trace.len());
    let mut pending_swap: Option<Vec<Envelope>> = None;
    for env in trace {
        let mutations: Vec<Mutation> =
            plan.iter().filter(|(o, _)| *o == env.ordinal).map(|&(_, m)| m).collect();
        let mut copies = vec![env.clone()];
        for m in &mutations {
            copies = apply(m, copies, ctx, rng)?;
        }
        let reorder = mutations.contains(&Mutation::Reorder);
        if let Some(held) = pending_swap.take() {
            out.extend(copies);
            out.extend(held);
        } else if reorder {
            pending_swap = Some(copies);
        } else {
            out.extend(copies);
        }
    }
    if let Some(held) = pending_swap {
        out.extend(held);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::PartyId;

    fn env(ordinal: usize, byte: u8) -> Envelope {
        Envelope {
            ordinal,
            from: PartyId::Server,
            to: PartyId::Participant(1),
            bytes: vec![byte; 4],
        }
    }

    #[test]
    fn inject_mutations() {
        let trace: Vec<_> = (0..4).map(|i| env(i, i as u8)).collect();
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let plan = FaultPlan::new()
            .with(0, Mutation::Drop)
            .with(1, Mutation::Reorder)
            .with(2, Mutation::FlipByte(3))
            .with(3, Mutation::Duplicate);
        let out = inject(&plan, &trace, None, &mut rng).unwrap();
        let ords: Vec<_> = out.iter().map(|e| e.ordinal).collect();
        assert_eq!(ords, vec![2, 1, 3, 3]);
        assert_eq!(out[0].bytes, vec![2, 2, 2, 0xFD]);
    }

    #[test]
    fn out_of_range() {
        let trace = vec![env(0, 0)];
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let plan = FaultPlan::new().with(5, Mutation::Drop);
        assert!(matches!(inject(&plan, &trace, None, &mut rng), Err(Error::FaultOutOfRange(5, 1))));
        let plan = FaultPlan::new().with(0, Mutation::FlipByte(9));
        assert!(matches!(inject(&plan, &trace, None, &mut rng), Err(Error::FaultOutOfRange(9, 4))));
    }
}
