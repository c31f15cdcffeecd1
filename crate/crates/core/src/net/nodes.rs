// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

//! Router nodes for the basic protocol.

use std::any::Any;
use std::sync::Arc;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::{FaultContext, FaultPlan, Node, RouteReport, Router};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams, Scalar};
use crate::hash::{OwnerVariant, ParticipantKeys};
use crate::pke::KeyPair;
use crate::protocol::basic::{ParticipantSession, Phase, Role, ServerSession};
use crate::protocol::{ErrorCode, Frame, MsgType, Outgoing, PartyId};

/// Server for one basic session. The session starts on the first upload
/// request and is finalized when the router goes idle.
#[derive(Debug)]
pub struct ServerNode {
    params: Arc<GroupParams>,
    keypair: KeyPair,
    n: u16,
    rng: ChaCha20Rng,
    session: Option<ServerSession>,
    announced: bool,
}

impl ServerNode {
    pub fn new(params: Arc<GroupParams>, keypair: KeyPair, n: u16, seed: u64) -> Self {
        Self {
            params,
            keypair,
            n,
            rng: ChaCha20Rng::seed_from_u64(seed),
            session: None,
            announced: false,
        }
    }

    pub fn session(&self) -> Option<&ServerSession> {
        self.session.as_ref()
    }

    pub fn phase(&self) -> Option<Phase> {
        self.session.as_ref().map(ServerSession::phase)
    }

    pub fn digest(&self) -> Option<&GroupElement> {
        self.session.as_ref().and_then(ServerSession::digest)
    }

    /// Whether the outcome has been broadcast.
    pub fn is_settled(&self) -> bool {
        self.announced
    }

    fn announce(&mut self) -> Vec<Outgoing> {
        let Some(s) = &self.session else {
            return Vec::new();
        };
        if self.announced || !matches!(s.phase(), Phase::Done | Phase::Failed(_)) {
            return Vec::new();
        }
        self.announced = true;
        s.outcome_frames()
    }

    fn abort(&mut self, code: ErrorCode) -> Vec<Outgoing> {
        if let Some(s) = self.session.as_mut() {
            s.abort(code);
        }
        self.announce()
    }

    fn is_active(&self) -> bool {
        self.phase().is_some_and(|p| matches!(p, Phase::Issued | Phase::Collecting))
    }
}

impl Node for ServerNode {
    fn id(&self) -> PartyId {
        PartyId::Server
    }

    fn on_frame(&mut self, from: PartyId, bytes: &[u8]) -> Vec<Outgoing> {
        let frame = match Frame::decode(bytes) {
            Ok(f) if f.sender() == from => f,
            _ => return self.abort(ErrorCode::Malformed),
        };
        match frame.msg_type {
            MsgType::UploadReq if self.session.is_none() => {
                match ServerSession::begin(Arc::clone(&self.params), self.n, self.keypair.clone(), &mut self.rng) {
                    Ok((s, out)) => {
                        self.session = Some(s);
                        out
                    }
                    Err(_) => Vec::new(),
                }
            }
            MsgType::UploadReq => Vec::new(),
            MsgType::Share if self.is_active() => {
                let s = self.session.as_mut().expect("active session");
                let _ = s.absorb(&frame);
                self.announce()
            }
            MsgType::Share => Vec::new(),
            _ => self.abort(ErrorCode::Malformed),
        }
    }

    fn on_idle(&mut self) -> Vec<Outgoing> {
        if self.is_active() {
            let s = self.session.as_mut().expect("active session");
            let _ = s.finalize();
        }
        self.announce()
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// Participant for one basic session.
#[derive(Debug)]
pub struct ParticipantNode {
    session: ParticipantSession,
    rng: ChaCha20Rng,
}

impl ParticipantNode {
    pub fn new(session: ParticipantSession, seed: u64) -> Self {
        Self {
            session,
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn session(&self) -> &ParticipantSession {
        &self.session
    }

    pub fn outcome(&self) -> Option<&std::result::Result<GroupElement, ErrorCode>> {
        self.session.outcome()
    }

    /// The owner's upload request; `None` for members.
    pub fn kickoff(&self) -> Option<Outgoing> {
        self.session.upload_request().ok().map(|frame| Outgoing {
            to: PartyId::Server,
            frame,
        })
    }
}

impl Node for ParticipantNode {
    fn id(&self) -> PartyId {
        PartyId::Participant(self.session.index())
    }

    fn on_frame(&mut self, from: PartyId, bytes: &[u8]) -> Vec<Outgoing> {
        let Ok(frame) = Frame::decode(bytes) else {
            return Vec::new();
        };
        if from != PartyId::Server {
            return Vec::new();
        }
        match frame.msg_type {
            MsgType::Nonce => match self.session.respond(&frame, &mut self.rng) {
                Ok(share) => vec![Outgoing {
                    to: PartyId::Server,
                    frame: share,
                }],
                Err(_) => Vec::new(),
            },
            MsgType::Result | MsgType::Error => {
                let _ = self.session.observe(&frame);
                Vec::new()
            }
            _ => Vec::new(),
        }
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// Inputs for [`run_basic_session`].
#[derive(Debug, Clone)]
pub struct BasicRun {
    pub params: Arc<GroupParams>,
    pub keys: Vec<ParticipantKeys>,
    /// 1-based index of the data owner.
    pub owner: u16,
    pub m: Scalar,
    pub variant: OwnerVariant,
    pub seed: u64,
}

impl BasicRun {
    pub fn new(params: Arc<GroupParams>, keys: Vec<ParticipantKeys>, owner: u16, m: Scalar, seed: u64) -> Self {
        Self {
            params,
            keys,
            owner,
            m,
            variant: OwnerVariant::Plain,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BasicOutcome {
    /// Server phase; `None` if no session ever started.
    pub phase: Option<Phase>,
    /// The stored digest, present only when the phase is `Done`.
    pub digest: Option<GroupElement>,
    /// What each participant was told, by index.
    pub participants: Vec<Option<std::result::Result<GroupElement, ErrorCode>>>,
    pub report: RouteReport,
}

/// One basic session over the in-process router.
pub fn run_basic_session(run: &BasicRun, plan: FaultPlan) -> Result<BasicOutcome> {
    let n = u16::try_from(run.keys.len()).map_err(|_| Error::InvalidState("too many participants"))?;
    if n == 0 {
        return Err(Error::NoParticipants);
    }
    if run.owner == 0 || run.owner > n {
        return Err(Error::InvalidState("owner index out of range"));
    }
    let mut seeds = ChaCha20Rng::seed_from_u64(run.seed);
    let server_key = KeyPair::generate(&run.params, &mut seeds);
    let context = FaultContext {
        params: Arc::clone(&run.params),
        server_public: server_key.public().clone(),
    };
    let mut router = Router::new(seeds.next_u64()).with_faults(plan, context);
    router.add(Box::new(ServerNode::new(
        Arc::clone(&run.params),
        server_key.clone(),
        n,
        seeds.next_u64(),
    )));
    let mut kickoff = None;
    for (i, keys) in run.keys.iter().enumerate() {
        let index = i as u16 + 1;
        let role = if index == run.owner {
            Role::Owner {
                m: run.m.clone(),
                variant: run.variant.clone(),
            }
        } else {
            Role::Member
        };
        let session = ParticipantSession::new(
            Arc::clone(&run.params),
            index,
            keys.clone(),
            role,
            server_key.public().clone(),
        );
        let node = ParticipantNode::new(session, seeds.next_u64());
        if index == run.owner {
            kickoff = node.kickoff();
        }
        router.add(Box::new(node));
    }
    let kickoff = kickoff.ok_or(Error::InvalidState("owner cannot upload"))?;
    let report = router.run(vec![(PartyId::Participant(run.owner), kickoff)])?;
    let server = router.node_as::<ServerNode>(PartyId::Server).expect("server node");
    let participants = (1..=n)
        .map(|i| {
            router
                .node_as::<ParticipantNode>(PartyId::Participant(i))
                .and_then(|p| p.outcome().cloned())
        })
        .collect();
    Ok(BasicOutcome {
        phase: server.phase(),
        digest: server.digest().cloned(),
        participants,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hash::reference_digest;
    use crate::net::Mutation;
    use num_bigint::BigUint;

    fn toy_run(seed: u64) -> BasicRun {
        let params = Arc::new(GroupParams::toy_subgroup());
        let f = params.scalars().clone();
        let keys = vec![
            ParticipantKeys::from_u64(&params, 2, 3),
            ParticipantKeys::from_u64(&params, 4, 6),
        ];
        BasicRun::new(params, keys, 1, f.from_u64(5), seed)
    }

    fn first(report: &RouteReport, ty: MsgType) -> usize {
        report
            .submitted
            .iter()
            .find(|e| Frame::decode(&e.bytes).unwrap().msg_type == ty)
            .unwrap()
            .ordinal
    }

    #[test]
    fn clean_run_ends_in_result() {
        let out = run_basic_session(&toy_run(1), FaultPlan::new()).unwrap();
        assert_eq!(out.phase, Some(Phase::Done));
        assert_eq!(out.digest, Some(GroupElement::Modp(BigUint::from(18u32))));
        let last = out.report.delivered.last().unwrap();
        assert_eq!(Frame::decode(&last.bytes).unwrap().msg_type, MsgType::Result);
        assert!(out.participants.iter().all(|p| p == &Some(Ok(out.digest.clone().unwrap()))));
    }

    #[test]
    fn deterministic_per_seed() {
        let a = run_basic_session(&toy_run(7), FaultPlan::new()).unwrap();
        let b = run_basic_session(&toy_run(7), FaultPlan::new()).unwrap();
        assert_eq!(a.report.delivered, b.report.delivered);
        let mut orders = std::collections::HashSet::new();
        for seed in 0..16 {
            let r = run_basic_session(&toy_run(seed), FaultPlan::new()).unwrap();
            assert_eq!(r.digest, a.digest);
            let order: Vec<_> = r.report.delivered.iter().map(|e| (e.from, e.to)).collect();
            orders.insert(order);
        }
        assert!(orders.len() > 1);
        let run = toy_run(3);
        let keys = run.keys.clone();
        assert_eq!(a.digest.unwrap(), reference_digest(&run.params, &run.m, &keys).unwrap());
    }

    #[test]
    fn faults_map_to_codes() {
        let clean = run_basic_session(&toy_run(2), FaultPlan::new()).unwrap();
        let share = first(&clean.report, MsgType::Share);
        let nonce = first(&clean.report, MsgType::Nonce);
        let cases = [
            (share, Mutation::ReplaceNonce, ErrorCode::NonceMismatch),
            (nonce, Mutation::ReplaceNonce, ErrorCode::NonceMismatch),
            (share, Mutation::Duplicate, ErrorCode::Duplicate),
            (share, Mutation::Drop, ErrorCode::Missing),
            (nonce, Mutation::Drop, ErrorCode::Missing),
        ];
        for (ordinal, m, code) in cases {
            let out = run_basic_session(&toy_run(2), FaultPlan::new().with(ordinal, m)).unwrap();
            assert_eq!(out.phase, Some(Phase::Failed(code)), "{m:?}");
            assert!(out.digest.is_none());
            assert!(out.participants.iter().all(|p| p == &Some(Err(code))));
        }
        let bytes = clean.report.submitted[share].bytes.len();
        let out = run_basic_session(&toy_run(2), FaultPlan::new().with(share, Mutation::FlipByte(bytes - 1))).unwrap();
        assert_eq!(out.phase, Some(Phase::Failed(ErrorCode::DecryptFail)));
        let out = run_basic_session(&toy_run(2), FaultPlan::new().with(share, Mutation::Reorder)).unwrap();
        assert_eq!(out.digest, clean.digest);
    }

    #[test]
    fn unreached_fault_is_reported() {
        let out = run_basic_session(&toy_run(2), FaultPlan::new().with(999, Mutation::Drop)).unwrap();
        assert_eq!(out.phase, Some(Phase::Done));
        assert_eq!(out.report.unapplied.len(), 1);
    }
}
