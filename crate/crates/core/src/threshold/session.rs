// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

//! k-of-n hashing session.
//!
//! Setup, once per participant set:
//! 1. The server deals `(s_0, t_0)` with random polynomials `f`, `g`.
//! 2. Each participant sends `Enc_i(x_i)` and gets back `Enc_i(f(x_i))`,
//!    `Enc_i(g(x_i))` from the evaluator.
//! 3. Each consecutive pair runs Multiply on `(x_i^{-1}, x_{i+1})`, leaving
//!    the server with the quotient table.
//!
//! Each hashing run:
//! 4. The owner sends a request. The server picks a k-subset containing the
//!    owner and sends each member a nonce.
//! 5. The server sends each member its Lagrange coefficient.
//! 6. Members answer with `h(f(x_i)·ℓ_i, g(x_i)·ℓ_i) ‖ Enc_S(nonce)`; the
//!    owner adds `m` to the first exponent.
//! 7. The server checks the echoes and stores `a^{m+s_0}·b^{t_0}`.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{CryptoRng, RngCore};

use super::evaluator::{decrypt_scalar, encrypt_scalar, EncryptedScalar, HomomorphicEvaluator, SealedEvaluator};
use super::multiply::{MultiplyOutput, MultiplySession};
use super::quotient::QuotientTable;
use super::shamir::Polynomial;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams, ModpMode, Scalar, ScalarField};
use crate::hash::{cvhp, OwnerVariant};
use crate::pke::KeyPair;
use crate::protocol::basic::{encode_share_payload, seal_echo, NonceLedger, Phase};
use crate::protocol::{ErrorCode, Frame, MsgType, Outgoing, PartyId, SessionId, NONCE_LEN};

fn check_threshold(params: &GroupParams, k: u16, n: u16) -> Result<()> {
    if params.mode() == Some(ModpMode::Primitive) {
        return Err(Error::PrimitiveMode);
    }
    if k < 2 || k > n {
        return Err(Error::InvalidThreshold { k: k.into(), n: n.into() });
    }
    Ok(())
}

fn scalar_frame(field: &ScalarField, ty: MsgType, session: SessionId, from: PartyId, v: &Scalar) -> Frame {
    Frame::new(ty, session, from, field.encode(v))
}

fn encode_pair(a: &EncryptedScalar, b: &EncryptedScalar) -> Vec<u8> {
    let mut out = Vec::with_capacity(2 + a.0.len() + b.0.len());
    out.extend_from_slice(&(a.0.len() as u16).to_be_bytes());
    out.extend_from_slice(&a.0);
    out.extend_from_slice(&b.0);
    out
}

fn decode_pair(bytes: &[u8]) -> Result<(EncryptedScalar, EncryptedScalar)> {
    if bytes.len() < 2 {
        return Err(Error::Malformed("truncated share pair"));
    }
    let len = u16::from_be_bytes([bytes[0], bytes[1]]) as usize;
    if bytes.len() < 2 + len {
        return Err(Error::Malformed("truncated share pair"));
    }
    Ok((
        EncryptedScalar(bytes[2..2 + len].to_vec()),
        EncryptedScalar(bytes[2 + len..].to_vec()),
    ))
}

/// One hashing run on the server side.
#[derive(Debug)]
struct ServerRun {
    session: SessionId,
    subset: Vec<u16>,
    ledger: NonceLedger,
    phase: Phase,
}

/// Server side: dealer, quotient collector and share verifier.
pub struct ThresholdServer<E: HomomorphicEvaluator = SealedEvaluator> {
    params: Arc<GroupParams>,
    keypair: KeyPair,
    k: u16,
    n: u16,
    f: Polynomial,
    g: Polynomial,
    evaluator: E,
    setup: SessionId,
    served: Vec<bool>,
    multiply: BTreeMap<u16, MultiplySession>,
    table: QuotientTable,
    next_subset: Option<Vec<u16>>,
    run: Option<ServerRun>,
    digest: Option<GroupElement>,
}

impl<E: HomomorphicEvaluator> std::fmt::Debug for ThresholdServer<E> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ThresholdServer")
            .field("k", &self.k)
            .field("n", &self.n)
            .field("quotients", &self.table.len())
            .field("run", &self.run)
            .finish_non_exhaustive()
    }
}

impl<E: HomomorphicEvaluator> ThresholdServer<E> {
    /// Deal `(s_0, t_0)` for a `k`-of-`n` set.
    pub fn new<R: RngCore + CryptoRng + ?Sized>(
        params: Arc<GroupParams>,
        secrets: (Scalar, Scalar),
        k: u16,
        n: u16,
        keypair: KeyPair,
        evaluator: E,
        rng: &mut R,
    ) -> Result<Self> {
        check_threshold(&params, k, n)?;
        if evaluator.max_degree() < k as usize - 1 {
            return Err(Error::UnsupportedDegree {
                degree: k as usize - 1,
                limit: evaluator.max_degree(),
            });
        }
        let field = params.scalars().clone();
        let f = Polynomial::random(&field, secrets.0, k as usize, rng);
        let g = Polynomial::random(&field, secrets.1, k as usize, rng);
        Ok(Self {
            params,
            keypair,
            k,
            n,
            f,
            g,
            evaluator,
            setup: SessionId::random(rng),
            served: vec![false; n as usize],
            multiply: BTreeMap::new(),
            table: QuotientTable::new(),
            next_subset: None,
            run: None,
            digest: None,
        })
    }

    pub fn setup_session(&self) -> SessionId {
        self.setup
    }

    pub fn public_key(&self) -> &GroupElement {
        self.keypair.public()
    }

    pub fn threshold(&self) -> (u16, u16) {
        (self.k, self.n)
    }

    pub fn quotients(&self) -> &QuotientTable {
        &self.table
    }

    pub fn evaluator_mut(&mut self) -> &mut E {
        &mut self.evaluator
    }

    pub fn is_setup_complete(&self) -> bool {
        self.served.iter().all(|&s| s) && self.table.len() == self.n as usize - 1
    }

    /// Phase of the current run, if any.
    pub fn phase(&self) -> Option<Phase> {
        self.run.as_ref().map(|r| r.phase)
    }

    pub fn run_session(&self) -> Option<SessionId> {
        self.run.as_ref().map(|r| r.session)
    }

    pub fn subset(&self) -> Option<&[u16]> {
        self.run.as_ref().map(|r| r.subset.as_slice())
    }

    pub fn digest(&self) -> Option<&GroupElement> {
        self.digest.as_ref()
    }

    /// Use `subset` for the next run instead of sampling one.
    pub fn choose_subset(&mut self, subset: Vec<u16>) -> Result<()> {
        self.check_subset(&subset, None)?;
        self.next_subset = Some(subset);
        Ok(())
    }

    fn check_subset(&self, subset: &[u16], owner: Option<u16>) -> Result<()> {
        if subset.len() != self.k as usize {
            return Err(Error::InvalidSubset("subset size must equal k"));
        }
        if subset.iter().any(|&i| i == 0 || i > self.n) {
            return Err(Error::InvalidSubset("index out of range"));
        }
        for (pos, i) in subset.iter().enumerate() {
            if subset[pos + 1..].contains(i) {
                return Err(Error::InvalidSubset("repeated index"));
            }
        }
        if owner.is_some_and(|o| !subset.contains(&o)) {
            return Err(Error::InvalidSubset("owner not in subset"));
        }
        Ok(())
    }

    /// Step 3: ask every consecutive pair to run Multiply.
    pub fn start_quotients<R: RngCore + ?Sized>(&mut self, rng: &mut R) -> Result<Vec<Outgoing>> {
        let field = self.params.scalars().clone();
        let mut out = Vec::new();
        for i in 1..self.n {
            let r_s = field.random_nonzero(rng);
            self.multiply.insert(i, MultiplySession::server(&field, r_s)?);
            out.push(Outgoing {
                to: PartyId::Participant(i),
                frame: Frame::new(MsgType::MulInit, self.setup, PartyId::Server, i.to_be_bytes().to_vec()),
            });
        }
        Ok(out)
    }

    /// Process one frame addressed to the server.
    pub fn handle<R: RngCore + ?Sized>(&mut self, frame: &Frame, rng: &mut R) -> Result<Vec<Outgoing>> {
        match frame.msg_type {
            MsgType::ThEncPoint => self.on_enc_point(frame),
            MsgType::MulBlindXY | MsgType::MulUnblind2 => self.on_multiply(frame),
            MsgType::ThAnonReq => self.on_request(frame, rng),
            MsgType::ThShare => Ok(self.on_share(frame)),
            _ => Err(Error::Malformed("unexpected message for the server")),
        }
    }

    fn sender_index(&self, frame: &Frame) -> Result<u16> {
        match frame.sender() {
            PartyId::Participant(i) if i <= self.n => Ok(i),
            _ => Err(Error::Malformed("unknown sender")),
        }
    }

    fn on_enc_point(&mut self, frame: &Frame) -> Result<Vec<Outgoing>> {
        if frame.session != self.setup {
            return Err(Error::WrongSession);
        }
        let i = self.sender_index(frame)?;
        if self.served[i as usize - 1] {
            return Err(Error::Protocol(ErrorCode::Duplicate));
        }
        let ct = EncryptedScalar(frame.payload.clone());
        let fx = self.evaluator.evaluate(i, &ct, &self.f)?;
        let gx = self.evaluator.evaluate(i, &ct, &self.g)?;
        self.served[i as usize - 1] = true;
        Ok(vec![Outgoing {
            to: PartyId::Participant(i),
            frame: Frame::new(MsgType::ThEncShares, self.setup, PartyId::Server, encode_pair(&fx, &gx)),
        }])
    }

    fn on_multiply(&mut self, frame: &Frame) -> Result<Vec<Outgoing>> {
        if frame.session != self.setup {
            return Err(Error::WrongSession);
        }
        // Both server-bound Multiply messages come from the second party.
        let pair = self.sender_index(frame)?.checked_sub(1).filter(|&p| p >= 1);
        let pair = pair.ok_or(Error::Malformed("no Multiply pair for sender"))?;
        let field = self.params.scalars().clone();
        let value = field.decode(&frame.payload)?;
        let session = self.multiply.get_mut(&pair).ok_or(Error::OutOfOrder)?;
        let expected = if session.step() == 0 { MsgType::MulBlindXY } else { MsgType::MulUnblind2 };
        if frame.msg_type != expected {
            return Err(Error::OutOfOrder);
        }
        match session.advance(&value)? {
            MultiplyOutput::Send { value, .. } => Ok(vec![Outgoing {
                to: PartyId::Participant(pair),
                frame: scalar_frame(&field, MsgType::MulServer, self.setup, PartyId::Server, &value),
            }]),
            MultiplyOutput::Product(q) => {
                self.multiply.remove(&pair);
                self.table.insert(pair, q)?;
                Ok(Vec::new())
            }
        }
    }

    fn on_request<R: RngCore + ?Sized>(&mut self, frame: &Frame, rng: &mut R) -> Result<Vec<Outgoing>> {
        let owner = self.sender_index(frame)?;
        if !self.is_setup_complete() {
            return Err(Error::InvalidState("threshold setup incomplete"));
        }
        if self.run.as_ref().is_some_and(|r| matches!(r.phase, Phase::Issued | Phase::Collecting)) {
            return Err(Error::InvalidState("a run is already in progress"));
        }
        let subset = match self.next_subset.take() {
            Some(s) => {
                self.check_subset(&s, Some(owner))?;
                s
            }
            None => {
                let mut others: Vec<u16> = (1..=self.n).filter(|&i| i != owner).collect();
                others.shuffle(rng);
                let mut s = vec![owner];
                s.extend_from_slice(&others[..self.k as usize - 1]);
                s
            }
        };
        let field = self.params.scalars().clone();
        let session = SessionId::random(rng);
        let ledger = NonceLedger::issue(subset.len(), rng);
        let mut out = Vec::with_capacity(2 * subset.len());
        for (slot, &i) in subset.iter().enumerate() {
            let ell = self.table.lagrange(&field, &subset, i)?;
            out.push(Outgoing {
                to: PartyId::Participant(i),
                frame: Frame::new(MsgType::ThNonce, session, PartyId::Server, ledger.nonce(slot).0.to_vec()),
            });
            out.push(Outgoing {
                to: PartyId::Participant(i),
                frame: scalar_frame(&field, MsgType::ThLagrange, session, PartyId::Server, &ell),
            });
        }
        self.digest = None;
        self.run = Some(ServerRun {
            session,
            subset,
            ledger,
            phase: Phase::Issued,
        });
        Ok(out)
    }

    fn broadcast(&self, frame: Frame) -> Vec<Outgoing> {
        let subset = self.run.as_ref().map(|r| r.subset.clone()).unwrap_or_default();
        subset
            .into_iter()
            .map(|i| Outgoing {
                to: PartyId::Participant(i),
                frame: frame.clone(),
            })
            .collect()
    }

    fn fail(&mut self, code: ErrorCode) -> Vec<Outgoing> {
        let Some(run) = self.run.as_mut() else {
            return Vec::new();
        };
        run.phase = Phase::Failed(code);
        let session = run.session;
        run.ledger.clear();
        self.broadcast(Frame::error(session, code))
    }

    /// Shares are verified as they arrive; the run finalizes on the last one.
    fn on_share(&mut self, frame: &Frame) -> Vec<Outgoing> {
        let Some(run) = self.run.as_mut() else {
            return Vec::new();
        };
        if !matches!(run.phase, Phase::Issued | Phase::Collecting) {
            return Vec::new();
        }
        if frame.session != run.session {
            return self.fail(ErrorCode::Malformed);
        }
        let slot = match run.subset.iter().position(|&i| i == frame.sender) {
            Some(s) => s,
            None => return self.fail(ErrorCode::Malformed),
        };
        let params = Arc::clone(&self.params);
        if let Err(code) = run.ledger.check_and_record(&params, self.keypair.secret(), slot, frame) {
            return self.fail(code);
        }
        run.phase = Phase::Collecting;
        if run.ledger.is_complete() {
            return self.finalize().unwrap_or_default();
        }
        Vec::new()
    }

    /// Store the digest, or fail with MISSING if shares are outstanding.
    /// Returns the RESULT or ERROR broadcast.
    pub fn finalize(&mut self) -> Result<Vec<Outgoing>> {
        let run = self.run.as_mut().ok_or(Error::InvalidState("no run in progress"))?;
        match run.phase {
            Phase::Failed(code) => return Err(Error::Protocol(code)),
            Phase::Done => return Err(Error::InvalidState("run already finalized")),
            Phase::Issued | Phase::Collecting => {}
        }
        if !run.ledger.is_complete() {
            let out = self.fail(ErrorCode::Missing);
            return Ok(out);
        }
        let digest = run.ledger.take_digest(&self.params)?;
        run.phase = Phase::Done;
        let session = run.session;
        let frame = Frame::new(
            MsgType::Result,
            session,
            PartyId::Server,
            self.params.encode_element(&digest)?,
        );
        self.digest = Some(digest);
        Ok(self.broadcast(frame))
    }
}

/// Per-run state on the participant side.
#[derive(Debug, Default)]
struct ParticipantRun {
    session: Option<SessionId>,
    nonce: Option<Vec<u8>>,
    lagrange: Option<Scalar>,
    responded: bool,
}

/// Participant side of setup and hashing runs.
pub struct ThresholdParticipant {
    params: Arc<GroupParams>,
    index: u16,
    keypair: KeyPair,
    server_public: GroupElement,
    setup: SessionId,
    x: Scalar,
    shares: Option<(Scalar, Scalar)>,
    first: Option<MultiplySession>,
    second: Option<MultiplySession>,
    owner: Option<(Scalar, OwnerVariant)>,
    run: ParticipantRun,
    outcome: Option<std::result::Result<GroupElement, ErrorCode>>,
}

impl std::fmt::Debug for ThresholdParticipant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ThresholdParticipant")
            .field("index", &self.index)
            .field("has_shares", &self.shares.is_some())
            .field("outcome", &self.outcome)
            .finish_non_exhaustive()
    }
}

impl ThresholdParticipant {
    /// Draws a random nonzero evaluation point.
    pub fn new<R: RngCore + CryptoRng + ?Sized>(
        params: Arc<GroupParams>,
        index: u16,
        server_public: GroupElement,
        setup: SessionId,
        rng: &mut R,
    ) -> Self {
        let x = params.scalars().random_nonzero(rng);
        let keypair = KeyPair::generate(&params, rng);
        Self {
            params,
            index,
            keypair,
            server_public,
            setup,
            x,
            shares: None,
            first: None,
            second: None,
            owner: None,
            run: ParticipantRun::default(),
            outcome: None,
        }
    }

    /// Replace the evaluation point.
    pub fn with_point(mut self, x: Scalar) -> Result<Self> {
        if x.is_zero() {
            return Err(Error::ZeroValue);
        }
        self.x = x;
        Ok(self)
    }

    pub fn index(&self) -> u16 {
        self.index
    }

    pub fn point(&self) -> &Scalar {
        &self.x
    }

    /// The key the sealed evaluator needs to act for this participant.
    pub fn keypair(&self) -> &KeyPair {
        &self.keypair
    }

    /// `(f(x_i), g(x_i))` once received.
    pub fn dealt_shares(&self) -> Option<&(Scalar, Scalar)> {
        self.shares.as_ref()
    }

    pub fn outcome(&self) -> Option<&std::result::Result<GroupElement, ErrorCode>> {
        self.outcome.as_ref()
    }

    fn me(&self) -> PartyId {
        PartyId::Participant(self.index)
    }

    /// Step 2: `Enc_i(x_i)` for the server.
    pub fn enc_point<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> Result<Frame> {
        let ct = encrypt_scalar(&self.params, &self.keypair, &self.x, rng)?;
        Ok(Frame::new(MsgType::ThEncPoint, self.setup, self.me(), ct.0))
    }

    /// Step 4: ask the server to hash `m` with this participant as owner.
    pub fn request(&mut self, m: Scalar, variant: OwnerVariant) -> Result<Frame> {
        variant.shifts(&self.params, &m)?;
        self.owner = Some((m, variant));
        self.run = ParticipantRun::default();
        self.outcome = None;
        Ok(Frame::new(MsgType::ThAnonReq, SessionId::default(), self.me(), Vec::new()))
    }

    fn mul_send(&self, ty: MsgType, to: PartyId, v: &Scalar) -> Outgoing {
        Outgoing {
            to,
            frame: scalar_frame(self.params.scalars(), ty, self.setup, self.me(), v),
        }
    }

    fn expect_value(out: MultiplyOutput) -> Result<Scalar> {
        match out {
            MultiplyOutput::Send { value, .. } => Ok(value),
            MultiplyOutput::Product(_) => Err(Error::OutOfOrder),
        }
    }

    /// Process one frame addressed to this participant.
    pub fn handle<R: RngCore + CryptoRng + ?Sized>(&mut self, frame: &Frame, rng: &mut R) -> Result<Vec<Outgoing>> {
        let field = self.params.scalars().clone();
        match frame.msg_type {
            MsgType::ThEncShares => {
                self.check_setup(frame, true)?;
                let (f_ct, g_ct) = decode_pair(&frame.payload)?;
                let fx = decrypt_scalar(&self.params, &self.keypair, &f_ct)?;
                let gx = decrypt_scalar(&self.params, &self.keypair, &g_ct)?;
                self.shares = Some((fx, gx));
                self.try_share(rng)
            }
            MsgType::MulInit => {
                self.check_setup(frame, true)?;
                if frame.payload != self.index.to_be_bytes() {
                    return Err(Error::Malformed("Multiply pair does not start here"));
                }
                let mut s = MultiplySession::first(&field, field.inv(&self.x)?, field.random_nonzero(rng))?;
                let v = Self::expect_value(s.start()?)?;
                self.first = Some(s);
                Ok(vec![self.mul_send(MsgType::MulBlindX, PartyId::Participant(self.index + 1), &v)])
            }
            MsgType::MulBlindX => {
                self.check_setup(frame, false)?;
                if frame.sender.checked_add(1) != Some(self.index) || self.second.is_some() {
                    return Err(Error::OutOfOrder);
                }
                let mut s = MultiplySession::second(&field, self.x.clone(), field.random_nonzero(rng))?;
                let v = Self::expect_value(s.advance(&field.decode(&frame.payload)?)?)?;
                self.second = Some(s);
                Ok(vec![self.mul_send(MsgType::MulBlindXY, PartyId::Server, &v)])
            }
            MsgType::MulServer => {
                self.check_setup(frame, true)?;
                let s = self.first.as_mut().ok_or(Error::OutOfOrder)?;
                let v = Self::expect_value(s.advance(&field.decode(&frame.payload)?)?)?;
                Ok(vec![self.mul_send(MsgType::MulUnblind1, PartyId::Participant(self.index + 1), &v)])
            }
            MsgType::MulUnblind1 => {
                self.check_setup(frame, false)?;
                if frame.sender.checked_add(1) != Some(self.index) {
                    return Err(Error::OutOfOrder);
                }
                let s = self.second.as_mut().ok_or(Error::OutOfOrder)?;
                let v = Self::expect_value(s.advance(&field.decode(&frame.payload)?)?)?;
                Ok(vec![self.mul_send(MsgType::MulUnblind2, PartyId::Server, &v)])
            }
            MsgType::ThNonce => {
                self.join_run(frame)?;
                if frame.payload.len() != NONCE_LEN {
                    return Err(Error::Malformed("nonce has wrong length"));
                }
                self.run.nonce = Some(frame.payload.clone());
                self.try_share(rng)
            }
            MsgType::ThLagrange => {
                self.join_run(frame)?;
                self.run.lagrange = Some(field.decode(&frame.payload)?);
                self.try_share(rng)
            }
            MsgType::Result | MsgType::Error => {
                if self.run.session != Some(frame.session) {
                    return Err(Error::WrongSession);
                }
                self.outcome = Some(if frame.msg_type == MsgType::Result {
                    Ok(self.params.decode_element(&frame.payload)?)
                } else {
                    Err(frame.error_code().ok_or(Error::Malformed("unknown error code"))?)
                });
                self.owner = None;
                Ok(Vec::new())
            }
            _ => Err(Error::Malformed("unexpected message for a participant")),
        }
    }

    fn check_setup(&self, frame: &Frame, from_server: bool) -> Result<()> {
        if frame.session != self.setup {
            return Err(Error::WrongSession);
        }
        if from_server != (frame.sender == 0) {
            return Err(Error::Malformed("unexpected sender"));
        }
        Ok(())
    }

    fn join_run(&mut self, frame: &Frame) -> Result<()> {
        if frame.sender != 0 {
            return Err(Error::Malformed("unexpected sender"));
        }
        if self.run.session.is_some_and(|s| s != frame.session) {
            self.run = ParticipantRun::default();
            self.outcome = None;
        }
        self.run.session = Some(frame.session);
        Ok(())
    }

    /// Steps 6 and 7, once nonce, coefficient and dealt shares are all here.
    fn try_share<R: RngCore + CryptoRng + ?Sized>(&mut self, rng: &mut R) -> Result<Vec<Outgoing>> {
        let (Some(session), Some(nonce), Some(ell), Some((fx, gx))) =
            (self.run.session, &self.run.nonce, &self.run.lagrange, &self.shares)
        else {
            return Ok(Vec::new());
        };
        if self.run.responded {
            return Ok(Vec::new());
        }
        let field = self.params.scalars();
        let mut ex = field.mul(fx, ell);
        let mut ey = field.mul(gx, ell);
        if let Some((m, variant)) = &self.owner {
            let (dx, dy) = variant.shifts(&self.params, m)?;
            ex = field.add(&ex, &dx);
            ey = field.add(&ey, &dy);
        }
        let share = cvhp(&self.params, &ex, &ey)?;
        let echo = seal_echo(&self.params, &self.server_public, session, self.index, &share, nonce, rng)?;
        let payload = encode_share_payload(&self.params, &share, &echo)?;
        self.run.responded = true;
        Ok(vec![Outgoing {
            to: PartyId::Server,
            frame: Frame::new(MsgType::ThShare, session, self.me(), payload),
        }])
    }
}

/// Inputs for [`threshold_session`].
#[derive(Debug, Clone)]
pub struct ThresholdRun {
    pub k: u16,
    pub n: u16,
    pub owner: u16,
    pub m: Scalar,
    pub variant: OwnerVariant,
    /// Fixed subset; sampled by the server when `None`.
    pub subset: Option<Vec<u16>>,
}

impl ThresholdRun {
    pub fn new(k: u16, n: u16, owner: u16, m: Scalar) -> Self {
        Self {
            k,
            n,
            owner,
            m,
            variant: OwnerVariant::Plain,
            subset: None,
        }
    }

    pub fn with_subset(mut self, subset: Vec<u16>) -> Self {
        self.subset = Some(subset);
        self
    }
}

/// In-process threshold deployment: one server and `n` participants.
pub struct ThresholdCluster {
    pub server: ThresholdServer<SealedEvaluator>,
    pub participants: Vec<ThresholdParticipant>,
}

impl std::fmt::Debug for ThresholdCluster {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ThresholdCluster")
            .field("server", &self.server)
            .field("participants", &self.participants.len())
            .finish()
    }
}

impl ThresholdCluster {
    /// Deal secrets and run setup to completion.
    pub fn setup<R: RngCore + CryptoRng + ?Sized>(
        params: Arc<GroupParams>,
        secrets: (Scalar, Scalar),
        k: u16,
        n: u16,
        rng: &mut R,
    ) -> Result<Self> {
        check_threshold(&params, k, n)?;
        let keypair = KeyPair::generate(&params, rng);
        let evaluator = SealedEvaluator::new(Arc::clone(&params), k as usize - 1, rng.next_u64());
        let mut server = ThresholdServer::new(Arc::clone(&params), secrets, k, n, keypair, evaluator, rng)?;
        // Evaluation points must be pairwise distinct; resample on collision.
        let mut participants: Vec<ThresholdParticipant> = Vec::with_capacity(n as usize);
        for i in 1..=n {
            let mut p =
                ThresholdParticipant::new(Arc::clone(&params), i, server.public_key().clone(), server.setup_session(), rng);
            while participants.iter().any(|q| q.point() == p.point()) {
                let x = params.scalars().random_nonzero(rng);
                p = p.with_point(x)?;
            }
            participants.push(p);
        }
        for p in &participants {
            server.evaluator_mut().seal_key(p.index(), p.keypair().clone());
        }
        let mut cluster = Self { server, participants };
        let mut queue: VecDeque<Outgoing> = VecDeque::new();
        for p in &cluster.participants {
            queue.push_back(Outgoing {
                to: PartyId::Server,
                frame: p.enc_point(rng)?,
            });
        }
        queue.extend(cluster.server.start_quotients(rng)?);
        cluster.pump(queue, rng)?;
        if !cluster.server.is_setup_complete() {
            return Err(Error::InvalidState("threshold setup did not complete"));
        }
        Ok(cluster)
    }

    /// Deliver frames in FIFO order until quiet.
    pub fn pump<R: RngCore + CryptoRng + ?Sized>(&mut self, mut queue: VecDeque<Outgoing>, rng: &mut R) -> Result<()> {
        while let Some(msg) = queue.pop_front() {
            let out = match msg.to {
                PartyId::Server => self.server.handle(&msg.frame, rng)?,
                PartyId::Participant(i) => self
                    .participants
                    .get_mut(i as usize - 1)
                    .ok_or_else(|| Error::UnknownDestination(msg.to.to_string()))?
                    .handle(&msg.frame, rng)?,
            };
            queue.extend(out);
        }
        Ok(())
    }

    /// One hashing run; returns the stored digest.
    pub fn hash<R: RngCore + CryptoRng + ?Sized>(
        &mut self,
        owner: u16,
        m: Scalar,
        variant: OwnerVariant,
        subset: Option<Vec<u16>>,
        rng: &mut R,
    ) -> Result<GroupElement> {
        if let Some(s) = subset {
            self.server.choose_subset(s)?;
        }
        let p = self
            .participants
            .get_mut((owner as usize).wrapping_sub(1))
            .ok_or(Error::InvalidSubset("owner out of range"))?;
        let req = p.request(m, variant)?;
        self.pump(
            VecDeque::from([Outgoing {
                to: PartyId::Server,
                frame: req,
            }]),
            rng,
        )?;
        if matches!(self.server.phase(), Some(Phase::Issued | Phase::Collecting)) {
            let out = self.server.finalize()?;
            self.pump(out.into(), rng)?;
        }
        match self.server.phase() {
            Some(Phase::Done) => Ok(self.server.digest().cloned().expect("digest after done")),
            Some(Phase::Failed(code)) => Err(Error::Protocol(code)),
            _ => Err(Error::InvalidState("run did not start")),
        }
    }
}

/// Set up a `k`-of-`n` deployment and hash `m` once.
pub fn threshold_session<R: RngCore + CryptoRng + ?Sized>(
    params: Arc<GroupParams>,
    secrets: (Scalar, Scalar),
    run: &ThresholdRun,
    rng: &mut R,
) -> Result<GroupElement> {
    let mut cluster = ThresholdCluster::setup(params, secrets, run.k, run.n, rng)?;
    cluster.hash(run.owner, run.m.clone(), run.variant.clone(), run.subset.clone(), rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupParams;
    use crate::hash::reference_digest_with;
    use num_bigint::BigUint;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn toy() -> Arc<GroupParams> {
        Arc::new(GroupParams::toy_subgroup())
    }

    #[test]
    fn toy_digest_is_4() {
        let params = toy();
        let f = params.scalars().clone();
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let run = ThresholdRun::new(2, 3, 1, f.from_u64(4));
        let d = threshold_session(Arc::clone(&params), (f.from_u64(5), f.from_u64(6)), &run, &mut rng).unwrap();
        assert_eq!(d, GroupElement::Modp(BigUint::from(4u32)));
    }

    #[test]
    fn every_subset_agrees() {
        let params = toy();
        let f = params.scalars().clone();
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let mut cluster = ThresholdCluster::setup(Arc::clone(&params), (f.from_u64(5), f.from_u64(6)), 3, 5, &mut rng).unwrap();
        let expected = cvhp(&params, &f.from_u64(9), &f.from_u64(6)).unwrap();
        for a in 1..=5u16 {
            for b in a + 1..=5 {
                for c in b + 1..=5 {
                    let d = cluster
                        .hash(a, f.from_u64(4), OwnerVariant::Plain, Some(vec![a, b, c]), &mut rng)
                        .unwrap();
                    assert_eq!(d, expected, "subset {a},{b},{c}");
                }
            }
        }
    }

    #[test]
    fn ec_backend_and_variants() {
        let params = Arc::new(GroupParams::toy_ec());
        let f = params.scalars().clone();
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        let secrets = (f.from_u64(3), f.from_u64(7));
        let mut cluster = ThresholdCluster::setup(Arc::clone(&params), secrets.clone(), 2, 4, &mut rng).unwrap();
        let m = f.from_u64(2);
        let plain = cluster.hash(3, m.clone(), OwnerVariant::Plain, None, &mut rng).unwrap();
        assert_eq!(plain, cvhp(&params, &f.add(&m, &secrets.0), &secrets.1).unwrap());
        let variant = OwnerVariant::Dual(f.from_u64(5));
        let dual = cluster.hash(2, m.clone(), variant.clone(), None, &mut rng).unwrap();
        let keys = [crate::hash::ParticipantKeys::new(secrets.0.clone(), secrets.1.clone())];
        assert_eq!(dual, reference_digest_with(&params, &m, &variant, &keys).unwrap());
    }

    #[test]
    fn rejects_bad_configuration() {
        let mut rng = ChaCha20Rng::seed_from_u64(14);
        let prim = Arc::new(GroupParams::toy_primitive());
        let f = prim.scalars().clone();
        let run = ThresholdRun::new(2, 3, 1, f.from_u64(1));
        assert!(matches!(
            threshold_session(prim, (f.one(), f.one()), &run, &mut rng),
            Err(Error::PrimitiveMode)
        ));
        let params = toy();
        let f = params.scalars().clone();
        for (k, n) in [(1, 3), (4, 3)] {
            let run = ThresholdRun::new(k, n, 1, f.one());
            assert!(matches!(
                threshold_session(Arc::clone(&params), (f.one(), f.one()), &run, &mut rng),
                Err(Error::InvalidThreshold { .. })
            ));
        }
        let run = ThresholdRun::new(2, 3, 1, f.one()).with_subset(vec![1, 2, 3]);
        assert!(matches!(
            threshold_session(Arc::clone(&params), (f.one(), f.one()), &run, &mut rng),
            Err(Error::InvalidSubset(_))
        ));
        let run = ThresholdRun::new(2, 3, 1, f.one()).with_subset(vec![2, 3]);
        assert!(matches!(
            threshold_session(params, (f.one(), f.one()), &run, &mut rng),
            Err(Error::InvalidSubset(_))
        ));
    }

    #[test]
    fn quotient_table_matches_points() {
        let params = toy();
        let f = params.scalars().clone();
        let mut rng = ChaCha20Rng::seed_from_u64(15);
        let cluster = ThresholdCluster::setup(Arc::clone(&params), (f.one(), f.one()), 2, 4, &mut rng).unwrap();
        let xs: Vec<Scalar> = cluster.participants.iter().map(|p| p.point().clone()).collect();
        assert_eq!(cluster.server.quotients(), &QuotientTable::from_points(&f, &xs).unwrap());
        for p in &cluster.participants {
            let (fx, _) = p.dealt_shares().unwrap();
            assert_eq!(fx, &cluster.server.f.eval(&f, p.point()));
        }
    }

    #[test]
    fn tampered_share_fails_run() {
        let params = toy();
        let f = params.scalars().clone();
        let mut rng = ChaCha20Rng::seed_from_u64(16);
        let mut cluster = ThresholdCluster::setup(Arc::clone(&params), (f.one(), f.one()), 2, 3, &mut rng).unwrap();
        cluster.server.choose_subset(vec![1, 2]).unwrap();
        let req = cluster.participants[0].request(f.from_u64(3), OwnerVariant::Plain).unwrap();
        let issued = cluster.server.handle(&req, &mut rng).unwrap();
        let mut shares = Vec::new();
        for o in issued {
            let PartyId::Participant(i) = o.to else { unreachable!() };
            shares.extend(cluster.participants[i as usize - 1].handle(&o.frame, &mut rng).unwrap());
        }
        assert_eq!(shares.len(), 2);
        let mut bad = shares[1].frame.clone();
        let last = bad.payload.len() - 1;
        bad.payload[last] ^= 1;
        assert!(cluster.server.handle(&shares[0].frame, &mut rng).unwrap().is_empty());
        let out = cluster.server.handle(&bad, &mut rng).unwrap();
        assert_eq!(cluster.server.phase(), Some(Phase::Failed(ErrorCode::DecryptFail)));
        assert!(out.iter().all(|o| o.frame.error_code() == Some(ErrorCode::DecryptFail)));
        assert!(cluster.server.digest().is_none());
    }
}
