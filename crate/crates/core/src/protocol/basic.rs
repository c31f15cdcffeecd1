// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

//! The n-party hashing session.
//!
//! 1. On an upload request the server issues one fresh nonce per participant.
//! 2. The owner answers with `h(x + m, y) ‖ Enc_S(r)`.
//! 3. Every other participant answers with `h(x_i, y_i) ‖ Enc_S(r_i)`.
//! 4. The server checks every echoed nonce and stores the product of shares.

use std::sync::Arc;

use rand::{CryptoRng, RngCore};
use subtle::ConstantTimeEq;

use super::{ErrorCode, Frame, MsgType, Outgoing, PartyId, SessionId, NONCE_LEN};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams, Scalar};
use crate::hash::{combine_shares, member_share, owner_share, OwnerVariant, ParticipantKeys};
use crate::pke::{self, Ciphertext, KeyPair};

#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Nonce(pub [u8; NONCE_LEN]);

impl std::fmt::Debug for Nonce {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Nonce({:02x}{:02x}…)", self.0[0], self.0[1])
    }
}

impl Nonce {
    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut n = [0u8; NONCE_LEN];
        rng.fill_bytes(&mut n);
        Nonce(n)
    }
}

/// Associated data authenticated by the nonce echo: `session ‖ sender ‖ share`.
/// Binding the share to the echo means a share altered in transit fails the
/// echo check instead of producing a wrong digest.
pub fn share_binding(session: SessionId, sender: u16, share_bytes: &[u8]) -> Vec<u8> {
    let mut ad = Vec::with_capacity(18 + share_bytes.len());
    ad.extend_from_slice(&session.0);
    ad.extend_from_slice(&sender.to_be_bytes());
    ad.extend_from_slice(share_bytes);
    ad
}

/// Encrypt `nonce` for the server, bound to this share.
pub fn seal_echo<R: RngCore + CryptoRng + ?Sized>(
    params: &GroupParams,
    server_public: &GroupElement,
    session: SessionId,
    sender: u16,
    share: &GroupElement,
    nonce: &[u8],
    rng: &mut R,
) -> Result<Ciphertext> {
    let ad = share_binding(session, sender, &params.encode_element(share)?);
    pke::encrypt_with_ad(params, server_public, nonce, &ad, rng)
}

/// Share payload: `element ‖ Enc_S(nonce)`.
pub fn encode_share_payload(
    params: &GroupParams,
    share: &GroupElement,
    echo: &Ciphertext,
) -> Result<Vec<u8>> {
    let mut out = params.encode_element(share)?;
    out.extend(echo.encode(params)?);
    Ok(out)
}

pub fn decode_share_payload(params: &GroupParams, payload: &[u8]) -> Result<(GroupElement, Ciphertext)> {
    let len = params.element_len_prefix(payload)?;
    if payload.len() < len {
        return Err(Error::Malformed("truncated share"));
    }
    let share = params.decode_element(&payload[..len])?;
    let echo = Ciphertext::decode(params, &payload[len..])?;
    Ok((share, echo))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Issued,
    Collecting,
    Done,
    Failed(ErrorCode),
}

/// Shared nonce bookkeeping for the basic and threshold servers.
#[derive(Debug)]
pub(crate) struct NonceLedger {
    nonces: Vec<Nonce>,
    shares: Vec<Option<GroupElement>>,
}

impl NonceLedger {
    pub(crate) fn issue<R: RngCore + ?Sized>(count: usize, rng: &mut R) -> Self {
        let mut nonces: Vec<Nonce> = Vec::with_capacity(count);
        while nonces.len() < count {
            let n = Nonce::random(rng);
            if !nonces.contains(&n) {
                nonces.push(n);
            }
        }
        Self {
            nonces,
            shares: vec![None; count],
        }
    }

    pub(crate) fn nonce(&self, slot: usize) -> Nonce {
        self.nonces[slot]
    }

    pub(crate) fn recorded(&self) -> usize {
        self.shares.iter().filter(|s| s.is_some()).count()
    }

    pub(crate) fn is_complete(&self) -> bool {
        self.shares.iter().all(Option::is_some)
    }

    /// Verify one `share ‖ Enc(nonce)` payload for `slot` and record it.
    pub(crate) fn check_and_record(
        &mut self,
        params: &GroupParams,
        secret: &Scalar,
        slot: usize,
        frame: &Frame,
    ) -> std::result::Result<(), ErrorCode> {
        if self.shares[slot].is_some() {
            return Err(ErrorCode::Duplicate);
        }
        let (share, echo) =
            decode_share_payload(params, &frame.payload).map_err(|_| ErrorCode::Malformed)?;
        let share_bytes = params.encode_element(&share).map_err(|_| ErrorCode::Malformed)?;
        let ad = share_binding(frame.session, frame.sender, &share_bytes);
        let plain =
            pke::decrypt_with_ad(params, secret, &echo, &ad).map_err(|_| ErrorCode::DecryptFail)?;
        let expected = &self.nonces[slot].0;
        let matches = plain.len() == NONCE_LEN && bool::from(plain.as_slice().ct_eq(expected));
        if !matches {
            return Err(ErrorCode::NonceMismatch);
        }
        self.shares[slot] = Some(share);
        Ok(())
    }

    pub(crate) fn clear(&mut self) {
        self.shares.iter_mut().for_each(|s| *s = None);
    }

    /// Product of all recorded shares; clears them.
    pub(crate) fn take_digest(&mut self, params: &GroupParams) -> Result<GroupElement> {
        let shares: Vec<GroupElement> = self
            .shares
            .iter_mut()
            .map(|s| s.take().ok_or(Error::Protocol(ErrorCode::Missing)))
            .collect::<Result<_>>()?;
        combine_shares(params, &shares)
    }
}

/// Server side of one hashing session.
#[derive(Debug)]
pub struct ServerSession {
    params: Arc<GroupParams>,
    keypair: KeyPair,
    session: SessionId,
    ledger: NonceLedger,
    phase: Phase,
    digest: Option<GroupElement>,
}

impl ServerSession {
    /// Step 1: fresh session id and one nonce per participant.
    pub fn begin<R: RngCore + CryptoRng + ?Sized>(
        params: Arc<GroupParams>,
        n: u16,
        keypair: KeyPair,
        rng: &mut R,
    ) -> Result<(Self, Vec<Outgoing>)> {
        if n == 0 {
            return Err(Error::NoParticipants);
        }
        let session = SessionId::random(rng);
        let ledger = NonceLedger::issue(n as usize, rng);
        let out = (1..=n)
            .map(|i| Outgoing {
                to: PartyId::Participant(i),
                frame: Frame::new(
                    MsgType::Nonce,
                    session,
                    PartyId::Server,
                    ledger.nonce(i as usize - 1).0.to_vec(),
                ),
            })
            .collect();
        Ok((
            Self {
                params,
                keypair,
                session,
                ledger,
                phase: Phase::Issued,
                digest: None,
            },
            out,
        ))
    }

    pub fn session_id(&self) -> SessionId {
        self.session
    }

    pub fn participants(&self) -> u16 {
        self.ledger.nonces.len() as u16
    }

    pub fn public_key(&self) -> &GroupElement {
        self.keypair.public()
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn digest(&self) -> Option<&GroupElement> {
        self.digest.as_ref()
    }

    pub fn shares_recorded(&self) -> usize {
        self.ledger.recorded()
    }

    pub fn is_complete(&self) -> bool {
        self.ledger.is_complete()
    }

    fn fail(&mut self, code: ErrorCode) -> Error {
        self.phase = Phase::Failed(code);
        self.ledger.clear();
        Error::Protocol(code)
    }

    /// Fail the session from outside, e.g. on an undecodable frame.
    pub fn abort(&mut self, code: ErrorCode) {
        if matches!(self.phase, Phase::Issued | Phase::Collecting) {
            self.fail(code);
        }
    }

    /// Step 4, one share at a time. Any failure is terminal.
    pub fn absorb(&mut self, frame: &Frame) -> Result<()> {
        match self.phase {
            Phase::Failed(code) => return Err(Error::Protocol(code)),
            Phase::Done => return Err(Error::InvalidState("session already finalized")),
            Phase::Issued | Phase::Collecting => {}
        }
        if frame.msg_type != MsgType::Share || frame.session != self.session {
            return Err(self.fail(ErrorCode::Malformed));
        }
        let index = frame.sender as usize;
        if index == 0 || index > self.ledger.nonces.len() {
            return Err(self.fail(ErrorCode::Malformed));
        }
        let params = Arc::clone(&self.params);
        match self
            .ledger
            .check_and_record(&params, self.keypair.secret(), index - 1, frame)
        {
            Ok(()) => {
                self.phase = Phase::Collecting;
                Ok(())
            }
            Err(code) => Err(self.fail(code)),
        }
    }

    /// Store the product of all shares. Shares are dropped afterwards.
    pub fn finalize(&mut self) -> Result<GroupElement> {
        match self.phase {
            Phase::Failed(code) => return Err(Error::Protocol(code)),
            Phase::Done => return Err(Error::InvalidState("session already finalized")),
            _ => {}
        }
        if !self.ledger.is_complete() {
            return Err(self.fail(ErrorCode::Missing));
        }
        let digest = self.ledger.take_digest(&self.params)?;
        self.digest = Some(digest.clone());
        self.phase = Phase::Done;
        Ok(digest)
    }

    /// RESULT (after success) or ERROR (after failure) to every participant.
    pub fn outcome_frames(&self) -> Vec<Outgoing> {
        let frame = match (&self.phase, &self.digest) {
            (Phase::Done, Some(d)) => Frame::new(
                MsgType::Result,
                self.session,
                PartyId::Server,
                self.params.encode_element(d).expect("digest in group"),
            ),
            (Phase::Failed(code), _) => Frame::error(self.session, *code),
            _ => return Vec::new(),
        };
        (1..=self.participants())
            .map(|i| Outgoing {
                to: PartyId::Participant(i),
                frame: frame.clone(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Role {
    Owner { m: Scalar, variant: OwnerVariant },
    Member,
}

/// Participant side of one hashing session.
#[derive(Debug)]
pub struct ParticipantSession {
    params: Arc<GroupParams>,
    index: u16,
    keys: ParticipantKeys,
    role: Role,
    server_public: GroupElement,
    session: Option<SessionId>,
    responded: bool,
    outcome: Option<std::result::Result<GroupElement, ErrorCode>>,
}

impl ParticipantSession {
    pub fn new(
        params: Arc<GroupParams>,
        index: u16,
        keys: ParticipantKeys,
        role: Role,
        server_public: GroupElement,
    ) -> Self {
        Self {
            params,
            index,
            keys,
            role,
            server_public,
            session: None,
            responded: false,
            outcome: None,
        }
    }

    /// Only accept nonces for this session.
    pub fn expect_session(mut self, session: SessionId) -> Self {
        self.session = Some(session);
        self
    }

    pub fn index(&self) -> u16 {
        self.index
    }

    pub fn role(&self) -> &Role {
        &self.role
    }

    pub fn outcome(&self) -> Option<&std::result::Result<GroupElement, ErrorCode>> {
        self.outcome.as_ref()
    }

    /// The owner opens a session with this frame.
    pub fn upload_request(&self) -> Result<Frame> {
        match self.role {
            Role::Owner { .. } => Ok(Frame::new(
                MsgType::UploadReq,
                SessionId::default(),
                PartyId::Participant(self.index),
                Vec::new(),
            )),
            Role::Member => Err(Error::InvalidState("only the data owner uploads")),
        }
    }

    /// This participant's share for the session.
    pub fn share(&self) -> Result<GroupElement> {
        match &self.role {
            Role::Owner { m, variant } => owner_share(&self.params, &self.keys, m, variant),
            Role::Member => member_share(&self.params, &self.keys),
        }
    }

    /// Steps 2 and 3: answer a NONCE frame with `share ‖ Enc_S(nonce)`.
    pub fn respond<R: RngCore + CryptoRng + ?Sized>(
        &mut self,
        frame: &Frame,
        rng: &mut R,
    ) -> Result<Frame> {
        if frame.msg_type != MsgType::Nonce || frame.sender != 0 {
            return Err(Error::Malformed("expected a NONCE frame from the server"));
        }
        if let Some(expected) = self.session {
            if expected != frame.session {
                return Err(Error::WrongSession);
            }
        }
        if frame.payload.len() != NONCE_LEN {
            return Err(Error::Malformed("nonce has wrong length"));
        }
        if self.responded {
            return Err(Error::InvalidState("already responded in this session"));
        }
        let share = self.share()?;
        let echo = seal_echo(
            &self.params,
            &self.server_public,
            frame.session,
            self.index,
            &share,
            &frame.payload,
            rng,
        )?;
        let payload = encode_share_payload(&self.params, &share, &echo)?;
        self.session = Some(frame.session);
        self.responded = true;
        Ok(Frame::new(
            MsgType::Share,
            frame.session,
            PartyId::Participant(self.index),
            payload,
        ))
    }

    /// Record a RESULT or ERROR frame from the server.
    pub fn observe(&mut self, frame: &Frame) -> Result<()> {
        if self.session.is_some_and(|s| s != frame.session) {
            return Err(Error::WrongSession);
        }
        match frame.msg_type {
            MsgType::Result => {
                let d = self.params.decode_element(&frame.payload)?;
                self.outcome = Some(Ok(d));
            }
            MsgType::Error => {
                let code = frame
                    .error_code()
                    .ok_or(Error::Malformed("unknown error code"))?;
                self.outcome = Some(Err(code));
            }
            _ => return Err(Error::Malformed("expected RESULT or ERROR")),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn toy_setup(
        rng: &mut ChaCha20Rng,
    ) -> (Arc<GroupParams>, ServerSession, Vec<Outgoing>, Vec<ParticipantSession>) {
        let params = Arc::new(GroupParams::toy_subgroup());
        let kp = KeyPair::generate(&params, rng);
        let (server, nonces) = ServerSession::begin(Arc::clone(&params), 2, kp, rng).unwrap();
        let f = params.scalars();
        let owner = ParticipantSession::new(
            Arc::clone(&params),
            1,
            ParticipantKeys::from_u64(&params, 2, 3),
            Role::Owner {
                m: f.from_u64(5),
                variant: OwnerVariant::Plain,
            },
            server.public_key().clone(),
        );
        let member = ParticipantSession::new(
            Arc::clone(&params),
            2,
            ParticipantKeys::from_u64(&params, 4, 6),
            Role::Member,
            server.public_key().clone(),
        );
        (params, server, nonces, vec![owner, member])
    }

    #[test]
    fn toy_two_party_digest_is_18() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let (params, mut server, nonces, mut parts) = toy_setup(&mut rng);
        assert_eq!(nonces.len(), 2);
        assert_eq!(nonces[0].frame.session, nonces[1].frame.session);
        assert_ne!(nonces[0].frame.payload, nonces[1].frame.payload);
        assert_eq!(server.phase(), Phase::Issued);

        let s1 = parts[0].respond(&nonces[0].frame, &mut rng).unwrap();
        let s2 = parts[1].respond(&nonces[1].frame, &mut rng).unwrap();
        let (h1, _) = decode_share_payload(&params, &s1.payload).unwrap();
        let (h2, _) = decode_share_payload(&params, &s2.payload).unwrap();
        assert_eq!(h1, GroupElement::Modp(6u32.into()));
        assert_eq!(h2, GroupElement::Modp(3u32.into()));

        // arrival order reversed
        server.absorb(&s2).unwrap();
        assert_eq!(server.phase(), Phase::Collecting);
        assert_eq!(server.shares_recorded(), 1);
        server.absorb(&s1).unwrap();
        assert_eq!(server.finalize().unwrap(), GroupElement::Modp(18u32.into()));
        assert_eq!(server.phase(), Phase::Done);
        assert_eq!(server.shares_recorded(), 0);
    }

    #[test]
    fn single_participant_session() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let params = Arc::new(GroupParams::toy_ec());
        let kp = KeyPair::generate(&params, &mut rng);
        let (mut server, nonces) = ServerSession::begin(Arc::clone(&params), 1, kp, &mut rng).unwrap();
        let keys = ParticipantKeys::from_u64(&params, 3, 8);
        let mut p = ParticipantSession::new(
            Arc::clone(&params),
            1,
            keys.clone(),
            Role::Owner {
                m: params.scalars().zero(),
                variant: OwnerVariant::Plain,
            },
            server.public_key().clone(),
        );
        server.absorb(&p.respond(&nonces[0].frame, &mut rng).unwrap()).unwrap();
        assert_eq!(server.finalize().unwrap(), member_share(&params, &keys).unwrap());
    }

    #[test]
    fn zero_participants_rejected() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let params = Arc::new(GroupParams::toy_subgroup());
        let kp = KeyPair::generate(&params, &mut rng);
        assert!(matches!(
            ServerSession::begin(params, 0, kp, &mut rng),
            Err(Error::NoParticipants)
        ));
    }

    #[test]
    fn distinct_session_ids() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let params = Arc::new(GroupParams::toy_subgroup());
        let kp = KeyPair::generate(&params, &mut rng);
        let (a, _) = ServerSession::begin(Arc::clone(&params), 2, kp.clone(), &mut rng).unwrap();
        let (b, _) = ServerSession::begin(params, 2, kp, &mut rng).unwrap();
        assert_ne!(a.session_id(), b.session_id());
    }

    #[test]
    fn participant_rejects_foreign_session() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let (_, _, nonces, mut parts) = toy_setup(&mut rng);
        let mut p = parts.remove(1).expect_session(SessionId([9; 16]));
        assert!(matches!(p.respond(&nonces[1].frame, &mut rng), Err(Error::WrongSession)));
    }

    #[test]
    fn server_error_codes() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);

        // echo of the wrong nonce
        let (_, mut server, nonces, mut parts) = toy_setup(&mut rng);
        let swapped = parts[0].respond(&nonces[1].frame, &mut rng).unwrap();
        assert!(matches!(
            server.absorb(&swapped),
            Err(Error::Protocol(ErrorCode::NonceMismatch))
        ));
        assert_eq!(server.phase(), Phase::Failed(ErrorCode::NonceMismatch));
        assert!(server.digest().is_none());
        assert!(server.finalize().is_err());
        assert_eq!(server.outcome_frames()[0].frame.error_code(), Some(ErrorCode::NonceMismatch));

        // same index twice
        let (_, mut server, nonces, mut parts) = toy_setup(&mut rng);
        let s = parts[1].respond(&nonces[1].frame, &mut rng).unwrap();
        server.absorb(&s).unwrap();
        assert!(matches!(server.absorb(&s), Err(Error::Protocol(ErrorCode::Duplicate))));

        // share altered in transit: echo no longer authenticates
        let (params, mut server, nonces, mut parts) = toy_setup(&mut rng);
        let mut s = parts[1].respond(&nonces[1].frame, &mut rng).unwrap();
        s.payload[0] = params.encode_element(&GroupElement::Modp(4u32.into())).unwrap()[0];
        assert!(matches!(server.absorb(&s), Err(Error::Protocol(ErrorCode::DecryptFail))));

        // unknown index
        let (_, mut server, nonces, mut parts) = toy_setup(&mut rng);
        let s = parts[1].respond(&nonces[1].frame, &mut rng).unwrap();
        let s = Frame { sender: 9, ..s };
        assert!(matches!(server.absorb(&s), Err(Error::Protocol(ErrorCode::Malformed))));

        // corrupted ciphertext tag
        let (_, mut server, nonces, mut parts) = toy_setup(&mut rng);
        let mut s = parts[1].respond(&nonces[1].frame, &mut rng).unwrap();
        *s.payload.last_mut().unwrap() ^= 0x80;
        assert!(matches!(server.absorb(&s), Err(Error::Protocol(ErrorCode::DecryptFail))));

        // missing share at finalize
        let (_, mut server, nonces, mut parts) = toy_setup(&mut rng);
        server.absorb(&parts[1].respond(&nonces[1].frame, &mut rng).unwrap()).unwrap();
        assert!(matches!(server.finalize(), Err(Error::Protocol(ErrorCode::Missing))));
        assert_eq!(server.phase(), Phase::Failed(ErrorCode::Missing));
    }
}
