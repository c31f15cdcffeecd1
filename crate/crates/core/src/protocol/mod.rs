// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

//! Wire framing shared by every protocol in this crate.
//!
//! ```text
//! "XCH1" ‖ msg_type u8 ‖ session_id [16] ‖ sender u16-BE ‖ payload_len u32-BE ‖ payload
//! ```
//!
//! Sender 0 is the server; participants are numbered from 1.

pub mod basic;

use std::fmt;

use rand::RngCore;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"XCH1";
pub const HEADER_LEN: usize = 4 + 1 + 16 + 2 + 4;
pub const MAX_PAYLOAD: usize = 1 << 24;
pub const NONCE_LEN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum MsgType {
    UploadReq = 0x01,
    Nonce = 0x02,
    Share = 0x03,
    Result = 0x04,
    Error = 0x05,

    /// Participant → server: the participant's evaluation point, encrypted.
    ThEncPoint = 0x10,
    /// Server → participant: encrypted f(x_i) ‖ encrypted g(x_i).
    ThEncShares = 0x11,
    /// Owner → server: anonymization request.
    ThAnonReq = 0x12,
    /// Server → subset member: nonce.
    ThNonce = 0x13,
    /// Server → subset member: Lagrange coefficient.
    ThLagrange = 0x14,
    /// Subset member → server: share ‖ encrypted nonce.
    ThShare = 0x15,

    /// Server → P_i: start Multiply for pair (i, i+1); payload is i.
    MulInit = 0x20,
    /// P_i → P_{i+1}: r1·x
    MulBlindX = 0x21,
    /// P_{i+1} → server: r1·x·r2·y
    MulBlindXY = 0x22,
    /// Server → P_i: rS·r1·x·r2·y
    MulServer = 0x23,
    /// P_i → P_{i+1}: rS·x·r2·y
    MulUnblind1 = 0x24,
    /// P_{i+1} → server: rS·x·y
    MulUnblind2 = 0x25,
}

impl TryFrom<u8> for MsgType {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        use MsgType::*;
        Ok(match v {
            0x01 => UploadReq,
            0x02 => Nonce,
            0x03 => Share,
            0x04 => Result,
            0x05 => Error,
            0x10 => ThEncPoint,
            0x11 => ThEncShares,
            0x12 => ThAnonReq,
            0x13 => ThNonce,
            0x14 => ThLagrange,
            0x15 => ThShare,
            0x20 => MulInit,
            0x21 => MulBlindX,
            0x22 => MulBlindXY,
            0x23 => MulServer,
            0x24 => MulUnblind1,
            0x25 => MulUnblind2,
            _ => return Err(crate::error::Error::Malformed("unknown message type")),
        })
    }
}

/// Failure codes carried in ERROR frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum ErrorCode {
    NonceMismatch = 1,
    Duplicate = 2,
    DecryptFail = 3,
    Missing = 4,
    Malformed = 5,
}

impl ErrorCode {
    pub fn from_u8(v: u8) -> Option<Self> {
        Some(match v {
            1 => ErrorCode::NonceMismatch,
            2 => ErrorCode::Duplicate,
            3 => ErrorCode::DecryptFail,
            4 => ErrorCode::Missing,
            5 => ErrorCode::Malformed,
            _ => return None,
        })
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorCode::NonceMismatch => "NONCE_MISMATCH",
            ErrorCode::Duplicate => "DUPLICATE",
            ErrorCode::DecryptFail => "DECRYPT_FAIL",
            ErrorCode::Missing => "MISSING",
            ErrorCode::Malformed => "MALFORMED",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SessionId(pub [u8; 16]);

impl SessionId {
    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut id = [0u8; 16];
        rng.fill_bytes(&mut id);
        SessionId(id)
    }
}

impl fmt::Debug for SessionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0[..4] {
            write!(f, "{b:02x}")?;
        }
        f.write_str("…")
    }
}

/// Protocol party address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PartyId {
    Server,
    Participant(u16),
}

impl PartyId {
    pub fn wire_index(self) -> u16 {
        match self {
            PartyId::Server => 0,
            PartyId::Participant(i) => i,
        }
    }

    pub fn from_wire(i: u16) -> Self {
        if i == 0 {
            PartyId::Server
        } else {
            PartyId::Participant(i)
        }
    }
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartyId::Server => f.write_str("S"),
            PartyId::Participant(i) => write!(f, "P{i}"),
        }
    }
}

/// One protocol message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub msg_type: MsgType,
    pub session: SessionId,
    pub sender: u16,
    pub payload: Vec<u8>,
}

/// A frame addressed to a party.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outgoing {
    pub to: PartyId,
    pub frame: Frame,
}

impl Frame {
    pub fn new(msg_type: MsgType, session: SessionId, sender: PartyId, payload: Vec<u8>) -> Self {
        Self {
            msg_type,
            session,
            sender: sender.wire_index(),
            payload,
        }
    }

    pub fn sender(&self) -> PartyId {
        PartyId::from_wire(self.sender)
    }

    pub fn error(session: SessionId, code: ErrorCode) -> Self {
        Self::new(MsgType::Error, session, PartyId::Server, vec![code as u8])
    }

    pub fn error_code(&self) -> Option<ErrorCode> {
        match (self.msg_type, self.payload.as_slice()) {
            (MsgType::Error, [c]) => ErrorCode::from_u8(*c),
            _ => None,
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len());
        out.extend_from_slice(MAGIC);
        out.push(self.msg_type as u8);
        out.extend_from_slice(&self.session.0);
        out.extend_from_slice(&self.sender.to_be_bytes());
        out.extend_from_slice(&(self.payload.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Malformed("frame shorter than header"));
        }
        if &bytes[..4] != MAGIC {
            return Err(Error::Malformed("bad magic"));
        }
        let msg_type = MsgType::try_from(bytes[4])?;
        let mut session = [0u8; 16];
        session.copy_from_slice(&bytes[5..21]);
        let sender = u16::from_be_bytes([bytes[21], bytes[22]]);
        let len = u32::from_be_bytes([bytes[23], bytes[24], bytes[25], bytes[26]]) as usize;
        if len > MAX_PAYLOAD {
            return Err(Error::Malformed("payload too large"));
        }
        if bytes.len() != HEADER_LEN + len {
            return Err(Error::Malformed("payload length mismatch"));
        }
        Ok(Frame {
            msg_type,
            session: SessionId(session),
            sender,
            payload: bytes[HEADER_LEN..].to_vec(),
        })
    }
}
