// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

//! Frames over TCP.
//!
//! A connection opens with one hello in each direction:
//!
//! ```text
//! params_fingerprint [32] ‖ party u16-BE ‖ key_len u16-BE ‖ link public key
//! ```
//!
//! A fingerprint mismatch aborts the link. After the hello, each record is
//! `len u32-BE ‖ ciphertext`, where the ciphertext seals one encoded frame
//! under the receiver's link key with `sender ‖ receiver` as associated data.
//! The server's link key is its protocol key.

use std::io::{Read, Write};
use std::net::{Shutdown, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::mpsc;
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use rand::{CryptoRng, RngCore};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::nodes::{ParticipantNode, ServerNode};
use super::Node;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams};
use crate::pke::{self, Ciphertext, KeyPair};
use crate::protocol::basic::{ParticipantSession, Phase, Role};
use crate::hash::ParticipantKeys;
use crate::protocol::{ErrorCode, Frame, Outgoing, PartyId, MAX_PAYLOAD};

const MAX_RECORD: usize = MAX_PAYLOAD + 4096;
const LINK_LABEL: &[u8] = b"commhash-link";

fn link_ad(from: PartyId, to: PartyId) -> Vec<u8> {
    let mut ad = LINK_LABEL.to_vec();
    ad.extend_from_slice(&from.wire_index().to_be_bytes());
    ad.extend_from_slice(&to.wire_index().to_be_bytes());
    ad
}

/// Sending half of a link.
pub struct LinkWriter {
    stream: TcpStream,
    params: Arc<GroupParams>,
    me: PartyId,
    peer: PartyId,
    peer_public: GroupElement,
    rng: ChaCha20Rng,
}

impl std::fmt::Debug for LinkWriter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinkWriter").field("me", &self.me).field("peer", &self.peer).finish()
    }
}

impl LinkWriter {
    pub fn send(&mut self, frame: &Frame) -> Result<()> {
        let ad = link_ad(self.me, self.peer);
        let ct = pke::encrypt_with_ad(&self.params, &self.peer_public, &frame.encode(), &ad, &mut self.rng)?;
        let record = ct.encode(&self.params)?;
        let mut buf = Vec::with_capacity(4 + record.len());
        buf.extend_from_slice(&(record.len() as u32).to_be_bytes());
        buf.extend_from_slice(&record);
        self.stream.write_all(&buf)?;
        self.stream.flush()?;
        Ok(())
    }

    pub fn shutdown(&self) {
        let _ = self.stream.shutdown(Shutdown::Both);
    }
}

/// Receiving half of a link.
pub struct LinkReader {
    stream: TcpStream,
    params: Arc<GroupParams>,
    me: PartyId,
    peer: PartyId,
    keypair: KeyPair,
}

impl std::fmt::Debug for LinkReader {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinkReader").field("me", &self.me).field("peer", &self.peer).finish()
    }
}

impl LinkReader {
    /// Next frame; `Ok(None)` on clean end of stream.
    pub fn recv(&mut self) -> Result<Option<Frame>> {
        let mut len = [0u8; 4];
        match self.stream.read_exact(&mut len) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => return Ok(None),
            Err(e) => return Err(e.into()),
        }
        let len = u32::from_be_bytes(len) as usize;
        if len > MAX_RECORD {
            return Err(Error::Malformed("link record too large"));
        }
        let mut record = vec![0u8; len];
        self.stream.read_exact(&mut record)?;
        let ct = Ciphertext::decode(&self.params, &record)?;
        let plain = pke::decrypt_with_ad(&self.params, self.keypair.secret(), &ct, &link_ad(self.peer, self.me))?;
        Frame::decode(&plain).map(Some)
    }
}

/// An authenticated-parameters, sealed connection to one peer.
#[derive(Debug)]
pub struct Link {
    pub peer: PartyId,
    pub peer_public: GroupElement,
    pub reader: LinkReader,
    pub writer: LinkWriter,
}

fn hello(params: &GroupParams, me: PartyId, public: &GroupElement) -> Result<Vec<u8>> {
    let key = params.encode_element(public)?;
    let mut out = params.fingerprint().to_vec();
    out.extend_from_slice(&me.wire_index().to_be_bytes());
    out.extend_from_slice(&(key.len() as u16).to_be_bytes());
    out.extend_from_slice(&key);
    Ok(out)
}

/// Exchange hellos over `stream`.
pub fn handshake<R: RngCore + CryptoRng + ?Sized>(
    mut stream: TcpStream,
    params: Arc<GroupParams>,
    me: PartyId,
    keypair: KeyPair,
    rng: &mut R,
) -> Result<Link> {
    stream.set_nodelay(true)?;
    stream.write_all(&hello(&params, me, keypair.public())?)?;
    let mut head = [0u8; 36];
    stream.read_exact(&mut head)?;
    if head[..32] != params.fingerprint() {
        let _ = stream.shutdown(Shutdown::Both);
        return Err(Error::ParamsMismatch);
    }
    let peer = PartyId::from_wire(u16::from_be_bytes([head[32], head[33]]));
    let key_len = u16::from_be_bytes([head[34], head[35]]) as usize;
    let mut key = vec![0u8; key_len];
    stream.read_exact(&mut key)?;
    let peer_public = params.decode_element(&key)?;
    if params.is_identity(&peer_public) || peer == me {
        return Err(Error::Malformed("bad link hello"));
    }
    let mut seed = [0u8; 32];
    rng.fill_bytes(&mut seed);
    let reader = LinkReader {
        stream: stream.try_clone()?,
        params: Arc::clone(&params),
        me,
        peer,
        keypair,
    };
    let writer = LinkWriter {
        stream,
        params,
        me,
        peer,
        peer_public: peer_public.clone(),
        rng: ChaCha20Rng::from_seed(seed),
    };
    Ok(Link {
        peer,
        peer_public,
        reader,
        writer,
    })
}

/// Result of a session served over TCP.
#[derive(Debug, Clone)]
pub struct TcpOutcome {
    pub phase: Option<Phase>,
    pub digest: Option<GroupElement>,
}

enum Event {
    Frame(PartyId, Frame),
    Broken(PartyId),
}

/// Serve one basic session to `n` participants. Shares still missing after
/// `deadline` of silence fail the session with MISSING.
pub fn serve_basic(
    listener: &TcpListener,
    params: Arc<GroupParams>,
    keypair: KeyPair,
    n: u16,
    deadline: Duration,
    seed: u64,
) -> Result<TcpOutcome> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut writers: std::collections::BTreeMap<PartyId, LinkWriter> = Default::default();
    let mut readers = Vec::new();
    while writers.len() < n as usize {
        let (stream, _) = listener.accept()?;
        // A peer with other parameters or a bad hello is dropped, not fatal.
        let Ok(link) = handshake(stream, Arc::clone(&params), PartyId::Server, keypair.clone(), &mut rng) else {
            continue;
        };
        match link.peer {
            PartyId::Participant(i) if i <= n && !writers.contains_key(&link.peer) => {
                readers.push(link.reader);
                writers.insert(link.peer, link.writer);
            }
            _ => link.writer.shutdown(),
        }
    }

    let (tx, rx) = mpsc::channel();
    let handles: Vec<_> = readers
        .into_iter()
        .map(|mut r| {
            let tx = tx.clone();
            thread::spawn(move || loop {
                match r.recv() {
                    Ok(Some(frame)) => {
                        if tx.send(Event::Frame(r.peer, frame)).is_err() {
                            return;
                        }
                    }
                    Ok(None) => return,
                    Err(_) => {
                        let _ = tx.send(Event::Broken(r.peer));
                        return;
                    }
                }
            })
        })
        .collect();
    drop(tx);

    let mut node = ServerNode::new(Arc::clone(&params), keypair, n, rng.next_u64());
    let deliver = |out: Vec<Outgoing>, writers: &mut std::collections::BTreeMap<PartyId, LinkWriter>| {
        for o in out {
            if let Some(w) = writers.get_mut(&o.to) {
                let _ = w.send(&o.frame);
            }
        }
    };
    while !node.is_settled() {
        let out = match rx.recv_timeout(deadline) {
            Ok(Event::Frame(from, frame)) => node.on_frame(from, &frame.encode()),
            Ok(Event::Broken(from)) => node.on_frame(from, &[]),
            Err(mpsc::RecvTimeoutError::Timeout) | Err(mpsc::RecvTimeoutError::Disconnected) => {
                let out = node.on_idle();
                if out.is_empty() && !node.is_settled() {
                    break;
                }
                out
            }
        };
        deliver(out, &mut writers);
    }
    for w in writers.values() {
        w.shutdown();
    }
    for h in handles {
        let _ = h.join();
    }
    Ok(TcpOutcome {
        phase: node.phase(),
        digest: node.digest().cloned(),
    })
}

/// Take part in one basic session served at `addr`. Returns what the server
/// announced.
pub fn join_basic<A: ToSocketAddrs>(
    addr: A,
    params: Arc<GroupParams>,
    index: u16,
    keys: ParticipantKeys,
    role: Role,
    seed: u64,
) -> Result<std::result::Result<GroupElement, ErrorCode>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let link_key = KeyPair::generate(&params, &mut rng);
    let stream = TcpStream::connect(addr)?;
    let me = PartyId::Participant(index);
    let Link {
        peer,
        peer_public,
        mut reader,
        mut writer,
    } = handshake(stream, Arc::clone(&params), me, link_key, &mut rng)?;
    if peer != PartyId::Server {
        return Err(Error::Malformed("expected the server"));
    }
    let session = ParticipantSession::new(Arc::clone(&params), index, keys, role, peer_public);
    let mut node = ParticipantNode::new(session, rng.next_u64());
    if let Some(k) = node.kickoff() {
        writer.send(&k.frame)?;
    }
    while node.outcome().is_none() {
        let Some(frame) = reader.recv()? else {
            return Err(Error::InvalidState("server closed the link"));
        };
        for o in node.on_frame(PartyId::Server, &frame.encode()) {
            writer.send(&o.frame)?;
        }
    }
    writer.shutdown();
    Ok(node.outcome().cloned().expect("outcome observed"))
}
