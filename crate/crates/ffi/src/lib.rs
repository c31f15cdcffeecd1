// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

//! C ABI over `commhash`.
//!
//! Conventions:
//! * Every function returns a [`CommhashStatus`]. On failure a description
//!   is available from [`commhash_last_error`] on the same thread.
//! * Objects are opaque handles created by `*_new` functions and released
//!   with the matching `*_free`. Freeing NULL is a no-op.
//! * Byte outputs go to a caller buffer `(out, cap, out_len)`. `out_len`
//!   always receives the required size; if `cap` is too small the call
//!   returns `COMMHASH_STATUS_BUFFER_TOO_SMALL` and writes nothing.
//! * Scalars are big-endian, fixed width, reduced. Group elements use the
//!   library's canonical encoding.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use commhash::group::{GroupElement, GroupParams, GroupSize, ModpMode, Scalar};
use commhash::hash::{combine_shares, member_share, owner_share, reference_digest, OwnerVariant, ParticipantKeys};
use commhash::pke::KeyPair;
use commhash::protocol::basic::{ParticipantSession, Phase, Role, ServerSession};
use commhash::protocol::{ErrorCode, Frame, Outgoing};
use commhash::{generate_group, Backend, Error};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Result of every `commhash_*` call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommhashStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BufferTooSmall = 3,
    Malformed = 4,
    NotInGroup = 5,
    /// The session failed; see `commhash_server_phase` for the code.
    Protocol = 6,
    InvalidState = 7,
    Unsupported = 8,
    Internal = 9,
}

/// Server session phase, as reported by `commhash_server_phase`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommhashPhase {
    Issued = 0,
    Collecting = 1,
    Done = 2,
    Failed = 3,
}

/// Group parameters.
pub struct CommhashParams {
    inner: Arc<GroupParams>,
}

/// One participant's secret exponent pair.
pub struct CommhashKeys {
    inner: ParticipantKeys,
}

/// Server side of a basic session.
pub struct CommhashServer {
    session: ServerSession,
    nonces: Vec<Frame>,
}

/// Participant side of a basic session.
pub struct CommhashParticipant {
    session: ParticipantSession,
    rng: ChaCha20Rng,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let msg = CString::new(msg).unwrap_or_else(|_| CString::new("error message contained NUL").expect("static"));
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> CommhashStatus {
    match e {
        Error::Malformed(_) | Error::NonCanonical(_) => CommhashStatus::Malformed,
        Error::NotInGroup => CommhashStatus::NotInGroup,
        Error::Protocol(_) => CommhashStatus::Protocol,
        Error::InvalidState(_) => CommhashStatus::InvalidState,
        Error::UnsupportedSize(_) | Error::PrimitiveMode => CommhashStatus::Unsupported,
        _ => CommhashStatus::InvalidArgument,
    }
}

struct Fail(CommhashStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

type FfiResult<T> = Result<T, Fail>;

fn guard(f: impl FnOnce() -> FfiResult<()>) -> CommhashStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CommhashStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CommhashStatus::Internal
        }
    }
}

fn null() -> Fail {
    Fail(CommhashStatus::NullPointer, "null pointer argument".into())
}

unsafe fn deref<'a, T>(p: *const T) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(null)
}

unsafe fn deref_mut<'a, T>(p: *mut T) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or_else(null)
}

unsafe fn bytes<'a>(p: *const u8, len: usize) -> FfiResult<&'a [u8]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out(data: &[u8], out: *mut u8, cap: usize, out_len: *mut usize) -> FfiResult<()> {
    let out_len = deref_mut(out_len)?;
    *out_len = data.len();
    if cap < data.len() {
        return Err(Fail(
            CommhashStatus::BufferTooSmall,
            format!("need {} bytes, have {cap}", data.len()),
        ));
    }
    if !data.is_empty() {
        if out.is_null() {
            return Err(null());
        }
        ptr::copy_nonoverlapping(data.as_ptr(), out, data.len());
    }
    Ok(())
}

unsafe fn emit<T>(value: T, out: *mut *mut T) -> FfiResult<()> {
    let slot = deref_mut(out)?;
    *slot = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

fn invalid(msg: &str) -> Fail {
    Fail(CommhashStatus::InvalidArgument, msg.into())
}

/// Description of the last failure on this thread. Valid until the next
/// `commhash_*` call on the same thread.
#[no_mangle]
pub extern "C" fn commhash_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, NUL-terminated, static.
#[no_mangle]
pub extern "C" fn commhash_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Generate or load group parameters.
///
/// `backend`: 0 = MODP, 1 = elliptic curve. `bits`: 0 for the toy group,
/// otherwise the prime size (MODP) or 256 (secp256k1). `mode`: 1 = SUBGROUP,
/// 2 = PRIMITIVE; ignored for curves.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn commhash_params_new(
    backend: u8,
    bits: u32,
    mode: u8,
    seed: u64,
    out: *mut *mut CommhashParams,
) -> CommhashStatus {
    guard(|| {
        let backend = match backend {
            0 => Backend::Modp,
            1 => Backend::Ec,
            _ => return Err(invalid("backend must be 0 or 1")),
        };
        let mode = match (backend, mode) {
            (Backend::Modp, 1) | (Backend::Ec, _) => ModpMode::Subgroup,
            (Backend::Modp, 2) => ModpMode::Primitive,
            _ => return Err(invalid("mode must be 1 or 2")),
        };
        let size = if bits == 0 { GroupSize::Toy } else { GroupSize::Bits(bits) };
        let params = generate_group(backend, size, mode, seed)?;
        emit(CommhashParams { inner: Arc::new(params) }, out)
    })
}

/// Decode parameters from their canonical byte encoding.
///
/// # Safety
/// `data` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn commhash_params_from_bytes(
    data: *const u8,
    len: usize,
    out: *mut *mut CommhashParams,
) -> CommhashStatus {
    guard(|| {
        let params = GroupParams::from_bytes(bytes(data, len)?)?;
        emit(CommhashParams { inner: Arc::new(params) }, out)
    })
}

/// Canonical byte encoding of `params`.
///
/// # Safety
/// `params` must be a live handle; `out` must have `cap` writable bytes;
/// `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn commhash_params_to_bytes(
    params: *const CommhashParams,
    out: *mut u8,
    cap: usize,
    out_len: *mut usize,
) -> CommhashStatus {
    guard(|| write_out(&deref(params)?.inner.to_bytes(), out, cap, out_len))
}

/// SHA-256 fingerprint of the parameter encoding, 32 bytes.
///
/// # Safety
/// `params` must be a live handle; `out` must have 32 writable bytes.
#[no_mangle]
pub unsafe extern "C" fn commhash_params_fingerprint(params: *const CommhashParams, out: *mut u8) -> CommhashStatus {
    guard(|| {
        let fp = deref(params)?.inner.fingerprint();
        let mut n = 0usize;
        write_out(&fp, out, fp.len(), &mut n)
    })
}

/// Width in bytes of an encoded scalar.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn commhash_params_scalar_len(params: *const CommhashParams, out: *mut usize) -> CommhashStatus {
    guard(|| {
        *deref_mut(out)? = deref(params)?.inner.scalars().width();
        Ok(())
    })
}

/// # Safety
/// `params` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn commhash_params_free(params: *mut CommhashParams) {
    release(params);
}

/// Random key pair from a seed.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn commhash_keys_random(
    params: *const CommhashParams,
    seed: u64,
    out: *mut *mut CommhashKeys,
) -> CommhashStatus {
    guard(|| {
        let p = &deref(params)?.inner;
        let keys = ParticipantKeys::random(p, &mut ChaCha20Rng::seed_from_u64(seed));
        emit(CommhashKeys { inner: keys }, out)
    })
}

/// Key pair from small integers (tests and fixtures).
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn commhash_keys_from_u64(
    params: *const CommhashParams,
    x: u64,
    y: u64,
    out: *mut *mut CommhashKeys,
) -> CommhashStatus {
    guard(|| {
        let p = &deref(params)?.inner;
        emit(CommhashKeys { inner: ParticipantKeys::from_u64(p, x, y) }, out)
    })
}

/// # Safety
/// `keys` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn commhash_keys_free(keys: *mut CommhashKeys) {
    release(keys);
}

unsafe fn scalar(p: &GroupParams, data: *const u8, len: usize) -> FfiResult<Scalar> {
    Ok(p.decode_scalar(bytes(data, len)?)?)
}

unsafe fn element(p: &GroupParams, data: *const u8, len: usize) -> FfiResult<GroupElement> {
    Ok(p.decode_element(bytes(data, len)?)?)
}

unsafe fn write_element(p: &GroupParams, e: &GroupElement, out: *mut u8, cap: usize, out_len: *mut usize) -> FfiResult<()> {
    write_out(&p.encode_element(e)?, out, cap, out_len)
}

/// `h(x, y)` for a participant without the message.
///
/// # Safety
/// Handles must be live; `out`/`out_len` as in the module conventions.
#[no_mangle]
pub unsafe extern "C" fn commhash_member_share(
    params: *const CommhashParams,
    keys: *const CommhashKeys,
    out: *mut u8,
    cap: usize,
    out_len: *mut usize,
) -> CommhashStatus {
    guard(|| {
        let p = &deref(params)?.inner;
        let share = member_share(p, &deref(keys)?.inner)?;
        write_element(p, &share, out, cap, out_len)
    })
}

/// `h(x + m, y)` for the data owner. `m` is an encoded scalar.
///
/// # Safety
/// Handles must be live; `m` must point to `m_len` readable bytes.
#[no_mangle]
pub unsafe extern "C" fn commhash_owner_share(
    params: *const CommhashParams,
    keys: *const CommhashKeys,
    m: *const u8,
    m_len: usize,
    out: *mut u8,
    cap: usize,
    out_len: *mut usize,
) -> CommhashStatus {
    guard(|| {
        let p = &deref(params)?.inner;
        let m = scalar(p, m, m_len)?;
        let share = owner_share(p, &deref(keys)?.inner, &m, &OwnerVariant::Plain)?;
        write_element(p, &share, out, cap, out_len)
    })
}

/// Product of `count` encoded shares.
///
/// # Safety
/// `shares` and `lens` must each point to `count` entries; every
/// `shares[i]` must point to `lens[i]` readable bytes.
#[no_mangle]
pub unsafe extern "C" fn commhash_combine(
    params: *const CommhashParams,
    shares: *const *const u8,
    lens: *const usize,
    count: usize,
    out: *mut u8,
    cap: usize,
    out_len: *mut usize,
) -> CommhashStatus {
    guard(|| {
        let p = &deref(params)?.inner;
        if count > 0 && (shares.is_null() || lens.is_null()) {
            return Err(null());
        }
        let mut elems = Vec::with_capacity(count);
        for i in 0..count {
            elems.push(element(p, *shares.add(i), *lens.add(i))?);
        }
        let digest = combine_shares(p, &elems)?;
        write_element(p, &digest, out, cap, out_len)
    })
}

/// `h(m + Σx_i, Σy_i)` computed directly from all keys.
///
/// # Safety
/// `keys` must point to `count` live handles; `m` to `m_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn commhash_reference_digest(
    params: *const CommhashParams,
    m: *const u8,
    m_len: usize,
    keys: *const *const CommhashKeys,
    count: usize,
    out: *mut u8,
    cap: usize,
    out_len: *mut usize,
) -> CommhashStatus {
    guard(|| {
        let p = &deref(params)?.inner;
        let m = scalar(p, m, m_len)?;
        if count > 0 && keys.is_null() {
            return Err(null());
        }
        let mut all = Vec::with_capacity(count);
        for i in 0..count {
            all.push(deref(*keys.add(i))?.inner.clone());
        }
        let digest = reference_digest(p, &m, &all)?;
        write_element(p, &digest, out, cap, out_len)
    })
}

/// Start a session for `n` participants with a fresh server key.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn commhash_server_begin(
    params: *const CommhashParams,
    n: u16,
    seed: u64,
    out: *mut *mut CommhashServer,
) -> CommhashStatus {
    guard(|| {
        let p = Arc::clone(&deref(params)?.inner);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let keypair = KeyPair::generate(&p, &mut rng);
        let (session, frames) = ServerSession::begin(p, n, keypair, &mut rng)?;
        let nonces = frames.into_iter().map(|o: Outgoing| o.frame).collect();
        emit(CommhashServer { session, nonces }, out)
    })
}

/// The server's public key, needed by participants.
///
/// # Safety
/// `server` and `params` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn commhash_server_public_key(
    server: *const CommhashServer,
    params: *const CommhashParams,
    out: *mut u8,
    cap: usize,
    out_len: *mut usize,
) -> CommhashStatus {
    guard(|| {
        let s = deref(server)?;
        write_element(&deref(params)?.inner, s.session.public_key(), out, cap, out_len)
    })
}

/// Encoded NONCE frame for participant `index` (1-based).
///
/// # Safety
/// `server` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn commhash_server_nonce_frame(
    server: *const CommhashServer,
    index: u16,
    out: *mut u8,
    cap: usize,
    out_len: *mut usize,
) -> CommhashStatus {
    guard(|| {
        let s = deref(server)?;
        let frame = s
            .nonces
            .get((index as usize).wrapping_sub(1))
            .ok_or_else(|| invalid("participant index out of range"))?;
        write_out(&frame.encode(), out, cap, out_len)
    })
}

/// Check and record one encoded SHARE frame. Any failure is terminal.
///
/// # Safety
/// `server` must be a live handle; `frame` must point to `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn commhash_server_absorb(
    server: *mut CommhashServer,
    frame: *const u8,
    len: usize,
) -> CommhashStatus {
    guard(|| {
        let s = deref_mut(server)?;
        match Frame::decode(bytes(frame, len)?) {
            Ok(f) => s.session.absorb(&f)?,
            Err(e) => {
                s.session.abort(ErrorCode::Malformed);
                return Err(e.into());
            }
        }
        Ok(())
    })
}

/// Store and return the digest once every share is in; fails with MISSING
/// otherwise.
///
/// # Safety
/// `server` and `params` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn commhash_server_finalize(
    server: *mut CommhashServer,
    params: *const CommhashParams,
    out: *mut u8,
    cap: usize,
    out_len: *mut usize,
) -> CommhashStatus {
    guard(|| {
        let p = &deref(params)?.inner;
        let s = deref_mut(server)?;
        let digest = match s.session.digest() {
            Some(d) => d.clone(),
            None => s.session.finalize()?,
        };
        write_element(p, &digest, out, cap, out_len)
    })
}

/// Current phase. `error_code` receives the wire error code (1..5) when the
/// phase is FAILED and 0 otherwise.
///
/// # Safety
/// `server` must be a live handle; `phase` and `error_code` writable.
#[no_mangle]
pub unsafe extern "C" fn commhash_server_phase(
    server: *const CommhashServer,
    phase: *mut CommhashPhase,
    error_code: *mut u8,
) -> CommhashStatus {
    guard(|| {
        let s = deref(server)?;
        let (ph, code) = match s.session.phase() {
            Phase::Issued => (CommhashPhase::Issued, 0),
            Phase::Collecting => (CommhashPhase::Collecting, 0),
            Phase::Done => (CommhashPhase::Done, 0),
            Phase::Failed(c) => (CommhashPhase::Failed, c as u8),
        };
        *deref_mut(phase)? = ph;
        *deref_mut(error_code)? = code;
        Ok(())
    })
}

/// # Safety
/// `server` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn commhash_server_free(server: *mut CommhashServer) {
    release(server);
}

/// Participant `index` (1-based). When `is_owner` is true, `m` is the
/// encoded message scalar; otherwise it is ignored and may be NULL.
///
/// # Safety
/// Handles must be live; byte arguments must point to the given lengths.
#[no_mangle]
pub unsafe extern "C" fn commhash_participant_new(
    params: *const CommhashParams,
    index: u16,
    keys: *const CommhashKeys,
    is_owner: bool,
    m: *const u8,
    m_len: usize,
    server_public: *const u8,
    server_public_len: usize,
    seed: u64,
    out: *mut *mut CommhashParticipant,
) -> CommhashStatus {
    guard(|| {
        let p = Arc::clone(&deref(params)?.inner);
        if index == 0 {
            return Err(invalid("participant indices start at 1"));
        }
        let role = if is_owner {
            Role::Owner {
                m: scalar(&p, m, m_len)?,
                variant: OwnerVariant::Plain,
            }
        } else {
            Role::Member
        };
        let server_public = element(&p, server_public, server_public_len)?;
        let session = ParticipantSession::new(Arc::clone(&p), index, deref(keys)?.inner.clone(), role, server_public);
        emit(
            CommhashParticipant {
                session,
                rng: ChaCha20Rng::seed_from_u64(seed),
            },
            out,
        )
    })
}

/// Answer an encoded NONCE frame with an encoded SHARE frame.
///
/// # Safety
/// `participant` must be a live handle; `frame` must point to `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn commhash_participant_respond(
    participant: *mut CommhashParticipant,
    frame: *const u8,
    len: usize,
    out: *mut u8,
    cap: usize,
    out_len: *mut usize,
) -> CommhashStatus {
    guard(|| {
        let pt = deref_mut(participant)?;
        let nonce = Frame::decode(bytes(frame, len)?)?;
        let share = pt.session.respond(&nonce, &mut pt.rng)?;
        write_out(&share.encode(), out, cap, out_len)
    })
}

/// # Safety
/// `participant` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn commhash_participant_free(participant: *mut CommhashParticipant) {
    release(participant);
}
