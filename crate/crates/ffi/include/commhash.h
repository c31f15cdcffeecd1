/* Copyright 2026 The commhash Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#ifndef COMMHASH_H
#define COMMHASH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every `commhash_*` call.
typedef enum {
  COMMHASH_STATUS_OK = 0,
  COMMHASH_STATUS_NULL_POINTER = 1,
  COMMHASH_STATUS_INVALID_ARGUMENT = 2,
  COMMHASH_STATUS_BUFFER_TOO_SMALL = 3,
  COMMHASH_STATUS_MALFORMED = 4,
  COMMHASH_STATUS_NOT_IN_GROUP = 5,
  // The session failed; see `commhash_server_phase` for the code.
  COMMHASH_STATUS_PROTOCOL = 6,
  COMMHASH_STATUS_INVALID_STATE = 7,
  COMMHASH_STATUS_UNSUPPORTED = 8,
  COMMHASH_STATUS_INTERNAL = 9,
} CommhashStatus;

// Server session phase, as reported by `commhash_server_phase`.
typedef enum {
  COMMHASH_PHASE_ISSUED = 0,
  COMMHASH_PHASE_COLLECTING = 1,
  COMMHASH_PHASE_DONE = 2,
  COMMHASH_PHASE_FAILED = 3,
} CommhashPhase;

// One participant's secret exponent pair.
typedef struct CommhashKeys CommhashKeys;

// Group parameters.
typedef struct CommhashParams CommhashParams;

// Participant side of a basic session.
typedef struct CommhashParticipant CommhashParticipant;

// Server side of a basic session.
typedef struct CommhashServer CommhashServer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Description of the last failure on this thread. Valid until the next
// `commhash_*` call on the same thread.
const char *commhash_last_error(void);

// Library version, NUL-terminated, static.
const char *commhash_version(void);

// Generate or load group parameters.
//
// `backend`: 0 = MODP, 1 = elliptic curve. `bits`: 0 for the toy group,
// otherwise the prime size (MODP) or 256 (secp256k1). `mode`: 1 = SUBGROUP,
// 2 = PRIMITIVE; ignored for curves.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
CommhashStatus commhash_params_new(uint8_t backend,
                                   uint32_t bits,
                                   uint8_t mode,
                                   uint64_t seed,
                                   CommhashParams **out);

// Decode parameters from their canonical byte encoding.
//
// # Safety
// `data` must point to `len` readable bytes; `out` must be writable.
CommhashStatus commhash_params_from_bytes(const uint8_t *data, size_t len, CommhashParams **out);

// Canonical byte encoding of `params`.
//
// # Safety
// `params` must be a live handle; `out` must have `cap` writable bytes;
// `out_len` must be writable.
CommhashStatus commhash_params_to_bytes(const CommhashParams *params,
                                        uint8_t *out,
                                        size_t cap,
                                        size_t *out_len);

// SHA-256 fingerprint of the parameter encoding, 32 bytes.
//
// # Safety
// `params` must be a live handle; `out` must have 32 writable bytes.
CommhashStatus commhash_params_fingerprint(const CommhashParams *params, uint8_t *out);

// Width in bytes of an encoded scalar.
//
// # Safety
// `params` must be a live handle; `out` must be writable.
CommhashStatus commhash_params_scalar_len(const CommhashParams *params, size_t *out);

// # Safety
// `params` must be NULL or a handle not yet freed.
void commhash_params_free(CommhashParams *params);

// Random key pair from a seed.
//
// # Safety
// `params` must be a live handle; `out` must be writable.
CommhashStatus commhash_keys_random(const CommhashParams *params,
                                    uint64_t seed,
                                    CommhashKeys **out);

// Key pair from small integers (tests and fixtures).
//
// # Safety
// `params` must be a live handle; `out` must be writable.
CommhashStatus commhash_keys_from_u64(const CommhashParams *params,
                                      uint64_t x,
                                      uint64_t y,
                                      CommhashKeys **out);

// # Safety
// `keys` must be NULL or a handle not yet freed.
void commhash_keys_free(CommhashKeys *keys);

// `h(x, y)` for a participant without the message.
//
// # Safety
// Handles must be live; `out`/`out_len` as in the module conventions.
CommhashStatus commhash_member_share(const CommhashParams *params,
                                     const CommhashKeys *keys,
                                     uint8_t *out,
                                     size_t cap,
                                     size_t *out_len);

// `h(x + m, y)` for the data owner. `m` is an encoded scalar.
//
// # Safety
// Handles must be live; `m` must point to `m_len` readable bytes.
CommhashStatus commhash_owner_share(const CommhashParams *params,
                                    const CommhashKeys *keys,
                                    const uint8_t *m,
                                    size_t m_len,
                                    uint8_t *out,
                                    size_t cap,
                                    size_t *out_len);

// Product of `count` encoded shares.
//
// # Safety
// `shares` and `lens` must each point to `count` entries; every
// `shares[i]` must point to `lens[i]` readable bytes.
CommhashStatus commhash_combine(const CommhashParams *params,
                                const uint8_t *const *shares,
                                const size_t *lens,
                                size_t count,
                                uint8_t *out,
                                size_t cap,
                                size_t *out_len);

// `h(m + Σx_i, Σy_i)` computed directly from all keys.
//
// # Safety
// `keys` must point to `count` live handles; `m` to `m_len` bytes.
CommhashStatus commhash_reference_digest(const CommhashParams *params,
                                         const uint8_t *m,
                                         size_t m_len,
                                         const CommhashKeys *const *keys,
                                         size_t count,
                                         uint8_t *out,
                                         size_t cap,
                                         size_t *out_len);

// Start a session for `n` participants with a fresh server key.
//
// # Safety
// `params` must be a live handle; `out` must be writable.
CommhashStatus commhash_server_begin(const CommhashParams *params,
                                     uint16_t n,
                                     uint64_t seed,
                                     CommhashServer **out);

// The server's public key, needed by participants.
//
// # Safety
// `server` and `params` must be live handles.
CommhashStatus commhash_server_public_key(const CommhashServer *server,
                                          const CommhashParams *params,
                                          uint8_t *out,
                                          size_t cap,
                                          size_t *out_len);

// Encoded NONCE frame for participant `index` (1-based).
//
// # Safety
// `server` must be a live handle.
CommhashStatus commhash_server_nonce_frame(const CommhashServer *server,
                                           uint16_t index,
                                           uint8_t *out,
                                           size_t cap,
                                           size_t *out_len);

// Check and record one encoded SHARE frame. Any failure is terminal.
//
// # Safety
// `server` must be a live handle; `frame` must point to `len` bytes.
CommhashStatus commhash_server_absorb(CommhashServer *server, const uint8_t *frame, size_t len);

// Store and return the digest once every share is in; fails with MISSING
// otherwise.
//
// # Safety
// `server` and `params` must be live handles.
CommhashStatus commhash_server_finalize(CommhashServer *server,
                                        const CommhashParams *params,
                                        uint8_t *out,
                                        size_t cap,
                                        size_t *out_len);

// Current phase. `error_code` receives the wire error code (1..5) when the
// phase is FAILED and 0 otherwise.
//
// # Safety
// `server` must be a live handle; `phase` and `error_code` writable.
CommhashStatus commhash_server_phase(const CommhashServer *server,
                                     CommhashPhase *phase,
                                     uint8_t *error_code);

// # Safety
// `server` must be NULL or a handle not yet freed.
void commhash_server_free(CommhashServer *server);

// Participant `index` (1-based). When `is_owner` is true, `m` is the
// encoded message scalar; otherwise it is ignored and may be NULL.
//
// # Safety
// Handles must be live; byte arguments must point to the given lengths.
CommhashStatus commhash_participant_new(const CommhashParams *params,
                                        uint16_t index,
                                        const CommhashKeys *keys,
                                        bool is_owner,
                                        const uint8_t *m,
                                        size_t m_len,
                                        const uint8_t *server_public,
                                        size_t server_public_len,
                                        uint64_t seed,
                                        CommhashParticipant **out);

// Answer an encoded NONCE frame with an encoded SHARE frame.
//
// # Safety
// `participant` must be a live handle; `frame` must point to `len` bytes.
CommhashStatus commhash_participant_respond(CommhashParticipant *participant,
                                            const uint8_t *frame,
                                            size_t len,
                                            uint8_t *out,
                                            size_t cap,
                                            size_t *out_len);

// # Safety
// `participant` must be NULL or a handle not yet freed.
void commhash_participant_free(CommhashParticipant *participant);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COMMHASH_H */
