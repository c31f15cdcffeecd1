// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

//! Prime-order (or safe-prime) groups in which the hash is evaluated.
//!
//! Two backends share one interface:
//!
//! * `Modp`: the multiplicative group mod a safe prime `p = 2q + 1`. In
//!   SUBGROUP mode both generators have order `q` and exponents live in
//!   `Z_q`; in PRIMITIVE mode both generators have order `p - 1` and
//!   exponents live in `Z_{p-1}`.
//! * `Ec`: a prime-order short-Weierstrass curve; exponents live in `Z_n`.
//!
//! The second generator is always derived by hashing a public label into the
//! group, so its discrete log relative to the first is unknown.

pub mod ec;
pub mod fixtures;
pub mod prime;
mod scalar;

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use sha2::{Digest, Sha256};

pub use ec::{Curve, Point};
pub use scalar::{Scalar, ScalarField, ScalarOp};

use crate::error::{Error, Result};
use scalar::{byte_len, to_fixed_be};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Modp,
    Ec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModpMode {
    /// Generators of order q (squares of primitive roots).
    Subgroup,
    /// Generators of order p - 1.
    Primitive,
}

impl ModpMode {
    fn tag(self) -> u8 {
        match self {
            ModpMode::Subgroup => 0x01,
            ModpMode::Primitive => 0x02,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupSize {
    /// p = 23 for MODP, the 19-point curve over GF(17) for EC.
    Toy,
    Bits(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModpParams {
    pub p: BigUint,
    pub q: BigUint,
    pub a: BigUint,
    pub b: BigUint,
    pub mode: ModpMode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EcParams {
    pub curve: Curve,
    pub gen_a: Point,
    pub gen_b: Point,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKind {
    Modp(ModpParams),
    Ec(EcParams),
}

/// A complete, immutable group instantiation.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupParams {
    kind: GroupKind,
    provenance: String,
    scalars: ScalarField,
}

impl fmt::Debug for GroupParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GroupKind::Modp(m) => write!(
                f,
                "GroupParams(MODP {:?}, {} bits, a={}, b=<{}>)",
                m.mode,
                m.p.bits(),
                if m.p.bits() <= 64 { m.a.to_string() } else { "…".into() },
                self.provenance
            ),
            GroupKind::Ec(e) => write!(f, "GroupParams(EC {}, B=<{}>)", e.curve.name, self.provenance),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum GroupElement {
    Modp(BigUint),
    Ec(Point),
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Modp(v) => write!(f, "Modp({v})"),
            GroupElement::Ec(p) => write!(f, "Ec({p:?})"),
        }
    }
}

/// A broken group invariant, reported by [`GroupParams::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    PNotPrime,
    QNotPrime,
    NotSafePrime,
    AWrongOrder,
    BWrongOrder,
    GeneratorsEqual,
    FieldNotPrime,
    OrderNotPrime,
    SingularCurve,
    ANotOnCurve,
    BNotOnCurve,
    AIsIdentity,
    BIsIdentity,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Violation::PNotPrime => "p not prime",
            Violation::QNotPrime => "q not prime",
            Violation::NotSafePrime => "p != 2q + 1",
            Violation::AWrongOrder => "a has wrong order",
            Violation::BWrongOrder => "b has wrong order",
            Violation::GeneratorsEqual => "a and b coincide",
            Violation::FieldNotPrime => "field prime not prime",
            Violation::OrderNotPrime => "group order not prime",
            Violation::SingularCurve => "curve is singular",
            Violation::ANotOnCurve => "A not on curve or not of order n",
            Violation::BNotOnCurve => "B not on curve or not of order n",
            Violation::AIsIdentity => "A is the identity",
            Violation::BIsIdentity => "B is the identity",
        })
    }
}

const TAG_MODP: u8 = 0x01;
const TAG_EC: u8 = 0x02;
const H2G_ATTEMPTS: u32 = 10_000;

impl GroupParams {
    /// Assemble MODP parameters without checking them; see [`Self::validate`].
    pub fn modp(params: ModpParams, provenance: impl Into<String>) -> Self {
        let modulus = match params.mode {
            ModpMode::Subgroup => params.q.clone(),
            ModpMode::Primitive => &params.p - 1u32,
        };
        Self {
            kind: GroupKind::Modp(params),
            provenance: provenance.into(),
            scalars: ScalarField::new(modulus),
        }
    }

    pub fn ec(curve: Curve, gen_a: Point, gen_b: Point, provenance: impl Into<String>) -> Self {
        let scalars = ScalarField::new(curve.n.clone());
        Self {
            kind: GroupKind::Ec(EcParams {
                curve,
                gen_a,
                gen_b,
            }),
            provenance: provenance.into(),
            scalars,
        }
    }

    /// p = 23, q = 11, a = 2, b = 3 (both of order 11).
    pub fn toy_subgroup() -> Self {
        Self::modp(
            ModpParams {
                p: 23u32.into(),
                q: 11u32.into(),
                a: 2u32.into(),
                b: 3u32.into(),
                mode: ModpMode::Subgroup,
            },
            "fixture:toy-23",
        )
    }

    /// p = 23, q = 11, a = 5, b = 7 (both primitive).
    pub fn toy_primitive() -> Self {
        Self::modp(
            ModpParams {
                p: 23u32.into(),
                q: 11u32.into(),
                a: 5u32.into(),
                b: 7u32.into(),
                mode: ModpMode::Primitive,
            },
            "fixture:toy-23",
        )
    }

    /// The 19-point curve over GF(17) with A = (5, 1) and a hash-derived B.
    pub fn toy_ec() -> Self {
        let (curve, a) = fixtures::toy_curve();
        let label = "commhash/toy-gf17/B";
        let b = derive_ec_generator(&curve, label.as_bytes()).expect("toy curve admits H2G");
        Self::ec(curve, a, b, label)
    }

    pub fn secp256k1() -> Self {
        let (curve, a) = fixtures::secp256k1();
        let label = "commhash/secp256k1/B";
        let b = derive_ec_generator(&curve, label.as_bytes()).expect("secp256k1 admits H2G");
        Self::ec(curve, a, b, label)
    }

    /// RFC 3526 2048-bit safe prime.
    pub fn modp_2048(mode: ModpMode) -> Self {
        Self::from_safe_prime(fixtures::modp_2048_prime(), mode, "commhash/modp-2048/b")
    }

    /// RFC 3526 3072-bit safe prime.
    pub fn modp_3072(mode: ModpMode) -> Self {
        Self::from_safe_prime(fixtures::modp_3072_prime(), mode, "commhash/modp-3072/b")
    }

    /// `a` is the smallest primitive root (squared in SUBGROUP mode); `b` is
    /// hashed from `label`.
    fn from_safe_prime(p: BigUint, mode: ModpMode, label: &str) -> Self {
        let q: BigUint = (&p - 1u32) >> 1;
        let g = prime::smallest_primitive_root(&p, &q);
        let a = match mode {
            ModpMode::Subgroup => &g * &g % &p,
            ModpMode::Primitive => g,
        };
        let b = derive_modp_generator(&p, &q, mode, label.as_bytes())
            .expect("safe prime admits H2G");
        Self::modp(ModpParams { p, q, a, b, mode }, label)
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn backend(&self) -> Backend {
        match self.kind {
            GroupKind::Modp(_) => Backend::Modp,
            GroupKind::Ec(_) => Backend::Ec,
        }
    }

    pub fn mode(&self) -> Option<ModpMode> {
        match &self.kind {
            GroupKind::Modp(m) => Some(m.mode),
            GroupKind::Ec(_) => None,
        }
    }

    /// True when the exponent ring is a prime field.
    pub fn has_prime_order(&self) -> bool {
        self.mode() != Some(ModpMode::Primitive)
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Exponent ring `Z_M`.
    pub fn scalars(&self) -> &ScalarField {
        &self.scalars
    }

    /// Upper bound for freshly sampled secret keys. Keys are drawn from
    /// `[0, q)` for MODP (both modes) and `[0, n)` for EC.
    pub fn key_bound(&self) -> &BigUint {
        match &self.kind {
            GroupKind::Modp(m) => &m.q,
            GroupKind::Ec(e) => &e.curve.n,
        }
    }

    pub fn random_key<R: rand::RngCore + ?Sized>(&self, rng: &mut R) -> Scalar {
        self.scalars.random_below(self.key_bound(), rng)
    }

    pub fn identity(&self) -> GroupElement {
        match self.kind {
            GroupKind::Modp(_) => GroupElement::Modp(BigUint::one()),
            GroupKind::Ec(_) => GroupElement::Ec(Point::Identity),
        }
    }

    pub fn gen_a(&self) -> GroupElement {
        match &self.kind {
            GroupKind::Modp(m) => GroupElement::Modp(m.a.clone()),
            GroupKind::Ec(e) => GroupElement::Ec(e.gen_a.clone()),
        }
    }

    pub fn gen_b(&self) -> GroupElement {
        match &self.kind {
            GroupKind::Modp(m) => GroupElement::Modp(m.b.clone()),
            GroupKind::Ec(e) => GroupElement::Ec(e.gen_b.clone()),
        }
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        match g {
            GroupElement::Modp(v) => v.is_one(),
            GroupElement::Ec(p) => p.is_identity(),
        }
    }

    pub fn power(&self, base: &GroupElement, e: &Scalar) -> Result<GroupElement> {
        self.power_raw(base, e.value())
    }

    /// Exponentiation by an unreduced integer.
    pub fn power_raw(&self, base: &GroupElement, e: &BigUint) -> Result<GroupElement> {
        match (&self.kind, base) {
            (GroupKind::Modp(m), GroupElement::Modp(v)) => {
                Ok(GroupElement::Modp(v.modpow(e, &m.p)))
            }
            (GroupKind::Ec(c), GroupElement::Ec(pt)) => Ok(GroupElement::Ec(c.curve.mul(pt, e))),
            _ => Err(Error::BackendMismatch),
        }
    }

    /// The group law (product mod p, or point addition).
    pub fn combine(&self, g1: &GroupElement, g2: &GroupElement) -> Result<GroupElement> {
        match (&self.kind, g1, g2) {
            (GroupKind::Modp(m), GroupElement::Modp(u), GroupElement::Modp(v)) => {
                Ok(GroupElement::Modp(u * v % &m.p))
            }
            (GroupKind::Ec(c), GroupElement::Ec(u), GroupElement::Ec(v)) => {
                Ok(GroupElement::Ec(c.curve.add(u, v)))
            }
            _ => Err(Error::BackendMismatch),
        }
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        match (&self.kind, g) {
            (GroupKind::Modp(m), GroupElement::Modp(v)) => {
                Ok(GroupElement::Modp(v.modpow(&(&m.p - 2u32), &m.p)))
            }
            (GroupKind::Ec(c), GroupElement::Ec(pt)) => Ok(GroupElement::Ec(c.curve.negate(pt))),
            _ => Err(Error::BackendMismatch),
        }
    }

    /// Membership in the group generated by `a`: for SUBGROUP the
    /// quadratic residues, for PRIMITIVE all of `Z_p^*`, for EC the curve.
    pub fn contains(&self, g: &GroupElement) -> bool {
        match (&self.kind, g) {
            (GroupKind::Modp(m), GroupElement::Modp(v)) => {
                if v.is_zero() || v >= &m.p {
                    return false;
                }
                match m.mode {
                    ModpMode::Subgroup => v.modpow(&m.q, &m.p).is_one(),
                    ModpMode::Primitive => true,
                }
            }
            (GroupKind::Ec(c), GroupElement::Ec(pt)) => c.curve.is_on_curve(pt),
            _ => false,
        }
    }

    /// Encoded size of a non-identity element.
    pub fn element_width(&self) -> usize {
        match &self.kind {
            GroupKind::Modp(m) => byte_len(&m.p),
            GroupKind::Ec(c) => 1 + c.curve.coord_width(),
        }
    }

    pub fn encode_element(&self, g: &GroupElement) -> Result<Vec<u8>> {
        match (&self.kind, g) {
            (GroupKind::Modp(m), GroupElement::Modp(v)) => Ok(to_fixed_be(v, byte_len(&m.p))),
            (GroupKind::Ec(c), GroupElement::Ec(pt)) => Ok(c.curve.encode_point(pt)),
            _ => Err(Error::BackendMismatch),
        }
    }

    pub fn decode_element(&self, bytes: &[u8]) -> Result<GroupElement> {
        match &self.kind {
            GroupKind::Modp(m) => {
                if bytes.len() != byte_len(&m.p) {
                    return Err(Error::Malformed("element has wrong length"));
                }
                let v = BigUint::from_bytes_be(bytes);
                if v >= m.p {
                    return Err(Error::NonCanonical("element not reduced mod p"));
                }
                let g = GroupElement::Modp(v);
                if !self.contains(&g) {
                    return Err(Error::NotInGroup);
                }
                Ok(g)
            }
            GroupKind::Ec(c) => Ok(GroupElement::Ec(c.curve.decode_point(bytes)?)),
        }
    }

    /// Length of the element encoding at the head of `bytes`, without
    /// decoding it.
    pub fn element_len_prefix(&self, bytes: &[u8]) -> Result<usize> {
        match &self.kind {
            GroupKind::Modp(_) => Ok(self.element_width()),
            GroupKind::Ec(_) => match bytes.first() {
                Some(0x00) => Ok(1),
                Some(_) => Ok(self.element_width()),
                None => Err(Error::Malformed("missing element")),
            },
        }
    }

    pub fn encode_scalar(&self, s: &Scalar) -> Vec<u8> {
        self.scalars.encode(s)
    }

    pub fn decode_scalar(&self, bytes: &[u8]) -> Result<Scalar> {
        self.scalars.decode(bytes)
    }

    /// `tag ‖ mode ‖ fields…`, every field prefixed with a u16-BE length.
    /// MODP fields: p, q, a, b (minimal big-endian). EC fields: curve id,
    /// A, B (compressed). The provenance label follows as a final field.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        match &self.kind {
            GroupKind::Modp(m) => {
                out.push(TAG_MODP);
                out.push(m.mode.tag());
                for v in [&m.p, &m.q, &m.a, &m.b] {
                    put_field(&mut out, &v.to_bytes_be());
                }
            }
            GroupKind::Ec(e) => {
                out.push(TAG_EC);
                out.push(0x00);
                put_field(&mut out, e.curve.name.as_bytes());
                put_field(&mut out, &e.curve.encode_point(&e.gen_a));
                put_field(&mut out, &e.curve.encode_point(&e.gen_b));
            }
        }
        put_field(&mut out, self.provenance.as_bytes());
        out
    }

    /// Structural decoding only; call [`Self::validate`] to check primality
    /// and generator orders.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut rd = FieldReader { buf: bytes };
        let tag = rd.byte()?;
        let mode = rd.byte()?;
        let params = match tag {
            TAG_MODP => {
                let mode = match mode {
                    0x01 => ModpMode::Subgroup,
                    0x02 => ModpMode::Primitive,
                    _ => return Err(Error::Malformed("unknown MODP mode")),
                };
                let mut vals = Vec::with_capacity(4);
                for _ in 0..4 {
                    let f = rd.field()?;
                    if f.is_empty() || f[0] == 0 {
                        return Err(Error::NonCanonical("integer field not minimal"));
                    }
                    vals.push(BigUint::from_bytes_be(f));
                }
                let b = vals.pop().unwrap();
                let a = vals.pop().unwrap();
                let q = vals.pop().unwrap();
                let p = vals.pop().unwrap();
                if p < BigUint::from(5u32) || a >= p || b >= p || a < BigUint::from(2u32) || b < BigUint::from(2u32) {
                    return Err(Error::Malformed("MODP field out of range"));
                }
                let provenance = rd.text()?;
                Self::modp(ModpParams { p, q, a, b, mode }, provenance)
            }
            TAG_EC => {
                if mode != 0x00 {
                    return Err(Error::Malformed("EC params carry no mode"));
                }
                let name = std::str::from_utf8(rd.field()?)
                    .map_err(|_| Error::Malformed("curve id not UTF-8"))?;
                let (curve, _) =
                    fixtures::curve_by_name(name).ok_or(Error::Malformed("unknown curve id"))?;
                let gen_a = curve.decode_point(rd.field()?)?;
                let gen_b = curve.decode_point(rd.field()?)?;
                if gen_a.is_identity() || gen_b.is_identity() {
                    return Err(Error::NotInGroup);
                }
                let provenance = rd.text()?;
                Self::ec(curve, gen_a, gen_b, provenance)
            }
            _ => return Err(Error::Malformed("unknown group tag")),
        };
        if !rd.buf.is_empty() {
            return Err(Error::Malformed("trailing bytes after params"));
        }
        Ok(params)
    }

    /// SHA-256 of [`Self::to_bytes`].
    pub fn fingerprint(&self) -> [u8; 32] {
        Sha256::digest(self.to_bytes()).into()
    }

    /// Check every invariant; an empty list means the parameters are sound.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        match &self.kind {
            GroupKind::Modp(m) => {
                let p_prime = prime::is_probable_prime(&m.p);
                if !p_prime {
                    out.push(Violation::PNotPrime);
                }
                if !prime::is_probable_prime(&m.q) {
                    out.push(Violation::QNotPrime);
                }
                if m.p != (&m.q << 1) + 1u32 {
                    out.push(Violation::NotSafePrime);
                }
                let has_order = |g: &BigUint| -> bool {
                    let g = g % &m.p;
                    if g.is_zero() || g.is_one() {
                        return false;
                    }
                    let gq = g.modpow(&m.q, &m.p);
                    match m.mode {
                        ModpMode::Subgroup => gq.is_one(),
                        ModpMode::Primitive => gq == &m.p - 1u32 && !(&g * &g % &m.p).is_one(),
                    }
                };
                if !has_order(&m.a) {
                    out.push(Violation::AWrongOrder);
                }
                if !has_order(&m.b) {
                    out.push(Violation::BWrongOrder);
                }
                if m.a == m.b {
                    out.push(Violation::GeneratorsEqual);
                }
            }
            GroupKind::Ec(e) => {
                let c = &e.curve;
                if !prime::is_probable_prime(&c.p) {
                    out.push(Violation::FieldNotPrime);
                }
                if !prime::is_probable_prime(&c.n) {
                    out.push(Violation::OrderNotPrime);
                }
                if !c.is_nonsingular() {
                    out.push(Violation::SingularCurve);
                }
                let check = |g: &Point, ident: Violation, off: Violation, out: &mut Vec<Violation>| {
                    if g.is_identity() {
                        out.push(ident);
                    } else if !c.is_on_curve(g) || !c.mul(g, &c.n).is_identity() {
                        out.push(off);
                    }
                };
                check(&e.gen_a, Violation::AIsIdentity, Violation::ANotOnCurve, &mut out);
                check(&e.gen_b, Violation::BIsIdentity, Violation::BNotOnCurve, &mut out);
                if e.gen_a == e.gen_b {
                    out.push(Violation::GeneratorsEqual);
                }
            }
        }
        out
    }

    /// Hash `label` to a fresh generator with the same order requirements as
    /// `a`. The result is deterministic in `(self, label)`; `b` of `self` is
    /// not consulted.
    pub fn derive_second_generator(&self, label: &[u8]) -> Result<GroupElement> {
        match &self.kind {
            GroupKind::Modp(m) => {
                derive_modp_generator(&m.p, &m.q, m.mode, label).map(GroupElement::Modp)
            }
            GroupKind::Ec(e) => derive_ec_generator(&e.curve, label).map(GroupElement::Ec),
        }
    }

    /// A copy of these parameters with `b` replaced by the hash of `label`.
    pub fn with_derived_b(&self, label: &str) -> Result<Self> {
        let b = self.derive_second_generator(label.as_bytes())?;
        Ok(match (&self.kind, b) {
            (GroupKind::Modp(m), GroupElement::Modp(b)) => {
                Self::modp(ModpParams { b, ..m.clone() }, label)
            }
            (GroupKind::Ec(e), GroupElement::Ec(b)) => {
                Self::ec(e.curve.clone(), e.gen_a.clone(), b, label)
            }
            _ => unreachable!("derivation preserves backend"),
        })
    }
}

/// Produce parameters for `backend` at `size`.
///
/// * MODP toy: the p = 23 fixtures. MODP 2048/3072: RFC 3526 primes.
///   MODP 6..=1024 bits: seeded safe-prime search.
/// * EC toy: the GF(17) curve. EC 256: secp256k1.
///
/// `mode` is ignored for EC; `seed` only matters for searched primes.
pub fn generate_group(backend: Backend, size: GroupSize, mode: ModpMode, seed: u64) -> Result<GroupParams> {
    match (backend, size) {
        (Backend::Modp, GroupSize::Toy) => Ok(match mode {
            ModpMode::Subgroup => GroupParams::toy_subgroup(),
            ModpMode::Primitive => GroupParams::toy_primitive(),
        }),
        (Backend::Modp, GroupSize::Bits(2048)) => Ok(GroupParams::modp_2048(mode)),
        (Backend::Modp, GroupSize::Bits(3072)) => Ok(GroupParams::modp_3072(mode)),
        (Backend::Modp, GroupSize::Bits(bits @ 6..=1024)) => {
            let (p, _) = prime::find_safe_prime(bits, seed)?;
            Ok(GroupParams::from_safe_prime(
                p,
                mode,
                &format!("commhash/modp-{bits}-seed-{seed}/b"),
            ))
        }
        (Backend::Ec, GroupSize::Toy) => Ok(GroupParams::toy_ec()),
        (Backend::Ec, GroupSize::Bits(256)) => Ok(GroupParams::secp256k1()),
        (b, s) => Err(Error::UnsupportedSize(format!("{b:?} at {s:?}"))),
    }
}

fn expand(label: &[u8], counter: u32, len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len + 32);
    let mut block = 0u32;
    while out.len() < len {
        let mut h = Sha256::new();
        h.update(b"commhash-h2g");
        h.update(counter.to_be_bytes());
        h.update(block.to_be_bytes());
        h.update(label);
        out.extend_from_slice(&h.finalize());
        block += 1;
    }
    out.truncate(len);
    out
}

fn derive_modp_generator(p: &BigUint, q: &BigUint, mode: ModpMode, label: &[u8]) -> Result<BigUint> {
    if label.is_empty() {
        return Err(Error::Malformed("empty generator label"));
    }
    let len = byte_len(p) + 16;
    for ctr in 0..H2G_ATTEMPTS {
        let c = BigUint::from_bytes_be(&expand(label, ctr, len)) % p;
        match mode {
            ModpMode::Subgroup => {
                let sq = &c * &c % p;
                if !sq.is_zero() && !sq.is_one() {
                    return Ok(sq);
                }
            }
            ModpMode::Primitive => {
                if prime::is_primitive_root(&c, p, q) {
                    return Ok(c);
                }
            }
        }
    }
    Err(Error::SearchExhausted(H2G_ATTEMPTS as usize))
}

/// Try-and-increment: hash to x, keep the first x with a square root.
fn derive_ec_generator(curve: &Curve, label: &[u8]) -> Result<Point> {
    if label.is_empty() {
        return Err(Error::Malformed("empty generator label"));
    }
    let len = curve.coord_width() + 17;
    for ctr in 0..H2G_ATTEMPTS {
        let bytes = expand(label, ctr, len);
        let x = BigUint::from_bytes_be(&bytes[1..]) % &curve.p;
        if let Some(y) = curve.lift_x(&x, bytes[0] & 1 == 1) {
            let pt = Point::Affine { x, y };
            if !pt.is_identity() {
                return Ok(pt);
            }
        }
    }
    Err(Error::SearchExhausted(H2G_ATTEMPTS as usize))
}

fn put_field(out: &mut Vec<u8>, f: &[u8]) {
    let len = u16::try_from(f.len()).expect("field shorter than 64 KiB");
    out.extend_from_slice(&len.to_be_bytes());
    out.extend_from_slice(f);
}

struct FieldReader<'a> {
    buf: &'a [u8],
}

impl<'a> FieldReader<'a> {
    fn byte(&mut self) -> Result<u8> {
        let (&b, rest) = self.buf.split_first().ok_or(Error::Malformed("truncated params"))?;
        self.buf = rest;
        Ok(b)
    }

    fn field(&mut self) -> Result<&'a [u8]> {
        if self.buf.len() < 2 {
            return Err(Error::Malformed("truncated params"));
        }
        let len = u16::from_be_bytes([self.buf[0], self.buf[1]]) as usize;
        let rest = &self.buf[2..];
        if rest.len() < len {
            return Err(Error::Malformed("truncated params"));
        }
        let (f, rest) = rest.split_at(len);
        self.buf = rest;
        Ok(f)
    }

    fn text(&mut self) -> Result<String> {
        String::from_utf8(self.field()?.to_vec()).map_err(|_| Error::Malformed("label not UTF-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order_mod(g: u64, p: u64) -> u64 {
        let mut x = g % p;
        let mut k = 1;
        while x != 1 {
            x = x * g % p;
            k += 1;
        }
        k
    }

    #[test]
    fn toy_fixtures_have_the_right_orders() {
        // oracle: enumerate powers
        assert_eq!(order_mod(2, 23), 11);
        assert_eq!(order_mod(3, 23), 11);
        assert_eq!(order_mod(5, 23), 22);
        assert_eq!(order_mod(7, 23), 22);
        assert!(GroupParams::toy_subgroup().validate().is_empty());
        assert!(GroupParams::toy_primitive().validate().is_empty());
        assert!(GroupParams::toy_ec().validate().is_empty());
    }

    #[test]
    fn generate_toy_modp() {
        let g = generate_group(Backend::Modp, GroupSize::Toy, ModpMode::Subgroup, 1).unwrap();
        assert_eq!(g, GroupParams::toy_subgroup());
        let g = generate_group(Backend::Modp, GroupSize::Toy, ModpMode::Primitive, 2).unwrap();
        assert_eq!(g, GroupParams::toy_primitive());
    }

    #[test]
    fn secp256k1_fixture() {
        let g = generate_group(Backend::Ec, GroupSize::Bits(256), ModpMode::Subgroup, 0).unwrap();
        assert_eq!(g.backend(), Backend::Ec);
        assert!(g.validate().is_empty());
        let enc = g.encode_element(&g.gen_a()).unwrap();
        assert_eq!(enc.len(), 33);
        assert_eq!(enc[0], 0x02);
        assert_eq!(
            enc[1..].iter().map(|b| format!("{b:02X}")).collect::<String>(),
            "79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798"
        );
        assert_eq!(g.decode_element(&enc).unwrap(), g.gen_a());
        assert!(matches!(g.decode_element(&[0x02; 34]), Err(Error::Malformed(_))));
    }

    #[test]
    fn seeded_search_produces_valid_groups() {
        for mode in [ModpMode::Subgroup, ModpMode::Primitive] {
            let g = generate_group(Backend::Modp, GroupSize::Bits(96), mode, 42).unwrap();
            assert!(g.validate().is_empty(), "{:?}", g.validate());
            let again = generate_group(Backend::Modp, GroupSize::Bits(96), mode, 42).unwrap();
            assert_eq!(g, again);
        }
    }

    #[test]
    fn rfc3526_groups_validate() {
        assert!(GroupParams::modp_2048(ModpMode::Subgroup).validate().is_empty());
        assert!(GroupParams::modp_3072(ModpMode::Primitive).validate().is_empty());
    }

    #[test]
    fn unsupported_sizes() {
        assert!(generate_group(Backend::Ec, GroupSize::Bits(384), ModpMode::Subgroup, 0).is_err());
        assert!(generate_group(Backend::Modp, GroupSize::Bits(4096), ModpMode::Subgroup, 0).is_err());
    }

    #[test]
    fn validate_reports_violations() {
        let bad_p = GroupParams::modp(
            ModpParams {
                p: 25u32.into(),
                q: 12u32.into(),
                a: 2u32.into(),
                b: 3u32.into(),
                mode: ModpMode::Subgroup,
            },
            "test",
        );
        let v = bad_p.validate();
        assert!(v.contains(&Violation::PNotPrime));
        assert_eq!(Violation::PNotPrime.to_string(), "p not prime");

        let wrong_order = GroupParams::modp(
            ModpParams {
                a: 5u32.into(),
                ..match GroupParams::toy_subgroup().kind {
                    GroupKind::Modp(m) => m,
                    _ => unreachable!(),
                }
            },
            "test",
        );
        assert_eq!(wrong_order.validate(), vec![Violation::AWrongOrder]);
        assert_eq!(Violation::AWrongOrder.to_string(), "a has wrong order");
    }

    #[test]
    fn power_examples() {
        let g = GroupParams::toy_subgroup();
        let f = g.scalars();
        assert_eq!(
            g.power(&GroupElement::Modp(2u32.into()), &f.from_u64(7)).unwrap(),
            GroupElement::Modp(13u32.into())
        );
        assert!(g.is_identity(&g.power(&g.gen_b(), &f.zero()).unwrap()));
        assert!(g.is_identity(&g.power_raw(&g.gen_a(), &11u32.into()).unwrap()));

        let e = GroupParams::toy_ec();
        assert!(e.is_identity(&e.power_raw(&e.gen_a(), &19u32.into()).unwrap()));
        assert!(matches!(
            e.power(&g.gen_a(), &f.one()),
            Err(Error::BackendMismatch)
        ));
    }

    #[test]
    fn modp_encoding_is_fixed_width() {
        let g = GroupParams::toy_subgroup();
        let sixteen = GroupElement::Modp(16u32.into());
        assert_eq!(g.encode_element(&sixteen).unwrap(), vec![0x10]);
        assert_eq!(g.decode_element(&[0x10]).unwrap(), sixteen);
        // 5 is a non-residue mod 23
        assert!(matches!(g.decode_element(&[5]), Err(Error::NotInGroup)));
        assert!(matches!(g.decode_element(&[23]), Err(Error::NonCanonical(_))));

        let big = GroupParams::modp_2048(ModpMode::Subgroup);
        assert_eq!(big.encode_element(&big.identity()).unwrap().len(), 256);
    }

    #[test]
    fn derived_generator_properties() {
        let toy = GroupParams::toy_subgroup();
        let b1 = toy.derive_second_generator(b"label").unwrap();
        assert_eq!(b1, toy.derive_second_generator(b"label").unwrap());
        let GroupElement::Modp(v) = &b1 else { panic!() };
        let v = v.to_u64_digits()[0];
        assert_eq!(order_mod(v, 23), 11);
        assert!(toy.derive_second_generator(b"").is_err());

        let prim = GroupParams::toy_primitive();
        let GroupElement::Modp(v) = prim.derive_second_generator(b"x").unwrap() else { panic!() };
        assert_eq!(order_mod(v.to_u64_digits()[0], 23), 22);

        let k1 = GroupParams::secp256k1();
        assert_ne!(
            k1.derive_second_generator(b"commhash/one").unwrap(),
            k1.derive_second_generator(b"commhash/two").unwrap()
        );
    }

    #[test]
    fn params_round_trip() {
        for g in [
            GroupParams::toy_subgroup(),
            GroupParams::toy_primitive(),
            GroupParams::toy_ec(),
            GroupParams::secp256k1(),
            GroupParams::modp_2048(ModpMode::Subgroup),
        ] {
            let bytes = g.to_bytes();
            assert_eq!(bytes[0], if g.backend() == Backend::Modp { 1 } else { 2 });
            assert_eq!(GroupParams::from_bytes(&bytes).unwrap(), g);
            assert!(GroupParams::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        }
    }
}
