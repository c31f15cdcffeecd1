// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

//! Named parameter sets.

use num_bigint::BigUint;

use super::ec::{Curve, Point};

pub const SECP256K1: &str = "secp256k1";
pub const TOY_CURVE: &str = "toy-gf17";

fn hex(s: &str) -> BigUint {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    BigUint::parse_bytes(cleaned.as_bytes(), 16).expect("valid hex constant")
}

/// SEC 2 secp256k1 and its standard base point.
pub fn secp256k1() -> (Curve, Point) {
    let curve = Curve {
        name: SECP256K1.into(),
        p: hex("FFFFFFFF FFFFFFFF FFFFFFFF FFFFFFFF FFFFFFFF FFFFFFFF FFFFFFFE FFFFFC2F"),
        a: BigUint::from(0u32),
        b: BigUint::from(7u32),
        n: hex("FFFFFFFF FFFFFFFF FFFFFFFF FFFFFFFE BAAEDCE6 AF48A03B BFD25E8C D0364141"),
    };
    let g = Point::new(
        hex("79BE667E F9DCBBAC 55A06295 CE870B07 029BFCDB 2DCE28D9 59F2815B 16F81798"),
        hex("483ADA77 26A3C465 5DA4FBFC 0E1108A8 FD17B448 A6855419 9C47D08F FB10D4B8"),
    );
    (curve, g)
}

/// `y^2 = x^3 + 2x + 2` over GF(17): 19 points, generator (5, 1).
pub fn toy_curve() -> (Curve, Point) {
    let curve = Curve {
        name: TOY_CURVE.into(),
        p: BigUint::from(17u32),
        a: BigUint::from(2u32),
        b: BigUint::from(2u32),
        n: BigUint::from(19u32),
    };
    (curve, Point::new(5u32, 1u32))
}

pub fn curve_by_name(name: &str) -> Option<(Curve, Point)> {
    match name {
        SECP256K1 => Some(secp256k1()),
        TOY_CURVE => Some(toy_curve()),
        _ => None,
    }
}

/// RFC 3526 group 14.
pub fn modp_2048_prime() -> BigUint {
    hex("FFFFFFFF FFFFFFFF C90FDAA2 2168C234 C4C6628B 80DC1CD1
         29024E08 8A67CC74 020BBEA6 3B139B22 514A0879 8E3404DD
         EF9519B3 CD3A431B 302B0A6D F25F1437 4FE1356D 6D51C245
         E485B576 625E7EC6 F44C42E9 A637ED6B 0BFF5CB6 F406B7ED
         EE386BFB 5A899FA5 AE9F2411 7C4B1FE6 49286651 ECE45B3D
         C2007CB8 A163BF05 98DA4836 1C55D39A 69163FA8 FD24CF5F
         83655D23 DCA3AD96 1C62F356 208552BB 9ED52907 7096966D
         670C354E 4ABC9804 F1746C08 CA18217C 32905E46 2E36CE3B
         E39E772C 180E8603 9B2783A2 EC07A28F B5C55DF0 6F4C52C9
         DE2BCBF6 95581718 3995497C EA956AE5 15D22618 98FA0510
         15728E5A 8AACAA68 FFFFFFFF FFFFFFFF")
}

/// RFC 3526 group 15.
pub fn modp_3072_prime() -> BigUint {
    hex("FFFFFFFF FFFFFFFF C90FDAA2 2168C234 C4C6628B 80DC1CD1
         29024E08 8A67CC74 020BBEA6 3B139B22 514A0879 8E3404DD
         EF9519B3 CD3A431B 302B0A6D F25F1437 4FE1356D 6D51C245
         E485B576 625E7EC6 F44C42E9 A637ED6B 0BFF5CB6 F406B7ED
         EE386BFB 5A899FA5 AE9F2411 7C4B1FE6 49286651 ECE45B3D
         C2007CB8 A163BF05 98DA4836 1C55D39A 69163FA8 FD24CF5F
         83655D23 DCA3AD96 1C62F356 208552BB 9ED52907 7096966D
         670C354E 4ABC9804 F1746C08 CA18217C 32905E46 2E36CE3B
         E39E772C 180E8603 9B2783A2 EC07A28F B5C55DF0 6F4C52C9
         DE2BCBF6 95581718 3995497C EA956AE5 15D22618 98FA0510
         15728E5A 8AAAC42D AD33170D 04507A33 A85521AB DF1CBA64
         ECFB8504 58DBEF0A 8AEA7157 5D060C7D B3970F85 A6E1E4C7
         ABF5AE8C DB0933D7 1E8C94E0 4A25619D CEE3D226 1AD2EE6B
         F12FFA06 D98A0864 D8760273 3EC86A64 521F2B18 177B200C
         BBE11757 7A615D6C 770988C0 BAD946E2 08E24FA0 74E5AB31
         43DB5BFC E0FD108E 4B82D120 A93AD2CA FFFFFFFF FFFFFFFF")
}
