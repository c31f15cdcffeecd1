// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

//! Short-Weierstrass curves `y^2 = x^3 + ax + b` over a prime field.
//!
//! Points are stored affine; scalar multiplication runs in Jacobian
//! coordinates so only one inversion is paid per multiplication.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::prime::{is_odd, sqrt_mod};
use super::scalar::{byte_len, to_fixed_be};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Point {
    Identity,
    Affine { x: BigUint, y: BigUint },
}

impl std::fmt::Debug for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Point::Identity => write!(f, "O"),
            Point::Affine { x, y } => write!(f, "({x:#x}, {y:#x})"),
        }
    }
}

impl Point {
    pub fn new(x: impl Into<BigUint>, y: impl Into<BigUint>) -> Self {
        Point::Affine {
            x: x.into(),
            y: y.into(),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Point::Identity)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve {
    pub name: String,
    pub p: BigUint,
    pub a: BigUint,
    pub b: BigUint,
    /// Group order, assumed prime with cofactor 1.
    pub n: BigUint,
}

struct Jacobian {
    x: BigUint,
    y: BigUint,
    z: BigUint,
}

impl Curve {
    pub fn coord_width(&self) -> usize {
        byte_len(&self.p)
    }

    fn add_mod(&self, u: &BigUint, v: &BigUint) -> BigUint {
        (u + v) % &self.p
    }

    fn sub_mod(&self, u: &BigUint, v: &BigUint) -> BigUint {
        if u >= v {
            u - v
        } else {
            &self.p - (v - u)
        }
    }

    fn mul_mod(&self, u: &BigUint, v: &BigUint) -> BigUint {
        u * v % &self.p
    }

    fn inv_mod(&self, u: &BigUint) -> BigUint {
        // p prime: Fermat inversion.
        u.modpow(&(&self.p - 2u32), &self.p)
    }

    pub fn rhs(&self, x: &BigUint) -> BigUint {
        let x3 = self.mul_mod(&self.mul_mod(x, x), x);
        self.add_mod(&self.add_mod(&x3, &self.mul_mod(&self.a, x)), &self.b)
    }

    pub fn is_on_curve(&self, pt: &Point) -> bool {
        match pt {
            Point::Identity => true,
            Point::Affine { x, y } => {
                x < &self.p && y < &self.p && self.mul_mod(y, y) == self.rhs(x)
            }
        }
    }

    /// `4a^3 + 27b^2 != 0 (mod p)`
    pub fn is_nonsingular(&self) -> bool {
        let a3 = self.mul_mod(&self.mul_mod(&self.a, &self.a), &self.a);
        let b2 = self.mul_mod(&self.b, &self.b);
        let d = self.add_mod(
            &self.mul_mod(&BigUint::from(4u32), &a3),
            &self.mul_mod(&BigUint::from(27u32), &b2),
        );
        !d.is_zero()
    }

    pub fn negate(&self, pt: &Point) -> Point {
        match pt {
            Point::Identity => Point::Identity,
            Point::Affine { x, y } if y.is_zero() => Point::new(x.clone(), BigUint::zero()),
            Point::Affine { x, y } => Point::new(x.clone(), &self.p - y),
        }
    }

    pub fn add(&self, p1: &Point, p2: &Point) -> Point {
        let (x1, y1, x2, y2) = match (p1, p2) {
            (Point::Identity, q) | (q, Point::Identity) => return q.clone(),
            (Point::Affine { x: x1, y: y1 }, Point::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if self.add_mod(y1, y2).is_zero() {
                return Point::Identity;
            }
            // tangent: (3x^2 + a) / 2y
            let num = self.add_mod(
                &self.mul_mod(&BigUint::from(3u32), &self.mul_mod(x1, x1)),
                &self.a,
            );
            let den = self.mul_mod(&BigUint::from(2u32), y1);
            self.mul_mod(&num, &self.inv_mod(&den))
        } else {
            let num = self.sub_mod(y2, y1);
            let den = self.sub_mod(x2, x1);
            self.mul_mod(&num, &self.inv_mod(&den))
        };
        let x3 = self.sub_mod(&self.sub_mod(&self.mul_mod(&lambda, &lambda), x1), x2);
        let y3 = self.sub_mod(&self.mul_mod(&lambda, &self.sub_mod(x1, &x3)), y1);
        Point::new(x3, y3)
    }

    fn to_jacobian(&self, pt: &Point) -> Jacobian {
        match pt {
            Point::Identity => Jacobian {
                x: BigUint::one(),
                y: BigUint::one(),
                z: BigUint::zero(),
            },
            Point::Affine { x, y } => Jacobian {
                x: x.clone(),
                y: y.clone(),
                z: BigUint::one(),
            },
        }
    }

    fn from_jacobian(&self, j: &Jacobian) -> Point {
        if j.z.is_zero() {
            return Point::Identity;
        }
        let zi = self.inv_mod(&j.z);
        let zi2 = self.mul_mod(&zi, &zi);
        let zi3 = self.mul_mod(&zi2, &zi);
        Point::new(self.mul_mod(&j.x, &zi2), self.mul_mod(&j.y, &zi3))
    }

    fn jac_double(&self, j: &Jacobian) -> Jacobian {
        if j.z.is_zero() || j.y.is_zero() {
            return Jacobian {
                x: BigUint::one(),
                y: BigUint::one(),
                z: BigUint::zero(),
            };
        }
        let yy = self.mul_mod(&j.y, &j.y);
        let s = self.mul_mod(&BigUint::from(4u32), &self.mul_mod(&j.x, &yy));
        let xx = self.mul_mod(&j.x, &j.x);
        let mut m = self.mul_mod(&BigUint::from(3u32), &xx);
        if !self.a.is_zero() {
            let zz = self.mul_mod(&j.z, &j.z);
            m = self.add_mod(&m, &self.mul_mod(&self.a, &self.mul_mod(&zz, &zz)));
        }
        let x3 = self.sub_mod(&self.mul_mod(&m, &m), &self.add_mod(&s, &s));
        let yyyy8 = self.mul_mod(&BigUint::from(8u32), &self.mul_mod(&yy, &yy));
        let y3 = self.sub_mod(&self.mul_mod(&m, &self.sub_mod(&s, &x3)), &yyyy8);
        let z3 = self.mul_mod(&BigUint::from(2u32), &self.mul_mod(&j.y, &j.z));
        Jacobian { x: x3, y: y3, z: z3 }
    }

    /// Mixed addition: `j + (x2, y2)` with the second operand affine.
    fn jac_add_affine(&self, j: &Jacobian, x2: &BigUint, y2: &BigUint) -> Jacobian {
        if j.z.is_zero() {
            return Jacobian {
                x: x2.clone(),
                y: y2.clone(),
                z: BigUint::one(),
            };
        }
        let z1z1 = self.mul_mod(&j.z, &j.z);
        let u2 = self.mul_mod(x2, &z1z1);
        let s2 = self.mul_mod(y2, &self.mul_mod(&j.z, &z1z1));
        if u2 == j.x {
            if s2 == j.y {
                return self.jac_double(j);
            }
            return Jacobian {
                x: BigUint::one(),
                y: BigUint::one(),
                z: BigUint::zero(),
            };
        }
        let h = self.sub_mod(&u2, &j.x);
        let r = self.sub_mod(&s2, &j.y);
        let hh = self.mul_mod(&h, &h);
        let hhh = self.mul_mod(&hh, &h);
        let v = self.mul_mod(&j.x, &hh);
        let x3 = self.sub_mod(
            &self.sub_mod(&self.mul_mod(&r, &r), &hhh),
            &self.add_mod(&v, &v),
        );
        let y3 = self.sub_mod(
            &self.mul_mod(&r, &self.sub_mod(&v, &x3)),
            &self.mul_mod(&j.y, &hhh),
        );
        let z3 = self.mul_mod(&j.z, &h);
        Jacobian { x: x3, y: y3, z: z3 }
    }

    /// `k * pt` for any non-negative `k` (not reduced mod n).
    pub fn mul(&self, pt: &Point, k: &BigUint) -> Point {
        let (x, y) = match pt {
            Point::Identity => return Point::Identity,
            Point::Affine { x, y } => (x, y),
        };
        if k.is_zero() {
            return Point::Identity;
        }
        let mut acc = self.to_jacobian(&Point::Identity);
        for i in (0..k.bits()).rev() {
            acc = self.jac_double(&acc);
            if k.bit(i) {
                acc = self.jac_add_affine(&acc, x, y);
            }
        }
        self.from_jacobian(&acc)
    }

    /// SEC1 compressed encoding; the identity is the single byte 0x00.
    pub fn encode_point(&self, pt: &Point) -> Vec<u8> {
        match pt {
            Point::Identity => vec![0x00],
            Point::Affine { x, y } => {
                let mut out = Vec::with_capacity(1 + self.coord_width());
                out.push(if is_odd(y) { 0x03 } else { 0x02 });
                out.extend(to_fixed_be(x, self.coord_width()));
                out
            }
        }
    }

    pub fn decode_point(&self, bytes: &[u8]) -> Result<Point> {
        match bytes.first() {
            None => Err(Error::Malformed("empty point encoding")),
            Some(0x00) if bytes.len() == 1 => Ok(Point::Identity),
            Some(0x00) => Err(Error::Malformed("identity encoding has trailing bytes")),
            Some(&tag @ (0x02 | 0x03)) => {
                if bytes.len() != 1 + self.coord_width() {
                    return Err(Error::Malformed("compressed point has wrong length"));
                }
                let x = BigUint::from_bytes_be(&bytes[1..]);
                if x >= self.p {
                    return Err(Error::NonCanonical("x coordinate not reduced"));
                }
                let y = self.lift_x(&x, tag == 0x03).ok_or(Error::NotInGroup)?;
                Ok(Point::Affine { x, y })
            }
            Some(_) => Err(Error::Malformed("unknown point prefix")),
        }
    }

    /// The `y` with the requested parity on the curve above `x`, if any.
    pub fn lift_x(&self, x: &BigUint, odd: bool) -> Option<BigUint> {
        let y = sqrt_mod(&self.rhs(x), &self.p)?;
        if y.is_zero() {
            return if odd { None } else { Some(y) };
        }
        Some(if is_odd(&y) == odd { y } else { &self.p - y })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Curve {
        Curve {
            name: "test".into(),
            p: 17u32.into(),
            a: 2u32.into(),
            b: 2u32.into(),
            n: 19u32.into(),
        }
    }

    #[test]
    fn toy_curve_has_19_points() {
        let c = toy();
        let affine = (0u32..17)
            .flat_map(|x| (0u32..17).map(move |y| (x, y)))
            .filter(|&(x, y)| c.is_on_curve(&Point::new(x, y)))
            .count();
        assert_eq!(affine + 1, 19);
    }

    #[test]
    fn jacobian_mul_matches_repeated_affine_add() {
        let c = toy();
        let g = Point::new(5u32, 1u32);
        let mut acc = Point::Identity;
        for k in 0u32..40 {
            assert_eq!(c.mul(&g, &BigUint::from(k)), acc, "k = {k}");
            acc = c.add(&acc, &g);
        }
        assert!(c.mul(&g, &19u32.into()).is_identity());
    }

    #[test]
    fn compressed_round_trip_on_every_toy_point() {
        let c = toy();
        let g = Point::new(5u32, 1u32);
        for k in 0u32..19 {
            let pt = c.mul(&g, &k.into());
            let enc = c.encode_point(&pt);
            assert_eq!(c.decode_point(&enc).unwrap(), pt);
        }
    }

    #[test]
    fn decode_rejects_off_curve_x() {
        let c = toy();
        // x = 1: rhs = 5, a non-residue mod 17.
        assert!(matches!(c.decode_point(&[0x02, 1]), Err(Error::NotInGroup)));
        assert!(matches!(c.decode_point(&[0x04, 1]), Err(Error::Malformed(_))));
        assert!(matches!(c.decode_point(&[0x02, 17]), Err(Error::NonCanonical(_))));
    }
}
