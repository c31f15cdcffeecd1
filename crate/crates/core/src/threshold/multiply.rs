// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

//! Three-party blinded multiplication: the server learns `x·y` where `x`
//! belongs to the first party and `y` to the second.
//!
//! ```text
//! First  → Second : r1·x
//! Second → Server : r1·x·r2·y
//! Server → First  : rS·r1·x·r2·y
//! First  → Second : rS·x·r2·y
//! Second → Server : rS·x·y
//! Server          : x·y
//! ```

use crate::error::{Error, Result};
use crate::group::{Scalar, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultiplyRole {
    First,
    Second,
    Server,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MultiplyOutput {
    Send { to: MultiplyRole, value: Scalar },
    Product(Scalar),
}

/// One party's state in a Multiply run.
#[derive(Debug, Clone)]
pub struct MultiplySession {
    field: ScalarField,
    role: MultiplyRole,
    blind: Scalar,
    input: Option<Scalar>,
    step: u8,
}

impl MultiplySession {
    fn new(field: &ScalarField, role: MultiplyRole, input: Option<Scalar>, blind: Scalar) -> Result<Self> {
        if blind.is_zero() || input.as_ref().is_some_and(Scalar::is_zero) {
            return Err(Error::ZeroValue);
        }
        Ok(Self {
            field: field.clone(),
            role,
            blind,
            input,
            step: 0,
        })
    }

    pub fn first(field: &ScalarField, x: Scalar, r1: Scalar) -> Result<Self> {
        Self::new(field, MultiplyRole::First, Some(x), r1)
    }

    pub fn second(field: &ScalarField, y: Scalar, r2: Scalar) -> Result<Self> {
        Self::new(field, MultiplyRole::Second, Some(y), r2)
    }

    pub fn server(field: &ScalarField, r_s: Scalar) -> Result<Self> {
        Self::new(field, MultiplyRole::Server, None, r_s)
    }

    pub fn role(&self) -> MultiplyRole {
        self.role
    }

    /// Number of messages processed so far.
    pub fn step(&self) -> u8 {
        self.step
    }

    pub fn is_finished(&self) -> bool {
        match self.role {
            MultiplyRole::First | MultiplyRole::Second | MultiplyRole::Server => self.step >= 2,
        }
    }

    /// The first party opens the run with `r1·x`.
    pub fn start(&mut self) -> Result<MultiplyOutput> {
        if self.role != MultiplyRole::First || self.step != 0 {
            return Err(Error::OutOfOrder);
        }
        self.step = 1;
        let x = self.input.as_ref().expect("first party has input");
        Ok(MultiplyOutput::Send {
            to: MultiplyRole::Second,
            value: self.field.mul(&self.blind, x),
        })
    }

    /// Process the next incoming value.
    pub fn advance(&mut self, incoming: &Scalar) -> Result<MultiplyOutput> {
        if incoming.is_zero() {
            return Err(Error::ZeroValue);
        }
        let f = &self.field;
        let out = match (self.role, self.step) {
            // r1·x → r1·x·r2·y
            (MultiplyRole::Second, 0) => {
                let y = self.input.as_ref().expect("second party has input");
                MultiplyOutput::Send {
                    to: MultiplyRole::Server,
                    value: f.mul(&f.mul(incoming, &self.blind), y),
                }
            }
            // r1·x·r2·y → rS·r1·x·r2·y
            (MultiplyRole::Server, 0) => MultiplyOutput::Send {
                to: MultiplyRole::First,
                value: f.mul(incoming, &self.blind),
            },
            // strip r1
            (MultiplyRole::First, 1) => MultiplyOutput::Send {
                to: MultiplyRole::Second,
                value: f.div(incoming, &self.blind)?,
            },
            // strip r2
            (MultiplyRole::Second, 1) => MultiplyOutput::Send {
                to: MultiplyRole::Server,
                value: f.div(incoming, &self.blind)?,
            },
            // strip rS
            (MultiplyRole::Server, 1) => MultiplyOutput::Product(f.div(incoming, &self.blind)?),
            _ => return Err(Error::OutOfOrder),
        };
        self.step += 1;
        Ok(out)
    }
}

/// All three roles in one process; returns the outgoing values in order
/// followed by the server's product.
pub fn run_local(field: &ScalarField, x: &Scalar, y: &Scalar, blinds: [&Scalar; 3]) -> Result<Vec<Scalar>> {
    let mut p1 = MultiplySession::first(field, x.clone(), blinds[0].clone())?;
    let mut p2 = MultiplySession::second(field, y.clone(), blinds[1].clone())?;
    let mut s = MultiplySession::server(field, blinds[2].clone())?;
    let mut transcript = Vec::with_capacity(6);
    let mut msg = p1.start()?;
    loop {
        match msg {
            MultiplyOutput::Send { to, value } => {
                transcript.push(value.clone());
                msg = match to {
                    MultiplyRole::First => p1.advance(&value)?,
                    MultiplyRole::Second => p2.advance(&value)?,
                    MultiplyRole::Server => s.advance(&value)?,
                };
            }
            MultiplyOutput::Product(v) => {
                transcript.push(v);
                return Ok(transcript);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn f11() -> ScalarField {
        ScalarField::new(BigUint::from(11u32))
    }

    #[test]
    fn pinned_transcript() {
        let f = f11();
        let s = |v| f.from_u64(v);
        let t = run_local(&f, &s(3), &s(4), [&s(2), &s(5), &s(7)]).unwrap();
        let expected: Vec<_> = [6, 10, 4, 2, 7, 1].into_iter().map(s).collect();
        assert_eq!(t, expected);
    }

    #[test]
    fn unit_second_factor() {
        let f = f11();
        let s = |v| f.from_u64(v);
        let t = run_local(&f, &s(6), &s(1), [&s(2), &s(5), &s(7)]).unwrap();
        assert_eq!(t.last().unwrap(), &s(6));
    }

    #[test]
    fn other_blinds_same_product() {
        let f = f11();
        let s = |v| f.from_u64(v);
        let t = run_local(&f, &s(3), &s(4), [&s(3), &s(2), &s(5)]).unwrap();
        assert_eq!(t.last().unwrap(), &s(1));
        assert_ne!(t[0], s(6));
    }

    #[test]
    fn order_and_zero_checks() {
        let f = f11();
        let s = |v| f.from_u64(v);
        let mut p1 = MultiplySession::first(&f, s(3), s(2)).unwrap();
        assert!(matches!(p1.advance(&s(4)), Err(Error::OutOfOrder)));
        p1.start().unwrap();
        assert!(matches!(p1.start(), Err(Error::OutOfOrder)));
        assert!(matches!(p1.advance(&f.zero()), Err(Error::ZeroValue)));
        assert!(MultiplySession::server(&f, f.zero()).is_err());
        assert!(MultiplySession::second(&f, f.zero(), s(1)).is_err());
        let mut srv = MultiplySession::server(&f, s(7)).unwrap();
        assert!(matches!(srv.start(), Err(Error::OutOfOrder)));
    }
}
