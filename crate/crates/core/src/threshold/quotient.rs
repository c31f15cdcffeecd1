// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

//! Server-side Lagrange coefficients from consecutive-point quotients.
//!
//! The server only ever learns `x_{i+1} / x_i`. Any ratio `x_j / x_i` is a
//! telescoping product of those, and each Lagrange factor
//! `x_j / (x_j - x_i)` equals `(1 - x_i / x_j)^{-1}`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::group::{Scalar, ScalarField};

/// `i ↦ x_{i+1} / x_i` for participant indices starting at 1.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QuotientTable {
    quotients: BTreeMap<u16, Scalar>,
}

impl QuotientTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build directly from the points (test and simulation use only).
    pub fn from_points(field: &ScalarField, xs: &[Scalar]) -> Result<Self> {
        let mut t = Self::new();
        for (i, w) in xs.windows(2).enumerate() {
            t.insert(i as u16 + 1, field.div(&w[1], &w[0])?)?;
        }
        Ok(t)
    }

    pub fn insert(&mut self, index: u16, quotient: Scalar) -> Result<()> {
        if quotient.is_zero() {
            return Err(Error::ZeroValue);
        }
        self.quotients.insert(index, quotient);
        Ok(())
    }

    pub fn get(&self, index: u16) -> Option<&Scalar> {
        self.quotients.get(&index)
    }

    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    /// `x_j / x_i`.
    pub fn ratio(&self, field: &ScalarField, i: u16, j: u16) -> Result<Scalar> {
        if i == j {
            return Ok(field.one());
        }
        if i > j {
            return field.inv(&self.ratio(field, j, i)?);
        }
        (i..j).try_fold(field.one(), |acc, k| {
            let q = self.quotients.get(&k).ok_or(Error::MissingQuotient(k))?;
            Ok(field.mul(&acc, q))
        })
    }

    /// `ℓ_i` for the subset, using only stored quotients.
    pub fn lagrange(&self, field: &ScalarField, subset: &[u16], i: u16) -> Result<Scalar> {
        if !subset.contains(&i) {
            return Err(Error::InvalidSubset("index not in subset"));
        }
        let mut acc = field.one();
        for (pos, &j) in subset.iter().enumerate() {
            if subset[pos + 1..].contains(&j) {
                return Err(Error::InvalidSubset("repeated index"));
            }
            if j == i {
                continue;
            }
            let xi_over_xj = self.ratio(field, j, i)?;
            let factor = field.sub(&field.one(), &xi_over_xj);
            if factor.is_zero() {
                return Err(Error::DegeneratePoints);
            }
            acc = field.mul(&acc, &field.inv(&factor)?);
        }
        Ok(acc)
    }

    /// Records of `index u16-BE ‖ len u16-BE ‖ scalar`.
    pub fn encode(&self, field: &ScalarField) -> Vec<u8> {
        let mut out = Vec::new();
        for (i, q) in &self.quotients {
            let s = field.encode(q);
            out.extend_from_slice(&i.to_be_bytes());
            out.extend_from_slice(&(s.len() as u16).to_be_bytes());
            out.extend_from_slice(&s);
        }
        out
    }

    pub fn decode(field: &ScalarField, mut bytes: &[u8]) -> Result<Self> {
        let mut t = Self::new();
        while !bytes.is_empty() {
            if bytes.len() < 4 {
                return Err(Error::Malformed("truncated quotient record"));
            }
            let index = u16::from_be_bytes([bytes[0], bytes[1]]);
            let len = u16::from_be_bytes([bytes[2], bytes[3]]) as usize;
            if bytes.len() < 4 + len {
                return Err(Error::Malformed("truncated quotient record"));
            }
            if t.quotients.contains_key(&index) {
                return Err(Error::Malformed("repeated quotient index"));
            }
            t.insert(index, field.decode(&bytes[4..4 + len])?)?;
            bytes = &bytes[4 + len..];
        }
        Ok(t)
    }
}

/// Free-function form of [`QuotientTable::lagrange`].
pub fn lagrange_from_quotients(
    field: &ScalarField,
    table: &QuotientTable,
    subset: &[u16],
    i: u16,
) -> Result<Scalar> {
    table.lagrange(field, subset, i)
}
