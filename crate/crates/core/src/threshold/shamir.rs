// Copyright 2026 The commhash Authors
// SPDX-License-Identifier: Apache-2.0

use rand::RngCore;

use crate::error::{Error, Result};
use crate::group::{Scalar, ScalarField};

/// `c_0 + c_1 x + … + c_{k-1} x^{k-1}` over the exponent field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Scalar>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Scalar>) -> Self {
        assert!(!coeffs.is_empty(), "polynomial needs a constant term");
        Self { coeffs }
    }

    /// Random polynomial of degree `k - 1` with constant term `secret`.
    pub fn random<R: RngCore + ?Sized>(field: &ScalarField, secret: Scalar, k: usize, rng: &mut R) -> Self {
        let mut coeffs = Vec::with_capacity(k.max(1));
        coeffs.push(secret);
        coeffs.extend((1..k).map(|_| field.random(rng)));
        Self { coeffs }
    }

    pub fn secret(&self) -> &Scalar {
        &self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Nominal degree (number of coefficients minus one).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, field: &ScalarField, x: &Scalar) -> Scalar {
        self.coeffs
            .iter()
            .rev()
            .fold(field.zero(), |acc, c| field.add(&field.mul(&acc, x), c))
    }
}

/// Coefficients `ℓ_i = Π_{j≠i} x_j / (x_j - x_i)` with `f(0) = Σ f(x_i)·ℓ_i`.
pub fn lagrange_at_zero(field: &ScalarField, points: &[Scalar]) -> Result<Vec<Scalar>> {
    if points.is_empty() {
        return Err(Error::DegeneratePoints);
    }
    for (i, xi) in points.iter().enumerate() {
        if xi.is_zero() || points[i + 1..].contains(xi) {
            return Err(Error::DegeneratePoints);
        }
    }
    points
        .iter()
        .enumerate()
        .map(|(i, xi)| {
            let mut num = field.one();
            let mut den = field.one();
            for (j, xj) in points.iter().enumerate() {
                if i != j {
                    num = field.mul(&num, xj);
                    den = field.mul(&den, &field.sub(xj, xi));
                }
            }
            field.div(&num, &den)
        })
        .collect()
}

/// `Σ y_i·ℓ_i` over the given shares.
pub fn reconstruct(field: &ScalarField, shares: &[(Scalar, Scalar)]) -> Result<Scalar> {
    let xs: Vec<Scalar> = shares.iter().map(|(x, _)| x.clone()).collect();
    let ls = lagrange_at_zero(field, &xs)?;
    Ok(shares
        .iter()
        .zip(&ls)
        .fold(field.zero(), |acc, ((_, y), l)| field.add(&acc, &field.mul(y, l))))
}
