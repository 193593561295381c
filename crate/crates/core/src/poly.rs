//! Dense complex polynomials with an explicit declared degree.
//!
//! The declared degree is what the star operation reverses against, so it is
//! kept separately from the support: `z - 0.5` declared at degree 3 has four
//! stored coefficients, the top two zero.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{unit_point, GridFunction};

/// Serialized form of a complex scalar, `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexRepr {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexRepr {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexRepr> for Complex64 {
    fn from(c: ComplexRepr) -> Self {
        Complex64::new(c.re, c.im)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoly {
    coeffs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    degree: usize,
    coeffs: Vec<ComplexRepr>,
}

impl Serialize for ComplexPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson {
            degree: self.declared_degree(),
            coeffs: self.coeffs.iter().map(|&c| c.into()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PolyJson::deserialize(d)?;
        if raw.coeffs.len() != raw.degree + 1 {
            return Err(serde::de::Error::custom(format!(
                "degree {} needs {} coefficients, got {}",
                raw.degree,
                raw.degree + 1,
                raw.coeffs.len()
            )));
        }
        Ok(ComplexPoly::new(raw.coeffs.into_iter().map(Into::into).collect()))
    }
}

impl ComplexPoly {
    /// Coefficients in ascending powers. An empty vector becomes the zero
    /// polynomial of declared degree 0.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero(declared_degree: usize) -> Self {
        Self { coeffs: vec![Complex64::new(0.0, 0.0); declared_degree + 1] }
    }

    pub fn constant(c: Complex64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    /// `z^k`.
    pub fn monomial(k: usize) -> Self {
        let mut p = Self::zero(k);
        p.coeffs[k] = Complex64::new(1.0, 0.0);
        p
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn declared_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Index of the last nonzero coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| c.re != 0.0 || c.im != 0.0)
            .unwrap_or(0)
    }

    /// Coefficient of `z^k`, zero past the declared degree.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.coeffs.len() - 1]
    }

    /// Re-declares the degree, padding with zeros or dropping zero top
    /// coefficients.
    pub fn with_degree(mut self, degree: usize) -> Result<Self> {
        if degree < self.degree() {
            return Err(Error::StarOrder { order: degree, degree: self.degree() });
        }
        self.coeffs.resize(degree + 1, Complex64::new(0.0, 0.0));
        Ok(self)
    }

    /// `P^*(z) = z^n conj(P(1/conj z))`: coefficient `k` of the result is the
    /// conjugate of coefficient `n - k` of `self`.
    pub fn star(&self, n: usize) -> Result<Self> {
        let degree = self.degree();
        if n < degree {
            return Err(Error::StarOrder { order: n, degree });
        }
        let coeffs = (0..=n).map(|k| self.coeff(n - k).conj()).collect();
        Ok(Self { coeffs })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&a| a * c).collect() }
    }

    /// Multiplication by `z`.
    pub fn shift_by_z(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    /// Division by `z`. The constant coefficient must vanish to within `tol`.
    pub fn div_by_z(&self, tol: f64) -> Result<Self> {
        let c0 = self.coeffs[0].norm();
        if c0 > tol {
            return Err(Error::NonzeroConstantTerm(c0));
        }
        if self.coeffs.len() == 1 {
            return Ok(Self::zero(0));
        }
        Ok(Self { coeffs: self.coeffs[1..].to_vec() })
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Values at `e^{2 pi i k/m}`, `k = 0..m`.
    pub fn eval_grid(&self, m: usize) -> Result<GridFunction> {
        self.eval_grid_rotated(m, false)
    }

    /// Values at `-e^{2 pi i k/m}` when `negate` is set, otherwise as
    /// [`eval_grid`](Self::eval_grid).
    pub fn eval_grid_rotated(&self, m: usize, negate: bool) -> Result<GridFunction> {
        if m == 0 {
            return Err(Error::EmptyGrid);
        }
        let values = (0..m)
            .into_par_iter()
            .map(|k| {
                let z = unit_point(k, m);
                self.eval(if negate { -z } else { z })
            })
            .collect();
        GridFunction::new(values)
    }

    pub fn max_coeff_modulus(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficientwise distance, treating missing coefficients as zero.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.im.abs() <= tol)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self { coeffs: (0..n).map(|k| f(self.coeff(k), other.coeff(k))).collect() }
    }
}

impl Add for &ComplexPoly {
    type Output = ComplexPoly;
    fn add(self, rhs: &ComplexPoly) -> ComplexPoly {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &ComplexPoly {
    type Output = ComplexPoly;
    fn sub(self, rhs: &ComplexPoly) -> ComplexPoly {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &ComplexPoly {
    type Output = ComplexPoly;
    fn neg(self) -> ComplexPoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

/// Schoolbook product; the declared degree is the sum of declared degrees.
impl Mul for &ComplexPoly {
    type Output = ComplexPoly;
    fn mul(self, rhs: &ComplexPoly) -> ComplexPoly {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        ComplexPoly { coeffs }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ComplexPoly {
            type Output = ComplexPoly;
            fn $m(self, rhs: ComplexPoly) -> ComplexPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
