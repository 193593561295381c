//! Trigonometric moments, Verblunsky coefficient extraction, and the
//! closed-form Carathéodory and Szegő functions of the two-jump weight.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::poly::ComplexRepr;
use crate::sum::ComplexKahanSum;
use crate::szego::{VerblunskyScheme, DISK_MARGIN};

/// The weight `e^{eps}` on `-pi/2 <= theta < pi/2` and `e^{-eps}` on the
/// opposite arc, with pure jumps of exponent `-+ i eps / pi` at `z = +-i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FHWeightSpec {
    epsilon: f64,
}

impl FHWeightSpec {
    pub const MAX_EPSILON: f64 = 0.3;

    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= Self::MAX_EPSILON) {
            return Err(Error::InvalidParameter(format!("epsilon = {epsilon} is outside (0, 0.3]")));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Jump exponent at `z_1 = i`.
    pub fn beta1(&self) -> Complex64 {
        Complex64::new(0.0, -self.epsilon / PI)
    }

    /// Jump exponent at `z_2 = -i`.
    pub fn beta2(&self) -> Complex64 {
        Complex64::new(0.0, self.epsilon / PI)
    }

    pub fn z1(&self) -> Complex64 {
        Complex64::new(0.0, 1.0)
    }

    pub fn z2(&self) -> Complex64 {
        Complex64::new(0.0, -1.0)
    }
}

/// `f(theta)`; the jump points belong to the arc that starts there.
pub fn fh_eval(spec: &FHWeightSpec, theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if !(PI / 2.0..1.5 * PI).contains(&t) {
        spec.epsilon.exp()
    } else {
        (-spec.epsilon).exp()
    }
}

/// The probability weight `f / (2 pi cosh eps)` sampled on `m` points.
pub fn fh_grid(spec: &FHWeightSpec, m: usize) -> Result<GridFunction> {
    let norm = 2.0 * PI * spec.epsilon.cosh();
    GridFunction::from_fn(m, |t| Complex64::new(fh_eval(spec, t) / norm, 0.0))
}

/// True when `theta` is within `radius` of a jump point `+-pi/2`.
pub fn near_jump(theta: f64, radius: f64) -> bool {
    let t = theta.rem_euclid(TAU);
    [PI / 2.0, 1.5 * PI].iter().any(|&j| (t - j).abs() <= radius)
}

/// Normalized moments `c_k = int e^{-ik theta} d mu`, `c_0 = 1`; negative
/// indices follow from `c_{-k} = conj(c_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    c: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct MomentJson {
    #[serde(rename = "K")]
    k: usize,
    c: Vec<ComplexRepr>,
}

impl Serialize for MomentSequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MomentJson { k: self.max_index(), c: self.c.iter().map(|&v| v.into()).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MomentSequence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MomentJson::deserialize(d)?;
        if raw.c.len() != raw.k + 1 {
            return Err(serde::de::Error::custom(format!(
                "K = {} but {} moments given",
                raw.k,
                raw.c.len()
            )));
        }
        MomentSequence::new(raw.c.into_iter().map(Into::into).collect())
            .map_err(serde::de::Error::custom)
    }
}

impl MomentSequence {
    /// Accepts moments already normalized so that `c_0 = 1` (to 1e-12).
    pub fn new(c: Vec<Complex64>) -> Result<Self> {
        match c.first() {
            None => Err(Error::InvalidParameter("empty moment sequence".into())),
            Some(c0) if (c0 - 1.0).norm() > 1e-12 => {
                Err(Error::InvalidParameter(format!("c_0 = {c0}, expected 1")))
            }
            Some(_) => Ok(Self { c }),
        }
    }

    /// Divides by `c_0`, which must be real and positive.
    pub fn normalized(mut c: Vec<Complex64>) -> Result<Self> {
        let c0 = *c.first().ok_or_else(|| Error::InvalidParameter("empty moment sequence".into()))?;
        if !(c0.re > 0.0) || c0.im.abs() > 1e-12 * c0.re {
            return Err(Error::NonPositiveMass(c0.re));
        }
        for v in &mut c {
            *v /= c0.re;
        }
        c[0] = Complex64::new(1.0, 0.0);
        Ok(Self { c })
    }

    /// Largest stored index `K`.
    pub fn max_index(&self) -> usize {
        self.c.len() - 1
    }

    pub fn values(&self) -> &[Complex64] {
        &self.c
    }

    /// `c_k` for any integer `k` within range.
    pub fn get(&self, k: i64) -> Complex64 {
        let v = self.c[k.unsigned_abs() as usize];
        if k < 0 {
            v.conj()
        } else {
            v
        }
    }

    /// Moments of the measure rotated by `beta`: `c_k e^{-ik beta}`.
    pub fn rotated(&self, beta: f64) -> Self {
        let c = self
            .c
            .iter()
            .enumerate()
            .map(|(k, &v)| v * Complex64::from_polar(1.0, -(k as f64) * beta))
            .collect();
        Self { c }
    }
}

/// Closed form `c_k = 2 sinh(eps) sin(k pi / 2) / (pi k cosh(eps))`.
pub fn fh_moments(spec: &FHWeightSpec, k_max: usize) -> MomentSequence {
    let t = spec.epsilon.tanh();
    let c = (0..=k_max)
        .map(|k| {
            let v = match k % 4 {
                0 if k == 0 => 1.0,
                1 => 2.0 * t / (PI * k as f64),
                3 => -2.0 * t / (PI * k as f64),
                _ => 0.0,
            };
            Complex64::new(v, 0.0)
        })
        .collect();
    MomentSequence { c }
}

/// Rectangle-rule moments of a nonnegative grid weight, normalized by its
/// integral. Each `k` is summed independently in a fixed order.
pub fn generic_moments(w: &GridFunction, k_max: usize) -> Result<MomentSequence> {
    let m = w.m();
    if m < 8 * k_max {
        return Err(Error::InvalidParameter(format!(
            "grid of {m} points is too coarse for {k_max} moments (need m >= 8K)"
        )));
    }
    for (index, v) in w.values().iter().enumerate() {
        if !(v.re >= 0.0) || v.im != 0.0 {
            return Err(Error::NonPositiveWeight { index, value: v.re });
        }
    }
    let raw: Vec<Complex64> = (0..=k_max).into_par_iter().map(|k| w.fourier_integral(k as i64)).collect();
    MomentSequence::normalized(raw)
}

/// Runs the Szegő recursion backwards from moments:
/// `conj(g_k) = <z Phi_k, 1> / ||Phi_k||^2` with
/// `<z Phi_k, 1> = sum_j a_j conj(c_{j+1})`, then advances `Phi_k`.
pub fn extract_verblunsky(mom: &MomentSequence, n: usize) -> Result<VerblunskyScheme> {
    if n > mom.max_index() {
        return Err(Error::NotEnoughMoments { requested: n, available: mom.max_index() });
    }
    let c = mom.values();
    let mut phi: Vec<Complex64> = Vec::with_capacity(n + 1);
    phi.push(Complex64::new(1.0, 0.0));
    let mut next = Vec::with_capacity(n + 1);
    let mut norm_sq = 1.0f64;
    let mut gamma = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = ComplexKahanSum::new();
        for (j, &a) in phi.iter().enumerate() {
            acc.add_product(a, c[j + 1].conj());
        }
        let g_bar = acc.value() / norm_sq;
        let modulus = g_bar.norm();
        if !(modulus < 1.0 - DISK_MARGIN) {
            return Err(Error::ExtractionBreakdown { index: k, modulus });
        }
        // Phi_{k+1}[j] = Phi_k[j-1] - conj(g) conj(Phi_k[k-j])
        next.clear();
        next.push(-g_bar * phi[k].conj());
        for j in 1..=k {
            next.push(phi[j - 1] - g_bar * phi[k - j].conj());
        }
        next.push(phi[k]);
        std::mem::swap(&mut phi, &mut next);
        norm_sq *= 1.0 - modulus * modulus;
        gamma.push(g_bar.conj());
    }
    VerblunskyScheme::new(gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentSource {
    ClosedForm,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Standard,
    High,
}

/// Where an extracted scheme came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: MomentSource,
    /// Grid size for grid moments.
    pub m: Option<usize>,
    #[serde(rename = "K")]
    pub k_max: usize,
    pub precision: Precision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub epsilon: f64,
    pub n: usize,
    pub scheme: VerblunskyScheme,
    pub provenance: Provenance,
}

/// Extra moments requested beyond the `n` that extraction strictly needs.
pub const MOMENT_SLACK: usize = 8;

/// Extracts `n` coefficients of the two-jump weight from its closed-form
/// moments in the requested precision.
pub fn extract_fh(spec: &FHWeightSpec, n: usize, precision: Precision) -> Result<Extraction> {
    let k_max = n + MOMENT_SLACK;
    let scheme = match precision {
        Precision::Standard => extract_verblunsky(&fh_moments(spec, k_max), n)?,
        Precision::High => crate::hp::extract_fh_high_precision(spec, n, crate::hp::DEFAULT_BITS)?,
    };
    Ok(Extraction {
        epsilon: spec.epsilon,
        n,
        scheme,
        provenance: Provenance { source: MomentSource::ClosedForm, m: None, k_max, precision },
    })
}

fn check_off_jumps(z: Complex64) -> Result<()> {
    let tol = 1e-14;
    if (z - Complex64::i()).norm() < tol || (z + Complex64::i()).norm() < tol {
        return Err(Error::Singular(format!("z = {z} is a jump point")));
    }
    Ok(())
}

fn log_ratio(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    ((i - z) / (i + z)).ln()
}

/// `F(z) = -i (e^eps - e^{-eps}) / pi * ln((i - z)/(i + z)) + cosh(eps)`,
/// principal logarithm.
pub fn caratheodory_f(spec: &FHWeightSpec, z: Complex64) -> Result<Complex64> {
    check_off_jumps(z)?;
    let e = spec.epsilon;
    Ok(-Complex64::i() * (2.0 * e.sinh() / PI) * log_ratio(z) + e.cosh())
}

/// `D(z) = exp(eps / (pi i) * ln((i - z)/(i + z)))`.
pub fn szego_d(spec: &FHWeightSpec, z: Complex64) -> Result<Complex64> {
    check_off_jumps(z)?;
    Ok((spec.epsilon / PI * log_ratio(z) / Complex64::i()).exp())
}
