//! Complex samples on the uniform grid `theta_k = 2 pi k / m` of the unit circle.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sum::{sum_c64, sum_f64};

/// `theta_k = 2 pi k / m`.
#[inline]
pub fn grid_angle(k: usize, m: usize) -> f64 {
    2.0 * PI * (k as f64) / (m as f64)
}

/// `e^{i theta_k}`.
#[inline]
pub fn unit_point(k: usize, m: usize) -> Complex64 {
    let (s, c) = grid_angle(k, m).sin_cos();
    Complex64::new(c, s)
}

/// Default grid for a polynomial of the given degree.
pub fn default_grid_size(degree: usize) -> usize {
    4096usize.max(16 * degree)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridStats {
    pub sup_modulus: f64,
    pub min_modulus: f64,
    pub mean: Complex64,
    /// `(2 pi / m) * sum |v_k|^2`.
    pub integral_modulus_sq: f64,
}

impl GridFunction {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyGrid);
        }
        Ok(Self { values })
    }

    pub fn from_real(values: Vec<f64>) -> Result<Self> {
        Self::new(values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples `f(theta_k)`; evaluation runs in parallel, each point
    /// independently.
    pub fn from_fn<F>(m: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Sync,
    {
        if m == 0 {
            return Err(Error::EmptyGrid);
        }
        let values = (0..m).into_par_iter().map(|k| f(grid_angle(k, m))).collect();
        Ok(Self { values })
    }

    pub fn constant(m: usize, c: Complex64) -> Result<Self> {
        if m == 0 {
            return Err(Error::EmptyGrid);
        }
        Ok(Self { values: vec![c; m] })
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn theta(&self, k: usize) -> f64 {
        grid_angle(k, self.m())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise combination of two grids of the same size.
    pub fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn check_same(&self, other: &Self) -> Result<()> {
        if self.m() != other.m() {
            return Err(Error::GridMismatch { left: self.m(), right: other.m() });
        }
        Ok(())
    }

    /// Periodic rectangle rule: `(2 pi / m) * sum v_k`.
    pub fn integral(&self) -> Complex64 {
        sum_c64(self.values.iter().copied()) * (2.0 * PI / self.m() as f64)
    }

    /// Rectangle-rule integral of `v * e^{-i k theta}`.
    pub fn fourier_integral(&self, k: i64) -> Complex64 {
        let m = self.m();
        let idx = |j: usize| -> usize { ((k.rem_euclid(m as i64) as usize) * j) % m };
        let terms = (0..m).map(|j| {
            let e = unit_point(idx(j), m).conj();
            self.values[j] * e
        });
        sum_c64(terms) * (2.0 * PI / m as f64)
    }

    pub fn stats(&self) -> GridStats {
        let (mut sup, mut min) = (0.0f64, f64::INFINITY);
        for v in &self.values {
            let a = v.norm();
            sup = sup.max(a);
            min = min.min(a);
        }
        let m = self.m() as f64;
        GridStats {
            sup_modulus: sup,
            min_modulus: min,
            mean: sum_c64(self.values.iter().copied()) / m,
            integral_modulus_sq: sum_f64(self.values.iter().map(|v| v.norm_sqr())) * 2.0 * PI / m,
        }
    }

    /// CSV with header `theta,re,im`, rows in increasing theta, 17 significant
    /// digits. `meta` lines are written first as `# key=value` comments.
    pub fn write_csv<W: Write>(&self, mut w: W, meta: &[(String, String)]) -> std::io::Result<()> {
        for (k, v) in meta {
            writeln!(w, "# {k}={v}")?;
        }
        writeln!(w, "theta,re,im")?;
        for (k, v) in self.values.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e},{:.16e}", self.theta(k), v.re, v.im)?;
        }
        Ok(())
    }

    /// Reads the format produced by [`write_csv`](Self::write_csv), skipping
    /// comment lines.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut values = Vec::new();
        let mut seen_header = false;
        for line in r.lines() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !seen_header {
                if line != "theta,re,im" {
                    return Err(Error::Parse(format!("unexpected header {line:?}")));
                }
                seen_header = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!("bad row {line:?}")));
            }
            let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(e.to_string()));
            values.push(Complex64::new(parse(fields[1])?, parse(fields[2])?));
        }
        Self::new(values)
    }
}
