//! The three-segment parameter scheme, the asymptotic main terms of the
//! two-jump coefficients, the decoupled weight, and the growth and
//! boundedness suites built on them.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{near_jump, szego_d, FHWeightSpec};
use crate::grid::{default_grid_size, unit_point, GridFunction};
use crate::special::complex_gamma;
use crate::szego::{decouple_weight, determinant_grid_residual, szego_forward, VerblunskyScheme};

/// Parameters `g^{(n)}` of length `3n + 1`:
/// `a_0..a_{n-1}`, `-a_{n-1}..-a_0`, `0`, `(-1)^{m+1} a_m` for `m < n`.
/// Entries past `3n` are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteklovScheme {
    pub n: usize,
    pub epsilon: Option<f64>,
    pub gamma: VerblunskyScheme,
}

/// Instantiates the scheme from the first `n` (real) entries of `alpha`.
pub fn build_scheme(alpha: &VerblunskyScheme, n: usize) -> Result<SteklovScheme> {
    if alpha.len() < n {
        return Err(Error::SchemeTooShort { requested: n, available: alpha.len() });
    }
    let a = alpha.prefix(n).real_values(1e-10)?;
    let mut g = Vec::with_capacity(3 * n + 1);
    g.extend_from_slice(&a);
    g.extend(a.iter().rev().map(|&x| -x));
    g.push(0.0);
    g.extend(a.iter().enumerate().map(|(m, &x)| if m % 2 == 0 { -x } else { x }));
    Ok(SteklovScheme { n, epsilon: None, gamma: VerblunskyScheme::from_real(&g)? })
}

impl SteklovScheme {
    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = Some(epsilon);
        self
    }

    /// `g_j`, zero beyond the stored entries.
    pub fn get(&self, j: usize) -> Complex64 {
        if j < self.gamma.len() {
            self.gamma.get(j)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Checks the three segment equalities exactly.
    pub fn check_structure(&self) -> Result<()> {
        let n = self.n;
        let bad = |what: &str| Err(Error::InvalidParameter(format!("scheme structure: {what}")));
        if self.gamma.len() != 3 * n + 1 {
            return bad("length");
        }
        if self.get(2 * n) != Complex64::new(0.0, 0.0) {
            return bad("middle entry");
        }
        for m in 0..n {
            if self.get(n + m) != -self.get(n - 1 - m) {
                return bad("reflected segment");
            }
            let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
            if self.get(2 * n + 1 + m) != self.get(m) * sign {
                return bad("rotated tail");
            }
        }
        Ok(())
    }
}

/// `Gamma(1 - i eps/pi) / Gamma(i eps/pi)` and its partner with `eps -> -eps`.
fn gamma_ratios(epsilon: f64) -> (Complex64, Complex64) {
    let y = epsilon / PI;
    let g = |s: f64| {
        complex_gamma(Complex64::new(1.0, -s * y)).expect("off the poles")
            / complex_gamma(Complex64::new(0.0, s * y)).expect("off the poles")
    };
    (g(1.0), g(-1.0))
}

fn i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn l4_with_ratios(j: usize, epsilon: f64, ratios: (Complex64, Complex64)) -> Complex64 {
    let jj = (j + 1) as f64;
    let phase = 2.0 * epsilon / PI * (2.0 * jj).ln();
    let up = Complex64::from_polar(1.0, phase);
    let sign = if (j + 1) % 2 == 0 { 1.0 } else { -1.0 };
    -i_pow(j + 1) / jj * (up * ratios.0 + sign * up.conj() * ratios.1)
}

/// Main term of `g_j` for the two-jump weight:
/// `-(j+1)^{-1} i^{j+1} sum_{s=+-1} s^{j+1} (2(j+1))^{2is eps/pi} Gamma(1-is eps/pi)/Gamma(is eps/pi)`.
pub fn l4_main_term(j: usize, epsilon: f64) -> Complex64 {
    l4_with_ratios(j, epsilon, gamma_ratios(epsilon))
}

/// Main term of `g_j^{(n)}`, following the segment structure of the scheme.
pub fn qq1_main_term(j: usize, n: usize, epsilon: f64) -> Complex64 {
    if j < n {
        l4_main_term(j, epsilon)
    } else if j < 2 * n {
        -l4_main_term(2 * n - 1 - j, epsilon)
    } else if j == 2 * n || j > 3 * n {
        Complex64::new(0.0, 0.0)
    } else {
        let m = j - 2 * n - 1;
        let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
        sign * l4_main_term(m, epsilon)
    }
}

/// Jump data and main terms of the two-jump coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticDescriptor {
    pub epsilon: f64,
    pub beta1: Complex64,
    pub beta2: Complex64,
    pub z1: Complex64,
    pub z2: Complex64,
    /// Fitted `C` in `|r_j| < C (j+1)^{-2}`, once a residual report exists.
    pub remainder_budget: Option<f64>,
    ratios: (Complex64, Complex64),
}

impl AsymptoticDescriptor {
    pub fn new(spec: &FHWeightSpec) -> Self {
        Self {
            epsilon: spec.epsilon(),
            beta1: spec.beta1(),
            beta2: spec.beta2(),
            z1: spec.z1(),
            z2: spec.z2(),
            remainder_budget: None,
            ratios: gamma_ratios(spec.epsilon()),
        }
    }

    pub fn main_term(&self, j: usize) -> Complex64 {
        l4_with_ratios(j, self.epsilon, self.ratios)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub window: (usize, usize),
    /// `max |r_j| (j+1)^2` over the window.
    pub c_fit: f64,
    /// Least-squares slope of `ln |r_j|` against `ln(j+1)`.
    pub slope_fit: f64,
    /// Indices with `r_j = 0` exactly, left out of the log fit.
    pub excluded: Vec<usize>,
}

/// `r_j = g_j - main(j)` over `[lo, hi]` and the fitted decay.
pub fn residual_report(
    extracted: &VerblunskyScheme,
    epsilon: f64,
    window: (usize, usize),
) -> Result<ResidualReport> {
    let (lo, hi) = window;
    if lo > hi || hi >= extracted.len() {
        return Err(Error::EmptyWindow { lo, hi });
    }
    let ratios = gamma_ratios(epsilon);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut excluded = Vec::new();
    let mut c_fit = 0.0f64;
    for j in lo..=hi {
        let r = (extracted.get(j) - l4_with_ratios(j, epsilon, ratios)).norm();
        let jj = (j + 1) as f64;
        c_fit = c_fit.max(r * jj * jj);
        if r == 0.0 {
            excluded.push(j);
        } else {
            xs.push(jj.ln());
            ys.push(r.ln());
        }
    }
    if xs.len() < 2 {
        return Err(Error::EmptyWindow { lo, hi });
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(ResidualReport { window, c_fit, slope_fit: sxy / sxx, excluded })
}

fn check_grid(m: usize, n: usize) -> Result<()> {
    if m < 16 * (2 * n + 1) {
        return Err(Error::InvalidParameter(format!(
            "grid of {m} points is below 16 (2n+1) = {}",
            16 * (2 * n + 1)
        )));
    }
    Ok(())
}

/// `Psi_n^*(-z) / Phi_n^*(-z)` on the grid from the first `n` entries of `alpha`.
pub fn f_tilde(alpha: &VerblunskyScheme, n: usize, m: usize) -> Result<GridFunction> {
    let ps = szego_forward(alpha, n)?;
    let num = ps.psi_star.eval_grid_rotated(m, true)?;
    let den = ps.phi_star.eval_grid_rotated(m, true)?;
    for (index, d) in den.values().iter().enumerate() {
        if d.norm() < 1e-13 {
            return Err(Error::VanishingDenominator { index, modulus: d.norm() });
        }
    }
    num.zip_with(&den, |a, b| a / b)
}

/// The decoupled weight whose parameters are `scheme[0..=2n]` followed by
/// those of `F~`. It integrates to one analytically; the value is returned
/// without renormalization so the quadrature can certify that.
pub fn steklov_weight(scheme: &SteklovScheme, alpha: &VerblunskyScheme, m: usize) -> Result<GridFunction> {
    let n = scheme.n;
    check_grid(m, n)?;
    let ft = f_tilde(alpha, n, m)?;
    let sigma = ft.map(|v| Complex64::new(v.re / (2.0 * PI), 0.0));
    let ps = szego_forward(&scheme.gamma, 2 * n + 1)?;
    decouple_weight(&ps, &ft, &sigma)
}

/// `sup |phi_{2n+1}|` for the orthonormal polynomial of the scheme, using the
/// product formula for the norm.
pub fn sup_phi(scheme: &SteklovScheme, m: usize) -> Result<f64> {
    let k = 2 * scheme.n + 1;
    let ps = szego_forward(&scheme.gamma, k)?;
    Ok(ps.phi.eval_grid(m)?.stats().sup_modulus * ps.orthonormal_scale())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n: usize,
    pub m: usize,
    pub sup_phi: f64,
    pub log_n: f64,
    pub ratio: f64,
    /// `sup |Phi_n^* Psi_n^* + z Phi_n Psi_n|`.
    pub mixed_sup: f64,
    /// `sup |Phi_n|^2`.
    pub phi_n_sup_sq: f64,
    /// `2 sup |Phi_{2n+1}| >= mixed_sup - 2 sup |Phi_n|^2` with monic polynomials.
    pub mechanism_holds: bool,
}

fn mixed_sup(alpha: &VerblunskyScheme, n: usize, m: usize) -> Result<(f64, f64)> {
    let ps = szego_forward(alpha, n)?;
    let p = ps.phi.eval_grid(m)?;
    let q = ps.psi.eval_grid(m)?;
    let ps_ = ps.phi_star.eval_grid(m)?;
    let qs = ps.psi_star.eval_grid(m)?;
    let mut mixed = 0.0f64;
    for k in 0..m {
        let z = unit_point(k, m);
        let v = ps_.values()[k] * qs.values()[k] + z * p.values()[k] * q.values()[k];
        mixed = mixed.max(v.norm());
    }
    let sup_p = p.stats().sup_modulus;
    Ok((mixed, sup_p * sup_p))
}

/// Grid size used for block size `n` when none is given.
pub fn suite_grid(n: usize, m: Option<usize>) -> usize {
    m.unwrap_or_else(|| default_grid_size(2 * n + 1))
}

/// One row per `n`, sorted by `n`. `alpha` must hold at least `max(n_list)`
/// coefficients.
pub fn growth_report(alpha: &VerblunskyScheme, n_list: &[usize], m: Option<usize>) -> Result<Vec<GrowthRow>> {
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    ns.par_iter()
        .map(|&n| {
            if n < 2 {
                return Err(Error::InvalidParameter(format!("n = {n} has ln n <= 0")));
            }
            let m = suite_grid(n, m);
            check_grid(m, n)?;
            let scheme = build_scheme(alpha, n)?;
            let k = 2 * n + 1;
            let ps = szego_forward(&scheme.gamma, k)?;
            let sup_monic = ps.phi.eval_grid(m)?.stats().sup_modulus;
            let sup = sup_monic * ps.orthonormal_scale();
            let (mixed, phi_n_sup_sq) = mixed_sup(alpha, n, m)?;
            let log_n = (n as f64).ln();
            Ok(GrowthRow {
                n,
                m,
                sup_phi: sup,
                log_n,
                ratio: sup / log_n,
                mixed_sup: mixed,
                phi_n_sup_sq,
                mechanism_holds: 2.0 * sup_monic >= mixed - 2.0 * phi_n_sup_sq,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L1Report {
    pub n: usize,
    pub m: usize,
    pub star_min: f64,
    pub star_max: f64,
    pub star_ratio: f64,
    pub mixed_sup: f64,
    pub mixed_over_log: f64,
    /// `sup |Psi_n^*/Phi_n^*(z) + Psi_n^*/Phi_n^*(-z)|`.
    pub antipodal_sup: f64,
    pub determinant_grid_residual: f64,
    /// `max | |Phi_n^*| |D_+| - 1 |` over points at distance > `delta` from the jumps.
    pub off_singularity_gap: f64,
    pub delta: f64,
}

/// Grid diagnostics of the degree-`n` polynomials of the two-jump weight.
pub fn lemma_l1_suite(
    spec: &FHWeightSpec,
    alpha: &VerblunskyScheme,
    n: usize,
    m: usize,
    delta: f64,
) -> Result<L1Report> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n = {n} has ln n <= 0")));
    }
    if m % 2 != 0 {
        return Err(Error::InvalidParameter(format!("grid size {m} must be even")));
    }
    let ps = szego_forward(alpha, n)?;
    let star = ps.phi_star.eval_grid(m)?;
    let psi_star = ps.psi_star.eval_grid(m)?;
    let stats = star.stats();
    let (mixed, _) = mixed_sup(alpha, n, m)?;
    let ratio: Vec<Complex64> =
        psi_star.values().iter().zip(star.values()).map(|(a, b)| a / b).collect();
    let half = m / 2;
    let antipodal = (0..m).map(|k| (ratio[k] + ratio[(k + half) % m]).norm()).fold(0.0, f64::max);
    let mut gap = 0.0f64;
    for (k, v) in star.values().iter().enumerate() {
        let theta = crate::grid::grid_angle(k, m);
        if near_jump(theta, delta) {
            continue;
        }
        let d = szego_d(spec, unit_point(k, m))?;
        gap = gap.max((v.norm() * d.norm() - 1.0).abs());
    }
    Ok(L1Report {
        n,
        m,
        star_min: stats.min_modulus,
        star_max: stats.sup_modulus,
        star_ratio: stats.sup_modulus / stats.min_modulus,
        mixed_sup: mixed,
        mixed_over_log: mixed / (n as f64).ln(),
        antipodal_sup: antipodal,
        determinant_grid_residual: determinant_grid_residual(&ps, m)?,
        off_singularity_gap: gap,
        delta,
    })
}

/// Headline numbers of a construction run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteklovReport {
    pub epsilon: f64,
    pub n: Vec<usize>,
    pub sup_phi: Vec<f64>,
    pub ratio_log: Vec<f64>,
    pub steklov_min: Vec<f64>,
    #[serde(rename = "l4_C_fit")]
    pub l4_c_fit: Option<f64>,
    pub l4_slope: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{extract_verblunsky, fh_moments};
    use crate::szego::{double_scheme, rotate_scheme};

    fn fh_alpha(eps: f64, n: usize) -> VerblunskyScheme {
        let spec = FHWeightSpec::new(eps).unwrap();
        extract_verblunsky(&fh_moments(&spec, n + 8), n).unwrap()
    }

    #[test]
    fn small_instances() {
        let (a, b) = (0.3, -0.2);
        let s = build_scheme(&VerblunskyScheme::from_real(&[a]).unwrap(), 1).unwrap();
        assert_eq!(s.gamma, VerblunskyScheme::from_real(&[a, -a, 0.0, -a]).unwrap());
        let s = build_scheme(&VerblunskyScheme::from_real(&[a, b]).unwrap(), 2).unwrap();
        assert_eq!(s.gamma, VerblunskyScheme::from_real(&[a, b, -b, -a, 0.0, -a, b]).unwrap());
        s.check_structure().unwrap();
    }

    #[test]
    fn prefix_is_doubled_scheme_and_tail_is_rotated() {
        let alpha = fh_alpha(0.1, 40);
        for n in [1usize, 5, 16, 40] {
            let s = build_scheme(&alpha, n).unwrap();
            s.check_structure().unwrap();
            assert_eq!(s.gamma.prefix(2 * n), double_scheme(&alpha.prefix(n)).unwrap());
            let tail = VerblunskyScheme::new(s.gamma.gamma()[2 * n + 1..].to_vec()).unwrap();
            let rot = rotate_scheme(&alpha.prefix(n), PI);
            assert!(tail.max_abs_diff(&rot) <= 1e-15 * 4.0);
            assert_eq!(s.get(3 * n + 5), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn build_errors() {
        let alpha = VerblunskyScheme::new(vec![Complex64::new(0.1, 0.2)]).unwrap();
        assert!(matches!(build_scheme(&alpha, 1), Err(Error::NonRealCoefficient { .. })));
        assert!(matches!(build_scheme(&alpha, 2), Err(Error::SchemeTooShort { .. })));
    }

    #[test]
    fn main_term_properties() {
        let eps = 0.1;
        for j in (0..10_000).step_by(7) {
            let t = l4_main_term(j, eps);
            assert!(t.im.abs() <= 1e-12, "j={j}");
            assert!(t.norm() <= 2.0 * eps / (PI * (j + 1) as f64) * (1.0 + 1e-12));
        }
        for j in [0usize, 3, 10] {
            assert!(l4_main_term(j, 1e-6).norm() < 1e-5);
        }
    }

    #[test]
    fn main_term_gamma_modulus() {
        for eps in [0.05, 0.1, 0.2] {
            let (g, h) = gamma_ratios(eps);
            assert!((g.norm() - eps / PI).abs() < 1e-14);
            assert!((g.conj() - h).norm() < 1e-15);
        }
    }

    #[test]
    fn qq1_segments() {
        let (n, eps) = (6usize, 0.1);
        assert_eq!(qq1_main_term(2 * n, n, eps), Complex64::new(0.0, 0.0));
        assert_eq!(qq1_main_term(3 * n + 1, n, eps), Complex64::new(0.0, 0.0));
        for j in 0..n {
            assert_eq!(qq1_main_term(j, n, eps), l4_main_term(j, eps));
            assert_eq!(qq1_main_term(2 * n - 1 - j, n, eps), -qq1_main_term(j, n, eps));
            let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
            assert_eq!(qq1_main_term(2 * n + 1 + j, n, eps), sign * l4_main_term(j, eps));
        }
    }

    #[test]
    fn extraction_meets_main_term_at_start() {
        let eps = 0.1;
        let alpha = fh_alpha(eps, 64);
        let r0 = (alpha.get(0) - l4_main_term(0, eps)).norm();
        assert!(r0 < 0.05 * alpha.get(0).norm());
        let d = AsymptoticDescriptor::new(&FHWeightSpec::new(eps).unwrap());
        assert_eq!(d.main_term(7), l4_main_term(7, eps));
    }

    #[test]
    fn residual_window_errors() {
        let alpha = fh_alpha(0.1, 64);
        assert!(matches!(residual_report(&alpha, 0.1, (40, 30)), Err(Error::EmptyWindow { .. })));
        assert!(matches!(residual_report(&alpha, 0.1, (16, 64)), Err(Error::EmptyWindow { .. })));
        let r = residual_report(&alpha, 0.1, (16, 63)).unwrap();
        assert!(r.slope_fit < -1.5);
        assert!(r.c_fit.is_finite() && r.excluded.is_empty());
    }

    #[test]
    fn weight_is_a_probability_density() {
        let n = 16;
        let alpha = fh_alpha(0.1, n);
        let scheme = build_scheme(&alpha, n).unwrap();
        let w = steklov_weight(&scheme, &alpha, 4096).unwrap();
        assert!((w.integral().re - 1.0).abs() < 1e-9);
        assert!(w.values().iter().all(|v| v.re > 0.0));
        assert!(steklov_weight(&scheme, &alpha, 100).is_err());
    }

    #[test]
    fn f_tilde_is_bernstein_szego_of_rotated_scheme() {
        // Re F~ = |phi_n^*(-z)|^{-2}
        let n = 12;
        let alpha = fh_alpha(0.2, n);
        let ft = f_tilde(&alpha, n, 512).unwrap();
        let ps = szego_forward(&alpha, n).unwrap();
        let den = ps.phi_star.eval_grid_rotated(512, true).unwrap();
        for (f, d) in ft.values().iter().zip(den.values()) {
            assert!((f.re - ps.norm_sq / d.norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn growth_rows_sorted() {
        let alpha = fh_alpha(0.1, 32);
        let rows = growth_report(&alpha, &[32, 16, 16], None).unwrap();
        assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![16, 32]);
        assert!(rows.iter().all(|r| r.mechanism_holds && r.ratio > 0.0));
        let direct = sup_phi(&build_scheme(&alpha, 16).unwrap(), rows[0].m).unwrap();
        assert_eq!(direct, rows[0].sup_phi);
    }

    #[test]
    fn l1_suite_small() {
        let spec = FHWeightSpec::new(0.1).unwrap();
        let alpha = fh_alpha(0.1, 32);
        let r = lemma_l1_suite(&spec, &alpha, 32, 4096, 0.3).unwrap();
        assert!(r.determinant_grid_residual <= 1e-12);
        assert!(r.star_ratio > 1.0 && r.star_ratio < 2.0);
        assert!(r.off_singularity_gap < 0.1);
    }

    #[test]
    fn report_json_keys() {
        let rep = SteklovReport {
            epsilon: 0.1,
            n: vec![16],
            sup_phi: vec![1.0],
            ratio_log: vec![0.3],
            steklov_min: vec![0.7],
            l4_c_fit: Some(1e-5),
            l4_slope: Some(-2.9),
        };
        let v = serde_json::to_value(&rep).unwrap();
        for key in ["epsilon", "n", "sup_phi", "ratio_log", "steklov_min", "l4_C_fit", "l4_slope"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
