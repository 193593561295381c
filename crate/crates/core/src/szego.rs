//! Szegő recursion for first- and second-kind polynomials, scheme
//! transformations, and the Bernstein–Szegő / decoupled weights.
//!
//! Conventions: `Phi_{n+1} = z Phi_n - conj(g_n) Phi_n^*`,
//! `Phi_{n+1}^* = Phi_n^* - g_n z Phi_n`; the second-kind pair uses `-g_n`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::poly::{ComplexPoly, ComplexRepr};
use crate::sum::sum_f64;

/// Coefficients with modulus at or above `1 - DISK_MARGIN` are rejected.
pub const DISK_MARGIN: f64 = 1e-10;

/// A finite sequence of Verblunsky (Schur) parameters in the open unit disk.
#[derive(Debug, Clone, PartialEq)]
pub struct VerblunskyScheme {
    gamma: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct SchemeJson {
    gamma: Vec<ComplexRepr>,
}

impl Serialize for VerblunskyScheme {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SchemeJson { gamma: self.gamma.iter().map(|&g| g.into()).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for VerblunskyScheme {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SchemeJson::deserialize(d)?;
        VerblunskyScheme::new(raw.gamma.into_iter().map(Into::into).collect())
            .map_err(serde::de::Error::custom)
    }
}

impl VerblunskyScheme {
    pub fn new(gamma: Vec<Complex64>) -> Result<Self> {
        for (index, g) in gamma.iter().enumerate() {
            let modulus = g.norm();
            if !(modulus < 1.0 - DISK_MARGIN) {
                return Err(Error::CoefficientOutsideDisk { index, modulus });
            }
        }
        Ok(Self { gamma })
    }

    pub fn from_real(gamma: &[f64]) -> Result<Self> {
        Self::new(gamma.iter().map(|&g| Complex64::new(g, 0.0)).collect())
    }

    pub fn zeros(len: usize) -> Self {
        Self { gamma: vec![Complex64::new(0.0, 0.0); len] }
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    pub fn gamma(&self) -> &[Complex64] {
        &self.gamma
    }

    pub fn get(&self, j: usize) -> Complex64 {
        self.gamma[j]
    }

    /// `rho_j = sqrt(1 - |g_j|^2)`.
    pub fn rho(&self) -> Vec<f64> {
        self.gamma.iter().map(|g| (1.0 - g.norm_sqr()).sqrt()).collect()
    }

    /// `prod_{j<k} (1 - |g_j|^2)`, accumulated in log space.
    pub fn norm_sq(&self, k: usize) -> f64 {
        sum_f64(self.gamma[..k].iter().map(|g| (-g.norm_sqr()).ln_1p())).exp()
    }

    pub fn prefix(&self, k: usize) -> Self {
        Self { gamma: self.gamma[..k.min(self.len())].to_vec() }
    }

    /// The real parts, or an error naming the first coefficient whose
    /// imaginary part exceeds `tol`.
    pub fn real_values(&self, tol: f64) -> Result<Vec<f64>> {
        self.gamma
            .iter()
            .enumerate()
            .map(|(index, g)| {
                if g.im.abs() > tol {
                    Err(Error::NonRealCoefficient { index, imag: g.im })
                } else {
                    Ok(g.re)
                }
            })
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.len().max(other.len());
        let at = |s: &Self, j: usize| s.gamma.get(j).copied().unwrap_or_default();
        (0..n).map(|j| (at(self, j) - at(other, j)).norm()).fold(0.0, f64::max)
    }
}

/// Monic `Phi_k`, `Phi_k^*`, `Psi_k`, `Psi_k^*` and `||Phi_k||^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolySystem {
    pub k: usize,
    pub phi: ComplexPoly,
    pub phi_star: ComplexPoly,
    pub psi: ComplexPoly,
    pub psi_star: ComplexPoly,
    pub norm_sq: f64,
}

impl PolySystem {
    /// `1 / ||Phi_k||`, the factor turning monic into orthonormal.
    pub fn orthonormal_scale(&self) -> f64 {
        1.0 / self.norm_sq.sqrt()
    }
}

fn szego_step(p: &ComplexPoly, p_star: &ComplexPoly, g: Complex64) -> (ComplexPoly, ComplexPoly) {
    let zp = p.shift_by_z();
    let next = &zp - &p_star.scale(g.conj());
    let next_star = p_star - &zp.scale(g);
    (next, next_star)
}

/// Advances both recurrences `k` steps from `Phi_0 = Psi_0 = 1`.
pub fn szego_forward(s: &VerblunskyScheme, k: usize) -> Result<PolySystem> {
    if k > s.len() {
        return Err(Error::SchemeTooShort { requested: k, available: s.len() });
    }
    let (mut phi, mut phi_star) = (ComplexPoly::one(), ComplexPoly::one());
    let (mut psi, mut psi_star) = (ComplexPoly::one(), ComplexPoly::one());
    for &g in &s.gamma()[..k] {
        (phi, phi_star) = szego_step(&phi, &phi_star, g);
        (psi, psi_star) = szego_step(&psi, &psi_star, -g);
    }
    Ok(PolySystem { k, phi, phi_star, psi, psi_star, norm_sq: s.norm_sq(k) })
}

/// `(a_0, .., a_{k-1}, -a_{k-1}, .., -a_0)` for real `a`.
pub fn double_scheme(alpha: &VerblunskyScheme) -> Result<VerblunskyScheme> {
    let a = alpha.real_values(0.0)?;
    let doubled: Vec<f64> = a.iter().copied().chain(a.iter().rev().map(|&x| -x)).collect();
    VerblunskyScheme::from_real(&doubled)
}

/// Parameters of the measure rotated by `beta`: `e^{-i(j+1) beta} a_j`.
pub fn rotate_scheme(alpha: &VerblunskyScheme, beta: f64) -> VerblunskyScheme {
    let gamma = alpha
        .gamma()
        .iter()
        .enumerate()
        .map(|(j, &a)| a * Complex64::from_polar(1.0, -((j + 1) as f64) * beta))
        .collect();
    VerblunskyScheme { gamma }
}

/// Largest coefficient of `Phi_k Psi_k^* + Psi_k Phi_k^* - 2 z^k prod(1-|g_j|^2)`.
pub fn wronskian_residual(ps: &PolySystem) -> f64 {
    let lhs = &(&ps.phi * &ps.psi_star) + &(&ps.psi * &ps.phi_star);
    let rhs = ComplexPoly::monomial(ps.k).scale(Complex64::new(2.0 * ps.norm_sq, 0.0));
    (&lhs - &rhs).max_coeff_modulus()
}

/// Largest grid value of `|conj(Phi_k^*) Psi_k^* + Phi_k^* conj(Psi_k^*) - 2 prod(1-|g_j|^2)|`.
pub fn determinant_grid_residual(ps: &PolySystem, m: usize) -> Result<f64> {
    let a = ps.phi_star.eval_grid(m)?;
    let b = ps.psi_star.eval_grid(m)?;
    let target = 2.0 * ps.norm_sq;
    Ok(a.values()
        .iter()
        .zip(b.values())
        .map(|(&x, &y)| (x.conj() * y + x * y.conj() - target).norm())
        .fold(0.0, f64::max))
}

/// Right-hand sides of the doubling identities for a system of degree `k`:
/// `(Phi_k^2 + Phi_k Psi_k - z^{-1}(Phi_k^*)^2 + z^{-1} Phi_k^* Psi_k^*) / 2`
/// and `((Phi_k^*)^2 + Phi_k^* Psi_k^* - z Phi_k^2 + z Phi_k Psi_k) / 2`.
pub fn doubling_rhs(ps: &PolySystem) -> Result<(ComplexPoly, ComplexPoly)> {
    let half = Complex64::new(0.5, 0.0);
    let phi_sq = &ps.phi * &ps.phi;
    let phi_psi = &ps.phi * &ps.psi;
    let star_sq = &ps.phi_star * &ps.phi_star;
    let star_prod = &ps.phi_star * &ps.psi_star;
    let over_z = (&star_prod - &star_sq).div_by_z(1e-14)?;
    let first = (&(&phi_sq + &phi_psi) + &over_z).scale(half);
    let times_z = (&phi_psi - &phi_sq).shift_by_z();
    let second = (&(&star_sq + &star_prod) + &times_z).scale(half);
    Ok((first, second))
}

/// `norm_sq / (2 pi |Phi_n^*|^2)` on the grid.
pub fn bernstein_szego_weight(ps: &PolySystem, m: usize) -> Result<GridFunction> {
    if !(ps.norm_sq > 0.0) {
        return Err(Error::InvalidParameter(format!("norm_sq = {}", ps.norm_sq)));
    }
    let star = ps.phi_star.eval_grid(m)?;
    let mut values = Vec::with_capacity(m);
    for (index, v) in star.values().iter().enumerate() {
        let modulus = v.norm();
        if modulus < 1e-13 {
            return Err(Error::VanishingDenominator { index, modulus });
        }
        values.push(Complex64::new(ps.norm_sq / (2.0 * PI * v.norm_sqr()), 0.0));
    }
    GridFunction::new(values)
}

/// Weight of the measure whose parameters are those of `ps` followed by those
/// of `sigma_tilde`:
/// `4 sigma_tilde' / |phi_n + phi_n^* + F (phi_n^* - phi_n)|^2` with orthonormal
/// `phi_n`.
///
/// `f_tilde` must be the boundary value of a smooth Carathéodory function
/// normalized to mean real part 1; only positivity of its real part is
/// checked here.
pub fn decouple_weight(
    ps: &PolySystem,
    f_tilde: &GridFunction,
    sigma_tilde_prime: &GridFunction,
) -> Result<GridFunction> {
    f_tilde.check_same(sigma_tilde_prime)?;
    let m = f_tilde.m();
    let scale = ps.orthonormal_scale();
    let phi = ps.phi.eval_grid(m)?;
    let phi_star = ps.phi_star.eval_grid(m)?;
    let mut values = Vec::with_capacity(m);
    for index in 0..m {
        let f = f_tilde.values()[index];
        if !(f.re > 0.0) {
            return Err(Error::NotCaratheodory { index, value: f.re });
        }
        let p = phi.values()[index] * scale;
        let ps_ = phi_star.values()[index] * scale;
        let denom = (p + ps_ + f * (ps_ - p)).norm_sqr();
        if denom.sqrt() < 1e-13 {
            return Err(Error::VanishingDenominator { index, modulus: denom.sqrt() });
        }
        values.push(Complex64::new(4.0 * sigma_tilde_prime.values()[index].re / denom, 0.0));
    }
    GridFunction::new(values)
}

/// `|exp((1/4pi) int ln(2 pi w)) - prod rho_j|` with the rectangle rule.
pub fn sum_rule_residual(w: &GridFunction, s: &VerblunskyScheme) -> Result<f64> {
    let m = w.m();
    let mut logs = Vec::with_capacity(m);
    for (index, v) in w.values().iter().enumerate() {
        if !(v.re > 0.0) {
            return Err(Error::NonPositiveWeight { index, value: v.re });
        }
        logs.push((2.0 * PI * v.re).ln());
    }
    let mean_log = sum_f64(logs) / m as f64;
    let lhs = (0.5 * mean_log).exp();
    let rhs = s.norm_sq(s.len()).sqrt();
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn one_step() {
        let s = VerblunskyScheme::from_real(&[0.5]).unwrap();
        let ps = szego_forward(&s, 1).unwrap();
        assert_eq!(ps.phi, ComplexPoly::from_real(&[-0.5, 1.0]));
        assert_eq!(ps.phi_star, ComplexPoly::from_real(&[1.0, -0.5]));
        assert_eq!(ps.psi, ComplexPoly::from_real(&[0.5, 1.0]));
        assert_eq!(ps.psi_star, ComplexPoly::from_real(&[1.0, 0.5]));
        assert_eq!(ps.norm_sq, 0.75);
    }

    #[test]
    fn free_case() {
        let ps = szego_forward(&VerblunskyScheme::zeros(5), 5).unwrap();
        assert_eq!(ps.phi, ComplexPoly::monomial(5));
        assert_eq!(ps.phi_star.coeff(0), c(1.0, 0.0));
        assert_eq!(ps.phi_star.degree(), 0);
        assert_eq!(wronskian_residual(&ps), 0.0);
    }

    #[test]
    fn two_steps_by_hand() {
        // Phi_1 = z - 0.5, Phi_1^* = 1 - 0.5z;
        // Phi_2 = z(z - 0.5) + 0.3(1 - 0.5z) = z^2 - 0.65z + 0.3
        let s = VerblunskyScheme::from_real(&[0.5, -0.3]).unwrap();
        let ps = szego_forward(&s, 2).unwrap();
        assert!(ps.phi.max_abs_diff(&ComplexPoly::from_real(&[0.3, -0.65, 1.0])) < 1e-15);
    }

    #[test]
    fn too_many_steps() {
        let s = VerblunskyScheme::from_real(&[0.1]).unwrap();
        assert_eq!(
            szego_forward(&s, 2),
            Err(Error::SchemeTooShort { requested: 2, available: 1 })
        );
    }

    #[test]
    fn rejects_boundary_coefficients() {
        assert!(matches!(
            VerblunskyScheme::from_real(&[0.2, 1.0 - 1e-11]),
            Err(Error::CoefficientOutsideDisk { index: 1, .. })
        ));
        assert!(VerblunskyScheme::new(vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn doubling_definition() {
        let a = VerblunskyScheme::from_real(&[0.25]).unwrap();
        assert_eq!(double_scheme(&a).unwrap(), VerblunskyScheme::from_real(&[0.25, -0.25]).unwrap());
        let ab = VerblunskyScheme::from_real(&[0.25, -0.5]).unwrap();
        assert_eq!(
            double_scheme(&ab).unwrap(),
            VerblunskyScheme::from_real(&[0.25, -0.5, 0.5, -0.25]).unwrap()
        );
        let complex = VerblunskyScheme::new(vec![c(0.1, 0.1)]).unwrap();
        assert!(matches!(double_scheme(&complex), Err(Error::NonRealCoefficient { index: 0, .. })));
    }

    #[test]
    fn doubling_identity_fixed_example() {
        let a = VerblunskyScheme::from_real(&[0.3, -0.2, 0.5]).unwrap();
        let small = szego_forward(&a, 3).unwrap();
        let big = szego_forward(&double_scheme(&a).unwrap(), 6).unwrap();
        let (phi2k, phi2k_star) = doubling_rhs(&small).unwrap();
        assert!(phi2k.max_abs_diff(&big.phi) < 1e-14);
        assert!(phi2k_star.max_abs_diff(&big.phi_star) < 1e-14);
    }

    #[test]
    fn rotation_definition() {
        let a = VerblunskyScheme::from_real(&[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(rotate_scheme(&a, 0.0), a);
        let r = rotate_scheme(&a, PI);
        let expect = [-0.1, 0.2, -0.3];
        for (g, e) in r.gamma().iter().zip(expect) {
            assert!((g - c(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn wronskian_one_step() {
        let ps = szego_forward(&VerblunskyScheme::from_real(&[0.5]).unwrap(), 1).unwrap();
        assert!(wronskian_residual(&ps) <= 1e-15);
        assert!(determinant_grid_residual(&ps, 16).unwrap() <= 1e-15);
    }

    #[test]
    fn lebesgue_weight() {
        let ps = szego_forward(&VerblunskyScheme::zeros(3), 3).unwrap();
        let w = bernstein_szego_weight(&ps, 32).unwrap();
        assert!(w.values().iter().all(|v| (v.re - 1.0 / (2.0 * PI)).abs() < 1e-15));
        let s = sum_rule_residual(&w, &VerblunskyScheme::zeros(0)).unwrap();
        assert!(s < 1e-15);
    }

    #[test]
    fn one_parameter_weight_and_moment() {
        let ps = szego_forward(&VerblunskyScheme::from_real(&[0.5]).unwrap(), 1).unwrap();
        let w = bernstein_szego_weight(&ps, 256).unwrap();
        for (k, v) in w.values().iter().enumerate() {
            let z = crate::grid::unit_point(k, 256);
            let expect = 0.75 / (2.0 * PI * (c(1.0, 0.0) - z * 0.5).norm_sqr());
            assert!((v.re - expect).abs() < 1e-14);
        }
        assert!((w.integral().re - 1.0).abs() < 1e-14);
        // c_1 = int e^{-i theta} w = 0.5
        assert!((w.fourier_integral(1) - c(0.5, 0.0)).norm() < 1e-14);
        let s = VerblunskyScheme::from_real(&[0.5]).unwrap();
        assert!(sum_rule_residual(&w, &s).unwrap() <= 1e-10);
    }

    #[test]
    fn sum_rule_rejects_nonpositive() {
        let w = GridFunction::from_real(vec![1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            sum_rule_residual(&w, &VerblunskyScheme::zeros(0)),
            Err(Error::NonPositiveWeight { index: 1, .. })
        ));
    }

    #[test]
    fn decouple_trivial() {
        let ps = szego_forward(&VerblunskyScheme::zeros(0), 0).unwrap();
        let m = 16;
        let f = GridFunction::constant(m, c(1.0, 0.0)).unwrap();
        let sig = GridFunction::constant(m, c(1.0 / (2.0 * PI), 0.0)).unwrap();
        let w = decouple_weight(&ps, &f, &sig).unwrap();
        assert!(w.values().iter().all(|v| (v.re - 1.0 / (2.0 * PI)).abs() < 1e-16));
    }

    #[test]
    fn decouple_with_unit_f_is_bernstein_szego_product() {
        let s = VerblunskyScheme::from_real(&[0.4, -0.3, 0.2]).unwrap();
        let ps = szego_forward(&s, 3).unwrap();
        let m = 64;
        let f = GridFunction::constant(m, c(1.0, 0.0)).unwrap();
        let sig = GridFunction::from_fn(m, |t| c((1.0 + 0.3 * t.cos()) / (2.0 * PI), 0.0)).unwrap();
        let w = decouple_weight(&ps, &f, &sig).unwrap();
        let star = ps.phi_star.eval_grid(m).unwrap();
        for k in 0..m {
            let expect = sig.values()[k].re * ps.norm_sq / star.values()[k].norm_sqr();
            assert!((w.values()[k].re - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn decouple_rejects_non_caratheodory() {
        let ps = szego_forward(&VerblunskyScheme::zeros(0), 0).unwrap();
        let f = GridFunction::new(vec![c(1.0, 0.0), c(-0.1, 0.0)]).unwrap();
        let sig = GridFunction::constant(2, c(1.0, 0.0)).unwrap();
        assert!(matches!(
            decouple_weight(&ps, &f, &sig),
            Err(Error::NotCaratheodory { index: 1, .. })
        ));
        let bad = GridFunction::constant(3, c(1.0, 0.0)).unwrap();
        assert!(matches!(decouple_weight(&ps, &f, &bad), Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn real_schemes_give_real_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a: Vec<f64> = (0..20).map(|_| rng.gen_range(-0.8..0.8)).collect();
        let ps = szego_forward(&VerblunskyScheme::from_real(&a).unwrap(), 20).unwrap();
        for p in [&ps.phi, &ps.phi_star, &ps.psi, &ps.psi_star] {
            assert!(p.is_real(0.0));
        }
    }

    #[test]
    fn star_of_phi_is_phi_star() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g: Vec<Complex64> =
            (0..12).map(|_| Complex64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..6.0))).collect();
        let ps = szego_forward(&VerblunskyScheme::new(g).unwrap(), 12).unwrap();
        assert!(ps.phi.star(12).unwrap().max_abs_diff(&ps.phi_star) < 1e-14);
        assert!(ps.psi.star(12).unwrap().max_abs_diff(&ps.psi_star) < 1e-14);
        assert_eq!(ps.phi.leading(), c(1.0, 0.0));
        assert_eq!(ps.phi_star.coeff(0), c(1.0, 0.0));
    }

    #[test]
    fn zero_parameter_keeps_star_and_shifts() {
        let a = VerblunskyScheme::from_real(&[0.3, -0.2, 0.5]).unwrap();
        let d = double_scheme(&a).unwrap();
        let mut ext = d.gamma().to_vec();
        ext.push(c(0.0, 0.0));
        let ext = VerblunskyScheme::new(ext).unwrap();
        let p6 = szego_forward(&ext, 6).unwrap();
        let p7 = szego_forward(&ext, 7).unwrap();
        assert_eq!(p7.phi, p6.phi.shift_by_z());
        assert_eq!(p7.phi_star, p6.phi_star.clone().with_degree(7).unwrap());
    }

    #[test]
    fn poly_system_json_keys() {
        let ps = szego_forward(&VerblunskyScheme::from_real(&[0.5]).unwrap(), 1).unwrap();
        let v: serde_json::Value = serde_json::to_value(&ps).unwrap();
        for key in ["phi", "phi_star", "psi", "psi_star", "norm_sq"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let s = VerblunskyScheme::from_real(&[0.5]).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"gamma":[{"re":0.5,"im":0.0}]}"#);
        assert!(serde_json::from_str::<VerblunskyScheme>(r#"{"gamma":[{"re":1.5,"im":0.0}]}"#).is_err());
    }
}
