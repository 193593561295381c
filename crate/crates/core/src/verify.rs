//! Pass/fail suites over the algebraic identities, the coefficient
//! asymptotics, the construction, and the degree-`n` estimates. Thresholds
//! come from the embedded `criteria.json`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{
    extract_verblunsky, fh_grid, fh_moments, generic_moments, FHWeightSpec, MomentSequence,
};
use crate::grid::GridFunction;
use crate::special::{
    complex_digamma, complex_gamma, kummer_psi_asymptotic, kummer_psi_series, PSI_CROSSOVER,
};
use crate::steklov::{
    build_scheme, growth_report, lemma_l1_suite, residual_report, steklov_weight, GrowthRow,
    L1Report, ResidualReport,
};
use crate::szego::{
    bernstein_szego_weight, double_scheme, doubling_rhs, determinant_grid_residual, rotate_scheme,
    sum_rule_residual, szego_forward, wronskian_residual, VerblunskyScheme,
};

pub const CRITERIA_JSON: &str = include_str!("../criteria.json");
pub const GAMMA_ORACLE_CSV: &str = include_str!("../tests/fixtures/gamma_oracle.csv");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCriteria {
    pub random_schemes: usize,
    pub max_len: usize,
    pub doubling: f64,
    pub wronskian: f64,
    pub determinant: f64,
    pub rotation_schemes: usize,
    pub rotation: f64,
    pub round_trip_max_len: usize,
    pub round_trip: f64,
    pub sum_rule_bs: f64,
    pub sum_rule_fh: f64,
    pub sum_rule_fh_len: usize,
    pub gamma_identities: f64,
    pub gamma_oracle: f64,
    pub digamma_reflection: f64,
    pub psi_ring: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L4Criteria {
    pub n: usize,
    pub imag: f64,
    pub slope: f64,
    pub fit_window: (usize, usize),
    pub stability_windows: [(usize, usize); 2],
    pub c_fit_factor: f64,
    pub bound_factor: f64,
    pub bound_from: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthCriteria {
    pub m: usize,
    pub integral: f64,
    pub steklov_min_spread: f64,
    pub round_trip_n: usize,
    pub round_trip: f64,
    pub inversion: f64,
    pub max_inversions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L1Criteria {
    pub n_min: usize,
    pub m: usize,
    pub delta: f64,
    pub star_factor: f64,
    pub antipodal_factor: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criteria {
    pub version: u32,
    pub identities: IdentityCriteria,
    pub l4: L4Criteria,
    pub growth: GrowthCriteria,
    pub l1: L1Criteria,
}

impl Criteria {
    pub fn embedded() -> Self {
        serde_json::from_str(CRITERIA_JSON).expect("embedded criteria.json is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: String,
    pub description: String,
    pub value: f64,
    pub comparison: Comparison,
    pub threshold: f64,
    pub passed: bool,
}

impl CriterionResult {
    pub fn at_most(id: &str, description: &str, value: f64, threshold: f64) -> Self {
        Self {
            id: id.into(),
            description: description.into(),
            value,
            comparison: Comparison::AtMost,
            threshold,
            passed: value <= threshold,
        }
    }

    pub fn at_least(id: &str, description: &str, value: f64, threshold: f64) -> Self {
        Self {
            id: id.into(),
            description: description.into(),
            value,
            comparison: Comparison::AtLeast,
            threshold,
            passed: value >= threshold,
        }
    }

    /// One line: `PASS id: value <= threshold (description)`.
    pub fn line(&self) -> String {
        let op = match self.comparison {
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
        };
        format!(
            "{} {}: {:.6e} {} {:.6e} ({})",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.value,
            op,
            self.threshold,
            self.description
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub criteria_version: u32,
    pub results: Vec<CriterionResult>,
    /// Observations reported without a pass/fail verdict.
    pub notes: Vec<String>,
    pub details: serde_json::Value,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

/// Upper bound on the modulus of random coefficients.
pub const RANDOM_MODULUS: f64 = 0.5;

fn random_real_scheme(rng: &mut ChaCha8Rng, len: usize, bound: f64) -> VerblunskyScheme {
    let g: Vec<f64> = (0..len).map(|_| rng.gen_range(-bound..bound)).collect();
    VerblunskyScheme::from_real(&g).expect("inside the disk")
}

fn random_complex_scheme(rng: &mut ChaCha8Rng, len: usize, bound: f64) -> VerblunskyScheme {
    let g = (0..len)
        .map(|_| Complex64::from_polar(rng.gen_range(0.0..bound), rng.gen_range(0.0..2.0 * PI)))
        .collect();
    VerblunskyScheme::new(g).expect("inside the disk")
}

/// Worst residuals of the doubling, Wronskian, grid determinant, shift and
/// star identities over random real schemes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    pub doubling: f64,
    pub wronskian: f64,
    pub determinant: f64,
    /// Number of schemes where the shift identity at `g_{2n} = 0` was not exact.
    pub shift_failures: usize,
    /// Number of polynomials whose double star differed from the original.
    pub star_failures: usize,
}

pub fn identity_residuals(seed: u64, count: usize, max_len: usize) -> Result<IdentityResiduals> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = IdentityResiduals::default();
    for _ in 0..count {
        let k = rng.gen_range(1..=max_len);
        let alpha = random_real_scheme(&mut rng, k, RANDOM_MODULUS);
        let ps = szego_forward(&alpha, k)?;

        let doubled = szego_forward(&double_scheme(&alpha)?, 2 * k)?;
        let (a, b) = doubling_rhs(&ps)?;
        out.doubling = out.doubling.max(doubled.phi.max_abs_diff(&a)).max(doubled.phi_star.max_abs_diff(&b));
        out.wronskian = out.wronskian.max(wronskian_residual(&ps));
        out.determinant = out.determinant.max(determinant_grid_residual(&ps, 256)?);

        let full = build_scheme(&alpha, k)?;
        let even = szego_forward(&full.gamma, 2 * k)?;
        let odd = szego_forward(&full.gamma, 2 * k + 1)?;
        if odd.phi != even.phi.shift_by_z() || odd.phi_star != even.phi_star.clone().with_degree(2 * k + 1)? {
            out.shift_failures += 1;
        }

        for p in [&ps.phi, &ps.phi_star, &ps.psi, &ps.psi_star] {
            if &p.star(k)?.star(k)? != p {
                out.star_failures += 1;
            }
        }
    }
    Ok(out)
}

/// Largest grid the adaptive Bernstein–Szegő quadrature may use.
pub const MAX_QUADRATURE_GRID: usize = 1 << 21;

/// Bernstein–Szegő weight of `alpha` and its first `k_max` moments, on a grid
/// doubled from 4096 points until the moments change by less than 1e-14.
pub fn converged_bs_moments(alpha: &VerblunskyScheme, k_max: usize) -> Result<(GridFunction, MomentSequence)> {
    let ps = szego_forward(alpha, alpha.len())?;
    let mut m = 4096usize.max(8 * k_max);
    let mut w = bernstein_szego_weight(&ps, m)?;
    let mut mom = generic_moments(&w, k_max)?;
    while m < MAX_QUADRATURE_GRID {
        let w2 = bernstein_szego_weight(&ps, 2 * m)?;
        let mom2 = generic_moments(&w2, k_max)?;
        let change = mom.values().iter().zip(mom2.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        m *= 2;
        w = w2;
        mom = mom2;
        if change < 1e-14 {
            break;
        }
    }
    Ok((w, mom))
}

/// Worst distance between extraction from rotated moments and the rotated
/// scheme.
pub fn rotation_residual(seed: u64, count: usize, betas: &[f64]) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let k = rng.gen_range(1..=12);
        let alpha = random_complex_scheme(&mut rng, k, RANDOM_MODULUS);
        let (_, mom) = converged_bs_moments(&alpha, k + 4)?;
        for &beta in betas {
            let got = extract_verblunsky(&mom.rotated(beta), k)?;
            worst = worst.max(got.max_abs_diff(&rotate_scheme(&alpha, beta)));
        }
    }
    Ok(worst)
}

/// Worst coefficient error recovering random schemes from their
/// Bernstein–Szegő weights (trailing zeros included), the largest
/// coefficient extracted from exact Lebesgue moments, and the same from a
/// grid Lebesgue weight.
pub fn round_trip_residual(seed: u64, count: usize, max_len: usize) -> Result<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb5);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let k = rng.gen_range(1..=max_len);
        let alpha = random_complex_scheme(&mut rng, k, RANDOM_MODULUS);
        let (_, mom) = converged_bs_moments(&alpha, k + 8)?;
        let got = extract_verblunsky(&mom, k + 8)?;
        worst = worst.max(got.max_abs_diff(&alpha));
    }
    let max_mod = |s: &VerblunskyScheme| s.gamma().iter().map(|g| g.norm()).fold(0.0, f64::max);
    let mut delta = vec![Complex64::new(0.0, 0.0); 33];
    delta[0] = Complex64::new(1.0, 0.0);
    let exact = extract_verblunsky(&MomentSequence::new(delta)?, 32)?;
    let lebesgue = GridFunction::constant(1024, Complex64::new(1.0 / (2.0 * PI), 0.0))?;
    let grid = extract_verblunsky(&generic_moments(&lebesgue, 32)?, 32)?;
    Ok((worst, max_mod(&exact), max_mod(&grid)))
}

/// Sum-rule residuals for random Bernstein–Szegő weights.
pub fn sum_rule_bs(seed: u64, count: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5u64);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let k = rng.gen_range(1..=16);
        let alpha = random_complex_scheme(&mut rng, k, RANDOM_MODULUS);
        let (w, _) = converged_bs_moments(&alpha, k)?;
        worst = worst.max(sum_rule_residual(&w, &alpha)?);
    }
    Ok(worst)
}

/// Sum-rule residual of the two-jump weight truncated at each length.
pub fn sum_rule_fh(epsilon: f64, lengths: &[usize]) -> Result<Vec<(usize, f64)>> {
    let spec = FHWeightSpec::new(epsilon)?;
    let n_max = lengths.iter().copied().max().unwrap_or(0);
    let alpha = extract_verblunsky(&fh_moments(&spec, n_max + 8), n_max)?;
    let w = fh_grid(&spec, 1 << 16)?;
    lengths.iter().map(|&l| Ok((l, sum_rule_residual(&w, &alpha.prefix(l))?))).collect()
}

/// `(z, Gamma(z))` pairs from the 30-digit fixture.
pub fn gamma_oracle() -> Result<Vec<(Complex64, Complex64)>> {
    let mut out = Vec::new();
    for line in GAMMA_ORACLE_CSV.lines().skip(1) {
        let f: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{line}: {e}"))))
            .collect::<Result<_>>()?;
        if f.len() != 4 {
            return Err(Error::Parse(format!("bad fixture row {line:?}")));
        }
        out.push((Complex64::new(f[0], f[1]), Complex64::new(f[2], f[3])));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SpecialResiduals {
    pub oracle: f64,
    pub recurrence: f64,
    pub reflection: f64,
    pub digamma_reflection: f64,
    pub psi_ring: f64,
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

pub fn special_residuals(epsilons: &[f64]) -> Result<SpecialResiduals> {
    let mut out = SpecialResiduals::default();
    for (z, g) in gamma_oracle()? {
        out.oracle = out.oracle.max(rel(complex_gamma(z)?, g));
        let gz = complex_gamma(z)?;
        out.recurrence = out.recurrence.max(rel(complex_gamma(z + 1.0)?, z * gz));
        let one_minus = Complex64::new(1.0, 0.0) - z;
        if one_minus.im == 0.0 && one_minus.re <= 0.0 && one_minus.re == one_minus.re.round() {
            continue;
        }
        let refl = PI / (PI * z).sin();
        out.reflection = out.reflection.max(rel(gz * complex_gamma(one_minus)?, refl));
    }
    for z in [
        Complex64::new(0.3, 0.2),
        Complex64::new(0.5, 0.0),
        Complex64::new(0.25, -0.7),
        Complex64::new(-1.3, 0.4),
        Complex64::new(2.6, 1.5),
    ] {
        let lhs = complex_digamma(Complex64::new(1.0, 0.0) - z)? - complex_digamma(z)?;
        let rhs = PI * (PI * z).cos() / (PI * z).sin();
        out.digamma_reflection = out.digamma_reflection.max((lhs - rhs).norm());
    }
    for &eps in epsilons {
        let y = eps / PI;
        for a in [
            Complex64::new(0.0, -y),
            Complex64::new(0.0, y),
            Complex64::new(1.0, -y),
            Complex64::new(1.0, y),
        ] {
            for i in 0..=32 {
                let arg = -PI / 2.0 + PI * i as f64 / 32.0;
                let s = kummer_psi_series(a, PSI_CROSSOVER, arg)?;
                let l = kummer_psi_asymptotic(a, PSI_CROSSOVER, arg)?;
                out.psi_ring = out.psi_ring.max(rel(l, s));
            }
        }
    }
    Ok(out)
}

/// Criteria 1-4 and the special-function checks.
pub fn identities_suite(seed: u64, criteria: &Criteria) -> Result<SuiteReport> {
    let c = &criteria.identities;
    let id = identity_residuals(seed, c.random_schemes, c.max_len)?;
    let rot = rotation_residual(seed, c.rotation_schemes, &[PI / 7.0, PI, 1.0])?;
    let (rt, leb_exact, leb_grid) = round_trip_residual(seed, c.rotation_schemes, c.round_trip_max_len)?;
    let bs = sum_rule_bs(seed, 20)?;
    let lens: Vec<usize> = (8..=12).map(|p| 1usize << p).filter(|&l| l <= c.sum_rule_fh_len).collect();
    let fh = sum_rule_fh(0.1, &lens)?;
    let monotone = fh.windows(2).filter(|w| !(w[1].1 < w[0].1)).count();
    let last = fh.last().map(|x| x.1).unwrap_or(f64::NAN);
    let sp = special_residuals(&[0.05, 0.1, 0.2])?;
    let results = vec![
        CriterionResult::at_most("identities.doubling", "doubling identities, coefficient residual", id.doubling, c.doubling),
        CriterionResult::at_most("identities.wronskian", "determinant identity, coefficient residual", id.wronskian, c.wronskian),
        CriterionResult::at_most("identities.shift", "zero middle parameter shifts exactly (failures)", id.shift_failures as f64, 0.0),
        CriterionResult::at_most("identities.determinant", "determinant identity on the grid", id.determinant, c.determinant),
        CriterionResult::at_most("identities.star", "star involution (failures)", id.star_failures as f64, 0.0),
        CriterionResult::at_most("rotation", "extraction of rotated moments vs rotated scheme", rot, c.rotation),
        CriterionResult::at_most("round_trip.bernstein_szego", "scheme recovered from its weight", rt, c.round_trip),
        CriterionResult::at_most("round_trip.lebesgue", "exact Lebesgue moments give zero parameters", leb_exact, 0.0),
        CriterionResult::at_most("round_trip.lebesgue_grid", "grid Lebesgue weight, largest parameter", leb_grid, 1e-15),
        CriterionResult::at_most("sum_rule.bernstein_szego", "sum rule residual", bs, c.sum_rule_bs),
        CriterionResult::at_most("sum_rule.fh", "sum rule residual at the longest length", last, c.sum_rule_fh),
        CriterionResult::at_most("sum_rule.fh_monotone", "increases of the residual with length", monotone as f64, 0.0),
        CriterionResult::at_most("special.gamma_oracle", "Gamma vs 30-digit fixture, relative", sp.oracle, c.gamma_oracle),
        CriterionResult::at_most("special.gamma_recurrence", "Gamma(z+1) = z Gamma(z), relative", sp.recurrence, c.gamma_identities),
        CriterionResult::at_most("special.gamma_reflection", "Gamma(z) Gamma(1-z) sin(pi z) = pi, relative", sp.reflection, c.gamma_identities),
        CriterionResult::at_most("special.digamma_reflection", "digamma reflection", sp.digamma_reflection, c.digamma_reflection),
        CriterionResult::at_most("special.psi_ring", "series vs large-argument expansion at |zeta| = 8", sp.psi_ring, c.psi_ring),
    ];
    Ok(SuiteReport {
        suite: "identities".into(),
        criteria_version: criteria.version,
        results,
        notes: vec![],
        details: serde_json::json!({ "seed": seed, "sum_rule_fh": fh, "residuals": id, "special": sp }),
    })
}

/// Residual report, imaginary parts and decay bound of extracted
/// coefficients at one `epsilon`.
pub fn l4_suite(epsilon: f64, alpha: &VerblunskyScheme, criteria: &Criteria) -> Result<(SuiteReport, ResidualReport)> {
    let c = &criteria.l4;
    let n = alpha.len();
    let max_imag = alpha.gamma().iter().map(|g| g.im.abs()).fold(0.0, f64::max);
    let fit = residual_report(alpha, epsilon, c.fit_window)?;
    let [w1, w2] = c.stability_windows;
    let r1 = residual_report(alpha, epsilon, w1)?;
    let r2 = residual_report(alpha, epsilon, w2)?;
    let spread = (r1.c_fit / r2.c_fit).max(r2.c_fit / r1.c_fit);
    let bound_excess = (c.bound_from..n)
        .map(|j| alpha.get(j).norm() * PI * (j + 1) as f64 / epsilon)
        .fold(0.0, f64::max);
    let tag = format!("l4[eps={epsilon}]");
    let results = vec![
        CriterionResult::at_most(&format!("{tag}.imag"), "largest imaginary part of extracted coefficients", max_imag, c.imag),
        CriterionResult::at_most(
            &format!("{tag}.slope"),
            &format!("fitted residual slope on [{}, {}]", c.fit_window.0, c.fit_window.1),
            fit.slope_fit,
            c.slope,
        ),
        CriterionResult::at_most(
            &format!("{tag}.c_fit_stability"),
            &format!("C_fit ratio between windows {w1:?} and {w2:?}"),
            spread,
            c.c_fit_factor,
        ),
        CriterionResult::at_most(
            &format!("{tag}.bound"),
            &format!("max |g_j| pi (j+1) / eps for j >= {}", c.bound_from),
            bound_excess,
            c.bound_factor,
        ),
    ];
    Ok((
        SuiteReport {
            suite: "l4".into(),
            criteria_version: criteria.version,
            results,
            notes: vec![],
            details: serde_json::json!({
                "epsilon": epsilon,
                "N": n,
                "fit": fit,
                "windows": [r1, r2],
            }),
        },
        fit,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionRow {
    pub n: usize,
    pub m: usize,
    pub integral: f64,
    /// `min 2 pi w~`.
    pub steklov_min: f64,
}

/// Builds the weight for every `n` and records its mass and minimum.
pub fn construction_rows(alpha: &VerblunskyScheme, n_list: &[usize], m: usize) -> Result<Vec<ConstructionRow>> {
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    ns.iter()
        .map(|&n| {
            let scheme = build_scheme(alpha, n)?;
            let w = steklov_weight(&scheme, alpha, m)?;
            let min = w.values().iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
            Ok(ConstructionRow { n, m, integral: w.integral().re, steklov_min: 2.0 * PI * min })
        })
        .collect()
}

/// Coefficient error of re-extracting the full scheme from the weight.
pub fn construction_round_trip(alpha: &VerblunskyScheme, n: usize, m: usize) -> Result<f64> {
    let scheme = build_scheme(alpha, n)?;
    let w = steklov_weight(&scheme, alpha, m)?;
    let k = 3 * n + 1;
    let got = extract_verblunsky(&generic_moments(&w, k + 1)?, k)?;
    Ok(got.max_abs_diff(&scheme.gamma))
}

/// Decreasing steps of `values`, each as a relative drop.
pub fn inversions(values: &[f64]) -> Vec<f64> {
    values.windows(2).filter(|w| w[1] < w[0]).map(|w| (w[0] - w[1]) / w[0]).collect()
}

fn lsq_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Construction (mass, uniform minimum, round trip) and growth of the
/// orthonormal polynomials.
pub fn growth_suite(
    epsilon: f64,
    alpha: &VerblunskyScheme,
    n_list: &[usize],
    m: usize,
    criteria: &Criteria,
) -> Result<(SuiteReport, Vec<ConstructionRow>, Vec<GrowthRow>)> {
    let c = &criteria.growth;
    let rows = construction_rows(alpha, n_list, m)?;
    let growth = growth_report(alpha, n_list, Some(m))?;
    let rt = construction_round_trip(alpha, c.round_trip_n, m.max(1 << 12))?;

    let mass_err = rows.iter().map(|r| (r.integral - 1.0).abs()).fold(0.0, f64::max);
    let mins: Vec<f64> = rows.iter().map(|r| r.steklov_min).collect();
    let c_min = mins.iter().copied().fold(f64::INFINITY, f64::min);
    let c_max = mins.iter().copied().fold(0.0, f64::max);
    let ratios: Vec<f64> = growth.iter().map(|g| g.ratio).collect();
    let inv = inversions(&ratios);
    let bad_inversions = if inv.len() <= c.max_inversions && inv.iter().all(|&d| d <= c.inversion) {
        0
    } else {
        inv.len()
    };
    let mixed: Vec<f64> = growth.iter().map(|g| g.mixed_sup).collect();
    let logs: Vec<f64> = growth.iter().map(|g| g.log_n).collect();
    let mixed_slope = if mixed.len() >= 2 { lsq_slope(&logs, &mixed) } else { f64::NAN };
    let mixed_drops = inversions(&mixed).len();
    let ratio_min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let mechanism_failures = growth.iter().filter(|g| !g.mechanism_holds).count();

    let tag = format!("growth[eps={epsilon}]");
    let results = vec![
        CriterionResult::at_most(&format!("{tag}.mass"), "max |integral of w~ - 1|", mass_err, c.integral),
        CriterionResult::at_least(&format!("{tag}.steklov_min"), "min over n of min 2 pi w~", c_min, f64::MIN_POSITIVE),
        CriterionResult::at_most(
            &format!("{tag}.steklov_min_spread"),
            "spread of per-n minima (max / min)",
            c_max / c_min,
            c.steklov_min_spread,
        ),
        CriterionResult::at_most(
            &format!("{tag}.round_trip"),
            &format!("full scheme re-extracted from w~ at n = {}", c.round_trip_n),
            rt,
            c.round_trip,
        ),
        CriterionResult::at_least(&format!("{tag}.ratio_lower"), "min over n of sup|phi_2n+1| / ln n", ratio_min, f64::MIN_POSITIVE),
        CriterionResult::at_most(
            &format!("{tag}.ratio_trend"),
            &format!(
                "decreasing steps of sup|phi_2n+1| / ln n beyond {} of at most {:.0}% ({} steps, drops {:?})",
                c.max_inversions,
                100.0 * c.inversion,
                inv.len(),
                inv.iter().map(|d| format!("{:.1}%", 100.0 * d)).collect::<Vec<_>>()
            ),
            bad_inversions as f64,
            0.0,
        ),
        CriterionResult::at_least(&format!("{tag}.mixed_slope"), "slope of sup|Phi_n^* Psi_n^* + z Phi_n Psi_n| against ln n", mixed_slope, f64::MIN_POSITIVE),
        CriterionResult::at_most(&format!("{tag}.mixed_monotone"), "decreasing steps of that sup", mixed_drops as f64, 0.0),
        CriterionResult::at_most(&format!("{tag}.mechanism"), "rows violating 2 sup|Phi_2n+1| >= mixed - 2 sup|Phi_n|^2", mechanism_failures as f64, 0.0),
    ];
    let mut notes = Vec::new();
    if let (Some(first), Some(second)) = (growth.first(), growth.get(1)) {
        if second.ratio < first.ratio {
            notes.push(format!(
                "ratio at the smallest n = {} exceeds the next one; the smallest sizes may be preasymptotic",
                first.n
            ));
        }
    }
    notes.push(format!("uniform Steklov constant c = {c_min:.6}"));
    notes.push(format!("growth constant min sup/ln n = {ratio_min:.6}"));
    Ok((
        SuiteReport {
            suite: "growth".into(),
            criteria_version: criteria.version,
            results,
            notes,
            details: serde_json::json!({ "epsilon": epsilon, "construction": rows, "growth": growth, "round_trip": rt }),
        },
        rows,
        growth,
    ))
}

/// Stability of `max/min |Phi_n^*|`, the antipodal ratio sum and the
/// off-singularity gap over `n >= n_min`.
pub fn l1_suite(
    epsilon: f64,
    alpha: &VerblunskyScheme,
    n_list: &[usize],
    m: usize,
    criteria: &Criteria,
) -> Result<(SuiteReport, Vec<L1Report>)> {
    let c = &criteria.l1;
    let spec = FHWeightSpec::new(epsilon)?;
    let mut ns: Vec<usize> = n_list.iter().copied().filter(|&n| n >= c.n_min).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.is_empty() {
        return Err(Error::InvalidParameter(format!("no n >= {} in the suite", c.n_min)));
    }
    let reports: Vec<L1Report> = ns
        .iter()
        .map(|&n| lemma_l1_suite(&spec, alpha, n, m, c.delta))
        .collect::<Result<_>>()?;
    let star_ratios: Vec<f64> = reports.iter().map(|r| r.star_ratio).collect();
    let star_spread = star_ratios.iter().copied().fold(0.0, f64::max) / star_ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let t0 = reports[0].antipodal_sup;
    let antipodal_spread = reports.iter().map(|r| (r.antipodal_sup / t0).max(t0 / r.antipodal_sup)).fold(0.0, f64::max);
    let gaps: Vec<f64> = reports.iter().map(|r| r.off_singularity_gap).collect();
    let last_gap = *gaps.last().unwrap();
    let gap_increases = gaps.windows(2).filter(|w| w[1] > w[0]).count();
    let det = reports.iter().map(|r| r.determinant_grid_residual).fold(0.0, f64::max);
    let tag = format!("l1[eps={epsilon}]");
    let results = vec![
        CriterionResult::at_most(&format!("{tag}.modulus_spread"), "spread over n of max|Phi_n^*| / min|Phi_n^*|", star_spread, c.star_factor),
        CriterionResult::at_most(&format!("{tag}.antipodal"), "spread over n of the antipodal ratio sum sup", antipodal_spread, c.antipodal_factor),
        CriterionResult::at_most(
            &format!("{tag}.gap"),
            &format!("off-singularity gap at n = {}", ns.last().unwrap()),
            last_gap,
            c.gap,
        ),
        CriterionResult::at_most(&format!("{tag}.gap_shrinks"), "increases of the gap with n", gap_increases as f64, 0.0),
        CriterionResult::at_most(&format!("{tag}.determinant"), "determinant identity on the grid", det, 1e-9),
    ];
    Ok((
        SuiteReport {
            suite: "l1".into(),
            criteria_version: criteria.version,
            results,
            notes: vec![],
            details: serde_json::json!({ "epsilon": epsilon, "rows": reports }),
        },
        reports,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_criteria_parse() {
        let c = Criteria::embedded();
        assert_eq!(c.version, 1);
        assert_eq!(c.l4.fit_window, (32, 512));
        assert_eq!(c.growth.m, 1 << 16);
    }

    #[test]
    fn oracle_fixture_loads() {
        let rows = gamma_oracle().unwrap();
        assert_eq!(rows.len(), 64);
        assert_eq!(rows[0], (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn inversion_counting() {
        assert!(inversions(&[1.0, 2.0, 3.0]).is_empty());
        let d = inversions(&[1.0, 0.9, 1.2, 1.1]);
        assert_eq!(d.len(), 2);
        assert!((d[0] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn result_lines() {
        let r = CriterionResult::at_most("x", "desc", 1e-13, 1e-12);
        assert!(r.passed && r.line().starts_with("PASS x: "));
        let r = CriterionResult::at_least("y", "desc", 0.5, 1.0);
        assert!(!r.passed && r.line().starts_with("FAIL y: "));
    }

    #[test]
    fn small_identity_run() {
        let r = identity_residuals(7, 5, 12).unwrap();
        assert!(r.doubling < 1e-12 && r.wronskian < 1e-12 && r.determinant < 1e-10);
        assert_eq!((r.shift_failures, r.star_failures), (0, 0));
    }

    #[test]
    fn shift_identity_uses_polynomial_equality() {
        use crate::poly::ComplexPoly;
        let p = ComplexPoly::from_real(&[1.0, 2.0]);
        assert_eq!(p.shift_by_z(), ComplexPoly::from_real(&[0.0, 1.0, 2.0]));
    }
}
