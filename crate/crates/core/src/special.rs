//! Complex Gamma, digamma and the Kummer function `psi(a, 1, zeta) = U(a, 1, zeta)`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Radius separating the convergent series from the large-`zeta` expansion.
pub const PSI_CROSSOVER: f64 = 8.0;

// Lanczos coefficients for g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Lanczos sum for `Re z >= 1/2`.
fn gamma_lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

/// `Gamma(z)`, with `Re z < 1/2` reduced by upward recurrence.
pub fn complex_gamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Singular(format!("Gamma({z})")));
    }
    if z.re >= 0.5 {
        return Ok(gamma_lanczos(z));
    }
    let shift = (0.5 - z.re).ceil() as usize;
    let mut denom = Complex64::new(1.0, 0.0);
    for k in 0..shift {
        denom *= z + k as f64;
    }
    Ok(gamma_lanczos(z + shift as f64) / denom)
}

/// `Gamma'(z) / Gamma(z)`, via upward recurrence to `Re z >= 10` and the
/// Stirling series there.
pub fn complex_digamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Singular(format!("digamma({z})")));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < 10.0 {
        acc -= w.inv();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    // Bernoulli terms B_{2k} / (2k), k = 1..7
    const B: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 120.0,
        1.0 / 252.0,
        -1.0 / 240.0,
        1.0 / 132.0,
        -691.0 / 32760.0,
        1.0 / 12.0,
    ];
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv2;
    for b in B {
        series += b * pow;
        pow *= inv2;
    }
    Ok(acc + w.ln() - 0.5 * inv - series)
}

/// `ln zeta` with `0 <= arg zeta < 2 pi`.
pub fn ln_upper_branch(zeta: Complex64) -> Complex64 {
    let mut arg = zeta.im.atan2(zeta.re);
    if arg < 0.0 {
        arg += TAU;
    }
    Complex64::new(zeta.norm().ln(), arg)
}

/// `psi(a, 1, zeta)` with `zeta` read on the sheet `0 <= arg zeta < 2 pi`.
///
/// Uses the logarithmic series for `|zeta| < 8` and the large-`zeta`
/// expansion beyond, which is only valid for `arg zeta < 3 pi / 2`.
pub fn kummer_psi(a: Complex64, zeta: Complex64) -> Result<Complex64> {
    if zeta.norm() == 0.0 {
        return Err(Error::ZetaZero);
    }
    let l = ln_upper_branch(zeta);
    kummer_psi_polar(a, zeta.norm(), l.im)
}

/// `psi(a, 1, zeta)` at `zeta = modulus * e^{i arg}` on the universal cover
/// of the punctured plane (any real `arg`).
pub fn kummer_psi_polar(a: Complex64, modulus: f64, arg: f64) -> Result<Complex64> {
    if modulus < PSI_CROSSOVER {
        kummer_psi_series(a, modulus, arg)
    } else {
        kummer_psi_asymptotic(a, modulus, arg)
    }
}

/// Logarithmic series
/// `-1/Gamma(a) sum (a)_k / k!^2 zeta^k (ln zeta + d(a+k) - 2 d(k+1))`.
pub fn kummer_psi_series(a: Complex64, modulus: f64, arg: f64) -> Result<Complex64> {
    if modulus == 0.0 {
        return Err(Error::ZetaZero);
    }
    if is_pole(a) {
        if a.re == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        return Err(Error::InvalidParameter(format!("psi(a, 1, .) at a = {a}")));
    }
    let ln_zeta = Complex64::new(modulus.ln(), arg);
    let zeta = Complex64::from_polar(modulus, arg);
    let mut term = Complex64::new(1.0, 0.0); // (a)_k zeta^k / k!^2
    let mut d_ak = complex_digamma(a)?;
    let mut d_k1 = -EULER_GAMMA;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut small_run = 0;
    for k in 0..2000usize {
        let contrib = term * (ln_zeta + d_ak - 2.0 * d_k1);
        sum += contrib;
        if contrib.norm() <= 1e-17 * sum.norm() && (k as f64) > modulus {
            small_run += 1;
            if small_run >= 3 {
                break;
            }
        } else {
            small_run = 0;
        }
        let kf = k as f64;
        term *= (a + kf) * zeta / ((kf + 1.0) * (kf + 1.0));
        d_ak += (a + kf).inv();
        d_k1 += 1.0 / (kf + 1.0);
        if term.norm() == 0.0 {
            break;
        }
    }
    Ok(-sum / complex_gamma(a)?)
}

/// Optimally truncated `zeta^{-a} sum_s (a)_s^2 / s! (-zeta)^{-s}`, valid for
/// `|arg zeta| < 3 pi / 2`. The first two terms are `zeta^{-a}(1 - a^2/zeta)`.
pub fn kummer_psi_asymptotic(a: Complex64, modulus: f64, arg: f64) -> Result<Complex64> {
    if arg.abs() >= 1.5 * PI {
        return Err(Error::OutsideAsymptoticSector { modulus, arg });
    }
    if modulus == 0.0 {
        return Err(Error::ZetaZero);
    }
    let ln_zeta = Complex64::new(modulus.ln(), arg);
    let minus_inv_zeta = -Complex64::from_polar(1.0 / modulus, -arg);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for s in 0..60usize {
        let sf = s as f64;
        let next = term * (a + sf) * (a + sf) / (sf + 1.0) * minus_inv_zeta;
        if next.norm() >= term.norm() || next.norm() <= 1e-17 * sum.norm() {
            if next.norm() < term.norm() {
                sum += next;
            }
            break;
        }
        sum += next;
        term = next;
    }
    Ok((-a * ln_zeta).exp() * sum)
}
