//! Extraction of the two-jump weight's coefficients in software floating
//! point. The moments and every coefficient are real, so the recursion runs
//! in real arithmetic; results are rounded to `f64` only at the end.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

use crate::error::{Error, Result};
use crate::extract::FHWeightSpec;
use crate::szego::{VerblunskyScheme, DISK_MARGIN};

pub const DEFAULT_BITS: usize = 128;

const RM: RoundingMode = RoundingMode::ToEven;

fn to_f64(x: &BigFloat, cc: &mut Consts) -> Result<f64> {
    if x.is_zero() {
        return Ok(0.0);
    }
    let s = x.format(Radix::Dec, RM, cc).map_err(|e| Error::Parse(format!("{e:?}")))?;
    s.parse::<f64>().map_err(|e| Error::Parse(format!("{s}: {e}")))
}

fn check(x: BigFloat) -> Result<BigFloat> {
    if x.is_nan() || x.is_inf() {
        return Err(Error::InvalidParameter(format!("software float error {:?}", x.err())));
    }
    Ok(x)
}

/// `c_k`, `k = 0..=k_max`, computed at `bits` precision.
fn moments(spec: &FHWeightSpec, k_max: usize, bits: usize, cc: &mut Consts) -> Result<Vec<BigFloat>> {
    let p = bits;
    let e = BigFloat::from_f64(spec.epsilon(), p);
    let tanh = check(e.tanh(p, RM, cc))?;
    let pi = cc.pi(p, RM);
    let two_t_over_pi = check(tanh.mul(&BigFloat::from_f64(2.0, p), p, RM).div(&pi, p, RM))?;
    let mut c = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let v = match k % 4 {
            0 if k == 0 => BigFloat::from_f64(1.0, p),
            1 => two_t_over_pi.div(&BigFloat::from_u64(k as u64, p), p, RM),
            3 => two_t_over_pi.div(&BigFloat::from_u64(k as u64, p), p, RM).neg(),
            _ => BigFloat::from_f64(0.0, p),
        };
        c.push(check(v)?);
    }
    Ok(c)
}

/// `n` coefficients of the two-jump weight, extracted with `bits` of
/// mantissa throughout.
pub fn extract_fh_high_precision(spec: &FHWeightSpec, n: usize, bits: usize) -> Result<VerblunskyScheme> {
    if bits < 64 {
        return Err(Error::InvalidParameter(format!("precision of {bits} bits is below 64")));
    }
    let p = bits;
    let mut cc = Consts::new().map_err(|e| Error::InvalidParameter(format!("{e:?}")))?;
    let c = moments(spec, n, p, &mut cc)?;
    let one = BigFloat::from_f64(1.0, p);
    let mut phi = vec![one.clone()];
    let mut norm_sq = one.clone();
    let mut gamma = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = BigFloat::from_f64(0.0, p);
        for (j, a) in phi.iter().enumerate() {
            if !c[j + 1].is_zero() {
                acc = acc.add(&a.mul(&c[j + 1], p, RM), p, RM);
            }
        }
        let g = check(acc.div(&norm_sq, p, RM))?;
        let g64 = to_f64(&g, &mut cc)?;
        if !(g64.abs() < 1.0 - DISK_MARGIN) {
            return Err(Error::ExtractionBreakdown { index: k, modulus: g64.abs() });
        }
        let mut next = Vec::with_capacity(k + 2);
        next.push(g.mul(&phi[k], p, RM).neg());
        for j in 1..=k {
            next.push(phi[j - 1].sub(&g.mul(&phi[k - j], p, RM), p, RM));
        }
        next.push(phi[k].clone());
        phi = next;
        norm_sq = norm_sq.mul(&one.sub(&g.mul(&g, p, RM), p, RM), p, RM);
        gamma.push(g64);
    }
    VerblunskyScheme::from_real(&gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{extract_verblunsky, fh_moments};

    #[test]
    fn agrees_with_double_precision() {
        let spec = FHWeightSpec::new(0.1).unwrap();
        let hi = extract_fh_high_precision(&spec, 128, DEFAULT_BITS).unwrap();
        let lo = extract_verblunsky(&fh_moments(&spec, 136), 128).unwrap();
        for j in 0..128 {
            let drift = (hi.get(j) - lo.get(j)).norm();
            assert!(drift <= 1e-13, "j={j}: {drift}");
        }
        assert!((hi.get(0).re - 2.0 * 0.1f64.tanh() / std::f64::consts::PI).abs() < 1e-16);
    }

    #[test]
    fn rejects_low_precision() {
        let spec = FHWeightSpec::new(0.1).unwrap();
        assert!(extract_fh_high_precision(&spec, 4, 32).is_err());
    }
}
