//! Compensated (Neumaier) summation.
//!
//! Used wherever a long sum of terms with decaying magnitude feeds a quantity
//! whose relative accuracy matters, chiefly the moment inner products during
//! coefficient extraction and the circle quadratures.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexKahanSum {
    re: KahanSum,
    im: KahanSum,
}

impl ComplexKahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    /// Adds the exact-as-possible product `a * b`; the two real products per
    /// component are accumulated separately so no cancellation happens before
    /// compensation.
    #[inline]
    pub fn add_product(&mut self, a: Complex64, b: Complex64) {
        self.re.add(a.re * b.re);
        self.re.add(-(a.im * b.im));
        self.im.add(a.re * b.im);
        self.im.add(a.im * b.re);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

pub fn sum_f64<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut acc = KahanSum::new();
    for x in it {
        acc.add(x);
    }
    acc.value()
}

pub fn sum_c64<I: IntoIterator<Item = Complex64>>(it: I) -> Complex64 {
    let mut acc = ComplexKahanSum::new();
    for z in it {
        acc.add(z);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(sum_f64(v), 2.0);
        let naive: f64 = v.iter().sum();
        assert_eq!(naive, 0.0);
    }

    #[test]
    fn complex_product_accumulation() {
        let mut acc = ComplexKahanSum::new();
        acc.add_product(Complex64::new(1.0, 2.0), Complex64::new(3.0, -1.0));
        assert_eq!(acc.value(), Complex64::new(5.0, 5.0));
    }
}
