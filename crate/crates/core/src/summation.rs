//! Compensated accumulation for real and complex sums.

use num_complex::Complex64;

/// Neumaier (improved Kahan–Babuška) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
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

/// Two independent Neumaier accumulators for the real and imaginary parts.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexNeumaier {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexNeumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Sums a slice in index order with compensation.
pub fn sum(values: &[f64]) -> f64 {
    let mut acc = Neumaier::new();
    for &v in values {
        acc.add(v);
    }
    acc.value()
}

pub fn sum_complex(values: &[Complex64]) -> Complex64 {
    let mut acc = ComplexNeumaier::new();
    for &v in values {
        acc.add(v);
    }
    acc.value()
}
