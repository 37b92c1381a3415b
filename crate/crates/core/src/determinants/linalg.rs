//! Dense LU factorization returning the determinant in log form.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use crate::precision::{Pivoting, Real};
use crate::specfun::wrap_phase;

/// log|det| and arg det, or an exact zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogDet {
    pub log_modulus: f64,
    pub phase: f64,
    pub zero: bool,
}

impl LogDet {
    pub const ONE: LogDet = LogDet { log_modulus: 0.0, phase: 0.0, zero: false };
    pub const ZERO: LogDet = LogDet { log_modulus: f64::NEG_INFINITY, phase: 0.0, zero: true };

    pub fn new(log_modulus: f64, phase: f64) -> LogDet {
        LogDet { log_modulus, phase: wrap_phase(phase), zero: false }
    }

    pub fn mul(self, o: LogDet) -> LogDet {
        if self.zero || o.zero {
            return LogDet::ZERO;
        }
        LogDet::new(self.log_modulus + o.log_modulus, self.phase + o.phase)
    }

    pub fn div(self, o: LogDet) -> LogDet {
        if self.zero {
            return LogDet::ZERO;
        }
        if o.zero {
            return LogDet { log_modulus: f64::INFINITY, phase: 0.0, zero: false };
        }
        LogDet::new(self.log_modulus - o.log_modulus, self.phase - o.phase)
    }

    pub fn scale_log(self, log_factor: f64) -> LogDet {
        if self.zero {
            return self;
        }
        LogDet::new(self.log_modulus + log_factor, self.phase)
    }

    pub fn value(self) -> Complex64 {
        if self.zero {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_modulus.exp(), self.phase)
    }

    /// Real value assuming the phase is 0 or π.
    pub fn real_value(self) -> f64 {
        self.value().re
    }
}

/// Field element usable by the LU engine.
pub trait Scalar:
    Copy
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn pivot_size(self) -> f64;
    fn log_abs(self) -> f64;
    fn arg(self) -> f64;
    fn is_exact_zero(self) -> bool;
    fn from_c64(z: Complex64) -> Self;
}

fn real_log_abs<T: Real>(x: T) -> f64 {
    // ln|hi + lo| = ln|hi| + ln(1 + lo/hi) with the low word read back through to_f64
    let h = x.to_f64();
    let r = (x - T::from_f64(h)).to_f64();
    h.abs().ln() + r / h
}

impl<T: Real> Scalar for T {
    fn zero() -> Self {
        <T as num_traits::Zero>::zero()
    }
    fn pivot_size(self) -> f64 {
        self.to_f64().abs()
    }
    fn log_abs(self) -> f64 {
        real_log_abs(self)
    }
    fn arg(self) -> f64 {
        if self.to_f64() < 0.0 {
            std::f64::consts::PI
        } else {
            0.0
        }
    }
    fn is_exact_zero(self) -> bool {
        self.to_f64() == 0.0
    }
    fn from_c64(z: Complex64) -> Self {
        T::from_f64(z.re)
    }
}

impl<T: Real> Scalar for Complex<T> {
    fn zero() -> Self {
        Complex::new(<T as num_traits::Zero>::zero(), <T as num_traits::Zero>::zero())
    }
    fn pivot_size(self) -> f64 {
        self.re.to_f64().abs() + self.im.to_f64().abs()
    }
    fn log_abs(self) -> f64 {
        let n2 = self.re * self.re + self.im * self.im;
        0.5 * real_log_abs(n2)
    }
    fn arg(self) -> f64 {
        self.im.to_f64().atan2(self.re.to_f64())
    }
    fn is_exact_zero(self) -> bool {
        self.re.to_f64() == 0.0 && self.im.to_f64() == 0.0
    }
    fn from_c64(z: Complex64) -> Self {
        Complex::new(T::from_f64(z.re), T::from_f64(z.im))
    }
}

/// Row-major square matrix.
#[derive(Debug, Clone)]
pub struct Matrix<S> {
    pub n: usize,
    pub data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> S) -> Matrix<S> {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.n + j]
    }
}

/// Determinant by Gaussian elimination; the pivot logs are accumulated so the
/// result never overflows.
pub fn lu_logdet<S: Scalar>(m: &Matrix<S>, pivoting: Pivoting) -> LogDet {
    let n = m.n;
    if n == 0 {
        return LogDet::ONE;
    }
    let mut a = m.data.clone();
    let mut log_mod = 0.0;
    let mut phase = 0.0;
    let mut sign_flips = 0usize;
    let mut col_perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        // choose pivot
        let (mut pr, mut pc) = (k, k);
        let mut best = -1.0;
        match pivoting {
            Pivoting::Partial => {
                for i in k..n {
                    let s = a[i * n + k].pivot_size();
                    if s > best {
                        best = s;
                        pr = i;
                    }
                }
            }
            Pivoting::Complete => {
                for i in k..n {
                    for j in k..n {
                        let s = a[i * n + j].pivot_size();
                        if s > best {
                            best = s;
                            pr = i;
                            pc = j;
                        }
                    }
                }
            }
        }
        if best == 0.0 || !best.is_finite() {
            if best == 0.0 {
                return LogDet::ZERO;
            }
            return LogDet { log_modulus: f64::NAN, phase: 0.0, zero: false };
        }
        if pr != k {
            for j in 0..n {
                a.swap(k * n + j, pr * n + j);
            }
            sign_flips += 1;
        }
        if pc != k {
            for i in 0..n {
                a.swap(i * n + k, i * n + pc);
            }
            col_perm.swap(k, pc);
            sign_flips += 1;
        }
        let piv = a[k * n + k];
        log_mod += piv.log_abs();
        phase += piv.arg();
        for i in k + 1..n {
            let f = a[i * n + k] / piv;
            if f.is_exact_zero() {
                continue;
            }
            for j in k + 1..n {
                let t = a[k * n + j];
                a[i * n + j] = a[i * n + j] - f * t;
            }
        }
    }
    if sign_flips % 2 == 1 {
        phase += std::f64::consts::PI;
    }
    LogDet::new(log_mod, phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::Dd;

    #[test]
    fn identity_and_small() {
        let m = Matrix::from_fn(3, |i, j| if i == j { 1.0 } else { 0.0 });
        let d = lu_logdet(&m, Pivoting::Partial);
        assert_eq!(d.log_modulus, 0.0);
        let m = Matrix::from_fn(2, |i, j| [[1.0, 2.0], [3.0, 4.0]][i][j]);
        let d = lu_logdet(&m, Pivoting::Partial);
        assert!((d.real_value() + 2.0).abs() < 1e-14);
        let d = lu_logdet(&m, Pivoting::Complete);
        assert!((d.real_value() + 2.0).abs() < 1e-14);
    }

    #[test]
    fn singular_flagged() {
        let m = Matrix::from_fn(2, |i, j| [[1.0, 2.0], [2.0, 4.0]][i][j]);
        assert!(lu_logdet(&m, Pivoting::Partial).zero);
    }

    #[test]
    fn complex_det() {
        let i = Complex64::new(0.0, 1.0);
        let m = Matrix::from_fn(2, |r, c| [[i, Complex64::new(1.0, 0.0)], [Complex64::new(1.0, 0.0), i]][r][c]);
        // i*i - 1 = -2
        let d = lu_logdet(&m, Pivoting::Partial);
        assert!((d.value() - Complex64::new(-2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn dd_hilbert_more_accurate() {
        // det of the 8x8 Hilbert matrix is known exactly
        let n = 8;
        let md = Matrix::from_fn(n, |i, j| Dd::ONE / Dd::from_f64((i + j + 1) as f64));
        let d = lu_logdet(&md, Pivoting::Partial);
        let exact = 2.737_050_113_791_513e-33f64.ln();
        assert!((d.log_modulus - exact).abs() < 1e-12, "{} vs {}", d.log_modulus, exact);
    }
}
