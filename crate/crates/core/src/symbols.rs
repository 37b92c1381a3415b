//! Fisher–Hartwig symbols: smooth part, singularities, Fourier tables.
//!
//! A symbol is g(θ) = a(θ) Π_r |2−2cos(θ−θ_r)|^{a_r} e^{−i b_r arg e^{i(θ_r+π−θ)}},
//! with arg taken in (−π, π].

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, FhError, Result};
use crate::specfun::ln_gamma;

/// Two-sided coefficients c_p, |p| ≤ order, of log a(θ) = Σ c_p e^{ipθ}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierSeries {
    pub order: usize,
    pub coeffs: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SzegoSum {
    pub value: Complex64,
    pub tail_estimate: f64,
}

impl FourierSeries {
    pub fn zero(order: usize) -> FourierSeries {
        FourierSeries { order, coeffs: vec![Complex64::new(0.0, 0.0); 2 * order + 1] }
    }

    /// Build from (p, c_p) pairs; the order is the largest |p|.
    pub fn from_pairs(pairs: &[(i64, Complex64)]) -> FourierSeries {
        let order = pairs.iter().map(|(p, _)| p.unsigned_abs() as usize).max().unwrap_or(0);
        let mut s = FourierSeries::zero(order);
        for &(p, c) in pairs {
            s.coeffs[(p + order as i64) as usize] += c;
        }
        s
    }

    pub fn c(&self, p: i64) -> Complex64 {
        if p.unsigned_abs() as usize > self.order {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[(p + self.order as i64) as usize]
    }

    pub fn set(&mut self, p: i64, v: Complex64) {
        assert!(p.unsigned_abs() as usize <= self.order);
        self.coeffs[(p + self.order as i64) as usize] = v;
    }

    pub fn c0(&self) -> Complex64 {
        self.c(0)
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        let mut s = self.c(0);
        for p in 1..=self.order as i64 {
            let e = Complex64::from_polar(1.0, p as f64 * theta);
            s += self.c(p) * e + self.c(-p) * e.conj();
        }
        s
    }

    pub fn add(&self, other: &FourierSeries) -> FourierSeries {
        let order = self.order.max(other.order);
        let mut s = FourierSeries::zero(order);
        for p in -(order as i64)..=order as i64 {
            s.set(p, self.c(p) + other.c(p));
        }
        s
    }

    pub fn scale(&self, f: Complex64) -> FourierSeries {
        FourierSeries { order: self.order, coeffs: self.coeffs.iter().map(|c| c * f).collect() }
    }

    /// Coefficients of log a(π − θ): c_p ↦ (−1)^p c_{−p}.
    pub fn reflect_through_half_pi(&self) -> FourierSeries {
        let mut s = FourierSeries::zero(self.order);
        for p in -(self.order as i64)..=self.order as i64 {
            let sign = if p.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            s.set(p, self.c(-p) * sign);
        }
        s
    }

    pub fn is_even(&self, tol: f64) -> bool {
        (1..=self.order as i64).all(|p| (self.c(p) - self.c(-p)).norm() <= tol * (1.0 + self.c(p).norm()))
    }

    pub fn is_real_function(&self, tol: f64) -> bool {
        (0..=self.order as i64).all(|p| (self.c(p) - self.c(-p).conj()).norm() <= tol * (1.0 + self.c(p).norm()))
    }
}

/// Σ_{k≥1} k c_k c_{−k}, with the size of the last included term times the
/// order as a crude tail bound.
pub fn szego_sum(s: &FourierSeries) -> SzegoSum {
    let mut v = Complex64::new(0.0, 0.0);
    for k in 1..=s.order as i64 {
        v += s.c(k) * s.c(-k) * k as f64;
    }
    let last = if s.order == 0 {
        0.0
    } else {
        let p = s.order as i64;
        (s.c(p) * s.c(-p)).norm() * (p as f64) * (p as f64)
    };
    SzegoSum { value: v, tail_estimate: last }
}

/// Σ |p| |c_p c_{−p}| over the stored range.
pub fn szego_condition(s: &FourierSeries) -> f64 {
    (1..=s.order as i64).map(|p| 2.0 * p as f64 * (s.c(p) * s.c(-p)).norm()).sum()
}

/// (log a_+(θ), log a_−(θ)).
pub fn wiener_hopf_split(s: &FourierSeries, theta: f64) -> (Complex64, Complex64) {
    let mut plus = Complex64::new(0.0, 0.0);
    let mut minus = Complex64::new(0.0, 0.0);
    for p in 1..=s.order as i64 {
        let e = Complex64::from_polar(1.0, p as f64 * theta);
        plus += s.c(p) * e;
        minus += s.c(-p) * e.conj();
    }
    (plus, minus)
}

/// Discrete Fourier coefficients of a sampled log a(θ) on a 4P-point grid.
pub fn smooth_log_coeffs(log_a: &dyn Fn(f64) -> Complex64, order: usize) -> Result<FourierSeries> {
    if order == 0 || !order.is_power_of_two() {
        return invalid(format!("smooth_log_coeffs: order must be a power of two, got {order}"));
    }
    let m = 4 * order;
    let mut buf: Vec<Complex64> = Vec::with_capacity(m);
    for j in 0..m {
        let v = log_a(2.0 * PI * j as f64 / m as f64);
        if !v.re.is_finite() || !v.im.is_finite() {
            return invalid(format!("smooth_log_coeffs: non-finite sample at grid point {j}"));
        }
        buf.push(v);
    }
    let fft = FftPlanner::<f64>::new().plan_fft_forward(m);
    fft.process(&mut buf);
    let mut s = FourierSeries::zero(order);
    for p in -(order as i64)..=order as i64 {
        s.set(p, buf[p.rem_euclid(m as i64) as usize] / m as f64);
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Singularity {
    pub theta: f64,
    pub a: f64,
    pub b: f64,
}

impl Singularity {
    pub fn new(theta: f64, a: f64, b: f64) -> Singularity {
        Singularity { theta, a, b }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > -0.5) {
            return domain(format!("singularity strength a={} must exceed -1/2", self.a));
        }
        if !(self.theta > -PI - 1e-12 && self.theta <= PI + 1e-12) {
            return domain(format!("singularity angle {} outside (-pi, pi]", self.theta));
        }
        Ok(())
    }

    /// Value of the singular factor at θ (θ ≠ θ_r).
    pub fn factor(&self, theta: f64) -> Complex64 {
        let modulus = (2.0 - 2.0 * (theta - self.theta).cos()).abs().powf(self.a);
        let arg = Complex64::from_polar(1.0, self.theta + PI - theta).arg();
        Complex64::from_polar(modulus, -self.b * arg)
    }

    /// Fourier coefficients g_k, |k| ≤ kmax, of the singular factor.
    pub fn coefficients(&self, kmax: usize) -> Vec<Complex64> {
        let (a, b) = (self.a, self.b);
        let h = singular_binomial_table(a, b, kmax);
        (0..2 * kmax + 1)
            .map(|idx| {
                let k = idx as i64 - kmax as i64;
                let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                Complex64::from_polar(sign * h[idx], -(k as f64) * self.theta)
            })
            .collect()
    }
}

/// h_k = Γ(2a+1)/(Γ(a−b+k+1)Γ(a+b−k+1)) for |k| ≤ kmax, by two-way recurrence
/// from a seed where both Gamma arguments are positive.
fn singular_binomial_table(a: f64, b: f64, kmax: usize) -> Vec<f64> {
    let lo = -(a - b + 1.0);
    let hi = a + b + 1.0;
    // integer strictly inside (lo, hi) closest to zero; exists since hi − lo = 2a+2 > 1
    let mut k0 = 0i64;
    if !((k0 as f64) > lo && (k0 as f64) < hi) {
        k0 = if hi <= 0.0 { (hi.ceil() - 1.0) as i64 } else { (lo.floor() + 1.0) as i64 };
    }
    debug_assert!((k0 as f64) > lo && (k0 as f64) < hi);
    let seed = (ln_gamma(2.0 * a + 1.0) - ln_gamma(a - b + k0 as f64 + 1.0) - ln_gamma(a + b - k0 as f64 + 1.0)).exp();
    let km = kmax as i64;
    let mut out = vec![0.0; 2 * kmax + 1];
    let idx = |k: i64| (k + km) as usize;
    // upward
    let mut h = seed;
    let mut k = k0;
    loop {
        if k >= -km && k <= km {
            out[idx(k)] = h;
        }
        if k >= km {
            break;
        }
        h *= (a + b - k as f64) / (a - b + k as f64 + 1.0);
        k += 1;
    }
    // downward
    let mut h = seed;
    let mut k = k0;
    loop {
        if k >= -km && k <= km {
            out[idx(k)] = h;
        }
        if k <= -km {
            break;
        }
        h *= (a - b + k as f64) / (a + b - k as f64 + 1.0);
        k -= 1;
    }
    out
}

/// Smooth factors with closed-form log coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "snake_case")]
pub enum NamedSmooth {
    /// a ≡ 1
    Unit,
    /// log a = 2t cos θ
    ExpCos { t: f64 },
    /// Smooth part of the high-temperature row symbol in its naive form.
    IsingHighTRow { alpha1: f64, alpha2: f64 },
    /// Smooth part of the critical row symbol.
    IsingCriticalRow { alpha1: f64 },
    /// Smooth part of the contour-shifted high-temperature row symbol.
    IsingHighTTransformed { alpha1: f64, alpha2: f64 },
    /// Row symbol below criticality (α₁, α₂ < 1): smooth, no singularity.
    IsingRowSmooth { alpha1: f64, alpha2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoeffEntry {
    pub p: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SmoothSpec {
    Named(NamedSmooth),
    Coeffs { coeffs: Vec<CoeffEntry> },
}

impl Default for SmoothSpec {
    fn default() -> Self {
        SmoothSpec::Named(NamedSmooth::Unit)
    }
}

fn clog1p(z: Complex64) -> Complex64 {
    (Complex64::new(1.0, 0.0) + z).ln()
}

/// log(1 + α e^{±iθ}) coefficients: (−1)^{p+1} α^p / p at index ±p.
fn add_log1p_series(s: &mut FourierSeries, alpha: f64, sign: i64, weight: f64) {
    let mut ap = 1.0;
    for p in 1..=s.order as i64 {
        ap *= alpha;
        let sg = if p % 2 == 1 { 1.0 } else { -1.0 };
        let idx = sign * p;
        let cur = s.c(idx);
        s.set(idx, cur + Complex64::new(weight * sg * ap / p as f64, 0.0));
    }
}

impl NamedSmooth {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| domain::<()>(format!("smooth part {self:?}: {m}"));
        match *self {
            NamedSmooth::Unit | NamedSmooth::ExpCos { .. } => Ok(()),
            NamedSmooth::IsingHighTRow { alpha1, alpha2 } => {
                if alpha1.abs() < 1.0 && alpha2 > 1.0 {
                    Ok(())
                } else {
                    bad("needs |alpha1| < 1 < alpha2")
                }
            }
            NamedSmooth::IsingCriticalRow { alpha1 } => {
                if alpha1.abs() < 1.0 {
                    Ok(())
                } else {
                    bad("needs |alpha1| < 1")
                }
            }
            NamedSmooth::IsingHighTTransformed { alpha1, alpha2 } => {
                if alpha1 >= 0.0 && alpha1 < 1.0 && alpha2 > 1.0 && alpha1 * alpha2 < 1.0 {
                    Ok(())
                } else {
                    bad("needs alpha1 < 1 < alpha2 and alpha1*alpha2 < 1")
                }
            }
            NamedSmooth::IsingRowSmooth { alpha1, alpha2 } => {
                if alpha1.abs() < 1.0 && alpha2.abs() < 1.0 {
                    Ok(())
                } else {
                    bad("needs |alpha1|, |alpha2| < 1")
                }
            }
        }
    }

    /// log a(θ) as a sum of principal logarithms of its factors.
    pub fn log_value(&self, theta: f64) -> Complex64 {
        let z = Complex64::from_polar(1.0, theta);
        let zi = z.conj();
        match *self {
            NamedSmooth::Unit => Complex64::new(0.0, 0.0),
            NamedSmooth::ExpCos { t } => Complex64::new(2.0 * t * theta.cos(), 0.0),
            NamedSmooth::IsingHighTRow { alpha1, alpha2 } => {
                0.5 * (clog1p(alpha1 * z) + clog1p(z / alpha2) - clog1p(alpha1 * zi) - clog1p(zi / alpha2))
            }
            NamedSmooth::IsingCriticalRow { alpha1 } => 0.5 * (clog1p(alpha1 * z) - clog1p(alpha1 * zi)),
            NamedSmooth::IsingHighTTransformed { alpha1, alpha2 } => {
                -alpha2.ln() - 0.5 * clog1p(zi / (alpha2 * alpha2)) + 0.5 * clog1p(alpha1 * alpha2 * z)
                    - 0.5 * clog1p((alpha1 / alpha2) * zi)
            }
            NamedSmooth::IsingRowSmooth { alpha1, alpha2 } => {
                0.5 * (clog1p(alpha1 * z) + clog1p(alpha2 * zi) - clog1p(alpha1 * zi) - clog1p(alpha2 * z))
            }
        }
    }

    /// Closed-form log coefficients truncated to |p| ≤ order.
    pub fn log_series(&self, order: usize) -> FourierSeries {
        let mut s = FourierSeries::zero(order);
        match *self {
            NamedSmooth::Unit => {}
            NamedSmooth::ExpCos { t } => {
                if order >= 1 {
                    s.set(1, Complex64::new(t, 0.0));
                    s.set(-1, Complex64::new(t, 0.0));
                }
            }
            NamedSmooth::IsingHighTRow { alpha1, alpha2 } => {
                add_log1p_series(&mut s, alpha1, 1, 0.5);
                add_log1p_series(&mut s, 1.0 / alpha2, 1, 0.5);
                add_log1p_series(&mut s, alpha1, -1, -0.5);
                add_log1p_series(&mut s, 1.0 / alpha2, -1, -0.5);
            }
            NamedSmooth::IsingCriticalRow { alpha1 } => {
                add_log1p_series(&mut s, alpha1, 1, 0.5);
                add_log1p_series(&mut s, alpha1, -1, -0.5);
            }
            NamedSmooth::IsingHighTTransformed { alpha1, alpha2 } => {
                s.set(0, Complex64::new(-alpha2.ln(), 0.0));
                add_log1p_series(&mut s, 1.0 / (alpha2 * alpha2), -1, -0.5);
                add_log1p_series(&mut s, alpha1 * alpha2, 1, 0.5);
                add_log1p_series(&mut s, alpha1 / alpha2, -1, -0.5);
            }
            NamedSmooth::IsingRowSmooth { alpha1, alpha2 } => {
                add_log1p_series(&mut s, alpha1, 1, 0.5);
                add_log1p_series(&mut s, alpha2, -1, 0.5);
                add_log1p_series(&mut s, alpha1, -1, -0.5);
                add_log1p_series(&mut s, alpha2, 1, -0.5);
            }
        }
        s
    }
}

impl SmoothSpec {
    pub fn unit() -> SmoothSpec {
        SmoothSpec::Named(NamedSmooth::Unit)
    }

    pub fn from_series(s: &FourierSeries) -> SmoothSpec {
        let coeffs = (-(s.order as i64)..=s.order as i64)
            .filter(|&p| s.c(p).norm() != 0.0)
            .map(|p| CoeffEntry { p, re: s.c(p).re, im: s.c(p).im })
            .collect();
        SmoothSpec::Coeffs { coeffs }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SmoothSpec::Named(n) => n.validate(),
            SmoothSpec::Coeffs { coeffs } => {
                if coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
                    Ok(())
                } else {
                    invalid("non-finite smooth coefficient")
                }
            }
        }
    }

    pub fn log_series(&self, order: usize) -> FourierSeries {
        match self {
            SmoothSpec::Named(n) => n.log_series(order),
            SmoothSpec::Coeffs { coeffs } => {
                let pairs: Vec<(i64, Complex64)> = coeffs.iter().map(|c| (c.p, Complex64::new(c.re, c.im))).collect();
                let s = FourierSeries::from_pairs(&pairs);
                if s.order >= order {
                    s
                } else {
                    s.add(&FourierSeries::zero(order))
                }
            }
        }
    }
}

/// Smooth part given by its log-coefficients plus singularities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FHSymbol {
    pub smooth_log: FourierSeries,
    pub singularities: Vec<Singularity>,
}

/// Minimum angular separation below which overlapping singularities are
/// reported as a warning.
pub const MIN_SEPARATION: f64 = 1e-2;

fn angular_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

impl FHSymbol {
    pub fn new(smooth_log: FourierSeries, singularities: Vec<Singularity>) -> Result<FHSymbol> {
        for s in &singularities {
            s.validate()?;
        }
        for (i, s) in singularities.iter().enumerate() {
            for t in &singularities[i + 1..] {
                if angular_distance(s.theta, t.theta) < 1e-14 {
                    return invalid(format!("repeated singularity angle {}", s.theta));
                }
            }
        }
        Ok(FHSymbol { smooth_log, singularities })
    }

    pub fn smooth_only(smooth_log: FourierSeries) -> FHSymbol {
        FHSymbol { smooth_log, singularities: Vec::new() }
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        for (i, s) in self.singularities.iter().enumerate() {
            for t in &self.singularities[i + 1..] {
                let d = angular_distance(s.theta, t.theta);
                if d < MIN_SEPARATION {
                    w.push(format!("singularities at {} and {} are only {d:.2e} apart", s.theta, t.theta));
                }
            }
        }
        w
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        let mut v = self.smooth_log.eval(theta).exp();
        for s in &self.singularities {
            v *= s.factor(theta);
        }
        v
    }

    /// g(π − θ): angles θ_r ↦ π − θ_r and smooth coefficients reflected.
    pub fn reflected(&self) -> FHSymbol {
        let singularities = self
            .singularities
            .iter()
            .map(|s| {
                let mut t = PI - s.theta;
                if t > PI {
                    t -= 2.0 * PI;
                }
                Singularity { theta: t, a: s.a, b: -s.b }
            })
            .collect();
        FHSymbol { smooth_log: self.smooth_log.reflect_through_half_pi(), singularities }
    }

    pub fn is_even(&self) -> bool {
        if !self.smooth_log.is_even(1e-12) {
            return false;
        }
        self.singularities.iter().all(|s| {
            s.b == 0.0
                && (s.theta == 0.0
                    || (s.theta - PI).abs() < 1e-14
                    || self.singularities.iter().any(|t| (t.theta + s.theta).abs() < 1e-12 && t.a == s.a && t.b == 0.0))
        })
    }
}

/// JSON form of a symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolSpec {
    #[serde(default)]
    pub smooth: SmoothSpec,
    #[serde(default)]
    pub singularities: Vec<Singularity>,
}

pub const DEFAULT_SMOOTH_ORDER: usize = 256;

impl SymbolSpec {
    pub fn build(&self, order: usize) -> Result<FHSymbol> {
        self.smooth.validate()?;
        FHSymbol::new(self.smooth.log_series(order), self.singularities.clone())
    }
}

/// Fourier coefficients g_k, |k| ≤ kmax, of a full symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub kmax: usize,
    pub g: Vec<Complex64>,
    /// Estimated magnitude of coefficients dropped by truncated convolutions.
    pub tail_estimate: f64,
}

impl CoefficientTable {
    pub fn from_fn(kmax: usize, f: impl Fn(i64) -> Complex64) -> CoefficientTable {
        let g = (0..2 * kmax + 1).map(|i| f(i as i64 - kmax as i64)).collect();
        CoefficientTable { kmax, g, tail_estimate: 0.0 }
    }

    pub fn from_real_fn(kmax: usize, f: impl Fn(i64) -> f64) -> CoefficientTable {
        CoefficientTable::from_fn(kmax, |k| Complex64::new(f(k), 0.0))
    }

    pub fn get(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.kmax {
            return Complex64::new(0.0, 0.0);
        }
        self.g[(k + self.kmax as i64) as usize]
    }

    pub fn covers(&self, k: usize) -> bool {
        self.kmax >= k
    }

    pub fn is_even(&self, tol: f64) -> bool {
        let scale = self.g.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
        (1..=self.kmax as i64).all(|k| (self.get(k) - self.get(-k)).norm() <= tol * scale)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        let scale = self.g.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
        self.g.iter().all(|c| c.im.abs() <= tol * scale)
    }

    /// Table of g(π − θ): g_k ↦ (−1)^k g_{−k}.
    pub fn reflected(&self) -> CoefficientTable {
        let mut t = CoefficientTable::from_fn(self.kmax, |k| {
            let s = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            self.get(-k) * s
        });
        t.tail_estimate = self.tail_estimate;
        t
    }

    /// Table of c^{−k} g_k (the contour-radius rescaling).
    pub fn rescaled(&self, c: f64) -> CoefficientTable {
        let mut t = CoefficientTable::from_fn(self.kmax, |k| self.get(k) * c.powi(-(k as i32)));
        t.tail_estimate = self.tail_estimate;
        t
    }
}

/// Convolution options for [`symbol_fourier_with`].
#[derive(Debug, Clone, Copy)]
pub struct FourierOptions {
    /// Truncation of the inner index when convolving two singular factors.
    pub inner: usize,
}

impl FourierOptions {
    pub fn for_kmax(kmax: usize) -> FourierOptions {
        FourierOptions { inner: 64 * kmax + 4096 }
    }
}

/// Coefficients of exp(Σ c_p e^{ipθ}) by FFT on a fine grid; returns the table
/// cut where the coefficients fall below 1e-22 of the largest.
fn smooth_factor_coefficients(s: &FourierSeries, kmax: usize) -> Vec<(i64, Complex64)> {
    let need = (2 * kmax + 1).max(8 * s.order + 8).max(1024);
    let m = need.next_power_of_two() * 2;
    let mut buf: Vec<Complex64> = (0..m).map(|j| s.eval(2.0 * PI * j as f64 / m as f64).exp()).collect();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(m);
    fft.process(&mut buf);
    let half = (m / 2 - 1) as i64;
    let coeff = |k: i64| buf[k.rem_euclid(m as i64) as usize] / m as f64;
    let scale = (-half..=half).map(|k| coeff(k).norm()).fold(0.0, f64::max);
    (-half..=half).map(|k| (k, coeff(k))).filter(|(_, c)| c.norm() > 1e-22 * scale).collect()
}

const TAIL_TERMS: usize = 6;

/// Σ_{j≥0} t(j) where t(j) = g_j z^{m+j} with g slowly varying, by repeated
/// summation by parts: z^m/(1−z) Σ_i (z/(1−z))^i Δ^i g_0. Zero when z is too
/// close to 1 for the expansion to converge.
fn oscillatory_tail(z: Complex64, m: i64, t: impl Fn(i64) -> Complex64) -> Complex64 {
    let one_minus = Complex64::new(1.0, 0.0) - z;
    if one_minus.norm() < 0.05 {
        return Complex64::new(0.0, 0.0);
    }
    let zm = z.powi(m as i32);
    let mut d: Vec<Complex64> = (0..TAIL_TERMS as i64).map(|j| t(j) / (zm * z.powi(j as i32))).collect();
    let r = z / one_minus;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    for len in (1..=TAIL_TERMS).rev() {
        sum += pow * d[0];
        pow *= r;
        for i in 0..len - 1 {
            d[i] = d[i + 1] - d[i];
        }
    }
    zm / one_minus * sum
}

pub fn symbol_fourier(sym: &FHSymbol, kmax: usize) -> Result<CoefficientTable> {
    symbol_fourier_with(sym, kmax, FourierOptions::for_kmax(kmax))
}

pub fn symbol_fourier_with(sym: &FHSymbol, kmax: usize, opts: FourierOptions) -> Result<CoefficientTable> {
    for s in &sym.singularities {
        s.validate()?;
    }
    let smooth = smooth_factor_coefficients(&sym.smooth_log, kmax);
    let smax = smooth.iter().map(|(k, _)| k.unsigned_abs() as usize).max().unwrap_or(0);
    let mut tail = 0.0;

    // product of the singular factors on |k| ≤ width
    let width = kmax + smax;
    let mut sing: Option<Vec<Complex64>> = None;
    let mut sing_width = 0usize;
    for (idx, s) in sym.singularities.iter().enumerate() {
        let is_last = idx + 1 == sym.singularities.len();
        let w = if is_last { width } else { opts.inner.max(width) };
        match sing.take() {
            None => {
                sing = Some(s.coefficients(w));
                sing_width = w;
            }
            Some(prev) => {
                let inner = sing_width;
                let reach = inner + w + TAIL_TERMS;
                let cur = s.coefficients(reach);
                let cur_at = |k: i64| cur[(k + reach as i64) as usize];
                // a single factor has coefficients (smooth in l) × e^{−ilθ}, so the
                // cut-off tails of the first product can be summed by parts
                let first = (idx == 1).then(|| {
                    let f = &sym.singularities[0];
                    (f.coefficients(inner + TAIL_TERMS), Complex64::from_polar(1.0, s.theta - f.theta))
                });
                let mut out = vec![Complex64::new(0.0, 0.0); 2 * w + 1];
                for (oi, o) in out.iter_mut().enumerate() {
                    let k = oi as i64 - w as i64;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (li, p) in prev.iter().enumerate() {
                        let l = li as i64 - inner as i64;
                        acc += p * cur_at(k - l);
                    }
                    if let Some((ext, z)) = &first {
                        let ext_at = |l: i64| ext[(l + (inner + TAIL_TERMS) as i64) as usize];
                        let m = inner as i64 + 1;
                        acc += oscillatory_tail(*z, m, |j| ext_at(m + j) * cur_at(k - m - j));
                        acc += oscillatory_tail(z.inv(), m, |j| ext_at(-m - j) * cur_at(k + m + j));
                    }
                    *o = acc;
                }
                let edge = prev[0].norm().max(prev[2 * inner].norm());
                tail += edge * inner as f64 * cur.iter().map(|c| c.norm()).fold(0.0, f64::max);
                sing = Some(out);
                sing_width = w;
            }
        }
    }

    let g = match sing {
        None => {
            CoefficientTable::from_fn(kmax, |k| {
                smooth.iter().find(|(j, _)| *j == k).map(|(_, c)| *c).unwrap_or(Complex64::new(0.0, 0.0))
            })
            .g
        }
        Some(sv) => {
            let at = |k: i64| -> Complex64 {
                if k.unsigned_abs() as usize > sing_width {
                    Complex64::new(0.0, 0.0)
                } else {
                    sv[(k + sing_width as i64) as usize]
                }
            };
            (0..2 * kmax + 1)
                .map(|i| {
                    let k = i as i64 - kmax as i64;
                    smooth.iter().map(|(j, c)| c * at(k - j)).sum()
                })
                .collect()
        }
    };
    if !g.iter().all(|c: &Complex64| c.re.is_finite() && c.im.is_finite()) {
        return Err(FhError::Numerical("non-finite symbol coefficient".into()));
    }
    Ok(CoefficientTable { kmax, g, tail_estimate: tail })
}

/// Derived Ising constants for couplings (K₁, K₂).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsingParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsingRegime {
    Critical,
    HighT,
    Other,
}

impl IsingParams {
    pub fn from_couplings(k1: f64, k2: f64) -> Result<IsingParams> {
        if !(k1 > 0.0 && k2 > 0.0) {
            return domain(format!("Ising couplings must be positive, got K1={k1}, K2={k2}"));
        }
        let e = (-2.0 * k2).exp();
        let t = k1.tanh();
        Ok(IsingParams { alpha1: e * t, alpha2: e / t, k: (2.0 * k1).sinh() * (2.0 * k2).sinh() })
    }

    pub fn regime(&self) -> IsingRegime {
        classify_row(self.alpha1, self.alpha2)
    }
}

pub fn classify_row(alpha1: f64, alpha2: f64) -> IsingRegime {
    if (alpha2 - 1.0).abs() < 1e-13 && alpha1 < 1.0 {
        IsingRegime::Critical
    } else if alpha1 < 1.0 && 1.0 < alpha2 && alpha1 * alpha2 < 1.0 {
        IsingRegime::HighT
    } else {
        IsingRegime::Other
    }
}

/// Row symbol ((1+α₁z)(1+α₂/z)/((1+α₁/z)(1+α₂z)))^{1/2} written in FH form.
/// For α₂ > 1 this is the naive form: smooth part ((1+α₁z)(1+z/α₂)/((1+α₁/z)(1+1/(α₂z))))^{1/2} and (θ,a,b)=(−π,0,−1).
pub fn ising_row_symbol_spec(alpha1: f64, alpha2: f64) -> Result<SymbolSpec> {
    if !(alpha1 >= 0.0 && alpha1 < 1.0 && alpha2 >= 0.0) {
        return domain(format!("row symbol needs 0 <= alpha1 < 1, alpha2 >= 0; got {alpha1}, {alpha2}"));
    }
    let spec = if (alpha2 - 1.0).abs() < 1e-13 {
        SymbolSpec {
            smooth: SmoothSpec::Named(NamedSmooth::IsingCriticalRow { alpha1 }),
            singularities: vec![Singularity::new(-PI, 0.0, -0.5)],
        }
    } else if alpha2 > 1.0 {
        SymbolSpec {
            smooth: SmoothSpec::Named(NamedSmooth::IsingHighTRow { alpha1, alpha2 }),
            singularities: vec![Singularity::new(-PI, 0.0, -1.0)],
        }
    } else {
        SymbolSpec { smooth: SmoothSpec::Named(NamedSmooth::IsingRowSmooth { alpha1, alpha2 }), singularities: vec![] }
    };
    Ok(spec)
}

/// Diagonal symbol ((1+e^{−iθ}/k)/(1+e^{iθ}/k))^{1/2}: the row symbol at α₁=0, α₂=1/k.
pub fn ising_diag_symbol_spec(k: f64) -> Result<SymbolSpec> {
    if !(k > 0.0) {
        return domain(format!("diagonal symbol needs k > 0, got {k}"));
    }
    ising_row_symbol_spec(0.0, 1.0 / k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingSymbols {
    pub diag: SymbolSpec,
    pub row: SymbolSpec,
    pub params: IsingParams,
}

pub fn ising_symbols(k1: f64, k2: f64) -> Result<IsingSymbols> {
    let params = IsingParams::from_couplings(k1, k2)?;
    Ok(IsingSymbols {
        diag: ising_diag_symbol_spec(params.k)?,
        row: ising_row_symbol_spec(params.alpha1, params.alpha2)?,
        params,
    })
}

/// Direct evaluation of the row symbol from its defining square root.
pub fn ising_row_symbol_value(alpha1: f64, alpha2: f64, theta: f64) -> Complex64 {
    let z = Complex64::from_polar(1.0, theta);
    let one = Complex64::new(1.0, 0.0);
    let num = (one + alpha1 * z) * (one + alpha2 / z);
    let den = (one + alpha1 / z) * (one + alpha2 * z);
    // |num| = |den| on the unit circle; take the continuous square root
    let phase = 0.5 * (num.arg() - den.arg());
    Complex64::from_polar((num.norm() / den.norm()).sqrt(), phase)
}

/// Contour-shifted high-temperature row symbol: smooth part with 1/α₂ prefactor,
/// (θ,a,b) = (−π, 1/4, −3/4), and coefficient scale α₂ (original g_p = α₂^{−p}·transformed g_p).
pub fn ising_hight_transformed_symbol(alpha1: f64, alpha2: f64) -> Result<(SymbolSpec, f64)> {
    if classify_row(alpha1, alpha2) != IsingRegime::HighT || alpha1 < 0.0 {
        return domain(format!(
            "high-temperature transform needs alpha1 < 1 < alpha2, alpha1*alpha2 < 1; got {alpha1}, {alpha2}"
        ));
    }
    Ok((
        SymbolSpec {
            smooth: SmoothSpec::Named(NamedSmooth::IsingHighTTransformed { alpha1, alpha2 }),
            singularities: vec![Singularity::new(-PI, 0.25, -0.75)],
        },
        alpha2,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_series_szego() {
        let s = FourierSeries::zero(8);
        assert_eq!(szego_sum(&s).value, Complex64::new(0.0, 0.0));
        assert_eq!(wiener_hopf_split(&s, 0.3), (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn single_harmonic() {
        let s = FourierSeries::from_pairs(&[(1, Complex64::new(0.5, 0.0)), (-1, Complex64::new(0.5, 0.0))]);
        assert!((szego_sum(&s).value.re - 0.25).abs() < 1e-16);
        let only_plus = FourierSeries::from_pairs(&[(1, Complex64::new(1.0, 0.0))]);
        let (p, m) = wiener_hopf_split(&only_plus, 0.0);
        assert!((p - Complex64::new(1.0, 0.0)).norm() < 1e-16 && m.norm() == 0.0);
    }

    #[test]
    fn fft_single_harmonic() {
        let s = smooth_log_coeffs(&|th: f64| Complex64::new(2.0 * 0.5 * th.cos(), 0.0), 16).unwrap();
        assert!((s.c(1).re - 0.5).abs() < 1e-15);
        assert!((s.c(-1).re - 0.5).abs() < 1e-15);
        assert!(s.c(2).norm() < 1e-15 && s.c(0).norm() < 1e-15);
        assert!(smooth_log_coeffs(&|_| Complex64::new(0.0, 0.0), 12).is_err());
        assert!(smooth_log_coeffs(&|_| Complex64::new(f64::NAN, 0.0), 8).is_err());
    }

    #[test]
    fn binomial_table_matches_gamma_formula() {
        for &(a, b) in &[(0.5, 0.0), (0.25, -0.75), (0.3, 0.45), (1.0, 0.5), (0.0, -0.5)] {
            let t = singular_binomial_table(a, b, 12);
            for k in -12i64..=12 {
                let x = a - b + k as f64 + 1.0;
                let y = a + b - k as f64 + 1.0;
                let expect = if (x <= 0.0 && x == x.floor()) || (y <= 0.0 && y == y.floor()) {
                    0.0
                } else {
                    let (lx, sx) = libm::lgamma_r(x);
                    let (ly, sy) = libm::lgamma_r(y);
                    (sx * sy) as f64 * (ln_gamma(2.0 * a + 1.0) - lx - ly).exp()
                };
                let got = t[(k + 12) as usize];
                assert!((got - expect).abs() < 1e-13 * (1.0 + expect.abs()), "a={a} b={b} k={k}: {got} vs {expect}");
            }
        }
    }

    #[test]
    fn pure_jump_shift() {
        // a=0, b=-1 at θ=-π is e^{-iθ}
        let s = Singularity::new(-PI, 0.0, -1.0);
        let c = s.coefficients(3);
        for (i, v) in c.iter().enumerate() {
            let k = i as i64 - 3;
            let expect = if k == -1 { 1.0 } else { 0.0 };
            assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-14, "k={k} {v}");
        }
    }

    #[test]
    fn unit_symbol_table() {
        let sym = FHSymbol::smooth_only(FourierSeries::zero(4));
        let t = symbol_fourier(&sym, 5).unwrap();
        assert!((t.get(0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((1..=5).all(|k| t.get(k).norm() < 1e-15 && t.get(-k).norm() < 1e-15));
    }

    #[test]
    fn named_series_match_fft() {
        let cases = [
            NamedSmooth::IsingHighTRow { alpha1: 0.3, alpha2: 2.0 },
            NamedSmooth::IsingCriticalRow { alpha1: 0.3 },
            NamedSmooth::IsingHighTTransformed { alpha1: 0.2, alpha2: 2.0 },
            NamedSmooth::IsingRowSmooth { alpha1: 0.2, alpha2: 0.6 },
        ];
        for c in cases {
            let fft = smooth_log_coeffs(&|th| c.log_value(th), 128).unwrap();
            let an = c.log_series(128);
            for p in -40i64..=40 {
                assert!((fft.c(p) - an.c(p)).norm() < 1e-13, "{c:?} p={p}");
            }
        }
    }

    #[test]
    fn ising_arithmetic() {
        let p = IsingParams::from_couplings(0.3, 0.3).unwrap();
        let e = (-0.6f64).exp();
        assert!((p.alpha1 - e * 0.3f64.tanh()).abs() < 1e-16);
        assert!((p.alpha2 - e / 0.3f64.tanh()).abs() < 1e-15);
        assert!((p.k - 0.6f64.sinh().powi(2)).abs() < 1e-15);
        // sinh²(2K) = 1 puts the isotropic model on the critical manifold
        let kc = 0.5 * (1.0f64 + 2.0f64.sqrt()).ln();
        let c = IsingParams::from_couplings(kc, kc).unwrap();
        assert!((c.alpha2 - 1.0).abs() < 1e-14 && (c.k - 1.0).abs() < 1e-14);
    }
}
