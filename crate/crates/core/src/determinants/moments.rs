//! Moment tables of one-dimensional weights and the Hankel determinants
//! built from them.

use std::io::Write;

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use super::linalg::{lu_logdet, LogDet, Matrix};
use super::quadrature::{integrate_pieces, pieces_with_breaks, Piece, QuadOptions};
use crate::error::{invalid, FhError, Result};
use crate::precision::{Dd, PrecisionContext, Real, Tier};

/// Reference weight of a moment problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Weight {
    /// e^{−a²x²} on the real line.
    Gauss { a: f64 },
    /// x^{a'−1/2} e^{−cx} on (0, ∞).
    Laguerre { c: f64, aprime: f64 },
    /// x^a (1−x)^b on (0, 1).
    Jacobi { a: f64, b: f64 },
}

impl Weight {
    fn validate(&self) -> Result<()> {
        match *self {
            Weight::Gauss { a } if a > 0.0 => Ok(()),
            Weight::Laguerre { c, aprime } if c > 0.0 && aprime > -0.5 => Ok(()),
            Weight::Jacobi { a, b } if a > -1.0 && b > -1.0 => Ok(()),
            w => invalid(format!("weight parameters out of range: {w:?}")),
        }
    }

    fn log_weight(&self, x: f64) -> f64 {
        match *self {
            Weight::Gauss { a } => -a * a * x * x,
            Weight::Laguerre { c, aprime } => (aprime - 0.5) * x.ln() - c * x,
            Weight::Jacobi { a, b } => a * x.ln() + b * (1.0 - x).ln(),
        }
    }

    /// `one_minus_x` is supplied when it is known more accurately than 1 − x.
    fn weight<T: Real>(&self, x: T, one_minus_x: Option<T>) -> T {
        match *self {
            Weight::Gauss { a } => {
                let a = T::from_f64(a);
                (-(a * a * x * x)).exp()
            }
            Weight::Laguerre { c, aprime } => {
                let e = aprime - 0.5;
                let p = if e == 0.0 { T::one() } else { (x.ln() * T::from_f64(e)).exp() };
                p * (-(T::from_f64(c) * x)).exp()
            }
            Weight::Jacobi { a, b } => {
                let pa = if a == 0.0 { T::one() } else { (x.ln() * T::from_f64(a)).exp() };
                let u = one_minus_x.unwrap_or(T::one() - x);
                let pb = if b == 0.0 { T::one() } else { (u.ln() * T::from_f64(b)).exp() };
                pa * pb
            }
        }
    }
}

/// Extra factor |x − y|^{2q}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointCharge {
    pub y: f64,
    pub q: f64,
}

/// Multiplier applied on top of the weight and point charges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Multiplier {
    #[default]
    None,
    /// exp(Σ_j c_j x^j) with real coefficients.
    ExpPoly { coeffs: Vec<f64> },
    /// Σ_j c_j x^j with complex coefficients.
    Poly { coeffs: Vec<Complex64> },
    /// exp(c_0 + 2 Σ_{n≥1} c_n cos nθ) where cos θ = 2x − 1.
    ExpCosSeries { coeffs: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentProblem {
    pub weight: Weight,
    #[serde(default)]
    pub charges: Vec<PointCharge>,
    #[serde(default)]
    pub multiplier: Multiplier,
}

impl MomentProblem {
    pub fn new(weight: Weight) -> MomentProblem {
        MomentProblem { weight, charges: Vec::new(), multiplier: Multiplier::None }
    }

    pub fn with_charge(mut self, y: f64, q: f64) -> MomentProblem {
        self.charges.push(PointCharge { y, q });
        self
    }

    pub fn with_multiplier(mut self, m: Multiplier) -> MomentProblem {
        self.multiplier = m;
        self
    }

    fn validate(&self) -> Result<()> {
        self.weight.validate()?;
        for c in &self.charges {
            if !(c.q > -0.5) || !c.y.is_finite() {
                return invalid(format!("point charge not integrable: y={}, q={}", c.y, c.q));
            }
        }
        Ok(())
    }

    fn is_complex(&self) -> bool {
        matches!(&self.multiplier, Multiplier::Poly { coeffs } if coeffs.iter().any(|c| c.im != 0.0))
    }

    /// Real-valued log of the integrand without the x^k, for domain truncation.
    fn log_envelope(&self, x: f64) -> f64 {
        let mut v = self.weight.log_weight(x);
        for c in &self.charges {
            let d = (x - c.y).abs();
            if d > 0.0 {
                v += 2.0 * c.q * d.ln();
            }
        }
        match &self.multiplier {
            Multiplier::None => {}
            Multiplier::ExpPoly { coeffs } => v += horner(coeffs, x),
            Multiplier::Poly { coeffs } => {
                let p: Complex64 = coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c);
                v += p.norm().max(1e-300).ln();
            }
            Multiplier::ExpCosSeries { coeffs } => v += cos_series(coeffs, 2.0 * x - 1.0),
        }
        v
    }

    fn domain(&self, kmax: usize) -> Vec<Piece> {
        let breaks: Vec<(f64, f64)> = self.charges.iter().map(|c| (c.y, 2.0 * c.q)).collect();
        let envelope = |x: f64| self.log_envelope(x) + kmax as f64 * x.abs().max(1e-300).ln();
        let cut = |start: f64, dir: f64| -> f64 {
            // walk outward until the integrand is negligible and decreasing
            let mut best = f64::NEG_INFINITY;
            let mut x = start;
            let mut h = 0.05;
            loop {
                let v = envelope(x).max(self.log_envelope(x));
                best = best.max(v);
                let vn = envelope(x + dir * h).max(self.log_envelope(x + dir * h));
                if v < best - 90.0 && vn < v {
                    return x;
                }
                x += dir * h;
                h *= 1.1;
                if x.abs() > 1e6 {
                    return x;
                }
            }
        };
        match self.weight {
            Weight::Gauss { .. } => {
                let lo = cut(0.0, -1.0);
                let hi = cut(0.0, 1.0);
                let lo = self.charges.iter().map(|c| c.y - 1.0).fold(lo, f64::min);
                let hi = self.charges.iter().map(|c| c.y + 1.0).fold(hi, f64::max);
                pieces_with_breaks(lo, hi, None, None, &breaks)
            }
            Weight::Laguerre { aprime, .. } => {
                let hi = cut(1e-6, 1.0);
                let hi = self.charges.iter().map(|c| c.y + 1.0).fold(hi, f64::max);
                let mut ps = pieces_with_breaks(0.0, hi, Some(aprime - 0.5), None, &breaks);
                // split the long tail off so the endpoint substitution stays local
                if ps.len() == 1 && hi > 2.0 {
                    ps = pieces_with_breaks(0.0, hi, Some(aprime - 0.5), None, &[(1.0, 0.0)]);
                }
                ps
            }
            Weight::Jacobi { a, b } => pieces_with_breaks(0.0, 1.0, Some(a), Some(b), &breaks),
        }
    }

    fn moments_at<T: Real>(&self, kmax: usize) -> Result<Vec<Complex<T>>> {
        self.validate()?;
        let complex = self.is_complex();
        let nk = kmax + 1;
        let dim = if complex { 2 * nk } else { nk };
        let pieces = self.domain(kmax);
        let charges: Vec<(T, T)> = self.charges.iter().map(|c| (T::from_f64(c.y), T::from_f64(2.0 * c.q))).collect();
        let ys: Vec<f64> = self.charges.iter().map(|c| c.y).collect();
        let mut f = |x: T, near: Option<(f64, T)>, out: &mut [T]| {
            let one_minus_x = match near {
                Some((e, d)) if e == 1.0 => Some(-d),
                _ => None,
            };
            let mut base = self.weight.weight(x, one_minus_x);
            for (i, (y, p)) in charges.iter().enumerate() {
                let d = match near {
                    Some((e, d)) if e == ys[i] => d.abs(),
                    _ => (x - *y).abs(),
                };
                base *= if d.to_f64() == 0.0 { T::zero() } else { (d.ln() * *p).exp() };
            }
            let (mut re, mut im) = (base, T::zero());
            match &self.multiplier {
                Multiplier::None => {}
                Multiplier::ExpPoly { coeffs } => {
                    let mut s = T::zero();
                    for c in coeffs.iter().rev() {
                        s = s * x + T::from_f64(*c);
                    }
                    re *= s.exp();
                }
                Multiplier::Poly { coeffs } => {
                    let (mut pr, mut pi) = (T::zero(), T::zero());
                    for c in coeffs.iter().rev() {
                        pr = pr * x + T::from_f64(c.re);
                        pi = pi * x + T::from_f64(c.im);
                    }
                    im = re * pi;
                    re *= pr;
                }
                Multiplier::ExpCosSeries { coeffs } => {
                    let c = T::from_f64(2.0) * x - T::one();
                    re *= cos_series(coeffs, c).exp();
                }
            }
            let mut xp = T::one();
            for k in 0..nk {
                out[k] = re * xp;
                if complex {
                    out[nk + k] = im * xp;
                }
                xp *= x;
            }
        };
        let v = integrate_pieces(&mut f, &pieces, dim, QuadOptions::for_real::<T>())?;
        Ok((0..nk).map(|k| Complex::new(v[k], if complex { v[nk + k] } else { T::zero() })).collect())
    }
}

/// c_0 + 2 Σ c_n T_n(u) by the Chebyshev recurrence.
fn cos_series<T: Real>(c: &[f64], u: T) -> T {
    if c.is_empty() {
        return T::zero();
    }
    let two = T::from_f64(2.0);
    let (mut t0, mut t1) = (T::one(), u);
    let mut s = T::from_f64(c[0]);
    for cn in c.iter().skip(1) {
        s += two * T::from_f64(*cn) * t1;
        let t2 = two * u * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    s
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * x + v)
}

/// μ_k, k = 0..=kmax, kept at extended width regardless of the tier used to
/// compute them.
#[derive(Debug, Clone)]
pub struct MomentTable {
    pub mu: Vec<Complex<Dd>>,
    pub tier: Tier,
}

impl MomentTable {
    pub fn from_f64(mu: &[f64]) -> MomentTable {
        MomentTable { mu: mu.iter().map(|v| Complex::new(Dd::from_f64(*v), Dd::ZERO)).collect(), tier: Tier::Double }
    }

    pub fn kmax(&self) -> usize {
        self.mu.len().saturating_sub(1)
    }

    pub fn get(&self, k: usize) -> Complex64 {
        let m = self.mu[k];
        Complex64::new(m.re.to_f64(), m.im.to_f64())
    }

    pub fn is_real(&self) -> bool {
        self.mu.iter().all(|m| m.im.to_f64() == 0.0)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "k,re,im")?;
        for (k, m) in self.mu.iter().enumerate() {
            writeln!(w, "{},{:.17e},{:.17e}", k, m.re.to_f64(), m.im.to_f64())?;
        }
        Ok(())
    }

    pub fn read_csv(text: &str) -> Result<MomentTable> {
        let mut mu = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return invalid(format!("moment csv line {}: expected 3 columns", i + 1));
            }
            let parse = |s: &str| {
                s.trim().parse::<f64>().map_err(|e| FhError::Invalid(format!("moment csv line {}: {e}", i + 1)))
            };
            let k: usize = cols[0].trim().parse().map_err(|e| FhError::Invalid(format!("moment csv: {e}")))?;
            if k != mu.len() {
                return invalid("moment csv rows must be k = 0, 1, 2, ...");
            }
            mu.push(Complex::new(Dd::from_f64(parse(cols[1])?), Dd::from_f64(parse(cols[2])?)));
        }
        Ok(MomentTable { mu, tier: Tier::Double })
    }
}

/// μ_k = ∫ x^k Π|x−y_r|^{2q_r} m(x) w(x) dx for k ≤ kmax. Tables long enough
/// for Hankel sizes above 8 are always computed at extended precision.
pub fn weighted_moments(problem: &MomentProblem, kmax: usize, ctx: PrecisionContext) -> Result<MomentTable> {
    let tier = if kmax > 14 { Tier::Extended } else { ctx.tier };
    let mu = match tier {
        Tier::Double => problem
            .moments_at::<f64>(kmax)?
            .into_iter()
            .map(|c| Complex::new(Dd::from_f64(c.re), Dd::from_f64(c.im)))
            .collect(),
        Tier::Extended => problem.moments_at::<Dd>(kmax)?,
    };
    Ok(MomentTable { mu, tier })
}

/// det[μ_{j+k}]_{j,k<n}.
pub fn hankel_logdet(moments: &MomentTable, n: usize, ctx: PrecisionContext) -> Result<LogDet> {
    if n == 0 {
        return Ok(LogDet::ONE);
    }
    if moments.mu.len() < 2 * n - 1 {
        return invalid(format!("moment table has {} entries, size {n} needs {}", moments.mu.len(), 2 * n - 1));
    }
    let extended = ctx.tier == Tier::Extended || n > 8;
    let mu = &moments.mu;
    Ok(match (moments.is_real(), extended) {
        (true, true) => lu_logdet(&Matrix::from_fn(n, |j, k| mu[j + k].re), ctx.pivoting),
        (true, false) => lu_logdet(&Matrix::from_fn(n, |j, k| mu[j + k].re.to_f64()), ctx.pivoting),
        (false, true) => lu_logdet(&Matrix::from_fn(n, |j, k| mu[j + k]), ctx.pivoting),
        (false, false) => lu_logdet(
            &Matrix::from_fn(n, |j, k| Complex64::new(mu[j + k].re.to_f64(), mu[j + k].im.to_f64())),
            ctx.pivoting,
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{gaussian_norm, laguerre_norm};

    #[test]
    fn gaussian_moments() {
        let p = MomentProblem::new(Weight::Gauss { a: 1.0 });
        let m = weighted_moments(&p, 4, PrecisionContext::double()).unwrap();
        let sp = std::f64::consts::PI.sqrt();
        assert!((m.get(0).re - sp).abs() < 1e-14);
        assert!(m.get(1).re.abs() < 1e-14);
        assert!((m.get(2).re - sp / 2.0).abs() < 1e-14);
        let d = hankel_logdet(&m, 2, PrecisionContext::double()).unwrap();
        assert!((d.real_value() - std::f64::consts::PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn hankel_matches_gaussian_norm() {
        // N! det[μ_{j+k}] = G_N[1]
        let n = 10u64;
        let p = MomentProblem::new(Weight::Gauss { a: 1.0 });
        let m = weighted_moments(&p, 2 * n as usize - 2, PrecisionContext::extended()).unwrap();
        let d = hankel_logdet(&m, n as usize, PrecisionContext::extended()).unwrap();
        let lf: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
        let exact = gaussian_norm(n).unwrap().log_modulus;
        assert!(
            (d.log_modulus + lf - exact).abs() < 1e-20_f64.max(1e-13 * exact.abs()),
            "{} {}",
            d.log_modulus + lf,
            exact
        );
    }

    #[test]
    fn laguerre_with_charge() {
        let n = 3u64;
        let p = MomentProblem::new(Weight::Laguerre { c: 2.0, aprime: 1.0 });
        let m = weighted_moments(&p, 4, PrecisionContext::extended()).unwrap();
        let d = hankel_logdet(&m, n as usize, PrecisionContext::extended()).unwrap();
        let lf: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
        let exact = laguerre_norm(n, 2.0, 1.0).unwrap().log_modulus;
        assert!((d.log_modulus + lf - exact).abs() < 1e-12);

        // |x − 1/4|: the k=0 moment against the split integral done by hand
        let p = MomentProblem::new(Weight::Laguerre { c: 1.0, aprime: 0.5 }).with_charge(0.25, 0.5);
        let m = weighted_moments(&p, 0, PrecisionContext::extended()).unwrap();
        // ∫_0^∞ |x − y| e^{−x} dx = y − 1 + 2e^{−y}
        let exact = 0.25 - 1.0 + 2.0 * (-0.25f64).exp();
        assert!((m.get(0).re - exact).abs() < 1e-15);
    }

    #[test]
    fn complex_multiplier() {
        // ∫ (y + ix)² e^{−x²} = √π (y² − 1/2)
        let y = 0.3;
        let p = MomentProblem::new(Weight::Gauss { a: 1.0 }).with_multiplier(Multiplier::Poly {
            coeffs: vec![Complex64::new(y * y, 0.0), Complex64::new(0.0, 2.0 * y), Complex64::new(-1.0, 0.0)],
        });
        let m = weighted_moments(&p, 1, PrecisionContext::extended()).unwrap();
        let sp = std::f64::consts::PI.sqrt();
        assert!((m.get(0) - Complex64::new(sp * (y * y - 0.5), 0.0)).norm() < 1e-15);
        // ∫ x (y+ix)² e^{−x²} = 2iy·√π/2
        assert!((m.get(1) - Complex64::new(0.0, y * sp)).norm() < 1e-15);
    }

    #[test]
    fn csv_roundtrip() {
        let m = MomentTable::from_f64(&[1.0, 0.0, 0.5]);
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let back = MomentTable::read_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.get(2).re, 0.5);
    }
}
