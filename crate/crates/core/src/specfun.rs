//! Gamma, Barnes G and the closed-form normalizations built from them.
//!
//! All results are returned in log form ([`LogValue`]) because the products
//! involved overflow long before the sizes we care about.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, FhError, Result};

/// ζ'(−1) = 1/12 − ln A, A the Glaisher–Kinkelin constant.
pub const ZETA_PRIME_MINUS_ONE: f64 = -0.165_421_143_700_450_929_2;
pub const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Logarithm of a real number: `ln|x|`, the phase (0 or π for reals), and a
/// flag for an exact zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogValue {
    pub log_modulus: f64,
    pub sign_phase: f64,
    pub zero: bool,
}

impl LogValue {
    pub const ONE: LogValue = LogValue { log_modulus: 0.0, sign_phase: 0.0, zero: false };
    pub const ZERO: LogValue = LogValue { log_modulus: f64::NEG_INFINITY, sign_phase: 0.0, zero: true };

    pub fn from_log(log_modulus: f64) -> LogValue {
        LogValue { log_modulus, sign_phase: 0.0, zero: false }
    }

    pub fn from_log_sign(log_modulus: f64, negative: bool) -> LogValue {
        LogValue { log_modulus, sign_phase: if negative { PI } else { 0.0 }, zero: false }
    }

    pub fn from_real(x: f64) -> LogValue {
        if x == 0.0 {
            LogValue::ZERO
        } else {
            LogValue::from_log_sign(x.abs().ln(), x < 0.0)
        }
    }

    pub fn is_negative(&self) -> bool {
        !self.zero && self.sign_phase.cos() < 0.0
    }

    /// The value as an ordinary real; may overflow to ±inf.
    pub fn value(&self) -> f64 {
        if self.zero {
            0.0
        } else {
            self.log_modulus.exp() * self.sign_phase.cos()
        }
    }

    pub fn mul(self, other: LogValue) -> LogValue {
        if self.zero || other.zero {
            return LogValue::ZERO;
        }
        LogValue {
            log_modulus: self.log_modulus + other.log_modulus,
            sign_phase: wrap_phase(self.sign_phase + other.sign_phase),
            zero: false,
        }
    }

    pub fn div(self, other: LogValue) -> Result<LogValue> {
        if other.zero {
            return domain("division by an exact zero");
        }
        if self.zero {
            return Ok(LogValue::ZERO);
        }
        Ok(LogValue {
            log_modulus: self.log_modulus - other.log_modulus,
            sign_phase: wrap_phase(self.sign_phase - other.sign_phase),
            zero: false,
        })
    }

    pub fn powi(self, k: i32) -> LogValue {
        if self.zero {
            return if k == 0 { LogValue::ONE } else { LogValue::ZERO };
        }
        LogValue {
            log_modulus: self.log_modulus * k as f64,
            sign_phase: wrap_phase(self.sign_phase * k as f64),
            zero: false,
        }
    }
}

/// Map an angle into (−π, π].
pub fn wrap_phase(x: f64) -> f64 {
    if x > -PI && x <= PI {
        return x;
    }
    let two_pi = 2.0 * PI;
    let mut y = x % two_pi;
    if y <= -PI {
        y += two_pi;
    } else if y > PI {
        y -= two_pi;
    }
    y
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// ln|Γ(x)| and its sign.
pub fn log_gamma(x: f64) -> Result<LogValue> {
    if !x.is_finite() {
        return domain(format!("log_gamma: non-finite argument {x}"));
    }
    if is_nonpositive_integer(x) {
        return domain(format!("log_gamma: pole at {x}"));
    }
    let (lg, sign) = libm::lgamma_r(x);
    Ok(LogValue::from_log_sign(lg, sign < 0))
}

/// ln Γ(x) for x > 0, for internal use where the domain is already checked.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    libm::lgamma_r(x).0
}

/// ln((m)!) for small non-negative integers, summed exactly.
fn ln_factorial_int(m: u64) -> f64 {
    if m < 2 {
        return 0.0;
    }
    ln_gamma(m as f64 + 1.0)
}

const BERNOULLI_EVEN: [f64; 10] = [
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
];

/// Asymptotic series for ln G(w + 1), accurate for w ≥ 12.
fn log_barnes_g_asym(w: f64) -> f64 {
    let lw = w.ln();
    let w2 = w * w;
    let mut s = 0.5 * w2 * lw - 0.75 * w2 + 0.5 * w * LN_2PI - lw / 12.0 + ZETA_PRIME_MINUS_ONE;
    let inv2 = 1.0 / w2;
    let mut p = inv2;
    for (i, b) in BERNOULLI_EVEN.iter().enumerate() {
        let k = (i + 1) as f64;
        let term = b / (4.0 * k * (k + 1.0)) * p;
        s += term;
        if term.abs() < 1e-18 * s.abs().max(1.0) {
            break;
        }
        p *= inv2;
    }
    s
}

const BARNES_SHIFT: f64 = 13.0;

/// ln G(z) for real z > 0.
pub fn log_barnes_g(z: f64) -> Result<LogValue> {
    if !z.is_finite() || z <= 0.0 {
        return domain(format!("log_barnes_g: requires z > 0, got {z}"));
    }
    Ok(LogValue::from_log(ln_barnes_g_pos(z)))
}

fn ln_barnes_g_pos(z: f64) -> f64 {
    if z == z.floor() && z <= 200.0 {
        // G(m) = Π_{k=0}^{m-2} k!
        let m = z as u64;
        let mut s = 0.0;
        for k in 2..m.saturating_sub(1) {
            s += ln_factorial_int(k);
        }
        return s;
    }
    let mut w = z;
    let mut acc = 0.0;
    while w < BARNES_SHIFT {
        acc += ln_gamma(w);
        w += 1.0;
    }
    log_barnes_g_asym(w - 1.0) - acc
}

/// G(z) on the whole real line via G(z) = G(z+1)/Γ(z); exact zero at the
/// nonpositive integers.
pub fn log_barnes_g_signed(z: f64) -> Result<LogValue> {
    if !z.is_finite() {
        return domain(format!("log_barnes_g_signed: non-finite argument {z}"));
    }
    if z > 0.0 {
        return Ok(LogValue::from_log(ln_barnes_g_pos(z)));
    }
    if is_nonpositive_integer(z) {
        return Ok(LogValue::ZERO);
    }
    let mut w = z;
    let mut acc = LogValue::ONE;
    while w <= 0.0 {
        acc = acc.mul(log_gamma(w)?);
        w += 1.0;
    }
    LogValue::from_log(ln_barnes_g_pos(w)).div(acc)
}

/// Large-n form of ln G(n+1+a)/G(n+1+b).
pub fn barnes_g_ratio_asymptotic(a: f64, b: f64, n: u64) -> f64 {
    let nf = n as f64;
    (b - a) * nf + 0.5 * (a - b) * LN_2PI + ((a - b) * nf + 0.5 * (a * a - b * b)) * nf.ln()
}

/// ln f_n(α, c) with f_n(α,c) = Π_{j<n} Γ(α+jc+1)/Γ(jc+1).
pub fn selberg_f(n: u64, alpha: f64, c: f64) -> Result<LogValue> {
    let mut acc = LogValue::ONE;
    if alpha == 0.0 {
        return Ok(acc);
    }
    for j in 0..n {
        let jc = j as f64 * c;
        let num = log_gamma(alpha + jc + 1.0)?;
        let den = log_gamma(jc + 1.0)?;
        acc = acc.mul(num).div(den)?;
    }
    Ok(acc)
}

/// Large-n form of ln f_n(α, c) for a positive integer c.
fn selberg_f_asymptotic_int(alpha: f64, c: u64, n: f64) -> Result<f64> {
    let cf = c as f64;
    let ln_n = n.ln();
    let mut s = alpha * n * ln_n + alpha * n * cf.ln() - alpha * n
        + 0.5 * alpha * LN_2PI
        + (alpha * alpha / (2.0 * cf) - alpha * (cf - 1.0) / (2.0 * cf)) * ln_n;
    for p in 0..c {
        let pf = p as f64;
        let num = log_barnes_g_signed(1.0 - pf / cf)?;
        let den = log_barnes_g_signed((alpha - pf) / cf + 1.0)?;
        if num.zero || den.zero {
            return Err(FhError::Degenerate(format!(
                "Barnes G zero in Selberg asymptotics (alpha={alpha}, c={c}, p={p})"
            )));
        }
        s += num.log_modulus - den.log_modulus;
    }
    Ok(s)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Large-n form of ln f_{rn}(α, s/r), gcd(s, r) = 1, written as a product of
/// integer-step factors.
pub fn selberg_f_asymptotic(alpha: f64, s: u64, r: u64, n: u64) -> Result<f64> {
    if s == 0 || r == 0 || gcd(s, r) != 1 {
        return domain(format!("selberg_f_asymptotic: need coprime s,r >= 1, got s={s}, r={r}"));
    }
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let mut total = 0.0;
    for nu in 0..r {
        let shift = s as f64 * nu as f64 / r as f64;
        total += selberg_f_asymptotic_int(alpha + shift, s, nf)?;
        if shift != 0.0 {
            total -= selberg_f_asymptotic_int(shift, s, nf)?;
        }
    }
    Ok(total)
}

fn g_signed(z: f64, what: &str) -> Result<LogValue> {
    let v = log_barnes_g_signed(z)?;
    if v.zero {
        return domain(format!("{what}: Barnes G vanishes at {z}"));
    }
    Ok(v)
}

/// ln M_n(a, b) = ln[G(n+1+a+b)G(1+a)G(1+b)G(n+2) / (G(1+a+b)G(n+1+a)G(n+1+b))].
pub fn morris_m(n: u64, a: f64, b: f64) -> Result<LogValue> {
    let nf = n as f64;
    let what = "morris_m";
    let num = g_signed(nf + 1.0 + a + b, what)?
        .mul(g_signed(1.0 + a, what)?)
        .mul(g_signed(1.0 + b, what)?)
        .mul(g_signed(nf + 2.0, what)?);
    let den = g_signed(1.0 + a + b, what)?.mul(g_signed(nf + 1.0 + a, what)?).mul(g_signed(nf + 1.0 + b, what)?);
    num.div(den)
}

/// ln H_{n,a,b}[1]: the n-fold Jacobi integral on [0,1] with weight
/// x^a (1−x)^b and squared Vandermonde.
pub fn jacobi_norm(n: u64, a: f64, b: f64) -> Result<LogValue> {
    if !(a > -1.0 && b > -1.0) {
        return domain(format!("jacobi_norm: need a,b > -1, got a={a}, b={b}"));
    }
    let nf = n as f64;
    let g = |z: f64| ln_barnes_g_pos(z);
    let v = g(nf + 1.0 + a) + g(nf + 1.0 + b) + g(nf + 1.0 + a + b) + g(nf + 2.0)
        - g(1.0 + a)
        - g(1.0 + b)
        - g(2.0 * nf + 1.0 + a + b);
    Ok(LogValue::from_log(v))
}

/// ln C_{n,β} = ln Γ(nβ/2+1) − n ln Γ(β/2+1).
pub fn cbeta_norm(n: u64, beta: f64) -> Result<LogValue> {
    if !(beta > 0.0) {
        return domain(format!("cbeta_norm: need beta > 0, got {beta}"));
    }
    let nf = n as f64;
    Ok(LogValue::from_log(ln_gamma(nf * beta / 2.0 + 1.0) - nf * ln_gamma(beta / 2.0 + 1.0)))
}

/// ln G_{n,1}[1] = −n(n−1)/2 ln 2 + (n/2) ln π + ln G(n+2).
pub fn gaussian_norm(n: u64) -> Result<LogValue> {
    let nf = n as f64;
    Ok(LogValue::from_log(
        -0.5 * nf * (nf - 1.0) * std::f64::consts::LN_2 + 0.5 * nf * PI.ln() + ln_barnes_g_pos(nf + 2.0),
    ))
}

/// ln G_{n,a}[1] for general Gaussian scale a > 0 (x ↦ x/a in the unit case).
pub fn gaussian_norm_scaled(n: u64, a: f64) -> Result<LogValue> {
    if !(a > 0.0) {
        return domain(format!("gaussian_norm_scaled: need a > 0, got {a}"));
    }
    let nf = n as f64;
    let base = gaussian_norm(n)?;
    Ok(LogValue::from_log(base.log_modulus - nf * nf * a.ln()))
}

/// ln of the n-fold Laguerre integral with weight x^{a'−1/2} e^{−cx} on (0,∞):
/// c^{−N²−N(a'−1/2)} G(N+2)G(a'+N+1/2)/G(a'+1/2).
pub fn laguerre_norm(n: u64, c: f64, aprime: f64) -> Result<LogValue> {
    if !(c > 0.0) || !(aprime > -0.5) {
        return domain(format!("laguerre_norm: need c > 0 and a' > -1/2, got c={c}, a'={aprime}"));
    }
    let nf = n as f64;
    let v = (-nf * nf - nf * (aprime - 0.5)) * c.ln() + ln_barnes_g_pos(nf + 2.0) + ln_barnes_g_pos(aprime + nf + 0.5)
        - ln_barnes_g_pos(aprime + 0.5);
    Ok(LogValue::from_log(v))
}

/// ln G_{ν,a}[1] continued to real ν ≥ 0 through the closed form.
pub fn ln_gaussian_norm_real(nu: f64, a: f64) -> f64 {
    -0.5 * nu * (nu - 1.0) * std::f64::consts::LN_2 + 0.5 * nu * PI.ln() + ln_barnes_g_pos(nu + 2.0) - nu * nu * a.ln()
}

/// ln of the Laguerre normalization continued to real ν ≥ 0.
pub fn ln_laguerre_norm_real(nu: f64, c: f64, aprime: f64) -> f64 {
    (-nu * nu - nu * (aprime - 0.5)) * c.ln() + ln_barnes_g_pos(nu + 2.0) + ln_barnes_g_pos(aprime + nu + 0.5)
        - ln_barnes_g_pos(aprime + 0.5)
}

/// ln⟨Π_l e^{iβbθ_l/2}|1 + e^{iθ_l}|^{βq}⟩ over CβE_n, from
/// f_n(2cq, c)/(f_n(c(q+b), c) f_n(c(q−b), c)) with c = β/2.
pub fn ln_cbeta_charge_average(n: u64, beta: f64, q: f64, b: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return domain(format!("need beta > 0, got {beta}"));
    }
    let c = beta / 2.0;
    Ok(selberg_f(n, 2.0 * c * q, c)?.log_modulus
        - selberg_f(n, c * (q + b), c)?.log_modulus
        - selberg_f(n, c * (q - b), c)?.log_modulus)
}

/// ln Z_ν^{(β)}[1] = ln Γ(νβ/2 + 1) − ν ln Γ(β/2 + 1), continued to real ν.
pub fn ln_cbeta_norm_real(nu: f64, beta: f64) -> f64 {
    ln_gamma(nu * beta / 2.0 + 1.0) - nu * ln_gamma(beta / 2.0 + 1.0)
}

/// ln binomial(2q, q) for real q ≥ 0.
pub fn ln_central_binomial(q: f64) -> f64 {
    ln_gamma(2.0 * q + 1.0) - 2.0 * ln_gamma(q + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn gamma_trivial_values() {
        assert_eq!(log_gamma(1.0).unwrap().log_modulus, 0.0);
        assert!(close(log_gamma(0.5).unwrap().log_modulus, 0.5 * PI.ln(), 1e-15));
        assert!(log_gamma(-2.0).is_err());
        assert!(log_gamma(-0.5).unwrap().is_negative());
    }

    #[test]
    fn barnes_small_integers() {
        assert_eq!(log_barnes_g(1.0).unwrap().log_modulus, 0.0);
        assert_eq!(log_barnes_g(2.0).unwrap().log_modulus, 0.0);
        assert!(close(log_barnes_g(4.0).unwrap().log_modulus, 2f64.ln(), 1e-15));
        assert!(log_barnes_g(0.0).is_err());
        assert!(log_barnes_g_signed(0.0).unwrap().zero);
        assert!(log_barnes_g_signed(-3.0).unwrap().zero);
    }

    #[test]
    fn barnes_functional_equation() {
        for &z in &[0.5, 1.5, 2.5, 7.0, 0.013, 12.7, 13.2, 40.3] {
            let lhs = log_barnes_g(z + 1.0).unwrap().log_modulus - log_barnes_g(z).unwrap().log_modulus;
            let rhs = ln_gamma(z);
            assert!(close(lhs, rhs, 1e-12), "z={z}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn barnes_continuous_across_integer_shortcut() {
        let a = log_barnes_g(30.0 - 1e-9).unwrap().log_modulus;
        let b = log_barnes_g(30.0).unwrap().log_modulus;
        let slope = ln_gamma(30.0) * 1.0; // d/dz ln G ≈ ln Γ(z) + O(1) scale
        assert!((a - b).abs() < 1e-7 * slope.abs().max(1.0));
    }

    #[test]
    fn barnes_signed_negative_arguments() {
        // G(1/2) = G(-1/2 + 1) = Γ(-1/2) G(-1/2)
        let gm = log_barnes_g_signed(-0.5).unwrap();
        let gh = log_barnes_g(0.5).unwrap();
        let gam = log_gamma(-0.5).unwrap();
        assert!(close(gm.mul(gam).log_modulus, gh.log_modulus, 1e-13));
        assert!(gm.is_negative());
    }

    #[test]
    fn ratio_asymptotic_identical_args() {
        assert_eq!(barnes_g_ratio_asymptotic(1.0, 1.0, 10), 0.0);
    }

    #[test]
    fn selberg_small() {
        assert_eq!(selberg_f(7, 0.0, 1.3).unwrap().log_modulus, 0.0);
        assert!(close(selberg_f(2, 2.0, 1.0).unwrap().log_modulus, 12f64.ln(), 1e-14));
        let a = 0.37;
        assert!(close(selberg_f(1, a, 2.2).unwrap().log_modulus, ln_gamma(a + 1.0), 1e-15));
    }

    #[test]
    fn selberg_asymptotic_integer_step() {
        // f_n(2,2) = (2n)!
        let n = 200u64;
        let exact = ln_gamma(2.0 * n as f64 + 1.0);
        let asym = selberg_f_asymptotic(2.0, 2, 1, n).unwrap();
        assert!((exact - asym).abs() < 1e-3);
    }

    #[test]
    fn selberg_asymptotic_rejects_non_coprime() {
        assert!(selberg_f_asymptotic(1.0, 2, 4, 10).is_err());
        assert_eq!(selberg_f_asymptotic(0.0, 1, 2, 10).unwrap(), 0.0);
    }

    #[test]
    fn morris_values() {
        assert!(morris_m(1, 0.0, 0.0).unwrap().log_modulus.abs() < 1e-15);
        assert!(close(morris_m(1, 1.0, 1.0).unwrap().log_modulus, 2f64.ln(), 1e-14));
    }

    #[test]
    fn jacobi_values() {
        assert!(jacobi_norm(1, 0.0, 0.0).unwrap().log_modulus.abs() < 1e-14);
        assert!(close(jacobi_norm(1, 1.0, 0.0).unwrap().log_modulus, 0.5f64.ln(), 1e-14));
        assert!(jacobi_norm(1, -1.0, 0.0).is_err());
    }

    #[test]
    fn cbeta_values() {
        assert!(cbeta_norm(1, 3.3).unwrap().log_modulus.abs() < 1e-14);
        assert!(close(cbeta_norm(2, 2.0).unwrap().log_modulus, 2f64.ln(), 1e-15));
        // n=3, β=4: Γ(7)/Γ(3)^3 = 720/8 = 90
        assert!(close(cbeta_norm(3, 4.0).unwrap().log_modulus, 90f64.ln(), 1e-14));
    }

    #[test]
    fn gaussian_and_laguerre_unit_cases() {
        assert!(close(gaussian_norm(1).unwrap().log_modulus, 0.5 * PI.ln(), 1e-15));
        assert!(laguerre_norm(1, 1.0, 0.5).unwrap().log_modulus.abs() < 1e-15);
        assert!(close(laguerre_norm(1, 1.0, 1.0).unwrap().log_modulus, (PI.sqrt() / 2.0).ln(), 1e-14));
    }

    #[test]
    fn wrap_phase_range() {
        assert_eq!(wrap_phase(PI), PI);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
    }
}
