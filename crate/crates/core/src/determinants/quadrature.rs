//! Adaptive Gauss–Legendre quadrature at either precision tier.
//!
//! Vector-valued: one pass produces a whole table of integrals sharing the
//! same nodes (moment tables). Algebraic endpoint singularities are removed by
//! the substitution x = y + h t^m before refining.

use crate::error::{FhError, Result};
use crate::precision::Real;

/// Gauss–Legendre rule on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(order: usize) -> GaussLegendre<T> {
        let n = order;
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let one = T::one();
        let two = T::from_f64(2.0);
        for i in 0..(n + 1) / 2 {
            let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut x = T::from_f64(guess);
            let mut dp = one;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= T::epsilon() * T::from_f64(4.0) {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = two / ((one - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        GaussLegendre { nodes, weights }
    }
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let one = T::one();
    let mut p0 = one;
    let mut p1 = x;
    if n == 0 {
        return (one, T::zero());
    }
    for k in 2..=n {
        let kf = T::from_f64(k as f64);
        let p2 = ((T::from_f64(2.0) * kf - one) * x * p1 - (kf - one) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_f64(n as f64);
    let d = nf * (x * p1 - p0) / (x * x - one);
    (p1, d)
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub max_depth: usize,
    pub order: usize,
}

impl QuadOptions {
    pub fn for_real<T: Real>() -> QuadOptions {
        let eps = T::epsilon().to_f64();
        if eps < 1e-20 {
            QuadOptions { rel_tol: 1e-29, max_depth: 80, order: 30 }
        } else {
            QuadOptions { rel_tol: 2e-15, max_depth: 60, order: 20 }
        }
    }
}

/// End behaviour of an interval piece: `Some(p)` means the integrand behaves
/// like |x − end|^p there (p > −1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub a: f64,
    pub b: f64,
    pub sing_a: Option<f64>,
    pub sing_b: Option<f64>,
}

fn substitution_power(p: f64) -> u32 {
    // make the mapped integrand vanish like t^{(p+1)m − 1} with (p+1)m ≥ 8
    let m = (8.0 / (p + 1.0)).ceil();
    m.max(2.0).min(40.0) as u32
}

struct Adaptive<'a, T: Real> {
    rule: &'a GaussLegendre<T>,
    opts: QuadOptions,
    dim: usize,
    evals: usize,
}

impl<'a, T: Real> Adaptive<'a, T> {
    /// GL estimate of ∫_lo^hi φ(t) dt for the mapped integrand, value and
    /// absolute-value sums.
    fn panel(&mut self, g: &mut dyn FnMut(T, &mut [T]), lo: T, hi: T, out: &mut [T], abs: &mut [T]) {
        let half = (hi - lo) / T::from_f64(2.0);
        let mid = (hi + lo) / T::from_f64(2.0);
        let mut buf = vec![T::zero(); self.dim];
        for v in out.iter_mut() {
            *v = T::zero();
        }
        for v in abs.iter_mut() {
            *v = T::zero();
        }
        for (x, w) in self.rule.nodes.iter().zip(self.rule.weights.iter()) {
            let t = mid + half * *x;
            g(t, &mut buf);
            self.evals += 1;
            for d in 0..self.dim {
                out[d] += *w * buf[d];
                abs[d] += *w * buf[d].abs();
            }
        }
        for d in 0..self.dim {
            out[d] *= half;
            abs[d] *= half.abs();
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &mut self,
        g: &mut dyn FnMut(T, &mut [T]),
        lo: T,
        hi: T,
        whole: Vec<T>,
        whole_abs: Vec<T>,
        depth: usize,
        acc: &mut [T],
        scale: &[f64],
    ) -> Result<()> {
        let mid = (lo + hi) / T::from_f64(2.0);
        let mut l = vec![T::zero(); self.dim];
        let mut la = vec![T::zero(); self.dim];
        let mut r = vec![T::zero(); self.dim];
        let mut ra = vec![T::zero(); self.dim];
        self.panel(g, lo, mid, &mut l, &mut la);
        self.panel(g, mid, hi, &mut r, &mut ra);
        let mut ok = true;
        for d in 0..self.dim {
            let two = l[d] + r[d];
            let err = (two - whole[d]).abs().to_f64();
            let tol = self.opts.rel_tol * scale[d].max((la[d] + ra[d]).to_f64());
            if !(err <= tol) {
                ok = false;
                break;
            }
        }
        if ok || depth >= self.opts.max_depth {
            if !ok && depth >= self.opts.max_depth {
                // accept, but only if the disagreement is not catastrophic
                for d in 0..self.dim {
                    let err = (l[d] + r[d] - whole[d]).abs().to_f64();
                    if err > 1e-6 * scale[d].max(1e-300) {
                        return Err(FhError::Numerical(format!(
                            "quadrature failed to converge (err {err:e}, scale {:e})",
                            scale[d]
                        )));
                    }
                }
            }
            for d in 0..self.dim {
                acc[d] += l[d] + r[d];
            }
            let _ = whole_abs;
            return Ok(());
        }
        self.recurse(g, lo, mid, l, la, depth + 1, acc, scale)?;
        self.recurse(g, mid, hi, r, ra, depth + 1, acc, scale)
    }
}

/// Integrand called as f(x, near, out). When x lies in a piece with a singular
/// end e, `near` is Some((e, x − e)) with the offset computed without
/// cancellation, so factors like |x − e|^p keep full relative accuracy.
pub type Integrand<'a, T> = dyn FnMut(T, Option<(f64, T)>, &mut [T]) + 'a;

/// ∫ over the pieces of f(x), vector-valued with `dim` components.
pub fn integrate_pieces<T: Real>(
    f: &mut Integrand<'_, T>,
    pieces: &[Piece],
    dim: usize,
    opts: QuadOptions,
) -> Result<Vec<T>> {
    let rule = GaussLegendre::<T>::new(opts.order);
    let mut ad = Adaptive { rule: &rule, opts, dim, evals: 0 };
    let mut total = vec![T::zero(); dim];

    // first pass: rough magnitudes for the absolute floor
    let mut mags = vec![0.0f64; dim];
    let mut sub: Vec<(Piece, bool)> = Vec::new();
    for p in pieces {
        // split so that each sub-piece has at most one singular end, at its left
        // or right
        match (p.sing_a, p.sing_b) {
            (Some(_), Some(_)) => {
                let m = 0.5 * (p.a + p.b);
                sub.push((Piece { a: p.a, b: m, sing_a: p.sing_a, sing_b: None }, true));
                sub.push((Piece { a: m, b: p.b, sing_a: None, sing_b: p.sing_b }, true));
            }
            _ => sub.push((*p, true)),
        }
    }
    let mut parts: Vec<Vec<T>> = Vec::new();
    for pass in 0..2 {
        for (p, _) in &sub {
            let a = T::from_f64(p.a);
            let b = T::from_f64(p.b);
            let len = b - a;
            let fr: &mut Integrand<'_, T> = &mut *f;
            let mut mapped: Box<dyn FnMut(T, &mut [T])> = match (p.sing_a, p.sing_b) {
                (Some(e), None) => {
                    let m = substitution_power(e);
                    let mf = T::from_f64(m as f64);
                    Box::new(move |t: T, out: &mut [T]| {
                        let tm1 = t.powi(m - 1);
                        let d = len * tm1 * t;
                        fr(a + d, Some((p.a, d)), out);
                        let jac = len * mf * tm1;
                        for v in out.iter_mut() {
                            *v *= jac;
                        }
                    })
                }
                (None, Some(e)) => {
                    let m = substitution_power(e);
                    let mf = T::from_f64(m as f64);
                    Box::new(move |t: T, out: &mut [T]| {
                        let tm1 = t.powi(m - 1);
                        let d = -(len * tm1 * t);
                        fr(b + d, Some((p.b, d)), out);
                        let jac = len * mf * tm1;
                        for v in out.iter_mut() {
                            *v *= jac;
                        }
                    })
                }
                _ => Box::new(move |t: T, out: &mut [T]| {
                    fr(a + len * t, None, out);
                    for v in out.iter_mut() {
                        *v *= len;
                    }
                }),
            };
            let mut whole = vec![T::zero(); dim];
            let mut whole_abs = vec![T::zero(); dim];
            ad.panel(&mut *mapped, T::zero(), T::one(), &mut whole, &mut whole_abs);
            if pass == 0 {
                for d in 0..dim {
                    mags[d] += whole_abs[d].to_f64();
                }
                continue;
            }
            let mut acc = vec![T::zero(); dim];
            ad.recurse(&mut *mapped, T::zero(), T::one(), whole, whole_abs, 0, &mut acc, &mags)?;
            parts.push(acc);
        }
    }
    for p in parts {
        for d in 0..dim {
            total[d] += p[d];
        }
    }
    Ok(total)
}

/// Scalar convenience wrapper over a single interval with optional endpoint
/// singularity exponents.
pub fn integrate<T: Real>(
    f: &mut dyn FnMut(T) -> T,
    a: f64,
    b: f64,
    sing_a: Option<f64>,
    sing_b: Option<f64>,
) -> Result<T> {
    let mut g = |x: T, _: Option<(f64, T)>, out: &mut [T]| out[0] = f(x);
    let v = integrate_pieces(&mut g, &[Piece { a, b, sing_a, sing_b }], 1, QuadOptions::for_real::<T>())?;
    Ok(v[0])
}

/// Split [a, b] at the given interior points, each with its singularity
/// exponent; endpoints may carry their own exponents.
pub fn pieces_with_breaks(
    a: f64,
    b: f64,
    sing_a: Option<f64>,
    sing_b: Option<f64>,
    breaks: &[(f64, f64)],
) -> Vec<Piece> {
    let mut pts: Vec<(f64, Option<f64>)> = vec![(a, sing_a)];
    let mut inner: Vec<(f64, f64)> = breaks.iter().copied().filter(|(y, _)| *y > a && *y < b).collect();
    inner.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    for (y, p) in inner {
        if let Some(last) = pts.last_mut() {
            if (last.0 - y).abs() < 1e-15 {
                continue;
            }
        }
        pts.push((y, Some(p)));
    }
    pts.push((b, sing_b));
    let mut out = Vec::new();
    for w in pts.windows(2) {
        out.push(Piece { a: w[0].0, b: w[1].0, sing_a: w[0].1, sing_b: w[1].1 });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::Dd;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        let r = GaussLegendre::<f64>::new(10);
        let s: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-15);
        let rd = GaussLegendre::<Dd>::new(12);
        let mut s = Dd::ZERO;
        for (x, w) in rd.nodes.iter().zip(&rd.weights) {
            s += *w * x.powi(22);
        }
        assert!((s - Dd::from_f64(2.0) / Dd::from_f64(23.0)).abs().to_f64() < 1e-30);
    }

    #[test]
    fn sqrt_endpoint() {
        let v: f64 = integrate(&mut |x: f64| x.sqrt(), 0.0, 1.0, Some(0.5), None).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-14);
        let v: Dd = integrate(&mut |x: Dd| x.sqrt(), 0.0, 1.0, Some(0.5), None).unwrap();
        assert!((v - Dd::from_f64(2.0) / Dd::from_f64(3.0)).abs().to_f64() < 1e-29);
    }

    #[test]
    fn inverse_sqrt_interior() {
        // ∫_0^1 |x − 1/2|^{−1/2} dx = 2√2
        let pieces = pieces_with_breaks(0.0, 1.0, None, None, &[(0.5, -0.5)]);
        let mut f = |x: Dd, near: Option<(f64, Dd)>, out: &mut [Dd]| {
            let d = near.map(|(_, d)| d).unwrap_or(x - Dd::from_f64(0.5));
            out[0] = Dd::ONE / d.abs().sqrt()
        };
        let v = integrate_pieces(&mut f, &pieces, 1, QuadOptions::for_real::<Dd>()).unwrap();
        let exact = Dd::from_f64(8.0).sqrt();
        assert!((v[0] - exact).abs().to_f64() < 1e-28, "{:?}", v[0]);
    }

    #[test]
    fn gaussian_moment_dd() {
        // ∫ x² e^{−x²} = √π/2 on a truncated line
        let mut f = |x: Dd, _: Option<(f64, Dd)>, out: &mut [Dd]| {
            let w = (-(x * x)).exp();
            out[0] = w;
            out[1] = x * x * w;
        };
        let pieces = pieces_with_breaks(-11.0, 11.0, None, None, &[(0.0, 0.0)]);
        let v = integrate_pieces(&mut f, &pieces, 2, QuadOptions::for_real::<Dd>()).unwrap();
        let sp = Dd::pi().sqrt();
        assert!((v[0] - sp).abs().to_f64() < 1e-29);
        assert!((v[1] - sp / Dd::from_f64(2.0)).abs().to_f64() < 1e-29);
    }
}
