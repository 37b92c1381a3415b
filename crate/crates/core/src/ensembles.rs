//! Ensemble averages: exact group integrals routed to the determinant
//! engines, and Monte Carlo samplers for CβE, GUE and LUE.

use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::determinants::{
    hankel_logdet, toeplitz_hankel_logdet, toeplitz_logdet, weighted_moments, LogDet, MomentProblem, Multiplier,
    ThVariant, Weight,
};
use crate::error::{invalid, FhError, Result};
use crate::precision::PrecisionContext;
use crate::specfun::{wrap_phase, LogValue};
use crate::symbols::{CoefficientTable, FHSymbol, FourierSeries, Singularity};

/// Ensemble identifiers. For the orthogonal and symplectic groups `n` is the
/// number N of free eigenvalue pairs, so `OplusEven { n: 3 }` is O⁺(6).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "group", rename_all = "snake_case")]
pub enum EnsembleId {
    Unitary {
        n: usize,
    },
    Symplectic {
        n: usize,
    },
    OplusEven {
        n: usize,
    },
    OplusOdd {
        n: usize,
    },
    OminusOdd {
        n: usize,
    },
    CircularBeta {
        n: usize,
        beta: f64,
    },
    Gue {
        n: usize,
        a: f64,
    },
    Lue {
        n: usize,
        c: f64,
        aprime: f64,
    },
    /// Density Π(1+cos θ)^{λ₁}(1−cos θ)^{λ₂} Π(cos θ_k − cos θ_j)² on [0, π]^N.
    CLambda {
        n: usize,
        lambda1: f64,
        lambda2: f64,
    },
}

impl EnsembleId {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            EnsembleId::CircularBeta { beta, .. } => beta > 0.0,
            EnsembleId::Gue { a, .. } => a > 0.0,
            EnsembleId::Lue { c, aprime, .. } => c > 0.0 && aprime > -0.5,
            EnsembleId::CLambda { lambda1, lambda2, .. } => lambda1 > -1.0 && lambda2 > -1.0,
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            invalid(format!("ensemble parameters out of range: {self:?}"))
        }
    }
}

/// ⟨Π g(θ_l)⟩ over a classical group, from the coefficients of g.
pub fn group_average(id: EnsembleId, g: &CoefficientTable, ctx: PrecisionContext) -> Result<LogDet> {
    match id {
        EnsembleId::Unitary { n } => toeplitz_logdet(g, n, ctx),
        EnsembleId::Symplectic { n } => toeplitz_hankel_logdet(ThVariant::Sp, g, n, ctx),
        EnsembleId::OplusOdd { n } => toeplitz_hankel_logdet(ThVariant::OplusOdd, g, n, ctx),
        EnsembleId::OminusOdd { n } => toeplitz_hankel_logdet(ThVariant::OminusOdd, g, n, ctx),
        EnsembleId::OplusEven { n } => {
            let d = toeplitz_hankel_logdet(ThVariant::OplusEven, g, n, ctx)?;
            Ok(if n == 0 { d } else { d.scale_log(-std::f64::consts::LN_2) })
        }
        other => invalid(format!("{other:?} is not a classical group; use the moment or sampling routes")),
    }
}

/// Even symbol a(θ) Π(2|cos θ − cos φ_r|)^{2a_r} with log a(θ) = c_0 + 2Σ c_n cos nθ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvenSymbol {
    pub cos_coeffs: Vec<f64>,
    pub points: Vec<(f64, f64)>,
}

impl EvenSymbol {
    /// The same function written in Fisher–Hartwig form, with singularities at ±φ_r.
    pub fn to_fh(&self) -> Result<FHSymbol> {
        let order = self.cos_coeffs.len().saturating_sub(1).max(1);
        let mut s = FourierSeries::zero(order);
        for (k, &c) in self.cos_coeffs.iter().enumerate() {
            s.set(k as i64, Complex64::new(c, 0.0));
            if k > 0 {
                s.set(-(k as i64), Complex64::new(c, 0.0));
            }
        }
        let mut sings = Vec::new();
        for &(phi, a) in &self.points {
            sings.push(Singularity::new(phi, a, 0.0));
            sings.push(Singularity::new(-phi, a, 0.0));
        }
        FHSymbol::new(s, sings)
    }
}

/// ⟨Π a(θ_l) Π_r (2|cos θ_l − cos φ_r|)^{2a_r}⟩ over C_N(λ₁, λ₂), through the
/// Jacobi moment problem in x = (1 + cos θ)/2.
pub fn cn_lambda_average(
    n: usize,
    lambda1: f64,
    lambda2: f64,
    sym: &EvenSymbol,
    ctx: PrecisionContext,
) -> Result<LogDet> {
    EnsembleId::CLambda { n, lambda1, lambda2 }.validate()?;
    let weight = Weight::Jacobi { a: lambda1 - 0.5, b: lambda2 - 0.5 };
    let mut p = MomentProblem::new(weight);
    let mut log_pref = 0.0;
    for &(phi, a) in &sym.points {
        // 2|cos θ − cos φ| = 4|x − y|
        p = p.with_charge(0.5 * (1.0 + phi.cos()), a);
        log_pref += 2.0 * a * n as f64 * 4f64.ln();
    }
    if !sym.cos_coeffs.is_empty() {
        p = p.with_multiplier(Multiplier::ExpCosSeries { coeffs: sym.cos_coeffs.clone() });
    }
    let kmax = 2 * n.max(1) - 2;
    let num = hankel_logdet(&weighted_moments(&p, kmax, ctx)?, n, ctx)?;
    let den = hankel_logdet(&weighted_moments(&MomentProblem::new(weight), kmax, ctx)?, n, ctx)?;
    Ok(num.div(den).scale_log(log_pref))
}

/// Positions drawn from one ensemble, one row per sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub ensemble: EnsembleId,
    pub samples: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub seed: u64,
    pub sweeps: usize,
    pub acceptance: Option<f64>,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let n = self.samples.first().map(|s| s.len()).unwrap_or(0);
        write!(w, "sample,weight")?;
        for j in 0..n {
            write!(w, ",x{j}")?;
        }
        writeln!(w)?;
        for (i, (s, wt)) in self.samples.iter().zip(&self.weights).enumerate() {
            write!(w, "{i},{wt}")?;
            for x in s {
                write!(w, ",{x:.17e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Stream of a seeded generator used for block `block` of a batch.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Markov chain settings for the CβE sampler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainOptions {
    pub sweeps: usize,
    /// Keep one configuration every `thin` sweeps after burn-in.
    pub thin: usize,
    pub seed: u64,
}

/// Single-angle Metropolis chain for the CβE density Π|e^{iθ_j} − e^{iθ_k}|^β.
/// The first quarter of the sweeps is burn-in, during which the proposal width
/// is tuned toward a 30–50% acceptance rate.
pub fn cbeta_sample(n: usize, beta: f64, opts: ChainOptions) -> Result<SampleBatch> {
    let id = EnsembleId::CircularBeta { n, beta };
    id.validate()?;
    if n == 0 || opts.thin == 0 {
        return invalid("cbeta_sample needs n ≥ 1 and thin ≥ 1");
    }
    let mut rng = block_rng(opts.seed, 0);
    let tau = 2.0 * std::f64::consts::PI;
    let mut theta: Vec<f64> = (0..n).map(|j| tau * (j as f64 + rng.gen::<f64>() * 0.5) / n as f64).collect();
    let mut ch: Vec<f64> = theta.iter().map(|t| (0.5 * t).cos()).collect();
    let mut sh: Vec<f64> = theta.iter().map(|t| (0.5 * t).sin()).collect();
    let mut step = tau / n as f64;
    let burn = opts.sweeps / 4;
    let (mut acc, mut tried) = (0usize, 0usize);
    let (mut win_acc, mut win_tried) = (0usize, 0usize);
    let mut samples = Vec::new();
    for sweep in 0..opts.sweeps {
        for i in 0..n {
            let prop = theta[i] + step * (2.0 * rng.gen::<f64>() - 1.0);
            let (pc, ps) = ((0.5 * prop).cos(), (0.5 * prop).sin());
            // Π_j sin²((θ'−θ_j)/2) / sin²((θ−θ_j)/2)
            let mut ratio = 1.0f64;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let new = ps * ch[j] - pc * sh[j];
                let old = sh[i] * ch[j] - ch[i] * sh[j];
                ratio *= (new * new) / (old * old);
            }
            let accept = ratio.is_infinite() || (ratio > 0.0 && rng.gen::<f64>().ln() < 0.5 * beta * ratio.ln());
            if accept {
                theta[i] = prop;
                ch[i] = pc;
                sh[i] = ps;
            }
            win_tried += 1;
            win_acc += accept as usize;
            if sweep >= burn {
                tried += 1;
                acc += accept as usize;
            }
        }
        if sweep < burn && (sweep + 1) % 20 == 0 {
            let rate = win_acc as f64 / win_tried as f64;
            if rate < 0.3 {
                step /= 1.15;
            } else if rate > 0.5 {
                step = (step * 1.15).min(tau);
            }
            win_acc = 0;
            win_tried = 0;
        }
        if sweep >= burn && (sweep - burn) % opts.thin == opts.thin - 1 {
            samples.push(theta.iter().map(|t| wrap_phase(*t)).collect::<Vec<f64>>());
        }
    }
    let weights = vec![1.0; samples.len()];
    Ok(SampleBatch {
        ensemble: id,
        samples,
        weights,
        seed: opts.seed,
        sweeps: opts.sweeps,
        acceptance: Some(if tried == 0 { 0.0 } else { acc as f64 / tried as f64 }),
    })
}

const BLOCK: usize = 1024;

fn parallel_blocks(count: usize, seed: u64, draw: impl Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync) -> Vec<Vec<f64>> {
    let blocks = count.div_ceil(BLOCK);
    let parts: Vec<Vec<Vec<f64>>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b as u64);
            let m = BLOCK.min(count - b * BLOCK);
            (0..m).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    parts.into_iter().flatten().collect()
}

fn chi(rng: &mut ChaCha8Rng, k: f64) -> f64 {
    ChiSquared::new(k).expect("positive degrees of freedom").sample(rng).sqrt()
}

/// Exact GUE eigenvalues for the weight e^{−2Nx²} from the tridiagonal model.
pub fn gue_sample(n: usize, count: usize, seed: u64) -> Result<SampleBatch> {
    if n == 0 {
        return invalid("gue_sample needs N ≥ 1");
    }
    let scale = 1.0 / (2.0 * (n as f64).sqrt());
    let samples = parallel_blocks(count, seed, |rng| {
        let mut d: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let mut e: Vec<f64> = (1..n).map(|k| chi(rng, 2.0 * (n - k) as f64) / std::f64::consts::SQRT_2).collect();
        tridiagonal_eigenvalues(&mut d, &mut e);
        d.iter_mut().for_each(|x| *x *= scale);
        d
    });
    Ok(SampleBatch {
        ensemble: EnsembleId::Gue { n, a: (2.0 * n as f64).sqrt() },
        weights: vec![1.0; samples.len()],
        samples,
        seed,
        sweeps: 0,
        acceptance: None,
    })
}

/// Exact LUE eigenvalues for the weight u^{a'−1/2} e^{−4Nu} from the
/// bidiagonal model.
pub fn lue_sample(n: usize, aprime: f64, count: usize, seed: u64) -> Result<SampleBatch> {
    if n == 0 || !(aprime > -0.5) {
        return invalid("lue_sample needs N ≥ 1 and a' − 1/2 > −1");
    }
    // weight λ^{a−N} e^{−λ/2} with a = N + a' − 1/2, then u = λ/(8N)
    let a = n as f64 + aprime - 0.5;
    let scale = 1.0 / (8.0 * n as f64);
    let samples = parallel_blocks(count, seed, |rng| {
        let diag: Vec<f64> = (0..n).map(|k| chi(rng, 2.0 * a - 2.0 * k as f64)).collect();
        let sub: Vec<f64> = (1..n).map(|k| chi(rng, 2.0 * (n - k) as f64)).collect();
        // B Bᵀ for lower bidiagonal B
        let mut d: Vec<f64> =
            (0..n).map(|i| diag[i] * diag[i] + if i > 0 { sub[i - 1] * sub[i - 1] } else { 0.0 }).collect();
        let mut e: Vec<f64> = (1..n).map(|i| sub[i - 1] * diag[i - 1]).collect();
        tridiagonal_eigenvalues(&mut d, &mut e);
        d.iter_mut().for_each(|x| *x = (*x * scale).max(0.0));
        d
    });
    Ok(SampleBatch {
        ensemble: EnsembleId::Lue { n, c: 4.0 * n as f64, aprime },
        weights: vec![1.0; samples.len()],
        samples,
        seed,
        sweeps: 0,
        acceptance: None,
    })
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e`, by implicit QL with Wilkinson shifts; sorted ascending
/// into `d`.
pub fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut Vec<f64>) {
    let n = d.len();
    if n == 0 {
        return;
    }
    e.resize(n, 0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
}

/// Sample mean of a product observable with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: LogValue,
    /// Standard error divided by the mean.
    pub rel_stderr: f64,
    pub samples: usize,
}

const JACKKNIFE_BLOCKS: usize = 100;

/// Mean of Π_l f(x_l) with a blocked jackknife error. `log_f` returns ln|f|
/// (−∞ for zeros).
pub fn mc_average(batch: &SampleBatch, log_f: &(dyn Fn(f64) -> f64 + Sync)) -> Result<McEstimate> {
    if batch.is_empty() {
        return invalid("empty sample batch");
    }
    let logs: Vec<f64> = batch
        .samples
        .par_iter()
        .zip(batch.weights.par_iter())
        .map(|(s, w)| s.iter().map(|x| log_f(*x)).sum::<f64>() + w.ln())
        .collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Ok(McEstimate { mean: LogValue::ZERO, rel_stderr: 0.0, samples: logs.len() });
    }
    if !top.is_finite() {
        return Err(FhError::Numerical("observable not finite on the sample".into()));
    }
    let vals: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let m = vals.len();
    let nb = JACKKNIFE_BLOCKS.min(m);
    let mut sums = vec![0.0; nb];
    let mut counts = vec![0usize; nb];
    for (i, v) in vals.iter().enumerate() {
        let b = i * nb / m;
        sums[b] += v;
        counts[b] += 1;
    }
    let total: f64 = sums.iter().sum();
    let mean = total / m as f64;
    let loo: Vec<f64> = (0..nb).map(|b| (total - sums[b]) / (m - counts[b]).max(1) as f64).collect();
    let loo_mean = loo.iter().sum::<f64>() / nb as f64;
    let var = if nb > 1 {
        (nb - 1) as f64 / nb as f64 * loo.iter().map(|x| (x - loo_mean).powi(2)).sum::<f64>()
    } else {
        0.0
    };
    Ok(McEstimate { mean: LogValue::from_log(mean.ln() + top), rel_stderr: var.sqrt() / mean, samples: m })
}

/// Distribution of A = Σ_j a(x_j) over a batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearStatistic {
    pub values: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl LinearStatistic {
    /// Jarque–Bera statistic and its asymptotic χ²₂ p-value.
    pub fn jarque_bera(&self) -> (f64, f64) {
        let m = self.values.len() as f64;
        let sd = self.variance.sqrt();
        if sd == 0.0 {
            return (f64::INFINITY, 0.0);
        }
        let (mut s3, mut s4) = (0.0, 0.0);
        for v in &self.values {
            let z = (v - self.mean) / sd;
            s3 += z.powi(3);
            s4 += z.powi(4);
        }
        let skew = s3 / m;
        let kurt = s4 / m - 3.0;
        let jb = m / 6.0 * (skew * skew + kurt * kurt / 4.0);
        (jb, (-jb / 2.0).exp())
    }
}

pub fn linear_statistic_histogram(
    batch: &SampleBatch,
    a: &(dyn Fn(f64) -> f64 + Sync),
    bins: usize,
) -> LinearStatistic {
    let values: Vec<f64> = batch.samples.par_iter().map(|s| s.iter().map(|x| a(*x)).sum()).collect();
    let m = values.len().max(1) as f64;
    let mean = values.iter().sum::<f64>() / m;
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let bins = bins.max(1);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
    let mut counts = vec![0usize; bins];
    for v in &values {
        let i = (((v - lo) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    LinearStatistic { values, mean, variance, edges, counts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::CoefficientTable;

    #[test]
    fn tridiagonal_eigen_small() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3
        let mut d = vec![2.0, 2.0];
        let mut e = vec![1.0];
        tridiagonal_eigenvalues(&mut d, &mut e);
        assert!((d[0] - 1.0).abs() < 1e-14 && (d[1] - 3.0).abs() < 1e-14);
        // path-graph Laplacian-like matrix 2 on diagonal, −1 off: 2 − 2cos(kπ/(n+1))
        let n = 12;
        let mut d = vec![2.0; n];
        let mut e = vec![-1.0; n - 1];
        tridiagonal_eigenvalues(&mut d, &mut e);
        for (k, v) in d.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn trivial_group_averages() {
        let one = CoefficientTable::from_real_fn(16, |k| if k == 0 { 1.0 } else { 0.0 });
        for id in [
            EnsembleId::Unitary { n: 3 },
            EnsembleId::Symplectic { n: 3 },
            EnsembleId::OplusEven { n: 3 },
            EnsembleId::OplusOdd { n: 3 },
            EnsembleId::OminusOdd { n: 3 },
        ] {
            let d = group_average(id, &one, PrecisionContext::double()).unwrap();
            assert!(d.log_modulus.abs() < 1e-14, "{id:?}");
        }
    }

    #[test]
    fn observable_one() {
        let b = gue_sample(3, 10, 1).unwrap();
        let est = mc_average(&b, &|_| 0.0).unwrap();
        assert!(est.mean.log_modulus.abs() < 1e-14);
        assert_eq!(est.rel_stderr, 0.0);
    }

    #[test]
    fn gue_single_eigenvalue_variance() {
        let b = gue_sample(1, 20000, 7).unwrap();
        let m = b.samples.iter().map(|s| s[0] * s[0]).sum::<f64>() / b.len() as f64;
        assert!((m - 0.25).abs() < 0.01, "{m}");
    }

    #[test]
    fn batches_reproducible() {
        let a = lue_sample(4, 1.0, 3000, 11).unwrap();
        let b = lue_sample(4, 1.0, 3000, 11).unwrap();
        assert_eq!(a, b);
        let c = cbeta_sample(6, 2.0, ChainOptions { sweeps: 400, thin: 3, seed: 5 }).unwrap();
        let d = cbeta_sample(6, 2.0, ChainOptions { sweeps: 400, thin: 3, seed: 5 }).unwrap();
        assert_eq!(c, d);
        assert_eq!(c.len(), 100);
    }
}
