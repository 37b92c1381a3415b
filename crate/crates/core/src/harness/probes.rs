//! Factorization probes: ratio of a multi-charge average to the product of
//! its one-charge pieces, as a function of size.

use serde::{Deserialize, Serialize};

use crate::determinants::{hankel_logdet, toeplitz_logdet, weighted_moments, MomentProblem, PointCharge, Weight};
use crate::ensembles::{cbeta_sample, mc_average, ChainOptions};
use crate::error::{domain, invalid, Result};
use crate::precision::PrecisionContext;
use crate::specfun::{ln_cbeta_charge_average, ln_cbeta_norm_real, ln_gaussian_norm_real, ln_laguerre_norm_real};
use crate::symbols::{symbol_fourier, szego_sum, FHSymbol, FourierSeries, Singularity, SmoothSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    /// Smooth factor splits off a circular average with charges.
    SmoothSplit,
    /// Circular charges split into one-charge averages.
    CircleCharges,
    /// Gaussian-weight charges split into one-charge averages.
    GaussCharges,
    /// Half-line Laguerre charges split into one-charge averages.
    LaguerreCharges,
}

/// Charges are angles φ on the circle and positions y on the line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub probe: ProbeKind,
    #[serde(default = "two")]
    pub beta: f64,
    pub charges: Vec<PointCharge>,
    #[serde(default)]
    pub smooth: SmoothSpec,
    #[serde(default)]
    pub aprime: f64,
}

fn two() -> f64 {
    2.0
}

/// Monte Carlo settings for β ≠ 2 circular probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainBudget {
    pub sweeps: usize,
    pub thin: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub n: usize,
    pub log_ratio: f64,
    pub rel_stderr: Option<f64>,
}

const SMOOTH_ORDER: usize = 64;

impl ProbeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.charges.is_empty() {
            return invalid("a factorization probe needs at least one charge");
        }
        if !(self.beta > 0.0) {
            return domain(format!("β = {} must be positive", self.beta));
        }
        for c in &self.charges {
            if !(c.q * self.beta > -1.0) {
                return domain(format!("charge q = {} is not integrable", c.q));
            }
        }
        if self.probe != ProbeKind::SmoothSplit && self.probe != ProbeKind::CircleCharges && self.beta != 2.0 {
            return domain("line probes are implemented at β = 2 only");
        }
        Ok(())
    }

    fn circle_symbol(&self, smooth: FourierSeries, charges: &[PointCharge]) -> Result<FHSymbol> {
        let sings = charges.iter().map(|c| Singularity::new(c.y, self.beta * c.q / 2.0, 0.0)).collect();
        FHSymbol::new(smooth, sings)
    }
}

fn q_total(charges: &[PointCharge]) -> f64 {
    charges.iter().map(|c| c.q).sum()
}

/// ln⟨Π_l g(θ_l)⟩ over U(n) for a real positive symbol.
fn unitary_log(sym: &FHSymbol, n: usize, ctx: PrecisionContext) -> Result<f64> {
    let tab = symbol_fourier(sym, n.max(1))?;
    Ok(toeplitz_logdet(&tab, n, ctx)?.log_modulus)
}

/// ln of one ratio per n. `budget` is used only for circular probes at β ≠ 2.
pub fn run_factorization_probe(
    spec: &ProbeSpec,
    ns: &[usize],
    ctx: PrecisionContext,
    budget: Option<ChainBudget>,
) -> Result<Vec<ProbeRow>> {
    spec.validate()?;
    ns.iter().map(|&n| probe_point(spec, n, ctx, budget)).collect()
}

fn probe_point(spec: &ProbeSpec, n: usize, ctx: PrecisionContext, budget: Option<ChainBudget>) -> Result<ProbeRow> {
    let nf = n as f64;
    let beta = spec.beta;
    let ch = &spec.charges;
    let q = q_total(ch);
    let row = |log_ratio, rel_stderr| Ok(ProbeRow { n, log_ratio, rel_stderr });
    match spec.probe {
        ProbeKind::SmoothSplit => {
            let smooth = spec.smooth.log_series(SMOOTH_ORDER);
            if !smooth.is_real_function(1e-12) {
                return invalid("smooth factor must be real");
            }
            let point_logs: f64 = ch.iter().map(|c| c.q * smooth.eval(c.y).re).sum();
            // ln Z_{n+Q}[a]/Z_{n+Q}[1] for large n
            let smooth_log = smooth.c0().re * (nf + q) + 2.0 / beta * szego_sum(&smooth).value.re;
            let (with_a, without, err) = if beta == 2.0 {
                let full = unitary_log(&spec.circle_symbol(smooth.clone(), ch)?, n, ctx)?;
                let bare = unitary_log(&spec.circle_symbol(FourierSeries::zero(1), ch)?, n, ctx)?;
                (full, bare, None)
            } else {
                let b = budget.ok_or_else(|| crate::FhError::Invalid("β ≠ 2 needs a Monte Carlo budget".into()))?;
                let batch = cbeta_sample(n, beta, ChainOptions { sweeps: b.sweeps, thin: b.thin, seed: b.seed })?;
                let charge_log = |t: f64| -> f64 {
                    ch.iter().map(|c| beta * c.q * (2.0 * (0.5 * (t - c.y)).sin()).abs().ln()).sum()
                };
                let s2 = smooth.clone();
                let full = mc_average(&batch, &|t| charge_log(t) + s2.eval(t).re)?;
                let bare = mc_average(&batch, &charge_log)?;
                let err = (full.rel_stderr.powi(2) + bare.rel_stderr.powi(2)).sqrt();
                (full.mean.log_modulus, bare.mean.log_modulus, Some(err))
            };
            row(with_a - without + point_logs - smooth_log, err)
        }
        ProbeKind::CircleCharges => {
            let mut cross = 0.0;
            for (i, a) in ch.iter().enumerate() {
                for b in &ch[i + 1..] {
                    cross += beta * a.q * b.q * (2.0 * (0.5 * (a.y - b.y)).sin()).abs().ln();
                }
            }
            let (joint, err) = if beta == 2.0 {
                (unitary_log(&spec.circle_symbol(FourierSeries::zero(1), ch)?, n, ctx)?, None)
            } else {
                let b = budget.ok_or_else(|| crate::FhError::Invalid("β ≠ 2 needs a Monte Carlo budget".into()))?;
                let batch = cbeta_sample(n, beta, ChainOptions { sweeps: b.sweeps, thin: b.thin, seed: b.seed })?;
                let est = mc_average(&batch, &|t| {
                    ch.iter().map(|c| beta * c.q * (2.0 * (0.5 * (t - c.y)).sin()).abs().ln()).sum()
                })?;
                (est.mean.log_modulus, Some(est.rel_stderr))
            };
            let norm = |m: f64| ln_cbeta_norm_real(m, beta);
            let mut lhs = cross + joint + norm(nf) - norm(nf + q);
            for c in ch {
                lhs -= ln_cbeta_charge_average(n as u64, beta, c.q, 0.0)? + norm(nf) - norm(nf + c.q);
            }
            row(lhs, err)
        }
        ProbeKind::GaussCharges => {
            let a = (2.0 * nf).sqrt();
            let w = Weight::Gauss { a };
            let avg = |cs: &[PointCharge]| hankel_average(w, cs, n, ctx);
            let g = |m: f64| ln_gaussian_norm_real(m, a);
            let mut lhs = avg(ch)? + g(nf) - g(nf + q);
            for (i, x) in ch.iter().enumerate() {
                for y in &ch[i + 1..] {
                    lhs += 2.0 * x.q * y.q * (x.y - y.y).abs().ln();
                }
                lhs -= avg(std::slice::from_ref(x))? + g(nf) - g(nf + x.q);
            }
            row(lhs, None)
        }
        ProbeKind::LaguerreCharges => {
            let c = 4.0 * nf;
            let w = Weight::Laguerre { c, aprime: spec.aprime };
            let squared: Vec<PointCharge> = ch.iter().map(|p| PointCharge { y: p.y * p.y, q: p.q }).collect();
            let avg = |cs: &[PointCharge]| hankel_average(w, cs, n, ctx);
            let l = |m: f64| ln_laguerre_norm_real(m, c, spec.aprime);
            let mut lhs = avg(&squared)? + l(nf) - l(nf + q);
            for (i, x) in squared.iter().enumerate() {
                for y in &squared[i + 1..] {
                    lhs += 2.0 * x.q * y.q * (x.y - y.y).abs().ln();
                }
                lhs -= avg(std::slice::from_ref(x))? + l(nf) - l(nf + x.q);
            }
            row(lhs, None)
        }
    }
}

/// ln⟨Π_l Π_r |x_l − y_r|^{2q_r}⟩ over the N-point ensemble of `weight`.
pub fn hankel_average(weight: Weight, charges: &[PointCharge], n: usize, ctx: PrecisionContext) -> Result<f64> {
    let mut p = MomentProblem::new(weight);
    for c in charges {
        p = p.with_charge(c.y, c.q);
    }
    let kmax = 2 * n.max(1) - 2;
    let num = hankel_logdet(&weighted_moments(&p, kmax, ctx)?, n, ctx)?;
    let den = hankel_logdet(&weighted_moments(&MomentProblem::new(weight), kmax, ctx)?, n, ctx)?;
    Ok(num.log_modulus - den.log_modulus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::NamedSmooth;
    use std::f64::consts::PI;

    fn pc(y: f64, q: f64) -> PointCharge {
        PointCharge { y, q }
    }

    #[test]
    fn single_circle_charge_is_exact() {
        let spec = ProbeSpec {
            probe: ProbeKind::CircleCharges,
            beta: 2.0,
            charges: vec![pc(0.7, 0.5)],
            smooth: SmoothSpec::unit(),
            aprime: 0.0,
        };
        for r in run_factorization_probe(&spec, &[4, 9, 16], PrecisionContext::double(), None).unwrap() {
            assert!(r.log_ratio.abs() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn trivial_smooth_factor_is_exact() {
        let spec = ProbeSpec {
            probe: ProbeKind::SmoothSplit,
            beta: 2.0,
            charges: vec![pc(0.0, 0.5), pc(2.0, 0.5)],
            smooth: SmoothSpec::unit(),
            aprime: 0.0,
        };
        for r in run_factorization_probe(&spec, &[5, 12], PrecisionContext::double(), None).unwrap() {
            assert!(r.log_ratio.abs() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn smooth_split_converges() {
        let spec = ProbeSpec {
            probe: ProbeKind::SmoothSplit,
            beta: 2.0,
            charges: vec![pc(1.0, 0.5)],
            smooth: SmoothSpec::Named(NamedSmooth::ExpCos { t: 0.3 }),
            aprime: 0.0,
        };
        let rows = run_factorization_probe(&spec, &[8, 16, 32], PrecisionContext::double(), None).unwrap();
        assert!(rows[2].log_ratio.abs() < rows[0].log_ratio.abs() && rows[2].log_ratio.abs() < 1e-2, "{rows:?}");
    }

    #[test]
    fn circle_pair_drift_shrinks() {
        let spec = ProbeSpec {
            probe: ProbeKind::CircleCharges,
            beta: 2.0,
            charges: vec![pc(0.0, 0.5), pc(PI / 2.0, 0.5)],
            smooth: SmoothSpec::unit(),
            aprime: 0.0,
        };
        let rows = run_factorization_probe(&spec, &[16, 32, 64], PrecisionContext::double(), None).unwrap();
        let d: Vec<f64> = rows.iter().map(|r| r.log_ratio.abs()).collect();
        assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
    }

    #[test]
    fn gauss_pair_trends_to_one() {
        let spec = ProbeSpec {
            probe: ProbeKind::GaussCharges,
            beta: 2.0,
            charges: vec![pc(-0.4, 0.5), pc(0.4, 0.5)],
            smooth: SmoothSpec::unit(),
            aprime: 0.0,
        };
        let rows = run_factorization_probe(&spec, &[6, 10], PrecisionContext::extended(), None).unwrap();
        assert!(rows[1].log_ratio.abs() < rows[0].log_ratio.abs(), "{rows:?}");
    }

    #[test]
    fn laguerre_pair_trends_to_one() {
        let spec = ProbeSpec {
            probe: ProbeKind::LaguerreCharges,
            beta: 2.0,
            charges: vec![pc(0.3, 0.5), pc(0.6, 0.5)],
            smooth: SmoothSpec::unit(),
            aprime: 1.0,
        };
        // oscillates around 1 rather than converging monotonically at these sizes
        let rows = run_factorization_probe(&spec, &[6, 10, 16], PrecisionContext::extended(), None).unwrap();
        assert!(rows.iter().all(|r| r.log_ratio.abs() < 0.05), "{rows:?}");
    }
}
