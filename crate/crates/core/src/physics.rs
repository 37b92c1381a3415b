//! Ising spin–spin correlators and impenetrable Bose gas density matrices.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::determinants::quadrature::GaussLegendre;
use crate::determinants::{hankel_logdet, weighted_moments, LogDet, MomentProblem, Weight};
use crate::ensembles::{group_average, EnsembleId};
use crate::error::{domain, invalid, FhError, Result};
use crate::precision::PrecisionContext;
use crate::specfun::{ln_gamma, ln_gaussian_norm_real, ln_laguerre_norm_real, log_barnes_g};
use crate::symbols::{
    classify_row, ising_hight_transformed_symbol, ising_row_symbol_spec, symbol_fourier, FHSymbol, FourierSeries,
    IsingParams, IsingRegime, Singularity, DEFAULT_SMOOTH_ORDER,
};

/// Couplings (K₁, K₂) of the anisotropic square-lattice Ising model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsingPoint {
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "K2")]
    pub k2: f64,
}

impl IsingPoint {
    pub fn new(k1: f64, k2: f64) -> Result<IsingPoint> {
        IsingParams::from_couplings(k1, k2)?;
        Ok(IsingPoint { k1, k2 })
    }

    pub fn params(&self) -> Result<IsingParams> {
        IsingParams::from_couplings(self.k1, self.k2)
    }

    pub fn regime(&self) -> Result<IsingRegime> {
        Ok(self.params()?.regime())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// ⟨σ₀₀σ_{nn}⟩
    Diagonal,
    /// ⟨σ₀₀σ_{0n}⟩
    Row,
}

const PHASE_TOL: f64 = 1e-6;

fn real_from_logdet(d: LogDet) -> Result<f64> {
    let ph = d.phase.abs();
    let sign = if ph < PHASE_TOL {
        1.0
    } else if (ph - PI).abs() < PHASE_TOL {
        -1.0
    } else {
        return Err(FhError::Numerical(format!("correlator has phase {} (expected real)", d.phase)));
    };
    Ok(sign * d.log_modulus.exp())
}

fn toeplitz_of_spec(spec: &crate::symbols::SymbolSpec, n: usize, ctx: PrecisionContext) -> Result<LogDet> {
    let sym = spec.build(DEFAULT_SMOOTH_ORDER.max(2 * n))?;
    let tab = symbol_fourier(&sym, n)?;
    group_average(EnsembleId::Unitary { n }, &tab, ctx)
}

/// D_n of the row symbol. In the high-temperature regime the symbol winds and
/// D_n is exponentially small against its entries, so the determinant is taken
/// of the contour-shifted symbol instead: its coefficients are α₂^p times the
/// original ones, a diagonal similarity that leaves D_n unchanged.
pub fn ising_row_logdet(alpha1: f64, alpha2: f64, n: usize, ctx: PrecisionContext) -> Result<LogDet> {
    if n == 0 {
        return invalid("correlator distance must be at least 1");
    }
    if classify_row(alpha1, alpha2) == IsingRegime::HighT && alpha1 >= 0.0 {
        let (spec, _) = ising_hight_transformed_symbol(alpha1, alpha2)?;
        return toeplitz_of_spec(&spec, n, ctx);
    }
    toeplitz_of_spec(&ising_row_symbol_spec(alpha1, alpha2)?, n, ctx)
}

/// Row correlator D_n of the symbol with free parameters (α₁, α₂).
pub fn ising_row_correlation(alpha1: f64, alpha2: f64, n: usize, ctx: PrecisionContext) -> Result<f64> {
    real_from_logdet(ising_row_logdet(alpha1, alpha2, n, ctx)?)
}

/// Diagonal correlator D_n of the symbol with modulus k.
pub fn ising_diagonal_correlation(k: f64, n: usize, ctx: PrecisionContext) -> Result<f64> {
    if !(k > 0.0) {
        return domain(format!("diagonal symbol needs k > 0, got {k}"));
    }
    ising_row_correlation(0.0, 1.0 / k, n, ctx)
}

pub fn ising_correlation(point: &IsingPoint, direction: Direction, n: usize, ctx: PrecisionContext) -> Result<f64> {
    let p = point.params()?;
    match direction {
        Direction::Diagonal => ising_diagonal_correlation(p.k, n, ctx),
        Direction::Row => ising_row_correlation(p.alpha1, p.alpha2, n, ctx),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    /// Periodic, circumference L.
    Circle,
    /// Interval [0, L], Dirichlet at both ends.
    Dirichlet,
    /// Interval [0, L], Neumann at both ends.
    Neumann,
    /// Interval [0, L], Dirichlet at 0 and Neumann at L.
    Mixed,
    /// Harmonic trap; x = √(2N) X.
    Harmonic,
    /// Half line with |x|^{a'} repulsion at the wall; x = 2√N X.
    HalfLine,
}

/// Density matrix ρ_{N+1}(x; y) for N+1 particles. Positions are scaled:
/// x = LX on the circle and intervals, x = √(2N)X in the harmonic trap,
/// x = 2√N X on the half line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrixSpec {
    pub geometry: Geometry,
    /// Number of particles minus one.
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "Y")]
    pub y: f64,
    #[serde(default)]
    pub aprime: f64,
    #[serde(default = "unit_length")]
    pub length: f64,
}

fn unit_length() -> f64 {
    1.0
}

impl DensityMatrixSpec {
    pub fn new(geometry: Geometry, n: usize, x: f64, y: f64) -> DensityMatrixSpec {
        DensityMatrixSpec { geometry, n, x, y, aprime: 0.0, length: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) || !self.x.is_finite() || !self.y.is_finite() {
            return invalid(format!("bad density matrix spec {self:?}"));
        }
        let inside = |v: f64, lo: f64, hi: f64| v > lo && v < hi;
        let ok = match self.geometry {
            Geometry::Circle => true,
            Geometry::Dirichlet | Geometry::Neumann | Geometry::Mixed => {
                inside(self.x, 0.0, 1.0) && inside(self.y, 0.0, 1.0)
            }
            Geometry::Harmonic => self.n >= 1,
            Geometry::HalfLine => self.n >= 1 && self.x > 0.0 && self.y > 0.0 && self.aprime > -0.5,
        };
        if ok {
            Ok(())
        } else {
            domain(format!("positions outside the {:?} domain: {self:?}", self.geometry))
        }
    }
}

/// Coincident positions are merged into one singularity of doubled strength.
fn merge_points(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for &(t, a) in points {
        if let Some(p) = out.iter_mut().find(|p| (p.0 - t).abs() < 1e-14) {
            p.1 += a;
        } else {
            out.push((t, a));
        }
    }
    out
}

fn pure_fh(points: &[(f64, f64)]) -> Result<FHSymbol> {
    let sings = merge_points(points).into_iter().map(|(t, a)| Singularity::new(t, a, 0.0)).collect();
    FHSymbol::new(FourierSeries::zero(1), sings)
}

fn wrap_angle(t: f64) -> f64 {
    let w = t.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Exact finite-N density matrix.
pub fn bose_density_matrix(spec: &DensityMatrixSpec, ctx: PrecisionContext) -> Result<f64> {
    spec.validate()?;
    let n = spec.n;
    let l = spec.length;
    let (x, y) = (spec.x, spec.y);
    match spec.geometry {
        Geometry::Circle => {
            let sym = pure_fh(&[(0.0, 0.5), (wrap_angle(2.0 * PI * (x - y)), 0.5)])?;
            let tab = symbol_fourier(&sym, n.max(1))?;
            let d = group_average(EnsembleId::Unitary { n }, &tab, ctx)?;
            Ok(real_from_logdet(d)? / l)
        }
        Geometry::Dirichlet | Geometry::Neumann | Geometry::Mixed => {
            let (px, py) = (PI * x, PI * y);
            let sym = pure_fh(&[(px, 0.5), (-px, 0.5), (py, 0.5), (-py, 0.5)])?;
            let tab = symbol_fourier(&sym, 2 * n + 2)?;
            let (id, pref) = match spec.geometry {
                Geometry::Dirichlet => (EnsembleId::Symplectic { n }, 2.0 / l * px.sin() * py.sin()),
                Geometry::Neumann => (EnsembleId::OplusEven { n }, 0.5 / l),
                _ => (EnsembleId::OplusOdd { n }, 2.0 / l * (0.5 * px).sin() * (0.5 * py).sin()),
            };
            Ok(pref * real_from_logdet(group_average(id, &tab, ctx)?)?)
        }
        Geometry::Harmonic => {
            let nf = n as f64;
            let a = (2.0 * nf).sqrt();
            let avg = charge_average(Weight::Gauss { a }, &[x, y], n, ctx)?;
            let log =
                (nf + 1.0).ln() - 0.5 * (2.0 * nf).ln() - nf * (x * x + y * y) + avg + ln_gaussian_norm_real(nf, a)
                    - ln_gaussian_norm_real(nf + 1.0, a);
            Ok(log.exp())
        }
        Geometry::HalfLine => {
            let nf = n as f64;
            let ap = spec.aprime;
            let avg = charge_average(Weight::Laguerre { c: 4.0 * nf, aprime: ap }, &[x * x, y * y], n, ctx)?;
            // L_M[1] = 2^{−M} × (the same integral in u = x²)
            let ln_l = |m: f64| -m * LN_2 + ln_laguerre_norm_real(m, 4.0 * nf, ap);
            let log = (nf + 1.0).ln() - 0.5 * (4.0 * nf).ln() - 2.0 * nf * (x * x + y * y)
                + ap * (x * y).ln()
                + avg
                + ln_l(nf)
                - ln_l(nf + 1.0);
            Ok(log.exp())
        }
    }
}

/// ln⟨Π_l |x_l − p₁||x_l − p₂|⟩ over the N-point ensemble of `weight`.
fn charge_average(weight: Weight, positions: &[f64], n: usize, ctx: PrecisionContext) -> Result<f64> {
    let mut prob = MomentProblem::new(weight);
    for (y, q) in merge_points(&positions.iter().map(|&p| (p, 0.5)).collect::<Vec<_>>()) {
        prob = prob.with_charge(y, q);
    }
    let kmax = 2 * n - 2;
    let num = hankel_logdet(&weighted_moments(&prob, kmax, ctx)?, n, ctx)?;
    let den = hankel_logdet(&weighted_moments(&MomentProblem::new(weight), kmax, ctx)?, n, ctx)?;
    Ok(num.log_modulus - den.log_modulus)
}

fn g32_fourth() -> f64 {
    (4.0 * log_barnes_g(1.5).expect("G(3/2)").log_modulus).exp()
}

/// Large-N form of the density matrix, with bulk density (N+1)/L on the
/// circle and intervals. Harmonic and half-line values are in the same
/// units as [`bose_density_matrix`].
pub fn bose_density_matrix_asymptotic(spec: &DensityMatrixSpec) -> Result<f64> {
    spec.validate()?;
    let nf = spec.n as f64;
    let rho0 = (nf + 1.0) / spec.length;
    let g4 = g32_fourth();
    let (x, y) = (spec.x, spec.y);
    match spec.geometry {
        Geometry::Circle => {
            let s = (PI * (x - y)).sin().abs();
            if s == 0.0 {
                return domain("diagonal of the circle density matrix has no singular asymptotic form");
            }
            Ok(rho0 * g4 / (2.0 * PI).sqrt() * (PI / (nf * s)).sqrt())
        }
        Geometry::Dirichlet | Geometry::Neumann | Geometry::Mixed => {
            let u = 0.5 * (1.0 + (PI * x).cos());
            let v = 0.5 * (1.0 + (PI * y).cos());
            if u == v {
                return domain("coincident points");
            }
            Ok(rho0 * g4 / (2.0 * nf).sqrt() * (u * (1.0 - u) * v * (1.0 - v)).powf(0.125) / (u - v).abs().sqrt())
        }
        Geometry::Harmonic => {
            if x == y || x.abs() >= 1.0 || y.abs() >= 1.0 {
                return domain("harmonic asymptotic form needs distinct points inside (−1, 1)");
            }
            let scaled = nf.sqrt() * g4 / PI * ((1.0 - x * x) * (1.0 - y * y)).powf(0.125) / (x - y).abs().sqrt();
            Ok(scaled / (2.0 * nf).sqrt())
        }
        Geometry::HalfLine => Ok(lue_density_matrix_asymptotic(x, y, spec.n)? / (2.0 * nf.sqrt())),
    }
}

/// 2√N ρ^L(2√N X, 2√N Y) for large N:
/// 2√N G⁴(3/2)/π (XY)^{1/4} |X² − Y²|^{−1/2} (1 − X²)^{1/8} (1 − Y²)^{1/8}.
pub fn lue_density_matrix_asymptotic(x: f64, y: f64, n: usize) -> Result<f64> {
    if !(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0) {
        return domain(format!("need 0 < X, Y < 1, got {x}, {y}"));
    }
    if x == y {
        return domain("diagonal X = Y is excluded");
    }
    let nf = n as f64;
    Ok(2.0 * nf.sqrt() * g32_fourth() / PI * (x * y).powf(0.25) / (x * x - y * y).abs().sqrt()
        * ((1.0 - x * x) * (1.0 - y * y)).powf(0.125))
}

/// Factor √N G⁴(3/2)/π relating the occupations λ_j of the half-line gas to
/// the eigenvalues λ̄_j of the scaled kernel.
pub fn lue_occupation_scale(n: usize) -> f64 {
    (n as f64).sqrt() * g32_fourth() / PI
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lambda0Source {
    Exact,
    Asymptotic,
}

/// Gauss–Legendre panels for the λ₀ quadrature in t with X = t².
const LAMBDA0_PANELS: usize = 6;
const LAMBDA0_ORDER: usize = 16;

/// Occupation of the zero-momentum state, λ₀ = L∫₀¹ρ(LX; 0)dX, on the circle.
/// The integrand is symmetric about X = 1/2 and integrated on [0, 1/2] after
/// X = t².
pub fn bose_lambda0(geometry: Geometry, n: usize, source: Lambda0Source, ctx: PrecisionContext) -> Result<f64> {
    if geometry != Geometry::Circle {
        return invalid(format!("λ₀ is defined here for the circle only, not {geometry:?}"));
    }
    if n < 2 {
        return invalid("λ₀ needs N ≥ 2");
    }
    let rule = GaussLegendre::<f64>::new(LAMBDA0_ORDER);
    let tmax = 0.5f64.sqrt();
    let h = tmax / LAMBDA0_PANELS as f64;
    let mut total = 0.0;
    for p in 0..LAMBDA0_PANELS {
        let (lo, hi) = (p as f64 * h, (p + 1) as f64 * h);
        for (node, w) in rule.nodes.iter().zip(&rule.weights) {
            let t = 0.5 * (lo + hi) + 0.5 * (hi - lo) * node;
            let x = t * t;
            let spec = DensityMatrixSpec::new(Geometry::Circle, n, x, 0.0);
            let rho = match source {
                Lambda0Source::Exact => bose_density_matrix(&spec, ctx)?,
                Lambda0Source::Asymptotic => bose_density_matrix_asymptotic(&spec)?,
            };
            total += 0.5 * (hi - lo) * w * rho * 2.0 * t;
        }
    }
    Ok(2.0 * total)
}

/// Closed form of the asymptotic λ₀: (N+1) G⁴(3/2)/√(2N) · Γ(1/4)/(√π Γ(3/4)).
pub fn bose_lambda0_asymptotic_closed(n: usize) -> f64 {
    let nf = n as f64;
    let sin_integral = (ln_gamma(0.25) - 0.5 * PI.ln() - ln_gamma(0.75)).exp();
    (nf + 1.0) * g32_fourth() / (2.0 * nf).sqrt() * sin_integral
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::log_barnes_g;

    fn ctx() -> PrecisionContext {
        PrecisionContext::double()
    }

    #[test]
    fn diagonal_n1_is_zeroth_coefficient() {
        for &k in &[0.6, 1.7] {
            let m = 4096;
            let a0: f64 = (0..m)
                .map(|j| {
                    let th = -PI + 2.0 * PI * (j as f64 + 0.5) / m as f64;
                    crate::symbols::ising_row_symbol_value(0.0, 1.0 / k, th).re
                })
                .sum::<f64>()
                / m as f64;
            let v = ising_diagonal_correlation(k, 1, ctx()).unwrap();
            assert!((v - a0).abs() < 1e-10, "k={k}: {v} vs {a0}");
        }
    }

    #[test]
    fn row_degenerates_to_diagonal() {
        for &k in &[0.5, 0.8, 1.4] {
            for n in 1..=8 {
                let d = ising_diagonal_correlation(k, n, ctx()).unwrap();
                let r = ising_row_correlation(0.0, 1.0 / k, n, ctx()).unwrap();
                assert!((d - r).abs() < 1e-13, "k={k} n={n}");
            }
        }
    }

    #[test]
    fn critical_row_amplitude() {
        let v = ising_row_correlation(0.3, 1.0, 64, ctx()).unwrap();
        let g = log_barnes_g(0.5).unwrap().value();
        let target = (1.3f64 / 0.7).powf(0.25) * PI.sqrt() * g * g;
        assert!((64f64.powf(0.25) * v / target - 1.0).abs() < 0.02);
    }

    #[test]
    fn diagonal_high_t_is_monotone() {
        for &(k1, k2) in &[(0.2, 0.3), (0.3, 0.25), (0.1, 0.4)] {
            let p = IsingPoint::new(k1, k2).unwrap();
            let mut prev = f64::INFINITY;
            for n in 1..=12 {
                let v = ising_correlation(&p, Direction::Diagonal, n, ctx()).unwrap();
                assert!(v > 0.0 && v < prev, "({k1},{k2}) n={n}: {v}");
                prev = v;
            }
        }
    }

    #[test]
    fn circle_diagonal_is_density() {
        let spec = DensityMatrixSpec { length: 2.0, ..DensityMatrixSpec::new(Geometry::Circle, 8, 0.3, 0.3) };
        let v = bose_density_matrix(&spec, ctx()).unwrap();
        assert!((v - 9.0 / 2.0).abs() < 1e-6 * 4.5, "{v}");
    }

    #[test]
    fn circle_small_n_quadrature() {
        // N = 1: (1/2π)∫|2 sin(πX − θ/2)||2 sin(θ/2)|dθ
        let x = 0.5;
        let m = 20000;
        let q: f64 = (0..m)
            .map(|j| {
                let th = -PI + 2.0 * PI * (j as f64 + 0.5) / m as f64;
                (2.0 * (PI * x - th / 2.0).sin()).abs() * (2.0 * (th / 2.0).sin()).abs()
            })
            .sum::<f64>()
            / m as f64;
        let v = bose_density_matrix(&DensityMatrixSpec::new(Geometry::Circle, 1, x, 0.0), ctx()).unwrap();
        assert!((v - q).abs() < 1e-6, "{v} vs {q}");
    }

    #[test]
    fn symmetric_in_positions() {
        for g in [Geometry::Circle, Geometry::Dirichlet, Geometry::Neumann, Geometry::Mixed] {
            let a = bose_density_matrix(&DensityMatrixSpec::new(g, 6, 0.2, 0.55), ctx()).unwrap();
            let b = bose_density_matrix(&DensityMatrixSpec::new(g, 6, 0.55, 0.2), ctx()).unwrap();
            assert!(a > 0.0 && (a - b).abs() < 1e-12 * a, "{g:?}");
        }
        let ext = PrecisionContext::extended();
        for g in [Geometry::Harmonic, Geometry::HalfLine] {
            let s = DensityMatrixSpec { aprime: 1.0, ..DensityMatrixSpec::new(g, 4, 0.2, 0.55) };
            let t = DensityMatrixSpec { x: 0.55, y: 0.2, ..s };
            let a = bose_density_matrix(&s, ext).unwrap();
            let b = bose_density_matrix(&t, ext).unwrap();
            assert!(a > 0.0 && (a - b).abs() < 1e-10 * a, "{g:?}");
        }
    }

    #[test]
    fn interval_diagonals_integrate_to_particle_number() {
        for g in [Geometry::Dirichlet, Geometry::Neumann, Geometry::Mixed] {
            let m = 400;
            let s: f64 = (0..m)
                .map(|j| {
                    let x = (j as f64 + 0.5) / m as f64;
                    bose_density_matrix(&DensityMatrixSpec::new(g, 2, x, x), ctx()).unwrap()
                })
                .sum::<f64>()
                / m as f64;
            assert!((s - 3.0).abs() < 1e-3, "{g:?}: {s}");
        }
    }

    #[test]
    fn trap_diagonals_integrate_to_particle_number() {
        let ext = PrecisionContext::extended();
        let rule = GaussLegendre::<f64>::new(80);
        for (g, lo, hi) in [(Geometry::Harmonic, -2.5, 2.5), (Geometry::HalfLine, 1e-9, 2.5)] {
            let n = 2usize;
            let scale = if g == Geometry::Harmonic { (2.0 * n as f64).sqrt() } else { 2.0 * (n as f64).sqrt() };
            let mut s = 0.0;
            for (t, w) in rule.nodes.iter().zip(&rule.weights) {
                let x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t;
                let spec = DensityMatrixSpec { aprime: 1.0, ..DensityMatrixSpec::new(g, n, x, x) };
                s += 0.5 * (hi - lo) * w * scale * bose_density_matrix(&spec, ext).unwrap();
            }
            assert!((s - 3.0).abs() < 1e-6, "{g:?}: {s}");
        }
    }

    #[test]
    fn product_identity_at_n2() {
        let (x, y) = (0.3, 0.65);
        let n = 2;
        let rn = bose_density_matrix(&DensityMatrixSpec::new(Geometry::Neumann, n + 1, x, y), ctx()).unwrap();
        let rd = bose_density_matrix(&DensityMatrixSpec::new(Geometry::Dirichlet, n, x, y), ctx()).unwrap();
        let sym = pure_fh(&[(PI * x, 0.5), (-PI * x, 0.5), (PI * y, 0.5), (-PI * y, 0.5)]).unwrap();
        let tab = symbol_fourier(&sym, 2 * n + 2).unwrap();
        let u = real_from_logdet(group_average(EnsembleId::Unitary { n: 2 * n + 1 }, &tab, ctx()).unwrap()).unwrap();
        let lhs = (PI * x).sin() * (PI * y).sin() * u;
        assert!((lhs - rn * rd).abs() < 1e-12 * lhs, "{lhs} vs {}", rn * rd);
    }

    #[test]
    fn mixed_matches_asymptotic_form() {
        let spec = DensityMatrixSpec::new(Geometry::Mixed, 64, 0.35, 0.65);
        let e = bose_density_matrix(&spec, ctx()).unwrap();
        let a = bose_density_matrix_asymptotic(&spec).unwrap();
        assert!((e / a - 1.0).abs() < 0.05, "{}", e / a);
    }

    #[test]
    fn lue_asymptotic_symmetric() {
        let a = lue_density_matrix_asymptotic(0.3, 0.6, 50).unwrap();
        let b = lue_density_matrix_asymptotic(0.6, 0.3, 50).unwrap();
        assert_eq!(a, b);
        assert!(lue_density_matrix_asymptotic(0.4, 0.4, 50).is_err());
    }

    #[test]
    fn lambda0_asymptotic_quadrature_matches_closed_form() {
        for n in [16, 64] {
            let q = bose_lambda0(Geometry::Circle, n, Lambda0Source::Asymptotic, ctx()).unwrap();
            let c = bose_lambda0_asymptotic_closed(n);
            assert!((q / c - 1.0).abs() < 1e-6, "{q} vs {c}");
        }
    }
}
