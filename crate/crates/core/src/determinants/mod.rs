//! Exact finite-size determinants: Toeplitz, Toeplitz±Hankel and moment
//! Hankel, at either precision tier.

pub mod linalg;
pub mod moments;
pub mod quadrature;

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

pub use linalg::{lu_logdet, LogDet, Matrix};
pub use moments::{hankel_logdet, weighted_moments, MomentProblem, MomentTable, Multiplier, PointCharge, Weight};

use crate::error::{invalid, Result};
use crate::precision::{Dd, PrecisionContext, Real, Tier};
use crate::symbols::CoefficientTable;

const EVEN_TOL: f64 = 1e-12;

fn logdet_from_entries(
    n: usize,
    entry: impl Fn(usize, usize) -> Complex64,
    ctx: PrecisionContext,
    real: bool,
) -> LogDet {
    match (real, ctx.tier) {
        (true, Tier::Double) => lu_logdet(&Matrix::from_fn(n, |j, k| entry(j, k).re), ctx.pivoting),
        (true, Tier::Extended) => lu_logdet(&Matrix::from_fn(n, |j, k| Dd::from_f64(entry(j, k).re)), ctx.pivoting),
        (false, Tier::Double) => lu_logdet(&Matrix::from_fn(n, &entry), ctx.pivoting),
        (false, Tier::Extended) => lu_logdet(
            &Matrix::from_fn(n, |j, k| {
                let z = entry(j, k);
                Complex::new(Dd::from_f64(z.re), Dd::from_f64(z.im))
            }),
            ctx.pivoting,
        ),
    }
}

/// det[g_{j−k}]_{j,k<n}.
pub fn toeplitz_logdet(g: &CoefficientTable, n: usize, ctx: PrecisionContext) -> Result<LogDet> {
    if n == 0 {
        return Ok(LogDet::ONE);
    }
    if !g.covers(n - 1) {
        return invalid(format!("coefficient table |k| ≤ {} too short for size {n}", g.kmax));
    }
    let real = g.is_real(0.0);
    Ok(logdet_from_entries(n, |j, k| g.get(j as i64 - k as i64), ctx, real))
}

/// The four Toeplitz±Hankel structures attached to the classical groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThVariant {
    /// det[g_{j−k} − g_{j+k+1}]: O⁺(2N+1).
    OplusOdd,
    /// det[g_{j−k} + g_{j+k+1}]: O⁻(2N+1).
    OminusOdd,
    /// det[g_{j−k} + g_{j+k}]: twice the O⁺(2N) average.
    OplusEven,
    /// det[g_{j−k} − g_{j+k+2}]: Sp(N).
    Sp,
}

impl ThVariant {
    fn shift_sign(self) -> (i64, f64) {
        match self {
            ThVariant::OplusOdd => (1, -1.0),
            ThVariant::OminusOdd => (1, 1.0),
            ThVariant::OplusEven => (0, 1.0),
            ThVariant::Sp => (2, -1.0),
        }
    }
}

/// N×N Toeplitz±Hankel determinant of an even symbol.
pub fn toeplitz_hankel_logdet(
    variant: ThVariant,
    g: &CoefficientTable,
    n: usize,
    ctx: PrecisionContext,
) -> Result<LogDet> {
    if !g.is_even(EVEN_TOL) {
        return invalid("Toeplitz±Hankel determinant needs an even symbol (g_k = g_{-k})");
    }
    if n == 0 {
        return Ok(LogDet::ONE);
    }
    let (shift, sign) = variant.shift_sign();
    let need = 2 * (n - 1) + shift as usize;
    if !g.covers(need) {
        return invalid(format!("coefficient table |k| ≤ {} too short, need {need}", g.kmax));
    }
    let real = g.is_real(0.0);
    let entry = |j: usize, k: usize| {
        let (j, k) = (j as i64, k as i64);
        g.get(j - k) + g.get(j + k + shift) * sign
    };
    Ok(logdet_from_entries(n, entry, ctx, real))
}

/// Generic dense determinant of real entries at the context's tier.
pub fn dense_logdet_real(n: usize, entry: impl Fn(usize, usize) -> f64, ctx: PrecisionContext) -> LogDet {
    logdet_from_entries(n, |j, k| Complex64::new(entry(j, k), 0.0), ctx, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial_table(kmax: usize) -> CoefficientTable {
        // |1 + e^{iθ}|²
        CoefficientTable::from_real_fn(kmax, |k| match k {
            0 => 2.0,
            1 | -1 => 1.0,
            _ => 0.0,
        })
    }

    #[test]
    fn identity_and_tridiagonal() {
        let id = CoefficientTable::from_real_fn(4, |k| if k == 0 { 1.0 } else { 0.0 });
        assert_eq!(toeplitz_logdet(&id, 5, PrecisionContext::double()).unwrap().log_modulus, 0.0);
        let t = binomial_table(8);
        for n in 1..8 {
            let d = toeplitz_logdet(&t, n, PrecisionContext::double()).unwrap();
            assert!((d.real_value() - (n + 1) as f64).abs() < 1e-12);
            let d = toeplitz_logdet(&t, n, PrecisionContext::extended()).unwrap();
            assert!((d.real_value() - (n + 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn th_identity_symbol() {
        let id = CoefficientTable::from_real_fn(8, |k| if k == 0 { 1.0 } else { 0.0 });
        let d = toeplitz_hankel_logdet(ThVariant::OminusOdd, &id, 3, PrecisionContext::double()).unwrap();
        assert_eq!(d.log_modulus, 0.0);
        // O⁺(2N) of the trivial symbol: det = 2, average 1
        let d = toeplitz_hankel_logdet(ThVariant::OplusEven, &id, 3, PrecisionContext::double()).unwrap();
        assert!((d.real_value() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn odd_table_rejected() {
        let t = CoefficientTable::from_real_fn(8, |k| {
            if k == 1 {
                1.0
            } else if k == 0 {
                2.0
            } else {
                0.0
            }
        });
        assert!(toeplitz_hankel_logdet(ThVariant::Sp, &t, 2, PrecisionContext::double()).is_err());
    }

    #[test]
    fn short_table_rejected() {
        let t = binomial_table(2);
        assert!(toeplitz_logdet(&t, 4, PrecisionContext::double()).is_err());
        assert!(toeplitz_hankel_logdet(ThVariant::Sp, &t, 2, PrecisionContext::double()).is_err());
    }
}
