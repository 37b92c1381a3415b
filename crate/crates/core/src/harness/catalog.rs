//! Builtin cases. Each can be dumped to a JSON file and fed back through `--config`.

use std::f64::consts::PI;

use super::{CaseKind, CaseSpec, Criteria, IsingRoute, McBudget, ProbeKind, ProbeSpec};
use crate::determinants::{PointCharge, ThVariant};
use crate::ensembles::EvenSymbol;
use crate::physics::{DensityMatrixSpec, Geometry};
use crate::precision::Tier;
use crate::symbols::{NamedSmooth, Singularity, SmoothSpec, SymbolSpec};

const MC_SEED: u64 = 20_240_917;

fn case(id: &str, formula: &str, description: &str, setup: CaseKind, n: &[usize], tolerance: f64) -> CaseSpec {
    CaseSpec {
        id: id.into(),
        formula: formula.into(),
        description: description.into(),
        setup,
        n: n.to_vec(),
        precision: None,
        mc: None,
        tolerance,
        criteria: Criteria::default(),
    }
}

fn extended(mut c: CaseSpec) -> CaseSpec {
    c.precision = Some(Tier::Extended);
    c
}

fn decreasing(mut c: CaseSpec) -> CaseSpec {
    c.criteria.require_decreasing = true;
    c
}

fn mc(mut c: CaseSpec, samples: usize, thin: usize) -> CaseSpec {
    c.mc = Some(McBudget { samples, thin, seed: MC_SEED });
    c
}

fn charge(y: f64, q: f64) -> PointCharge {
    PointCharge { y, q }
}

fn even(cos_coeffs: &[f64], points: &[(f64, f64)]) -> EvenSymbol {
    EvenSymbol { cos_coeffs: cos_coeffs.to_vec(), points: points.to_vec() }
}

/// Fixed draws used as the "random" even symbols of the group identity.
fn random_even_symbols() -> [EvenSymbol; 3] {
    [
        even(&[0.0, 0.31, -0.17, 0.08], &[]),
        even(&[0.12, -0.24, 0.05], &[(1.13, 0.5)]),
        even(&[-0.05, 0.19, 0.11, -0.07, 0.02], &[(0.61, 0.35), (2.27, 1.0)]),
    ]
}

pub fn builtin() -> Vec<CaseSpec> {
    let mut v = Vec::new();

    v.push(case(
        "szego-2tcos",
        "strong-szego",
        "Toeplitz determinant of exp(2t cos θ), t = 1/2",
        CaseKind::Toeplitz {
            symbol: SymbolSpec { smooth: SmoothSpec::Named(NamedSmooth::ExpCos { t: 0.5 }), singularities: vec![] },
        },
        &[8, 16, 32],
        1e-6,
    ));

    v.push(decreasing(case(
        "lenard-X0.5",
        "fisher-hartwig",
        "circle density-matrix determinant at separation X = 1/2",
        CaseKind::Toeplitz {
            symbol: SymbolSpec {
                smooth: SmoothSpec::unit(),
                singularities: vec![Singularity::new(0.0, 0.5, 0.0), Singularity::new(PI, 0.5, 0.0)],
            },
        },
        &[16, 32, 64],
        0.05,
    )));
    v.push(decreasing(case(
        "bose-circle-X0.3-Y0.7",
        "circle-density-matrix",
        "circle density matrix against its large-N form",
        CaseKind::BoseDensity { spec: DensityMatrixSpec::new(Geometry::Circle, 16, 0.3, 0.7) },
        &[16, 32, 64],
        0.05,
    )));

    v.push(case(
        "ising-critical-row",
        "ising-critical-amplitude",
        "row correlator at α₁ = 0.3, α₂ = 1",
        CaseKind::IsingRow { alpha1: 0.3, alpha2: 1.0, route: IsingRoute::Closed },
        &[16, 32, 64],
        0.02,
    ));
    v.push(case(
        "ising-highT-row",
        "ising-high-temperature-amplitude",
        "row correlator at α₁ = 0.2, α₂ = 2",
        CaseKind::IsingRow { alpha1: 0.2, alpha2: 2.0, route: IsingRoute::Closed },
        &[16, 32, 64],
        0.05,
    ));
    v.push(case(
        "ising-highT-row-fh",
        "fisher-hartwig-shifted-contour",
        "row correlator at α₁ = 0.2, α₂ = 2 against the contour-shifted symbol",
        CaseKind::IsingRow { alpha1: 0.2, alpha2: 2.0, route: IsingRoute::FisherHartwig },
        &[16, 32, 64],
        0.05,
    ));
    let mut naive = case(
        "fh-degenerate-highT-naive",
        "fisher-hartwig",
        "naive parameterization of the high-temperature symbol: degenerate",
        CaseKind::IsingRow { alpha1: 0.2, alpha2: 2.0, route: IsingRoute::Naive },
        &[16, 32, 64],
        0.05,
    );
    naive.criteria.expect_degenerate = true;
    v.push(naive);
    v.push(case(
        "ising-lowT-diagonal",
        "strong-szego",
        "diagonal correlator at K₁ = K₂ = 0.5 (ordered phase)",
        CaseKind::IsingCouplings { k1: 0.5, k2: 0.5, direction: crate::physics::Direction::Diagonal },
        &[8, 16, 32],
        1e-6,
    ));

    for (q, b) in [(0.5, 0.0), (0.5, 0.25), (1.0, 0.5)] {
        v.push(case(
            &format!("selberg-q{q}-b{b}"),
            "gamma-product",
            "β = 2 one-charge Toeplitz determinant against the Gamma product",
            CaseKind::CircleCharge { q, b },
            &[1, 2, 4, 8, 12, 16],
            1e-10,
        ));
    }

    for (s, r) in [(1u64, 2u64), (2, 1)] {
        for b in [0.0, 0.25] {
            let beta = 2.0 * s as f64 / r as f64;
            v.push(decreasing(case(
                &format!("beta-charge-b{beta}-q0.5-b{b}"),
                "beta-fisher-hartwig",
                "CβE one-charge average: Gamma product against its large-n form",
                CaseKind::BetaCharge { s, r, q: 0.5, b },
                &[20, 50, 100],
                0.02,
            )));
        }
    }

    for (k, symbol) in random_even_symbols().into_iter().enumerate() {
        v.push(case(
            &format!("group-factorization-{}", k + 1),
            "unitary-orthogonal-symplectic-factorization",
            "U(2N+1) average against the O⁺(2N+2) and Sp(N) averages",
            CaseKind::GroupFactorization { symbol },
            &[1, 2, 3],
            1e-10,
        ));
    }

    v.push(extended(case(
        "gauss-laguerre-factorization",
        "gauss-laguerre-factorization",
        "2N-point Gaussian average of an even function against two half-line averages",
        CaseKind::GaussLaguerreFactorization { charges: vec![charge(0.4, 1.0)], poly: vec![0.0, 0.3] },
        &[1, 2, 3],
        1e-8,
    )));
    v.push(case(
        "norm-ratio",
        "gauss-laguerre-norm-ratio",
        "ratio of Gaussian and half-line normalizations",
        CaseKind::NormRatio,
        &[1, 2, 3, 4, 5, 6, 7, 8],
        1e-10,
    ));

    let smooth = even(&[], &[(0.3 * PI, 0.5), (0.7 * PI, 0.5)]);
    v.push(decreasing(case(
        "th-ominus-X0.3-Y0.7",
        "toeplitz-minus-hankel-odd",
        "O⁻(2N+1) determinant of the mixed-geometry symbol",
        CaseKind::ToeplitzHankel { variant: ThVariant::OminusOdd, symbol: smooth.clone() },
        &[16, 32, 64],
        0.05,
    )));
    v.push(decreasing(case(
        "th-oplus-X0.3-Y0.7",
        "toeplitz-minus-hankel-odd",
        "O⁺(2N+1) determinant of the mixed-geometry symbol",
        CaseKind::ToeplitzHankel { variant: ThVariant::OplusOdd, symbol: smooth },
        &[16, 32, 64],
        0.05,
    )));
    v.push(case(
        "bose-mixed-X0.3-Y0.7",
        "mixed-density-matrix",
        "mixed-boundary density matrix against its large-N form",
        CaseKind::BoseDensity { spec: DensityMatrixSpec::new(Geometry::Mixed, 16, 0.3, 0.7) },
        &[16, 32, 64],
        0.05,
    ));
    v.push(extended(decreasing(case(
        "cn-lambda-smooth",
        "jacobi-circle-average",
        "C_N(0.8, 1.2) average of a smooth even symbol",
        CaseKind::CnLambda { lambda1: 0.8, lambda2: 1.2, symbol: even(&[0.1, 0.2, -0.1], &[]) },
        &[4, 8, 12],
        5e-3,
    ))));

    for y in [0.0, 0.3] {
        v.push(extended(case(
            &format!("gue-duality-y{y}"),
            "gaussian-duality",
            "N-point Gaussian average of (x − y)² against its 2-point dual",
            CaseKind::GueDuality { q: 1, y },
            &[2, 4],
            1e-8,
        )));
    }

    v.push(extended(case(
        "gue-hankel-y0.3-t0.8",
        "gaussian-charge-asymptotics",
        "Gaussian average with a charge and an exponential quadratic factor",
        CaseKind::GueHankel { charges: vec![charge(0.3, 1.0)], poly: vec![0.0, 0.0, 0.8] },
        &[6, 12, 16],
        0.05,
    )));
    v.push(extended(case(
        "lue-hankel-y0.5-t0.8",
        "laguerre-charge-asymptotics",
        "half-line average with a charge and an exponential factor",
        CaseKind::LueHankel { charges: vec![charge(0.5, 1.0)], aprime: 1.0, poly: vec![0.0, 0.8] },
        &[6, 12, 16],
        0.05,
    )));

    let mut gmc = mc(
        case(
            "gue-mc-q0.5-y0",
            "gaussian-charge-asymptotics",
            "sampled Gaussian average of |x − y| at the centre",
            CaseKind::GueMc { charges: vec![charge(0.0, 0.5)] },
            &[50],
            0.10,
        ),
        100_000,
        1,
    );
    gmc.criteria.max_sigma = Some(3.0);
    v.push(gmc);
    let mut lmc = mc(
        case(
            "lue-mc-q0.5-y0.5",
            "laguerre-charge-asymptotics",
            "sampled half-line average of |x² − y²| at a′ = 1",
            CaseKind::LueMc { charges: vec![charge(0.5, 0.5)], aprime: 1.0 },
            &[50],
            0.10,
        ),
        100_000,
        1,
    );
    lmc.criteria.max_sigma = Some(3.0);
    v.push(lmc);

    for beta in [1.0, 2.0, 4.0] {
        let mut c = mc(
            case(
                &format!("cbeta-fluctuation-b{beta}"),
                "linear-statistic-variance",
                "variance of Σ 2cos θ_l in CβE",
                CaseKind::Fluctuation { beta, cos_coeffs: vec![1.0] },
                &[64],
                0.05,
            ),
            20_000,
            10,
        );
        c.criteria.min_normality_p = Some(0.01);
        v.push(c);
    }

    v.push(case(
        "lambda0-scaling",
        "occupation-scaling",
        "λ₀(2N)/λ₀(N) for the circle",
        CaseKind::Lambda0Scaling,
        &[8, 16, 32],
        0.05,
    ));

    v.push(decreasing(case(
        "probe-smooth-split",
        "smooth-factor-split",
        "smooth factor against the charge average",
        CaseKind::Factorization {
            probe: ProbeSpec {
                probe: ProbeKind::SmoothSplit,
                beta: 2.0,
                charges: vec![charge(1.0, 0.5)],
                smooth: SmoothSpec::Named(NamedSmooth::ExpCos { t: 0.3 }),
                aprime: 0.0,
            },
        },
        &[8, 16, 32],
        1e-2,
    )));
    v.push(decreasing(case(
        "probe-circle-pair",
        "charge-factorization",
        "two circular charges at angles 0 and π/2",
        CaseKind::Factorization {
            probe: ProbeSpec {
                probe: ProbeKind::CircleCharges,
                beta: 2.0,
                charges: vec![charge(0.0, 0.5), charge(0.5 * PI, 0.5)],
                smooth: SmoothSpec::unit(),
                aprime: 0.0,
            },
        },
        &[16, 32, 64],
        0.05,
    )));
    v.push(extended(decreasing(case(
        "probe-gauss-pair",
        "charge-factorization",
        "two Gaussian-weight charges at ±0.4",
        CaseKind::Factorization {
            probe: ProbeSpec {
                probe: ProbeKind::GaussCharges,
                beta: 2.0,
                charges: vec![charge(-0.4, 0.5), charge(0.4, 0.5)],
                smooth: SmoothSpec::unit(),
                aprime: 0.0,
            },
        },
        &[6, 10],
        0.1,
    ))));
    v.push(extended(case(
        "probe-laguerre-pair",
        "charge-factorization",
        "two half-line charges at 0.3 and 0.6, a′ = 1",
        CaseKind::Factorization {
            probe: ProbeSpec {
                probe: ProbeKind::LaguerreCharges,
                beta: 2.0,
                charges: vec![charge(0.3, 0.5), charge(0.6, 0.5)],
                smooth: SmoothSpec::unit(),
                aprime: 1.0,
            },
        },
        &[6, 10, 16],
        0.05,
    )));

    v
}

pub fn find(id: &str) -> Option<CaseSpec> {
    builtin().into_iter().find(|c| c.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_unique_and_valid() {
        let all = builtin();
        let mut ids: Vec<&str> = all.iter().map(|c| c.id.as_str()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), all.len());
        for c in &all {
            c.validate().unwrap();
        }
    }

    #[test]
    fn json_round_trip() {
        for c in builtin() {
            let text = serde_json::to_string_pretty(&c).unwrap();
            assert_eq!(CaseSpec::from_json(&text).unwrap(), c, "{}", c.id);
        }
    }
}
