//! Physical observables tabulated over a size grid, exact against asymptotic.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::physics::{
    bose_density_matrix, bose_density_matrix_asymptotic, bose_lambda0, ising_correlation, DensityMatrixSpec, Direction,
    Geometry, IsingPoint, Lambda0Source,
};
use crate::precision::{PrecisionContext, Tier};
use crate::symbols::IsingRegime;

use super::{ising_prediction, IsingRoute};

fn unit_length() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "quantity", rename_all = "snake_case")]
pub enum Observable {
    /// ρ_{N+1}(x; y) at scaled positions (X, Y).
    DensityMatrix {
        geometry: Geometry,
        #[serde(rename = "X")]
        x: f64,
        #[serde(rename = "Y")]
        y: f64,
        #[serde(default)]
        aprime: f64,
        #[serde(default = "unit_length")]
        length: f64,
    },
    /// ⟨σσ⟩ at separation n.
    IsingCorrelation {
        #[serde(rename = "K1")]
        k1: f64,
        #[serde(rename = "K2")]
        k2: f64,
        direction: Direction,
    },
    /// Largest occupation of the circle gas.
    Lambda0,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicsCase {
    pub id: String,
    pub observable: Observable,
    pub n: Vec<usize>,
    #[serde(default)]
    pub precision: Option<Tier>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicsRow {
    pub n: usize,
    pub exact: f64,
    pub predicted: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicsReport {
    pub id: String,
    pub observable: Observable,
    /// "N" for gas sizes, "n" for lattice separations.
    pub size_label: String,
    pub precision: Tier,
    pub rows: Vec<PhysicsRow>,
}

impl Observable {
    fn size_label(&self) -> &'static str {
        match self {
            Observable::IsingCorrelation { .. } => "n",
            _ => "N",
        }
    }

    fn evaluate(&self, n: usize, ctx: PrecisionContext) -> Result<(f64, Option<f64>)> {
        match *self {
            Observable::DensityMatrix { geometry, x, y, aprime, length } => {
                let spec = DensityMatrixSpec { geometry, n, x, y, aprime, length };
                Ok((bose_density_matrix(&spec, ctx)?, Some(bose_density_matrix_asymptotic(&spec)?)))
            }
            Observable::IsingCorrelation { k1, k2, direction } => {
                let point = IsingPoint::new(k1, k2)?;
                let p = point.params()?;
                let exact = ising_correlation(&point, direction, n, ctx)?;
                let (a1, a2) = match direction {
                    Direction::Row => (p.alpha1, p.alpha2),
                    Direction::Diagonal => (0.0, 1.0 / p.k),
                };
                let route = match crate::symbols::classify_row(a1, a2) {
                    IsingRegime::Other => IsingRoute::FisherHartwig,
                    _ => IsingRoute::Closed,
                };
                let pred = ising_prediction(a1, a2, route)?.log_at(n as f64).map(|z| z.exp().re);
                Ok((exact, pred))
            }
            Observable::Lambda0 => Ok((
                bose_lambda0(Geometry::Circle, n, Lambda0Source::Exact, ctx)?,
                Some(bose_lambda0(Geometry::Circle, n, Lambda0Source::Asymptotic, ctx)?),
            )),
        }
    }
}

pub fn run_physics(case: &PhysicsCase, tier: Tier) -> Result<PhysicsReport> {
    if case.n.is_empty() || case.n.windows(2).any(|w| w[0] >= w[1]) {
        return invalid(format!("{}: size grid must be non-empty and strictly increasing", case.id));
    }
    let ctx = PrecisionContext::with_tier(tier);
    use rayon::prelude::*;
    let rows = case
        .n
        .par_iter()
        .map(|&n| {
            let (exact, predicted) = case.observable.evaluate(n, ctx)?;
            Ok(PhysicsRow { n, exact, predicted, ratio: predicted.map(|p| exact / p) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhysicsReport {
        id: case.id.clone(),
        observable: case.observable,
        size_label: case.observable.size_label().into(),
        precision: tier,
        rows,
    })
}

pub fn write_physics_csv<W: Write>(report: &PhysicsReport, mut w: W) -> Result<()> {
    writeln!(w, "{},exact,predicted,ratio", report.size_label)?;
    let f = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
    for r in &report.rows {
        writeln!(w, "{},{:e},{},{}", r.n, r.exact, f(r.predicted), f(r.ratio))?;
    }
    Ok(())
}

fn density(id: &str, geometry: Geometry, x: f64, y: f64, aprime: f64, n: &[usize], tier: Option<Tier>) -> PhysicsCase {
    PhysicsCase {
        id: id.into(),
        observable: Observable::DensityMatrix { geometry, x, y, aprime, length: 1.0 },
        n: n.to_vec(),
        precision: tier,
    }
}

pub fn presets() -> Vec<PhysicsCase> {
    let kc = 0.5 * (1.0 + 2f64.sqrt()).ln();
    vec![
        density("bose-circle", Geometry::Circle, 0.0, 0.5, 0.0, &[8, 16, 32, 64], None),
        density("bose-dirichlet", Geometry::Dirichlet, 0.3, 0.7, 0.0, &[8, 16, 32, 64], None),
        density("bose-neumann", Geometry::Neumann, 0.3, 0.7, 0.0, &[8, 16, 32, 64], None),
        density("bose-mixed", Geometry::Mixed, 0.35, 0.65, 0.0, &[8, 16, 32, 64], None),
        density("bose-harmonic", Geometry::Harmonic, 0.1, 0.5, 0.0, &[8, 12, 16], Some(Tier::Extended)),
        density("bose-halfline", Geometry::HalfLine, 0.3, 0.6, 1.0, &[8, 12, 16], Some(Tier::Extended)),
        PhysicsCase {
            id: "ising-critical".into(),
            observable: Observable::IsingCorrelation { k1: kc, k2: kc, direction: Direction::Row },
            n: vec![8, 16, 32, 64],
            precision: None,
        },
        PhysicsCase {
            id: "ising-highT".into(),
            observable: Observable::IsingCorrelation { k1: 0.3, k2: 0.3, direction: Direction::Row },
            n: vec![8, 16, 32, 64],
            precision: None,
        },
        PhysicsCase {
            id: "lambda0-circle".into(),
            observable: Observable::Lambda0,
            n: vec![8, 16, 32],
            precision: None,
        },
    ]
}

pub fn find_preset(id: &str) -> Option<PhysicsCase> {
    presets().into_iter().find(|c| c.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_converge() {
        for c in presets() {
            let r = run_physics(&c, c.precision.unwrap_or(Tier::Double)).unwrap();
            let last = r.rows.last().unwrap();
            let dev = (last.ratio.unwrap() - 1.0).abs();
            assert!(dev < 0.1, "{}: {:?}", c.id, r.rows);
        }
    }

    #[test]
    fn csv_header_uses_size_label() {
        let c = find_preset("ising-critical").unwrap();
        let r = run_physics(&PhysicsCase { n: vec![4], ..c }, Tier::Double).unwrap();
        let mut buf = Vec::new();
        write_physics_csv(&r, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("n,exact,predicted,ratio\n"));
    }
}
