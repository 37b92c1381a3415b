//! Values computed independently at 30 digits and frozen here.

use fhlab::determinants::moments::{PointCharge, Weight};
use fhlab::determinants::toeplitz_logdet;
use fhlab::ensembles::{gue_sample, lue_sample, mc_average};
use fhlab::harness::probes::hankel_average;
use fhlab::physics::{bose_density_matrix, bose_lambda0, DensityMatrixSpec, Geometry, Lambda0Source};
use fhlab::precision::PrecisionContext;
use fhlab::specfun::log_barnes_g;
use fhlab::symbols::{symbol_fourier, FHSymbol, FourierSeries, Singularity};
use std::f64::consts::PI;

fn close(got: f64, want: f64, tol: f64) {
    assert!((got - want).abs() <= tol * want.abs().max(1.0), "got {got}, want {want}");
}

#[test]
fn abs_sine_toeplitz() {
    // symbol |2 sin θ|
    let sym =
        FHSymbol::new(FourierSeries::zero(0), vec![Singularity::new(0.0, 0.5, 0.0), Singularity::new(PI, 0.5, 0.0)])
            .unwrap();
    let want = [(8, 1.0212910357391309498), (16, 1.3381916792134138466), (32, 1.6695224232685378204)];
    for (n, v) in want {
        let tab = symbol_fourier(&sym, n).unwrap();
        let d = toeplitz_logdet(&tab, n, PrecisionContext::double()).unwrap();
        close(d.log_modulus, v, 1e-11);
    }
}

#[test]
fn barnes_g_half() {
    close(log_barnes_g(0.5).unwrap().log_modulus.exp(), 0.60324428120944620619, 1e-13);
}

#[test]
fn gaussian_charge_average() {
    for (n, v) in [(4usize, -6.6173462347406549861), (6, -10.695246932948814171)] {
        let w = Weight::Gauss { a: (2.0 * n as f64).sqrt() };
        let got = hankel_average(w, &[PointCharge { y: 0.3, q: 1.0 }], n, PrecisionContext::extended()).unwrap();
        close(got, v, 1e-10);
    }
}

#[test]
fn half_line_density_matrix() {
    let spec = DensityMatrixSpec { geometry: Geometry::HalfLine, n: 4, x: 0.3, y: 0.6, aprime: 1.0, length: 1.0 };
    close(bose_density_matrix(&spec, PrecisionContext::extended()).unwrap(), 0.52861131703955691684, 1e-10);
}

#[test]
fn lambda0_against_simpson() {
    // ∫ ρ(x; 0) over the circle, with x = t² to soften the cusp at the origin
    let n = 4;
    let ctx = PrecisionContext::double();
    let m = 400;
    let tmax = 0.5f64.sqrt();
    let h = tmax / m as f64;
    let f = |t: f64| {
        let spec = DensityMatrixSpec::new(Geometry::Circle, n, t * t, 0.0);
        bose_density_matrix(&spec, ctx).unwrap() * 2.0 * t
    };
    let mut s = f(0.0) + f(tmax);
    for k in 1..m {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
    }
    let simpson = 2.0 * s * h / 3.0;
    close(bose_lambda0(Geometry::Circle, n, Lambda0Source::Exact, ctx).unwrap(), simpson, 1e-7);
}

#[test]
fn samplers_match_moment_determinants() {
    let n = 4;
    let ctx = PrecisionContext::extended();
    let charge = [PointCharge { y: 0.4, q: 0.5 }];
    let log_f = |x: f64| (x - 0.4).abs().ln();

    let exact = hankel_average(Weight::Gauss { a: (2.0 * n as f64).sqrt() }, &charge, n, ctx).unwrap();
    let mc = mc_average(&gue_sample(n, 40_000, 11).unwrap(), &log_f).unwrap();
    let d = (mc.mean.log_modulus - exact).exp() - 1.0;
    assert!(d.abs() < 4.0 * mc.rel_stderr + 1e-3, "gue: {d} vs {}", mc.rel_stderr);

    let exact = hankel_average(Weight::Laguerre { c: 4.0 * n as f64, aprime: 1.0 }, &charge, n, ctx).unwrap();
    let mc = mc_average(&lue_sample(n, 1.0, 40_000, 12).unwrap(), &log_f).unwrap();
    let d = (mc.mean.log_modulus - exact).exp() - 1.0;
    assert!(d.abs() < 4.0 * mc.rel_stderr + 1e-3, "lue: {d} vs {}", mc.rel_stderr);
}

#[test]
fn weak_singularity_pair_coefficients() {
    // (2|cos θ − cos 0.2|)^{2a}, a = 0.10243
    let sym = FHSymbol::new(
        FourierSeries::zero(0),
        vec![Singularity::new(0.2, 0.10243, 0.0), Singularity::new(-0.2, 0.10243, 0.0)],
    )
    .unwrap();
    let tab = symbol_fourier(&sym, 8).unwrap();
    close(tab.get(0).re, 1.04896581545649480982, 1e-13);
    close(tab.get(3).re, -0.0325863568962786217789, 1e-13);
    close(tab.get(-3).re, -0.0325863568962786217789, 1e-13);
}
