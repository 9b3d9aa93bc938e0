//! Bound evaluators against values computed independently at 40 significant
//! digits and rounded to 20.

#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use manrec::bounds::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn statistical_terms() {
    assert!(
        rel(
            stat_kmeans(10_000, 10, 0.05).unwrap(),
            0.800_943_419_002_916_48
        ) < 1e-13
    );
    assert!(
        rel(
            stat_kflats(10_000, 10, 2, 0.05).unwrap(),
            0.366_729_504_334_507_29
        ) < 1e-13
    );
    assert!(
        rel(
            stat_kmeans(2000, 8, 0.05).unwrap(),
            1.454_664_458_037_742_36
        ) < 1e-13
    );
}

#[test]
fn schedules_on_the_two_sphere() {
    let rho = (4.0 * PI).sqrt();
    let kappa = 4.0 * PI;
    let k = kn_kmeans(10_000, 2, rho, quantization_constant(2, 2));
    assert!(rel(k, 1.859_900_305_170_043_93) < 1e-12);
    let k = kn_kflats(10_000, 2, kappa, quantization_constant(2, 4));
    assert!(rel(k, 3.125_830_062_948_480_78) < 1e-12);
}

#[test]
fn rates_on_the_two_sphere() {
    let rho = (4.0 * PI).sqrt();
    let c2 = quantization_constant(2, 2);
    let exact = rate_kmeans(10_000, 2, 0.05, rho, c2, Solver::Exact).unwrap();
    assert!(rel(exact, 2.738_781_202_803_337_30) < 1e-12);
    let pp = rate_kmeans(10_000, 2, 0.05, rho, c2, Solver::PlusPlus).unwrap();
    assert!(rel(pp, 65.009_824_469_223_196_27) < 1e-12);
    let flats = rate_kflats(10_000, 2, 0.05, 4.0 * PI, quantization_constant(2, 4)).unwrap();
    assert!(rel(flats, 0.542_458_836_741_803_52) < 1e-12);
}

#[test]
fn geometric_constants() {
    assert!(rel(sphere_curvature(5), 31.006_276_680_299_820_18) < 1e-13);
    assert!(rel(holder_density_bound(3), 1.773_517_359_260_679_48) < 1e-13);
}

#[test]
fn balancing_and_power_laws() {
    for d in 1..=6 {
        let c = quantization_constant(d, 2);
        let rho = 0.7 + d as f64;
        let n = 12_345;
        let k = kn_kmeans(n, d, rho, c);
        let stat = balance_stat_kmeans(n, k);
        assert!(rel(stat, approx_kmeans(k, d, rho, c)) < 1e-9, "d={d}");
        let ratio = kn_kmeans(16 * n, d, rho, c) / k;
        assert!(rel(ratio, 16f64.powf(d as f64 / (2.0 * (d as f64 + 2.0)))) < 1e-12);

        let c = quantization_constant(d, 4);
        let kappa = 3.0 + d as f64;
        let k = kn_kflats(n, d, kappa, c);
        let stat = balance_stat_kflats(n, k, d);
        assert!(rel(stat, approx_kflats(k, d, kappa, c)) < 1e-9, "d={d}");
        let ratio = kn_kflats(16 * n, d, kappa, c) / k;
        assert!(rel(ratio, 16f64.powf(d as f64 / (2.0 * (d as f64 + 4.0)))) < 1e-12);

        let r = |n| rate_kmeans(n, d, 0.05, rho, c, Solver::Exact).unwrap();
        assert!(rel(r(16 * n) / r(n), 16f64.powf(-1.0 / (d as f64 + 2.0))) < 1e-12);
        let r = |n| rate_kflats(n, d, 0.05, kappa, c).unwrap();
        assert!(rel(r(16 * n) / r(n), 16f64.powf(-2.0 / (d as f64 + 4.0))) < 1e-12);
    }
}

#[test]
fn decomposition_totals() {
    let inputs = BoundInputs::new(
        Family::KMeans,
        10_000,
        16,
        2,
        0.05,
        (4.0 * PI).sqrt(),
        4.0 * PI,
    )
    .unwrap();
    let report = decompose(Family::KMeans, 0.03, 0.035, &inputs).unwrap();
    assert_eq!(report.statistical, stat_kmeans(10_000, 16, 0.05).unwrap());
    assert!((report.measured_gap - 0.005).abs() < 1e-15);
    assert_eq!(
        report.total,
        2.0 * report.statistical + report.approximation
    );
    assert!(decompose(Family::KFlats, f64::NAN, 0.0, &inputs).is_err());
}
