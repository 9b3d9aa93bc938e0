use manrec::harness::{
    holdout_error, select_k_with_validation, tradeoff_experiment, Algorithm, ExperimentSpec, KGrid,
    HOLDOUT_STREAM,
};
use manrec::{kmeans, FitConfig, ManifoldSpec, RngSeed};

#[test]
fn selection_matches_the_table_minimum() {
    let sphere = ManifoldSpec::sphere(4, 5).unwrap();
    let mut spec = ExperimentSpec::new(
        sphere,
        vec![50],
        KGrid::Values((1..=12).collect()),
        Algorithm::KMeans,
    );
    spec.repeats = 1;
    spec.holdout_size = 20_000;
    spec.fit = FitConfig::default().with_restarts(5);
    spec.base_seed = RngSeed(31);
    let report = tradeoff_experiment(&spec).unwrap();
    let (k_table, _) = report
        .rows
        .iter()
        .map(|r| (r.k, r.holdout_error))
        .fold((0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });

    let base = spec.base_seed;
    let train = sphere.sample::<f64>(50, base.derive(&[50, 0])).unwrap();
    let holdout = sphere
        .sample::<f64>(20_000, base.derive(&[HOLDOUT_STREAM]))
        .unwrap();
    let ks: Vec<usize> = (1..=12).collect();
    let sel =
        select_k_with_validation(Algorithm::KMeans, &train, &holdout, &ks, 4, &spec.fit, base)
            .unwrap();
    assert_eq!(sel.k, k_table);
    for (row, (k, e)) in report.rows.iter().zip(&sel.errors) {
        assert_eq!(row.k, *k);
        assert_eq!(row.holdout_error, *e);
    }
}

#[test]
fn holdout_estimate_is_unbiased() {
    let sphere = ManifoldSpec::sphere(2, 3).unwrap();
    let train = sphere.sample::<f64>(500, RngSeed(1)).unwrap();
    let model = kmeans::fit(
        &train,
        6,
        &FitConfig::default().with_restarts(3),
        RngSeed(2),
    )
    .unwrap();
    let reference = holdout_error(&model, &sphere.sample(1_000_000, RngSeed(3)).unwrap()).unwrap();
    let estimates: Vec<f64> = (0..100)
        .map(|i| holdout_error(&model, &sphere.sample(10_000, RngSeed(100 + i)).unwrap()).unwrap())
        .collect();
    let m = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / m;
    let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let se = (var / m).sqrt();
    assert!(
        (mean - reference).abs() < 3.0 * se,
        "mean {mean} ref {reference} se {se}"
    );
}
