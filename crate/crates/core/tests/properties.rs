use manrec::harness::argmin_k;
use manrec::kflats::{self, flat_distance_sq, Flat};
use manrec::oracle::{global_kflats, global_kmeans};
use manrec::{kmeans, Dataset, FitConfig, RngSeed, TinyInstance};
use proptest::prelude::*;

fn cloud(max_n: usize, max_dim: usize) -> impl Strategy<Value = Dataset> {
    (1..=max_dim, 2..=max_n).prop_flat_map(|(dim, n)| {
        prop::collection::vec(-0.5f64..0.5, n * dim)
            .prop_map(move |pts| Dataset::new(pts, dim).unwrap())
    })
}

fn cfg() -> FitConfig {
    FitConfig::default().with_restarts(4)
}

fn non_increasing(trace: &[f64]) -> bool {
    trace.windows(2).all(|w| w[1] <= w[0] + 1e-12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kmeans_descends(data in cloud(40, 4), k in 1usize..6, seed in any::<u64>()) {
        let k = k.min(data.len());
        let out = kmeans::fit_traced(&data, k, &cfg(), RngSeed(seed)).unwrap();
        for t in &out.traces {
            prop_assert!(non_increasing(t), "{t:?}");
        }
        let again = kmeans::fit(&data, k, &cfg(), RngSeed(seed)).unwrap();
        prop_assert_eq!(again, out.model);
    }

    #[test]
    fn kflats_descends(data in cloud(40, 4), k in 1usize..5, d in 0usize..3, seed in any::<u64>()) {
        let k = k.min(data.len());
        let d = d.min(data.ambient_dim());
        let out = kflats::fit_traced(&data, k, d, &cfg(), RngSeed(seed)).unwrap();
        for t in &out.traces {
            prop_assert!(non_increasing(t), "{t:?}");
        }
        for f in out.model.flats() {
            prop_assert!(f.orthonormality_defect() <= 1e-10);
        }
    }

    #[test]
    fn nothing_beats_the_oracle(data in cloud(7, 2), k in 1usize..4, seed in any::<u64>()) {
        let k = k.min(data.len());
        let inst = TinyInstance::new(data.clone(), k).unwrap();
        let best = global_kmeans(&inst).unwrap().objective;
        let fit = kmeans::fit(&data, k, &cfg(), RngSeed(seed)).unwrap();
        prop_assert!(fit.objective() >= best - 1e-12);
        let best = global_kflats(&inst, 1).unwrap().objective;
        let fit = kflats::fit(&data, k, 1, &cfg(), RngSeed(seed)).unwrap();
        prop_assert!(fit.objective() >= best - 1e-12);
    }

    #[test]
    fn distance_ignores_basis_rotation(
        x in prop::collection::vec(-1.0f64..1.0, 3),
        m in prop::collection::vec(-1.0f64..1.0, 3),
        theta in 0.0f64..std::f64::consts::TAU,
    ) {
        let f = Flat::new(m, &[vec![1.0, 0.0, 0.0], vec![0.0, 0.6, 0.8]]).unwrap();
        let (c, s) = (theta.cos(), theta.sin());
        let g = f.rotated(&[c, -s, s, c]).unwrap();
        let a = flat_distance_sq(&x, &f).unwrap();
        let b = flat_distance_sq(&x, &g).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a));
    }

    #[test]
    fn argmin_survives_increasing_maps(errs in prop::collection::vec(0.0f64..2.0, 1..12)) {
        let table: Vec<(usize, f64)> = errs.iter().enumerate().map(|(i, &e)| (i + 1, e)).collect();
        let mapped: Vec<(usize, f64)> = table.iter().map(|&(k, e)| (k, e.powi(3) + 2.0 * e)).collect();
        prop_assert_eq!(argmin_k(&table).unwrap(), argmin_k(&mapped).unwrap());
    }
}
