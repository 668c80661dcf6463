use aerostack::features::FeatureMatrix;
use aerostack::learners::{
    GbtParams, GlmParams, Learner, ModelKind, ModelParams, RegressorSpec, RfParams, SvrParams,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(seed: u64, n: usize, p: usize) -> FeatureMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
    let y = rows
        .iter()
        .map(|r| r[0] * 2.0 - r[p - 1] + (r[0] * r[p - 1]).sin() + rng.random_range(-0.5..0.5))
        .collect();
    FeatureMatrix::from_rows((0..p).map(|j| format!("x{j}")).collect(), &rows, y).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn forest_predictions_within_target_range(seed in 0u64..1000, n in 5usize..60, p in 1usize..4) {
        let x = random_matrix(seed, n, p);
        let m = RegressorSpec::rf(RfParams { n_trees: 10, ..RfParams::default() }, seed).fit(&x).unwrap();
        let probe = random_matrix(seed + 1, 30, p);
        let lo = x.target().iter().copied().fold(f64::INFINITY, f64::min);
        let hi = x.target().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for v in m.predict(&probe).unwrap() {
            prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
        }
    }

    #[test]
    fn boosting_without_learning_rate_is_the_mean(seed in 0u64..1000, n in 2usize..40) {
        let x = random_matrix(seed, n, 2);
        let m = RegressorSpec::gbt(GbtParams { learning_rate: 0.0, n_rounds: 7, ..GbtParams::default() })
            .fit(&x)
            .unwrap();
        let mean = x.target().iter().sum::<f64>() / n as f64;
        for v in m.predict(&x).unwrap() {
            prop_assert!((v - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn glm_residuals_orthogonal(seed in 0u64..1000, n in 10usize..50, p in 1usize..5) {
        let x = random_matrix(seed, n, p);
        let m = RegressorSpec::glm(GlmParams { ridge_lambda: 0.0 }).fit(&x).unwrap();
        let pred = m.predict(&x).unwrap();
        let resid: Vec<f64> = x.target().iter().zip(&pred).map(|(y, f)| y - f).collect();
        for j in 0..p {
            let col = x.column(j);
            let mean = col.iter().sum::<f64>() / n as f64;
            let dot: f64 = col.iter().zip(&resid).map(|(c, r)| (c - mean) * r).sum();
            prop_assert!(dot.abs() < 1e-6, "{}", dot);
        }
    }

    #[test]
    fn svr_inside_tube_has_zero_loss(seed in 0u64..1000, n in 2usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random_range(-1.0..1.0)]).collect();
        let y: Vec<f64> = (0..n).map(|_| 5.0 + rng.random_range(-0.04..0.04)).collect();
        let x = FeatureMatrix::from_rows(vec!["x".into()], &rows, y).unwrap();
        let m = RegressorSpec::svr(SvrParams { epsilon: 0.1, ..SvrParams::default() }).fit(&x).unwrap();
        let pred = m.predict(&x).unwrap();
        let loss: f64 = pred.iter().zip(x.target()).map(|(p, t)| ((p - t).abs() - 0.1).max(0.0)).sum();
        prop_assert_eq!(loss, 0.0);
    }
}

#[test]
fn identical_across_thread_counts() {
    let x = random_matrix(5, 120, 4);
    let params = ModelParams::default();
    for kind in [ModelKind::Rf, ModelKind::Gbt, ModelKind::Svr, ModelKind::Glm] {
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| params.spec(kind, 11).fit(&x).unwrap().predict(&x).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert!(a.iter().zip(&b).all(|(p, q)| p.to_bits() == q.to_bits()), "{kind}");
    }
}

#[test]
fn predictions_need_the_training_schema() {
    let x = random_matrix(1, 20, 2);
    let m = RegressorSpec::glm(GlmParams::default()).fit(&x).unwrap();
    let other = random_matrix(1, 20, 3);
    assert!(matches!(m.predict(&other), Err(aerostack::Error::FeatureMismatch { .. })));
}
