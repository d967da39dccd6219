use proptest::prelude::*;

use islr_core::grid_features::{FeatureVector, GridSpec};
use islr_core::knn::{Backend, KnnModel, LabeledSample};

fn case() -> impl Strategy<Value = (usize, Vec<(u8, Vec<f64>)>, Vec<f64>, usize)> {
    (1usize..5, 1usize..60, 1usize..9).prop_flat_map(|(dims, n, k)| {
        let k = k.min(n);
        // coarse values make exact distance ties common
        let v = proptest::collection::vec((0u8..4).prop_map(|q| q as f64 / 4.0), dims);
        (
            Just(dims),
            proptest::collection::vec((0u8..4, v.clone()), n),
            v,
            Just(k),
        )
    })
}

fn fit(dims: usize, data: &[(u8, Vec<f64>)], k: usize, backend: Backend) -> KnnModel<f64> {
    let grid = GridSpec::new(1, dims).unwrap();
    let samples = data
        .iter()
        .map(|(l, v)| LabeledSample::new(format!("c{l}"), FeatureVector::new(grid, v.clone()).unwrap()))
        .collect();
    KnnModel::fit(samples, k, backend).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1200))]

    #[test]
    fn brute_and_kd_tree_agree((dims, data, q, k) in case()) {
        let grid = GridSpec::new(1, dims).unwrap();
        let q = FeatureVector::new(grid, q).unwrap();
        let a = fit(dims, &data, k, Backend::Brute);
        let b = fit(dims, &data, k, Backend::KdTree);
        prop_assert_eq!(a.neighbors(&q).unwrap(), b.neighbors(&q).unwrap());
        let (ca, cb) = (a.classify(&q).unwrap(), b.classify(&q).unwrap());
        prop_assert_eq!((ca.label, ca.votes), (cb.label, cb.votes));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn text_round_trip_keeps_answers((dims, data, q, k) in case()) {
        let m = fit(dims, &data, k, Backend::KdTree);
        let back = KnnModel::<f64>::parse(&m.to_text()).unwrap();
        let q = FeatureVector::new(GridSpec::new(1, dims).unwrap(), q).unwrap();
        prop_assert_eq!(m.classify(&q).unwrap(), back.classify(&q).unwrap());
    }
}

#[test]
fn self_match_with_k1() {
    let data: Vec<(u8, Vec<f64>)> = (0..30).map(|i| ((i % 3) as u8, vec![i as f64, (i * i % 7) as f64])).collect();
    let m = fit(2, &data, 1, Backend::KdTree);
    for s in m.samples() {
        assert_eq!(m.classify(&s.features).unwrap().label, s.label);
    }
}
