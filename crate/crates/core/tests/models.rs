mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use islr_core::grid_features::FeatureVector;
use islr_core::pipeline::{load_models, save_models, ModelSet, PipelineConfig};
use islr_core::{Bank, Error, PoseModel};

#[test]
fn model_set_round_trip() {
    let cfg = PipelineConfig::default();
    let set = common::models(&cfg);
    let dir = tempfile::tempdir().unwrap();
    save_models(dir.path(), &set).unwrap();
    let back = load_models(dir.path()).unwrap();
    assert!(back.pose.is_none());

    let (a, b) = (set.intermediate.unwrap(), back.intermediate.unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let v: Vec<f64> = (0..a.grid().len()).map(|_| rng.gen_range(0.0..1.0)).collect();
        let q = FeatureVector::new(a.grid(), v).unwrap();
        let (ca, cb) = (a.classify(&q).unwrap(), b.classify(&q).unwrap());
        assert_eq!((ca.label, ca.votes), (cb.label, cb.votes));
    }

    let (ga, gb) = (set.gestures.unwrap(), back.gestures.unwrap());
    for _ in 0..50 {
        let obs: Vec<usize> = (0..rng.gen_range(1..15)).map(|_| rng.gen_range(0..13)).collect();
        let (da, db) = (ga.classify(&obs).unwrap(), gb.classify(&obs).unwrap());
        assert_eq!(da.label, db.label);
        for (x, y) in da.scores.iter().zip(&db.scores) {
            assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{x} vs {y}");
        }
    }
}

#[test]
fn empty_directory_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(load_models(dir.path()).is_err());
    save_models(dir.path(), &ModelSet::default()).unwrap();
    assert!(load_models(dir.path()).is_err());
}

#[test]
fn truncated_and_versioned_files() {
    let cfg = PipelineConfig::default();
    let set = common::models(&cfg);
    let knn = set.intermediate.unwrap().to_text();
    let lines: Vec<&str> = knn.lines().collect();
    let cut = lines[..lines.len() / 2].join("\n");
    match PoseModel::parse(&cut) {
        Err(Error::Parse { line, .. }) => assert!(line >= 1),
        other => panic!("{other:?}"),
    }
    let v9 = knn.replacen("KNN v1", "KNN v9", 1);
    assert!(matches!(PoseModel::parse(&v9), Err(Error::Version(_))));

    let bank = set.gestures.unwrap().to_text();
    let lines: Vec<&str> = bank.lines().collect();
    let cut = lines[..lines.len() - 1].join("\n");
    assert!(matches!(Bank::parse(&cut), Err(Error::Parse { .. })));
}
