use std::sync::Arc;

mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use islr_core::face::{FaceProvider, HeuristicParams};
use islr_core::gesture_hmm::StreamEvent;
use islr_core::pipeline::synth::{self, TakeNoise};
use islr_core::pipeline::{run_take, Pipeline, PipelineConfig};

#[test]
fn rendered_takes_reproduce_their_scripts() {
    let cfg = PipelineConfig::default();
    let models = common::models(&cfg);
    let face = Arc::new(FaceProvider::Heuristic(HeuristicParams::default()));
    let mut p = Pipeline::new(cfg.clone(), &models, face).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (i, script) in synth::gesture_scripts().iter().enumerate() {
        let tuples = synth::script_tuples(script, TakeNoise::none(), &mut rng);
        let stream = synth::take_stream(&tuples, cfg.debounce);
        let take = synth::render_take(&stream, i as u64);
        let out = run_take(&mut p, &take.frames).unwrap();
        assert!(out.frames.iter().all(|r| r.face.is_some()), "{}: face lost", script.name);
        let got: Vec<StreamEvent> = out
            .frames
            .iter()
            .map(|r| match &r.tuple {
                Some(t) => StreamEvent::Present(t.clone()),
                None => StreamEvent::Absent,
            })
            .collect();
        assert_eq!(got, stream, "{}", script.name);
        assert_eq!(out.segments.len(), 1);
        assert_eq!(out.decision().unwrap().decision.label.as_deref(), Some(script.name));
    }
}
