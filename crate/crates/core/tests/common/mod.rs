#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use islr_core::gesture_hmm::{encode, GestureDefinition};
use islr_core::pipeline::synth::{self, Jitter, TakeNoise};
use islr_core::pipeline::{fit_pose_model, hand_from_mask, train_gesture_bank, ModelSet, PipelineConfig};
use islr_core::{Bank, PoseModel};

pub fn intermediate_model(cfg: &PipelineConfig) -> PoseModel {
    let masks = synth::synth_pose_masks(11, &synth::intermediate_classes(), 30, Jitter::default());
    let hands: Vec<_> = masks
        .iter()
        .map(|(l, m)| (l.clone(), hand_from_mask(m, cfg).expect("hand")))
        .collect();
    fit_pose_model(&hands, cfg).unwrap()
}

pub fn bank(cfg: &PipelineConfig) -> Bank {
    let scripts = synth::gesture_scripts();
    let defs: Vec<GestureDefinition> = scripts.iter().map(|s| s.definition()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let table = synth::gesture_symbol_table();
    let seqs: Vec<Vec<Vec<usize>>> = scripts
        .iter()
        .map(|s| {
            (0..10)
                .map(|_| encode(&synth::script_tuples(s, TakeNoise::default(), &mut rng), &table).unwrap())
                .collect()
        })
        .collect();
    train_gesture_bank(&defs, table, &seqs, cfg).unwrap().0
}

pub fn models(cfg: &PipelineConfig) -> ModelSet {
    ModelSet {
        pose: None,
        intermediate: Some(intermediate_model(cfg)),
        gestures: Some(bank(cfg)),
    }
}

/// Rendered frames of one noise-free take of script `index`.
pub fn take_frames(index: usize, seed: u64, debounce: usize) -> Vec<islr_core::imaging::Frame> {
    let script = &synth::gesture_scripts()[index];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tuples = synth::script_tuples(script, TakeNoise::none(), &mut rng);
    synth::render_take(&synth::take_stream(&tuples, debounce), seed).frames
}
