//! End-to-end recognition: configuration, synthetic data, frame processing,
//! model persistence and evaluation.

pub mod config;
pub mod dataset;
pub mod eval;
pub mod models;
pub mod process;
pub mod synth;
pub mod training;

pub use config::{FaceSource, PipelineConfig};
pub use eval::{evaluate_gestures, evaluate_poses, sweep_grids, train_test_split, EvaluationReport, SweepRow};
pub use models::{load_models, save_models, ModelSet};
pub use process::{
    clean_mask, hand_from_frame, hand_from_mask, run_take, FrameResult, Pipeline, PoseResult, SegmentOutcome,
    StageTimings, TakeOutcome, STAGES,
};
pub use training::{fit_pose_model, train_gesture_bank};
