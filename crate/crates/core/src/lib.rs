//! Sign-language recognition from RGB frames.
//!
//! Frames flow through skin segmentation, face elimination, stabilization,
//! hand tracking and grid features. Still hands are classified by k-NN, and
//! per-frame motion/pose symbols feed a bank of left-to-right HMMs that
//! recognizes whole gestures.
//!
//! The numeric cores ([`grid_features`], [`knn`], [`gesture_hmm`]) are
//! generic over [`Scalar`]; the aliases below fix `f64`, which is what the
//! pipeline and the model files use.

pub mod error;
pub mod face;
pub mod gesture_hmm;
pub mod grid_features;
pub mod hand_tracker;
pub mod imaging;
pub mod knn;
pub mod net;
pub mod pipeline;
pub mod scalar;
pub mod stabilizer;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Real = f64;
pub type Features = grid_features::FeatureVector<Real>;
pub type Sample = knn::LabeledSample<Real>;
pub type PoseModel = knn::KnnModel<Real>;
pub type Chain = gesture_hmm::HmmChain<Real>;
pub type Bank = gesture_hmm::GestureBank<Real>;
