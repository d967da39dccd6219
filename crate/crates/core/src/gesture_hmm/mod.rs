//! Discrete left-to-right HMM gesture recognition: observation encoding,
//! scaled forward scoring, Baum-Welch training, a scoring bank with
//! rejection, and absence-based temporal segmentation.

mod bank;
mod chain;
mod segment;
mod symbols;
mod train;

pub use bank::{calibrate_threshold, GestureBank, GestureDecision, GestureDefinition, DEFAULT_REJECT_MARGIN};
pub use chain::{forward_log_likelihood, init_chain, HmmChain};
pub use segment::{segment_stream, Segmenter, StreamEvent, DEFAULT_DEBOUNCE};
pub use symbols::{encode, FrameTuple, Observation, SymbolTable, MOTION_SYMBOLS};
pub use train::{baum_welch_step, baum_welch_train, TrainOptions, TrainReport, EMISSION_FLOOR};
