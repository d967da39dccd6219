//! Model fitting from hands and observation sequences.

use crate::error::{Error, Result};
use crate::gesture_hmm::{baum_welch_train, calibrate_threshold, GestureDefinition, SymbolTable, TrainReport};
use crate::imaging::Blob;

use super::config::PipelineConfig;
use super::eval::samples_for_grid;
use crate::{Bank, PoseModel};

pub fn fit_pose_model(hands: &[(String, Blob)], cfg: &PipelineConfig) -> Result<PoseModel> {
    PoseModel::fit(samples_for_grid(hands, cfg.grid), cfg.k, cfg.backend)
}

/// Trains one chain per definition on its sequences (same order) and
/// calibrates the rejection threshold on the training data.
pub fn train_gesture_bank(
    defs: &[GestureDefinition],
    table: SymbolTable,
    sequences: &[Vec<Vec<usize>>],
    cfg: &PipelineConfig,
) -> Result<(Bank, Vec<TrainReport<f64>>)> {
    if defs.len() != sequences.len() {
        return Err(Error::DimensionMismatch {
            expected: defs.len(),
            got: sequences.len(),
        });
    }
    let mut reports = Vec::with_capacity(defs.len());
    for (def, seqs) in defs.iter().zip(sequences) {
        let seqs: Vec<Vec<usize>> = seqs.iter().filter(|s| !s.is_empty()).cloned().collect();
        if seqs.is_empty() {
            return Err(Error::InvalidArgument(format!("no training sequences for `{}`", def.name)));
        }
        let init = def.init_chain(&table)?;
        reports.push(baum_welch_train(&init, &seqs, cfg.hmm)?);
    }
    let chains: Vec<_> = reports.iter().map(|r| r.chain.clone()).collect();
    let threshold = calibrate_threshold(&chains, sequences, cfg.reject_margin)?;
    Ok((Bank::new(chains, table, threshold)?, reports))
}
