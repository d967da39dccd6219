//! Persisted model set: static pose classifier, intermediate pose
//! classifier and gesture bank, stored side by side in one directory.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::{Bank, PoseModel};

pub const POSE_FILE: &str = "pose.knn";
pub const INTERMEDIATE_FILE: &str = "intermediate.knn";
pub const GESTURE_FILE: &str = "gestures.hmm";

#[derive(Clone, Debug, Default)]
pub struct ModelSet {
    /// Classifier for static poses (digits and letters).
    pub pose: Option<PoseModel>,
    /// Classifier for the intermediate poses that occur inside gestures.
    pub intermediate: Option<PoseModel>,
    pub gestures: Option<Bank>,
}

impl ModelSet {
    pub fn is_empty(&self) -> bool {
        self.pose.is_none() && self.intermediate.is_none() && self.gestures.is_none()
    }
}

fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

/// Writes every present model into `dir`, creating it if needed.
pub fn save_models(dir: impl AsRef<Path>, models: &ModelSet) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    if let Some(m) = &models.pose {
        m.save(path(dir, POSE_FILE))?;
    }
    if let Some(m) = &models.intermediate {
        m.save(path(dir, INTERMEDIATE_FILE))?;
    }
    if let Some(b) = &models.gestures {
        b.save(path(dir, GESTURE_FILE))?;
    }
    Ok(())
}

/// Loads whichever model files exist in `dir`; fails if there are none.
pub fn load_models(dir: impl AsRef<Path>) -> Result<ModelSet> {
    let dir = dir.as_ref();
    let load_knn = |name| -> Result<Option<PoseModel>> {
        let p = path(dir, name);
        p.exists().then(|| PoseModel::load(&p)).transpose()
    };
    let gp = path(dir, GESTURE_FILE);
    let set = ModelSet {
        pose: load_knn(POSE_FILE)?,
        intermediate: load_knn(INTERMEDIATE_FILE)?,
        gestures: gp.exists().then(|| Bank::load(&gp)).transpose()?,
    };
    if set.is_empty() {
        return Err(Error::InvalidArgument(format!("no model files in {}", dir.display())));
    }
    Ok(set)
}
