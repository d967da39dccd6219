use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::face::FaceNeckExpansion;
use crate::gesture_hmm::{TrainOptions, DEFAULT_DEBOUNCE, DEFAULT_REJECT_MARGIN};
use crate::grid_features::GridSpec;
use crate::hand_tracker::HysteresisRadii;
use crate::imaging::StructuringElement;
use crate::knn::{Backend, DEFAULT_K};

/// Which face source a pipeline uses.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum FaceSource {
    None,
    #[default]
    Heuristic,
    /// `faces.txt` sidecar next to the frames.
    Annotation,
    /// Linear HOG model read from this file.
    Hog(PathBuf),
}

impl FromStr for FaceSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(FaceSource::None),
            "heuristic" => Ok(FaceSource::Heuristic),
            "annotation" => Ok(FaceSource::Annotation),
            _ => match s.strip_prefix("hog:") {
                Some(p) if !p.is_empty() => Ok(FaceSource::Hog(PathBuf::from(p))),
                _ => Err(Error::InvalidArgument(format!(
                    "face provider `{s}` is not none|heuristic|annotation|hog:<path>"
                ))),
            },
        }
    }
}

impl std::fmt::Display for FaceSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FaceSource::None => f.write_str("none"),
            FaceSource::Heuristic => f.write_str("heuristic"),
            FaceSource::Annotation => f.write_str("annotation"),
            FaceSource::Hog(p) => write!(f, "hog:{}", p.display()),
        }
    }
}

/// Every tunable of the recognition pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub grid: GridSpec,
    pub k: usize,
    pub backend: Backend,
    pub se_radius: usize,
    /// Open and close passes applied to the skin mask.
    pub morph_iterations: usize,
    /// Minimum hand area as a fraction of the frame.
    pub min_area_fraction: f64,
    pub radii: HysteresisRadii,
    pub debounce: usize,
    pub face: FaceSource,
    pub face_expansion: FaceNeckExpansion,
    pub reject_margin: f64,
    pub train_fraction: f64,
    pub hmm: TrainOptions,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            grid: GridSpec::default(),
            k: DEFAULT_K,
            backend: Backend::KdTree,
            se_radius: 1,
            morph_iterations: 1,
            min_area_fraction: 0.005,
            radii: HysteresisRadii::default(),
            debounce: DEFAULT_DEBOUNCE,
            face: FaceSource::Heuristic,
            face_expansion: FaceNeckExpansion::default(),
            reject_margin: DEFAULT_REJECT_MARGIN,
            train_fraction: 0.7,
            hmm: TrainOptions::default(),
        }
    }
}

impl PipelineConfig {
    pub fn se(&self) -> StructuringElement {
        StructuringElement::square(self.se_radius)
    }

    pub fn min_area(&self, width: usize, height: usize) -> usize {
        ((self.min_area_fraction * (width * height) as f64).ceil() as usize).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.k == 0 {
            return bad("k must be >= 1");
        }
        if self.se_radius == 0 {
            return bad("se_radius must be >= 1");
        }
        if !(0.0..1.0).contains(&self.min_area_fraction) {
            return bad("min_area_fraction must be in [0, 1)");
        }
        if !(self.radii.moving > 0.0 && self.radii.rest > 0.0) {
            return bad("hysteresis radii must be positive");
        }
        if self.debounce == 0 {
            return bad("debounce must be >= 1");
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return bad("train_fraction must be in (0, 1)");
        }
        if self.face_expansion.width_scale < 1.0 || self.face_expansion.height_scale < 1.0 {
            return bad("face expansion factors must be >= 1");
        }
        if self.hmm.floor <= 0.0 || self.hmm.floor >= 0.5 {
            return bad("hmm_floor must be in (0, 0.5)");
        }
        Ok(())
    }

    /// Reads flat `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(ln, "expected `key = value`"))?;
            cfg.set(key.trim(), value.trim()).map_err(|e| Error::parse(ln, e.to_string()))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::InvalidArgument(format!("bad value `{v}` for `{key}`")))
        }
        match key {
            "grid" => self.grid = value.parse()?,
            "k" => self.k = num(key, value)?,
            "backend" => self.backend = value.parse()?,
            "se_radius" => self.se_radius = num(key, value)?,
            "morph_iterations" => self.morph_iterations = num(key, value)?,
            "min_area_fraction" => self.min_area_fraction = num(key, value)?,
            "radius_rest" => self.radii.rest = num(key, value)?,
            "radius_moving" => self.radii.moving = num(key, value)?,
            "debounce" => self.debounce = num(key, value)?,
            "face_provider" => self.face = value.parse()?,
            "face_width_scale" => self.face_expansion.width_scale = num(key, value)?,
            "face_height_scale" => self.face_expansion.height_scale = num(key, value)?,
            "reject_margin" => self.reject_margin = num(key, value)?,
            "train_fraction" => self.train_fraction = num(key, value)?,
            "hmm_max_iter" => self.hmm.max_iter = num(key, value)?,
            "hmm_tol" => self.hmm.tol = num(key, value)?,
            "hmm_floor" => self.hmm.floor = num(key, value)?,
            _ => return Err(Error::InvalidArgument(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "grid = {}", self.grid);
        let _ = writeln!(s, "k = {}", self.k);
        let _ = writeln!(s, "backend = {}", self.backend);
        let _ = writeln!(s, "se_radius = {}", self.se_radius);
        let _ = writeln!(s, "morph_iterations = {}", self.morph_iterations);
        let _ = writeln!(s, "min_area_fraction = {}", self.min_area_fraction);
        let _ = writeln!(s, "radius_rest = {}", self.radii.rest);
        let _ = writeln!(s, "radius_moving = {}", self.radii.moving);
        let _ = writeln!(s, "debounce = {}", self.debounce);
        let _ = writeln!(s, "face_provider = {}", self.face);
        let _ = writeln!(s, "face_width_scale = {}", self.face_expansion.width_scale);
        let _ = writeln!(s, "face_height_scale = {}", self.face_expansion.height_scale);
        let _ = writeln!(s, "reject_margin = {}", self.reject_margin);
        let _ = writeln!(s, "train_fraction = {}", self.train_fraction);
        let _ = writeln!(s, "hmm_max_iter = {}", self.hmm.max_iter);
        let _ = writeln!(s, "hmm_tol = {}", self.hmm.tol);
        let _ = writeln!(s, "hmm_floor = {}", self.hmm.floor);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = PipelineConfig::default();
        assert_eq!(PipelineConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn overrides_and_errors() {
        let cfg = PipelineConfig::parse("# tuned\ngrid = 15x20\nk=3\nface_provider = hog:/tmp/m.txt\n").unwrap();
        assert_eq!(cfg.grid, GridSpec::new(15, 20).unwrap());
        assert_eq!(cfg.k, 3);
        assert_eq!(cfg.face, FaceSource::Hog("/tmp/m.txt".into()));
        assert!(matches!(PipelineConfig::parse("k = 1\nwat = 2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(PipelineConfig::parse("k 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(PipelineConfig::parse("k = 0\n").is_err());
    }
}
