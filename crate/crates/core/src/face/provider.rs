use std::collections::HashMap;
use std::path::Path;

use super::{detect_face, FaceBox, LinearFaceModel};
use crate::error::{Error, Result};
use crate::imaging::{connected_components, segment_skin, Frame};

/// Shape filter for the skin-blob face heuristic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeuristicParams {
    pub min_aspect: f64,
    pub max_aspect: f64,
    /// Minimum blob area as a fraction of the frame.
    pub min_area_fraction: f64,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        HeuristicParams {
            min_aspect: 0.6,
            max_aspect: 1.4,
            min_area_fraction: 0.02,
        }
    }
}

/// Source of per-frame face boxes.
#[derive(Clone, Debug)]
pub enum FaceProvider {
    /// Never reports a face.
    Disabled,
    /// Boxes listed per frame index in a sidecar file.
    Annotation(HashMap<usize, FaceBox>),
    /// Topmost roughly-square skin blob.
    Heuristic(HeuristicParams),
    /// Sliding-window HOG detector.
    Hog(LinearFaceModel),
}

impl FaceProvider {
    pub fn annotation_file(path: impl AsRef<Path>) -> Result<Self> {
        Ok(FaceProvider::Annotation(parse_annotations(&std::fs::read_to_string(path)?)?))
    }

    pub fn face(&self, frame_index: usize, f: &Frame) -> Option<FaceBox> {
        match self {
            FaceProvider::Disabled => None,
            FaceProvider::Annotation(boxes) => boxes.get(&frame_index).copied(),
            FaceProvider::Heuristic(p) => heuristic_face(f, p),
            FaceProvider::Hog(model) => detect_face(f, model),
        }
    }
}

/// Parses `<frame_index> <x_min> <y_min> <x_max> <y_max>` lines.
pub fn parse_annotations(text: &str) -> Result<HashMap<usize, FaceBox>> {
    let mut boxes = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let vals: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::parse(i + 1, format!("bad annotation field: {e}")))?;
        let [idx, x0, y0, x1, y1] = vals[..] else {
            return Err(Error::parse(i + 1, format!("expected 5 fields, got {}", vals.len())));
        };
        if x0 > x1 || y0 > y1 {
            return Err(Error::parse(i + 1, "inverted box"));
        }
        boxes.insert(idx, FaceBox::new(x0, y0, x1, y1));
    }
    Ok(boxes)
}

fn heuristic_face(f: &Frame, p: &HeuristicParams) -> Option<FaceBox> {
    let min_area = p.min_area_fraction * (f.width() * f.height()) as f64;
    connected_components(&segment_skin(f))
        .into_iter()
        .filter(|b| {
            let aspect = b.bbox.width() as f64 / b.bbox.height() as f64;
            b.area as f64 >= min_area && (p.min_aspect..=p.max_aspect).contains(&aspect)
        })
        .min_by_key(|b| (b.bbox.y_min, b.bbox.x_min))
        .map(|b| FaceBox {
            bbox: b.bbox,
            score: 1.0,
        })
}
