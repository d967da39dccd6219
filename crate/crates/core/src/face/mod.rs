//! Face localization and face-neck elimination.
//!
//! The demonstrator's face is always the largest skin region in frame, so it
//! has to be blacked out before the hand can be picked as the dominant blob.

mod detector;
mod hog;
mod provider;

pub use detector::{detect_face, LinearFaceModel, PYRAMID_SCALE, WINDOW_STRIDE};
pub use hog::{hog_descriptor, GrayImage, HogDescriptor, HogParams};
pub use provider::{parse_annotations, FaceProvider, HeuristicParams};

use crate::imaging::{BBox, Frame};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FaceBox {
    pub bbox: BBox,
    pub score: f64,
}

impl FaceBox {
    pub fn new(x_min: usize, y_min: usize, x_max: usize, y_max: usize) -> Self {
        FaceBox {
            bbox: BBox {
                x_min,
                y_min,
                x_max,
                y_max,
            },
            score: 0.0,
        }
    }

    pub fn center(&self) -> (f64, f64) {
        let b = &self.bbox;
        (
            (b.x_min + b.x_max) as f64 / 2.0,
            (b.y_min + b.y_max) as f64 / 2.0,
        )
    }

    /// Moves the box by `(dx, dy)` and clips it to a `width x height` frame.
    /// Returns `None` when nothing of the box remains inside.
    pub fn translated(&self, dx: i64, dy: i64, width: usize, height: usize) -> Option<FaceBox> {
        let b = &self.bbox;
        let x0 = (b.x_min as i64 + dx).max(0);
        let y0 = (b.y_min as i64 + dy).max(0);
        let x1 = (b.x_max as i64 + dx).min(width as i64 - 1);
        let y1 = (b.y_max as i64 + dy).min(height as i64 - 1);
        (x0 <= x1 && y0 <= y1).then(|| FaceBox {
            bbox: BBox {
                x_min: x0 as usize,
                y_min: y0 as usize,
                x_max: x1 as usize,
                y_max: y1 as usize,
            },
            score: self.score,
        })
    }
}

/// Geometry of the blacked-out face-neck region relative to the face box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FaceNeckExpansion {
    /// Width multiplier about the box center.
    pub width_scale: f64,
    /// Height multiplier, extended downward from the box top.
    pub height_scale: f64,
}

impl Default for FaceNeckExpansion {
    fn default() -> Self {
        FaceNeckExpansion {
            width_scale: 1.2,
            height_scale: 1.6,
        }
    }
}

const SNAP: f64 = 1e-9;

/// Region blacked out for `face`, clipped to the frame.
pub fn face_neck_region(face: &FaceBox, exp: FaceNeckExpansion, width: usize, height: usize) -> BBox {
    let b = &face.bbox;
    let w = (b.x_max - b.x_min) as f64;
    let h = (b.y_max - b.y_min) as f64;
    let margin = (exp.width_scale - 1.0) / 2.0 * w;
    let x_lo = (b.x_min as f64 - margin + SNAP).floor().max(0.0) as usize;
    let x_hi = ((b.x_max as f64 + margin - SNAP).ceil() as usize).min(width - 1);
    let y_hi = ((b.y_min as f64 + exp.height_scale * h - SNAP).ceil() as usize).min(height - 1);
    BBox {
        x_min: x_lo,
        y_min: b.y_min.min(height - 1),
        x_max: x_hi,
        y_max: y_hi.max(b.y_min.min(height - 1)),
    }
}

/// Copy of `f` with the expanded face-neck region painted black.
pub fn eliminate_face(f: &Frame, face: &FaceBox, exp: FaceNeckExpansion) -> Frame {
    let r = face_neck_region(face, exp, f.width(), f.height());
    let mut out = f.clone();
    out.fill_rect(
        r.x_min as i64,
        r.y_min as i64,
        r.x_max as i64,
        r.y_max as i64,
        [0, 0, 0],
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::segment_skin;

    #[test]
    fn whole_frame_box_blackens_everything() {
        let f = Frame::filled(40, 30, [180, 90, 60]);
        let out = eliminate_face(&f, &FaceBox::new(0, 0, 39, 29), FaceNeckExpansion::default());
        assert_eq!(out, Frame::new(40, 30));
    }

    #[test]
    fn expansion_arithmetic() {
        let r = face_neck_region(&FaceBox::new(10, 10, 20, 20), FaceNeckExpansion::default(), 100, 100);
        assert_eq!(
            r,
            BBox {
                x_min: 9,
                y_min: 10,
                x_max: 21,
                y_max: 26
            }
        );
        let f = Frame::filled(100, 100, [1, 1, 1]);
        let out = eliminate_face(&f, &FaceBox::new(10, 10, 20, 20), FaceNeckExpansion::default());
        for y in 0..100 {
            for x in 0..100 {
                let inside = (9..=21).contains(&x) && (10..=26).contains(&y);
                assert_eq!(out.get(x, y) == [0, 0, 0], inside, "({x},{y})");
            }
        }
    }

    #[test]
    fn face_only_skin_removed() {
        let mut f = Frame::new(80, 80);
        f.fill_rect(20, 10, 40, 35, [180, 90, 60]);
        let out = eliminate_face(&f, &FaceBox::new(20, 10, 40, 35), FaceNeckExpansion::default());
        assert_eq!(segment_skin(&out).count(), 0);
    }

    #[test]
    fn translated_box_clips() {
        let b = FaceBox::new(5, 5, 15, 15);
        assert_eq!(b.translated(-10, 0, 50, 50).unwrap().bbox.x_min, 0);
        assert!(b.translated(-20, 0, 50, 50).is_none());
    }
}
