//! Camera-shake cancellation by integer translation toward the reference
//! face position.

use crate::face::FaceBox;
use crate::imaging::Frame;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StabilizerState {
    /// Face center at the first frame of the segment that had a face.
    pub reference_center: Option<(f64, f64)>,
    pub last_center: Option<(f64, f64)>,
    /// Shift applied to the most recent frame.
    pub last_shift: (i64, i64),
    /// Set when the segment's first frame had no face.
    pub disabled: bool,
    started: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stabilized {
    pub frame: Frame,
    pub shift: (i64, i64),
    /// Stabilization is off for this segment (no face on its first frame).
    pub disabled: bool,
}

impl StabilizerState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Forgets the reference; the next frame starts a new segment.
    pub fn reset(&mut self) {
        *self = Self::default();
    }

    /// Translates `f` so the face sits at the reference center. Frames without
    /// a face reuse the previous shift.
    pub fn stabilize(&mut self, f: &Frame, face: Option<&FaceBox>) -> Stabilized {
        if !self.started {
            self.started = true;
            self.disabled = face.is_none();
        }
        if self.disabled {
            return Stabilized {
                frame: f.clone(),
                shift: (0, 0),
                disabled: true,
            };
        }
        if let Some(face) = face {
            let c = face.center();
            let r = *self.reference_center.get_or_insert(c);
            self.last_center = Some(c);
            self.last_shift = ((r.0 - c.0).round() as i64, (r.1 - c.1).round() as i64);
        }
        let (dx, dy) = self.last_shift;
        let frame = if (dx, dy) == (0, 0) {
            f.clone()
        } else {
            f.translated(dx, dy)
        };
        Stabilized {
            frame,
            shift: self.last_shift,
            disabled: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn face_at(cx: usize, cy: usize) -> FaceBox {
        FaceBox::new(cx - 10, cy - 10, cx + 10, cy + 10)
    }

    fn gradient_frame() -> Frame {
        let mut f = Frame::new(200, 200);
        for y in 0..200 {
            for x in 0..200 {
                f.set(x, y, [x as u8, y as u8, 7]);
            }
        }
        f
    }

    #[test]
    fn unchanged_center_is_identity() {
        let f = gradient_frame();
        let mut s = StabilizerState::new();
        s.stabilize(&f, Some(&face_at(100, 100)));
        let out = s.stabilize(&f, Some(&face_at(100, 100)));
        assert_eq!(out.frame, f);
        assert_eq!(out.shift, (0, 0));
    }

    #[test]
    fn shift_opposes_face_motion() {
        let f = gradient_frame();
        let mut s = StabilizerState::new();
        s.stabilize(&f, Some(&face_at(100, 100)));
        let out = s.stabilize(&f, Some(&face_at(110, 100)));
        assert_eq!(out.shift, (-10, 0));
        for y in 0..200 {
            for x in 190..200 {
                assert_eq!(out.frame.get(x, y), [0, 0, 0]);
            }
            assert_eq!(out.frame.get(0, y), f.get(10, y));
        }
        assert_eq!((out.frame.width(), out.frame.height()), (200, 200));
    }

    #[test]
    fn shift_sequence() {
        let f = gradient_frame();
        let mut s = StabilizerState::new();
        let shifts: Vec<_> = [(100, 100), (110, 100), (100, 100)]
            .iter()
            .map(|&(x, y)| s.stabilize(&f, Some(&face_at(x, y))).shift)
            .collect();
        assert_eq!(shifts, vec![(0, 0), (-10, 0), (0, 0)]);
    }

    #[test]
    fn lost_face_keeps_last_shift() {
        let f = gradient_frame();
        let mut s = StabilizerState::new();
        s.stabilize(&f, Some(&face_at(100, 100)));
        s.stabilize(&f, Some(&face_at(104, 97)));
        let out = s.stabilize(&f, None);
        assert_eq!(out.shift, (-4, 3));
        assert_eq!(s.last_center, Some((104.0, 97.0)));
    }

    #[test]
    fn no_face_on_first_frame_disables() {
        let f = gradient_frame();
        let mut s = StabilizerState::new();
        assert!(s.stabilize(&f, None).disabled);
        let out = s.stabilize(&f, Some(&face_at(120, 100)));
        assert!(out.disabled);
        assert_eq!(out.frame, f);
        s.reset();
        assert!(!s.stabilize(&f, Some(&face_at(120, 100))).disabled);
    }
}
