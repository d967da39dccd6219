//! Deterministic synthetic hand poses and gesture takes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::face::FaceBox;
use crate::gesture_hmm::{FrameTuple, GestureDefinition, StreamEvent, SymbolTable};
use crate::hand_tracker::Direction;
use crate::imaging::{BinaryMask, Frame, Rgb};

pub const SKIN: Rgb = [180, 90, 60];
pub const BACKGROUND: Rgb = [24, 24, 28];

/// Silhouette primitive in hand units (palm radius 1, y down).
#[derive(Clone, Copy, Debug, PartialEq)]
enum Primitive {
    Disk { c: (f64, f64), r: f64 },
    Capsule { a: (f64, f64), b: (f64, f64), r: f64 },
}

impl Primitive {
    fn contains(&self, p: (f64, f64)) -> bool {
        match *self {
            Primitive::Disk { c, r } => (p.0 - c.0).hypot(p.1 - c.1) <= r,
            Primitive::Capsule { a, b, r } => {
                let (dx, dy) = (b.0 - a.0, b.1 - a.1);
                let len2 = dx * dx + dy * dy;
                let t = if len2 == 0.0 {
                    0.0
                } else {
                    (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
                };
                (p.0 - a.0 - t * dx).hypot(p.1 - a.1 - t * dy) <= r
            }
        }
    }

    fn extent(&self) -> f64 {
        match *self {
            Primitive::Disk { c, r } => c.0.hypot(c.1) + r,
            Primitive::Capsule { a, b, r } => a.0.hypot(a.1).max(b.0.hypot(b.1)) + r,
        }
    }
}

/// Union of primitives.
#[derive(Clone, Debug, PartialEq)]
pub struct HandShape {
    parts: Vec<Primitive>,
}

fn rot(p: (f64, f64), deg: f64) -> (f64, f64) {
    let (s, c) = deg.to_radians().sin_cos();
    (p.0 * c - p.1 * s, p.0 * s + p.1 * c)
}

impl HandShape {
    fn palm() -> Vec<Primitive> {
        vec![Primitive::Disk { c: (0.0, 0.0), r: 1.0 }]
    }

    fn finger(angle: f64, len: f64) -> Primitive {
        Primitive::Capsule {
            a: rot((0.0, -0.5), angle),
            b: rot((0.0, -0.6 - len), angle),
            r: 0.22,
        }
    }

    fn thumb_side() -> Primitive {
        Primitive::Capsule {
            a: (-0.6, 0.1),
            b: (-1.6, -0.5),
            r: 0.25,
        }
    }

    fn fan(angles: &[f64], len: f64, thumb: bool) -> HandShape {
        let mut parts = Self::palm();
        parts.extend(angles.iter().map(|&a| Self::finger(a, len)));
        if thumb {
            parts.push(Self::thumb_side());
        }
        HandShape { parts }
    }

    fn rotated(mut self, deg: f64) -> HandShape {
        for p in &mut self.parts {
            *p = match *p {
                Primitive::Disk { c, r } => Primitive::Disk { c: rot(c, deg), r },
                Primitive::Capsule { a, b, r } => Primitive::Capsule {
                    a: rot(a, deg),
                    b: rot(b, deg),
                    r,
                },
            };
        }
        self
    }

    /// Shape for one of the intermediate poses, by name.
    pub fn intermediate(name: &str) -> Option<HandShape> {
        Some(match name {
            "Fist" => HandShape { parts: Self::palm() },
            "Thumbs_Up" => {
                let mut parts = Self::palm();
                parts.push(Primitive::Capsule {
                    a: (-0.3, -0.5),
                    b: (-0.3, -2.1),
                    r: 0.3,
                });
                HandShape { parts }
            }
            "Sun_Up" => Self::fan(&[-70.0, -35.0, 0.0, 35.0, 70.0], 1.3, false),
            "Flat_Palm" => HandShape {
                parts: vec![Primitive::Capsule {
                    a: (-1.7, 0.0),
                    b: (1.7, 0.0),
                    r: 0.6,
                }],
            },
            "Point" => Self::fan(&[0.0], 1.6, false),
            "Victory" => Self::fan(&[-22.0, 22.0], 1.5, false),
            "Three" => Self::fan(&[-28.0, 0.0, 28.0], 1.4, false),
            "Four" => Self::fan(&[-30.0, -10.0, 10.0, 30.0], 1.4, false),
            "Open_Palm" => Self::fan(&[-30.0, -10.0, 10.0, 30.0], 1.4, true),
            _ => return None,
        })
    }

    /// Procedural shape for static pose class `index`: finger count, thumb
    /// and a spread/tilt variant.
    pub fn class(index: usize) -> HandShape {
        let fingers = index % 6;
        let thumb = (index / 6) % 2 == 1;
        let variant = (index / 12) % 3;
        let spread = if variant == 1 { 32.0 } else { 15.0 };
        let angles: Vec<f64> = (0..fingers)
            .map(|i| (i as f64 - (fingers as f64 - 1.0) / 2.0) * spread)
            .collect();
        let mut shape = Self::fan(&angles, 1.5, thumb);
        if fingers == 0 && !thumb && variant > 0 {
            let (a, b) = if variant == 1 {
                ((-1.2, 0.0), (1.2, 0.0))
            } else {
                ((0.0, -1.2), (0.0, 1.2))
            };
            shape.parts = vec![Primitive::Capsule { a, b, r: 0.8 }];
        }
        match variant {
            1 => shape = shape.rotated(-35.0),
            2 => shape = shape.rotated(90.0),
            _ => {}
        }
        shape
    }

    fn extent(&self) -> f64 {
        self.parts.iter().map(Primitive::extent).fold(0.0, f64::max)
    }

    /// Rasterizes the shape with its origin at `origin` and `scale` pixels
    /// per unit, flipping boundary pixels with probability `noise`.
    pub fn rasterize(
        &self,
        width: usize,
        height: usize,
        origin: (f64, f64),
        scale: f64,
        noise: f64,
        rng: &mut impl Rng,
    ) -> BinaryMask {
        let ext = self.extent() * scale + 1.0;
        let x0 = (origin.0 - ext).floor().max(0.0) as usize;
        let y0 = (origin.1 - ext).floor().max(0.0) as usize;
        let x1 = ((origin.0 + ext).ceil() as usize).min(width - 1);
        let y1 = ((origin.1 + ext).ceil() as usize).min(height - 1);
        let mut m = BinaryMask::new(width, height);
        for y in y0..=y1 {
            for x in x0..=x1 {
                let p = ((x as f64 - origin.0) / scale, (y as f64 - origin.1) / scale);
                if self.parts.iter().any(|s| s.contains(p)) {
                    m.set(x, y, true);
                }
            }
        }
        if noise > 0.0 {
            let snapshot = m.clone();
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let v = snapshot.get(x, y);
                    let (xi, yi) = (x as i64, y as i64);
                    let edge = [(-1, 0), (1, 0), (0, -1), (0, 1)]
                        .iter()
                        .any(|(dx, dy)| snapshot.get_or_false(xi + dx, yi + dy) != v);
                    if edge && rng.gen_bool(noise) {
                        m.set(x, y, !v);
                    }
                }
            }
        }
        m
    }
}

/// Sample-to-sample variation of synthetic poses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jitter {
    /// Maximum translation in pixels along each axis.
    pub translation: f64,
    /// Maximum relative scale change.
    pub scale: f64,
    /// Flip probability for boundary pixels.
    pub boundary_noise: f64,
}

impl Default for Jitter {
    fn default() -> Self {
        Jitter {
            translation: 10.0,
            scale: 0.1,
            boundary_noise: 0.15,
        }
    }
}

impl Jitter {
    pub fn none() -> Self {
        Jitter {
            translation: 0.0,
            scale: 0.0,
            boundary_noise: 0.0,
        }
    }
}

pub const POSE_CANVAS: usize = 128;
const POSE_SCALE: f64 = 14.0;

/// Digits then letters, matching the 33 static classes.
pub fn static_class_names(count: usize) -> Vec<String> {
    let digits = (0..10).map(|d| d.to_string());
    let letters = (b'A'..=b'Z').map(|c| (c as char).to_string());
    let extra = (0..).map(|i| format!("C{i}"));
    digits.chain(letters).chain(extra).take(count).collect()
}

pub fn intermediate_pose_names() -> Vec<String> {
    [
        "Thumbs_Up",
        "Sun_Up",
        "Flat_Palm",
        "Fist",
        "Point",
        "Victory",
        "Three",
        "Four",
        "Open_Palm",
    ]
    .map(String::from)
    .to_vec()
}

fn jittered_mask(shape: &HandShape, jitter: &Jitter, rng: &mut ChaCha8Rng) -> BinaryMask {
    let c = POSE_CANVAS as f64 / 2.0;
    let mut span = |a: f64| if a > 0.0 { rng.gen_range(-a..=a) } else { 0.0 };
    let tx = span(jitter.translation);
    let ty = span(jitter.translation);
    let s = 1.0 + span(jitter.scale);
    shape.rasterize(
        POSE_CANVAS,
        POSE_CANVAS,
        (c + tx, c + 6.0 + ty),
        POSE_SCALE * s,
        jitter.boundary_noise,
        rng,
    )
}

/// `per_class` masks for each `(label, shape)` pair, class-major order.
pub fn synth_pose_masks(
    seed: u64,
    classes: &[(String, HandShape)],
    per_class: usize,
    jitter: Jitter,
) -> Vec<(String, BinaryMask)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(classes.len() * per_class);
    for (label, shape) in classes {
        for _ in 0..per_class {
            out.push((label.clone(), jittered_mask(shape, &jitter, &mut rng)));
        }
    }
    out
}

/// The first `count` procedural static classes with their names.
pub fn static_classes(count: usize) -> Vec<(String, HandShape)> {
    static_class_names(count)
        .into_iter()
        .enumerate()
        .map(|(i, n)| (n, HandShape::class(i)))
        .collect()
}

pub fn intermediate_classes() -> Vec<(String, HandShape)> {
    intermediate_pose_names()
        .into_iter()
        .map(|n| {
            let s = HandShape::intermediate(&n).expect("known pose");
            (n, s)
        })
        .collect()
}

/// Step of a gesture script.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScriptStep {
    Pose(&'static str),
    Motion(Direction),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GestureScript {
    pub name: &'static str,
    pub steps: Vec<ScriptStep>,
}

impl GestureScript {
    /// One state per step, each hinted toward its step's symbol.
    pub fn definition(&self) -> GestureDefinition {
        GestureDefinition {
            name: self.name.to_string(),
            states: self.steps.len(),
            hints: self
                .steps
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let label = match s {
                        ScriptStep::Pose(p) => p.to_string(),
                        ScriptStep::Motion(d) => d.name().to_string(),
                    };
                    (i, label)
                })
                .collect(),
        }
    }
}

/// Twelve gesture scripts over the intermediate poses; the first is the
/// Good-Afternoon pattern (thumbs up, move up, sun up).
pub fn gesture_scripts() -> Vec<GestureScript> {
    use Direction::*;
    use ScriptStep::{Motion as M, Pose as P};
    let s = |name, steps| GestureScript { name, steps };
    vec![
        s("Good_Afternoon", vec![P("Thumbs_Up"), M(Up), P("Sun_Up")]),
        s("Good_Morning", vec![P("Fist"), M(Up), P("Open_Palm")]),
        s("Thank_You", vec![P("Flat_Palm"), M(Down), P("Fist")]),
        s("Hello", vec![P("Open_Palm"), M(Right), M(Left)]),
        s("Goodbye", vec![P("Sun_Up"), M(Left), P("Sun_Up")]),
        s("Yes", vec![P("Fist"), M(Down), M(Up)]),
        s("No", vec![P("Victory"), M(Right), M(Left)]),
        s("Please", vec![P("Flat_Palm"), M(Right), P("Four")]),
        s("Sorry", vec![P("Fist"), M(Left), P("Point")]),
        s("Help", vec![P("Thumbs_Up"), M(Down), P("Flat_Palm"), M(Up)]),
        s("Water", vec![P("Three"), M(Down), P("Victory")]),
        s("Home", vec![P("Four"), M(Left), P("Fist"), M(Right)]),
    ]
}

pub fn gesture_symbol_table() -> SymbolTable {
    SymbolTable::new(intermediate_pose_names()).expect("valid pose names")
}

/// Variation applied when expanding a script into a take.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TakeNoise {
    /// Probability that a still frame's pose label is replaced.
    pub substitution: f64,
    /// Maximum +/- change of each step's nominal duration.
    pub duration: usize,
}

impl Default for TakeNoise {
    fn default() -> Self {
        TakeNoise {
            substitution: 0.05,
            duration: 1,
        }
    }
}

impl TakeNoise {
    pub fn none() -> Self {
        TakeNoise {
            substitution: 0.0,
            duration: 0,
        }
    }
}

pub const STEP_FRAMES: usize = 3;
/// Absent frames before and after the hand in a rendered take.
pub const LEAD_ABSENT: usize = 2;

/// Present-frame tuples for one take of `script`.
pub fn script_tuples(script: &GestureScript, noise: TakeNoise, rng: &mut impl Rng) -> Vec<FrameTuple> {
    let poses = intermediate_pose_names();
    let mut out = Vec::new();
    for step in &script.steps {
        let d = noise.duration as i64;
        let frames = (STEP_FRAMES as i64 + if d > 0 { rng.gen_range(-d..=d) } else { 0 }).max(1) as usize;
        for _ in 0..frames {
            out.push(match step {
                ScriptStep::Motion(dir) => FrameTuple::Motion(*dir),
                ScriptStep::Pose(p) => {
                    let label = if noise.substitution > 0.0 && rng.gen_bool(noise.substitution) {
                        poses
                            .iter()
                            .filter(|q| q.as_str() != *p)
                            .collect::<Vec<_>>()
                            .choose(rng)
                            .map(|q| q.to_string())
                            .expect("other poses exist")
                    } else {
                        p.to_string()
                    };
                    FrameTuple::Pose(label)
                }
            });
        }
    }
    out
}

/// Full stream for a take: leading absence, the tuples, trailing absence
/// long enough to close the segment.
pub fn take_stream(tuples: &[FrameTuple], debounce: usize) -> Vec<StreamEvent> {
    let mut ev = vec![StreamEvent::Absent; LEAD_ABSENT];
    ev.extend(tuples.iter().cloned().map(StreamEvent::Present));
    ev.extend(vec![StreamEvent::Absent; debounce.max(LEAD_ABSENT)]);
    ev
}

/// Uniformly random symbol sequence.
pub fn impostor_sequence(rng: &mut impl Rng, symbols: usize, min_len: usize, max_len: usize) -> Vec<usize> {
    let len = rng.gen_range(min_len..=max_len);
    (0..len).map(|_| rng.gen_range(0..symbols)).collect()
}

pub const TAKE_WIDTH: usize = 320;
pub const TAKE_HEIGHT: usize = 240;
const TAKE_HAND_SCALE: f64 = 13.0;
/// Per-frame hand displacement during motion steps.
pub const MOTION_STEP_PX: f64 = 22.0;
const FACE_CENTER: (usize, usize) = (160, 28);
const FACE_RADIUS: usize = 24;

/// Rendered frames of a take plus the face box of every frame.
pub struct RenderedTake {
    pub frames: Vec<Frame>,
    pub faces: Vec<FaceBox>,
}

fn face_mask(width: usize, height: usize) -> BinaryMask {
    let (cx, cy) = (FACE_CENTER.0 as f64, FACE_CENTER.1 as f64);
    let r = FACE_RADIUS as f64;
    BinaryMask::from_fn(width, height, |x, y| {
        let dx = (x as f64 - cx) / r;
        let dy = (y as f64 - cy) / (r * 1.1);
        dx * dx + dy * dy <= 1.0
    })
}

/// Renders a stream as `TAKE_WIDTH x TAKE_HEIGHT` frames with a face at the
/// top and the hand below it. Each pose is drawn with its centroid on the
/// current hand position, which moves by [`MOTION_STEP_PX`] per motion frame.
pub fn render_take(stream: &[StreamEvent], seed: u64) -> RenderedTake {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (TAKE_WIDTH, TAKE_HEIGHT);

    // hand path, centered in the safe zone below the face-neck region
    let mut pos = (0.0f64, 0.0f64);
    let mut path = Vec::with_capacity(stream.len());
    for ev in stream {
        if let StreamEvent::Present(FrameTuple::Motion(d)) = ev {
            let step = MOTION_STEP_PX;
            match d {
                Direction::Up => pos.1 -= step,
                Direction::Down => pos.1 += step,
                Direction::Left => pos.0 -= step,
                Direction::Right => pos.0 += step,
            }
        }
        path.push(pos);
    }
    let (mut lo, mut hi) = ((f64::MAX, f64::MAX), (f64::MIN, f64::MIN));
    for p in &path {
        lo = (lo.0.min(p.0), lo.1.min(p.1));
        hi = (hi.0.max(p.0), hi.1.max(p.1));
    }
    let zone_center = (160.0, 165.0);
    let off = (
        (zone_center.0 - (lo.0 + hi.0) / 2.0).round(),
        (zone_center.1 - (lo.1 + hi.1) / 2.0).round(),
    );

    let face = face_mask(w, h);
    let face_blob_box = {
        let blobs = crate::imaging::connected_components(&face);
        blobs[0].bbox
    };
    let face_box = FaceBox {
        bbox: face_blob_box,
        score: 1.0,
    };
    let mut last_pose = "Fist".to_string();
    let mut frames = Vec::with_capacity(stream.len());
    for (ev, p) in stream.iter().zip(&path) {
        let mut f = Frame::filled(w, h, BACKGROUND);
        f.paint_mask(&face, SKIN);
        if let StreamEvent::Present(t) = ev {
            if let FrameTuple::Pose(label) = t {
                last_pose = label.clone();
            }
            let shape = HandShape::intermediate(&last_pose).unwrap_or_else(|| HandShape::class(0));
            let target = (p.0 + off.0, p.1 + off.1);
            let m = shape.rasterize(w, h, target, TAKE_HAND_SCALE, 0.05, &mut rng);
            let m = recentered(&m, target);
            f.paint_mask(&m, SKIN);
        }
        frames.push(f);
    }
    RenderedTake {
        faces: vec![face_box; frames.len()],
        frames,
    }
}

/// Translates the mask so its centroid lands on `target` (nearest pixel).
fn recentered(m: &BinaryMask, target: (f64, f64)) -> BinaryMask {
    let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
    for y in 0..m.height() {
        for x in 0..m.width() {
            if m.get(x, y) {
                sx += x as f64;
                sy += y as f64;
                n += 1;
            }
        }
    }
    if n == 0 {
        return m.clone();
    }
    let dx = (target.0 - sx / n as f64).round() as i64;
    let dy = (target.1 - sy / n as f64).round() as i64;
    BinaryMask::from_fn(m.width(), m.height(), |x, y| m.get_or_false(x as i64 - dx, y as i64 - dy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gesture_hmm::encode;

    #[test]
    fn deterministic_masks() {
        let classes = static_classes(3);
        let a = synth_pose_masks(9, &classes, 4, Jitter::default());
        let b = synth_pose_masks(9, &classes, 4, Jitter::default());
        assert_eq!(a, b);
        let c = synth_pose_masks(10, &classes, 4, Jitter::default());
        assert_ne!(a, c);
    }

    #[test]
    fn zero_jitter_is_constant_per_class() {
        let classes = static_classes(4);
        let masks = synth_pose_masks(1, &classes, 5, Jitter::none());
        for chunk in masks.chunks(5) {
            assert!(chunk.iter().all(|(l, m)| *l == chunk[0].0 && *m == chunk[0].1));
        }
        assert_ne!(masks[0].1, masks[5].1);
    }

    #[test]
    fn static_shapes_are_distinct() {
        let classes = static_classes(33);
        let masks = synth_pose_masks(0, &classes, 1, Jitter::none());
        for i in 0..masks.len() {
            for j in i + 1..masks.len() {
                assert_ne!(masks[i].1, masks[j].1, "{} vs {}", masks[i].0, masks[j].0);
            }
        }
    }

    #[test]
    fn good_afternoon_script_encodes() {
        let script = &gesture_scripts()[0];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = script_tuples(script, TakeNoise::none(), &mut rng);
        assert_eq!(encode(&t, &gesture_symbol_table()).unwrap(), vec![4, 4, 4, 0, 0, 0, 5, 5, 5]);

        // with noise the encoding stays close: same step order
        let t = script_tuples(script, TakeNoise::default(), &mut rng);
        let enc = encode(&t, &gesture_symbol_table()).unwrap();
        assert!(enc.contains(&0));
        assert!((6..=12).contains(&enc.len()));
    }

    #[test]
    fn rendered_take_geometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = script_tuples(&gesture_scripts()[0], TakeNoise::none(), &mut rng);
        let stream = take_stream(&t, 3);
        let r = render_take(&stream, 5);
        assert_eq!(r.frames.len(), stream.len());
        assert_eq!(r.frames[0].width(), TAKE_WIDTH);
        // absent frames contain only the face
        let skin = |f: &Frame| crate::imaging::segment_skin(f).count();
        assert_eq!(skin(&r.frames[0]), skin(&r.frames[stream.len() - 1]));
        assert!(skin(&r.frames[LEAD_ABSENT]) > skin(&r.frames[0]));
    }
}
