//! On-disk dataset layout.
//!
//! ```text
//! poses/<label>/*.ppm
//! intermediate/<label>/*.ppm
//! gestures/<name>/<take>/frame_0000.ppm   (plus faces.txt, tuples.txt)
//! gestures.def
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::FaceSource;
use super::synth::{self, Jitter, TakeNoise};
use crate::error::{Error, Result};
use crate::face::{FaceBox, FaceProvider, HeuristicParams, LinearFaceModel};
use crate::gesture_hmm::{FrameTuple, StreamEvent};
use crate::hand_tracker::Direction;
use crate::imaging::{read_frame, write_frame, BinaryMask, Frame};

pub const POSES_DIR: &str = "poses";
pub const INTERMEDIATE_DIR: &str = "intermediate";
pub const GESTURES_DIR: &str = "gestures";
pub const DEFINITIONS_FILE: &str = "gestures.def";
pub const FACES_FILE: &str = "faces.txt";
pub const TUPLES_FILE: &str = "tuples.txt";

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut v = std::fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<Vec<_>>>()?;
    v.sort();
    Ok(v)
}

fn is_ppm(p: &Path) -> bool {
    p.extension().is_some_and(|e| e.eq_ignore_ascii_case("ppm"))
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

/// `*.ppm` files of `dir` in name order.
pub fn list_frames(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    Ok(sorted_entries(dir.as_ref())?.into_iter().filter(|p| is_ppm(p)).collect())
}

pub fn read_frames(dir: impl AsRef<Path>) -> Result<Vec<Frame>> {
    list_frames(dir)?.iter().map(read_frame).collect()
}

/// `(label, path)` for every image under `root/<label>/`.
pub fn list_labeled_images(root: impl AsRef<Path>) -> Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    for d in sorted_entries(root.as_ref())? {
        if d.is_dir() {
            let label = file_name(&d);
            out.extend(list_frames(&d)?.into_iter().map(|p| (label.clone(), p)));
        }
    }
    Ok(out)
}

/// One recorded take of a gesture.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TakeDir {
    pub gesture: String,
    pub take: String,
    pub path: PathBuf,
}

impl TakeDir {
    pub fn frames(&self) -> Result<Vec<Frame>> {
        read_frames(&self.path)
    }

    pub fn has_frames(&self) -> Result<bool> {
        Ok(!list_frames(&self.path)?.is_empty())
    }

    /// The scripted stream, if the take has one.
    pub fn tuples(&self) -> Result<Option<Vec<StreamEvent>>> {
        let p = self.path.join(TUPLES_FILE);
        if !p.exists() {
            return Ok(None);
        }
        parse_tuples(&std::fs::read_to_string(p)?).map(Some)
    }
}

/// Every take under `root/<gesture>/<take>/`, sorted.
pub fn list_takes(root: impl AsRef<Path>) -> Result<Vec<TakeDir>> {
    let mut out = Vec::new();
    for g in sorted_entries(root.as_ref())? {
        if !g.is_dir() {
            continue;
        }
        for t in sorted_entries(&g)? {
            if t.is_dir() {
                out.push(TakeDir {
                    gesture: file_name(&g),
                    take: file_name(&t),
                    path: t,
                });
            }
        }
    }
    Ok(out)
}

/// Parses `pose <label>`, `motion <dir>` and `absent` lines.
pub fn parse_tuples(text: &str) -> Result<Vec<StreamEvent>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let ev = match toks.as_slice() {
            ["absent"] => StreamEvent::Absent,
            ["pose", label] => StreamEvent::Present(FrameTuple::Pose(label.to_string())),
            ["motion", d] => match Direction::parse(d) {
                Some(d) => StreamEvent::Present(FrameTuple::Motion(d)),
                None => return Err(Error::parse(i + 1, format!("unknown direction `{d}`"))),
            },
            _ => return Err(Error::parse(i + 1, format!("unrecognized tuple `{line}`"))),
        };
        out.push(ev);
    }
    Ok(out)
}

pub fn format_tuples(events: &[StreamEvent]) -> String {
    let mut s = String::new();
    for e in events {
        match e {
            StreamEvent::Absent => s.push_str("absent\n"),
            StreamEvent::Present(t) => {
                let _ = writeln!(s, "{t}");
            }
        }
    }
    s
}

pub fn format_annotations(faces: &[FaceBox]) -> String {
    let mut s = String::new();
    for (i, f) in faces.iter().enumerate() {
        let b = f.bbox;
        let _ = writeln!(s, "{i} {} {} {} {}", b.x_min, b.y_min, b.x_max, b.y_max);
    }
    s
}

/// Builds the face provider for a source; annotations are read from
/// `take_dir`, when given.
pub fn face_provider(source: &FaceSource, take_dir: Option<&Path>) -> Result<FaceProvider> {
    Ok(match source {
        FaceSource::None => FaceProvider::Disabled,
        FaceSource::Heuristic => FaceProvider::Heuristic(HeuristicParams::default()),
        FaceSource::Hog(p) => FaceProvider::Hog(LinearFaceModel::load(p)?),
        FaceSource::Annotation => match take_dir.map(|d| d.join(FACES_FILE)) {
            Some(p) if p.exists() => FaceProvider::annotation_file(p)?,
            _ => FaceProvider::Disabled,
        },
    })
}

fn mask_frame(m: &BinaryMask) -> Frame {
    let mut f = Frame::filled(m.width(), m.height(), synth::BACKGROUND);
    f.paint_mask(m, synth::SKIN);
    f
}

/// Synthetic dataset size and variation.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthOptions {
    pub seed: u64,
    pub classes: usize,
    pub per_class: usize,
    pub intermediate_per_class: usize,
    /// Gesture scripts used, from the front of the script list.
    pub gestures: usize,
    /// Takes per gesture rendered as frames.
    pub frame_takes: usize,
    /// Additional takes stored only as tuple streams.
    pub tuple_takes: usize,
    pub jitter: Jitter,
    pub take_noise: TakeNoise,
    pub debounce: usize,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            seed: 0,
            classes: 33,
            per_class: 40,
            intermediate_per_class: 40,
            gestures: 12,
            frame_takes: 2,
            tuple_takes: 18,
            jitter: Jitter::default(),
            take_noise: TakeNoise::default(),
            debounce: crate::gesture_hmm::DEFAULT_DEBOUNCE,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SynthSummary {
    pub pose_images: usize,
    pub intermediate_images: usize,
    pub frame_takes: usize,
    pub tuple_takes: usize,
}

fn write_masks(root: &Path, masks: &[(String, BinaryMask)]) -> Result<usize> {
    let mut counter = std::collections::HashMap::<&str, usize>::new();
    for (label, m) in masks {
        let n = counter.entry(label).or_default();
        let dir = root.join(label);
        std::fs::create_dir_all(&dir)?;
        write_frame(dir.join(format!("{:04}.ppm", n)), &mask_frame(m))?;
        *n += 1;
    }
    Ok(masks.len())
}

/// Writes a complete synthetic dataset under `dir`.
pub fn write_synth_dataset(dir: impl AsRef<Path>, opts: &SynthOptions) -> Result<SynthSummary> {
    let dir = dir.as_ref();
    if opts.classes < 2 {
        return Err(Error::InvalidArgument("at least 2 pose classes required".into()));
    }
    let scripts = synth::gesture_scripts();
    if opts.gestures == 0 || opts.gestures > scripts.len() {
        return Err(Error::InvalidArgument(format!("gesture count must be 1..={}", scripts.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut summary = SynthSummary::default();

    let poses = synth::synth_pose_masks(rng.gen(), &synth::static_classes(opts.classes), opts.per_class, opts.jitter);
    summary.pose_images = write_masks(&dir.join(POSES_DIR), &poses)?;
    let inter = synth::synth_pose_masks(
        rng.gen(),
        &synth::intermediate_classes(),
        opts.intermediate_per_class,
        opts.jitter,
    );
    summary.intermediate_images = write_masks(&dir.join(INTERMEDIATE_DIR), &inter)?;

    let mut defs = format!("poses {}\n", synth::intermediate_pose_names().join(","));
    for script in &scripts[..opts.gestures] {
        defs.push_str(&script.definition().to_text());
        for t in 0..opts.frame_takes + opts.tuple_takes {
            let take_dir = dir.join(GESTURES_DIR).join(script.name).join(format!("take_{t:02}"));
            std::fs::create_dir_all(&take_dir)?;
            let tuples = synth::script_tuples(script, opts.take_noise, &mut rng);
            let stream = synth::take_stream(&tuples, opts.debounce);
            std::fs::write(take_dir.join(TUPLES_FILE), format_tuples(&stream))?;
            if t < opts.frame_takes {
                let r = synth::render_take(&stream, rng.gen());
                for (i, f) in r.frames.iter().enumerate() {
                    write_frame(take_dir.join(format!("frame_{i:04}.ppm")), f)?;
                }
                std::fs::write(take_dir.join(FACES_FILE), format_annotations(&r.faces))?;
                summary.frame_takes += 1;
            } else {
                summary.tuple_takes += 1;
            }
        }
    }
    std::fs::write(dir.join(DEFINITIONS_FILE), defs)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuple_text_round_trip() {
        let ev = vec![
            StreamEvent::Absent,
            StreamEvent::Present(FrameTuple::Pose("Fist".into())),
            StreamEvent::Present(FrameTuple::Motion(Direction::Left)),
        ];
        let text = format_tuples(&ev);
        assert_eq!(text, "absent\npose Fist\nmotion left\n");
        assert_eq!(parse_tuples(&text).unwrap(), ev);
        match parse_tuples("pose A\nmotion sideways\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn small_synth_dataset() {
        let dir = tempfile::tempdir().unwrap();
        let opts = SynthOptions {
            classes: 2,
            per_class: 2,
            intermediate_per_class: 1,
            gestures: 1,
            frame_takes: 1,
            tuple_takes: 1,
            ..Default::default()
        };
        let s = write_synth_dataset(dir.path(), &opts).unwrap();
        assert_eq!(s.pose_images, 4);
        assert_eq!(s.intermediate_images, 9);
        assert_eq!(list_labeled_images(dir.path().join(POSES_DIR)).unwrap().len(), 4);
        let takes = list_takes(dir.path().join(GESTURES_DIR)).unwrap();
        assert_eq!(takes.len(), 2);
        assert!(takes[0].has_frames().unwrap() && !takes[1].has_frames().unwrap());
        let ev = takes[0].tuples().unwrap().unwrap();
        assert_eq!(takes[0].frames().unwrap().len(), ev.len());
        let faces = parse_annotations_file(&takes[0].path);
        assert_eq!(faces, ev.len());
    }

    fn parse_annotations_file(dir: &Path) -> usize {
        let text = std::fs::read_to_string(dir.join(FACES_FILE)).unwrap();
        crate::face::parse_annotations(&text).unwrap().len()
    }
}
