//! Per-frame orchestration of the recognition stages.

use std::sync::Arc;
use std::time::Instant;

use super::config::PipelineConfig;
use super::models::ModelSet;
use crate::error::{Error, Result};
use crate::face::{eliminate_face, FaceBox, FaceProvider};
use crate::gesture_hmm::{encode, FrameTuple, GestureDecision, Segmenter, StreamEvent, SymbolTable};
use crate::grid_features::extract_features;
use crate::hand_tracker::{extract_hand, MotionEvent, TrackerState};
use crate::imaging::{morph_close, morph_open, segment_skin, BinaryMask, Blob, Frame, StructuringElement};
use crate::stabilizer::StabilizerState;
use crate::{Bank, PoseModel, Real};

/// Stage names in execution order.
pub const STAGES: [&str; 10] = [
    "face",
    "stabilize",
    "eliminate",
    "segment",
    "morphology",
    "hand",
    "track",
    "pose",
    "symbol",
    "gesture",
];

/// Wall time per stage in milliseconds, indexed like [`STAGES`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StageTimings {
    pub stages: [f64; STAGES.len()],
    pub total: f64,
}

impl StageTimings {
    pub fn get(&self, stage: &str) -> Option<f64> {
        STAGES.iter().position(|s| *s == stage).map(|i| self.stages[i])
    }

    pub fn sum(&self) -> f64 {
        self.stages.iter().sum()
    }
}

struct Clock {
    start: Instant,
    last: Instant,
    t: StageTimings,
}

impl Clock {
    fn new() -> Self {
        let now = Instant::now();
        Clock {
            start: now,
            last: now,
            t: StageTimings::default(),
        }
    }

    fn lap(&mut self, stage: usize) {
        let now = Instant::now();
        self.t.stages[stage] += (now - self.last).as_secs_f64() * 1e3;
        self.last = now;
    }

    fn finish(mut self) -> StageTimings {
        self.t.total = (self.last - self.start).as_secs_f64() * 1e3;
        self.t
    }
}

fn at_stage<T>(stage: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Stage {
        stage: STAGES[stage],
        source: Box::new(e),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoseResult {
    pub label: String,
    pub votes: usize,
}

/// A closed segment and the bank's verdict on it.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentOutcome {
    pub tuples: Vec<FrameTuple>,
    pub decision: GestureDecision<Real>,
}

impl SegmentOutcome {
    /// `GESTURE <label|WRONG> <avg_loglik>`.
    pub fn reply_text(&self) -> String {
        format!(
            "GESTURE {} {:.6}",
            self.decision.label_or_wrong(),
            self.decision.avg_log_likelihood
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameResult {
    pub frame_index: usize,
    pub face: Option<FaceBox>,
    pub shift: (i64, i64),
    pub hand: Option<Blob>,
    pub motion: MotionEvent,
    /// Pose on still frames.
    pub pose: Option<PoseResult>,
    pub tuple: Option<FrameTuple>,
    pub symbol: Option<usize>,
    /// Set when this frame closed a segment.
    pub gesture: Option<SegmentOutcome>,
    pub timings: StageTimings,
}

impl FrameResult {
    /// `POSE <label> <votes>`, `MOTION <dir>` or `NONE`.
    pub fn reply_text(&self) -> String {
        match (&self.motion, &self.pose) {
            (MotionEvent::Moved(d), _) => format!("MOTION {}", d.name()),
            (_, Some(p)) => format!("POSE {} {}", p.label, p.votes),
            _ => "NONE".to_string(),
        }
    }
}

/// Skin mask after the configured open/close passes.
pub fn clean_mask(m: &BinaryMask, se: StructuringElement, iterations: usize) -> BinaryMask {
    let mut m = m.clone();
    for _ in 0..iterations {
        m = morph_close(&morph_open(&m, se), se);
    }
    m
}

/// Hand blob of a pose image: skin, morphology, largest component.
pub fn hand_from_frame(f: &Frame, cfg: &PipelineConfig) -> Option<Blob> {
    hand_from_mask(&segment_skin(f), cfg)
}

pub fn hand_from_mask(m: &BinaryMask, cfg: &PipelineConfig) -> Option<Blob> {
    let m = clean_mask(m, cfg.se(), cfg.morph_iterations);
    extract_hand(&m, cfg.min_area(m.width(), m.height()))
}

/// State of one video stream.
pub struct Pipeline {
    cfg: PipelineConfig,
    face: Arc<FaceProvider>,
    intermediate: Arc<PoseModel>,
    bank: Option<Arc<Bank>>,
    symbols: SymbolTable,
    stabilizer: StabilizerState,
    tracker: TrackerState,
    segmenter: Segmenter,
    frame_index: usize,
}

impl Pipeline {
    /// Needs an intermediate pose model; the gesture bank is optional. The
    /// symbol order comes from the bank when present, else from the sorted
    /// intermediate labels.
    pub fn new(cfg: PipelineConfig, models: &ModelSet, face: Arc<FaceProvider>) -> Result<Self> {
        cfg.validate()?;
        let intermediate = models
            .intermediate
            .clone()
            .ok_or_else(|| Error::InvalidArgument("intermediate pose model required".into()))?;
        let symbols = match &models.gestures {
            Some(b) => b.symbols.clone(),
            None => SymbolTable::new(intermediate.labels())?,
        };
        for l in intermediate.labels() {
            symbols.pose_symbol(&l)?;
        }
        Ok(Pipeline {
            segmenter: Segmenter::new(cfg.debounce),
            tracker: TrackerState::new(cfg.radii),
            stabilizer: StabilizerState::new(),
            cfg,
            face,
            intermediate: Arc::new(intermediate),
            bank: models.gestures.clone().map(Arc::new),
            symbols,
            frame_index: 0,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn frames_seen(&self) -> usize {
        self.frame_index
    }

    pub fn process_frame(&mut self, f: &Frame) -> Result<FrameResult> {
        let mut clock = Clock::new();
        let index = self.frame_index;
        self.frame_index += 1;

        let face = self.face.face(index, f);
        clock.lap(0);

        let st = self.stabilizer.stabilize(f, face.as_ref());
        let moved_face = face.and_then(|b| b.translated(st.shift.0, st.shift.1, f.width(), f.height()));
        clock.lap(1);

        let frame = match &moved_face {
            Some(b) => eliminate_face(&st.frame, b, self.cfg.face_expansion),
            None => st.frame,
        };
        clock.lap(2);

        let skin = segment_skin(&frame);
        clock.lap(3);

        let mask = clean_mask(&skin, self.cfg.se(), self.cfg.morph_iterations);
        clock.lap(4);

        let hand = extract_hand(&mask, self.cfg.min_area(mask.width(), mask.height()));
        clock.lap(5);

        let motion = self.tracker.track(hand.as_ref());
        clock.lap(6);

        let pose = match (&motion, &hand) {
            (MotionEvent::None, Some(h)) => {
                let q = extract_features(h, self.intermediate.grid());
                let c = at_stage(7, self.intermediate.classify(&q))?;
                Some(PoseResult {
                    label: c.label,
                    votes: c.votes,
                })
            }
            _ => None,
        };
        clock.lap(7);

        let tuple = match (&motion, &pose) {
            (MotionEvent::Moved(d), _) => Some(FrameTuple::Motion(*d)),
            (_, Some(p)) => Some(FrameTuple::Pose(p.label.clone())),
            _ => None,
        };
        let symbol = tuple.as_ref().map(|t| self.symbols.symbol(t)).transpose();
        let symbol = at_stage(8, symbol)?;
        clock.lap(8);

        let ev = match &tuple {
            Some(t) => StreamEvent::Present(t.clone()),
            None => StreamEvent::Absent,
        };
        let gesture = match self.segmenter.push(ev) {
            Some(seg) => {
                self.stabilizer.reset();
                at_stage(9, self.decide(seg))?
            }
            None => None,
        };
        clock.lap(9);

        Ok(FrameResult {
            frame_index: index,
            face: moved_face,
            shift: st.shift,
            hand,
            motion,
            pose,
            tuple,
            symbol,
            gesture,
            timings: clock.finish(),
        })
    }

    fn decide(&self, tuples: Vec<FrameTuple>) -> Result<Option<SegmentOutcome>> {
        let Some(bank) = &self.bank else {
            return Ok(None);
        };
        let obs = encode(&tuples, &self.symbols)?;
        let decision = bank.classify(&obs)?;
        Ok(Some(SegmentOutcome { tuples, decision }))
    }

    /// Ends the stream: classifies any open segment and resets all state.
    pub fn finish(&mut self) -> Result<Option<SegmentOutcome>> {
        let open = self.segmenter.finish();
        self.reset();
        match open {
            Some(seg) => at_stage(9, self.decide(seg)),
            None => Ok(None),
        }
    }

    pub fn reset(&mut self) {
        self.stabilizer.reset();
        self.tracker = TrackerState::new(self.cfg.radii);
        self.segmenter = Segmenter::new(self.cfg.debounce);
        self.frame_index = 0;
    }
}

/// Results of running a whole take through a fresh pipeline.
#[derive(Clone, Debug)]
pub struct TakeOutcome {
    pub frames: Vec<FrameResult>,
    /// Every closed segment, the end-of-stream one last.
    pub segments: Vec<SegmentOutcome>,
}

impl TakeOutcome {
    /// The longest segment's decision, which is the take's label.
    pub fn decision(&self) -> Option<&SegmentOutcome> {
        self.segments
            .iter()
            .enumerate()
            .max_by_key(|(i, s)| (s.tuples.len(), std::cmp::Reverse(*i)))
            .map(|(_, s)| s)
    }
}

pub fn run_take<'a>(p: &mut Pipeline, frames: impl IntoIterator<Item = &'a Frame>) -> Result<TakeOutcome> {
    p.reset();
    let mut out = TakeOutcome {
        frames: Vec::new(),
        segments: Vec::new(),
    };
    for f in frames {
        let r = p.process_frame(f)?;
        out.segments.extend(r.gesture.clone());
        out.frames.push(r);
    }
    out.segments.extend(p.finish()?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_features::GridSpec;
    use crate::hand_tracker::Direction;
    use crate::imaging::connected_components;
    use crate::knn::{Backend, LabeledSample};

    const SKIN: [u8; 3] = [180, 90, 60];

    fn square_frame(x: usize, y: usize, side: usize) -> Frame {
        let mut f = Frame::new(160, 120);
        f.fill_rect(x as i64, y as i64, (x + side - 1) as i64, (y + side - 1) as i64, SKIN);
        f
    }

    fn models() -> ModelSet {
        let grid = GridSpec::new(4, 4).unwrap();
        let sample = |label: &str, m: BinaryMask| {
            let b = &connected_components(&m)[0];
            LabeledSample::new(label, extract_features(b, grid))
        };
        let square = BinaryMask::from_fn(20, 20, |x, y| x > 2 && y > 2 && x < 17 && y < 17);
        let bar = BinaryMask::from_fn(20, 20, |x, y| x < 20 && (8..12).contains(&y));
        let model = PoseModel::fit(vec![sample("Square", square), sample("Bar", bar)], 1, Backend::Brute).unwrap();
        ModelSet {
            intermediate: Some(model),
            ..Default::default()
        }
    }

    fn pipeline() -> Pipeline {
        Pipeline::new(PipelineConfig::default(), &models(), Arc::new(FaceProvider::Disabled)).unwrap()
    }

    #[test]
    fn black_frame_is_absent() {
        let mut p = pipeline();
        let r = p.process_frame(&Frame::new(160, 120)).unwrap();
        assert_eq!(r.motion, MotionEvent::HandAbsent);
        assert!(r.symbol.is_none() && r.pose.is_none());
        assert_eq!(r.reply_text(), "NONE");
    }

    #[test]
    fn square_takes_pose_path() {
        let mut p = pipeline();
        let f = square_frame(40, 40, 30);
        let r = p.process_frame(&f).unwrap();
        assert_eq!(r.motion, MotionEvent::None);
        assert_eq!(r.pose.as_ref().unwrap().label, "Square");
        let s = r.symbol.unwrap();
        assert!((4..p.symbols().size()).contains(&s));
        assert_eq!(r.reply_text(), "POSE Square 1");

        let r2 = p.process_frame(&f).unwrap();
        assert_eq!(r2.motion, MotionEvent::None);
        assert_eq!(r2.symbol, Some(s));
    }

    #[test]
    fn motion_and_timings() {
        let mut p = pipeline();
        p.process_frame(&square_frame(40, 40, 30)).unwrap();
        let r = p.process_frame(&square_frame(40, 10, 30)).unwrap();
        assert_eq!(r.motion, MotionEvent::Moved(Direction::Up));
        assert_eq!(r.symbol, Some(0));
        assert_eq!(r.reply_text(), "MOTION up");
        assert!(r.timings.stages.iter().all(|&t| t >= 0.0));
        assert!((r.timings.sum() - r.timings.total).abs() <= 1e-6 + 0.05 * r.timings.total);
        assert_eq!(r.timings.get("face"), Some(r.timings.stages[0]));
    }

    #[test]
    fn unknown_pose_symbol_is_rejected() {
        let mut m = models();
        let table = SymbolTable::new(vec!["Other".into()]).unwrap();
        let chain = crate::gesture_hmm::init_chain::<f64>("G", 1, table.size(), &[]).unwrap();
        m.gestures = Some(Bank::new(vec![chain], table, -10.0).unwrap());
        assert!(Pipeline::new(PipelineConfig::default(), &m, Arc::new(FaceProvider::Disabled)).is_err());
    }
}
