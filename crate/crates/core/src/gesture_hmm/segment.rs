use super::symbols::FrameTuple;

pub const DEFAULT_DEBOUNCE: usize = 3;

/// Per-frame input to temporal segmentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StreamEvent {
    Present(FrameTuple),
    Absent,
}

/// Splits a frame stream into gestures at hand-absence gaps of at least
/// `debounce` frames. Absence frames are never part of a segment.
#[derive(Clone, Debug)]
pub struct Segmenter {
    debounce: usize,
    current: Vec<FrameTuple>,
    absent_run: usize,
}

impl Segmenter {
    pub fn new(debounce: usize) -> Self {
        Segmenter {
            debounce: debounce.max(1),
            current: Vec::new(),
            absent_run: 0,
        }
    }

    pub fn is_open(&self) -> bool {
        !self.current.is_empty()
    }

    pub fn current(&self) -> &[FrameTuple] {
        &self.current
    }

    /// Feeds one frame; returns a segment when this frame closes one.
    pub fn push(&mut self, ev: StreamEvent) -> Option<Vec<FrameTuple>> {
        match ev {
            StreamEvent::Present(t) => {
                self.absent_run = 0;
                self.current.push(t);
                None
            }
            StreamEvent::Absent => {
                if !self.is_open() {
                    return None;
                }
                self.absent_run += 1;
                if self.absent_run >= self.debounce {
                    self.absent_run = 0;
                    Some(std::mem::take(&mut self.current))
                } else {
                    None
                }
            }
        }
    }

    /// Closes and returns any open segment (end of stream).
    pub fn finish(&mut self) -> Option<Vec<FrameTuple>> {
        self.absent_run = 0;
        self.is_open().then(|| std::mem::take(&mut self.current))
    }
}

impl Default for Segmenter {
    fn default() -> Self {
        Segmenter::new(DEFAULT_DEBOUNCE)
    }
}

/// Every segment of `events`, including one left open at the end.
pub fn segment_stream(events: impl IntoIterator<Item = StreamEvent>, debounce: usize) -> Vec<Vec<FrameTuple>> {
    let mut seg = Segmenter::new(debounce);
    let mut out: Vec<_> = events.into_iter().filter_map(|e| seg.push(e)).collect();
    out.extend(seg.finish());
    out
}
