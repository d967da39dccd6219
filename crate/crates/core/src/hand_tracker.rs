//! Hand extraction and hysteresis-filtered motion quantization.

use crate::imaging::{connected_components, BinaryMask, Blob};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Right,
    Left,
    Down,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Up, Direction::Right, Direction::Left, Direction::Down];

    pub fn name(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Right => "right",
            Direction::Left => "left",
            Direction::Down => "down",
        }
    }

    pub fn parse(s: &str) -> Option<Direction> {
        Direction::ALL.into_iter().find(|d| d.name().eq_ignore_ascii_case(s))
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MotionEvent {
    /// Hand present, no motion beyond the hysteresis radius.
    None,
    Moved(Direction),
    HandAbsent,
}

/// Largest component when its area reaches `min_area`. Ties keep the first
/// component in raster order.
pub fn extract_hand(mask: &BinaryMask, min_area: usize) -> Option<Blob> {
    let mut best: Option<Blob> = None;
    for b in connected_components(mask) {
        if best.as_ref().is_none_or(|cur| b.area > cur.area) {
            best = Some(b);
        }
    }
    best.filter(|b| b.area >= min_area)
}

/// Direction from `prev` to `curr` in image coordinates (y down).
///
/// With `dx = prev.x - curr.x` and `dy = prev.y - curr.y`: when `|dy| >= |dx|`
/// the motion is vertical (`Up` if `dy > 0`), otherwise horizontal (`Left` if
/// `dx > 0`).
pub fn quantize_motion(prev: (f64, f64), curr: (f64, f64)) -> Direction {
    let dx = prev.0 - curr.0;
    let dy = prev.1 - curr.1;
    if dy.abs() >= dx.abs() {
        if dy > 0.0 {
            Direction::Up
        } else {
            Direction::Down
        }
    } else if dx > 0.0 {
        Direction::Left
    } else {
        Direction::Right
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HysteresisRadii {
    pub rest: f64,
    pub moving: f64,
}

impl Default for HysteresisRadii {
    fn default() -> Self {
        HysteresisRadii {
            rest: 20.0,
            moving: 7.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrackerState {
    /// Comparison centroid; not updated on sub-threshold shifts.
    pub anchor: Option<(f64, f64)>,
    pub radius: f64,
    pub moving: bool,
    pub radii: HysteresisRadii,
}

impl Default for TrackerState {
    fn default() -> Self {
        Self::new(HysteresisRadii::default())
    }
}

impl TrackerState {
    pub fn new(radii: HysteresisRadii) -> Self {
        TrackerState {
            anchor: None,
            radius: radii.rest,
            moving: false,
            radii,
        }
    }

    /// Advances the tracker by one frame and returns its motion event.
    pub fn track(&mut self, hand: Option<&Blob>) -> MotionEvent {
        let Some(hand) = hand else {
            *self = TrackerState::new(self.radii);
            return MotionEvent::HandAbsent;
        };
        let c = hand.centroid;
        let Some(anchor) = self.anchor else {
            self.anchor = Some(c);
            return MotionEvent::None;
        };
        let d = (anchor.0 - c.0).hypot(anchor.1 - c.1);
        if d <= self.radius {
            self.moving = false;
            self.radius = self.radii.rest;
            MotionEvent::None
        } else {
            let dir = quantize_motion(anchor, c);
            self.anchor = Some(c);
            self.moving = true;
            self.radius = self.radii.moving;
            MotionEvent::Moved(dir)
        }
    }
}
