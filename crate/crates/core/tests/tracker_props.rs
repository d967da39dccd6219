use proptest::prelude::*;

use islr_core::hand_tracker::{quantize_motion, Direction, MotionEvent, TrackerState};
use islr_core::imaging::Blob;

fn blob_at(c: (f64, f64)) -> Blob {
    let mut b = Blob::from_pixels(vec![(0, 0)]);
    b.centroid = c;
    b
}

proptest! {
    #[test]
    fn quantize_negation_symmetry(dx in -500i32..500, dy in -500i32..500) {
        prop_assume!((dx, dy) != (0, 0));
        let prev = (0.0, 0.0);
        let d = quantize_motion(prev, (-dx as f64, -dy as f64));
        let back = quantize_motion(prev, (dx as f64, dy as f64));
        prop_assert_eq!(back, d.opposite());
        let vertical = dy.abs() >= dx.abs();
        prop_assert_eq!(matches!(d, Direction::Up | Direction::Down), vertical);
    }

    #[test]
    fn bounded_jitter_never_moves(
        offsets in proptest::collection::vec((0.0f64..20.0, 0.0f64..std::f64::consts::TAU), 1..100),
    ) {
        let mut t = TrackerState::default();
        let c = (160.0, 120.0);
        prop_assert_eq!(t.track(Some(&blob_at(c))), MotionEvent::None);
        for (r, a) in offsets {
            let p = (c.0 + r * a.cos(), c.1 + r * a.sin());
            prop_assert_eq!(t.track(Some(&blob_at(p))), MotionEvent::None);
            prop_assert_eq!(t.anchor, Some(c));
        }
    }
}
