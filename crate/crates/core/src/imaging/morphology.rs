use super::raster::BinaryMask;

/// Square structuring element of side `2 * radius + 1`, anchored at its center.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StructuringElement {
    radius: usize,
}

impl StructuringElement {
    pub fn square(radius: usize) -> Self {
        assert!(radius >= 1, "structuring element radius must be >= 1");
        StructuringElement { radius }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }
}

impl Default for StructuringElement {
    fn default() -> Self {
        Self::square(1)
    }
}

/// One separable pass of a square SE along rows (`horizontal`) or columns.
/// `all` selects erosion (every covered bit set) vs. dilation (any bit set);
/// `border` is the value assumed outside the mask.
fn pass(m: &BinaryMask, r: usize, horizontal: bool, all: bool, border: bool) -> BinaryMask {
    let (w, h) = (m.width(), m.height());
    let (len, lines) = if horizontal { (w, h) } else { (h, w) };
    let mut out = BinaryMask::new(w, h);
    // prefix[i] = number of set bits among the first i samples of the line
    let mut prefix = vec![0usize; len + 1];
    for line in 0..lines {
        let at = |i: usize| if horizontal { (i, line) } else { (line, i) };
        for i in 0..len {
            let (x, y) = at(i);
            prefix[i + 1] = prefix[i] + m.get(x, y) as usize;
        }
        for i in 0..len {
            let lo = i.saturating_sub(r);
            let hi = (i + r).min(len - 1);
            let inside = hi - lo + 1;
            let set = prefix[hi + 1] - prefix[lo];
            let outside = 2 * r + 1 - inside;
            let v = if all {
                set == inside && (outside == 0 || border)
            } else {
                set > 0 || (outside > 0 && border)
            };
            let (x, y) = at(i);
            out.set(x, y, v);
        }
    }
    out
}

/// Erosion with out-of-bounds neighbors taking the value `border`.
pub fn erode_with_border(m: &BinaryMask, se: StructuringElement, border: bool) -> BinaryMask {
    let r = se.radius();
    pass(&pass(m, r, true, true, border), r, false, true, border)
}

/// Output bit set iff every SE-covered bit is set; outside the mask counts as unset.
pub fn erode(m: &BinaryMask, se: StructuringElement) -> BinaryMask {
    erode_with_border(m, se, false)
}

/// Output bit set iff any SE-covered bit is set.
pub fn dilate(m: &BinaryMask, se: StructuringElement) -> BinaryMask {
    let r = se.radius();
    pass(&pass(m, r, true, false, false), r, false, false, false)
}

pub fn morph_open(m: &BinaryMask, se: StructuringElement) -> BinaryMask {
    dilate(&erode(m, se), se)
}

/// Dilation then erosion. The erosion treats the outside as set, so true
/// pixels touching the frame edge survive and closing stays extensive.
pub fn morph_close(m: &BinaryMask, se: StructuringElement) -> BinaryMask {
    erode_with_border(&dilate(m, se), se, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn se() -> StructuringElement {
        StructuringElement::square(1)
    }

    /// Direct neighborhood evaluation, independent of the separable passes.
    fn brute(m: &BinaryMask, r: i64, all: bool) -> BinaryMask {
        BinaryMask::from_fn(m.width(), m.height(), |x, y| {
            let mut any = false;
            let mut every = true;
            for dy in -r..=r {
                for dx in -r..=r {
                    let b = m.get_or_false(x as i64 + dx, y as i64 + dy);
                    any |= b;
                    every &= b;
                }
            }
            if all {
                every
            } else {
                any
            }
        })
    }

    fn square(w: usize, h: usize, x0: usize, y0: usize, side: usize) -> BinaryMask {
        BinaryMask::from_fn(w, h, |x, y| {
            (x0..x0 + side).contains(&x) && (y0..y0 + side).contains(&y)
        })
    }

    #[test]
    fn erode_full_mask_clears_border_ring() {
        let e = erode(&BinaryMask::filled(10, 10, true), se());
        for y in 0..10 {
            for x in 0..10 {
                assert_eq!(e.get(x, y), (1..9).contains(&x) && (1..9).contains(&y));
            }
        }
    }

    #[test]
    fn erode_removes_isolated_pixel() {
        let mut m = BinaryMask::new(7, 7);
        m.set(3, 3, true);
        assert_eq!(erode(&m, se()).count(), 0);
    }

    #[test]
    fn erode_5x5_square_to_3x3() {
        let m = square(20, 20, 6, 6, 5);
        let e = erode(&m, se());
        assert_eq!(e, brute(&m, 1, true));
        assert_eq!(e, square(20, 20, 7, 7, 3));
    }

    #[test]
    fn dilate_cases() {
        assert_eq!(dilate(&BinaryMask::new(6, 6), se()).count(), 0);

        let mut m = BinaryMask::new(11, 11);
        m.set(5, 5, true);
        assert_eq!(dilate(&m, se()), square(11, 11, 4, 4, 3));

        let mut m = BinaryMask::new(12, 12);
        m.set(4, 5, true);
        m.set(6, 5, true);
        let d = dilate(&m, se());
        assert_eq!(d, brute(&m, 1, false));
        let expect = BinaryMask::from_fn(12, 12, |x, y| (3..=7).contains(&x) && (4..=6).contains(&y));
        assert_eq!(d, expect);
    }

    #[test]
    fn open_close_basic() {
        let mut m = BinaryMask::new(9, 9);
        m.set(4, 4, true);
        assert_eq!(morph_open(&m, se()).count(), 0);

        let mut m = BinaryMask::filled(9, 9, true);
        m.set(4, 4, false);
        assert!(morph_close(&m, se()).get(4, 4));
    }

    #[test]
    fn larger_radius_matches_brute_force() {
        let m = BinaryMask::from_fn(17, 13, |x, y| (x * 7 + y * 3) % 5 != 0 || x == y);
        let se2 = StructuringElement::square(2);
        assert_eq!(erode(&m, se2), brute(&m, 2, true));
        assert_eq!(dilate(&m, se2), brute(&m, 2, false));
    }
}
