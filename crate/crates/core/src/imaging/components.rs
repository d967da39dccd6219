use super::raster::BinaryMask;

/// Inclusive pixel bounding box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BBox {
    pub x_min: usize,
    pub y_min: usize,
    pub x_max: usize,
    pub y_max: usize,
}

impl BBox {
    pub fn width(&self) -> usize {
        self.x_max - self.x_min + 1
    }

    pub fn height(&self) -> usize {
        self.y_max - self.y_min + 1
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min as f64 && x <= self.x_max as f64 && y >= self.y_min as f64 && y <= self.y_max as f64
    }
}

/// One 8-connected component of a mask.
#[derive(Clone, Debug, PartialEq)]
pub struct Blob {
    pub area: usize,
    pub bbox: BBox,
    pub centroid: (f64, f64),
    /// Member pixels in raster order.
    pub pixels: Vec<(u32, u32)>,
}

impl Blob {
    /// Builds a blob from a nonempty pixel list. Pixels are sorted into raster order.
    pub fn from_pixels(mut pixels: Vec<(u32, u32)>) -> Blob {
        assert!(!pixels.is_empty(), "blob needs at least one pixel");
        pixels.sort_unstable_by_key(|&(x, y)| (y, x));
        pixels.dedup();
        let (mut sx, mut sy) = (0u64, 0u64);
        let mut bbox = BBox {
            x_min: usize::MAX,
            y_min: usize::MAX,
            x_max: 0,
            y_max: 0,
        };
        for &(x, y) in &pixels {
            sx += x as u64;
            sy += y as u64;
            bbox.x_min = bbox.x_min.min(x as usize);
            bbox.y_min = bbox.y_min.min(y as usize);
            bbox.x_max = bbox.x_max.max(x as usize);
            bbox.y_max = bbox.y_max.max(y as usize);
        }
        let n = pixels.len();
        Blob {
            area: n,
            bbox,
            centroid: (sx as f64 / n as f64, sy as f64 / n as f64),
            pixels,
        }
    }

    /// Whole-blob mask over the given canvas size.
    pub fn to_mask(&self, width: usize, height: usize) -> BinaryMask {
        let mut m = BinaryMask::new(width, height);
        for &(x, y) in &self.pixels {
            m.set(x as usize, y as usize, true);
        }
        m
    }
}

/// Partitions set pixels into 8-connected components, ordered by the raster
/// position of each component's first pixel.
pub fn connected_components(m: &BinaryMask) -> Vec<Blob> {
    let (w, h) = (m.width(), m.height());
    let mut seen = vec![false; w * h];
    let mut blobs = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if seen[start] || !m.bits()[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut pixels = Vec::new();
        while let Some(i) = stack.pop() {
            let (x, y) = (i % w, i / w);
            pixels.push((x as u32, y as u32));
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if !m.get_or_false(nx, ny) {
                        continue;
                    }
                    let j = ny as usize * w + nx as usize;
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        blobs.push(Blob::from_pixels(pixels));
    }
    blobs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_mask_has_no_components() {
        assert!(connected_components(&BinaryMask::new(5, 5)).is_empty());
    }

    #[test]
    fn square_blob_stats() {
        let m = BinaryMask::from_fn(30, 30, |x, y| (10..14).contains(&x) && (10..14).contains(&y));
        let blobs = connected_components(&m);
        assert_eq!(blobs.len(), 1);
        let b = &blobs[0];
        assert_eq!(b.area, 16);
        assert_eq!(b.centroid, (11.5, 11.5));
        assert_eq!(
            b.bbox,
            BBox {
                x_min: 10,
                y_min: 10,
                x_max: 13,
                y_max: 13
            }
        );
    }

    #[test]
    fn diagonal_pixels_join() {
        let mut m = BinaryMask::new(4, 4);
        m.set(1, 1, true);
        m.set(2, 2, true);
        let blobs = connected_components(&m);
        assert_eq!(blobs.len(), 1);
        assert_eq!(blobs[0].area, 2);
    }

    #[test]
    fn separated_blobs_are_distinct() {
        let mut m = BinaryMask::new(6, 3);
        m.set(0, 0, true);
        m.set(2, 0, true);
        m.set(5, 2, true);
        m.set(4, 2, true);
        let blobs = connected_components(&m);
        assert_eq!(blobs.iter().map(|b| b.area).collect::<Vec<_>>(), vec![1, 1, 2]);
    }
}
