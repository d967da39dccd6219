//! Histogram of oriented gradients over a luminance raster.

use crate::error::{Error, Result};
use crate::imaging::{rgb_to_yuv, Frame};

/// Single-channel `f64` raster.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height);
        GrayImage {
            width,
            height,
            data,
        }
    }

    /// Y channel of the frame.
    pub fn luma(f: &Frame) -> Self {
        let data = f.pixels().iter().map(|&p| rgb_to_yuv(p).y as f64).collect();
        GrayImage::new(f.width(), f.height(), data)
    }

    #[inline]
    pub fn at_clamped(&self, x: i64, y: i64) -> f64 {
        let x = x.clamp(0, self.width as i64 - 1) as usize;
        let y = y.clamp(0, self.height as i64 - 1) as usize;
        self.data[y * self.width + x]
    }

    /// Bilinear resample to `width x height` (pixel-center aligned).
    pub fn resized(&self, width: usize, height: usize) -> GrayImage {
        let sx = self.width as f64 / width as f64;
        let sy = self.height as f64 / height as f64;
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            let fy = ((y as f64 + 0.5) * sy - 0.5).max(0.0);
            let y0 = fy.floor() as i64;
            let ty = fy - y0 as f64;
            for x in 0..width {
                let fx = ((x as f64 + 0.5) * sx - 0.5).max(0.0);
                let x0 = fx.floor() as i64;
                let tx = fx - x0 as f64;
                let top = self.at_clamped(x0, y0) * (1.0 - tx) + self.at_clamped(x0 + 1, y0) * tx;
                let bot =
                    self.at_clamped(x0, y0 + 1) * (1.0 - tx) + self.at_clamped(x0 + 1, y0 + 1) * tx;
                data.push(top * (1.0 - ty) + bot * ty);
            }
        }
        GrayImage::new(width, height, data)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HogParams {
    /// Cell side in pixels.
    pub cell_size: usize,
    /// Block side in cells.
    pub block_size: usize,
    /// Unsigned orientation bins over `[0, 180)`.
    pub bins: usize,
}

impl Default for HogParams {
    fn default() -> Self {
        HogParams {
            cell_size: 8,
            block_size: 2,
            bins: 9,
        }
    }
}

pub(crate) const BLOCK_EPS: f64 = 1e-5;

impl HogParams {
    /// Descriptor length for a `w x h` window, or an error when the window
    /// does not tile into cells or is smaller than one block.
    pub fn descriptor_len(&self, w: usize, h: usize) -> Result<usize> {
        let (cx, cy) = self.cells(w, h)?;
        Ok((cx - self.block_size + 1) * (cy - self.block_size + 1) * self.block_len())
    }

    pub(crate) fn block_len(&self) -> usize {
        self.block_size * self.block_size * self.bins
    }

    pub(crate) fn cells(&self, w: usize, h: usize) -> Result<(usize, usize)> {
        if w % self.cell_size != 0 || h % self.cell_size != 0 {
            return Err(Error::InvalidArgument(format!(
                "window {w}x{h} not divisible by cell size {}",
                self.cell_size
            )));
        }
        let (cx, cy) = (w / self.cell_size, h / self.cell_size);
        if cx < self.block_size || cy < self.block_size {
            return Err(Error::InvalidArgument(format!(
                "window {w}x{h} smaller than one block"
            )));
        }
        Ok((cx, cy))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HogDescriptor {
    pub params: HogParams,
    pub values: Vec<f64>,
}

impl HogDescriptor {
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

/// Per-cell orientation histograms for a grid of `cols x rows` cells whose
/// top-left cell starts at `(x0, y0)`.
pub(crate) struct CellGrid {
    pub cols: usize,
    pub bins: usize,
    pub hist: Vec<f64>,
}

impl CellGrid {
    pub(crate) fn compute(
        gray: &GrayImage,
        params: &HogParams,
        x0: usize,
        y0: usize,
        cols: usize,
        rows: usize,
    ) -> CellGrid {
        let bins = params.bins;
        let cs = params.cell_size;
        let bin_width = 180.0 / bins as f64;
        let mut hist = vec![0.0; cols * rows * bins];
        for py in y0..y0 + rows * cs {
            for px in x0..x0 + cols * cs {
                let (x, y) = (px as i64, py as i64);
                let gx = gray.at_clamped(x + 1, y) - gray.at_clamped(x - 1, y);
                let gy = gray.at_clamped(x, y + 1) - gray.at_clamped(x, y - 1);
                let mag = (gx * gx + gy * gy).sqrt();
                if mag == 0.0 {
                    continue;
                }
                let mut angle = gy.atan2(gx).to_degrees();
                if angle < 0.0 {
                    angle += 180.0;
                }
                if angle >= 180.0 {
                    angle -= 180.0;
                }
                let pos = angle / bin_width;
                let lo = pos.floor();
                let frac = pos - lo;
                let lo = lo as usize % bins;
                let hi = (lo + 1) % bins;
                let cell = ((py - y0) / cs) * cols + (px - x0) / cs;
                hist[cell * bins + lo] += mag * (1.0 - frac);
                hist[cell * bins + hi] += mag * frac;
            }
        }
        CellGrid {
            cols,
            bins,
            hist,
        }
    }

    /// Normalized blocks for the `wc x hc`-cell window at cell `(cx, cy)`.
    pub(crate) fn descriptor(
        &self,
        params: &HogParams,
        cx: usize,
        cy: usize,
        wc: usize,
        hc: usize,
        out: &mut Vec<f64>,
    ) {
        let b = params.block_size;
        out.clear();
        let mut block = Vec::with_capacity(params.block_len());
        for by in 0..=hc - b {
            for bx in 0..=wc - b {
                block.clear();
                for dy in 0..b {
                    for dx in 0..b {
                        let cell = (cy + by + dy) * self.cols + cx + bx + dx;
                        block.extend_from_slice(&self.hist[cell * self.bins..(cell + 1) * self.bins]);
                    }
                }
                let norm = (block.iter().map(|v| v * v).sum::<f64>() + BLOCK_EPS * BLOCK_EPS).sqrt();
                out.extend(block.iter().map(|v| v / norm));
            }
        }
    }
}

/// HOG of the window `(x, y, w, h)` of `gray`. Gradients use centered
/// differences over the whole raster (clamped at its edges).
pub fn hog_descriptor(
    gray: &GrayImage,
    window: (usize, usize, usize, usize),
    params: HogParams,
) -> Result<HogDescriptor> {
    let (x, y, w, h) = window;
    if x + w > gray.width || y + h > gray.height {
        return Err(Error::InvalidArgument(format!(
            "window {window:?} outside {}x{} raster",
            gray.width, gray.height
        )));
    }
    let (wc, hc) = params.cells(w, h)?;
    let grid = CellGrid::compute(gray, &params, x, y, wc, hc);
    let mut values = Vec::new();
    grid.descriptor(&params, 0, 0, wc, hc, &mut values);
    Ok(HogDescriptor { params, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_window_is_zero() {
        let g = GrayImage::new(16, 16, vec![77.0; 256]);
        let d = hog_descriptor(&g, (0, 0, 16, 16), HogParams::default()).unwrap();
        assert_eq!(d.values.len(), 36);
        assert!(d.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_non_tiling_window() {
        let g = GrayImage::new(20, 20, vec![0.0; 400]);
        assert!(hog_descriptor(&g, (0, 0, 12, 16), HogParams::default()).is_err());
        assert!(hog_descriptor(&g, (8, 8, 16, 16), HogParams::default()).is_err());
    }

    #[test]
    fn vertical_edge_votes_horizontal_bin() {
        // Step at x = 4 inside one 8x8 cell: columns 3 and 4 see gx = 100, gy = 0.
        let g = GrayImage::new(8, 8, (0..64).map(|i| if i % 8 >= 4 { 100.0 } else { 0.0 }).collect());
        let p = HogParams {
            cell_size: 8,
            block_size: 1,
            bins: 9,
        };
        let grid = CellGrid::compute(&g, &p, 0, 0, 1, 1);
        // 2 columns x 8 rows, magnitude 100 each, all in bin 0 (0 degrees)
        assert_eq!(grid.hist[0], 1600.0);
        assert!(grid.hist[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn blocks_are_unit_bounded() {
        let g = GrayImage::new(32, 32, (0..1024).map(|i| ((i * 37) % 251) as f64).collect());
        let p = HogParams::default();
        let d = hog_descriptor(&g, (0, 0, 32, 32), p).unwrap();
        for block in d.values.chunks(p.block_len()) {
            let n: f64 = block.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(n <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn rotation_by_180_preserves_energy() {
        let (w, h) = (24, 16);
        let data: Vec<f64> = (0..w * h).map(|i| ((i * 7919) % 97) as f64).collect();
        let g = GrayImage::new(w, h, data.clone());
        let rot = GrayImage::new(w, h, data.into_iter().rev().collect());
        let p = HogParams::default();
        let a = hog_descriptor(&g, (0, 0, w, h), p).unwrap().energy();
        let b = hog_descriptor(&rot, (0, 0, w, h), p).unwrap().energy();
        assert!((a - b).abs() < 1e-9 * a.max(1.0), "{a} vs {b}");
    }
}
