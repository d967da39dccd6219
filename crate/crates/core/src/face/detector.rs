use std::path::Path;

use super::hog::{CellGrid, GrayImage, HogParams};
use super::FaceBox;
use crate::error::{Error, Result};
use crate::imaging::{BBox, Frame};

pub const PYRAMID_SCALE: f64 = 1.25;
pub const WINDOW_STRIDE: usize = 8;

/// Linear scorer over HOG windows: `dot(weights, hog) + bias`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearFaceModel {
    pub window: (usize, usize),
    pub weights: Vec<f64>,
    pub bias: f64,
    pub threshold: f64,
    pub hog: HogParams,
}

impl LinearFaceModel {
    pub fn new(window: (usize, usize), weights: Vec<f64>, bias: f64, threshold: f64) -> Result<Self> {
        let hog = HogParams::default();
        let expected = hog.descriptor_len(window.0, window.1)?;
        if weights.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: weights.len(),
            });
        }
        Ok(LinearFaceModel {
            window,
            weights,
            bias,
            threshold,
            hog,
        })
    }

    /// Parses `window <w> <h>`, an optional `threshold <t>` line, the bias,
    /// then one weight per line. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, head) = lines.next().ok_or(Error::parse(1, "missing window line"))?;
        let toks: Vec<&str> = head.split_whitespace().collect();
        let window = match toks.as_slice() {
            ["window", w, h] => (
                w.parse().map_err(|_| Error::parse(ln, "bad window width"))?,
                h.parse().map_err(|_| Error::parse(ln, "bad window height"))?,
            ),
            _ => return Err(Error::parse(ln, "expected `window <w> <h>`")),
        };
        let num = |ln: usize, s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::parse(ln, format!("bad number `{s}`")))
        };
        let mut threshold = 0.0;
        let (mut ln, mut line) = lines.next().ok_or(Error::parse(ln + 1, "missing bias"))?;
        if let Some(t) = line.strip_prefix("threshold") {
            threshold = num(ln, t.trim())?;
            (ln, line) = lines.next().ok_or(Error::parse(ln + 1, "missing bias"))?;
        }
        let bias = num(ln, line)?;
        let weights = lines.map(|(ln, l)| num(ln, l)).collect::<Result<Vec<_>>>()?;
        Self::new(window, weights, bias, threshold)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "window {} {}\nthreshold {:e}\n{:e}\n",
            self.window.0, self.window.1, self.threshold, self.bias
        );
        for w in &self.weights {
            s.push_str(&format!("{w:e}\n"));
        }
        s
    }
}

/// Highest-scoring window over an image pyramid, if it beats the model's
/// threshold. Windows are visited level by level in raster order; ties keep
/// the first one seen.
pub fn detect_face(f: &Frame, model: &LinearFaceModel) -> Option<FaceBox> {
    let (ww, wh) = model.window;
    let p = model.hog;
    let (wc, hc) = p.cells(ww, wh).ok()?;
    let base = GrayImage::luma(f);
    let mut best: Option<(f64, BBox)> = None;
    let mut desc = Vec::with_capacity(model.weights.len());
    for level in 0.. {
        let scale = PYRAMID_SCALE.powi(level);
        let lw = (f.width() as f64 / scale).floor() as usize;
        let lh = (f.height() as f64 / scale).floor() as usize;
        if lw < ww || lh < wh {
            break;
        }
        let img = if level == 0 {
            base.clone()
        } else {
            base.resized(lw, lh)
        };
        let aligned = WINDOW_STRIDE % p.cell_size == 0;
        let grid = aligned.then(|| {
            CellGrid::compute(&img, &p, 0, 0, lw / p.cell_size, lh / p.cell_size)
        });
        let mut y = 0;
        while y + wh <= lh {
            let mut x = 0;
            while x + ww <= lw {
                match &grid {
                    Some(g) => g.descriptor(&p, x / p.cell_size, y / p.cell_size, wc, hc, &mut desc),
                    None => {
                        let g = CellGrid::compute(&img, &p, x, y, wc, hc);
                        g.descriptor(&p, 0, 0, wc, hc, &mut desc)
                    }
                }
                let score = model.bias
                    + model.weights.iter().zip(&desc).map(|(w, d)| w * d).sum::<f64>();
                if best.is_none_or(|(s, _)| score > s) {
                    let to_frame = |v: usize, lim: usize| ((v as f64 * scale).round() as usize).min(lim - 1);
                    let bbox = BBox {
                        x_min: to_frame(x, f.width()),
                        y_min: to_frame(y, f.height()),
                        x_max: to_frame(x + ww, f.width() + 1).saturating_sub(1).min(f.width() - 1),
                        y_max: to_frame(y + wh, f.height() + 1).saturating_sub(1).min(f.height() - 1),
                    };
                    best = Some((score, bbox));
                }
                x += WINDOW_STRIDE;
            }
            y += WINDOW_STRIDE;
        }
    }
    best.filter(|(s, _)| *s > model.threshold)
        .map(|(score, bbox)| FaceBox { bbox, score })
}
