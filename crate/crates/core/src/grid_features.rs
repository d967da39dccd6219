//! Grid-occupancy features over the hand's tight bounding box.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::imaging::Blob;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
}

impl GridSpec {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!("grid {rows}x{cols} must be nonempty")));
        }
        Ok(GridSpec { rows, cols })
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid sizes compared in the accuracy sweep.
    pub fn sweep_set() -> Vec<GridSpec> {
        [(5, 5), (10, 10), (10, 15), (15, 15), (15, 20), (20, 20)]
            .into_iter()
            .map(|(rows, cols)| GridSpec { rows, cols })
            .collect()
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { rows: 10, cols: 10 }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (r, c) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::InvalidArgument(format!("grid `{s}` is not <rows>x<cols>")))?;
        let p = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("grid `{s}` is not <rows>x<cols>")))
        };
        GridSpec::new(p(r)?, p(c)?)
    }
}

/// Integer hand-pixel counts and block sizes, row-major over grid blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridOccupancy {
    pub grid: GridSpec,
    pub counts: Vec<usize>,
    pub block_pixels: Vec<usize>,
}

/// Block index of each offset along an axis of `extent` pixels split into `parts`.
fn partition(extent: usize, parts: usize) -> (Vec<usize>, Vec<usize>) {
    let mut owner = vec![0; extent];
    let mut sizes = vec![0; parts];
    for b in 0..parts {
        let lo = b * extent / parts;
        let hi = (b + 1) * extent / parts;
        for o in &mut owner[lo..hi] {
            *o = b;
        }
        sizes[b] = hi - lo;
    }
    (owner, sizes)
}

pub fn occupancy(hand: &Blob, grid: GridSpec) -> GridOccupancy {
    let bb = hand.bbox;
    let (col_of, col_size) = partition(bb.width(), grid.cols);
    let (row_of, row_size) = partition(bb.height(), grid.rows);
    let mut counts = vec![0; grid.len()];
    for &(x, y) in &hand.pixels {
        let c = col_of[x as usize - bb.x_min];
        let r = row_of[y as usize - bb.y_min];
        counts[r * grid.cols + c] += 1;
    }
    let block_pixels = (0..grid.len())
        .map(|b| row_size[b / grid.cols] * col_size[b % grid.cols])
        .collect();
    GridOccupancy {
        grid,
        counts,
        block_pixels,
    }
}

/// Per-block hand-pixel fractions in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector<T> {
    pub grid: GridSpec,
    pub values: Vec<T>,
}

impl<T: Scalar> FeatureVector<T> {
    pub fn new(grid: GridSpec, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(FeatureVector { grid, values })
    }

    pub fn from_occupancy(o: &GridOccupancy) -> Self {
        let values = o
            .counts
            .iter()
            .zip(&o.block_pixels)
            .map(|(&n, &p)| {
                if p == 0 {
                    T::zero()
                } else {
                    T::of(n as f64) / T::of(p as f64)
                }
            })
            .collect();
        FeatureVector {
            grid: o.grid,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn extract_features<T: Scalar>(hand: &Blob, grid: GridSpec) -> FeatureVector<T> {
    FeatureVector::from_occupancy(&occupancy(hand, grid))
}

/// Squared Euclidean distance, accumulated in index order.
#[inline]
pub fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| {
        let d = x - y;
        acc + d * d
    })
}

pub fn feature_distance<T: Scalar>(a: &FeatureVector<T>, b: &FeatureVector<T>) -> Result<T> {
    if a.grid != b.grid {
        return Err(Error::InvalidArgument(format!(
            "grid mismatch: {} vs {}",
            a.grid, b.grid
        )));
    }
    Ok(squared_distance(&a.values, &b.values).sqrt())
}

/// Writes `label,f0,...,f{n-1}` followed by one row per sample.
pub fn write_feature_csv<T: Scalar, W: Write>(
    mut out: W,
    samples: impl IntoIterator<Item = (impl AsRef<str>, impl AsRef<[T]>)>,
    dims: usize,
) -> Result<()> {
    write!(out, "label")?;
    for i in 0..dims {
        write!(out, ",f{i}")?;
    }
    writeln!(out)?;
    for (label, values) in samples {
        let values = values.as_ref();
        if values.len() != dims {
            return Err(Error::DimensionMismatch {
                expected: dims,
                got: values.len(),
            });
        }
        write!(out, "{}", label.as_ref())?;
        for v in values {
            write!(out, ",{v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::{connected_components, BinaryMask};

    fn blob(mask: BinaryMask) -> Blob {
        let mut b = connected_components(&mask);
        assert_eq!(b.len(), 1);
        b.remove(0)
    }

    fn g(r: usize, c: usize) -> GridSpec {
        GridSpec::new(r, c).unwrap()
    }

    #[test]
    fn full_square_is_all_ones() {
        let b = blob(BinaryMask::from_fn(20, 20, |x, y| (3..12).contains(&x) && (5..14).contains(&y)));
        let f = extract_features::<f64>(&b, g(3, 3));
        assert_eq!(f.values, vec![1.0; 9]);
        for grid in GridSpec::sweep_set() {
            assert!(extract_features::<f64>(&b, grid).values.iter().all(|&v| v == 1.0 || v == 0.0));
        }
    }

    #[test]
    fn only_top_left_block() {
        // 3x3 block in the corner of a 9x9 box; the box is pinned by one far pixel
        let mut pixels: Vec<(u32, u32)> = (0..3).flat_map(|y| (0..3).map(move |x| (x, y))).collect();
        pixels.push((8, 8));
        let f = extract_features::<f64>(&Blob::from_pixels(pixels), g(3, 3));
        let mut expect = vec![0.0; 9];
        expect[0] = 1.0;
        expect[8] = 1.0 / 9.0;
        assert_eq!(f.values, expect);
    }

    #[test]
    fn l_shape_by_brute_force() {
        // vertical bar x in 0..3, y in 0..10 plus foot y in 7..10, x in 0..7
        let m = BinaryMask::from_fn(7, 10, |x, y| x < 3 || y >= 7);
        let b = blob(m.clone());
        let f = extract_features::<f64>(&b, g(2, 2));
        // blocks: cols 0..3 | 3..7, rows 0..5 | 5..10
        let count = |xs: std::ops::Range<usize>, ys: std::ops::Range<usize>| {
            let mut n = 0;
            for y in ys.clone() {
                for x in xs.clone() {
                    n += m.get(x, y) as usize;
                }
            }
            n as f64 / (xs.len() * ys.len()) as f64
        };
        let expect = vec![count(0..3, 0..5), count(3..7, 0..5), count(0..3, 5..10), count(3..7, 5..10)];
        assert_eq!(f.values, expect);
        assert_eq!(expect, vec![1.0, 0.0, 1.0, 12.0 / 20.0]);
    }

    #[test]
    fn tiny_bbox_has_empty_blocks() {
        let b = Blob::from_pixels(vec![(4, 4), (5, 4)]);
        let o = occupancy(&b, g(3, 3));
        assert_eq!(o.counts.iter().sum::<usize>(), 2);
        let f = FeatureVector::<f64>::from_occupancy(&o);
        assert_eq!(f.values.iter().filter(|&&v| v == 1.0).count(), 2);
        assert_eq!(o.block_pixels.iter().filter(|&&p| p == 0).count(), 7);
    }

    #[test]
    fn distances() {
        let grid = g(1, 2);
        let a = FeatureVector::new(grid, vec![1.0f64, 0.0]).unwrap();
        let b = FeatureVector::new(grid, vec![0.0f64, 1.0]).unwrap();
        assert_eq!(feature_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(feature_distance(&a, &b).unwrap(), 2f64.sqrt());
        assert_eq!(feature_distance(&a, &b).unwrap(), feature_distance(&b, &a).unwrap());
        let c = FeatureVector::new(g(2, 1), vec![0.0f64, 1.0]).unwrap();
        assert!(feature_distance(&a, &c).is_err());
    }

    #[test]
    fn grid_parse() {
        assert_eq!("10x15".parse::<GridSpec>().unwrap(), g(10, 15));
        assert!("10".parse::<GridSpec>().is_err());
        assert!("0x3".parse::<GridSpec>().is_err());
    }

    #[test]
    fn csv_layout() {
        let mut out = Vec::new();
        write_feature_csv::<f64, _>(&mut out, [("a", vec![0.5, 1.0])], 2).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "label,f0,f1\na,0.5,1\n");
    }
}
