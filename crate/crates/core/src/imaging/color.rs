use super::raster::{BinaryMask, Frame, Rgb};

/// Luma and offset chroma, each in `[0, 255]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct YuvPixel {
    pub y: u8,
    pub u: u8,
    pub v: u8,
}

// Coefficients scaled by 1000 so the affine map is evaluated exactly.
const Y_ROW: [i32; 3] = [299, 587, 114];
const U_ROW: [i32; 3] = [-147, -289, 436];
const V_ROW: [i32; 3] = [615, -515, -100];

#[inline]
fn round_half_up_clamped(milli: i32) -> u8 {
    (milli + 500).div_euclid(1000).clamp(0, 255) as u8
}

#[inline]
fn dot(row: [i32; 3], [r, g, b]: Rgb) -> i32 {
    row[0] * r as i32 + row[1] * g as i32 + row[2] * b as i32
}

/// RGB to YUV with `+128` chroma offset, rounded half-up then clamped.
pub fn rgb_to_yuv(p: Rgb) -> YuvPixel {
    YuvPixel {
        y: round_half_up_clamped(dot(Y_ROW, p)),
        u: round_half_up_clamped(dot(U_ROW, p) + 128_000),
        v: round_half_up_clamped(dot(V_ROW, p) + 128_000),
    }
}

/// Combined YUV and RGB skin rule. All comparisons are strict.
pub fn is_skin(p: Rgb) -> bool {
    let [r, g, b] = p;
    let YuvPixel { u, v, .. } = rgb_to_yuv(p);
    80 < u
        && u < 130
        && 136 < v
        && v < 200
        && v > u
        && r > 80
        && g > 30
        && b > 15
        && (r as i16 - g as i16).abs() > 15
}

pub fn segment_skin(f: &Frame) -> BinaryMask {
    let bits = f.pixels().iter().map(|&p| is_skin(p)).collect();
    BinaryMask::from_bits(f.width(), f.height(), bits).expect("dimensions match frame")
}
