//! Binary PPM (P6) frame input/output and PGM (P5) mask export.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder, ImageFormat, ImageReader};

use super::raster::{BinaryMask, Frame};
use crate::error::Result;

pub fn read_frame(path: impl AsRef<Path>) -> Result<Frame> {
    let img = ImageReader::open(path)?.with_guessed_format()?.decode()?.to_rgb8();
    let (w, h) = img.dimensions();
    Frame::from_rgb_bytes(w as usize, h as usize, img.as_raw())
}

pub fn write_frame(path: impl AsRef<Path>, f: &Frame) -> Result<()> {
    let out = BufWriter::new(File::create(path)?);
    PnmEncoder::new(out)
        .with_subtype(PnmSubtype::Pixmap(SampleEncoding::Binary))
        .write_image(
            &f.to_rgb_bytes(),
            f.width() as u32,
            f.height() as u32,
            ExtendedColorType::Rgb8,
        )?;
    Ok(())
}

/// Writes a mask as P5 with 0/255 samples.
pub fn write_mask(path: impl AsRef<Path>, m: &BinaryMask) -> Result<()> {
    let bytes: Vec<u8> = m.bits().iter().map(|&b| if b { 255 } else { 0 }).collect();
    let out = BufWriter::new(File::create(path)?);
    PnmEncoder::new(out)
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .write_image(&bytes, m.width() as u32, m.height() as u32, ExtendedColorType::L8)?;
    Ok(())
}

/// Reads a P5 mask; any nonzero sample is set.
pub fn read_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let img = image::load(
        std::io::BufReader::new(File::open(path)?),
        ImageFormat::Pnm,
    )?
    .to_luma8();
    let (w, h) = img.dimensions();
    BinaryMask::from_bits(w as usize, h as usize, img.as_raw().iter().map(|&v| v != 0).collect())
}
