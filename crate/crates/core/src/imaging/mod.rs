//! Raster primitives: frames, masks, skin segmentation, binary morphology
//! and connected-component analysis.

mod color;
mod components;
mod morphology;
mod pnm;
mod raster;

pub use color::{is_skin, rgb_to_yuv, segment_skin, YuvPixel};
pub use components::{connected_components, Blob, BBox};
pub use morphology::{dilate, erode, erode_with_border, morph_close, morph_open, StructuringElement};
pub use pnm::{read_frame, read_mask, write_frame, write_mask};
pub use raster::{BinaryMask, Frame, Rgb};
