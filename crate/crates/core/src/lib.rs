#![cfg_attr(not(test), no_std)]

//! Lossless data hiding in baseline JPEG files.
//!
//! The quantized DCT coefficients of a baseline grayscale JPEG are usually
//! sparse and small at high frequencies. This crate finds an image-wide
//! zigzag *terminate point* above which every coefficient lies in
//! `{-2, -1, 1, 2}`, keeps the standard Huffman coding below it and recodes
//! everything above it with a shorter run/value code (the Rxy code). The bits
//! saved are spent on a COM segment that carries the secret plus the
//! parameters needed to undo the recoding, so the marked file has exactly the
//! size of the cover and the cover can be restored byte for byte.
//!
//! Everything here works on byte slices and allocates through `alloc` only;
//! file IO and the command-line front end live in the `rxyjpeg` crate.
//!
//! ```no_run
//! # fn main() -> Result<(), rxyjpeg_core::Error> {
//! # let cover: Vec<u8> = Vec::new();
//! let report = rxyjpeg_core::measure(&cover)?;
//! let secret = vec![0x5a; report.capacity_bytes()];
//! let marked = rxyjpeg_core::embed(&cover, &secret)?;
//! assert_eq!(marked.len(), cover.len());
//! assert_eq!(rxyjpeg_core::extract(&marked)?, secret);
//! assert_eq!(rxyjpeg_core::recover(&marked)?, cover);
//! # Ok(())
//! # }
//! ```

extern crate alloc;

pub mod bits;
pub mod container;
pub mod entropy;
mod error;
pub mod payload;
pub mod pipeline;
pub mod rxy;
pub mod tables;
pub mod transcode;

pub use crate::container::{
    parse_jpeg, serialize_jpeg, stuff, unstuff, EntropyScan, FrameHeader, HuffmanClass,
    HuffmanTableSpec, JpegFile, Segment,
};
pub use crate::entropy::{CoefficientBlock, HuffmanTable, ScanTables};
pub use crate::error::{Error, Result};
pub use crate::payload::{build_payload, capacity, parse_payload, HidingPayload};
pub use crate::pipeline::{
    embed, embed_with, extract, measure, measure_with, recover, CapacityReport, TerminatePolicy,
};
pub use crate::rxy::RxySymbol;
pub use crate::transcode::{TerminatePoint, TranscodeResult};
