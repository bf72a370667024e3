//! Embed, extract, recover and capacity measurement on whole files.

use alloc::vec::Vec;

use crate::container::{
    insert_comment, locate_comment, marker, parse_jpeg, serialize_jpeg, unstuff, JpegFile,
};
use crate::entropy::{decode_scan, ScanTables};
use crate::error::{Error, Result};
use crate::payload::{build_payload, capacity, parse_payload, SEGMENT_OVERHEAD};
use crate::transcode::{
    image_tpoint, optimize_terminate_point, transcode_backward, transcode_forward, BackwardParams,
    TranscodeResult,
};

/// How the terminate point is chosen at embed time. The decoder reads it
/// from the payload, so either choice recovers the same way.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum TerminatePolicy {
    /// Highest zigzag position holding a coefficient with magnitude above 2.
    #[default]
    Max,
    /// Try every position and keep the one with the largest capacity.
    Optimize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityReport {
    /// Embedding capacity in bits (always a multiple of 8).
    pub ec_bits: u64,
    /// Capacity as a percentage of the cover file size.
    pub rate_percent: f64,
    pub t: u8,
    pub special_count: usize,
    pub block_count: usize,
    pub original_size: usize,
    pub original_scan_size: usize,
    pub recompressed_scan_size: usize,
    pub saved_bytes: i64,
}

impl CapacityReport {
    pub fn capacity_bytes(&self) -> usize {
        (self.ec_bits / 8) as usize
    }
}

struct Analysis {
    file: JpegFile,
    result: TranscodeResult,
    block_count: usize,
}

fn analyze(file: JpegFile, policy: TerminatePolicy) -> Result<Analysis> {
    let frame = file.frame()?;
    let (dc, ac) = file.scan_table_specs()?;
    let tables = ScanTables::from_specs(&dc, &ac)?;
    let block_count = frame.block_count();
    if block_count > u16::MAX as usize {
        return Err(Error::TooManyBlocks(block_count));
    }
    let decoded = decode_scan(unstuff(&file.scan)?, &tables, block_count)?;
    let result = match policy {
        TerminatePolicy::Max => {
            transcode_forward(&decoded, image_tpoint(&decoded.blocks), &tables)?
        }
        TerminatePolicy::Optimize => optimize_terminate_point(&decoded, &tables)?,
    };
    Ok(Analysis { file, result, block_count })
}

fn report(cover_len: usize, a: &Analysis) -> CapacityReport {
    let r = &a.result;
    let cap = capacity(r.saved_bytes, r.special_indexes.len());
    CapacityReport {
        ec_bits: 8 * cap as u64,
        rate_percent: 100.0 * cap as f64 / cover_len as f64,
        t: r.t.get(),
        special_count: r.special_indexes.len(),
        block_count: a.block_count,
        original_size: cover_len,
        original_scan_size: a.file.scan.len(),
        recompressed_scan_size: r.new_scan.len(),
        saved_bytes: r.saved_bytes,
    }
}

/// Capacity of `cover` with the default terminate point.
pub fn measure(cover: &[u8]) -> Result<CapacityReport> {
    measure_with(cover, TerminatePolicy::Max)
}

pub fn measure_with(cover: &[u8], policy: TerminatePolicy) -> Result<CapacityReport> {
    let a = analyze(parse_jpeg(cover)?, policy)?;
    Ok(report(cover.len(), &a))
}

/// Hides `secret` in `cover`. The result has exactly the cover's size and
/// is verified to recover to the cover before it is returned.
pub fn embed(cover: &[u8], secret: &[u8]) -> Result<Vec<u8>> {
    embed_with(cover, secret, TerminatePolicy::Max)
}

pub fn embed_with(cover: &[u8], secret: &[u8], policy: TerminatePolicy) -> Result<Vec<u8>> {
    let file = parse_jpeg(cover)?;
    if file.segments.get(1).map(|s| s.marker) == Some(marker::COM) {
        return Err(Error::CommentCollision);
    }
    let a = analyze(file, policy)?;
    let r = &a.result;
    let saved = r.saved_bytes;
    let overhead = SEGMENT_OVERHEAD + 2 * r.special_indexes.len();
    if saved < overhead as i64 {
        return Err(Error::NoSpareSpace { saved, overhead });
    }
    let cap = capacity(saved, r.special_indexes.len());
    if secret.len() > cap {
        return Err(Error::SecretTooLarge { secret: secret.len(), capacity: cap });
    }
    // the COM segment (marker + length + payload) spends exactly the saved bytes
    let payload_len = saved as usize - 4;
    if payload_len > crate::container::MAX_SEGMENT_PAYLOAD {
        return Err(Error::SavingsExceedSegment(saved));
    }
    let payload = build_payload(secret, r.t.get(), &r.special_indexes, payload_len + 2)?;

    let mut file = a.file;
    file.scan = r.new_scan.clone();
    let marked = serialize_jpeg(&insert_comment(&file, &payload)?)?;
    debug_assert_eq!(marked.len(), cover.len());
    if marked.len() != cover.len() || recover(&marked)? != cover {
        return Err(Error::VerifyFailed);
    }
    Ok(marked)
}

/// Returns the hidden secret. Reads the COM payload only; the scan is not decoded.
pub fn extract(marked: &[u8]) -> Result<Vec<u8>> {
    let file = parse_jpeg(marked)?;
    let raw = locate_comment(&file)?;
    let payload = parse_payload(raw)?;
    if raw[raw.len() - payload.padding_len..].iter().any(|&b| b != 0) {
        return Err(Error::NonZeroPadding);
    }
    Ok(payload.secret)
}

/// Restores the original cover bytes from a marked file.
pub fn recover(marked: &[u8]) -> Result<Vec<u8>> {
    let mut file = parse_jpeg(marked)?;
    let raw = file.take_comment()?;
    let payload = parse_payload(&raw)?;
    let frame = file.frame()?;
    let (dc, ac) = file.scan_table_specs()?;
    let tables = ScanTables::from_specs(&dc, &ac)?;
    let params = BackwardParams {
        t: crate::transcode::TerminatePoint::new(payload.t)?,
        special_indexes: &payload.special_indexes,
        block_count: frame.block_count(),
        expected_len: Some(file.scan.len() + 4 + raw.len()),
    };
    file.scan = transcode_backward(&file.scan, &params, &tables)?;
    serialize_jpeg(&file)
}
