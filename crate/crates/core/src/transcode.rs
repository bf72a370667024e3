//! Segment recoding of a whole scan.
//!
//! Each block is split at a cut point. Bits before the cut are the file's
//! own Huffman coding, copied verbatim; coefficients after the cut are
//! written with the Rxy code. The cut is found by walking the block's
//! standard symbols and stopping after the first symbol whose zigzag
//! position reaches the image terminate point `t` (a symbol may jump past
//! `t`). If EOB comes first the block stays fully standard. The decoder runs
//! the same walk on the marked scan, so encoder and decoder agree on every
//! cut without any side information beyond `t`.
//!
//! Blocks that cannot be recoded (a coefficient above the cut outside
//! `{-2,-1,1,2}`, or a source coding that canonical re-encoding would not
//! reproduce) are *special*: copied end to end and listed by index. A block
//! whose Rxy coding comes out longer is made special only when the loss
//! exceeds the 16 bits its index costs in the payload.

use alloc::vec::Vec;

use crate::bits::{BitBuf, BitReader};
use crate::container::{stuff, EntropyScan};
use crate::entropy::{
    check_padding, decode_block, encode_block, read_ac, read_dc, AcStep, CoefficientBlock,
    DecodedScan, ScanTables,
};
use crate::error::{Error, Result};
use crate::rxy::{rxy_decode, rxy_encode, RxySymbol};

/// Payload bits spent per special block index.
pub const INDEX_COST_BITS: usize = 16;

/// Image-wide zigzag cut position, `1..=64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TerminatePoint(u8);

impl TerminatePoint {
    pub fn new(t: u8) -> Result<Self> {
        if (1..=64).contains(&t) {
            Ok(TerminatePoint(t))
        } else {
            Err(Error::BadTerminatePoint(t))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

/// Highest zigzag position holding a coefficient with magnitude above 2, or 0.
pub fn block_tpoint(block: &CoefficientBlock) -> u8 {
    block.coeffs.iter().rposition(|v| v.abs() > 2).map_or(0, |i| i as u8 + 1)
}

/// Maximum of [`block_tpoint`] over all blocks, at least 1.
pub fn image_tpoint(blocks: &[CoefficientBlock]) -> TerminatePoint {
    let t = blocks.iter().map(block_tpoint).max().unwrap_or(0);
    TerminatePoint(t.max(1))
}

/// Where a block's standard coding stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockCut {
    /// Bit offset just after the last standard-coded symbol.
    pub cut_bit: usize,
    /// Zigzag position reached at the cut, or `None` when EOB came first and
    /// the whole block is standard coded. The Rxy region is `pos + 1..=64`.
    pub cut_pos: Option<usize>,
}

impl BlockCut {
    /// First Rxy-coded position, if the block has a non-empty Rxy region.
    pub fn rxy_start(&self) -> Option<usize> {
        self.cut_pos.filter(|&p| p < 64).map(|p| p + 1)
    }
}

/// Walks standard symbols from a block's first bit until EOB or position >= t.
fn walk_to_cut(
    reader: &mut BitReader<'_>,
    tables: &ScanTables,
    t: TerminatePoint,
) -> Result<BlockCut> {
    read_dc(reader, &tables.dc)?;
    let mut pos = 1usize;
    let t = t.get() as usize;
    while pos < t {
        let step = read_ac(reader, &tables.ac)?;
        if step == AcStep::Eob {
            return Ok(BlockCut { cut_bit: reader.position(), cut_pos: None });
        }
        pos = step.advance(pos);
        if pos > 64 {
            return Err(Error::PositionOverflow { bit: reader.position() });
        }
    }
    Ok(BlockCut { cut_bit: reader.position(), cut_pos: Some(pos) })
}

/// Cut point of a block whose standard coding starts at `start_bit`.
pub fn cut_block(
    bits: &BitBuf,
    start_bit: usize,
    t: TerminatePoint,
    tables: &ScanTables,
) -> Result<BlockCut> {
    walk_to_cut(&mut BitReader::at(bits, start_bit), tables, t)
}

/// Rxy coding of positions `start..=64`; ends with the Rxy EOB unless
/// position 64 is nonzero.
fn rxy_region(block: &CoefficientBlock, start: usize, out: &mut BitBuf) -> Result<()> {
    let mut run = 0u8;
    for pos in start..=64 {
        let v = block.at(pos);
        if v == 0 {
            run += 1;
        } else {
            let value = i8::try_from(v).map_err(|_| Error::ValueOutOfRange(v))?;
            rxy_encode(RxySymbol::Coeff { run, value }, out)?;
            run = 0;
        }
    }
    if run > 0 {
        rxy_encode(RxySymbol::EndOfBlock, out)?;
    }
    Ok(())
}

/// Why a block was carried verbatim.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialReason {
    /// A coefficient above the cut has magnitude above 2.
    LargeCoefficient,
    /// Canonical re-encoding of the Rxy region does not give back the source bits.
    NonCanonical,
    /// The Rxy region is longer than the bits it replaces by more than the
    /// cost of recording the block index.
    NoGain,
}

#[derive(Debug, Clone)]
pub struct TranscodeResult {
    pub new_scan_bits: BitBuf,
    pub new_scan: EntropyScan,
    /// 0-based, strictly increasing.
    pub special_indexes: Vec<usize>,
    pub special_reasons: Vec<SpecialReason>,
    pub t: TerminatePoint,
    /// Original stuffed scan length minus the new one; may be negative.
    pub saved_bytes: i64,
    /// Per-block cut as chosen by the encoder (`None` for special blocks).
    pub cuts: Vec<Option<BlockCut>>,
}

fn stuffed_len(bits: &BitBuf) -> usize {
    debug_assert!(bits.len() % 8 == 0);
    bits.as_bytes().len() + bits.as_bytes().iter().filter(|&&b| b == 0xFF).count()
}

/// Recodes every block of `decoded` around terminate point `t`.
pub fn transcode_forward(
    decoded: &DecodedScan,
    t: TerminatePoint,
    tables: &ScanTables,
) -> Result<TranscodeResult> {
    let count = decoded.blocks.len();
    if count > u16::MAX as usize {
        return Err(Error::TooManyBlocks(count));
    }
    let bits = &decoded.bits;
    let data_end = decoded.spans.last().map_or(0, |s| s.end_bit);
    check_padding(bits, data_end)?;

    let mut out = BitBuf::with_capacity(bits.len());
    let mut special_indexes = Vec::new();
    let mut special_reasons = Vec::new();
    let mut cuts = Vec::with_capacity(count);

    for (i, (block, span)) in decoded.blocks.iter().zip(&decoded.spans).enumerate() {
        let cut = cut_block(bits, span.start_bit, t, tables)?;
        let Some(start) = cut.rxy_start() else {
            out.extend_range(bits, span.start_bit, span.end_bit);
            cuts.push(Some(cut));
            continue;
        };

        let mut rxy = BitBuf::new();
        let reason = if block.coeffs[start - 1..].iter().any(|v| v.abs() > 2) {
            Some(SpecialReason::LargeCoefficient)
        } else {
            let mut canonical = BitBuf::new();
            let reproduces = encode_block(block, start, tables, &mut canonical).is_ok()
                && bits.range_eq(cut.cut_bit, span.end_bit, &canonical);
            rxy_region(block, start, &mut rxy)?;
            if !reproduces {
                Some(SpecialReason::NonCanonical)
            } else if rxy.len() > span.end_bit - cut.cut_bit + INDEX_COST_BITS {
                Some(SpecialReason::NoGain)
            } else {
                None
            }
        };

        match reason {
            Some(r) => {
                out.extend_range(bits, span.start_bit, span.end_bit);
                special_indexes.push(i);
                special_reasons.push(r);
                cuts.push(None);
            }
            None => {
                out.extend_range(bits, span.start_bit, cut.cut_bit);
                out.extend(&rxy);
                cuts.push(Some(cut));
            }
        }
    }

    let new_scan = stuff(&out);
    let saved_bytes = stuffed_len(bits) as i64 - new_scan.len() as i64;
    Ok(TranscodeResult {
        new_scan_bits: out,
        new_scan,
        special_indexes,
        special_reasons,
        t,
        saved_bytes,
        cuts,
    })
}

/// Everything the decoder needs besides the marked scan itself.
#[derive(Debug, Clone, Copy)]
pub struct BackwardParams<'a> {
    pub t: TerminatePoint,
    pub special_indexes: &'a [u16],
    pub block_count: usize,
    /// Stuffed length the restored scan must have, when known.
    pub expected_len: Option<usize>,
}

/// Undoes [`transcode_forward`], returning the original stuffed scan.
pub fn transcode_backward(
    scan: &EntropyScan,
    params: &BackwardParams<'_>,
    tables: &ScanTables,
) -> Result<EntropyScan> {
    let bits = crate::container::unstuff(scan)?;
    let (restored, _) = backward_bits(&bits, params, tables)?;
    let out = stuff(&restored);
    if let Some(expected) = params.expected_len {
        if out.len() != expected {
            return Err(Error::LengthMismatch { expected, actual: out.len() });
        }
    }
    Ok(out)
}

/// Bit-level backward pass; also reports the cut the decoder found in each
/// block (`None` for special blocks).
pub(crate) fn backward_bits(
    bits: &BitBuf,
    params: &BackwardParams<'_>,
    tables: &ScanTables,
) -> Result<(BitBuf, Vec<Option<BlockCut>>)> {
    let specials = params.special_indexes;
    let sorted = specials.windows(2).all(|w| w[0] < w[1]);
    if !sorted || specials.last().is_some_and(|&i| i as usize >= params.block_count) {
        return Err(Error::InvalidSpecialIndexes);
    }
    let mut next_special = specials.iter().peekable();
    let mut out = BitBuf::with_capacity(bits.len() + bits.len() / 8);
    let mut cuts = Vec::with_capacity(params.block_count);
    let mut reader = BitReader::new(bits);

    for i in 0..params.block_count {
        let start_bit = reader.position();
        if next_special.peek().is_some_and(|&&s| s as usize == i) {
            next_special.next();
            decode_block(&mut reader, tables)?;
            out.extend_range(bits, start_bit, reader.position());
            cuts.push(None);
            continue;
        }

        let cut = walk_to_cut(&mut reader, tables, params.t)?;
        out.extend_range(bits, start_bit, cut.cut_bit);
        cuts.push(Some(cut));
        let Some(start) = cut.rxy_start() else {
            continue;
        };

        let mut block = CoefficientBlock::default();
        let mut pos = start - 1;
        while pos < 64 {
            match rxy_decode(&mut reader).map_err(|_| Error::RxyCorrupt { block: i })? {
                RxySymbol::EndOfBlock => break,
                RxySymbol::Coeff { run, value } => {
                    pos += run as usize + 1;
                    if pos > 64 {
                        return Err(Error::RxyCorrupt { block: i });
                    }
                    block.set(pos, value as i32);
                }
            }
        }
        encode_block(&block, start, tables, &mut out)?;
    }
    check_padding(bits, reader.position())?;
    Ok((out, cuts))
}

/// Sweeps every terminate point and returns the one that leaves the most
/// room for a secret; ties go to the plain maximum, then to the lower `t`.
pub fn optimize_terminate_point(
    decoded: &DecodedScan,
    tables: &ScanTables,
) -> Result<TranscodeResult> {
    let baseline = image_tpoint(&decoded.blocks);
    let mut best = transcode_forward(decoded, baseline, tables)?;
    let score =
        |r: &TranscodeResult| crate::payload::capacity(r.saved_bytes, r.special_indexes.len());
    let mut best_score = score(&best);
    for t in 1..=64u8 {
        let t = TerminatePoint(t);
        if t == baseline {
            continue;
        }
        let candidate = transcode_forward(decoded, t, tables)?;
        if score(&candidate) > best_score {
            best_score = score(&candidate);
            best = candidate;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::container::unstuff;
    use crate::entropy::decode_scan;
    use alloc::vec;

    /// The 8x8 example block in natural (row-major) order.
    pub(crate) const EXAMPLE_BLOCK: [i32; 64] = [
        12, 17, 10, -5, 0, -2, 0, 0, //
        15, 8, 0, 0, 0, 0, 0, 0, //
        -9, 0, 0, 0, 0, -1, 0, 0, //
        3, 4, 0, 0, 0, 0, 0, 0, //
        0, 0, 0, 0, 0, 0, 0, 0, //
        1, 0, 0, 0, 0, 0, 0, 0, //
        0, 0, 0, 0, 0, 0, 0, 0, //
        0, 0, 0, 0, 0, 0, 0, 0,
    ];

    fn example() -> CoefficientBlock {
        let coeffs = crate::tables::natural_to_zigzag(&EXAMPLE_BLOCK);
        CoefficientBlock { coeffs, dc_diff: coeffs[0] }
    }

    fn scan_of(blocks: &[CoefficientBlock], tables: &ScanTables) -> BitBuf {
        let mut bits = BitBuf::new();
        let mut pred = 0;
        for b in blocks {
            let mut b = *b;
            b.dc_diff = b.at(1) - pred;
            pred = b.at(1);
            encode_block(&b, 1, tables, &mut bits).unwrap();
        }
        // pad like an encoder would, through stuff/unstuff
        unstuff(&stuff(&bits)).unwrap()
    }

    #[test]
    fn example_positions_under_standard_zigzag() {
        let b = example();
        assert_eq!(block_tpoint(&b), 12);
        assert_eq!(b.at(12), 4);
        assert_eq!(b.at(10), 3);
        assert_eq!((b.at(16), b.at(21), b.at(31)), (-2, 1, -1));
        let nonzero_after: Vec<usize> = (13..=64).filter(|&p| b.at(p) != 0).collect();
        assert_eq!(nonzero_after, vec![16, 21, 31]);
    }

    #[test]
    fn example_block_forward() {
        let tables = ScanTables::standard();
        let bits = scan_of(&[example()], &tables);
        let decoded = decode_scan(bits.clone(), &tables, 1).unwrap();
        let t = image_tpoint(&decoded.blocks);
        assert_eq!(t.get(), 12);

        let cut = cut_block(&bits, 0, t, &tables).unwrap();
        assert_eq!(cut.cut_pos, Some(12));
        let replaced = decoded.spans[0].end_bit - cut.cut_bit;
        assert_eq!(replaced, 32);

        let r = transcode_forward(&decoded, t, &tables).unwrap();
        assert!(r.special_indexes.is_empty());
        let mut expect = BitBuf::new();
        expect.extend_range(&bits, 0, cut.cut_bit);
        expect.extend(&BitBuf::from_bit_str("100 00 101 10 111100 01 000"));
        assert_eq!(r.new_scan_bits, expect);
        assert_eq!(r.new_scan_bits.len() - cut.cut_bit, 21);
    }

    #[test]
    fn example_block_backward_restores_canonical_bits() {
        let tables = ScanTables::standard();
        let original = scan_of(&[example()], &tables);
        let decoded = decode_scan(original.clone(), &tables, 1).unwrap();
        let t = TerminatePoint::new(12).unwrap();
        let r = transcode_forward(&decoded, t, &tables).unwrap();
        let params = BackwardParams { t, special_indexes: &[], block_count: 1, expected_len: None };
        let (restored, _) = backward_bits(&r.new_scan_bits, &params, &tables).unwrap();
        let cut = cut_block(&original, 0, t, &tables).unwrap();
        // 3/2 + VLI(-2), 4/1 + VLI(1), 9/1 + VLI(-1), EOB
        let tail = BitBuf::from_bit_str("111110111 01 111011 1 111111001 0 1010");
        assert_eq!(tail.len(), 32);
        let mut got = BitBuf::new();
        got.extend_range(&restored, cut.cut_bit, restored.len());
        assert_eq!(got, tail);
        assert_eq!(stuff(&restored), stuff(&original));
    }

    #[test]
    fn tpoint_edges() {
        assert_eq!(block_tpoint(&CoefficientBlock::default()), 0);
        let mut b = CoefficientBlock::default();
        b.set(64, -3);
        assert_eq!(block_tpoint(&b), 64);
        assert_eq!(image_tpoint(&[CoefficientBlock::default(); 3]).get(), 1);
        let mk = |p: usize| {
            let mut b = CoefficientBlock::default();
            if p > 0 {
                b.set(p, 7);
            }
            b
        };
        assert_eq!(image_tpoint(&[mk(5), mk(12), mk(0)]).get(), 12);
        assert_eq!(TerminatePoint::new(0), Err(Error::BadTerminatePoint(0)));
        assert_eq!(TerminatePoint::new(65), Err(Error::BadTerminatePoint(65)));
    }

    #[test]
    fn eob_before_t_keeps_block_standard() {
        let tables = ScanTables::standard();
        let mut b = CoefficientBlock::default();
        b.set(1, 40);
        b.set(3, 5);
        b.set(7, -1);
        let bits = scan_of(&[b], &tables);
        let cut = cut_block(&bits, 0, TerminatePoint::new(12).unwrap(), &tables).unwrap();
        assert_eq!(cut.cut_pos, None);
        let decoded = decode_scan(bits.clone(), &tables, 1).unwrap();
        assert_eq!(cut.cut_bit, decoded.spans[0].end_bit);
    }

    #[test]
    fn crossing_symbol_stays_standard() {
        let tables = ScanTables::standard();
        let mut b = CoefficientBlock::default();
        b.set(1, 20);
        b.set(8, 1);
        b.set(20, -1);
        b.set(30, 2);
        let bits = scan_of(&[b], &tables);
        let t = TerminatePoint::new(12).unwrap();
        let cut = cut_block(&bits, 0, t, &tables).unwrap();
        assert_eq!(cut.cut_pos, Some(20));
        assert_eq!(cut.rxy_start(), Some(21));

        // the decoder mirror finds the same cut in the marked scan
        let decoded = decode_scan(bits, &tables, 1).unwrap();
        let r = transcode_forward(&decoded, t, &tables).unwrap();
        let params = BackwardParams { t, special_indexes: &[], block_count: 1, expected_len: None };
        let (restored, cuts) = backward_bits(&r.new_scan_bits, &params, &tables).unwrap();
        assert_eq!(cuts[0].map(|c| c.cut_pos), Some(Some(20)));
        assert_eq!(r.cuts[0].map(|c| c.cut_pos), Some(Some(20)));
        assert_eq!(stuff(&restored), stuff(&decoded.bits));
    }

    #[test]
    fn dense_small_values_are_special() {
        let tables = ScanTables::standard();
        let mut b = CoefficientBlock::default();
        b.set(1, 9);
        for p in 2..=64 {
            b.set(p, if p % 2 == 0 { 1 } else { -1 });
        }
        let bits = scan_of(&[b], &tables);
        let decoded = decode_scan(bits, &tables, 1).unwrap();
        let t = TerminatePoint::new(1).unwrap();
        // standard 0/1 costs 3 bits per coefficient, Rxy costs 5
        let r = transcode_forward(&decoded, t, &tables).unwrap();
        assert_eq!(r.special_indexes, vec![0]);
        assert_eq!(r.special_reasons, vec![SpecialReason::NoGain]);
        assert_eq!(stuff(&r.new_scan_bits), stuff(&decoded.bits));
    }

    #[test]
    fn small_loss_is_cheaper_than_an_index() {
        let tables = ScanTables::standard();
        let t = TerminatePoint::new(1).unwrap();
        // k coefficients of 0/1: standard 3k + 4 bits, Rxy 5k + 3 bits
        for (k, special) in [(8usize, false), (9, true)] {
            let mut b = CoefficientBlock::default();
            b.set(1, 9);
            for p in 2..2 + k {
                b.set(p, 1);
            }
            let decoded = decode_scan(scan_of(&[b], &tables), &tables, 1).unwrap();
            let r = transcode_forward(&decoded, t, &tables).unwrap();
            assert_eq!(!r.special_indexes.is_empty(), special, "k = {k}");
        }
    }

    #[test]
    fn low_t_forces_large_coefficient_special() {
        let tables = ScanTables::standard();
        let decoded = decode_scan(scan_of(&[example()], &tables), &tables, 1).unwrap();
        let r = transcode_forward(&decoded, TerminatePoint::new(5).unwrap(), &tables).unwrap();
        assert_eq!(r.special_reasons, vec![SpecialReason::LargeCoefficient]);
    }

    #[test]
    fn all_zero_image() {
        let tables = ScanTables::standard();
        let blocks = vec![CoefficientBlock::default(); 64];
        let decoded = decode_scan(scan_of(&blocks, &tables), &tables, 64).unwrap();
        let t = image_tpoint(&decoded.blocks);
        assert_eq!(t.get(), 1);
        let r = transcode_forward(&decoded, t, &tables).unwrap();
        assert!(r.special_indexes.is_empty());
        // each block: DC "00" then EOB 1010 (4 bits) becomes 000 (3 bits)
        assert_eq!(r.new_scan_bits.len(), 64 * 5);
        assert_eq!(r.saved_bytes, 48 - 40);
    }

    #[test]
    fn non_canonical_source_is_special() {
        let tables = ScanTables::standard();
        // DC 0, then a redundant ZRL before EOB
        let mut bits = BitBuf::new();
        tables.dc.encode(0, &mut bits).unwrap();
        tables.ac.encode(0x01, &mut bits).unwrap();
        bits.push_bit(true);
        tables.ac.encode(0xf0, &mut bits).unwrap();
        tables.ac.encode(0x00, &mut bits).unwrap();
        let bits = unstuff(&stuff(&bits)).unwrap();
        let decoded = decode_scan(bits, &tables, 1).unwrap();
        let r = transcode_forward(&decoded, TerminatePoint::new(1).unwrap(), &tables).unwrap();
        assert_eq!(r.special_reasons, vec![SpecialReason::NonCanonical]);
        let params =
            BackwardParams { t: r.t, special_indexes: &[0], block_count: 1, expected_len: None };
        let (restored, _) = backward_bits(&r.new_scan_bits, &params, &tables).unwrap();
        assert_eq!(stuff(&restored), stuff(&decoded.bits));
    }

    #[test]
    fn backward_rejects_bad_special_lists() {
        let tables = ScanTables::standard();
        let t = TerminatePoint::new(1).unwrap();
        let bits = BitBuf::new();
        for specials in [&[3u16, 2][..], &[1, 1], &[5]] {
            let params =
                BackwardParams { t, special_indexes: specials, block_count: 4, expected_len: None };
            assert_eq!(
                backward_bits(&bits, &params, &tables).map(|_| ()),
                Err(Error::InvalidSpecialIndexes)
            );
        }
    }

    #[test]
    fn length_mismatch_reported() {
        let tables = ScanTables::standard();
        let decoded = decode_scan(scan_of(&[example()], &tables), &tables, 1).unwrap();
        let r = transcode_forward(&decoded, TerminatePoint::new(12).unwrap(), &tables).unwrap();
        let params = BackwardParams {
            t: r.t,
            special_indexes: &[],
            block_count: 1,
            expected_len: Some(1000),
        };
        assert!(matches!(
            transcode_backward(&r.new_scan, &params, &tables),
            Err(Error::LengthMismatch { expected: 1000, .. })
        ));
    }

    #[test]
    fn trailing_garbage_rejected() {
        let tables = ScanTables::standard();
        let mut bits = scan_of(&[example()], &tables);
        bits.push_bits(0, 8);
        let decoded = decode_scan(bits, &tables, 1).unwrap();
        assert!(matches!(
            transcode_forward(&decoded, TerminatePoint::new(12).unwrap(), &tables),
            Err(Error::TrailingScanData { .. })
        ));
    }
}
