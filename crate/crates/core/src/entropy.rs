//! Baseline Huffman entropy coding of 8x8 coefficient blocks.
//!
//! Positions are 1-based zigzag indexes: position 1 is DC, 2..=64 are AC.
//! Arrays are still indexed from 0, so position `j` lives at `coeffs[j - 1]`.
//!
//! Decoding records the bit span each block occupies so the transcoder can
//! copy original bits verbatim; encoding is canonical (ZRL only when a run
//! exceeds 15, a single EOB after the last nonzero, none when position 64 is
//! nonzero).

use alloc::vec::Vec;

use crate::bits::{BitBuf, BitReader};
use crate::container::{HuffmanClass, HuffmanTableSpec};
use crate::error::{Error, Result};

/// Canonical prefix code built from a DHT table spec; decodes and encodes.
#[derive(Debug, Clone)]
pub struct HuffmanTable {
    class: HuffmanClass,
    /// Per code length (index 1..=16): largest code, or -1 when none.
    max_code: [i32; 17],
    min_code: [i32; 17],
    val_ptr: [usize; 17],
    symbols: Vec<u8>,
    /// symbol -> (code, length); length 0 means absent.
    codes: [(u16, u8); 256],
}

impl HuffmanTable {
    pub fn build(spec: &HuffmanTableSpec) -> Result<Self> {
        let total: usize = spec.bit_counts.iter().map(|&c| c as usize).sum();
        if total != spec.symbols.len() {
            return Err(Error::InvalidTable("bit counts do not match symbol count"));
        }
        let mut table = HuffmanTable {
            class: spec.class,
            max_code: [-1; 17],
            min_code: [0; 17],
            val_ptr: [0; 17],
            symbols: spec.symbols.clone(),
            codes: [(0, 0); 256],
        };
        let mut code: u32 = 0;
        let mut k = 0;
        for len in 1..=16usize {
            let count = spec.bit_counts[len - 1] as usize;
            if count > 0 {
                table.val_ptr[len] = k;
                table.min_code[len] = code as i32;
                for _ in 0..count {
                    if code >= 1 << len {
                        return Err(Error::InvalidTable(
                            "code lengths violate the Kraft inequality",
                        ));
                    }
                    let sym = spec.symbols[k] as usize;
                    if table.codes[sym].1 != 0 {
                        return Err(Error::InvalidTable("duplicate symbol"));
                    }
                    table.codes[sym] = (code as u16, len as u8);
                    code += 1;
                    k += 1;
                }
                table.max_code[len] = code as i32 - 1;
            }
            code <<= 1;
        }
        Ok(table)
    }

    pub fn class(&self) -> HuffmanClass {
        self.class
    }

    /// Code word and its length in bits.
    pub fn code_of(&self, symbol: u8) -> Option<(u16, u8)> {
        let (code, len) = self.codes[symbol as usize];
        (len != 0).then_some((code, len))
    }

    pub fn encode(&self, symbol: u8, out: &mut BitBuf) -> Result<()> {
        let (code, len) = self.code_of(symbol).ok_or(Error::UncodableSymbol(symbol))?;
        out.push_bits(code as u32, len);
        Ok(())
    }

    pub fn decode(&self, reader: &mut BitReader<'_>) -> Result<u8> {
        let start = reader.position();
        let mut code: i32 = 0;
        for len in 1..=16 {
            code = (code << 1) | reader.read_bit().ok_or(Error::Overrun)? as i32;
            if code <= self.max_code[len] {
                let idx = self.val_ptr[len] + (code - self.min_code[len]) as usize;
                return Ok(self.symbols[idx]);
            }
        }
        Err(Error::BadCode { bit: start })
    }
}

/// The DC/AC table pair a scan component uses.
#[derive(Debug, Clone)]
pub struct ScanTables {
    pub dc: HuffmanTable,
    pub ac: HuffmanTable,
}

impl ScanTables {
    pub fn from_specs(dc: &HuffmanTableSpec, ac: &HuffmanTableSpec) -> Result<Self> {
        Ok(ScanTables { dc: HuffmanTable::build(dc)?, ac: HuffmanTable::build(ac)? })
    }

    /// Standard luminance tables (T.81 K.3 and K.5).
    pub fn standard() -> Self {
        Self::from_specs(
            &HuffmanTableSpec::std_dc_luminance(),
            &HuffmanTableSpec::std_ac_luminance(),
        )
        .expect("standard tables are valid")
    }
}

/// An AC (run, size) symbol; (0,0) is EOB and (15,0) is ZRL.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSizeSymbol {
    pub run: u8,
    pub size: u8,
}

impl RunSizeSymbol {
    pub const EOB: RunSizeSymbol = RunSizeSymbol { run: 0, size: 0 };
    pub const ZRL: RunSizeSymbol = RunSizeSymbol { run: 15, size: 0 };

    pub fn from_byte(b: u8) -> Self {
        RunSizeSymbol { run: b >> 4, size: b & 0x0f }
    }

    pub fn to_byte(self) -> u8 {
        (self.run << 4) | self.size
    }
}

/// Quantized coefficients of one block in zigzag order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoefficientBlock {
    pub coeffs: [i32; 64],
    /// DC difference as coded, relative to the previous block's DC.
    pub dc_diff: i32,
}

impl Default for CoefficientBlock {
    fn default() -> Self {
        CoefficientBlock { coeffs: [0; 64], dc_diff: 0 }
    }
}

impl CoefficientBlock {
    /// Coefficient at 1-based zigzag position `pos`.
    pub fn at(&self, pos: usize) -> i32 {
        self.coeffs[pos - 1]
    }

    pub fn set(&mut self, pos: usize, value: i32) {
        self.coeffs[pos - 1] = value;
    }
}

/// Where a block's coding sits in the unstuffed scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BlockBitSpan {
    pub start_bit: usize,
    /// End of the standard-coded region; equals `end_bit` until a cut is chosen.
    pub cut_bit: usize,
    pub end_bit: usize,
}

/// Length accounting of one code word plus its appended bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeMetrics {
    pub m1: u32,
    pub m2: u32,
    pub m: u32,
    pub rate: f64,
}

/// Share of appended (value) bits in a code of `m` bits whose code word takes `m1`.
pub fn code_rate(m1: u32, m: u32) -> CodeMetrics {
    debug_assert!(m1 <= m && m > 0);
    let m2 = m - m1;
    CodeMetrics { m1, m2, m, rate: m2 as f64 / m as f64 }
}

/// Magnitude category and appended bits of a nonzero value (T.81 F.1.2.1).
pub fn vli_encode(value: i32) -> Result<(u8, u32)> {
    if value == 0 {
        return Err(Error::ZeroValue);
    }
    let size = (32 - value.unsigned_abs().leading_zeros()) as u8;
    let bits = if value > 0 { value as u32 } else { (value + (1 << size) - 1) as u32 };
    Ok((size, bits))
}

pub fn vli_decode(size: u8, bits: u32) -> i32 {
    if size == 0 {
        return 0;
    }
    if bits < 1 << (size - 1) {
        bits as i32 - (1 << size) + 1
    } else {
        bits as i32
    }
}

/// One decoded AC symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum AcStep {
    Eob,
    Zrl,
    Coeff { run: u8, value: i32 },
}

impl AcStep {
    /// Zigzag position after applying this step at `pos`.
    pub(crate) fn advance(self, pos: usize) -> usize {
        match self {
            AcStep::Eob => pos,
            AcStep::Zrl => pos + 16,
            AcStep::Coeff { run, .. } => pos + run as usize + 1,
        }
    }
}

fn read_value(reader: &mut BitReader<'_>, size: u8) -> Result<i32> {
    let bits = reader.read_bits(size).ok_or(Error::Overrun)?;
    Ok(vli_decode(size, bits))
}

pub(crate) fn read_dc(reader: &mut BitReader<'_>, dc: &HuffmanTable) -> Result<i32> {
    let start = reader.position();
    let size = dc.decode(reader)?;
    if size > 15 {
        return Err(Error::BadCode { bit: start });
    }
    read_value(reader, size)
}

pub(crate) fn read_ac(reader: &mut BitReader<'_>, ac: &HuffmanTable) -> Result<AcStep> {
    let start = reader.position();
    let rs = RunSizeSymbol::from_byte(ac.decode(reader)?);
    match rs {
        RunSizeSymbol::EOB => Ok(AcStep::Eob),
        RunSizeSymbol::ZRL => Ok(AcStep::Zrl),
        RunSizeSymbol { size: 0, .. } => Err(Error::BadCode { bit: start }),
        RunSizeSymbol { run, size } => Ok(AcStep::Coeff { run, value: read_value(reader, size)? }),
    }
}

/// Walks the AC symbols of a block from position `pos` (the last position
/// already consumed) until EOB or position 64, calling `visit` after each
/// symbol with the new position. `visit` returns `false` to stop early.
pub(crate) fn walk_ac(
    reader: &mut BitReader<'_>,
    ac: &HuffmanTable,
    mut pos: usize,
    mut visit: impl FnMut(AcStep, usize, usize) -> bool,
) -> Result<usize> {
    while pos < 64 {
        let step = read_ac(reader, ac)?;
        if step == AcStep::Eob {
            visit(step, pos, reader.position());
            break;
        }
        pos = step.advance(pos);
        if pos > 64 {
            return Err(Error::PositionOverflow { bit: reader.position() });
        }
        if !visit(step, pos, reader.position()) {
            break;
        }
    }
    Ok(pos)
}

/// Decodes one block. `coeffs[0]` holds the DC *difference*; see
/// [`decode_scan`] for absolute DC values.
pub fn decode_block(
    reader: &mut BitReader<'_>,
    tables: &ScanTables,
) -> Result<(CoefficientBlock, BlockBitSpan)> {
    let start_bit = reader.position();
    let dc_diff = read_dc(reader, &tables.dc)?;
    let mut block = CoefficientBlock { dc_diff, ..Default::default() };
    block.coeffs[0] = dc_diff;
    walk_ac(reader, &tables.ac, 1, |step, pos, _| {
        if let AcStep::Coeff { value, .. } = step {
            block.coeffs[pos - 1] = value;
        }
        true
    })?;
    let end_bit = reader.position();
    Ok((block, BlockBitSpan { start_bit, cut_bit: end_bit, end_bit }))
}

/// Canonically encodes positions `start_pos..=64` of `block`. DC (from
/// `dc_diff`) is written only when `start_pos == 1`.
pub fn encode_block(
    block: &CoefficientBlock,
    start_pos: usize,
    tables: &ScanTables,
    out: &mut BitBuf,
) -> Result<()> {
    debug_assert!((1..=64).contains(&start_pos));
    if start_pos == 1 {
        if block.dc_diff == 0 {
            tables.dc.encode(0, out)?;
        } else {
            let (size, bits) = vli_encode(block.dc_diff)?;
            if size > 15 {
                return Err(Error::SizeOverflow(block.dc_diff));
            }
            tables.dc.encode(size, out)?;
            out.push_bits(bits, size);
        }
    }
    let mut run = 0u32;
    for pos in start_pos.max(2)..=64 {
        let v = block.coeffs[pos - 1];
        if v == 0 {
            run += 1;
            continue;
        }
        let (size, bits) = vli_encode(v)?;
        if size > 15 {
            return Err(Error::SizeOverflow(v));
        }
        while run > 15 {
            tables.ac.encode(RunSizeSymbol::ZRL.to_byte(), out)?;
            run -= 16;
        }
        tables.ac.encode(RunSizeSymbol { run: run as u8, size }.to_byte(), out)?;
        out.push_bits(bits, size);
        run = 0;
    }
    if run > 0 {
        tables.ac.encode(RunSizeSymbol::EOB.to_byte(), out)?;
    }
    Ok(())
}

/// Every block of a scan, decoded.
#[derive(Debug, Clone)]
pub struct DecodedScan {
    pub bits: BitBuf,
    /// Absolute coefficients (DC predictor applied).
    pub blocks: Vec<CoefficientBlock>,
    pub spans: Vec<BlockBitSpan>,
}

impl DecodedScan {
    /// Bits after the last block (normally < 8 bits of 1-padding).
    pub fn tail_bits(&self) -> usize {
        self.bits.len() - self.spans.last().map_or(0, |s| s.end_bit)
    }
}

/// Checks that bits from `from` to the end are at most 7 one-bits.
pub(crate) fn check_padding(bits: &BitBuf, from: usize) -> Result<()> {
    let tail = bits.len() - from;
    if tail >= 8 || (from..bits.len()).any(|i| !bits.get(i)) {
        return Err(Error::TrailingScanData { bits: tail });
    }
    Ok(())
}

/// Decodes `block_count` blocks from an unstuffed scan.
pub fn decode_scan(bits: BitBuf, tables: &ScanTables, block_count: usize) -> Result<DecodedScan> {
    let mut blocks = Vec::with_capacity(block_count);
    let mut spans = Vec::with_capacity(block_count);
    let mut reader = BitReader::new(&bits);
    let mut pred = 0i32;
    for _ in 0..block_count {
        let (mut block, span) = decode_block(&mut reader, tables)?;
        pred += block.dc_diff;
        block.coeffs[0] = pred;
        blocks.push(block);
        spans.push(span);
    }
    Ok(DecodedScan { bits, blocks, spans })
}
