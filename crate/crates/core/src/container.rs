//! Marker-segment level view of a baseline JPEG file.
//!
//! A [`JpegFile`] keeps every segment from SOI through SOS verbatim, the
//! stuffed entropy-coded scan, and whatever follows EOI, so that
//! `serialize_jpeg(&parse_jpeg(b)?)? == b`. Only the pieces the transcoder
//! needs are interpreted: the SOF0 frame header, DHT tables and the SOS
//! table selectors. Everything else is passed through opaquely.

use alloc::vec::Vec;

use crate::bits::BitBuf;
use crate::error::{Error, Result};

pub mod marker {
    pub const SOI: u16 = 0xFFD8;
    pub const EOI: u16 = 0xFFD9;
    pub const SOF0: u16 = 0xFFC0;
    pub const DHT: u16 = 0xFFC4;
    pub const DAC: u16 = 0xFFCC;
    pub const JPG: u16 = 0xFFC8;
    pub const SOS: u16 = 0xFFDA;
    pub const DRI: u16 = 0xFFDD;
    pub const COM: u16 = 0xFFFE;
    pub const TEM: u16 = 0xFF01;

    pub fn is_rst(m: u16) -> bool {
        (0xFFD0..=0xFFD7).contains(&m)
    }

    /// Markers that carry no length field.
    pub fn is_standalone(m: u16) -> bool {
        m == SOI || m == EOI || m == TEM || is_rst(m)
    }

    pub fn is_sof(m: u16) -> bool {
        (0xFFC0..=0xFFCF).contains(&m) && m != DHT && m != JPG && m != DAC
    }
}

/// Largest payload a length-prefixed segment can hold.
pub const MAX_SEGMENT_PAYLOAD: usize = 65533;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub marker: u16,
    /// Segment body without the 2-byte length field (recomputed on write).
    pub payload: Vec<u8>,
}

impl Segment {
    pub fn new(marker: u16, payload: Vec<u8>) -> Self {
        Segment { marker, payload }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HuffmanClass {
    Dc,
    Ac,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanTableSpec {
    pub class: HuffmanClass,
    pub id: u8,
    /// Number of codes of each length 1..=16.
    pub bit_counts: [u8; 16],
    pub symbols: Vec<u8>,
}

impl HuffmanTableSpec {
    pub fn new(class: HuffmanClass, id: u8, bit_counts: [u8; 16], symbols: &[u8]) -> Self {
        HuffmanTableSpec { class, id, bit_counts, symbols: symbols.to_vec() }
    }

    /// Standard luminance DC table (T.81 K.3).
    pub fn std_dc_luminance() -> Self {
        use crate::tables::*;
        Self::new(HuffmanClass::Dc, 0, STD_DC_LUMINANCE_BITS, &STD_DC_LUMINANCE_VALUES)
    }

    /// Standard luminance AC table (T.81 K.5).
    pub fn std_ac_luminance() -> Self {
        use crate::tables::*;
        Self::new(HuffmanClass::Ac, 0, STD_AC_LUMINANCE_BITS, &STD_AC_LUMINANCE_VALUES)
    }

    fn write_to(&self, out: &mut Vec<u8>) {
        let tc = match self.class {
            HuffmanClass::Dc => 0,
            HuffmanClass::Ac => 1,
        };
        out.push((tc << 4) | self.id);
        out.extend_from_slice(&self.bit_counts);
        out.extend_from_slice(&self.symbols);
    }

    /// Body of a DHT segment holding just this table.
    pub fn to_dht_payload(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(17 + self.symbols.len());
        self.write_to(&mut out);
        out
    }
}

/// Stuffed entropy-coded data exactly as stored between SOS and EOI.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EntropyScan {
    pub stuffed_bytes: Vec<u8>,
    /// MCUs per restart interval; always 0 for supported files.
    pub restart_interval: u16,
}

impl EntropyScan {
    pub fn new(stuffed_bytes: Vec<u8>) -> Self {
        EntropyScan { stuffed_bytes, restart_interval: 0 }
    }

    pub fn len(&self) -> usize {
        self.stuffed_bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stuffed_bytes.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameHeader {
    pub precision: u8,
    pub height: u16,
    pub width: u16,
    pub component_id: u8,
    pub sampling: u8,
    pub quant_table: u8,
}

impl FrameHeader {
    /// Blocks in the (non-interleaved, single component) scan.
    pub fn block_count(&self) -> usize {
        (self.width as usize).div_ceil(8) * (self.height as usize).div_ceil(8)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JpegFile {
    /// SOI first, SOS last; SOI is stored with an empty payload.
    pub segments: Vec<Segment>,
    pub scan: EntropyScan,
    /// Bytes after EOI.
    pub trailer: Vec<u8>,
}

fn be16(b: &[u8], at: usize) -> Result<u16> {
    match b.get(at..at + 2) {
        Some(s) => Ok(u16::from_be_bytes([s[0], s[1]])),
        None => Err(Error::Truncated),
    }
}

fn parse_frame(payload: &[u8]) -> Result<FrameHeader> {
    if payload.len() < 6 {
        return Err(Error::Malformed("short SOF0 segment"));
    }
    let components = payload[5];
    if components != 1 {
        return Err(Error::MultiComponent(components));
    }
    if payload.len() != 9 {
        return Err(Error::Malformed("SOF0 length does not match component count"));
    }
    let frame = FrameHeader {
        precision: payload[0],
        height: be16(payload, 1)?,
        width: be16(payload, 3)?,
        component_id: payload[6],
        sampling: payload[7],
        quant_table: payload[8],
    };
    if frame.precision != 8 {
        return Err(Error::Malformed("baseline frames must use 8-bit precision"));
    }
    if frame.height == 0 || frame.width == 0 {
        return Err(Error::Malformed("zero image dimension (DNL is not supported)"));
    }
    Ok(frame)
}

/// Parses every table in one DHT segment body.
pub fn parse_dht(payload: &[u8]) -> Result<Vec<HuffmanTableSpec>> {
    let mut tables = Vec::new();
    let mut at = 0;
    while at < payload.len() {
        let head = payload[at];
        let class = match head >> 4 {
            0 => HuffmanClass::Dc,
            1 => HuffmanClass::Ac,
            _ => return Err(Error::Malformed("DHT table class")),
        };
        let id = head & 0x0f;
        if id > 3 {
            return Err(Error::Malformed("DHT table id"));
        }
        let counts = payload.get(at + 1..at + 17).ok_or(Error::Malformed("short DHT segment"))?;
        let mut bit_counts = [0u8; 16];
        bit_counts.copy_from_slice(counts);
        let n: usize = bit_counts.iter().map(|&c| c as usize).sum();
        let symbols =
            payload.get(at + 17..at + 17 + n).ok_or(Error::Malformed("short DHT segment"))?;
        tables.push(HuffmanTableSpec::new(class, id, bit_counts, symbols));
        at += 17 + n;
    }
    Ok(tables)
}

fn check_sos(payload: &[u8]) -> Result<()> {
    if payload.first() != Some(&1) {
        return Err(Error::Malformed("SOS must select exactly one component"));
    }
    if payload.len() != 6 {
        return Err(Error::Malformed("SOS length"));
    }
    if payload[3] != 0 || payload[4] != 63 || payload[5] != 0 {
        return Err(Error::Malformed("SOS spectral selection must be 0..63 with Ah=Al=0"));
    }
    Ok(())
}

/// Parses a baseline, single-component JPEG without restart markers.
pub fn parse_jpeg(bytes: &[u8]) -> Result<JpegFile> {
    if bytes.len() < 2 || be16(bytes, 0)? != marker::SOI {
        return Err(Error::Malformed("missing SOI"));
    }
    let mut segments = alloc::vec![Segment::new(marker::SOI, Vec::new())];
    let mut at = 2;
    let mut frame: Option<FrameHeader> = None;

    loop {
        if at >= bytes.len() {
            return Err(Error::Truncated);
        }
        if bytes[at] != 0xFF {
            return Err(Error::Malformed("expected a marker"));
        }
        let m = be16(bytes, at)?;
        if m == 0xFFFF {
            return Err(Error::Malformed("fill bytes before marker are not supported"));
        }
        if m == marker::EOI {
            return Err(Error::Malformed("EOI before any scan"));
        }
        if marker::is_standalone(m) || m == 0xFF00 {
            return Err(Error::Malformed("unexpected standalone marker in header"));
        }
        let len = be16(bytes, at + 2)? as usize;
        if len < 2 {
            return Err(Error::Malformed("segment length below 2"));
        }
        let payload = bytes.get(at + 4..at + 2 + len).ok_or(Error::Truncated)?;
        at += 2 + len;

        if marker::is_sof(m) {
            if m != marker::SOF0 {
                return Err(Error::NotBaseline(m as u8));
            }
            if frame.is_some() {
                return Err(Error::Malformed("more than one frame header"));
            }
            frame = Some(parse_frame(payload)?);
        } else if m == marker::DRI {
            if be16(payload, 0)? != 0 {
                return Err(Error::HasRestartInterval);
            }
        } else if m == marker::DHT {
            parse_dht(payload)?;
        } else if m == marker::DAC {
            return Err(Error::NotBaseline(m as u8));
        }
        segments.push(Segment::new(m, payload.to_vec()));
        if m == marker::SOS {
            if frame.is_none() {
                return Err(Error::Malformed("SOS before SOF0"));
            }
            check_sos(payload)?;
            break;
        }
    }

    // entropy-coded data runs to the first marker that is not a stuffed 0xFF
    let scan_start = at;
    loop {
        let b = *bytes.get(at).ok_or(Error::Truncated)?;
        if b == 0xFF {
            let next = *bytes.get(at + 1).ok_or(Error::Truncated)?;
            if next == 0x00 {
                at += 2;
                continue;
            }
            if marker::is_rst(0xFF00 | next as u16) {
                return Err(Error::HasRestartInterval);
            }
            break;
        }
        at += 1;
    }
    let scan = EntropyScan::new(bytes[scan_start..at].to_vec());
    if be16(bytes, at)? != marker::EOI {
        return Err(Error::Malformed("scan must be followed by EOI (single-scan files only)"));
    }
    at += 2;
    Ok(JpegFile { segments, scan, trailer: bytes[at..].to_vec() })
}

/// Writes the file back out; exact inverse of [`parse_jpeg`].
pub fn serialize_jpeg(file: &JpegFile) -> Result<Vec<u8>> {
    if file.segments.first().map(|s| s.marker) != Some(marker::SOI) {
        return Err(Error::Malformed("first segment must be SOI"));
    }
    if file.segments.last().map(|s| s.marker) != Some(marker::SOS) {
        return Err(Error::Malformed("last segment must be SOS"));
    }
    let size = file.segments.iter().map(|s| s.payload.len() + 4).sum::<usize>()
        + file.scan.len()
        + 2
        + file.trailer.len();
    let mut out = Vec::with_capacity(size);
    for seg in &file.segments {
        out.extend_from_slice(&seg.marker.to_be_bytes());
        if marker::is_standalone(seg.marker) {
            continue;
        }
        if seg.payload.len() > MAX_SEGMENT_PAYLOAD {
            return Err(Error::SegmentTooLong(seg.payload.len()));
        }
        out.extend_from_slice(&((seg.payload.len() + 2) as u16).to_be_bytes());
        out.extend_from_slice(&seg.payload);
    }
    out.extend_from_slice(&file.scan.stuffed_bytes);
    out.extend_from_slice(&marker::EOI.to_be_bytes());
    out.extend_from_slice(&file.trailer);
    Ok(out)
}

/// Removes byte stuffing. The result always holds a whole number of bytes.
pub fn unstuff(scan: &EntropyScan) -> Result<BitBuf> {
    let src = &scan.stuffed_bytes;
    let mut out = Vec::with_capacity(src.len());
    let mut i = 0;
    while i < src.len() {
        let b = src[i];
        out.push(b);
        if b == 0xFF {
            match src.get(i + 1) {
                Some(0x00) => i += 1,
                Some(&m) => return Err(Error::MarkerInScan { offset: i, marker: m }),
                None => return Err(Error::Truncated),
            }
        }
        i += 1;
    }
    Ok(BitBuf::from_bytes(out))
}

/// Pads `bits` to a byte boundary with 1-bits and stuffs a 0x00 after every 0xFF.
pub fn stuff(bits: &BitBuf) -> EntropyScan {
    let mut padded = bits.clone();
    while padded.len() % 8 != 0 {
        padded.push_bit(true);
    }
    let raw = padded.as_bytes();
    let mut out = Vec::with_capacity(raw.len() + raw.len() / 64);
    for &b in raw {
        out.push(b);
        if b == 0xFF {
            out.push(0x00);
        }
    }
    EntropyScan::new(out)
}

/// Inserts a COM segment directly after SOI.
pub fn insert_comment(file: &JpegFile, payload: &[u8]) -> Result<JpegFile> {
    if payload.len() > MAX_SEGMENT_PAYLOAD {
        return Err(Error::SegmentTooLong(payload.len()));
    }
    if file.segments.get(1).map(|s| s.marker) == Some(marker::COM) {
        return Err(Error::CommentCollision);
    }
    let mut out = file.clone();
    out.segments.insert(1, Segment::new(marker::COM, payload.to_vec()));
    Ok(out)
}

/// Payload of the first COM segment in segment order.
pub fn locate_comment(file: &JpegFile) -> Result<&[u8]> {
    file.segments
        .iter()
        .find(|s| s.marker == marker::COM)
        .map(|s| s.payload.as_slice())
        .ok_or(Error::NoComment)
}

impl JpegFile {
    pub fn frame(&self) -> Result<FrameHeader> {
        let seg = self
            .segments
            .iter()
            .find(|s| s.marker == marker::SOF0)
            .ok_or(Error::Malformed("no SOF0 segment"))?;
        parse_frame(&seg.payload)
    }

    /// The DC and AC table specs selected by the scan header, taking the
    /// last definition of each table before SOS.
    pub fn scan_table_specs(&self) -> Result<(HuffmanTableSpec, HuffmanTableSpec)> {
        let sos = self
            .segments
            .last()
            .filter(|s| s.marker == marker::SOS)
            .ok_or(Error::Malformed("no SOS segment"))?;
        check_sos(&sos.payload)?;
        let dc_id = sos.payload[2] >> 4;
        let ac_id = sos.payload[2] & 0x0f;
        let mut dc = None;
        let mut ac = None;
        for seg in self.segments.iter().filter(|s| s.marker == marker::DHT) {
            for t in parse_dht(&seg.payload)? {
                match t.class {
                    HuffmanClass::Dc if t.id == dc_id => dc = Some(t),
                    HuffmanClass::Ac if t.id == ac_id => ac = Some(t),
                    _ => {}
                }
            }
        }
        let dc = dc.ok_or(Error::MissingHuffmanTable { class: HuffmanClass::Dc, id: dc_id })?;
        let ac = ac.ok_or(Error::MissingHuffmanTable { class: HuffmanClass::Ac, id: ac_id })?;
        Ok((dc, ac))
    }

    /// Removes and returns the first COM segment's payload.
    pub fn take_comment(&mut self) -> Result<Vec<u8>> {
        let idx =
            self.segments.iter().position(|s| s.marker == marker::COM).ok_or(Error::NoComment)?;
        Ok(self.segments.remove(idx).payload)
    }
}

/// Minimal single-component baseline file around an already stuffed scan.
/// Used to wrap synthetic scans; carries no quantization table.
pub fn synthetic_file(
    width: u16,
    height: u16,
    dc: &HuffmanTableSpec,
    ac: &HuffmanTableSpec,
    scan: EntropyScan,
) -> JpegFile {
    let [hh, hl] = height.to_be_bytes();
    let [wh, wl] = width.to_be_bytes();
    let mut dht = dc.to_dht_payload();
    dht.extend(ac.to_dht_payload());
    JpegFile {
        segments: alloc::vec![
            Segment::new(marker::SOI, Vec::new()),
            Segment::new(marker::SOF0, alloc::vec![8, hh, hl, wh, wl, 1, 1, 0x11, 0]),
            Segment::new(marker::DHT, dht),
            Segment::new(marker::SOS, alloc::vec![1, 1, (dc.id << 4) | ac.id, 0, 63, 0]),
        ],
        scan,
        trailer: Vec::new(),
    }
}
