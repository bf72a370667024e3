use core::fmt;

use crate::container::HuffmanClass;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong between cover bytes and marked bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub enum Error {
    // container
    Malformed(&'static str),
    Truncated,
    /// A frame header other than SOF0 (carries the marker byte).
    NotBaseline(u8),
    HasRestartInterval,
    MultiComponent(u8),
    SegmentTooLong(usize),
    MarkerInScan {
        offset: usize,
        marker: u8,
    },
    CommentCollision,
    NoComment,
    MissingHuffmanTable {
        class: HuffmanClass,
        id: u8,
    },

    // entropy coding
    InvalidTable(&'static str),
    UncodableSymbol(u8),
    ZeroValue,
    BadCode {
        bit: usize,
    },
    Overrun,
    SizeOverflow(i32),
    PositionOverflow {
        bit: usize,
    },

    // Rxy code
    ValueOutOfRange(i32),
    RunOutOfRange(u8),
    DanglingContinuation,
    ZeroGroupAfterContinuation,

    // transcoding
    TooManyBlocks(usize),
    RxyCorrupt {
        block: usize,
    },
    LengthMismatch {
        expected: usize,
        actual: usize,
    },
    InvalidSpecialIndexes,
    TrailingScanData {
        bits: usize,
    },

    // payload
    CapacityExceeded {
        secret: usize,
        capacity: usize,
    },
    IndexOverflow(usize),
    TruncatedPayload,
    BadTerminatePoint(u8),
    NonZeroPadding,

    // pipeline
    SecretTooLarge {
        secret: usize,
        capacity: usize,
    },
    NoSpareSpace {
        saved: i64,
        overhead: usize,
    },
    SavingsExceedSegment(i64),
    VerifyFailed,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Malformed(what) => write!(f, "malformed JPEG: {what}"),
            Error::Truncated => f.write_str("JPEG data ends unexpectedly"),
            Error::NotBaseline(m) => {
                write!(f, "frame marker 0xFF{m:02X} is not baseline sequential (SOF0)")
            }
            Error::HasRestartInterval => f.write_str("restart intervals are not supported"),
            Error::MultiComponent(n) => {
                write!(f, "only single-component images are supported, frame has {n}")
            }
            Error::SegmentTooLong(n) => {
                write!(f, "segment payload of {n} bytes exceeds the 65533 byte limit")
            }
            Error::MarkerInScan { offset, marker } => {
                write!(f, "marker 0xFF{marker:02X} inside entropy-coded data at byte {offset}")
            }
            Error::CommentCollision => {
                f.write_str("a COM segment already follows SOI (file is already marked?)")
            }
            Error::NoComment => f.write_str("no COM segment present"),
            Error::MissingHuffmanTable { class, id } => {
                write!(f, "scan references undefined {class:?} Huffman table {id}")
            }
            Error::InvalidTable(what) => write!(f, "invalid Huffman table: {what}"),
            Error::UncodableSymbol(s) => write!(f, "symbol 0x{s:02X} has no code in the table"),
            Error::ZeroValue => f.write_str("zero has no VLI representation"),
            Error::BadCode { bit } => write!(f, "invalid Huffman code at bit {bit}"),
            Error::Overrun => f.write_str("scan data ends in the middle of a block"),
            Error::SizeOverflow(v) => write!(f, "coefficient {v} needs more than 15 bits"),
            Error::PositionOverflow { bit } => {
                write!(f, "run length walks past coefficient 64 at bit {bit}")
            }
            Error::ValueOutOfRange(v) => write!(f, "Rxy value {v} is not in {{-2,-1,1,2}}"),
            Error::RunOutOfRange(r) => write!(f, "Rxy zero run {r} exceeds 62"),
            Error::DanglingContinuation => f.write_str("Rxy stream ends after a 111 group"),
            Error::ZeroGroupAfterContinuation => f.write_str("Rxy group 000 after a 111 group"),
            Error::TooManyBlocks(n) => {
                write!(f, "{n} blocks cannot be indexed with 16 bits")
            }
            Error::RxyCorrupt { block } => write!(f, "corrupt Rxy data in block {block}"),
            Error::LengthMismatch { expected, actual } => {
                write!(f, "recovered scan is {actual} bytes, expected {expected}")
            }
            Error::InvalidSpecialIndexes => {
                f.write_str("special block list is unsorted or out of range")
            }
            Error::TrailingScanData { bits } => {
                write!(f, "{bits} bits after the last block are not 1-bit padding")
            }
            Error::CapacityExceeded { secret, capacity } => {
                write!(f, "secret of {secret} bytes exceeds payload capacity of {capacity}")
            }
            Error::IndexOverflow(i) => write!(f, "block index {i} does not fit 16 bits"),
            Error::TruncatedPayload => f.write_str("hiding payload is truncated"),
            Error::BadTerminatePoint(t) => write!(f, "terminate point {t} not in 1..=64"),
            Error::NonZeroPadding => f.write_str("hiding payload padding is not zero"),
            Error::SecretTooLarge { secret, capacity } => {
                write!(f, "secret of {secret} bytes exceeds capacity of {capacity} bytes")
            }
            Error::NoSpareSpace { saved, overhead } => write!(
                f,
                "recoding saves {saved} bytes, at least {overhead} are needed for the header"
            ),
            Error::SavingsExceedSegment(saved) => {
                write!(f, "recoding saves {saved} bytes, more than one COM segment can carry")
            }
            Error::VerifyFailed => f.write_str("marked file does not recover to the cover"),
        }
    }
}

impl core::error::Error for Error {}
