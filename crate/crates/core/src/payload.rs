//! Byte layout of the hiding payload carried in the COM segment.
//!
//! ```text
//! +------------+----+-------------+------------------+----------+---------+
//! | m_p (u32)  | t  | m_N (u16)   | m_N x index (u16)| secret   | zeros   |
//! +------------+----+-------------+------------------+----------+---------+
//! ```
//!
//! All integers are big-endian. Block indexes are 0-based in scan order.
//! A segment whose length field reads `M` leaves `M - 2 * m_N - 9` bytes
//! for the secret (2 length bytes + 7 fixed bytes).

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Fixed header bytes: secret length, terminate point, special count.
pub const FIXED_FIELDS: usize = 7;

/// Bytes an inserted COM costs beyond the secret and the index list:
/// marker (2) + length field (2) + fixed fields (7).
pub const SEGMENT_OVERHEAD: usize = 4 + FIXED_FIELDS;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HidingPayload {
    pub t: u8,
    pub special_indexes: Vec<u16>,
    pub secret: Vec<u8>,
    /// Bytes following the secret (zero when produced by [`build_payload`]).
    pub padding_len: usize,
}

/// Lays out the payload and zero-pads it to `target_segment_bytes - 2` bytes.
/// `target_segment_bytes` is the COM length field value.
pub fn build_payload(
    secret: &[u8],
    t: u8,
    special_indexes: &[usize],
    target_segment_bytes: usize,
) -> Result<Vec<u8>> {
    if let Some(&bad) = special_indexes.iter().find(|&&i| i > u16::MAX as usize) {
        return Err(Error::IndexOverflow(bad));
    }
    if special_indexes.len() > u16::MAX as usize {
        return Err(Error::IndexOverflow(special_indexes.len()));
    }
    let fixed = 2 + FIXED_FIELDS + 2 * special_indexes.len();
    let room = target_segment_bytes.saturating_sub(fixed);
    if target_segment_bytes < fixed || secret.len() > room || secret.len() > u32::MAX as usize {
        return Err(Error::CapacityExceeded { secret: secret.len(), capacity: room });
    }
    let mut out = Vec::with_capacity(target_segment_bytes - 2);
    out.extend_from_slice(&(secret.len() as u32).to_be_bytes());
    out.push(t);
    out.extend_from_slice(&(special_indexes.len() as u16).to_be_bytes());
    for &i in special_indexes {
        out.extend_from_slice(&(i as u16).to_be_bytes());
    }
    out.extend_from_slice(secret);
    out.resize(target_segment_bytes - 2, 0);
    Ok(out)
}

pub fn parse_payload(bytes: &[u8]) -> Result<HidingPayload> {
    if bytes.len() < FIXED_FIELDS {
        return Err(Error::TruncatedPayload);
    }
    let secret_len = u32::from_be_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]) as usize;
    let t = bytes[4];
    if !(1..=64).contains(&t) {
        return Err(Error::BadTerminatePoint(t));
    }
    let count = u16::from_be_bytes([bytes[5], bytes[6]]) as usize;
    let index_end = FIXED_FIELDS + 2 * count;
    let index_bytes = bytes.get(FIXED_FIELDS..index_end).ok_or(Error::TruncatedPayload)?;
    let special_indexes =
        index_bytes.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect();
    let secret_end = index_end.checked_add(secret_len).ok_or(Error::TruncatedPayload)?;
    let secret = bytes.get(index_end..secret_end).ok_or(Error::TruncatedPayload)?.to_vec();
    Ok(HidingPayload { t, special_indexes, secret, padding_len: bytes.len() - secret_end })
}

/// Secret bytes that fit when recoding saved `saved_bytes` and `special_count`
/// block indexes must be recorded. Inserting the COM must cost exactly the
/// saved bytes for the file size to stay unchanged.
pub fn capacity(saved_bytes: i64, special_count: usize) -> usize {
    let overhead = (SEGMENT_OVERHEAD + 2 * special_count) as i64;
    (saved_bytes - overhead).max(0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn exact_fit() {
        let secret = [7u8; 10];
        let p = build_payload(&secret, 12, &[], 19).unwrap();
        assert_eq!(p.len(), 17);
        let parsed = parse_payload(&p).unwrap();
        assert_eq!(parsed.secret, secret);
        assert_eq!(parsed.t, 12);
        assert_eq!(parsed.padding_len, 0);
        assert_eq!(
            build_payload(&[0; 11], 12, &[], 19),
            Err(Error::CapacityExceeded { secret: 11, capacity: 10 })
        );
    }

    #[test]
    fn index_encoding() {
        let p = build_payload(&[], 5, &[3412], 11).unwrap();
        assert_eq!(p, vec![0, 0, 0, 0, 5, 0, 1, 0x0D, 0x54]);
        assert_eq!(parse_payload(&p).unwrap().special_indexes, vec![3412]);
        assert_eq!(build_payload(&[], 5, &[70000], 100), Err(Error::IndexOverflow(70000)));
    }

    #[test]
    fn minimum_payload() {
        let p = build_payload(&[], 1, &[], 9).unwrap();
        assert_eq!(p, vec![0, 0, 0, 0, 1, 0, 0]);
        assert!(matches!(build_payload(&[], 1, &[], 8), Err(Error::CapacityExceeded { .. })));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_payload(&[0, 0, 1]), Err(Error::TruncatedPayload));
        assert_eq!(parse_payload(&[0, 0, 0, 0, 200, 0, 0]), Err(Error::BadTerminatePoint(200)));
        assert_eq!(parse_payload(&[0, 0, 0, 0, 0, 0, 0]), Err(Error::BadTerminatePoint(0)));
        assert_eq!(parse_payload(&[0, 0, 0, 5, 3, 0, 0, 1, 2]), Err(Error::TruncatedPayload));
        assert_eq!(parse_payload(&[0, 0, 0, 0, 3, 0, 2, 1, 2]), Err(Error::TruncatedPayload));
        assert_eq!(
            parse_payload(&[0xff, 0xff, 0xff, 0xff, 3, 0xff, 0xff]),
            Err(Error::TruncatedPayload)
        );
    }

    #[test]
    fn capacity_accounting() {
        assert_eq!(capacity(100, 4), 81);
        assert_eq!(capacity(11, 0), 0);
        assert_eq!(capacity(12, 0), 1);
        assert_eq!(capacity(0, 0), 0);
        assert_eq!(capacity(-50, 3), 0);
    }

    #[test]
    fn capacity_matches_wire_bytes() {
        // the inserted segment (marker + length + payload) must equal the savings
        for saved in 11i64..200 {
            for specials in 0..5usize {
                let cap = capacity(saved, specials);
                if cap == 0 && saved < (11 + 2 * specials) as i64 {
                    continue;
                }
                let idx: alloc::vec::Vec<usize> = (0..specials).collect();
                let target = saved as usize - 2;
                let p = build_payload(&vec![1; cap], 9, &idx, target).unwrap();
                assert_eq!(p.len() + 4, saved as usize);
                assert!(build_payload(&vec![1; cap + 1], 9, &idx, target).is_err());
            }
        }
    }
}
