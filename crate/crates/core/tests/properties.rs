use proptest::prelude::*;

use rxyjpeg_core::bits::BitBuf;
use rxyjpeg_core::entropy::{decode_block, decode_scan, encode_block};
use rxyjpeg_core::transcode::{
    image_tpoint, transcode_backward, transcode_forward, BackwardParams, TerminatePoint,
};
use rxyjpeg_core::{build_payload, parse_payload, stuff, unstuff, CoefficientBlock, ScanTables};

/// Blocks that look like real quantized data: a few large low-frequency
/// values, then sparse small values with long zero runs.
fn sparse_block() -> impl Strategy<Value = CoefficientBlock> {
    (
        -1023i32..=1023,
        prop::collection::vec((1usize..64, -1023i32..=1023), 0..6),
        prop::collection::vec((1usize..64, prop::sample::select(vec![-2, -1, 1, 2])), 0..10),
    )
        .prop_map(|(dc, low, high)| {
            let mut b = CoefficientBlock::default();
            b.set(1, dc);
            for (p, v) in low {
                // bias large values toward low frequencies
                b.set(1 + (p % 16).max(1), v);
            }
            for (p, v) in high {
                b.set(1 + p, v);
            }
            b
        })
}

fn encode_scan(blocks: &[CoefficientBlock], tables: &ScanTables) -> BitBuf {
    let mut bits = BitBuf::new();
    let mut pred = 0;
    for b in blocks {
        let mut b = *b;
        b.dc_diff = b.at(1) - pred;
        pred = b.at(1);
        encode_block(&b, 1, tables, &mut bits).unwrap();
    }
    unstuff(&stuff(&bits)).unwrap()
}

/// Zigzag built from anti-diagonals, independent of the crate's table.
fn zigzag_oracle() -> [usize; 64] {
    let mut order = [0usize; 64];
    let mut k = 0;
    for s in 0..15usize {
        let cells: Vec<(usize, usize)> =
            (0..8).flat_map(|r| (0..8).map(move |c| (r, c))).filter(|&(r, c)| r + c == s).collect();
        let walk: Vec<_> = if s % 2 == 0 { cells.into_iter().rev().collect() } else { cells };
        for (r, c) in walk {
            order[k] = r * 8 + c;
            k += 1;
        }
    }
    order
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn block_coding_is_invertible(block in sparse_block()) {
        let tables = ScanTables::standard();
        let mut b = block;
        b.dc_diff = b.at(1);
        let mut bits = BitBuf::new();
        encode_block(&b, 1, &tables, &mut bits).unwrap();
        let (decoded, span) = decode_block(&mut bits.reader(), &tables).unwrap();
        prop_assert_eq!(decoded, b);
        prop_assert_eq!(span.end_bit, bits.len());
    }

    #[test]
    fn transcode_round_trips(
        blocks in prop::collection::vec(sparse_block(), 1..24),
        t in 1u8..=64,
    ) {
        let tables = ScanTables::standard();
        let bits = encode_scan(&blocks, &tables);
        let original = stuff(&bits);
        let decoded = decode_scan(bits, &tables, blocks.len()).unwrap();
        let t = TerminatePoint::new(t).unwrap();
        let r = transcode_forward(&decoded, t, &tables).unwrap();
        prop_assert_eq!(r.saved_bytes, original.len() as i64 - r.new_scan.len() as i64);
        let specials: Vec<u16> = r.special_indexes.iter().map(|&i| i as u16).collect();
        let params = BackwardParams {
            t,
            special_indexes: &specials,
            block_count: blocks.len(),
            expected_len: Some(original.len()),
        };
        prop_assert_eq!(transcode_backward(&r.new_scan, &params, &tables).unwrap(), original);
    }

    #[test]
    fn image_tpoint_matches_brute_force(
        images in prop::collection::vec(prop::collection::vec(-6i32..=6, 64), 1..8),
    ) {
        // images are given in natural (row-major) order
        let zz = zigzag_oracle();
        let blocks: Vec<CoefficientBlock> = images
            .iter()
            .map(|nat| {
                let mut b = CoefficientBlock::default();
                for (k, &idx) in zz.iter().enumerate() {
                    b.coeffs[k] = nat[idx];
                }
                b
            })
            .collect();
        let mut expect = 1;
        for nat in &images {
            for (k, &idx) in zz.iter().enumerate() {
                if nat[idx].abs() > 2 {
                    expect = expect.max(k + 1);
                }
            }
        }
        prop_assert_eq!(image_tpoint(&blocks).get() as usize, expect);
    }

    #[test]
    fn payload_round_trips(
        secret in prop::collection::vec(any::<u8>(), 0..300),
        t in 1u8..=64,
        mut idx in prop::collection::vec(0usize..4096, 0..20),
        slack in 0usize..50,
    ) {
        idx.sort_unstable();
        idx.dedup();
        let target = 9 + 2 * idx.len() + secret.len() + slack;
        let p = build_payload(&secret, t, &idx, target).unwrap();
        prop_assert_eq!(p.len(), target - 2);
        let parsed = parse_payload(&p).unwrap();
        prop_assert_eq!(parsed.t, t);
        prop_assert_eq!(parsed.secret, secret);
        prop_assert_eq!(parsed.padding_len, slack);
        let got: Vec<usize> = parsed.special_indexes.iter().map(|&i| i as usize).collect();
        prop_assert_eq!(got, idx);
    }
}
