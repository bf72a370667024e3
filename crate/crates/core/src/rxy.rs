//! The Rxy code for small high-frequency coefficients.
//!
//! A symbol is a zero run `M` followed by a value in `{-2, -1, 1, 2}`. The
//! run is written as `M / 6` continuation groups `111`, then one 3-bit group
//! holding `M % 6 + 1`, then two value bits:
//!
//! | xy | value |
//! |----|-------|
//! | 00 | -2    |
//! | 01 | -1    |
//! | 10 | 1     |
//! | 11 | 2     |
//!
//! A leading group `000` ends the block. Every symbol costs `3 * (M / 6) + 5`
//! bits; end-of-block costs 3.

use crate::bits::{BitBuf, BitReader};
use crate::error::{Error, Result};

/// Longest zero run inside one block's AC range.
pub const MAX_RUN: u8 = 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RxySymbol {
    EndOfBlock,
    Coeff { run: u8, value: i8 },
}

fn value_bits(value: i8) -> Result<u32> {
    match value {
        -2 => Ok(0b00),
        -1 => Ok(0b01),
        1 => Ok(0b10),
        2 => Ok(0b11),
        v => Err(Error::ValueOutOfRange(v as i32)),
    }
}

const VALUES: [i8; 4] = [-2, -1, 1, 2];

/// Bit length of a coefficient symbol with zero run `run`.
pub fn rxy_length(run: usize) -> usize {
    3 * (run / 6) + 5
}

pub fn rxy_encode(symbol: RxySymbol, out: &mut BitBuf) -> Result<()> {
    match symbol {
        RxySymbol::EndOfBlock => out.push_bits(0b000, 3),
        RxySymbol::Coeff { run, value } => {
            let xy = value_bits(value)?;
            if run > MAX_RUN {
                return Err(Error::RunOutOfRange(run));
            }
            for _ in 0..run / 6 {
                out.push_bits(0b111, 3);
            }
            out.push_bits((run % 6 + 1) as u32, 3);
            out.push_bits(xy, 2);
        }
    }
    Ok(())
}

pub fn rxy_decode(reader: &mut BitReader<'_>) -> Result<RxySymbol> {
    let mut run = 0u32;
    loop {
        let group = match reader.read_bits(3) {
            Some(g) => g,
            None if run > 0 => return Err(Error::DanglingContinuation),
            None => return Err(Error::Overrun),
        };
        match group {
            0b111 => run += 6,
            0b000 if run == 0 => return Ok(RxySymbol::EndOfBlock),
            0b000 => return Err(Error::ZeroGroupAfterContinuation),
            g => {
                run += g - 1;
                let xy = reader.read_bits(2).ok_or(Error::Overrun)?;
                if run > MAX_RUN as u32 {
                    return Err(Error::RunOutOfRange(run.min(255) as u8));
                }
                return Ok(RxySymbol::Coeff { run: run as u8, value: VALUES[xy as usize] });
            }
        }
        if run > MAX_RUN as u32 {
            return Err(Error::RunOutOfRange(run.min(255) as u8));
        }
    }
}
