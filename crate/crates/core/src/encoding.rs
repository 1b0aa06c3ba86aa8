//! Byte strings as sequences of ternary message blocks.
//!
//! Frame layout, all integers little-endian:
//!
//! ```text
//! length: u32 ‖ data ‖ crc32(data): u32
//! ```
//!
//! Each frame byte becomes six base-3 digits, most significant first, with
//! digit values `{0, 1, 2}` stored as coefficients `{0, 1, −1}`. The trit
//! stream is cut into blocks of `N`; the last block is zero-padded.
//!
//! Decoding is strict: every digit group must be ≤ 255, the block count must
//! match the length prefix, padding must be zero and the CRC must match.
//! Any violation is an [`Error::IntegrityFailure`], which is how NTRU
//! decryption failures surface.

use crate::params::NtruParams;
use crate::poly::RingElement;
use crate::{Error, Result};

pub const TRITS_PER_BYTE: usize = 6;
/// Length prefix plus checksum.
pub const FRAME_OVERHEAD: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedMessage {
    pub blocks: Vec<RingElement>,
    pub total_byte_length: u32,
    pub checksum: u32,
}

impl EncodedMessage {
    pub fn decode(&self, params: &NtruParams) -> Result<Vec<u8>> {
        decode_bytes(&self.blocks, params)
    }
}

pub fn crc32(data: &[u8]) -> u32 {
    crc32fast::hash(data)
}

/// Number of blocks a `len`-byte payload occupies at degree `n`.
pub fn block_count(len: usize, n: usize) -> usize {
    ((len + FRAME_OVERHEAD) * TRITS_PER_BYTE).div_ceil(n)
}

fn byte_to_trits(b: u8) -> [i64; TRITS_PER_BYTE] {
    let mut out = [0i64; TRITS_PER_BYTE];
    let mut v = b;
    for slot in out.iter_mut().rev() {
        *slot = match v % 3 {
            0 => 0,
            1 => 1,
            _ => -1,
        };
        v /= 3;
    }
    out
}

fn trits_to_byte(trits: &[i64]) -> Result<u8> {
    let mut v: u32 = 0;
    for &t in trits {
        let digit = match t {
            0 => 0,
            1 => 1,
            -1 => 2,
            other => return Err(Error::integrity(format!("non-ternary coefficient {other}"))),
        };
        v = v * 3 + digit;
    }
    u8::try_from(v).map_err(|_| Error::integrity(format!("digit group {v} exceeds a byte")))
}

pub fn encode_bytes(data: &[u8], params: &NtruParams) -> Result<EncodedMessage> {
    let len = u32::try_from(data.len()).map_err(|_| Error::Oversize(data.len()))?;
    if data.len() > u32::MAX as usize - FRAME_OVERHEAD {
        return Err(Error::Oversize(data.len()));
    }
    let checksum = crc32(data);

    let n = params.n;
    let frame_len = data.len() + FRAME_OVERHEAD;
    let blocks_needed = block_count(data.len(), n);
    let mut trits = Vec::with_capacity(blocks_needed * n);
    let frame = len
        .to_le_bytes()
        .into_iter()
        .chain(data.iter().copied())
        .chain(checksum.to_le_bytes());
    for byte in frame {
        trits.extend_from_slice(&byte_to_trits(byte));
    }
    debug_assert_eq!(trits.len(), frame_len * TRITS_PER_BYTE);
    trits.resize(blocks_needed * n, 0);

    let blocks = trits
        .chunks(n)
        .map(|chunk| RingElement::reduced(chunk.to_vec(), params.p))
        .collect::<Result<Vec<_>>>()?;
    Ok(EncodedMessage {
        blocks,
        total_byte_length: len,
        checksum,
    })
}

pub fn decode_bytes(blocks: &[RingElement], params: &NtruParams) -> Result<Vec<u8>> {
    let n = params.n;
    if blocks.is_empty() {
        return Err(Error::integrity("no blocks"));
    }
    if let Some(b) = blocks.iter().find(|b| b.len() != n) {
        return Err(Error::integrity(format!("block of {} coefficients, expected {n}", b.len())));
    }
    let trits: Vec<i64> = blocks.iter().flat_map(|b| b.coeffs().iter().copied()).collect();

    let read_bytes = |from_byte: usize, count: usize| -> Result<Vec<u8>> {
        let start = from_byte * TRITS_PER_BYTE;
        let end = start + count * TRITS_PER_BYTE;
        let slice = trits
            .get(start..end)
            .ok_or_else(|| Error::integrity("frame truncated"))?;
        slice.chunks(TRITS_PER_BYTE).map(trits_to_byte).collect()
    };

    let header = read_bytes(0, 4)?;
    let len = u32::from_le_bytes(header.try_into().expect("4 bytes")) as usize;
    if block_count(len, n) != blocks.len() {
        return Err(Error::integrity(format!(
            "length prefix {len} implies {} blocks, found {}",
            block_count(len, n),
            blocks.len()
        )));
    }
    let data = read_bytes(4, len)?;
    let crc_bytes = read_bytes(4 + len, 4)?;
    let expected = u32::from_le_bytes(crc_bytes.try_into().expect("4 bytes"));
    let frame_trits = (len + FRAME_OVERHEAD) * TRITS_PER_BYTE;
    if trits[frame_trits..].iter().any(|&t| t != 0) {
        return Err(Error::integrity("nonzero padding"));
    }
    if crc32(&data) != expected {
        return Err(Error::integrity("checksum mismatch"));
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Preset;

    #[test]
    fn crc_matches_standard_check_value() {
        // CRC-32/ISO-HDLC check value.
        assert_eq!(crc32(b"123456789"), 0xCBF4_3926);
    }

    #[test]
    fn trit_mapping() {
        assert_eq!(byte_to_trits(0), [0; 6]);
        assert_eq!(byte_to_trits(1), [0, 0, 0, 0, 0, 1]);
        assert_eq!(byte_to_trits(2), [0, 0, 0, 0, 0, -1]);
        // 255 = 100110 in base 3.
        assert_eq!(byte_to_trits(255), [1, 0, 0, 1, 1, 0]);
        for b in 0..=255u8 {
            assert_eq!(trits_to_byte(&byte_to_trits(b)).unwrap(), b);
        }
        // 222222_3 = 728 does not fit a byte.
        assert!(trits_to_byte(&[-1; 6]).unwrap_err().to_string().contains("exceeds"));
    }

    #[test]
    fn empty_payload_is_one_block() {
        for preset in Preset::ALL {
            let params = preset.params();
            let enc = encode_bytes(&[], &params).unwrap();
            // 48 trits: one block at 509, 677 and 821, three at N = 17.
            let expected = if preset == Preset::Toy17 { 3 } else { 1 };
            assert_eq!(enc.blocks.len(), expected);
            assert_eq!(enc.total_byte_length, 0);
            assert_eq!(enc.decode(&params).unwrap(), Vec::<u8>::new());
        }
    }

    #[test]
    fn single_zero_byte_at_509() {
        let params = Preset::Ntru509.params();
        let enc = encode_bytes(&[0], &params).unwrap();
        // 9-byte frame → 54 trits → one block.
        assert_eq!(enc.blocks.len(), 1);
        assert_eq!(enc.blocks[0].coeffs()[54..].iter().filter(|&&t| t != 0).count(), 0);
        assert_eq!(enc.checksum, crc32(&[0]));
    }

    #[test]
    fn block_counts() {
        // 200 bytes → 208-byte frame → 1248 trits → ⌈1248 / 509⌉ = 3.
        assert_eq!(block_count(200, 509), 3);
        // 1248 / 17 = 73.4 → 74.
        assert_eq!(block_count(200, 17), 74);
        let params = Preset::Ntru509.params();
        assert_eq!(encode_bytes(&[7; 200], &params).unwrap().blocks.len(), 3);
    }

    #[test]
    fn truncated_and_extended_block_lists_fail() {
        let params = Preset::Toy17.params();
        let enc = encode_bytes(b"hello, world", &params).unwrap();
        let short = &enc.blocks[..enc.blocks.len() - 1];
        assert!(decode_bytes(short, &params).unwrap_err().is_integrity_failure());

        let mut long = enc.blocks.clone();
        long.push(RingElement::zero(17));
        assert!(decode_bytes(&long, &params).unwrap_err().is_integrity_failure());
        assert!(decode_bytes(&[], &params).unwrap_err().is_integrity_failure());
    }

    #[test]
    fn flipped_trit_is_detected() {
        let params = Preset::Toy17.params();
        let enc = encode_bytes(b"integrity", &params).unwrap();
        let mut blocks = enc.blocks.clone();
        let mut coeffs = blocks[2].coeffs().to_vec();
        coeffs[3] = if coeffs[3] == 1 { 0 } else { 1 };
        blocks[2] = RingElement::reduced(coeffs, 3).unwrap();
        assert!(decode_bytes(&blocks, &params).unwrap_err().is_integrity_failure());
    }
}
