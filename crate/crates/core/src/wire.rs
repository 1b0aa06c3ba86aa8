//! Little-endian readers and writers shared by the binary formats.

use crate::poly::RingElement;
use crate::{Error, Result};

pub(crate) fn check_residue_width(modulus: i64) -> Result<()> {
    if modulus > i64::from(u16::MAX) + 1 {
        return Err(Error::format(format!("modulus {modulus} does not fit 16-bit residues")));
    }
    Ok(())
}

pub(crate) fn put_residues(out: &mut Vec<u8>, e: &RingElement, modulus: i64) -> Result<()> {
    check_residue_width(modulus)?;
    for r in e.residues(modulus) {
        out.extend_from_slice(&r.to_le_bytes());
    }
    Ok(())
}

pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub(crate) fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&end| end <= self.buf.len())
            .ok_or_else(|| Error::format(format!("truncated input at byte {}", self.pos)))?;
        let slice = &self.buf[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    pub(crate) fn array<const K: usize>(&mut self) -> Result<[u8; K]> {
        Ok(self.take(K)?.try_into().expect("length checked"))
    }

    pub(crate) fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.array()?))
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    pub(crate) fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    pub(crate) fn residues(&mut self, n: usize, modulus: i64) -> Result<RingElement> {
        check_residue_width(modulus)?;
        let raw = self.take(n.checked_mul(2).ok_or_else(|| Error::format("length overflow"))?)?;
        let residues: Vec<u16> = raw
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]))
            .collect();
        RingElement::from_residues(&residues, modulus)
    }

    pub(crate) fn finish(self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::format(format!(
                "{} trailing bytes",
                self.buf.len() - self.pos
            )));
        }
        Ok(())
    }
}
