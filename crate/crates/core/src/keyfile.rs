//! Key and ciphertext container files.
//!
//! Key file (integers little-endian):
//!
//! ```text
//! "NTRK" ‖ version: u8 ‖ params_id: u8 ‖ key_kind: u8 ‖ payload ‖ crc32: u32
//!
//! key_kind 0, private:   N × u16 f residues mod q ‖ N × u16 F_p residues mod p
//! key_kind 1, public:    N × u16 h residues mod q
//! key_kind 2, expanded:  depth: u8 ‖ N × u16 residues mod q
//! key_kind 3, expander:  role: u8 ‖ N × u16 residues mod q
//! ```
//!
//! Ciphertext file:
//!
//! ```text
//! "NTRX" ‖ version: u8 ‖ params_id: u8 ‖ block_count: u32
//!        ‖ block_count × N × u16 residues mod q ‖ crc32: u32
//! ```
//!
//! The trailing CRC-32 covers every preceding byte and is checked before
//! anything else is parsed.

use crate::encoding::crc32;
use crate::expansion::{ExpandedPublicKey, ExpanderRole, ExpanderSecret};
use crate::ntru::{CiphertextBlock, PrivateKey, PublicKey};
use crate::params::{NtruParams, Preset};
use crate::poly::RingElement;
use crate::wire::{self, Reader};
use crate::{Error, Result};

pub const KEY_MAGIC: &[u8; 4] = b"NTRK";
pub const CIPHERTEXT_MAGIC: &[u8; 4] = b"NTRX";
pub const FORMAT_VERSION: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum KeyKind {
    Private = 0,
    Public = 1,
    Expanded = 2,
    Expander = 3,
}

impl KeyKind {
    fn from_u8(v: u8) -> Result<Self> {
        Ok(match v {
            0 => KeyKind::Private,
            1 => KeyKind::Public,
            2 => KeyKind::Expanded,
            3 => KeyKind::Expander,
            other => return Err(Error::format(format!("unknown key kind {other}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KeyFile {
    Private(PrivateKey),
    Public(PublicKey),
    Expanded {
        key: ExpandedPublicKey,
        params: NtruParams,
    },
    Expander {
        secret: ExpanderSecret,
        params: NtruParams,
    },
}

impl KeyFile {
    pub fn kind(&self) -> KeyKind {
        match self {
            KeyFile::Private(_) => KeyKind::Private,
            KeyFile::Public(_) => KeyKind::Public,
            KeyFile::Expanded { .. } => KeyKind::Expanded,
            KeyFile::Expander { .. } => KeyKind::Expander,
        }
    }

    pub fn params(&self) -> &NtruParams {
        match self {
            KeyFile::Private(sk) => sk.params(),
            KeyFile::Public(pk) => pk.params(),
            KeyFile::Expanded { params, .. } | KeyFile::Expander { params, .. } => params,
        }
    }

    /// The public encryption key this file carries, with its expansion depth.
    pub fn encryption_key(&self) -> Option<ExpandedPublicKey> {
        match self {
            KeyFile::Public(pk) => Some(ExpandedPublicKey::original(pk)),
            KeyFile::Expanded { key, .. } => Some(key.clone()),
            _ => None,
        }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let params = *self.params();
        preset_of(&params)?;
        let mut out = Vec::new();
        out.extend_from_slice(KEY_MAGIC);
        out.push(FORMAT_VERSION);
        out.push(params.id);
        out.push(self.kind() as u8);
        match self {
            KeyFile::Private(sk) => {
                wire::put_residues(&mut out, sk.f(), params.q)?;
                wire::put_residues(&mut out, sk.f_p(), params.p)?;
            }
            KeyFile::Public(pk) => wire::put_residues(&mut out, pk.h(), params.q)?,
            KeyFile::Expanded { key, .. } => {
                out.push(key.depth());
                wire::put_residues(&mut out, key.key(), params.q)?;
            }
            KeyFile::Expander { secret, .. } => {
                out.push(role_to_u8(secret.role()));
                wire::put_residues(&mut out, secret.element(), params.q)?;
            }
        }
        let crc = crc32(&out);
        out.extend_from_slice(&crc.to_le_bytes());
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let body = check_crc(bytes)?;
        let mut r = Reader::new(body);
        if r.take(4)? != KEY_MAGIC {
            return Err(Error::format("bad key file magic"));
        }
        check_version(r.u8()?)?;
        let params = params_for_id(r.u8()?)?;
        let kind = KeyKind::from_u8(r.u8()?)?;
        let n = params.n;
        let file = match kind {
            KeyKind::Private => {
                let f = r.residues(n, params.q)?;
                let f_p = r.residues(n, params.p)?;
                KeyFile::Private(PrivateKey::from_parts(f, f_p, params)?)
            }
            KeyKind::Public => KeyFile::Public(PublicKey::new(r.residues(n, params.q)?, params)?),
            KeyKind::Expanded => {
                let depth = r.u8()?;
                if depth == 0 {
                    return Err(Error::format("expanded key with depth 0"));
                }
                let key = ExpandedPublicKey::new(r.residues(n, params.q)?, depth, &params)?;
                KeyFile::Expanded { key, params }
            }
            KeyKind::Expander => {
                let role = role_from_u8(r.u8()?)?;
                let e = crate::poly::center_lift(&r.residues(n, params.q)?, params.q);
                KeyFile::Expander {
                    secret: ExpanderSecret::new(e, role)?,
                    params,
                }
            }
        };
        r.finish()?;
        Ok(file)
    }
}

fn role_to_u8(role: ExpanderRole) -> u8 {
    match role {
        ExpanderRole::Direct => 0,
        ExpanderRole::RaCocoon => 1,
        ExpanderRole::CaButterfly => 2,
    }
}

fn role_from_u8(v: u8) -> Result<ExpanderRole> {
    Ok(match v {
        0 => ExpanderRole::Direct,
        1 => ExpanderRole::RaCocoon,
        2 => ExpanderRole::CaButterfly,
        other => return Err(Error::format(format!("unknown expander role {other}"))),
    })
}

fn preset_of(params: &NtruParams) -> Result<Preset> {
    match params.preset() {
        Some(p) if p.params() == *params => Ok(p),
        _ => Err(Error::format("only preset parameter sets can be written to files")),
    }
}

pub fn params_for_id(id: u8) -> Result<NtruParams> {
    Preset::from_id(id)
        .map(Preset::params)
        .ok_or_else(|| Error::format(format!("unknown params_id {id}")))
}

fn check_version(v: u8) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::format(format!("unsupported format version {v}")));
    }
    Ok(())
}

fn check_crc(bytes: &[u8]) -> Result<&[u8]> {
    if bytes.len() < 4 {
        return Err(Error::format("file too short"));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().expect("4 bytes"));
    if crc32(body) != stored {
        return Err(Error::format("CRC mismatch"));
    }
    Ok(body)
}

/// Serialized ciphertext blocks for one payload.
pub fn ciphertext_to_bytes(blocks: &[CiphertextBlock], params: &NtruParams) -> Result<Vec<u8>> {
    preset_of(params)?;
    let count = u32::try_from(blocks.len()).map_err(|_| Error::Oversize(blocks.len()))?;
    let mut out = Vec::with_capacity(14 + blocks.len() * params.n * 2);
    out.extend_from_slice(CIPHERTEXT_MAGIC);
    out.push(FORMAT_VERSION);
    out.push(params.id);
    out.extend_from_slice(&count.to_le_bytes());
    for block in blocks {
        if block.element().len() != params.n {
            return Err(Error::LengthMismatch {
                expected: params.n,
                found: block.element().len(),
            });
        }
        wire::put_residues(&mut out, block.element(), params.q)?;
    }
    let crc = crc32(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

pub fn ciphertext_from_bytes(bytes: &[u8]) -> Result<(NtruParams, Vec<CiphertextBlock>)> {
    let body = check_crc(bytes)?;
    let mut r = Reader::new(body);
    if r.take(4)? != CIPHERTEXT_MAGIC {
        return Err(Error::format("bad ciphertext magic"));
    }
    check_version(r.u8()?)?;
    let params = params_for_id(r.u8()?)?;
    let count = r.u32()? as usize;
    let expected = count
        .checked_mul(params.n * 2)
        .ok_or_else(|| Error::format("block count overflow"))?;
    if body.len() - 10 != expected {
        return Err(Error::format("block count does not match file size"));
    }
    let blocks = (0..count)
        .map(|_| CiphertextBlock::new(r.residues(params.n, params.q)?, &params))
        .collect::<Result<Vec<_>>>()?;
    r.finish()?;
    Ok((params, blocks))
}

/// CRC-32 over the little-endian residues of `e` mod `modulus`.
pub fn fingerprint(e: &RingElement, modulus: i64) -> u32 {
    let bytes: Vec<u8> = e
        .residues(modulus)
        .into_iter()
        .flat_map(u16::to_le_bytes)
        .collect();
    crc32(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::{expand_public_key, sample_expander};
    use crate::ntru::keygen;
    use crate::rng;

    #[test]
    fn key_files_roundtrip() {
        let params = Preset::Toy17.params();
        let mut rng = rng::seeded(1);
        let kp = keygen(&params, &mut rng).unwrap();
        let r = sample_expander(&params, ExpanderRole::Direct, &mut rng).unwrap();
        let w = expand_public_key(&kp.public, &r).unwrap();
        for file in [
            KeyFile::Private(kp.private.clone()),
            KeyFile::Public(kp.public.clone()),
            KeyFile::Expanded { key: w, params },
            KeyFile::Expander { secret: r, params },
        ] {
            let bytes = file.to_bytes().unwrap();
            assert_eq!(&bytes[..4], b"NTRK");
            assert_eq!(bytes[5], 17);
            assert_eq!(bytes[6], file.kind() as u8);
            assert_eq!(KeyFile::from_bytes(&bytes).unwrap(), file);
        }
    }

    #[test]
    fn layout_sizes() {
        let params = Preset::Ntru509.params();
        let kp = keygen(&params, &mut rng::seeded(2)).unwrap();
        let private = KeyFile::Private(kp.private).to_bytes().unwrap();
        assert_eq!(private.len(), 7 + 4 * 509 + 4);
        let public = KeyFile::Public(kp.public).to_bytes().unwrap();
        assert_eq!(public.len(), 7 + 2 * 509 + 4);
    }

    #[test]
    fn corruption_is_rejected_before_parsing() {
        let params = Preset::Toy17.params();
        let kp = keygen(&params, &mut rng::seeded(3)).unwrap();
        let bytes = KeyFile::Public(kp.public).to_bytes().unwrap();
        for i in 0..bytes.len() {
            let mut bad = bytes.clone();
            bad[i] ^= 0x10;
            assert!(KeyFile::from_bytes(&bad).is_err(), "flip at byte {i} accepted");
        }
        assert!(KeyFile::from_bytes(&bytes[..3]).is_err());
    }

    #[test]
    fn custom_params_cannot_be_written() {
        let params = NtruParams::new(7, 3, 41, 2, 2, 1).unwrap();
        let kp = keygen(&params, &mut rng::seeded(4)).unwrap();
        assert!(KeyFile::Public(kp.public).to_bytes().is_err());
    }

    #[test]
    fn ciphertext_container_roundtrip() {
        let params = Preset::Toy17.params();
        let mut rng = rng::seeded(5);
        let kp = keygen(&params, &mut rng).unwrap();
        let blocks = crate::cert::encrypt_bytes(b"abc", &kp.public, &params, &mut rng).unwrap();
        let bytes = ciphertext_to_bytes(&blocks, &params).unwrap();
        let (p, back) = ciphertext_from_bytes(&bytes).unwrap();
        assert_eq!(p, params);
        assert_eq!(back, blocks);
        let mut bad = bytes.clone();
        bad[12] ^= 1;
        assert!(ciphertext_from_bytes(&bad).is_err());
    }
}
