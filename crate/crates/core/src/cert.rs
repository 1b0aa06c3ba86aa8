//! Pseudonym certificates and multi-block encryption of byte payloads.
//!
//! Certificate wire format (integers little-endian):
//!
//! ```text
//! "NTRC" ‖ version: u8 ‖ params_id: u8 ‖ pseudonym_id: [u8; 16]
//!        ‖ validity_start: u64 ‖ validity_end: u64
//!        ‖ permissions_len: u16 ‖ permissions
//!        ‖ pubkey_depth: u8 ‖ N × u16 public-key residues mod q
//! ```

use rand::RngCore;

use crate::encoding::{decode_bytes, encode_bytes};
use crate::expansion::ExpandedPublicKey;
use crate::ntru::{self, CiphertextBlock, EncryptionKey, PrivateKey};
use crate::params::NtruParams;
use crate::wire::{self, Reader};
use crate::{Error, Result};

pub const CERT_MAGIC: &[u8; 4] = b"NTRC";
pub const CERT_VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudonymCertificate {
    pub version: u8,
    pub params_id: u8,
    pub pseudonym_id: [u8; 16],
    pub validity_start: u64,
    pub validity_end: u64,
    pub permissions: Vec<u8>,
    pub public_key: ExpandedPublicKey,
}

impl PseudonymCertificate {
    pub fn new(
        params: &NtruParams,
        pseudonym_id: [u8; 16],
        public_key: ExpandedPublicKey,
        permissions: Vec<u8>,
        validity_start: u64,
        validity_end: u64,
    ) -> Result<Self> {
        let cert = PseudonymCertificate {
            version: CERT_VERSION,
            params_id: params.id,
            pseudonym_id,
            validity_start,
            validity_end,
            permissions,
            public_key,
        };
        cert.validate(params)?;
        Ok(cert)
    }

    fn validate(&self, params: &NtruParams) -> Result<()> {
        if self.validity_start >= self.validity_end {
            return Err(Error::format("validity window is empty"));
        }
        if self.public_key.key().len() != params.n {
            return Err(Error::LengthMismatch {
                expected: params.n,
                found: self.public_key.key().len(),
            });
        }
        if self.permissions.len() > usize::from(u16::MAX) {
            return Err(Error::Oversize(self.permissions.len()));
        }
        Ok(())
    }

    pub fn to_bytes(&self, params: &NtruParams) -> Result<Vec<u8>> {
        self.validate(params)?;
        let mut out = Vec::with_capacity(40 + self.permissions.len() + 2 * params.n);
        out.extend_from_slice(CERT_MAGIC);
        out.push(self.version);
        out.push(self.params_id);
        out.extend_from_slice(&self.pseudonym_id);
        out.extend_from_slice(&self.validity_start.to_le_bytes());
        out.extend_from_slice(&self.validity_end.to_le_bytes());
        out.extend_from_slice(&(self.permissions.len() as u16).to_le_bytes());
        out.extend_from_slice(&self.permissions);
        out.push(self.public_key.depth());
        wire::put_residues(&mut out, self.public_key.key(), params.q)?;
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8], params: &NtruParams) -> Result<Self> {
        let mut r = Reader::new(bytes);
        if r.take(4)? != CERT_MAGIC {
            return Err(Error::format("bad certificate magic"));
        }
        let version = r.u8()?;
        if version != CERT_VERSION {
            return Err(Error::format(format!("unsupported certificate version {version}")));
        }
        let params_id = r.u8()?;
        if params_id != params.id {
            return Err(Error::format(format!(
                "certificate params_id {params_id} does not match {}",
                params.id
            )));
        }
        let pseudonym_id = r.array::<16>()?;
        let validity_start = r.u64()?;
        let validity_end = r.u64()?;
        let perm_len = r.u16()?;
        let permissions = r.take(usize::from(perm_len))?.to_vec();
        let depth = r.u8()?;
        let key = r.residues(params.n, params.q)?;
        r.finish()?;
        let cert = PseudonymCertificate {
            version,
            params_id,
            pseudonym_id,
            validity_start,
            validity_end,
            permissions,
            public_key: ExpandedPublicKey::new(key, depth, params)?,
        };
        cert.validate(params)?;
        Ok(cert)
    }
}

/// Frames `data` and encrypts each block under `key` with its own `b`.
pub fn encrypt_bytes<K, R>(
    data: &[u8],
    key: &K,
    params: &NtruParams,
    rng: &mut R,
) -> Result<Vec<CiphertextBlock>>
where
    K: EncryptionKey + ?Sized,
    R: RngCore + ?Sized,
{
    let encoded = encode_bytes(data, params)?;
    encoded
        .blocks
        .iter()
        .map(|m| ntru::encrypt(key, params, m, rng))
        .collect()
}

/// Inverse of [`encrypt_bytes`]; a wrong key or a decryption failure shows up
/// as [`Error::IntegrityFailure`].
pub fn decrypt_bytes(blocks: &[CiphertextBlock], sk: &PrivateKey) -> Result<Vec<u8>> {
    let messages = blocks
        .iter()
        .map(|ct| ntru::decrypt(sk, ct))
        .collect::<Result<Vec<_>>>()?;
    decode_bytes(&messages, sk.params())
}

pub fn encrypt_certificate<R: RngCore + ?Sized>(
    cert: &PseudonymCertificate,
    target_key: &ExpandedPublicKey,
    params: &NtruParams,
    rng: &mut R,
) -> Result<Vec<CiphertextBlock>> {
    let bytes = cert.to_bytes(params)?;
    encrypt_bytes(&bytes, target_key, params, rng)
}

pub fn decrypt_certificate(
    blocks: &[CiphertextBlock],
    sk: &PrivateKey,
    params: &NtruParams,
) -> Result<PseudonymCertificate> {
    if sk.params() != params {
        return Err(Error::InvalidParams("private key belongs to a different parameter set".into()));
    }
    let bytes = decrypt_bytes(blocks, sk)?;
    PseudonymCertificate::from_bytes(&bytes, params)
        .map_err(|e| Error::integrity(format!("certificate does not parse: {e}")))
}
