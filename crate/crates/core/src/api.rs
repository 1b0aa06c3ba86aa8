//! Request and response types for the HTTP service, and the operations
//! behind each endpoint.
//!
//! Key files, ciphertext files and payloads travel as base64 strings holding
//! the exact bytes of the [`keyfile`](crate::keyfile) formats. Every
//! operation is deterministic when a seed is given; without one it draws from
//! the OS entropy source.

use serde::{Deserialize, Serialize};

use crate::bench::{self, BenchReport, TableFormat};
use crate::cert;
use crate::expansion::{self, ExpandedPublicKey, ExpanderRole, ExpanderSecret};
use crate::keyfile::{self, fingerprint, KeyFile};
use crate::ntru;
use crate::params::Preset;
use crate::poly::RingElement;
use crate::protocol::{self, FlowKind};
use crate::rng::{self, StreamRng};
use crate::Error;

/// Minimum keygen/expansion ratio `bench` requires of every preset.
pub const SPEEDUP_THRESHOLD: f64 = 100.0;

mod b64 {
    use base64::engine::general_purpose::STANDARD;
    use base64::Engine as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&STANDARD.encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        STANDARD.decode(s).map_err(serde::de::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(bytes: &Option<Vec<u8>>, s: S) -> Result<S::Ok, S::Error> {
            match bytes {
                Some(b) => super::serialize(b, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<u8>>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|s| STANDARD.decode(s).map_err(serde::de::Error::custom))
                .transpose()
        }
    }
}

fn hex32(v: u32) -> String {
    format!("{v:08x}")
}

fn stream(seed: Option<u64>) -> StreamRng {
    seed.map_or_else(rng::from_entropy, rng::seeded)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Usage,
    Crypto,
    Integrity,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("{message}")]
pub struct ApiError {
    pub kind: ErrorKind,
    pub message: String,
    /// Protocol step that failed, for flow errors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<String>,
}

impl ApiError {
    pub fn usage(message: impl Into<String>) -> Self {
        ApiError {
            kind: ErrorKind::Usage,
            message: message.into(),
            step: None,
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        ApiError {
            kind: ErrorKind::Internal,
            message: message.into(),
            step: None,
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let step = match &e {
            Error::Step { step, .. } => Some((*step).to_string()),
            _ => None,
        };
        let kind = match e.root() {
            Error::IntegrityFailure(_) | Error::Format(_) => ErrorKind::Integrity,
            Error::InvalidParams(_) | Error::Oversize(_) => ErrorKind::Usage,
            _ => ErrorKind::Crypto,
        };
        ApiError {
            kind,
            message: e.to_string(),
            step,
        }
    }
}

pub type ApiResult<T> = Result<T, ApiError>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub version: String,
}

impl Health {
    pub fn ok() -> Self {
        Health {
            status: "ok".into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeygenRequest {
    pub preset: Preset,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub self_test: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeygenResponse {
    #[serde(with = "b64")]
    pub private_key: Vec<u8>,
    #[serde(with = "b64")]
    pub public_key: Vec<u8>,
    pub public_fingerprint: String,
    /// Present when a self-test was requested; true iff it passed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub self_test: Option<bool>,
}

pub fn keygen(req: &KeygenRequest) -> ApiResult<KeygenResponse> {
    let params = req.preset.params();
    let mut rng = stream(req.seed);
    let kp = ntru::keygen(&params, &mut rng)?;
    let self_test = req.self_test.then(|| {
        let mut test_rng = rng::child(&mut rng);
        let m = ntru::random_message(&params, &mut test_rng);
        let block_ok = ntru::encrypt(&kp.public, &params, &m, &mut test_rng)
            .and_then(|ct| ntru::decrypt(&kp.private, &ct))
            .is_ok_and(|back| back == m);
        let bytes_ok = cert::encrypt_bytes(b"self-test", &kp.public, &params, &mut test_rng)
            .and_then(|ct| cert::decrypt_bytes(&ct, &kp.private))
            .is_ok_and(|back| back == b"self-test");
        block_ok && bytes_ok
    });
    Ok(KeygenResponse {
        private_key: KeyFile::Private(kp.private).to_bytes()?,
        public_key: KeyFile::Public(kp.public.clone()).to_bytes()?,
        public_fingerprint: hex32(fingerprint(kp.public.h(), params.q)),
        self_test,
    })
}

/// Replaces the sampled expander with a fixed one; for tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixedExpander {
    /// `r = 1`
    One,
    /// `r = x`
    X,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandRequest {
    #[serde(with = "b64")]
    pub key: Vec<u8>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Return the expander as a key file.
    #[serde(default)]
    pub keep_secret: bool,
    #[serde(default)]
    pub fixed_expander: Option<FixedExpander>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandResponse {
    #[serde(with = "b64")]
    pub expanded_key: Vec<u8>,
    pub depth: u8,
    pub expanded_fingerprint: String,
    pub expander_fingerprint: String,
    #[serde(default, with = "b64::option", skip_serializing_if = "Option::is_none")]
    pub expander: Option<Vec<u8>>,
}

pub fn expand(req: &ExpandRequest) -> ApiResult<ExpandResponse> {
    let file = KeyFile::from_bytes(&req.key)?;
    let params = *file.params();
    let key = match file {
        KeyFile::Public(pk) => ExpandedPublicKey::original(&pk),
        KeyFile::Expanded { key, .. } => key,
        other => {
            return Err(ApiError::usage(format!(
                "expand needs a public or expanded key, got {:?}",
                other.kind()
            )))
        }
    };
    let secret = match req.fixed_expander {
        Some(fixed) => {
            let e = match fixed {
                FixedExpander::One => RingElement::one(params.n),
                FixedExpander::X => RingElement::monomial(params.n, 1),
            };
            ExpanderSecret::new(e, ExpanderRole::Direct)?
        }
        None => expansion::sample_expander(&params, ExpanderRole::Direct, &mut stream(req.seed))?,
    };
    let expanded = expansion::expand_key(&key, &secret, &params)?;
    let expander_fingerprint = hex32(fingerprint(secret.element(), params.q));
    let expander = if req.keep_secret {
        Some(KeyFile::Expander { secret, params }.to_bytes()?)
    } else {
        None
    };
    Ok(ExpandResponse {
        depth: expanded.depth(),
        expanded_fingerprint: hex32(fingerprint(expanded.key(), params.q)),
        expanded_key: KeyFile::Expanded { key: expanded, params }.to_bytes()?,
        expander_fingerprint,
        expander,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncryptRequest {
    #[serde(with = "b64")]
    pub key: Vec<u8>,
    #[serde(with = "b64")]
    pub plaintext: Vec<u8>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncryptResponse {
    #[serde(with = "b64")]
    pub ciphertext: Vec<u8>,
    pub blocks: usize,
}

pub fn encrypt(req: &EncryptRequest) -> ApiResult<EncryptResponse> {
    let file = KeyFile::from_bytes(&req.key)?;
    let params = *file.params();
    let key = file.encryption_key().ok_or_else(|| {
        ApiError::usage(format!("encrypt needs a public or expanded key, got {:?}", file.kind()))
    })?;
    let blocks = cert::encrypt_bytes(&req.plaintext, &key, &params, &mut stream(req.seed))?;
    Ok(EncryptResponse {
        ciphertext: keyfile::ciphertext_to_bytes(&blocks, &params)?,
        blocks: blocks.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecryptRequest {
    #[serde(with = "b64")]
    pub private_key: Vec<u8>,
    #[serde(with = "b64")]
    pub ciphertext: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecryptResponse {
    #[serde(with = "b64")]
    pub plaintext: Vec<u8>,
}

pub fn decrypt(req: &DecryptRequest) -> ApiResult<DecryptResponse> {
    let sk = match KeyFile::from_bytes(&req.private_key)? {
        KeyFile::Private(sk) => sk,
        other => {
            return Err(ApiError::usage(format!(
                "decrypt needs a private key, got {:?}",
                other.kind()
            )))
        }
    };
    let (params, blocks) = keyfile::ciphertext_from_bytes(&req.ciphertext)?;
    if params != *sk.params() {
        return Err(ApiError::usage(format!(
            "ciphertext is for {}, key is for {}",
            params.label(),
            sk.params().label()
        )));
    }
    Ok(DecryptResponse {
        plaintext: cert::decrypt_bytes(&blocks, &sk)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowRequest {
    pub flow: FlowKind,
    pub preset: Preset,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowResponse {
    pub ok: bool,
    pub attempts: u32,
    pub messages: usize,
    pub transcript: String,
}

pub fn run_flow(req: &FlowRequest) -> ApiResult<FlowResponse> {
    let t = protocol::run_flow(req.flow, &req.preset.params(), req.seed)?;
    Ok(FlowResponse {
        ok: t.all_checks_passed(),
        attempts: t.attempts,
        messages: t.messages.len(),
        transcript: t.to_log(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRequest {
    pub presets: Vec<Preset>,
    pub trials: usize,
    pub format: TableFormat,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResponse {
    pub reports: Vec<BenchReport>,
    pub table: String,
    /// Whether every ratio reached [`SPEEDUP_THRESHOLD`].
    pub passed: bool,
}

pub fn bench(req: &BenchRequest) -> ApiResult<BenchResponse> {
    if req.presets.is_empty() {
        return Err(ApiError::usage("no presets given"));
    }
    let mut rng = stream(req.seed);
    let reports = req
        .presets
        .iter()
        .map(|p| bench::bench_preset(&p.params(), req.trials, &mut rng))
        .collect::<crate::Result<Vec<_>>>()?;
    let table = String::from_utf8(bench::emit_table(&reports, req.format))
        .map_err(|e| ApiError::internal(e.to_string()))?;
    Ok(BenchResponse {
        passed: reports.iter().all(|r| r.speedup_ratio >= SPEEDUP_THRESHOLD),
        reports,
        table,
    })
}
