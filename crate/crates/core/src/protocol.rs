//! End entity (EE), registration authority (RA) and certificate authority
//! (CA) actors, and the two issuance flows.
//!
//! Butterfly flow:
//!
//! ```text
//! EE ──C1: enc_RA(h ‖ I)──▶ RA        u = h·d
//!                            RA ──C2: enc_CA(u ‖ I)──▶ CA     v = u·r
//! EE ◀──────────── C3: enc_v(Cert{v, I}) ─────────────── CA   (forwarded by RA)
//! ```
//!
//! Direct flow: `CA_REQ: enc_CA(h ‖ I)` to the CA, which answers with
//! `CA_RESP: enc_w(Cert{w = h·r, I})`.
//!
//! Request plaintext (c_1, c_2, c_a), integers little-endian:
//!
//! ```text
//! depth: u8 ‖ N × u16 key residues mod q ‖ permissions_len: u16 ‖ permissions
//! ```
//!
//! Each actor owns its random stream and records every plaintext ring element
//! it learns in a view, so a finished transcript can be checked for view
//! separation: the RA never learns `r` or `v`, the CA never learns `h`.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::cert::{self, PseudonymCertificate};
use crate::expansion::{self, ExpandedPublicKey, ExpanderRole, ExpanderSecret};
use crate::keyfile::fingerprint;
use crate::ntru::{self, CiphertextBlock, KeyPair, PublicKey};
use crate::params::NtruParams;
use crate::poly::{self, RingElement};
use crate::rng::{self, StreamRng};
use crate::wire::{self, Reader};
use crate::{Error, Result};

pub type RequestId = [u8; 16];

/// 2026-01-01T00:00:00Z; fixed so that flows are reproducible.
pub const DEFAULT_VALIDITY_START: u64 = 1_767_225_600;
pub const DEFAULT_VALIDITY_SECONDS: u64 = 7 * 24 * 3600;
pub const DEFAULT_PERMISSIONS: &[u8] = b"psid=0x20;ssp=01";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    #[serde(rename = "EE")]
    EndEntity,
    #[serde(rename = "RA")]
    RegistrationAuthority,
    #[serde(rename = "CA")]
    CertificateAuthority,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::EndEntity => "EE",
            Role::RegistrationAuthority => "RA",
            Role::CertificateAuthority => "CA",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MessageKind {
    C1,
    C2,
    C3,
    #[serde(rename = "CA_REQ")]
    CaReq,
    #[serde(rename = "CA_RESP")]
    CaResp,
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MessageKind::C1 => "C1",
            MessageKind::C2 => "C2",
            MessageKind::C3 => "C3",
            MessageKind::CaReq => "CA_REQ",
            MessageKind::CaResp => "CA_RESP",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolMessage {
    pub kind: MessageKind,
    pub request_id: RequestId,
    pub payload: Vec<CiphertextBlock>,
}

impl ProtocolMessage {
    fn expect(&self, kind: MessageKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::UnexpectedMessage {
                expected: kind.to_string(),
                found: self.kind.to_string(),
            });
        }
        Ok(())
    }

    /// CRC-32 over all payload residues.
    pub fn digest(&self, params: &NtruParams) -> u32 {
        let joined: Vec<i64> = self
            .payload
            .iter()
            .flat_map(|b| b.element().coeffs().iter().copied())
            .collect();
        fingerprint(&RingElement::from_coeffs(joined), params.q)
    }
}

/// A ring element an actor has seen in the clear.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub label: &'static str,
    pub value: RingElement,
    /// Expander secrets are never printed, only fingerprinted.
    pub secret: bool,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn encode_request(key: &ExpandedPublicKey, permissions: &[u8], params: &NtruParams) -> Result<Vec<u8>> {
    if permissions.len() > usize::from(u16::MAX) {
        return Err(Error::Oversize(permissions.len()));
    }
    let mut out = vec![key.depth()];
    wire::put_residues(&mut out, key.key(), params.q)?;
    out.extend_from_slice(&(permissions.len() as u16).to_le_bytes());
    out.extend_from_slice(permissions);
    Ok(out)
}

fn decode_request(bytes: &[u8], params: &NtruParams) -> Result<(ExpandedPublicKey, Vec<u8>)> {
    let parse = || -> Result<(ExpandedPublicKey, Vec<u8>)> {
        let mut r = Reader::new(bytes);
        let depth = r.u8()?;
        let key = r.residues(params.n, params.q)?;
        let len = r.u16()?;
        let permissions = r.take(usize::from(len))?.to_vec();
        r.finish()?;
        Ok((ExpandedPublicKey::new(key, depth, params)?, permissions))
    };
    parse().map_err(|e| Error::integrity(format!("request does not parse: {e}")))
}

pub struct EndEntity {
    keypair: KeyPair,
    rng: StreamRng,
    view: Vec<Observation>,
}

impl EndEntity {
    /// Generates the caterpillar key pair.
    pub fn new(params: &NtruParams, mut rng: StreamRng) -> Result<Self> {
        let keypair = ntru::keygen(params, &mut rng)?;
        Ok(Self::with_keypair(keypair, rng))
    }

    pub fn with_keypair(keypair: KeyPair, rng: StreamRng) -> Self {
        let view = vec![Observation {
            label: "h",
            value: keypair.public.h().clone(),
            secret: false,
        }];
        EndEntity { keypair, rng, view }
    }

    pub fn public_key(&self) -> &PublicKey {
        &self.keypair.public
    }

    pub fn view(&self) -> &[Observation] {
        &self.view
    }

    /// Encrypts `h ‖ permissions` to an authority. `kind` is `C1` for the RA
    /// or `CA_REQ` for the direct flow.
    pub fn create_request(
        &mut self,
        kind: MessageKind,
        recipient: &PublicKey,
        permissions: &[u8],
    ) -> Result<ProtocolMessage> {
        if !matches!(kind, MessageKind::C1 | MessageKind::CaReq) {
            return Err(Error::UnexpectedMessage {
                expected: "C1 or CA_REQ".into(),
                found: kind.to_string(),
            });
        }
        let params = *self.keypair.public.params();
        let mut request_id = [0u8; 16];
        self.rng.fill_bytes(&mut request_id);
        let h = ExpandedPublicKey::original(&self.keypair.public);
        let plaintext = encode_request(&h, permissions, &params)?;
        let payload = cert::encrypt_bytes(&plaintext, recipient, &params, &mut self.rng)?;
        Ok(ProtocolMessage {
            kind,
            request_id,
            payload,
        })
    }

    /// Decrypts the certificate with the caterpillar private key.
    pub fn receive(&mut self, msg: &ProtocolMessage) -> Result<PseudonymCertificate> {
        if !matches!(msg.kind, MessageKind::C3 | MessageKind::CaResp) {
            return Err(Error::UnexpectedMessage {
                expected: "C3 or CA_RESP".into(),
                found: msg.kind.to_string(),
            });
        }
        let params = *self.keypair.private.params();
        let cert = cert::decrypt_certificate(&msg.payload, &self.keypair.private, &params)?;
        let expected_depth = if msg.kind == MessageKind::C3 { 2 } else { 1 };
        if cert.public_key.depth() != expected_depth {
            return Err(Error::integrity(format!(
                "certificate key depth {} for a {} message",
                cert.public_key.depth(),
                msg.kind
            )));
        }
        self.view.push(Observation {
            label: if expected_depth == 2 { "v" } else { "w" },
            value: cert.public_key.key().clone(),
            secret: false,
        });
        Ok(cert)
    }
}

pub struct RegistrationAuthority {
    keypair: KeyPair,
    rng: StreamRng,
    expanders: HashMap<RequestId, ExpanderSecret>,
    fixed_expander: Option<ExpanderSecret>,
    view: Vec<Observation>,
}

impl RegistrationAuthority {
    pub fn new(params: &NtruParams, mut rng: StreamRng) -> Result<Self> {
        let keypair = ntru::keygen(params, &mut rng)?;
        Ok(RegistrationAuthority {
            keypair,
            rng,
            expanders: HashMap::new(),
            fixed_expander: None,
            view: Vec::new(),
        })
    }

    /// Uses `d` for every request instead of sampling.
    #[cfg(feature = "test-hooks")]
    pub fn with_fixed_expander(mut self, d: ExpanderSecret) -> Self {
        self.fixed_expander = Some(d);
        self
    }

    pub fn public_key(&self) -> &PublicKey {
        &self.keypair.public
    }

    pub fn view(&self) -> &[Observation] {
        &self.view
    }

    /// The cocoon expander `d` chosen for a request.
    pub fn expander_for(&self, request_id: &RequestId) -> Option<&ExpanderSecret> {
        self.expanders.get(request_id)
    }

    /// `C1 → C2`: recovers `(h, I)`, computes `u = h·d` and re-encrypts
    /// `(u, I)` to the CA.
    pub fn process(&mut self, msg: &ProtocolMessage, ca_key: &PublicKey) -> Result<ProtocolMessage> {
        msg.expect(MessageKind::C1)?;
        if self.expanders.contains_key(&msg.request_id) {
            return Err(Error::DuplicateRequest(hex(&msg.request_id)));
        }
        let params = *self.keypair.public.params();
        let plaintext = cert::decrypt_bytes(&msg.payload, &self.keypair.private)?;
        let (h, permissions) = decode_request(&plaintext, &params)?;
        if h.depth() != 0 {
            return Err(Error::integrity("C1 must carry an original public key"));
        }
        let d = match &self.fixed_expander {
            Some(d) => d.clone(),
            None => expansion::sample_expander(&params, ExpanderRole::RaCocoon, &mut self.rng)?,
        };
        let u = expansion::expand_key(&h, &d, &params)?;

        self.view.push(Observation { label: "h", value: h.key().clone(), secret: false });
        self.view.push(Observation { label: "d", value: d.element().clone(), secret: true });
        self.view.push(Observation { label: "u", value: u.key().clone(), secret: false });
        self.expanders.insert(msg.request_id, d);

        let forward = encode_request(&u, &permissions, &params)?;
        let payload = cert::encrypt_bytes(&forward, ca_key, &params, &mut self.rng)?;
        Ok(ProtocolMessage {
            kind: MessageKind::C2,
            request_id: msg.request_id,
            payload,
        })
    }

    /// Passes `C3` to the end entity without looking inside.
    pub fn forward(&self, msg: ProtocolMessage) -> Result<ProtocolMessage> {
        msg.expect(MessageKind::C3)?;
        if !self.expanders.contains_key(&msg.request_id) {
            return Err(Error::UnknownRequest(hex(&msg.request_id)));
        }
        Ok(msg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Validity {
    pub start: u64,
    pub seconds: u64,
}

impl Default for Validity {
    fn default() -> Self {
        Validity {
            start: DEFAULT_VALIDITY_START,
            seconds: DEFAULT_VALIDITY_SECONDS,
        }
    }
}

pub struct CertificateAuthority {
    keypair: KeyPair,
    rng: StreamRng,
    validity: Validity,
    expanders: HashMap<RequestId, ExpanderSecret>,
    issued: HashMap<RequestId, PseudonymCertificate>,
    fixed_expander: Option<ExpanderSecret>,
    view: Vec<Observation>,
}

impl CertificateAuthority {
    pub fn new(params: &NtruParams, mut rng: StreamRng, validity: Validity) -> Result<Self> {
        let keypair = ntru::keygen(params, &mut rng)?;
        Ok(CertificateAuthority {
            keypair,
            rng,
            validity,
            expanders: HashMap::new(),
            issued: HashMap::new(),
            fixed_expander: None,
            view: Vec::new(),
        })
    }

    /// Uses `r` for every request instead of sampling.
    #[cfg(feature = "test-hooks")]
    pub fn with_fixed_expander(mut self, r: ExpanderSecret) -> Self {
        self.fixed_expander = Some(r);
        self
    }

    pub fn public_key(&self) -> &PublicKey {
        &self.keypair.public
    }

    pub fn view(&self) -> &[Observation] {
        &self.view
    }

    /// The expander `r` chosen for a request.
    pub fn expander_for(&self, request_id: &RequestId) -> Option<&ExpanderSecret> {
        self.expanders.get(request_id)
    }

    pub fn issued(&self, request_id: &RequestId) -> Option<&PseudonymCertificate> {
        self.issued.get(request_id)
    }

    /// `C2 → C3`: `v = u·r`, certificate with key `v`, encrypted under `v`.
    pub fn process(&mut self, msg: &ProtocolMessage) -> Result<ProtocolMessage> {
        msg.expect(MessageKind::C2)?;
        self.issue(msg, 1, MessageKind::C3, ExpanderRole::CaButterfly, ("u", "v"))
    }

    /// `CA_REQ → CA_RESP`: `w = h·r`, certificate with key `w`, encrypted
    /// under `w`.
    pub fn process_direct(&mut self, msg: &ProtocolMessage) -> Result<ProtocolMessage> {
        msg.expect(MessageKind::CaReq)?;
        self.issue(msg, 0, MessageKind::CaResp, ExpanderRole::Direct, ("h", "w"))
    }

    fn issue(
        &mut self,
        msg: &ProtocolMessage,
        input_depth: u8,
        reply: MessageKind,
        role: ExpanderRole,
        labels: (&'static str, &'static str),
    ) -> Result<ProtocolMessage> {
        if self.expanders.contains_key(&msg.request_id) {
            return Err(Error::DuplicateRequest(hex(&msg.request_id)));
        }
        let params = *self.keypair.public.params();
        let plaintext = cert::decrypt_bytes(&msg.payload, &self.keypair.private)?;
        let (key, permissions) = decode_request(&plaintext, &params)?;
        if key.depth() != input_depth {
            return Err(Error::integrity(format!(
                "{} must carry a depth-{input_depth} key",
                msg.kind
            )));
        }
        let r = match &self.fixed_expander {
            Some(r) => ExpanderSecret::new(r.element().clone(), role)?,
            None => expansion::sample_expander(&params, role, &mut self.rng)?,
        };
        let expanded = expansion::expand_key(&key, &r, &params)?;

        let mut pseudonym_id = [0u8; 16];
        self.rng.fill_bytes(&mut pseudonym_id);
        let certificate = PseudonymCertificate::new(
            &params,
            pseudonym_id,
            expanded.clone(),
            permissions,
            self.validity.start,
            self.validity.start + self.validity.seconds,
        )?;
        let payload = cert::encrypt_certificate(&certificate, &expanded, &params, &mut self.rng)?;

        self.view.push(Observation { label: labels.0, value: key.key().clone(), secret: false });
        self.view.push(Observation { label: "r", value: r.element().clone(), secret: true });
        self.view.push(Observation { label: labels.1, value: expanded.key().clone(), secret: false });
        self.expanders.insert(msg.request_id, r);
        self.issued.insert(msg.request_id, certificate);

        Ok(ProtocolMessage {
            kind: reply,
            request_id: msg.request_id,
            payload,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowKind {
    Direct,
    Butterfly,
}

impl fmt::Display for FlowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlowKind::Direct => "direct",
            FlowKind::Butterfly => "butterfly",
        })
    }
}

impl std::str::FromStr for FlowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(FlowKind::Direct),
            "butterfly" => Ok(FlowKind::Butterfly),
            other => Err(Error::InvalidParams(format!("unknown flow `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageRecord {
    pub kind: MessageKind,
    pub from: Role,
    pub to: Role,
    pub via: Option<Role>,
    pub request_id: RequestId,
    pub blocks: usize,
    pub digest: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
}

/// Everything that happened in one flow: the messages of the successful
/// attempt, each actor's view, the issued certificate and the invariant
/// checks evaluated over all of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowTranscript {
    pub flow: FlowKind,
    pub params: NtruParams,
    pub seed: u64,
    pub attempts: u32,
    pub retry_reasons: Vec<String>,
    pub messages: Vec<MessageRecord>,
    pub views: Vec<(Role, Observation)>,
    pub certificate: PseudonymCertificate,
    pub checks: Vec<Check>,
}

impl FlowTranscript {
    pub fn all_checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn view_of(&self, role: Role) -> impl Iterator<Item = &Observation> {
        self.views.iter().filter(move |(r, _)| *r == role).map(|(_, o)| o)
    }

    /// First value an actor recorded under `label`.
    pub fn observed(&self, role: Role, label: &str) -> Option<&RingElement> {
        self.view_of(role).find(|o| o.label == label).map(|o| &o.value)
    }

    /// Retries append to the views, so the successful attempt's value is the
    /// last one recorded.
    pub fn last_observed(&self, role: Role, label: &str) -> Option<&RingElement> {
        self.view_of(role).filter(|o| o.label == label).last().map(|o| &o.value)
    }

    /// One line per message, observation, certificate and check. Secrets
    /// appear only as fingerprints.
    pub fn to_log(&self) -> String {
        let q = self.params.q;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "flow {} preset={} seed={} attempts={}",
            self.flow,
            self.params.label(),
            self.seed,
            self.attempts
        );
        for reason in &self.retry_reasons {
            let _ = writeln!(out, "retry reason=\"{reason}\"");
        }
        for (i, m) in self.messages.iter().enumerate() {
            let via = m.via.map(|v| format!(" via={v}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "message {} kind={} from={} to={}{} request_id={} blocks={} digest={:08x}",
                i + 1,
                m.kind,
                m.from,
                m.to,
                via,
                hex(&m.request_id),
                m.blocks,
                m.digest
            );
        }
        for (role, o) in &self.views {
            let kind = if o.secret { "secret" } else { "public" };
            let _ = writeln!(
                out,
                "view actor={role} item={} {kind} fp={:08x}",
                o.label,
                fingerprint(&o.value, q)
            );
        }
        let c = &self.certificate;
        let _ = writeln!(
            out,
            "certificate pseudonym_id={} depth={} key_fp={:08x} permissions={} validity={}..{}",
            hex(&c.pseudonym_id),
            c.public_key.depth(),
            fingerprint(c.public_key.key(), q),
            hex(&c.permissions),
            c.validity_start,
            c.validity_end
        );
        for check in &self.checks {
            let _ = writeln!(
                out,
                "check {}={}",
                check.name,
                if check.passed { "pass" } else { "FAIL" }
            );
        }
        let _ = writeln!(out, "result {}", if self.all_checks_passed() { "ok" } else { "failed" });
        out
    }
}

/// Options for [`run_flow_with`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowConfig {
    pub permissions: Vec<u8>,
    pub validity: Validity,
    /// End-to-end retries allowed after an integrity failure at the EE.
    pub max_retries: u32,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            permissions: DEFAULT_PERMISSIONS.to_vec(),
            validity: Validity::default(),
            max_retries: 1,
        }
    }
}

fn step<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Step {
        step: name,
        source: Box::new(e),
    })
}

/// Runs a flow with fresh actors derived from `seed` and default options.
pub fn run_flow(flow: FlowKind, params: &NtruParams, seed: u64) -> Result<FlowTranscript> {
    run_flow_with(flow, params, seed, &FlowConfig::default())
}

pub fn run_flow_with(
    flow: FlowKind,
    params: &NtruParams,
    seed: u64,
    config: &FlowConfig,
) -> Result<FlowTranscript> {
    params.validate()?;
    let mut master = rng::seeded(seed);
    let mut ee = step("ee_keygen", EndEntity::new(params, rng::child(&mut master)))?;
    let mut ra = step("ra_keygen", RegistrationAuthority::new(params, rng::child(&mut master)))?;
    let mut ca = step(
        "ca_keygen",
        CertificateAuthority::new(params, rng::child(&mut master), config.validity),
    )?;

    let mut retry_reasons = Vec::new();
    let mut attempt = 0;
    loop {
        attempt += 1;
        let result = match flow {
            FlowKind::Butterfly => butterfly_attempt(&mut ee, &mut ra, &mut ca, config),
            FlowKind::Direct => direct_attempt(&mut ee, &mut ca, config),
        };
        match result {
            Ok((messages, certificate)) => {
                let views = ee
                    .view()
                    .iter()
                    .map(|o| (Role::EndEntity, o.clone()))
                    .chain(ra.view().iter().map(|o| (Role::RegistrationAuthority, o.clone())))
                    .chain(ca.view().iter().map(|o| (Role::CertificateAuthority, o.clone())))
                    .collect();
                let mut transcript = FlowTranscript {
                    flow,
                    params: *params,
                    seed,
                    attempts: attempt,
                    retry_reasons,
                    messages,
                    views,
                    certificate,
                    checks: Vec::new(),
                };
                transcript.checks = evaluate_checks(&transcript, &ee, config)?;
                return Ok(transcript);
            }
            Err(e) if e.is_integrity_failure() && attempt <= config.max_retries => {
                retry_reasons.push(e.to_string());
            }
            Err(e) => return Err(e),
        }
    }
}

type Attempt = (Vec<MessageRecord>, PseudonymCertificate);

fn record(msg: &ProtocolMessage, from: Role, to: Role, via: Option<Role>, params: &NtruParams) -> MessageRecord {
    MessageRecord {
        kind: msg.kind,
        from,
        to,
        via,
        request_id: msg.request_id,
        blocks: msg.payload.len(),
        digest: msg.digest(params),
    }
}

fn butterfly_attempt(
    ee: &mut EndEntity,
    ra: &mut RegistrationAuthority,
    ca: &mut CertificateAuthority,
    config: &FlowConfig,
) -> Result<Attempt> {
    let params = *ee.public_key().params();
    let ra_key = ra.public_key().clone();
    let ca_key = ca.public_key().clone();
    let c1 = step(
        "ee_create_request",
        ee.create_request(MessageKind::C1, &ra_key, &config.permissions),
    )?;
    let c2 = step("ra_process", ra.process(&c1, &ca_key))?;
    let c3 = step("ca_process", ca.process(&c2))?;
    let records = vec![
        record(&c1, Role::EndEntity, Role::RegistrationAuthority, None, &params),
        record(&c2, Role::RegistrationAuthority, Role::CertificateAuthority, None, &params),
        record(&c3, Role::CertificateAuthority, Role::EndEntity, Some(Role::RegistrationAuthority), &params),
    ];
    let c3 = step("ra_forward", ra.forward(c3))?;
    let certificate = step("ee_receive", ee.receive(&c3))?;
    Ok((records, certificate))
}

fn direct_attempt(
    ee: &mut EndEntity,
    ca: &mut CertificateAuthority,
    config: &FlowConfig,
) -> Result<Attempt> {
    let params = *ee.public_key().params();
    let ca_key = ca.public_key().clone();
    let req = step(
        "ee_create_request",
        ee.create_request(MessageKind::CaReq, &ca_key, &config.permissions),
    )?;
    let resp = step("ca_process", ca.process_direct(&req))?;
    let records = vec![
        record(&req, Role::EndEntity, Role::CertificateAuthority, None, &params),
        record(&resp, Role::CertificateAuthority, Role::EndEntity, None, &params),
    ];
    let certificate = step("ee_receive", ee.receive(&resp))?;
    Ok((records, certificate))
}

fn evaluate_checks(t: &FlowTranscript, ee: &EndEntity, config: &FlowConfig) -> Result<Vec<Check>> {
    let q = t.params.q;
    let h = ee.public_key().h();
    let key = t.certificate.public_key.key();
    let mut checks = Vec::new();

    // Full-knowledge recomputation of the certificate key from the secrets
    // the authorities recorded.
    let recomputed = match t.flow {
        FlowKind::Butterfly => match (
            t.last_observed(Role::RegistrationAuthority, "d"),
            t.last_observed(Role::CertificateAuthority, "r"),
        ) {
            (Some(d), Some(r)) => Some(poly::ring_mul(&poly::ring_mul(h, d, q)?, r, q)?),
            _ => None,
        },
        FlowKind::Direct => t
            .last_observed(Role::CertificateAuthority, "r")
            .map(|r| poly::ring_mul(h, r, q))
            .transpose()?,
    };
    checks.push(Check {
        name: "cert_key_matches_expansion",
        passed: recomputed.as_ref() == Some(key),
    });
    checks.push(Check {
        name: "cert_key_differs_from_h",
        passed: key != h,
    });
    checks.push(Check {
        name: "permissions_propagated",
        passed: t.certificate.permissions == config.permissions,
    });
    let expected_messages = match t.flow {
        FlowKind::Butterfly => 3,
        FlowKind::Direct => 2,
    };
    checks.push(Check {
        name: "message_count",
        passed: t.messages.len() == expected_messages,
    });
    if t.flow == FlowKind::Butterfly {
        checks.push(Check {
            name: "view_separation",
            passed: view_separation_holds(t),
        });
    }
    Ok(checks)
}

/// RA views only `{h, d, u}` and never a CA expander or butterfly key; CA
/// views only `{u, r, v}` and never `h`.
pub fn view_separation_holds(t: &FlowTranscript) -> bool {
    let values = |role: Role, label: &str| -> Vec<&RingElement> {
        t.view_of(role).filter(|o| o.label == label).map(|o| &o.value).collect()
    };
    let ra_labels_ok = t
        .view_of(Role::RegistrationAuthority)
        .all(|o| matches!(o.label, "h" | "d" | "u"));
    let ca_labels_ok = t
        .view_of(Role::CertificateAuthority)
        .all(|o| matches!(o.label, "u" | "r" | "v"));
    let ca_secrets = values(Role::CertificateAuthority, "r");
    let ca_butterflies = values(Role::CertificateAuthority, "v");
    let ra_never_sees_ca_material = t
        .view_of(Role::RegistrationAuthority)
        .all(|o| !ca_secrets.contains(&&o.value) && !ca_butterflies.contains(&&o.value));
    let caterpillars = values(Role::EndEntity, "h");
    let ca_never_sees_h = t
        .view_of(Role::CertificateAuthority)
        .all(|o| !caterpillars.contains(&&o.value));
    ra_labels_ok && ca_labels_ok && ra_never_sees_ca_material && ca_never_sees_h
}
