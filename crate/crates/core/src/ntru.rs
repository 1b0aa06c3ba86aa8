//! Key generation, encryption and decryption.
//!
//! ```text
//! keygen:   F_p = f⁻¹ mod p,  F_q = f⁻¹ mod q,  h = F_q·g mod q
//! encrypt:  C = p·h·b + M mod q                  (fresh ternary b per call)
//! decrypt:  a = lift(C·f mod q),  τ = a mod p,  M = τ·F_p mod p
//! ```
//!
//! Only `{f, F_p}` and `h` survive key generation; `g` and `F_q` are dropped.
//! Decryption cannot tell when a coefficient of `p·g·b + M·f` wrapped past
//! `q/2`; such failures are caught by the checksum in [`crate::encoding`].

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::expansion::{self, ExpanderRole};
use crate::params::NtruParams;
use crate::poly::{self, RingElement};
use crate::{Error, Result};

pub const DEFAULT_RESAMPLE_ATTEMPTS: u32 = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivateKey {
    f: RingElement,
    f_p: RingElement,
    params: NtruParams,
}

impl PrivateKey {
    /// Rebuilds a private key, checking `f·F_p ≡ 1 (mod p)`.
    pub fn from_parts(f: RingElement, f_p: RingElement, params: NtruParams) -> Result<Self> {
        check_len(&f, &params)?;
        check_len(&f_p, &params)?;
        let f_p = f_p.reduce(params.p)?;
        if !poly::ring_mul(&f, &f_p, params.p)?.is_one() {
            return Err(Error::format("private key halves are not inverse mod p"));
        }
        Ok(PrivateKey {
            f: poly::center_lift(&f, params.q),
            f_p,
            params,
        })
    }

    pub fn f(&self) -> &RingElement {
        &self.f
    }

    pub fn f_p(&self) -> &RingElement {
        &self.f_p
    }

    pub fn params(&self) -> &NtruParams {
        &self.params
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PublicKey {
    h: RingElement,
    params: NtruParams,
}

impl PublicKey {
    pub fn new(h: RingElement, params: NtruParams) -> Result<Self> {
        check_len(&h, &params)?;
        Ok(PublicKey {
            h: h.reduce(params.q)?,
            params,
        })
    }

    pub fn h(&self) -> &RingElement {
        &self.h
    }

    pub fn params(&self) -> &NtruParams {
        &self.params
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPair {
    pub private: PrivateKey,
    pub public: PublicKey,
}

/// Anything a message can be encrypted under: an original public key or an
/// expanded one.
pub trait EncryptionKey {
    fn element(&self) -> &RingElement;
}

impl EncryptionKey for PublicKey {
    fn element(&self) -> &RingElement {
        &self.h
    }
}

impl EncryptionKey for RingElement {
    fn element(&self) -> &RingElement {
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CiphertextBlock {
    c: RingElement,
}

impl CiphertextBlock {
    pub fn new(c: RingElement, params: &NtruParams) -> Result<Self> {
        check_len(&c, params)?;
        Ok(CiphertextBlock { c: c.reduce(params.q)? })
    }

    pub fn element(&self) -> &RingElement {
        &self.c
    }

    pub fn into_element(self) -> RingElement {
        self.c
    }
}

fn check_len(e: &RingElement, params: &NtruParams) -> Result<()> {
    if e.len() != params.n {
        return Err(Error::LengthMismatch {
            expected: params.n,
            found: e.len(),
        });
    }
    Ok(())
}

/// Everything key generation computes, including the values it discards.
#[derive(Debug, Clone)]
pub struct KeygenTrace {
    pub f: RingElement,
    pub g: RingElement,
    pub f_p: RingElement,
    pub f_q: RingElement,
    pub h: RingElement,
    pub attempts: u32,
}

fn keygen_inner<R: RngCore + ?Sized>(
    params: &NtruParams,
    max_attempts: u32,
    rng: &mut R,
) -> Result<KeygenTrace> {
    params.validate()?;
    let w = params.weight_fg;
    for attempt in 1..=max_attempts {
        let f = poly::sample_ternary(w + 1, w, params.n, rng)?;
        let f_p = match poly::invert_mod_prime(&f, params) {
            Ok(inv) => inv,
            Err(Error::NoInverse) => continue,
            Err(e) => return Err(e),
        };
        let f_q = match poly::invert_mod_prime_power(&f, params) {
            Ok(inv) => inv,
            Err(Error::NoInverse) => continue,
            Err(e) => return Err(e),
        };
        let g = poly::sample_ternary(w, w, params.n, rng)?;
        let h = poly::ring_mul(&f_q, &g, params.q)?;
        return Ok(KeygenTrace {
            f,
            g,
            f_p,
            f_q,
            h,
            attempts: attempt,
        });
    }
    Err(Error::ResampleExhausted {
        attempts: max_attempts,
    })
}

pub fn keygen<R: RngCore + ?Sized>(params: &NtruParams, rng: &mut R) -> Result<KeyPair> {
    keygen_with_attempts(params, DEFAULT_RESAMPLE_ATTEMPTS, rng)
}

pub fn keygen_with_attempts<R: RngCore + ?Sized>(
    params: &NtruParams,
    max_attempts: u32,
    rng: &mut R,
) -> Result<KeyPair> {
    let trace = keygen_inner(params, max_attempts, rng)?;
    Ok(KeyPair {
        private: PrivateKey {
            f: trace.f,
            f_p: trace.f_p,
            params: *params,
        },
        public: PublicKey {
            h: trace.h,
            params: *params,
        },
    })
}

/// Key generation that also returns the discarded `g` and `F_q`.
#[cfg(feature = "test-hooks")]
pub fn keygen_trace<R: RngCore + ?Sized>(params: &NtruParams, rng: &mut R) -> Result<KeygenTrace> {
    keygen_inner(params, DEFAULT_RESAMPLE_ATTEMPTS, rng)
}

fn check_message(message: &RingElement, params: &NtruParams) -> Result<()> {
    check_len(message, params)?;
    if !message.is_ternary() {
        return Err(Error::NonTernaryMessage);
    }
    Ok(())
}

/// `C = p·key·b + M mod q` with a fresh blinding polynomial `b`.
pub fn encrypt<K, R>(
    key: &K,
    params: &NtruParams,
    message: &RingElement,
    rng: &mut R,
) -> Result<CiphertextBlock>
where
    K: EncryptionKey + ?Sized,
    R: RngCore + ?Sized,
{
    check_message(message, params)?;
    let b = poly::sample_ternary(params.weight_b, params.weight_b, params.n, rng)?;
    encrypt_blinded(key.element(), params, message, &b)
}

fn encrypt_blinded(
    key: &RingElement,
    params: &NtruParams,
    message: &RingElement,
    b: &RingElement,
) -> Result<CiphertextBlock> {
    check_len(key, params)?;
    let hb = poly::convolve(b, key)?;
    let c = poly::ring_add(&hb.scale(params.p, params.q)?, message, params.q)?;
    Ok(CiphertextBlock { c })
}

/// Encryption with a caller-chosen blinding polynomial.
#[cfg(feature = "test-hooks")]
pub fn encrypt_with_blinding<K: EncryptionKey + ?Sized>(
    key: &K,
    params: &NtruParams,
    message: &RingElement,
    b: &RingElement,
) -> Result<CiphertextBlock> {
    check_message(message, params)?;
    check_len(b, params)?;
    encrypt_blinded(key.element(), params, message, b)
}

/// Intermediate values of one decryption.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecryptionTrace {
    /// `C·f mod q`
    pub product: RingElement,
    /// `product` lifted to `(−q/2, q/2]`
    pub lifted: RingElement,
    /// `lifted mod p`
    pub tau: RingElement,
    /// `τ·F_p mod p`
    pub message: RingElement,
}

pub fn decrypt_trace(sk: &PrivateKey, ct: &CiphertextBlock) -> Result<DecryptionTrace> {
    let params = &sk.params;
    check_len(&ct.c, params)?;
    let product = poly::ring_mul(&ct.c, &sk.f, params.q)?;
    let lifted = poly::center_lift(&product, params.q);
    let tau = lifted.reduce(params.p)?;
    let message = poly::ring_mul(&tau, &sk.f_p, params.p)?;
    Ok(DecryptionTrace {
        product,
        lifted,
        tau,
        message,
    })
}

pub fn decrypt(sk: &PrivateKey, ct: &CiphertextBlock) -> Result<RingElement> {
    decrypt_trace(sk, ct).map(|t| t.message)
}

/// How many times the encryption key has been expanded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KeyDepth {
    /// the original `h`
    Plain,
    /// `w = h·r`
    Expanded,
    /// `v = h·d·r`
    Butterfly,
}

/// Trials share one key pair per this many roundtrips.
const TRIALS_PER_KEY: usize = 50;

/// Monte Carlo estimate of the probability that a random ternary message
/// fails to roundtrip under a key of the given depth.
///
/// Every trial draws a fresh message, fresh expanders and a fresh `b`; the
/// key pair is regenerated every 50 trials.
pub fn estimate_failure_rate<R: RngCore + ?Sized>(
    params: &NtruParams,
    depth: KeyDepth,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    let mut failures = 0usize;
    let mut keys = None;
    for trial in 0..trials {
        if trial % TRIALS_PER_KEY == 0 {
            keys = Some(keygen(params, rng)?);
        }
        let kp = keys.as_ref().expect("key pair generated on first trial");
        let key = match depth {
            KeyDepth::Plain => kp.public.h.clone(),
            KeyDepth::Expanded => {
                let r = expansion::sample_expander(params, ExpanderRole::Direct, rng)?;
                expansion::expand_public_key(&kp.public, &r)?.into_element()
            }
            KeyDepth::Butterfly => {
                let d = expansion::sample_expander(params, ExpanderRole::RaCocoon, rng)?;
                let r = expansion::sample_expander(params, ExpanderRole::CaButterfly, rng)?;
                let u = expansion::expand_public_key(&kp.public, &d)?;
                expansion::expand_key(&u, &r, params)?.into_element()
            }
        };
        let message = random_message(params, rng);
        let ct = encrypt(&key, params, &message, rng)?;
        if decrypt(&kp.private, &ct)? != message {
            failures += 1;
        }
    }
    Ok(failures as f64 / trials as f64)
}

/// Uniform ternary message, reduced mod p.
pub fn random_message<R: RngCore + ?Sized>(params: &NtruParams, rng: &mut R) -> RingElement {
    let coeffs = (0..params.n)
        .map(|_| i64::from(rng.next_u32() % 3) - 1)
        .collect();
    RingElement::reduced(coeffs, params.p).expect("p validated")
}
