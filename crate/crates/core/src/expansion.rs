//! Public-key expansion.
//!
//! An expanded key is the product of a public key with a small ternary
//! element: `w = h·r`, or in the butterfly flow `u = h·d` then `v = u·r`.
//! Because `C·f = p·g·(d·r)·b + M·f` for ciphertexts under `v`, the original
//! `{f, F_p}` still decrypts.
//!
//! Expanders are sparse (a few coefficients per sign): the decryption noise
//! `p·g·b·d·r` grows with the ℓ1 norm of `d·r`, so dense expanders would
//! overflow `q/2` almost every time.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::ntru::{EncryptionKey, PublicKey};
use crate::params::NtruParams;
use crate::poly::{self, RingElement};
use crate::{Error, Result};

/// Longest supported chain: cocoon, then butterfly.
pub const MAX_DEPTH: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpanderRole {
    /// `d`, chosen by the registration authority
    RaCocoon,
    /// `r`, chosen by the certificate authority in the butterfly flow
    CaButterfly,
    /// `r`, chosen by the certificate authority in the direct flow
    Direct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpanderSecret {
    e: RingElement,
    role: ExpanderRole,
}

impl ExpanderSecret {
    /// Wraps an explicit ternary element. Rejects zero and non-ternary input.
    pub fn new(e: RingElement, role: ExpanderRole) -> Result<Self> {
        if e.is_zero() {
            return Err(Error::InvalidParams("expander must be nonzero".into()));
        }
        if !e.is_ternary() {
            return Err(Error::InvalidParams("expander must be ternary".into()));
        }
        Ok(ExpanderSecret {
            e: RingElement::from_coeffs(e.into_coeffs()),
            role,
        })
    }

    pub fn element(&self) -> &RingElement {
        &self.e
    }

    pub fn role(&self) -> ExpanderRole {
        self.role
    }
}

/// A public key together with how many expansions produced it. Depth 0 is
/// an original key `h`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExpandedPublicKey {
    key: RingElement,
    depth: u8,
}

impl ExpandedPublicKey {
    pub fn new(key: RingElement, depth: u8, params: &NtruParams) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(Error::DepthExceeded(depth));
        }
        if key.len() != params.n {
            return Err(Error::LengthMismatch {
                expected: params.n,
                found: key.len(),
            });
        }
        Ok(ExpandedPublicKey {
            key: key.reduce(params.q)?,
            depth,
        })
    }

    pub fn original(pk: &PublicKey) -> Self {
        ExpandedPublicKey {
            key: pk.h().clone(),
            depth: 0,
        }
    }

    pub fn key(&self) -> &RingElement {
        &self.key
    }

    pub fn depth(&self) -> u8 {
        self.depth
    }

    pub fn into_element(self) -> RingElement {
        self.key
    }
}

impl EncryptionKey for ExpandedPublicKey {
    fn element(&self) -> &RingElement {
        &self.key
    }
}

/// `pk · e mod q`, one level deeper than `pk`.
pub fn expand_key(
    pk: &ExpandedPublicKey,
    secret: &ExpanderSecret,
    params: &NtruParams,
) -> Result<ExpandedPublicKey> {
    let depth = pk.depth + 1;
    if depth > MAX_DEPTH {
        return Err(Error::DepthExceeded(depth));
    }
    if pk.key.len() != params.n {
        return Err(Error::LengthMismatch {
            expected: params.n,
            found: pk.key.len(),
        });
    }
    Ok(ExpandedPublicKey {
        key: poly::ring_mul(&pk.key, &secret.e, params.q)?,
        depth,
    })
}

/// Depth-1 expansion of an original public key.
pub fn expand_public_key(pk: &PublicKey, secret: &ExpanderSecret) -> Result<ExpandedPublicKey> {
    expand_key(&ExpandedPublicKey::original(pk), secret, pk.params())
}

/// Sparse ternary expander with `weight_expander` coefficients of each sign.
pub fn sample_expander<R: RngCore + ?Sized>(
    params: &NtruParams,
    role: ExpanderRole,
    rng: &mut R,
) -> Result<ExpanderSecret> {
    let w = params.weight_expander;
    let e = poly::sample_ternary(w, w, params.n, rng)?;
    ExpanderSecret::new(e, role)
}

/// Like [`sample_expander`] but only returns expanders invertible mod `q`.
///
/// A balanced ternary element vanishes at 1 and is never invertible, so this
/// mode draws one extra +1.
pub fn sample_expander_strict<R: RngCore + ?Sized>(
    params: &NtruParams,
    role: ExpanderRole,
    max_attempts: u32,
    rng: &mut R,
) -> Result<ExpanderSecret> {
    let w = params.weight_expander;
    for _ in 0..max_attempts {
        let e = poly::sample_ternary(w + 1, w, params.n, rng)?;
        match poly::invert_mod_prime_power(&e, params) {
            Ok(_) => return ExpanderSecret::new(e, role),
            Err(Error::NoInverse) => continue,
            Err(err) => return Err(err),
        }
    }
    Err(Error::ResampleExhausted {
        attempts: max_attempts,
    })
}

/// True iff `expanded` is exactly `pk · secret mod q`.
pub fn verify_expansion(
    pk: &ExpandedPublicKey,
    secret: &ExpanderSecret,
    expanded: &ExpandedPublicKey,
    params: &NtruParams,
) -> bool {
    match expand_key(pk, secret, params) {
        Ok(expected) => expected == *expanded,
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntru::keygen;
    use crate::params::Preset;
    use crate::rng;

    fn toy_key(seed: u64) -> (NtruParams, PublicKey) {
        let params = Preset::Toy17.params();
        let kp = keygen(&params, &mut rng::seeded(seed)).unwrap();
        (params, kp.public)
    }

    #[test]
    fn identity_and_rotation() {
        let (params, pk) = toy_key(1);
        let one = ExpanderSecret::new(RingElement::one(17), ExpanderRole::Direct).unwrap();
        let w = expand_public_key(&pk, &one).unwrap();
        assert_eq!(w.key(), pk.h());
        assert_eq!(w.depth(), 1);

        let x = ExpanderSecret::new(RingElement::monomial(17, 1), ExpanderRole::Direct).unwrap();
        let w = expand_public_key(&pk, &x).unwrap();
        for k in 0..params.n {
            assert_eq!(w.key().coeffs()[k], pk.h().coeffs()[(k + params.n - 1) % params.n]);
        }
    }

    #[test]
    fn depth_is_capped() {
        let (params, pk) = toy_key(2);
        let mut rng = rng::seeded(3);
        let d = sample_expander(&params, ExpanderRole::RaCocoon, &mut rng).unwrap();
        let r = sample_expander(&params, ExpanderRole::CaButterfly, &mut rng).unwrap();
        let u = expand_public_key(&pk, &d).unwrap();
        let v = expand_key(&u, &r, &params).unwrap();
        assert_eq!(v.depth(), 2);
        assert_eq!(expand_key(&v, &r, &params).unwrap_err(), Error::DepthExceeded(3));
        assert!(ExpandedPublicKey::new(v.key().clone(), 3, &params).is_err());
    }

    #[test]
    fn expander_shape() {
        let params = Preset::Toy17.params().with_weights(4, 4, 1).unwrap();
        let e = sample_expander(&params, ExpanderRole::Direct, &mut rng::seeded(4)).unwrap();
        assert_eq!(e.element().coeffs().iter().filter(|&&c| c == 1).count(), 1);
        assert_eq!(e.element().coeffs().iter().filter(|&&c| c == -1).count(), 1);
        assert_eq!(e.role(), ExpanderRole::Direct);
    }

    #[test]
    fn rejects_bad_expanders() {
        assert!(ExpanderSecret::new(RingElement::zero(17), ExpanderRole::Direct).is_err());
        let mut c = vec![0; 17];
        c[0] = 2;
        assert!(ExpanderSecret::new(RingElement::from_coeffs(c), ExpanderRole::Direct).is_err());
    }

    #[test]
    fn strict_expanders_are_invertible() {
        let params = Preset::Toy17.params();
        let mut rng = rng::seeded(5);
        for _ in 0..20 {
            let e = sample_expander_strict(&params, ExpanderRole::Direct, 100, &mut rng).unwrap();
            let inv = poly::invert_mod_prime_power(e.element(), &params).unwrap();
            assert!(poly::ring_mul(e.element(), &inv, params.q).unwrap().is_one());
        }
    }

    #[test]
    fn verification() {
        let (params, pk) = toy_key(6);
        let original = ExpandedPublicKey::original(&pk);
        let mut rng = rng::seeded(7);
        let r = sample_expander(&params, ExpanderRole::Direct, &mut rng).unwrap();
        let w = expand_key(&original, &r, &params).unwrap();
        assert!(verify_expansion(&original, &r, &w, &params));

        let mut coeffs = w.key().coeffs().to_vec();
        coeffs[5] += 1;
        let tampered = ExpandedPublicKey::new(RingElement::from_coeffs(coeffs), 1, &params).unwrap();
        assert!(!verify_expansion(&original, &r, &tampered, &params));
    }
}
