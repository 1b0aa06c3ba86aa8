//! Arithmetic in `Z[x]/(x^N − 1)` and its quotients `Z_m[x]/(x^N − 1)`.
//!
//! Reduced elements always hold centered representatives in `(−m/2, m/2]`.
//! For `m = 3` that is `{−1, 0, 1}`; for `m = 2048` it is `−1023..=1024`.

use rand::seq::index;
use rand::RngCore;

use crate::params::{prime_power_base, NtruParams};
use crate::{Error, Result};

/// A ring element: `coeffs[i]` is the coefficient of `x^i`.
///
/// `modulus` is `None` for elements of `Z[x]/(x^N − 1)` and `Some(m)` for
/// elements reduced into the centered range mod `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingElement {
    coeffs: Vec<i64>,
    modulus: Option<i64>,
}

impl RingElement {
    pub fn from_coeffs(coeffs: Vec<i64>) -> Self {
        RingElement { coeffs, modulus: None }
    }

    /// Reduces `coeffs` into the centered range mod `modulus`.
    pub fn reduced(mut coeffs: Vec<i64>, modulus: i64) -> Result<Self> {
        check_modulus(modulus)?;
        for c in &mut coeffs {
            *c = center(*c, modulus);
        }
        Ok(RingElement {
            coeffs,
            modulus: Some(modulus),
        })
    }

    pub fn zero(n: usize) -> Self {
        Self::from_coeffs(vec![0; n])
    }

    pub fn one(n: usize) -> Self {
        Self::monomial(n, 0)
    }

    /// `x^k` (exponent taken mod `n`).
    pub fn monomial(n: usize, k: usize) -> Self {
        let mut coeffs = vec![0; n];
        coeffs[k % n] = 1;
        Self::from_coeffs(coeffs)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<i64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn modulus(&self) -> Option<i64> {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.first() == Some(&1) && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    pub fn is_ternary(&self) -> bool {
        self.coeffs.iter().all(|c| (-1..=1).contains(c))
    }

    /// Number of nonzero coefficients.
    pub fn weight(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }

    pub fn reduce(&self, modulus: i64) -> Result<Self> {
        Self::reduced(self.coeffs.clone(), modulus)
    }

    /// Non-negative residues mod `modulus`, as stored on the wire.
    pub fn residues(&self, modulus: i64) -> Vec<u16> {
        self.coeffs
            .iter()
            .map(|c| c.rem_euclid(modulus) as u16)
            .collect()
    }

    pub fn from_residues(residues: &[u16], modulus: i64) -> Result<Self> {
        if let Some(bad) = residues.iter().find(|&&r| i64::from(r) >= modulus) {
            return Err(Error::format(format!("residue {bad} out of range mod {modulus}")));
        }
        Self::reduced(residues.iter().map(|&r| i64::from(r)).collect(), modulus)
    }

    /// Multiplies every coefficient by `k` and reduces mod `modulus`.
    pub fn scale(&self, k: i64, modulus: i64) -> Result<Self> {
        Self::reduced(self.coeffs.iter().map(|c| c * k).collect(), modulus)
    }

    pub fn neg(&self) -> Self {
        RingElement {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            modulus: None,
        }
    }
}

/// Centered representative of `x` in `(−m/2, m/2]`.
#[inline]
pub fn center(x: i64, m: i64) -> i64 {
    let r = x.rem_euclid(m);
    if r > m / 2 {
        r - m
    } else {
        r
    }
}

fn check_modulus(modulus: i64) -> Result<()> {
    if modulus < 2 {
        return Err(Error::InvalidModulus(modulus));
    }
    Ok(())
}

fn check_lengths(a: &RingElement, b: &RingElement) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::InvalidParams("empty ring element".into()));
    }
    Ok(())
}

/// Cyclic convolution in `Z[x]/(x^N − 1)` without reduction.
///
/// The operand with fewer nonzero coefficients drives the outer loop, so a
/// sparse ternary factor costs `O(N · weight)` instead of `O(N²)`. The inner
/// loop is split at the wrap point instead of taking indices mod `N`.
pub fn convolve(a: &RingElement, b: &RingElement) -> Result<RingElement> {
    check_lengths(a, b)?;
    let (sparse, dense) = if a.weight() <= b.weight() { (a, b) } else { (b, a) };
    let n = a.len();
    let dense = dense.coeffs();
    let mut out = vec![0i64; n];
    for (i, &s) in sparse.coeffs().iter().enumerate() {
        if s == 0 {
            continue;
        }
        // x^i · x^j lands at i + j for j < n − i and wraps to i + j − n after.
        let (wrapped, direct) = out.split_at_mut(i);
        for (o, &d) in direct.iter_mut().zip(&dense[..n - i]) {
            *o += s * d;
        }
        for (o, &d) in wrapped.iter_mut().zip(&dense[n - i..]) {
            *o += s * d;
        }
    }
    Ok(RingElement::from_coeffs(out))
}

/// Product in `Z_m[x]/(x^N − 1)`, centered.
pub fn ring_mul(a: &RingElement, b: &RingElement, modulus: i64) -> Result<RingElement> {
    check_modulus(modulus)?;
    let product = convolve(a, b)?;
    RingElement::reduced(product.coeffs, modulus)
}

pub fn ring_add(a: &RingElement, b: &RingElement, modulus: i64) -> Result<RingElement> {
    check_lengths(a, b)?;
    let sum = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
    RingElement::reduced(sum, modulus)
}

pub fn ring_sub(a: &RingElement, b: &RingElement, modulus: i64) -> Result<RingElement> {
    check_lengths(a, b)?;
    let diff = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
    RingElement::reduced(diff, modulus)
}

/// Maps every coefficient to its representative in `(−m/2, m/2]` and drops
/// the modulus tag, so the result can be reduced mod a different modulus.
pub fn center_lift(a: &RingElement, modulus: i64) -> RingElement {
    RingElement::from_coeffs(a.coeffs.iter().map(|&c| center(c, modulus)).collect())
}

/// `f^{-1}` in `Z_p[x]/(x^N − 1)` for the prime `p` of `params`.
pub fn invert_mod_prime(f: &RingElement, params: &NtruParams) -> Result<RingElement> {
    invert_mod_prime_field(f, params.p)
}

/// `f^{-1}` in `Z_q[x]/(x^N − 1)` for `q = ℓ^k`: inverts mod `ℓ`, then
/// Newton-lifts until the precision reaches `q`.
pub fn invert_mod_prime_power(f: &RingElement, params: &NtruParams) -> Result<RingElement> {
    let q = params.q;
    let base = prime_power_base(q).ok_or(Error::InvalidModulus(q))?;
    let mut inv = invert_mod_prime_field(f, base)?;
    let mut precision = base;
    while precision < q {
        inv = hensel_step(f, &inv, q)?;
        precision = precision.saturating_mul(precision);
    }
    RingElement::reduced(inv.coeffs, q)
}

/// One Newton iteration `F ← F·(2 − f·F) mod m`.
///
/// If `f·F ≡ 1 (mod ℓ^j)` then the result satisfies `f·F ≡ 1 (mod ℓ^{2j})`
/// (as far as `m` allows).
pub fn hensel_step(f: &RingElement, inv: &RingElement, modulus: i64) -> Result<RingElement> {
    let e = ring_mul(f, inv, modulus)?;
    let mut correction: Vec<i64> = e.coeffs.iter().map(|c| -c).collect();
    correction[0] += 2;
    ring_mul(inv, &RingElement::from_coeffs(correction), modulus)
}

/// Extended Euclid over the field `Z_l[x]` against `x^N − 1`.
pub fn invert_mod_prime_field(f: &RingElement, l: i64) -> Result<RingElement> {
    check_modulus(l)?;
    if !crate::params::is_prime(l) {
        return Err(Error::InvalidModulus(l));
    }
    let n = f.len();
    if n == 0 {
        return Err(Error::InvalidParams("empty ring element".into()));
    }

    let mut r0 = vec![0i64; n + 1];
    r0[0] = l - 1;
    r0[n] = 1;
    let mut r1: Vec<i64> = f.coeffs.iter().map(|c| c.rem_euclid(l)).collect();
    trim(&mut r1);
    let mut t0: Vec<i64> = Vec::new();
    let mut t1: Vec<i64> = vec![1];

    while !r1.is_empty() {
        let (quot, rem) = poly_divmod(&r0, &r1, l);
        let t2 = poly_sub(&t0, &poly_mul(&quot, &t1, l), l);
        r0 = std::mem::replace(&mut r1, rem);
        t0 = std::mem::replace(&mut t1, t2);
    }

    // r0 is now gcd(f, x^N − 1) up to a unit.
    if r0.len() != 1 {
        return Err(Error::NoInverse);
    }
    let unit_inv = scalar_inverse(r0[0], l);
    let mut coeffs = vec![0i64; n];
    for (c, t) in coeffs.iter_mut().zip(&t0) {
        *c = t * unit_inv % l;
    }
    RingElement::reduced(coeffs, l)
}

fn trim(p: &mut Vec<i64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

fn scalar_inverse(a: i64, l: i64) -> i64 {
    // l is prime, so a^(l−2) = a^{-1}.
    let mut result = 1i64;
    let mut base = a.rem_euclid(l);
    let mut exp = l - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % l;
        }
        base = base * base % l;
        exp >>= 1;
    }
    result
}

/// Long division of non-empty, trimmed residue vectors.
fn poly_divmod(num: &[i64], den: &[i64], l: i64) -> (Vec<i64>, Vec<i64>) {
    let mut rem = num.to_vec();
    trim(&mut rem);
    let dd = den.len() - 1;
    let lead_inv = scalar_inverse(den[dd], l);
    if rem.len() < den.len() {
        return (Vec::new(), rem);
    }
    let mut quot = vec![0i64; rem.len() - dd];
    while rem.len() >= den.len() {
        let shift = rem.len() - den.len();
        let coef = rem[rem.len() - 1] * lead_inv % l;
        quot[shift] = coef;
        for (k, &d) in den.iter().enumerate() {
            rem[shift + k] = (rem[shift + k] - coef * d).rem_euclid(l);
        }
        trim(&mut rem);
    }
    trim(&mut quot);
    (quot, rem)
}

fn poly_mul(a: &[i64], b: &[i64], l: i64) -> Vec<i64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % l;
        }
    }
    trim(&mut out);
    out
}

fn poly_sub(a: &[i64], b: &[i64], l: i64) -> Vec<i64> {
    let mut out = vec![0i64; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = (x - y).rem_euclid(l);
    }
    trim(&mut out);
    out
}

/// Fixed-weight ternary element: exactly `weight_plus` coefficients equal to
/// +1 and `weight_minus` equal to −1, at uniformly random distinct positions.
pub fn sample_ternary<R: RngCore + ?Sized>(
    weight_plus: usize,
    weight_minus: usize,
    n: usize,
    rng: &mut R,
) -> Result<RingElement> {
    let total = weight_plus + weight_minus;
    if total > n {
        return Err(Error::WeightOverflow { requested: total, n });
    }
    let mut coeffs = vec![0i64; n];
    // index::sample yields positions in random order, so the first
    // `weight_plus` of them are themselves a uniform subset.
    for (k, pos) in index::sample(rng, n, total).into_iter().enumerate() {
        coeffs[pos] = if k < weight_plus { 1 } else { -1 };
    }
    Ok(RingElement::from_coeffs(coeffs))
}
