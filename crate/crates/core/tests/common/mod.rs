//! Independent reference implementations. Apart from [`step_oracle`], which
//! drives the library and checks it, nothing here calls into the library's
//! arithmetic; everything works on plain coefficient vectors with residues
//! in `[0, m)`.

#![allow(dead_code)]

use bke_core::ntru::{self, PrivateKey};
use bke_core::{NtruParams, RingElement};

pub fn residues(e: &RingElement, m: i64) -> Vec<i64> {
    e.coeffs().iter().map(|c| c.rem_euclid(m)).collect()
}

pub fn modp(v: &[i64], m: i64) -> Vec<i64> {
    v.iter().map(|c| c.rem_euclid(m)).collect()
}

/// Textbook cyclic convolution: `c[(i + j) mod n] += a[i]·b[j]`.
pub fn oracle_mul(a: &[i64], b: &[i64], m: i64) -> Vec<i64> {
    let n = a.len();
    assert_eq!(n, b.len());
    let mut c = vec![0i128; n];
    for i in 0..n {
        for j in 0..n {
            c[(i + j) % n] += i128::from(a[i]) * i128::from(b[j]);
        }
    }
    c.into_iter().map(|x| x.rem_euclid(i128::from(m)) as i64).collect()
}

/// Centered representative in `(−m/2, m/2]`.
pub fn oracle_center(x: i64, m: i64) -> i64 {
    let r = x.rem_euclid(m);
    if r > m / 2 {
        r - m
    } else {
        r
    }
}

fn scalar_inverse(a: i64, m: i64) -> Option<i64> {
    let (mut r0, mut r1) = (m, a.rem_euclid(m));
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m))
}

/// Solves `f·F ≡ 1 (mod m)` as the circulant linear system
/// `A·F = e₀` with `A[k][j] = f[(k − j) mod n]`, by Gaussian elimination
/// with unit pivots. Works for prime and prime-power `m`.
pub fn oracle_inverse(f: &[i64], m: i64) -> Option<Vec<i64>> {
    let n = f.len();
    let mut a: Vec<Vec<i64>> = (0..n)
        .map(|k| {
            let mut row: Vec<i64> = (0..n).map(|j| f[(k + n - j) % n].rem_euclid(m)).collect();
            row.push(i64::from(k == 0));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| scalar_inverse(a[r][col], m).is_some())?;
        a.swap(col, pivot);
        let inv = scalar_inverse(a[col][col], m)?;
        for x in a[col].iter_mut() {
            *x = (*x * inv).rem_euclid(m);
        }
        for r in 0..n {
            if r != col && a[r][col] != 0 {
                let factor = a[r][col];
                for c in 0..=n {
                    a[r][c] = (a[r][c] - factor * a[col][c]).rem_euclid(m);
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n]).collect())
}

/// Deterministic xorshift so oracle inputs do not depend on the library's
/// samplers.
pub struct XorShift(pub u64);

impl XorShift {
    pub fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn below(&mut self, k: u64) -> u64 {
        self.next() % k
    }

    pub fn ternary(&mut self, n: usize) -> Vec<i64> {
        (0..n).map(|_| self.below(3) as i64 - 1).collect()
    }

    pub fn residues(&mut self, n: usize, m: i64) -> Vec<i64> {
        (0..n).map(|_| self.below(m as u64) as i64).collect()
    }
}

/// Runs encrypt then decrypt at the given key and checks every
/// intermediate against the oracle.
pub fn step_oracle(params: &NtruParams, sk: &PrivateKey, key: &RingElement, xs: &mut XorShift) -> bool {
    let (n, p, q) = (params.n, params.p, params.q);
    let m = xs.ternary(n);
    let b = {
        // Fixed weight drawn by the oracle's own generator.
        let mut v = vec![0i64; n];
        let mut placed = 0;
        while placed < 2 * params.weight_b {
            let i = xs.below(n as u64) as usize;
            if v[i] == 0 {
                v[i] = if placed < params.weight_b { 1 } else { -1 };
                placed += 1;
            }
        }
        v
    };
    let ct = ntru::encrypt_with_blinding(key, params, &RingElement::reduced(m.clone(), p).unwrap(), &RingElement::from_coeffs(b.clone()))
        .unwrap();
    let pb: Vec<i64> = b.iter().map(|x| p * x).collect();
    let c: Vec<i64> = oracle_mul(&residues(key, q), &pb, q)
        .iter()
        .zip(&m)
        .map(|(x, y)| (x + y).rem_euclid(q))
        .collect();
    assert_eq!(residues(ct.element(), q), c);

    let t = ntru::decrypt_trace(sk, &ct).unwrap();
    let product = oracle_mul(&c, &residues(sk.f(), q), q);
    assert_eq!(residues(&t.product, q), product);
    let lifted: Vec<i64> = product.iter().map(|&x| oracle_center(x, q)).collect();
    assert_eq!(t.lifted.coeffs(), &lifted[..]);
    let tau: Vec<i64> = lifted.iter().map(|x| x.rem_euclid(p)).collect();
    assert_eq!(residues(&t.tau, p), tau);
    let recovered = oracle_mul(&tau, &residues(sk.f_p(), p), p);
    assert_eq!(residues(&t.message, p), recovered);
    recovered == modp(&m, p)
}
