use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Ring and sampling parameters.
///
/// Weights are counts *per sign*: a weight of `w` means `w` coefficients equal
/// to +1 and `w` equal to −1. The private polynomial `f` gets one extra +1 so
/// that `f(1) = 1`; a balanced `f` vanishes at 1 and is never invertible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NtruParams {
    pub n: usize,
    pub p: i64,
    pub q: i64,
    pub weight_fg: usize,
    pub weight_b: usize,
    pub weight_expander: usize,
    /// Wire identifier; 0 for ad-hoc parameter sets.
    pub id: u8,
}

impl NtruParams {
    pub const CUSTOM_ID: u8 = 0;

    pub fn new(
        n: usize,
        p: i64,
        q: i64,
        weight_fg: usize,
        weight_b: usize,
        weight_expander: usize,
    ) -> Result<Self> {
        let params = NtruParams {
            n,
            p,
            q,
            weight_fg,
            weight_b,
            weight_expander,
            id: Self::CUSTOM_ID,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.n < 2 {
            return bad(format!("degree {} too small", self.n));
        }
        if self.p < 2 || !is_prime(self.p) {
            return bad(format!("p = {} must be prime", self.p));
        }
        if self.q < 2 || prime_power_base(self.q).is_none() {
            return bad(format!("q = {} must be a prime power", self.q));
        }
        if gcd(self.p, self.q) != 1 {
            return bad(format!("gcd(p, q) != 1 for p = {}, q = {}", self.p, self.q));
        }
        for (name, w) in [
            ("weight_fg", self.weight_fg),
            ("weight_b", self.weight_b),
            ("weight_expander", self.weight_expander),
        ] {
            if w == 0 {
                return bad(format!("{name} must be positive"));
            }
        }
        if 2 * self.weight_fg + 1 > self.n {
            return bad(format!("weight_fg = {} too large for N = {}", self.weight_fg, self.n));
        }
        if 2 * self.weight_b > self.n || 2 * self.weight_expander > self.n {
            return bad(format!("sampling weights too large for N = {}", self.n));
        }
        Ok(())
    }

    pub fn preset(&self) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.id() == self.id)
    }

    pub fn with_weights(mut self, weight_fg: usize, weight_b: usize, weight_expander: usize) -> Result<Self> {
        self.weight_fg = weight_fg;
        self.weight_b = weight_b;
        self.weight_expander = weight_expander;
        self.validate()?;
        Ok(self)
    }

    pub fn label(&self) -> String {
        match self.preset() {
            Some(p) => p.name().to_string(),
            None => format!("({}, {})", self.n, self.q),
        }
    }
}

/// Shipped parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Ntru509,
    Ntru677,
    Ntru821,
    /// N = 17. Insecure; for tests and demos only.
    Toy17,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Ntru509, Preset::Ntru677, Preset::Ntru821, Preset::Toy17];
    pub const STANDARD: [Preset; 3] = [Preset::Ntru509, Preset::Ntru677, Preset::Ntru821];

    pub fn params(self) -> NtruParams {
        // (N, q, weight_fg, weight_b, weight_expander)
        let (n, q, fg, b, e) = match self {
            Preset::Ntru509 => (509, 2048, 509 / 3, 509 / 3, 2),
            Preset::Ntru677 => (677, 2048, 677 / 3, 677 / 3, 2),
            Preset::Ntru821 => (821, 4096, 821 / 3, 821 / 3, 3),
            Preset::Toy17 => (17, 1024, 4, 4, 2),
        };
        NtruParams {
            n,
            p: 3,
            q,
            weight_fg: fg,
            weight_b: b,
            weight_expander: e,
            id: self.id(),
        }
    }

    pub fn id(self) -> u8 {
        match self {
            Preset::Ntru509 => 1,
            Preset::Ntru677 => 2,
            Preset::Ntru821 => 3,
            Preset::Toy17 => 17,
        }
    }

    pub fn from_id(id: u8) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.id() == id)
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Ntru509 => "ntru509",
            Preset::Ntru677 => "ntru677",
            Preset::Ntru821 => "ntru821",
            Preset::Toy17 => "toy17",
        }
    }

    /// NIST category; 0 for the toy set.
    pub fn security_level(self) -> u8 {
        match self {
            Preset::Ntru509 => 1,
            Preset::Ntru677 => 3,
            Preset::Ntru821 => 5,
            Preset::Toy17 => 0,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown preset `{s}`")))
    }
}

pub(crate) fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

pub(crate) fn is_prime(n: i64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Returns `ℓ` when `q = ℓ^k` for a prime `ℓ` and `k ≥ 1`.
pub(crate) fn prime_power_base(q: i64) -> Option<i64> {
    if q < 2 {
        return None;
    }
    let base = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    while rest % base == 0 {
        rest /= base;
    }
    (rest == 1).then_some(base)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for preset in Preset::ALL {
            preset.params().validate().unwrap();
            assert_eq!(Preset::from_id(preset.id()), Some(preset));
            assert_eq!(preset.name().parse::<Preset>().unwrap(), preset);
        }
    }

    #[test]
    fn table_security_levels() {
        assert_eq!(Preset::Ntru509.security_level(), 1);
        assert_eq!(Preset::Ntru677.security_level(), 3);
        assert_eq!(Preset::Ntru821.security_level(), 5);
    }

    #[test]
    fn rejects_shared_factor() {
        assert!(NtruParams::new(7, 3, 81, 2, 2, 1).is_err());
        assert!(NtruParams::new(7, 4, 41, 2, 2, 1).is_err());
        assert!(NtruParams::new(7, 3, 40, 2, 2, 1).is_err());
        assert!(NtruParams::new(7, 3, 41, 4, 2, 1).is_err());
        assert!(NtruParams::new(7, 3, 41, 2, 2, 1).is_ok());
    }

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power_base(2048), Some(2));
        assert_eq!(prime_power_base(41), Some(41));
        assert_eq!(prime_power_base(81), Some(3));
        assert_eq!(prime_power_base(12), None);
    }
}
