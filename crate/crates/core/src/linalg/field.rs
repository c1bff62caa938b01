use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact field arithmetic with a runtime context (the modulus for 𝔽p).
pub trait Field {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Panics on zero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn from_int(&self, v: &BigInt) -> Self::Elem;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        assert!(!a.is_zero(), "inverse of zero");
        a.recip()
    }
    fn from_int(&self, v: &BigInt) -> BigRational {
        BigRational::from_integer(v.clone())
    }
}

/// 𝔽p for a prime p < 2⁶¹.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub const MAX_MODULUS: u64 = 1 << 61;

    pub fn new(p: u64) -> Result<Self> {
        if p >= Self::MAX_MODULUS || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mulmod(acc, base, self.p);
            }
            base = mulmod(base, base, self.p);
            exp >>= 1;
        }
        acc
    }
}

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mulmod(*a, *b, self.p)
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero");
        self.pow(*a, self.p - 2)
    }
    fn from_int(&self, v: &BigInt) -> u64 {
        v.mod_floor(&BigInt::from(self.p)).to_u64().expect("reduced residue")
    }
}

/// Deterministic Miller–Rabin, exact for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b, n);
            }
            b = mulmod(b, b, n);
            e >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A coefficient field chosen at runtime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldKind {
    Q,
    Fp(u64),
}

impl FieldKind {
    pub fn validate(self) -> Result<Self> {
        if let FieldKind::Fp(p) = self {
            PrimeField::new(p)?;
        }
        Ok(self)
    }
}

impl Serialize for FieldKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Q => f.write_str("Q"),
            FieldKind::Fp(p) => write!(f, "F{p}"),
        }
    }
}

/// Coefficient ring for homology: the integers or a field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Ring {
    Z,
    Q,
    Fp(u64),
}

impl Ring {
    pub fn field(self) -> Option<FieldKind> {
        match self {
            Ring::Z => None,
            Ring::Q => Some(FieldKind::Q),
            Ring::Fp(p) => Some(FieldKind::Fp(p)),
        }
    }
}

impl From<FieldKind> for Ring {
    fn from(f: FieldKind) -> Ring {
        match f {
            FieldKind::Q => Ring::Q,
            FieldKind::Fp(p) => Ring::Fp(p),
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Z => f.write_str("Z"),
            Ring::Q => f.write_str("Q"),
            Ring::Fp(p) => write!(f, "F{p}"),
        }
    }
}

impl From<Ring> for String {
    fn from(r: Ring) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for Ring {
    type Error = Error;
    fn try_from(s: String) -> Result<Ring> {
        s.parse()
    }
}

impl FromStr for Ring {
    type Err = Error;

    /// Accepts `z`, `q`, `fp:<p>` and the display forms `Z`, `Q`, `F<p>`.
    fn from_str(s: &str) -> Result<Ring> {
        let t = s.trim();
        let bad = || Error::Parse { line: 0, message: format!("unknown ring `{s}`") };
        match t {
            "z" | "Z" => Ok(Ring::Z),
            "q" | "Q" => Ok(Ring::Q),
            _ => {
                let digits = t
                    .strip_prefix("fp:")
                    .or_else(|| t.strip_prefix("Fp:"))
                    .or_else(|| t.strip_prefix('F'))
                    .ok_or_else(bad)?;
                let p: u64 = digits.parse().map_err(|_| bad())?;
                PrimeField::new(p)?;
                Ok(Ring::Fp(p))
            }
        }
    }
}

/// Runs `$body` with `$f` bound to a concrete field for `$kind`.
macro_rules! with_field {
    ($kind:expr, |$f:ident| $body:expr) => {
        match $kind {
            $crate::linalg::FieldKind::Q => {
                let $f = &$crate::linalg::Rationals;
                $body
            }
            $crate::linalg::FieldKind::Fp(p) => {
                let $f = &$crate::linalg::PrimeField::new(p)?;
                $body
            }
        }
    };
}
pub(crate) use with_field;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..50).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]);
        assert!(is_prime((1u64 << 61) - 1));
        assert!(!is_prime(3215031751));
        assert!(PrimeField::new(4).is_err());
        assert!(PrimeField::new((1u64 << 61) - 1).is_ok());
        assert!(PrimeField::new(2305843009213693951 + 2).is_err());
    }

    #[test]
    fn fp_inverse() {
        let f = PrimeField::new(101).unwrap();
        for a in 1..101 {
            assert_eq!(f.mul(&a, &f.inv(&a)), 1);
        }
        assert_eq!(f.from_int(&BigInt::from(-1)), 100);
    }

    #[test]
    fn ring_parsing() {
        assert_eq!("q".parse::<Ring>().unwrap(), Ring::Q);
        assert_eq!("fp:7".parse::<Ring>().unwrap(), Ring::Fp(7));
        assert_eq!("F2".parse::<Ring>().unwrap(), Ring::Fp(2));
        assert!("fp:9".parse::<Ring>().is_err());
        assert!("r".parse::<Ring>().is_err());
    }
}
