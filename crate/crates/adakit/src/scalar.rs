//! Exact scalars: arbitrary-precision rationals and prime fields.
//!
//! Every rank, kernel and hom-space dimension in this crate is computed over
//! one of these fields, never floating point.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::Serialize;
use std::fmt;

/// Ground field of an algebra: the rationals, or F_p for a prime p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FieldSpec {
    Rationals,
    Prime(u64),
}

impl FieldSpec {
    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Q(BigRational::zero()),
            FieldSpec::Prime(p) => Scalar::Fp { v: 0, p: *p },
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Q(BigRational::one()),
            FieldSpec::Prime(p) => Scalar::Fp { v: 1, p: *p },
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Q(BigRational::from_integer(BigInt::from(n))),
            FieldSpec::Prime(p) => {
                let m = n.rem_euclid(*p as i64) as u64;
                Scalar::Fp { v: m, p: *p }
            }
        }
    }

    pub fn from_ratio(&self, num: i64, den: i64) -> Option<Scalar> {
        if den == 0 {
            return None;
        }
        match self {
            FieldSpec::Rationals => Some(Scalar::Q(BigRational::new(
                BigInt::from(num),
                BigInt::from(den),
            ))),
            FieldSpec::Prime(_) => {
                let d = self.from_i64(den);
                let inv = d.inv()?;
                Some(&self.from_i64(num) * &inv)
            }
        }
    }

    /// Parses an exact scalar literal: an integer or `p/q` with sign on the numerator.
    pub fn parse_scalar(&self, s: &str) -> Option<Scalar> {
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().ok()?;
            let d: i64 = d.trim().parse().ok()?;
            self.from_ratio(n, d)
        } else {
            let n: i64 = s.trim().parse().ok()?;
            Some(self.from_i64(n))
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::Prime(p) => *p,
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::Prime(p) => write!(f, "F {}", p),
        }
    }
}

/// Exact field element. Fp values carry their modulus; mixing moduli is a bug
/// and panics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scalar {
    Q(BigRational),
    Fp { v: u64, p: u64 },
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc: u64 = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % p as u128) as u64;
        }
        b = (b as u128 * b as u128 % p as u128) as u64;
        e >>= 1;
    }
    acc
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_zero(),
            Scalar::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_one(),
            Scalar::Fp { v, .. } => *v == 1,
        }
    }

    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Q(_) => FieldSpec::Rationals,
            Scalar::Fp { p, .. } => FieldSpec::Prime(*p),
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        match self {
            Scalar::Q(q) => {
                if q.is_zero() {
                    None
                } else {
                    Some(Scalar::Q(q.recip()))
                }
            }
            Scalar::Fp { v, p } => {
                if *v == 0 {
                    None
                } else {
                    Some(Scalar::Fp {
                        v: pow_mod(*v, p - 2, *p),
                        p: *p,
                    })
                }
            }
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Q(q) => Scalar::Q(-q),
            Scalar::Fp { v, p } => Scalar::Fp {
                v: if *v == 0 { 0 } else { p - v },
                p: *p,
            },
        }
    }

    /// Image in F_p. None when a denominator vanishes mod p.
    pub fn reduce_mod(&self, p: u64) -> Option<u64> {
        match self {
            Scalar::Fp { v, p: q } => {
                if *q == p {
                    Some(*v)
                } else {
                    None
                }
            }
            Scalar::Q(r) => {
                let pm = BigInt::from(p);
                let num = ((r.numer() % &pm) + &pm) % &pm;
                let den = ((r.denom() % &pm) + &pm) % &pm;
                let num: u64 = num.try_into().ok()?;
                let den: u64 = den.try_into().ok()?;
                if den == 0 {
                    return None;
                }
                Some((num as u128 * pow_mod(den, p - 2, p) as u128 % p as u128) as u64)
            }
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $m:ident, $qop:tt) => {
        impl std::ops::$trait for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a $qop b),
                    (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, p: p2 }) => {
                        assert_eq!(p, p2, "prime field modulus mismatch");
                        let pw = *p as u128;
                        let (a, b) = (*a as u128, *b as u128);
                        let v = match stringify!($qop) {
                            "+" => (a + b) % pw,
                            "-" => (a + pw - b) % pw,
                            "*" => a * b % pw,
                            _ => unreachable!(),
                        } as u64;
                        Scalar::Fp { v, p: *p }
                    }
                    _ => panic!("mixed-field arithmetic"),
                }
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Fp { v, .. } => write!(f, "{}", v),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Tiny deterministic xorshift generator for randomized-but-reproducible
/// searches (isomorphism testing, splitting combinations).
pub struct DetRng(u64);

impl DetRng {
    pub fn new(seed: u64) -> Self {
        DetRng(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Small signed integer in [-bound, bound].
    pub fn small_int(&mut self, bound: u64) -> i64 {
        let span = 2 * bound + 1;
        (self.next_u64() % span) as i64 - bound as i64
    }
}

impl Scalar {
    pub fn abs_height(&self) -> usize {
        match self {
            Scalar::Q(q) => q.numer().abs().to_string().len() + q.denom().to_string().len(),
            Scalar::Fp { .. } => 1,
        }
    }

    pub fn is_negative_display(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_negative(),
            Scalar::Fp { .. } => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_arithmetic_is_exact() {
        let f = FieldSpec::Rationals;
        let a = f.parse_scalar("2/6").unwrap();
        let b = f.parse_scalar("1/3").unwrap();
        assert_eq!(a, b);
        let c = &a + &b;
        assert_eq!(c, f.parse_scalar("2/3").unwrap());
        assert_eq!(c.to_string(), "2/3");
        assert_eq!(f.parse_scalar("-4/2").unwrap().to_string(), "-2");
    }

    #[test]
    fn prime_field_inverse() {
        let f = FieldSpec::Prime(7);
        let a = f.from_i64(3);
        let inv = a.inv().unwrap();
        assert!((&a * &inv).is_one());
        assert!(f.from_i64(0).inv().is_none());
    }

    #[test]
    fn reduction_mod_p() {
        let f = FieldSpec::Rationals;
        let a = f.parse_scalar("3/4").unwrap();
        let r = a.reduce_mod(7).unwrap();
        // 3 * 4^{-1} = 3 * 2 = 6 mod 7
        assert_eq!(r, 6);
        let b = f.parse_scalar("1/7").unwrap();
        assert!(b.reduce_mod(7).is_none());
    }

    #[test]
    fn det_rng_is_deterministic() {
        let mut r1 = DetRng::new(0xADA);
        let mut r2 = DetRng::new(0xADA);
        for _ in 0..10 {
            assert_eq!(r1.next_u64(), r2.next_u64());
        }
    }
}
