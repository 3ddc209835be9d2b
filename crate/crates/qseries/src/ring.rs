//! Coefficient rings behind the series type.
//!
//! Two backends share one interface:
//! - [`Exact`]: arbitrary-precision integers, used for identity
//!   verification and signed scalar relations;
//! - [`Modular`]: residues modulo a word-sized `m`, used for long
//!   congruence scans where coefficient magnitudes would otherwise
//!   explode.
//!
//! Series code is generic over [`CoeffRing`]; concrete aliases live at
//! the crate root.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// Ring of coefficients for a [`crate::QSeries`].
///
/// The ring value itself carries any context an element needs (the
/// modulus, for [`Modular`]); elements are plain data.
pub trait CoeffRing: Clone + std::fmt::Debug {
    type Elem: Clone + PartialEq + std::fmt::Debug + std::fmt::Display;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, value: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// `acc += a * b`, the convolution kernel.
    fn mul_add_assign(&self, acc: &mut Self::Elem, a: &Self::Elem, b: &Self::Elem);

    /// Multiplicative inverse, if `a` is a unit.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    /// Whether two ring values describe the same ring (same modulus).
    fn same_ring(&self, other: &Self) -> bool;
}

/// Arbitrary-precision integer coefficients.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Exact;

impl CoeffRing for Exact {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }

    fn one(&self) -> BigInt {
        BigInt::one()
    }

    fn from_i64(&self, value: i64) -> BigInt {
        BigInt::from(value)
    }

    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }

    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }

    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }

    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }

    fn mul_add_assign(&self, acc: &mut BigInt, a: &BigInt, b: &BigInt) {
        *acc += a * b;
    }

    fn inv(&self, a: &BigInt) -> Option<BigInt> {
        // Units of Z only; anything else would leave the integer ring.
        if a.is_one() || (-a).is_one() {
            Some(a.clone())
        } else {
            None
        }
    }

    fn same_ring(&self, _other: &Self) -> bool {
        true
    }
}

/// Coefficients in Z/mZ for a word-sized modulus `m >= 2`.
///
/// Elements are stored reduced to `[0, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Modular {
    modulus: u64,
}

impl Modular {
    pub fn new(modulus: u64) -> Self {
        assert!(modulus >= 2, "modulus must be at least 2, got {}", modulus);
        assert!(
            modulus <= i64::MAX as u64,
            "modulus must fit in a signed word"
        );
        Modular { modulus }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

impl CoeffRing for Modular {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1 % self.modulus
    }

    fn from_i64(&self, value: i64) -> u64 {
        (value as i128).rem_euclid(self.modulus as i128) as u64
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.modulus - *a
        }
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.modulus as u128) as u64
    }

    fn mul_add_assign(&self, acc: &mut u64, a: &u64, b: &u64) {
        *acc = self.add(acc, &self.mul(a, b));
    }

    fn inv(&self, a: &u64) -> Option<u64> {
        // Extended Euclid; a is a unit iff gcd(a, m) = 1.
        let (mut r0, mut r1) = (self.modulus as i128, *a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        if r0 != 1 {
            return None;
        }
        Some(t0.rem_euclid(self.modulus as i128) as u64)
    }

    fn same_ring(&self, other: &Self) -> bool {
        self.modulus == other.modulus
    }
}

/// Coefficient backend selector used by evaluation entry points and the
/// CLI; dispatches to [`Exact`] or [`Modular`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoefficientMode {
    Exact,
    Modular(u64),
}

impl std::fmt::Display for CoefficientMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoefficientMode::Exact => write!(f, "exact"),
            CoefficientMode::Modular(m) => write!(f, "mod:{}", m),
        }
    }
}

/// Reduce an exact integer into `[0, m)`.
pub fn reduce_bigint(a: &BigInt, m: u64) -> u64 {
    let r = a.mod_floor(&BigInt::from(m));
    // mod_floor of a positive modulus is nonnegative and < m.
    let (_, digits) = r.to_u64_digits();
    match digits.len() {
        0 => 0,
        1 => digits[0],
        _ => unreachable!("residue below a u64 modulus"),
    }
}
