//! Truncated Laurent series in `q` with exact truncation-order tracking.
//!
//! A [`QSeries`] represents `sum c_n q^n` for `valuation <= n <= order`,
//! together with the guarantee that every coefficient in that window is
//! correct and nothing outside it is claimed. Order bookkeeping is
//! pessimistic: each operation returns the largest order at which all
//! result coefficients are provably correct, and reading past the order
//! is an error, never a silent zero.
//!
//! The zero series of order `N` is stored with an empty coefficient
//! vector and `valuation = N + 1`.

use crate::error::{Error, Result};
use crate::ring::CoeffRing;

/// A truncated Laurent series over a coefficient ring.
#[derive(Clone, Debug)]
pub struct QSeries<R: CoeffRing> {
    ring: R,
    /// Exponent of `coeffs[0]`; may be negative. For the zero series,
    /// `valuation = order + 1` and `coeffs` is empty.
    valuation: i64,
    coeffs: Vec<R::Elem>,
    /// Every coefficient of `q^n` with `n <= order` is correct.
    order: i64,
}

impl<R: CoeffRing> QSeries<R> {
    /// Canonical constructor: strips leading zeros, turning an all-zero
    /// window into the canonical zero-of-order form.
    pub(crate) fn from_parts(
        ring: R,
        valuation: i64,
        mut coeffs: Vec<R::Elem>,
        order: i64,
    ) -> Self {
        debug_assert!(
            order - valuation + 1 >= coeffs.len() as i64 || coeffs.is_empty(),
            "coefficient window larger than order allows"
        );
        let lead = coeffs.iter().position(|c| !ring.is_zero(c));
        match lead {
            Some(0) => QSeries {
                ring,
                valuation,
                coeffs,
                order,
            },
            Some(k) => {
                coeffs.drain(..k);
                QSeries {
                    ring,
                    valuation: valuation + k as i64,
                    coeffs,
                    order,
                }
            }
            None => QSeries {
                ring,
                valuation: order + 1,
                coeffs: Vec::new(),
                order,
            },
        }
    }

    /// The zero series known through `q^order`.
    pub fn zero(ring: R, order: i64) -> Self {
        QSeries {
            ring,
            valuation: order + 1,
            coeffs: Vec::new(),
            order,
        }
    }

    /// The constant series 1 known through `q^order`.
    pub fn one(ring: R, order: i64) -> Self {
        if order < 0 {
            return Self::zero(ring, order);
        }
        let mut coeffs = vec![ring.zero(); (order + 1) as usize];
        coeffs[0] = ring.one();
        QSeries {
            ring,
            valuation: 0,
            coeffs,
            order,
        }
    }

    /// `c * q^e + O(q^(order+1))`. Errors if the exponent lies past the
    /// requested order.
    pub fn monomial(ring: R, c: i64, e: i64, order: i64) -> Result<Self> {
        if e > order {
            return Err(Error::InvalidOrder { exponent: e, order });
        }
        if c == 0 {
            return Ok(Self::zero(ring, order));
        }
        let mut coeffs = vec![ring.zero(); (order - e + 1) as usize];
        coeffs[0] = ring.from_i64(c);
        Ok(QSeries {
            ring,
            valuation: e,
            coeffs,
            order,
        })
    }

    /// Build a series from signed-integer coefficients starting at
    /// `valuation`; the order is the exponent of the last entry.
    pub fn from_i64_coeffs(ring: R, valuation: i64, coeffs: &[i64]) -> Self {
        let order = valuation + coeffs.len() as i64 - 1;
        let elems = coeffs.iter().map(|&c| ring.from_i64(c)).collect();
        Self::from_parts(ring, valuation, elems, order)
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// Exponent of the lowest potentially nonzero term. For the zero
    /// series this is `order + 1`.
    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coeff(&self) -> Option<&R::Elem> {
        self.coeffs.first()
    }

    /// Coefficient of `q^n`. Reading past the tracked order is an
    /// insufficient-precision error.
    pub fn coeff(&self, n: i64) -> Result<R::Elem> {
        if n > self.order {
            return Err(Error::InsufficientPrecision {
                needed: n,
                have: self.order,
            });
        }
        Ok(self.get(n))
    }

    /// Coefficient of `q^n` for `n <= order`, zero below the valuation.
    fn get(&self, n: i64) -> R::Elem {
        debug_assert!(n <= self.order);
        if n < self.valuation {
            return self.ring.zero();
        }
        self.coeffs[(n - self.valuation) as usize].clone()
    }

    /// Nonzero terms `(exponent, coefficient)` in increasing exponent order.
    pub fn nonzero_terms(&self) -> impl Iterator<Item = (i64, &R::Elem)> {
        let v = self.valuation;
        let ring = self.ring.clone();
        self.coeffs
            .iter()
            .enumerate()
            .filter(move |(_, c)| !ring.is_zero(c))
            .map(move |(i, c)| (v + i as i64, c))
    }

    fn assert_same_ring(&self, other: &Self) {
        assert!(
            self.ring.same_ring(&other.ring),
            "coefficient ring mismatch between series operands"
        );
    }

    /// Coefficient-wise sum; result order is the smaller of the two.
    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_ring(other);
        self.combine(other, false)
    }

    /// Coefficient-wise difference; result order is the smaller of the two.
    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same_ring(other);
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, subtract: bool) -> Self {
        let order = self.order.min(other.order);
        let val = self.valuation.min(other.valuation).min(order + 1);
        if order < val {
            return Self::zero(self.ring.clone(), order);
        }
        let len = (order - val + 1) as usize;
        let mut coeffs = vec![self.ring.zero(); len];
        for (e, c) in self.nonzero_terms() {
            if e > order {
                break;
            }
            coeffs[(e - val) as usize] = c.clone();
        }
        for (e, c) in other.nonzero_terms() {
            if e > order {
                break;
            }
            let slot = &mut coeffs[(e - val) as usize];
            *slot = if subtract {
                self.ring.sub(slot, c)
            } else {
                self.ring.add(slot, c)
            };
        }
        Self::from_parts(self.ring.clone(), val, coeffs, order)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| self.ring.neg(c)).collect();
        Self::from_parts(self.ring.clone(), self.valuation, coeffs, self.order)
    }

    /// Multiply every coefficient by the integer `c`.
    pub fn scale(&self, c: i64) -> Self {
        if c == 0 {
            return Self::zero(self.ring.clone(), self.order);
        }
        let ce = self.ring.from_i64(c);
        let coeffs = self.coeffs.iter().map(|x| self.ring.mul(x, &ce)).collect();
        Self::from_parts(self.ring.clone(), self.valuation, coeffs, self.order)
    }

    /// Cauchy product. The result order is
    /// `min(a.order + b.valuation, b.order + a.valuation)`, so truncation
    /// propagates correctly through Laurent shifts.
    ///
    /// The convolution iterates over the nonzero terms of the sparser
    /// operand on the outside, which makes products against pentagonal
    /// Euler factors O(N sqrt N) instead of O(N^2).
    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_ring(other);
        let order = (self.order + other.valuation).min(other.order + self.valuation);
        let val = self.valuation + other.valuation;
        if self.is_zero() || other.is_zero() || order < val {
            return Self::zero(self.ring.clone(), order);
        }
        let len = (order - val + 1) as usize;
        let mut acc = vec![self.ring.zero(); len];

        let a_terms: Vec<(usize, &R::Elem)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.ring.is_zero(c))
            .collect();
        let b_terms: Vec<(usize, &R::Elem)> = other
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.ring.is_zero(c))
            .collect();
        let (outer, inner) = if a_terms.len() <= b_terms.len() {
            (&a_terms, &b_terms)
        } else {
            (&b_terms, &a_terms)
        };
        for &(i, ci) in outer {
            if i >= len {
                break;
            }
            for &(j, cj) in inner {
                let k = i + j;
                if k >= len {
                    break;
                }
                self.ring.mul_add_assign(&mut acc[k], ci, cj);
            }
        }
        Self::from_parts(self.ring.clone(), val, acc, order)
    }

    /// Multiplicative inverse. Requires a nonzero series whose leading
    /// coefficient is a unit of the ring. The inverse of a series with
    /// valuation `v` has valuation `-v` and order `order - 2v`.
    pub fn invert(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotInvertible("zero series".into()));
        }
        let lead = &self.coeffs[0];
        let lead_inv = self.ring.inv(lead).ok_or_else(|| {
            Error::NotInvertible(format!("leading coefficient {} is not a unit", lead))
        })?;
        let len = self.coeffs.len();
        // c[0] = 1/a0, c[n] = -(1/a0) * sum_{k>=1} a[k] c[n-k]; the sum
        // runs over the divisor's nonzero entries only.
        let div_terms: Vec<(usize, &R::Elem)> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| !self.ring.is_zero(c))
            .collect();
        let mut inv: Vec<R::Elem> = Vec::with_capacity(len);
        inv.push(lead_inv.clone());
        for n in 1..len {
            let mut s = self.ring.zero();
            for &(k, ak) in &div_terms {
                if k > n {
                    break;
                }
                self.ring.mul_add_assign(&mut s, ak, &inv[n - k]);
            }
            let c = self.ring.neg(&self.ring.mul(&lead_inv, &s));
            inv.push(c);
        }
        Ok(Self::from_parts(
            self.ring.clone(),
            -self.valuation,
            inv,
            self.order - 2 * self.valuation,
        ))
    }

    /// Integer power; negative exponents go through [`QSeries::invert`],
    /// and `pow_int(a, 0) = 1`.
    pub fn pow_int(&self, k: i64) -> Result<Self> {
        if k == 0 {
            return Ok(Self::one(self.ring.clone(), self.order));
        }
        let base = if k < 0 { self.invert()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut result: Option<Self> = None;
        let mut power = base;
        loop {
            if e & 1 == 1 {
                result = Some(match result {
                    Some(r) => r.mul(&power),
                    None => power.clone(),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            power = power.mul(&power);
        }
        Ok(result.expect("nonzero exponent"))
    }

    /// `q -> q^k` magnification: coefficient of `q^(kn)` in the result is
    /// the coefficient of `q^n` here. Exponents not divisible by `k` are
    /// provably zero, so the result order is `k*order + k - 1` (capped so
    /// the coefficient window stays allocatable; a shorter-than-possible
    /// order is still honest).
    pub fn subst_power(&self, k: i64) -> Self {
        const MAX_WINDOW: i64 = 1 << 23;
        assert!(k >= 1, "substitution power must be positive, got {}", k);
        let order = k
            .saturating_mul(self.order)
            .saturating_add(k - 1)
            .min(k.saturating_mul(self.valuation).saturating_add(MAX_WINDOW));
        if self.is_zero() {
            return Self::zero(self.ring.clone(), order);
        }
        let val = k * self.valuation;
        let len = (order - val + 1) as usize;
        let mut coeffs = vec![self.ring.zero(); len];
        for (e, c) in self.nonzero_terms() {
            let slot = (e - self.valuation) * k;
            if slot < len as i64 {
                coeffs[slot as usize] = c.clone();
            }
        }
        Self::from_parts(self.ring.clone(), val, coeffs, order)
    }

    /// `q -> -q`: multiplies the coefficient of `q^n` by `(-1)^n`.
    pub fn negate_q(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if (self.valuation + i as i64).rem_euclid(2) == 1 {
                    self.ring.neg(c)
                } else {
                    c.clone()
                }
            })
            .collect();
        Self::from_parts(self.ring.clone(), self.valuation, coeffs, self.order)
    }

    /// Arithmetic-progression extraction: result coefficient of `q^n` is
    /// the coefficient of `q^(mn+j)` here. Works on Laurent input; the
    /// result order is `floor((order - j)/m)`.
    pub fn extract_ap(&self, m: i64, j: i64) -> Self {
        assert!(m >= 1 && (0..m).contains(&j), "need 0 <= j < m");
        let order = (self.order - j).div_euclid(m);
        if self.is_zero() {
            return Self::zero(self.ring.clone(), order);
        }
        let val = ceil_div(self.valuation - j, m);
        if order < val {
            return Self::zero(self.ring.clone(), order);
        }
        let coeffs = (val..=order).map(|n| self.get(m * n + j)).collect();
        Self::from_parts(self.ring.clone(), val, coeffs, order)
    }

    /// Huffing operator: keeps only exponents divisible by `k`, in place
    /// (exponents are not re-indexed). Negative exponents divisible by
    /// `k` survive.
    pub fn huff(&self, k: i64) -> Self {
        assert!(k >= 1, "huffing index must be positive, got {}", k);
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if (self.valuation + i as i64).rem_euclid(k) == 0 {
                    c.clone()
                } else {
                    self.ring.zero()
                }
            })
            .collect();
        Self::from_parts(self.ring.clone(), self.valuation, coeffs, self.order)
    }

    /// Shift exponents by `e` (multiply by the exact monomial `q^e`).
    pub fn shift_exp(&self, e: i64) -> Self {
        if self.is_zero() {
            return Self::zero(self.ring.clone(), self.order + e);
        }
        QSeries {
            ring: self.ring.clone(),
            valuation: self.valuation + e,
            coeffs: self.coeffs.clone(),
            order: self.order + e,
        }
    }

    /// Drop all knowledge beyond `q^n`. Cannot extend a series.
    pub fn truncate(&self, n: i64) -> Result<Self> {
        if n > self.order {
            return Err(Error::InsufficientPrecision {
                needed: n,
                have: self.order,
            });
        }
        if n < self.valuation {
            return Ok(Self::zero(self.ring.clone(), n));
        }
        let coeffs = self.coeffs[..(n - self.valuation + 1) as usize].to_vec();
        Ok(Self::from_parts(
            self.ring.clone(),
            self.valuation,
            coeffs,
            n,
        ))
    }

    /// Compare all coefficients of `q^n` for `n <= upto`. Both series
    /// must be tracked at least that far.
    pub fn eq_to_order(&self, other: &Self, upto: i64) -> Result<bool> {
        Ok(self.first_difference(other, upto)?.is_none())
    }

    /// First exponent `<= upto` where the two series disagree, together
    /// with both coefficient values.
    pub fn first_difference(
        &self,
        other: &Self,
        upto: i64,
    ) -> Result<Option<(i64, R::Elem, R::Elem)>> {
        self.assert_same_ring(other);
        let have = self.order.min(other.order);
        if upto > have {
            return Err(Error::InsufficientPrecision { needed: upto, have });
        }
        let lo = self.valuation.min(other.valuation);
        for n in lo..=upto {
            let a = self.get(n);
            let b = other.get(n);
            if a != b {
                return Ok(Some((n, a, b)));
            }
        }
        Ok(None)
    }
}

impl QSeries<crate::ring::Exact> {
    /// Reduce every coefficient modulo `m`, producing the Modular-backend
    /// view of the same series.
    pub fn reduce_mod(&self, m: u64) -> QSeries<crate::ring::Modular> {
        let ring = crate::ring::Modular::new(m);
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| crate::ring::reduce_bigint(c, m))
            .collect();
        QSeries::from_parts(ring, self.valuation, coeffs, self.order)
    }
}

pub(crate) fn ceil_div(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    a.div_euclid(b) + if a.rem_euclid(b) != 0 { 1 } else { 0 }
}
