//! Constructors for the named series of the engine: Euler products
//! `f_k = (q^k; q^k)_inf`, general Pochhammer products, Ramanujan theta
//! functions `f(a,b)` with the `phi`/`psi` specializations, the
//! Rogers-Ramanujan quotient `R(q)`, `lambda(q^k) = q^k f_k^4 f_{5k}^4`,
//! and the seven restricted-partition generating functions.
//!
//! `euler_f` expands through the pentagonal-number theorem, so the
//! factors stay sparse and eta-quotient assembly is O(N sqrt N) per
//! factor; the naive product `prod (1 - q^i)` exists only as a test
//! oracle.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::ring::CoeffRing;
use crate::series::QSeries;

/// `(q^k; q^k)_inf` to the given order, via the pentagonal expansion
/// `sum_j (-1)^j q^(k j(3j-1)/2)` over all integers `j`.
pub fn euler_f<R: CoeffRing>(ring: &R, k: i64, order: i64) -> QSeries<R> {
    assert!(k >= 1, "euler_f index must be positive, got {}", k);
    if order < 0 {
        return QSeries::zero(ring.clone(), order);
    }
    let mut coeffs = vec![ring.zero(); (order + 1) as usize];
    coeffs[0] = ring.one();
    let mut j: i64 = 1;
    loop {
        let g1 = k * j * (3 * j - 1) / 2;
        let g2 = k * j * (3 * j + 1) / 2;
        if g1 > order {
            break;
        }
        let sign = if j % 2 == 1 { -1 } else { 1 };
        coeffs[g1 as usize] = ring.add(&coeffs[g1 as usize], &ring.from_i64(sign));
        if g2 <= order {
            coeffs[g2 as usize] = ring.add(&coeffs[g2 as usize], &ring.from_i64(sign));
        }
        j += 1;
    }
    QSeries::from_parts(ring.clone(), 0, coeffs, order)
}

/// `(q^a; q^m)_inf = prod_{i>=0} (1 - q^(a+mi))` by direct product.
pub fn pochhammer<R: CoeffRing>(ring: &R, a: i64, m: i64, order: i64) -> QSeries<R> {
    assert!(a >= 1 && m >= 1, "pochhammer arguments must be positive");
    if order < 0 {
        return QSeries::zero(ring.clone(), order);
    }
    let mut coeffs = vec![ring.zero(); (order + 1) as usize];
    coeffs[0] = ring.one();
    let mut e = a;
    while e <= order {
        // multiply in place by (1 - q^e), descending so each factor is
        // applied exactly once
        for i in (e..=order).rev() {
            let t = coeffs[(i - e) as usize].clone();
            coeffs[i as usize] = ring.sub(&coeffs[i as usize], &t);
        }
        e += m;
    }
    QSeries::from_parts(ring.clone(), 0, coeffs, order)
}

/// One argument `+-q^e` of a Ramanujan theta function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThetaArg {
    /// +1 or -1.
    pub sign: i8,
    /// Exponent, at least 1.
    pub exponent: i64,
}

impl ThetaArg {
    pub fn new(sign: i8, exponent: i64) -> Self {
        assert!(sign == 1 || sign == -1, "theta argument sign must be +-1");
        assert!(exponent >= 1, "theta argument exponent must be >= 1");
        ThetaArg { sign, exponent }
    }
}

/// Ramanujan's theta function
/// `f(a,b) = sum_{k in Z} a^(k(k+1)/2) b^(k(k-1)/2)`.
///
/// Repeated exponents accumulate (e.g. `f(q,q)` hits `q^(k^2)` from both
/// `k` and `-k`).
pub fn theta_f<R: CoeffRing>(ring: &R, a: ThetaArg, b: ThetaArg, order: i64) -> QSeries<R> {
    if order < 0 {
        return QSeries::zero(ring.clone(), order);
    }
    let mut coeffs = vec![ring.zero(); (order + 1) as usize];
    // e(k) grows like (a.e + b.e) k^2 / 2, so a square-root window plus
    // slack covers every contributing k of either sign.
    let window = 3 + (2.0 * (order as f64 + 1.0)).sqrt() as i64 * 2;
    for k in -window..=window {
        let t1 = k * (k + 1) / 2;
        let t2 = k * (k - 1) / 2;
        let e = a.exponent * t1 + b.exponent * t2;
        if e < 0 || e > order {
            continue;
        }
        let mut sign = 1i64;
        if a.sign < 0 && t1 % 2 != 0 {
            sign = -sign;
        }
        if b.sign < 0 && t2 % 2 != 0 {
            sign = -sign;
        }
        coeffs[e as usize] = ring.add(&coeffs[e as usize], &ring.from_i64(sign));
    }
    QSeries::from_parts(ring.clone(), 0, coeffs, order)
}

/// `phi(+-q^k) = f(+-q^k, +-q^k) = 1 + 2 sum (+-1)^(n^2-ish) q^(k n^2)`.
pub fn phi<R: CoeffRing>(ring: &R, sign: i8, k: i64, order: i64) -> QSeries<R> {
    theta_f(ring, ThetaArg::new(sign, k), ThetaArg::new(sign, k), order)
}

/// `psi(q^k) = f(q^k, q^(3k))`, supported on triangular numbers.
pub fn psi<R: CoeffRing>(ring: &R, k: i64, order: i64) -> QSeries<R> {
    theta_f(ring, ThetaArg::new(1, k), ThetaArg::new(1, 3 * k), order)
}

/// Rogers-Ramanujan quotient
/// `R(q^k) = (q^k;q^(5k))(q^(4k);q^(5k)) / ((q^(2k);q^(5k))(q^(3k);q^(5k)))`.
pub fn rr_quotient<R: CoeffRing>(ring: &R, k: i64, order: i64) -> QSeries<R> {
    assert!(k >= 1);
    if order < 0 {
        return QSeries::zero(ring.clone(), order);
    }
    let num = pochhammer(ring, k, 5 * k, order).mul(&pochhammer(ring, 4 * k, 5 * k, order));
    let den = pochhammer(ring, 2 * k, 5 * k, order).mul(&pochhammer(ring, 3 * k, 5 * k, order));
    num.mul(
        &den.invert()
            .expect("Pochhammer products have unit constant term"),
    )
}

/// `lambda(q^k) = q^k f_k^4 f_{5k}^4`; valuation exactly `k`.
pub fn lambda_series<R: CoeffRing>(ring: &R, k: i64, order: i64) -> QSeries<R> {
    assert!(k >= 1);
    let spec = EtaQuotientSpec::new(1, k, &[(k, 4), (5 * k, 4)]);
    eta_quotient(ring, &spec, order).expect("eta factors are invertible")
}

/// Normal form for f-product expressions: an integer scalar, an explicit
/// power of `q`, and a finite exponent map `delta -> r_delta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaQuotientSpec {
    pub scalar: i64,
    pub qshift: i64,
    pub factors: BTreeMap<i64, i64>,
}

impl EtaQuotientSpec {
    /// Zero-exponent factors are dropped; indices must be positive.
    pub fn new(scalar: i64, qshift: i64, factors: &[(i64, i64)]) -> Self {
        let mut map = BTreeMap::new();
        for &(delta, r) in factors {
            assert!(
                delta >= 1,
                "eta factor index must be positive, got {}",
                delta
            );
            if r != 0 {
                let slot = map.entry(delta).or_insert(0);
                *slot += r;
                if *slot == 0 {
                    map.remove(&delta);
                }
            }
        }
        EtaQuotientSpec {
            scalar,
            qshift,
            factors: map,
        }
    }
}

/// `scalar * q^qshift * prod f_delta^(r_delta)` to the given order.
///
/// Positive powers multiply the sparse pentagonal factor in one at a
/// time; negative powers multiply by its inverse.
pub fn eta_quotient<R: CoeffRing>(
    ring: &R,
    spec: &EtaQuotientSpec,
    order: i64,
) -> Result<QSeries<R>> {
    let rel = order - spec.qshift;
    if rel < 0 || spec.scalar == 0 {
        return Ok(QSeries::zero(ring.clone(), order));
    }
    let mut acc = QSeries::one(ring.clone(), rel);
    for (&delta, &r) in &spec.factors {
        let f = euler_f(ring, delta, rel);
        if r > 0 {
            for _ in 0..r {
                acc = acc.mul(&f);
            }
        } else {
            let inv = f.invert()?;
            for _ in 0..(-r) {
                acc = acc.mul(&inv);
            }
        }
    }
    Ok(acc.shift_exp(spec.qshift).scale(spec.scalar))
}

/// The seven restricted-partition families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyName {
    Pstar,
    M,
    Tstar,
    A,
    B,
    K,
    L,
}

impl FamilyName {
    pub const ALL: [FamilyName; 7] = [
        FamilyName::Pstar,
        FamilyName::M,
        FamilyName::Tstar,
        FamilyName::A,
        FamilyName::B,
        FamilyName::K,
        FamilyName::L,
    ];

    /// The eta-quotient normal form of the family's generating function.
    pub fn spec(self) -> EtaQuotientSpec {
        match self {
            // f1^4 f5^4
            FamilyName::Pstar => EtaQuotientSpec::new(1, 0, &[(1, 4), (5, 4)]),
            // f2^5 f5^5 / (f1 f10)
            FamilyName::M => EtaQuotientSpec::new(1, 0, &[(2, 5), (5, 5), (1, -1), (10, -1)]),
            // f1^5 f10^5 / (f2 f5)
            FamilyName::Tstar => EtaQuotientSpec::new(1, 0, &[(1, 5), (10, 5), (2, -1), (5, -1)]),
            // f2^6 f7^6 / f1^2
            FamilyName::A => EtaQuotientSpec::new(1, 0, &[(2, 6), (7, 6), (1, -2)]),
            // f1^6 f14^4 / (f2^2 f7^2)
            FamilyName::B => EtaQuotientSpec::new(1, 0, &[(1, 6), (14, 4), (2, -2), (7, -2)]),
            // f1^2 f2^2 f7^2 f14^2
            FamilyName::K => EtaQuotientSpec::new(1, 0, &[(1, 2), (2, 2), (7, 2), (14, 2)]),
            // f1^5 f7^5 / (f2 f14)
            FamilyName::L => EtaQuotientSpec::new(1, 0, &[(1, 5), (7, 5), (2, -1), (14, -1)]),
        }
    }

    /// DSL rendering of the generating function.
    pub fn dsl(self) -> &'static str {
        match self {
            FamilyName::Pstar => "f1^4*f5^4",
            FamilyName::M => "f2^5*f5^5/(f1*f10)",
            FamilyName::Tstar => "f1^5*f10^5/(f2*f5)",
            FamilyName::A => "f2^6*f7^6/f1^2",
            FamilyName::B => "f1^6*f14^4/(f2^2*f7^2)",
            FamilyName::K => "f1^2*f2^2*f7^2*f14^2",
            FamilyName::L => "f1^5*f7^5/(f2*f14)",
        }
    }
}

impl std::fmt::Display for FamilyName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FamilyName::Pstar => "Pstar",
            FamilyName::M => "M",
            FamilyName::Tstar => "Tstar",
            FamilyName::A => "A",
            FamilyName::B => "B",
            FamilyName::K => "K",
            FamilyName::L => "L",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for FamilyName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "Pstar" => Ok(FamilyName::Pstar),
            "M" => Ok(FamilyName::M),
            "Tstar" => Ok(FamilyName::Tstar),
            "A" => Ok(FamilyName::A),
            "B" => Ok(FamilyName::B),
            "K" => Ok(FamilyName::K),
            "L" => Ok(FamilyName::L),
            _ => Err(format!("unknown family name {:?}", s)),
        }
    }
}

/// Generating function of the named family to the given order.
pub fn family_gf<R: CoeffRing>(ring: &R, name: FamilyName, order: i64) -> QSeries<R> {
    eta_quotient(ring, &name.spec(), order).expect("family denominators have unit leading term")
}
