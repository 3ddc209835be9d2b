//! Valence-bound proofs for identities between weight-0 eta quotients
//! on Gamma_0(N).
//!
//! The strategy: flatten `lhs - rhs` into a sum of q-shifted f-products,
//! divide by the term with the smallest leading exponent so every ratio
//! is a candidate weight-0 modular function, check the Ligozat/Newman
//! modularity conditions (integrality, weight, quadratic character) at
//! the least admissible level, bound the total pole order away from
//! infinity through exact rational cusp orders, and then verify that the
//! series vanishes strictly past that bound. A nonzero modular function
//! has as many zeros as poles on the compactified curve, so vanishing at
//! infinity past the pole budget forces the function to be identically
//! zero and upgrades the finite check to a proof.
//!
//! When the quadratic character is nontrivial but shared by every term,
//! the squared identity is proven instead (`G^2 = 0` forces `G = 0` over
//! the integers). Mixed characters, mixed weights, stray q-powers, or
//! non-eta atoms (theta functions, the Rogers-Ramanujan quotient, the
//! dissection operators) make the method inapplicable and are reported
//! as such, never as a proof.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};

use crate::catalog::IdentityEntry;
use crate::error::Result;
use crate::expr::{eval_exact, Expr};

// Arithmetic helpers -------------------------------------------------------

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Positive divisors in increasing order.
pub fn divisors(n: i64) -> Vec<i64> {
    assert!(n >= 1);
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

fn euler_phi(n: i64) -> i64 {
    assert!(n >= 1);
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Index of Gamma_0(N) in the modular group: `N prod_{p|N} (1 + 1/p)`.
pub fn index_gamma0(n: i64) -> i64 {
    assert!(n >= 1);
    let mut index = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            index = index / p * (p + 1);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        index = index / m * (m + 1);
    }
    index
}

/// Sturm bound `ceil(k * [SL2(Z) : Gamma_0(N)] / 12)` for even weight
/// `k >= 0`; kept for positive-weight cross-checks.
pub fn sturm_bound(weight: i64, n: i64) -> i64 {
    assert!(
        weight >= 0 && weight % 2 == 0,
        "weight must be even and nonnegative"
    );
    let idx = index_gamma0(n);
    (weight * idx + 11) / 12
}

// Cusps ---------------------------------------------------------------------

/// A cusp a/c of Gamma_0(N) in lowest terms; infinity is 1/0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cusp {
    pub numer: i64,
    pub denom: i64,
}

impl Cusp {
    pub fn infinity() -> Self {
        Cusp { numer: 1, denom: 0 }
    }

    pub fn is_infinity(&self) -> bool {
        self.denom == 0
    }
}

impl std::fmt::Display for Cusp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_infinity() {
            write!(f, "inf")
        } else {
            write!(f, "{}/{}", self.numer, self.denom)
        }
    }
}

/// Number of cusps of Gamma_0(N): `sum_{c|N} phi(gcd(c, N/c))`.
pub fn cusp_count_gamma0(n: i64) -> i64 {
    divisors(n)
        .into_iter()
        .map(|c| euler_phi(gcd(c, n / c)))
        .sum()
}

/// Enumerate inequivalent cusp representatives of Gamma_0(N).
///
/// Infinity stands for the class with denominator N; for each divisor
/// c < N the classes d/c are indexed by d mod gcd(c, N/c) with
/// gcd(d, c) = 1.
pub fn cusps_gamma0(n: i64) -> Vec<Cusp> {
    assert!(n >= 1);
    let mut cusps = vec![Cusp::infinity()];
    for c in divisors(n) {
        if c >= n {
            continue;
        }
        let g = gcd(c, n / c);
        let mut seen = Vec::new();
        for d in 0..c.max(1) {
            if c > 1 && gcd(d, c) != 1 {
                continue;
            }
            let r = d % g.max(1);
            if !seen.contains(&r) {
                seen.push(r);
                cusps.push(Cusp { numer: d, denom: c });
            }
        }
    }
    debug_assert_eq!(cusps.len() as i64, cusp_count_gamma0(n));
    cusps
}

/// Width of the cusp class with denominator `c` on Gamma_0(N):
/// `N / gcd(c^2, N)`.
///
/// Worked table for N = 8 (sum of width * multiplicity = index 12):
///
/// ```text
///   c | gcd(c^2,8) | width | multiplicity phi(gcd(c, 8/c))
///   1 |     1      |   8   | 1     (the cusp 0)
///   2 |     4      |   2   | 1
///   4 |     8      |   1   | 1
///   8 |     8      |   1   | 1     (the cusp infinity)
/// ```
pub fn cusp_width(c: i64, n: i64) -> i64 {
    assert!(n >= 1 && c >= 1 && n % c == 0);
    n / gcd(c * c, n)
}

/// Multiplicity of the cusp class with denominator `c`: the number of
/// inequivalent cusps a/c sharing that denominator.
pub fn cusp_multiplicity(c: i64, n: i64) -> i64 {
    euler_phi(gcd(c, n / c))
}

/// Order of vanishing of `prod f_delta^(r_delta)` at the cusp class with
/// denominator `c | N`, in the local variable at the cusp scaled so that
/// the order at infinity (c = N) is `sum delta r_delta / 24`.
///
/// The degree-invariant order (the one whose sum over cusps vanishes for
/// a weight-0 quotient) is this value times the cusp width; see
/// [`cusp_order_invariant`].
pub fn cusp_order(factors: &BTreeMap<i64, i64>, c: i64, n: i64) -> Ratio<i64> {
    cusp_order_invariant(factors, c, n) / Ratio::from_integer(cusp_width(c, n))
}

/// Ligozat's order formula in divisor-degree units:
/// `(N / (24 gcd(c, N/c) c)) * sum_delta gcd(c, delta)^2 r_delta / delta`.
pub fn cusp_order_invariant(factors: &BTreeMap<i64, i64>, c: i64, n: i64) -> Ratio<i64> {
    assert!(n >= 1 && c >= 1 && n % c == 0);
    let mut sum = Ratio::from_integer(0);
    for (&delta, &r) in factors {
        assert!(
            n % delta == 0,
            "factor index {} does not divide level {}",
            delta,
            n
        );
        let g = gcd(c, delta);
        sum += Ratio::new(g * g * r, delta);
    }
    sum * Ratio::new(n, 24 * gcd(c, n / c) * c)
}

// Flattening expressions into eta terms -------------------------------------

/// One q-shifted f-product: `coeff * q^shift * prod f_delta^(r_delta)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaTerm {
    pub coeff: BigRational,
    pub shift: i64,
    pub factors: BTreeMap<i64, i64>,
}

impl EtaTerm {
    fn constant(c: BigRational) -> Self {
        EtaTerm {
            coeff: c,
            shift: 0,
            factors: BTreeMap::new(),
        }
    }

    /// `sum delta * r_delta`.
    fn weighted_degree(&self) -> i64 {
        self.factors.iter().map(|(&d, &r)| d * r).sum()
    }

    /// `sum r_delta` (twice the modular weight).
    fn exponent_sum(&self) -> i64 {
        self.factors.values().sum()
    }

    /// Exponent of the true eta-product normalization:
    /// `shift - weighted_degree / 24`, as a rational. Two terms are
    /// commensurable as modular objects only if these agree.
    fn eta_shift(&self) -> Ratio<i64> {
        Ratio::from_integer(self.shift) - Ratio::new(self.weighted_degree(), 24)
    }

    fn mul(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        for (&d, &r) in &other.factors {
            let slot = factors.entry(d).or_insert(0);
            *slot += r;
            if *slot == 0 {
                factors.remove(&d);
            }
        }
        EtaTerm {
            coeff: &self.coeff * &other.coeff,
            shift: self.shift + other.shift,
            factors,
        }
    }

    fn div(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        for (&d, &r) in &other.factors {
            let slot = factors.entry(d).or_insert(0);
            *slot -= r;
            if *slot == 0 {
                factors.remove(&d);
            }
        }
        EtaTerm {
            coeff: &self.coeff / &other.coeff,
            shift: self.shift - other.shift,
            factors,
        }
    }

    fn pow(&self, k: i64) -> Self {
        let mut factors = BTreeMap::new();
        for (&d, &r) in &self.factors {
            if r * k != 0 {
                factors.insert(d, r * k);
            }
        }
        EtaTerm {
            coeff: rational_pow(&self.coeff, k),
            shift: self.shift * k,
            factors,
        }
    }

    fn neg(&self) -> Self {
        EtaTerm {
            coeff: -&self.coeff,
            shift: self.shift,
            factors: self.factors.clone(),
        }
    }
}

impl std::fmt::Display for EtaTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.coeff)?;
        if self.shift != 0 {
            write!(f, "*q^{}", self.shift)?;
        }
        for (&d, &r) in &self.factors {
            if r == 1 {
                write!(f, "*f{}", d)?;
            } else {
                write!(f, "*f{}^{}", d, r)?;
            }
        }
        Ok(())
    }
}

fn rational_pow(c: &BigRational, k: i64) -> BigRational {
    let mut acc = BigRational::one();
    let base = if k < 0 { c.recip() } else { c.clone() };
    for _ in 0..k.unsigned_abs() {
        acc *= &base;
    }
    acc
}

fn merge_terms(terms: Vec<EtaTerm>) -> Vec<EtaTerm> {
    let mut merged: BTreeMap<(i64, BTreeMap<i64, i64>), BigRational> = BTreeMap::new();
    for t in terms {
        let key = (t.shift, t.factors.clone());
        *merged.entry(key).or_insert_with(BigRational::zero) += &t.coeff;
    }
    merged
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|((shift, factors), coeff)| EtaTerm {
            coeff,
            shift,
            factors,
        })
        .collect()
}

/// Flatten an expression into a finite sum of q-shifted f-products, or
/// explain why it is not one.
pub fn eta_terms(e: &Expr) -> std::result::Result<Vec<EtaTerm>, String> {
    let terms = flatten(e)?;
    Ok(merge_terms(terms))
}

fn flatten(e: &Expr) -> std::result::Result<Vec<EtaTerm>, String> {
    match e {
        Expr::Int(0) => Ok(Vec::new()),
        Expr::Int(c) => Ok(vec![EtaTerm::constant(BigRational::from_integer(
            BigInt::from(*c),
        ))]),
        Expr::Q => Ok(vec![EtaTerm {
            coeff: BigRational::one(),
            shift: 1,
            factors: BTreeMap::new(),
        }]),
        Expr::EtaF(k) => Ok(vec![EtaTerm {
            coeff: BigRational::one(),
            shift: 0,
            factors: BTreeMap::from([(*k, 1)]),
        }]),
        Expr::Lam { k } => Ok(vec![EtaTerm {
            coeff: BigRational::one(),
            shift: *k,
            factors: BTreeMap::from([(*k, 4), (5 * k, 4)]),
        }]),
        Expr::Neg(x) => Ok(flatten(x)?.into_iter().map(|t| t.neg()).collect()),
        Expr::Add(a, b) => {
            let mut terms = flatten(a)?;
            terms.extend(flatten(b)?);
            Ok(terms)
        }
        Expr::Sub(a, b) => {
            let mut terms = flatten(a)?;
            terms.extend(flatten(b)?.into_iter().map(|t| t.neg()));
            Ok(terms)
        }
        Expr::Mul(a, b) => {
            let ta = flatten(a)?;
            let tb = flatten(b)?;
            let mut out = Vec::with_capacity(ta.len() * tb.len());
            for x in &ta {
                for y in &tb {
                    out.push(x.mul(y));
                }
            }
            Ok(out)
        }
        Expr::Div(a, b) => {
            let ta = flatten(a)?;
            let tb = merge_terms(flatten(b)?);
            if tb.len() != 1 {
                return Err("division by a sum of f-products".into());
            }
            Ok(ta.into_iter().map(|t| t.div(&tb[0])).collect())
        }
        Expr::Pow(a, k) => {
            let ta = merge_terms(flatten(a)?);
            match (ta.len(), *k) {
                (_, 0) => Ok(vec![EtaTerm::constant(BigRational::one())]),
                (_, 1) => Ok(ta),
                (1, k) => Ok(vec![ta[0].pow(k)]),
                (_, k) if (2..=6).contains(&k) => {
                    let mut acc = ta.clone();
                    for _ in 1..k {
                        let mut next = Vec::new();
                        for x in &acc {
                            for y in &ta {
                                next.push(x.mul(y));
                            }
                        }
                        acc = merge_terms(next);
                    }
                    Ok(acc)
                }
                _ => Err("power of a sum of f-products".into()),
            }
        }
        Expr::SubstPow { k, inner } => Ok(flatten(inner)?
            .into_iter()
            .map(|t| EtaTerm {
                coeff: t.coeff,
                shift: t.shift * k,
                factors: t.factors.iter().map(|(&d, &r)| (d * k, r)).collect(),
            })
            .collect()),
        Expr::Phi { .. } => Err("contains a phi atom, not an f-product".into()),
        Expr::Psi { .. } => Err("contains a psi atom, not an f-product".into()),
        Expr::Rrq { .. } => Err("contains an R(q) atom, not an f-product".into()),
        Expr::Theta { .. } => Err("contains a theta atom, not an f-product".into()),
        Expr::Huff { .. } => Err("contains the huffing operator".into()),
        Expr::ExtractAp { .. } => Err("contains arithmetic-progression extraction".into()),
        Expr::NegQ(_) => Err("contains the q -> -q substitution".into()),
    }
}

/// Squarefree part of `prod delta^(r_delta)` via prime exponent parity;
/// the quadratic character of a weight-0 eta quotient is trivial exactly
/// when this is 1.
fn squarefree_part(factors: &BTreeMap<i64, i64>) -> i64 {
    let mut parity: BTreeMap<i64, i64> = BTreeMap::new();
    for (&delta, &r) in factors {
        let mut m = delta;
        let mut p = 2;
        while p * p <= m {
            while m % p == 0 {
                *parity.entry(p).or_insert(0) += r;
                m /= p;
            }
            p += 1;
        }
        if m > 1 {
            *parity.entry(m).or_insert(0) += r;
        }
    }
    parity
        .into_iter()
        .filter(|(_, e)| e.rem_euclid(2) == 1)
        .map(|(p, _)| p)
        .product()
}

// Certificates ---------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofForm {
    /// The identity's term ratios are modular functions directly.
    Direct,
    /// Shared nontrivial character; the squared identity was proven.
    Squared,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RigorVerdict {
    Proven,
    /// The method does not apply; the stated reason explains the failed
    /// hypothesis. Never claims anything about the identity's truth.
    NotApplicable {
        reason: String,
    },
    /// The coefficient check found a nonzero term, so the identity is
    /// false; included for honest reporting of planted defects.
    Refuted {
        exponent: i64,
    },
}

/// Per-cusp-class row of the certificate table.
#[derive(Clone, Debug)]
pub struct CuspRow {
    /// Cusp denominator c | N (c = N is the cusp at infinity).
    pub denom: i64,
    pub width: i64,
    pub multiplicity: i64,
    /// Minimum over all normalized terms of the local-variable order.
    pub min_order: Ratio<i64>,
}

#[derive(Clone, Debug)]
pub struct RigorCertificate {
    pub name: String,
    pub level: i64,
    pub form: ProofForm,
    /// Rendering of the normalization divisor.
    pub reference: String,
    pub cusp_table: Vec<CuspRow>,
    /// Bound on the total pole order away from infinity of the
    /// normalized combination, in divisor-degree units.
    pub pole_bound: i64,
    /// The q-exponent through which `lhs - rhs` was verified to vanish.
    pub checked_through: i64,
    /// Vanishing order of the normalized combination certified by the
    /// check; PROVEN requires this to exceed `pole_bound`.
    pub vanishing_order: i64,
    pub verdict: RigorVerdict,
}

impl RigorCertificate {
    pub fn proven(&self) -> bool {
        self.verdict == RigorVerdict::Proven
    }

    fn not_applicable(name: &str, reason: String) -> Self {
        RigorCertificate {
            name: name.to_string(),
            level: 0,
            form: ProofForm::Direct,
            reference: String::new(),
            cusp_table: Vec::new(),
            pole_bound: 0,
            checked_through: 0,
            vanishing_order: 0,
            verdict: RigorVerdict::NotApplicable { reason },
        }
    }

    /// Human-readable certificate block.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("certificate {}\n", self.name));
        match &self.verdict {
            RigorVerdict::NotApplicable { reason } => {
                out.push_str(&format!("  verdict: NOT_APPLICABLE ({})\n", reason));
                return out;
            }
            RigorVerdict::Refuted { exponent } => {
                out.push_str(&format!(
                    "  verdict: REFUTED (nonzero coefficient at q^{})\n",
                    exponent
                ));
                return out;
            }
            RigorVerdict::Proven => {}
        }
        out.push_str(&format!("  level: {}\n", self.level));
        out.push_str(&format!(
            "  form: {}\n",
            match self.form {
                ProofForm::Direct => "direct",
                ProofForm::Squared => "squared",
            }
        ));
        out.push_str(&format!("  reference term: {}\n", self.reference));
        out.push_str("  cusp classes (denominator: width, multiplicity, min term order):\n");
        for row in &self.cusp_table {
            out.push_str(&format!(
                "    c={:<4} width={:<4} mult={:<3} min_order={}\n",
                row.denom, row.width, row.multiplicity, row.min_order
            ));
        }
        out.push_str(&format!("  pole bound B: {}\n", self.pole_bound));
        out.push_str(&format!(
            "  verified: lhs - rhs = O(q^{}), vanishing order {} > B\n",
            self.checked_through + 1,
            self.vanishing_order
        ));
        out.push_str("  verdict: PROVEN\n");
        out
    }
}

/// Extra coefficients checked past the pole bound.
const CHECK_MARGIN: i64 = 10;
/// Level-search ladder: multiples of the lcm of the factor indices.
const LEVEL_SEARCH_LIMIT: i64 = 48;

struct Plan {
    form: ProofForm,
    level: i64,
    reference: EtaTerm,
    /// Factor-exponent differences of each term against the reference;
    /// the reference's own entry is the empty map.
    ratios: Vec<BTreeMap<i64, i64>>,
}

fn plan_terms(name: &str, terms: &[EtaTerm]) -> std::result::Result<Plan, RigorCertificate> {
    if terms.is_empty() {
        return Err(RigorCertificate::not_applicable(
            name,
            "lhs - rhs flattens to zero syntactically".into(),
        ));
    }

    // uniform exponent sum (weight) and a common eta normalization are
    // required for the ratios to be weight-0 without stray q-powers
    let w0 = terms[0].exponent_sum();
    if terms.iter().any(|t| t.exponent_sum() != w0) {
        return Err(RigorCertificate::not_applicable(
            name,
            "terms have mixed weights".into(),
        ));
    }
    let g0 = terms[0].eta_shift();
    if terms.iter().any(|t| t.eta_shift() != g0) {
        return Err(RigorCertificate::not_applicable(
            name,
            "terms differ by a fractional power of q".into(),
        ));
    }

    let ref_idx = (0..terms.len())
        .min_by_key(|&i| (terms[i].shift, i))
        .expect("nonempty");
    let reference = terms[ref_idx].clone();
    let ratios: Vec<BTreeMap<i64, i64>> = terms.iter().map(|t| t.div(&reference).factors).collect();

    // Quadratic characters of the non-reference ratios. All trivial
    // proves the identity directly. A shared nontrivial character D
    // still works: the squared sum of those ratios has character D^2 = 1
    // and must equal the constant 1, which doubles the pole budget.
    let parts: Vec<i64> = ratios
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != ref_idx)
        .map(|(_, d)| squarefree_part(d))
        .collect();
    let form = if parts.iter().all(|&p| p == 1) {
        ProofForm::Direct
    } else if parts.windows(2).all(|w| w[0] == w[1]) {
        ProofForm::Squared
    } else {
        return Err(RigorCertificate::not_applicable(
            name,
            "terms carry mixed quadratic characters".into(),
        ));
    };

    // Smallest admissible level: every delta divides N and the Ligozat
    // integrality condition `sum (N/delta) d_delta = 0 mod 24` holds for
    // each modular ratio. In the squared form the modular objects are
    // the pairwise products, so the single-ratio sums only need to agree
    // mod 24 with twice the common value vanishing.
    let mut lcm = 1i64;
    for t in terms {
        for &d in t.factors.keys() {
            lcm = lcm / gcd(lcm, d) * d;
        }
    }
    let nonref: Vec<&BTreeMap<i64, i64>> = ratios
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != ref_idx)
        .map(|(_, d)| d)
        .collect();
    let ligozat_sum = |d: &BTreeMap<i64, i64>, n: i64| -> i64 {
        d.iter().map(|(&delta, &r)| (n / delta) * r).sum()
    };
    let level = (1..=LEVEL_SEARCH_LIMIT)
        .map(|k| lcm * k)
        .find(|&n| match form {
            ProofForm::Direct => nonref.iter().all(|d| ligozat_sum(d, n) % 24 == 0),
            ProofForm::Squared => {
                let sums: Vec<i64> = nonref
                    .iter()
                    .map(|d| ligozat_sum(d, n).rem_euclid(24))
                    .collect();
                sums.windows(2).all(|w| w[0] == w[1])
                    && sums.first().map_or(true, |s| (2 * s) % 24 == 0)
            }
        });
    let level = match level {
        Some(n) => n,
        None => {
            return Err(RigorCertificate::not_applicable(
                name,
                "no admissible level satisfies the integrality conditions".into(),
            ))
        }
    };

    Ok(Plan {
        form,
        level,
        reference,
        ratios,
    })
}

/// The normalized ratio factor maps of an identity's terms against its
/// reference term, with the admissible level; the inputs to the cusp
/// order table. Fails with the NOT_APPLICABLE reason when the identity
/// is not a sum of commensurable f-products.
pub fn normalized_ratios(
    entry: &IdentityEntry,
) -> std::result::Result<(i64, Vec<BTreeMap<i64, i64>>), String> {
    let lhs = eta_terms(&entry.lhs)?;
    let rhs = eta_terms(&entry.rhs)?;
    let mut terms = lhs;
    terms.extend(rhs.into_iter().map(|t| t.neg()));
    let terms = merge_terms(terms);
    match plan_terms(&entry.name, &terms) {
        Ok(plan) => Ok((plan.level, plan.ratios)),
        Err(cert) => match cert.verdict {
            RigorVerdict::NotApplicable { reason } => Err(reason),
            _ => Err("planning failed".into()),
        },
    }
}

/// Attempt a valence-bound proof of a catalog entry.
///
/// Returns a certificate whose verdict is PROVEN, NOT_APPLICABLE (with
/// the failed hypothesis), or REFUTED (the identity is false at some
/// exponent). Errors only when the required working precision cannot be
/// reached.
pub fn prove(entry: &IdentityEntry) -> Result<RigorCertificate> {
    let lhs = match eta_terms(&entry.lhs) {
        Ok(t) => t,
        Err(reason) => return Ok(RigorCertificate::not_applicable(&entry.name, reason)),
    };
    let rhs = match eta_terms(&entry.rhs) {
        Ok(t) => t,
        Err(reason) => return Ok(RigorCertificate::not_applicable(&entry.name, reason)),
    };
    let mut terms = lhs;
    terms.extend(rhs.into_iter().map(|t| t.neg()));
    let terms = merge_terms(terms);

    // Leading exponent of the original combination; the vanishing order
    // of the normalized function is measured from here.
    let s0 = match terms.iter().map(|t| t.shift).min() {
        Some(v) => v,
        None => {
            return Ok(RigorCertificate::not_applicable(
                &entry.name,
                "lhs - rhs flattens to zero syntactically".into(),
            ))
        }
    };

    let plan = match plan_terms(&entry.name, &terms) {
        Ok(plan) => plan,
        Err(cert) => return Ok(cert),
    };

    let n = plan.level;
    let mut pole_budget = Ratio::from_integer(0);
    let mut table = Vec::new();
    for c in divisors(n) {
        let width = cusp_width(c, n);
        let mult = cusp_multiplicity(c, n);
        let mut min_inv = Ratio::from_integer(0); // the constant term of F
        for d in &plan.ratios {
            let inv = cusp_order_invariant(d, c, n);
            if inv < min_inv {
                min_inv = inv;
            }
        }
        if c != n {
            pole_budget += -min_inv * Ratio::from_integer(mult);
        } else {
            // holomorphic at infinity: the reference term has the
            // smallest leading exponent
            debug_assert!(min_inv >= Ratio::from_integer(0));
        }
        table.push(CuspRow {
            denom: c,
            width,
            multiplicity: mult,
            min_order: min_inv / Ratio::from_integer(width),
        });
    }
    // each ratio is weight 0, so its divisor degree over the cusps is zero
    for d in &plan.ratios {
        let total: Ratio<i64> = divisors(n)
            .into_iter()
            .map(|c| cusp_order_invariant(d, c, n) * Ratio::from_integer(cusp_multiplicity(c, n)))
            .sum();
        assert!(total.is_zero(), "eta-quotient divisor has nonzero degree");
    }

    // In the squared form the modular object is the squared ratio sum,
    // whose pole orders are twice the single-ratio ones.
    let pole_bound = match plan.form {
        ProofForm::Direct => pole_budget.ceil().to_integer(),
        ProofForm::Squared => (pole_budget * Ratio::from_integer(2)).ceil().to_integer(),
    };

    let check_through = s0 + pole_bound + CHECK_MARGIN;

    let lhs_series = eval_exact(&entry.lhs, check_through)?;
    let rhs_series = eval_exact(&entry.rhs, check_through)?;
    let verdict = match lhs_series.first_difference(&rhs_series, check_through)? {
        None => RigorVerdict::Proven,
        Some((exponent, _, _)) => RigorVerdict::Refuted { exponent },
    };

    let vanishing_order = check_through - s0;

    Ok(RigorCertificate {
        name: entry.name.clone(),
        level: n,
        form: plan.form,
        reference: plan.reference.to_string(),
        cusp_table: table,
        pole_bound,
        checked_through: check_through,
        vanishing_order,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin_entry;
    use crate::parse::parse_expr;

    #[test]
    fn index_values() {
        assert_eq!(index_gamma0(1), 1);
        assert_eq!(index_gamma0(8), 12);
        assert_eq!(index_gamma0(14), 24);
        assert_eq!(index_gamma0(20), 36);
        // multiplicative over coprime factors
        for (a, b) in [(3, 8), (5, 7), (4, 9), (5, 8)] {
            assert_eq!(index_gamma0(a * b), index_gamma0(a) * index_gamma0(b));
        }
    }

    #[test]
    fn sturm_values() {
        assert_eq!(sturm_bound(4, 8), 4);
        assert_eq!(sturm_bound(0, 14), 0);
        assert_eq!(sturm_bound(2, 14), 4);
    }

    #[test]
    fn cusp_counts_and_widths() {
        assert_eq!(cusps_gamma0(1).len(), 1);
        assert_eq!(cusps_gamma0(8).len(), 4);
        assert_eq!(cusps_gamma0(14).len(), 4);
        // sum of width * multiplicity over cusp classes equals the index
        for n in 1..=40 {
            let total: i64 = divisors(n)
                .into_iter()
                .map(|c| cusp_width(c, n) * cusp_multiplicity(c, n))
                .sum();
            assert_eq!(total, index_gamma0(n), "N={}", n);
        }
    }

    /// Independent cusp-count oracle: orbits of P^1(Z/N) under the
    /// translation action (c:d) -> (c:c+d) and unit scaling.
    fn p1_orbit_count(n: i64) -> i64 {
        let n = n as usize;
        let canon = |c: usize, d: usize| -> (usize, usize) {
            let mut best = (usize::MAX, usize::MAX);
            for u in 1..=n {
                if gcd(u as i64, n as i64) != 1 {
                    continue;
                }
                let p = (u * c % n, u * d % n);
                if p < best {
                    best = p;
                }
            }
            best
        };
        let mut points = Vec::new();
        for c in 0..n {
            for d in 0..n {
                if gcd(gcd(c as i64, d as i64), n as i64) == 1 {
                    let p = canon(c, d);
                    if !points.contains(&p) {
                        points.push(p);
                    }
                }
            }
        }
        // union-find over the translation action
        let mut parent: Vec<usize> = (0..points.len()).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let r = find(parent, parent[i]);
                parent[i] = r;
            }
            parent[i]
        }
        for (i, &(c, d)) in points.clone().iter().enumerate() {
            let img = canon(c, (c + d) % n);
            let j = points.iter().position(|&p| p == img).unwrap();
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri] = rj;
            }
        }
        let mut roots = Vec::new();
        for i in 0..points.len() {
            let r = find(&mut parent, i);
            if !roots.contains(&r) {
                roots.push(r);
            }
        }
        roots.len() as i64
    }

    #[test]
    fn cusp_count_matches_orbit_enumeration() {
        for n in 1..=40 {
            assert_eq!(cusp_count_gamma0(n), p1_orbit_count(n), "N={}", n);
        }
    }

    #[test]
    fn order_at_infinity_examples() {
        // f2^4 f8^8 / f4^12 normalized: order 1 at infinity
        let f = BTreeMap::from([(2i64, 4i64), (8, 8), (4, -12)]);
        assert_eq!(cusp_order(&f, 8, 8), Ratio::from_integer(1));
        // f1^4 f2^2 f8^4 / f4^10: order 0 at infinity
        let f = BTreeMap::from([(1i64, 4i64), (2, 2), (8, 4), (4, -10)]);
        assert_eq!(cusp_order(&f, 8, 8), Ratio::from_integer(0));
        // empty product: order 0 at every cusp
        let f = BTreeMap::new();
        for c in [1, 2, 4, 8] {
            assert_eq!(cusp_order(&f, c, 8), Ratio::from_integer(0));
        }
    }

    #[test]
    fn degree_zero_for_weight_zero_quotients() {
        // Delta(tau)/Delta(2tau) on Gamma_0(8)
        let f = BTreeMap::from([(1i64, 24i64), (2, -24)]);
        let total: Ratio<i64> = divisors(8)
            .into_iter()
            .map(|c| cusp_order_invariant(&f, c, 8) * Ratio::from_integer(cusp_multiplicity(c, 8)))
            .sum();
        assert!(total.is_zero());
        // and in local units the width-weighted sum vanishes as well
        let total_local: Ratio<i64> = divisors(8)
            .into_iter()
            .map(|c| {
                cusp_order(&f, c, 8)
                    * Ratio::from_integer(cusp_width(c, 8) * cusp_multiplicity(c, 8))
            })
            .sum();
        assert!(total_local.is_zero());
    }

    #[test]
    fn eta_terms_flattening() {
        let e = parse_expr("f4^10/(f2^2*f8^4) - 4*q*f2^2*f8^4/f4^2").unwrap();
        let terms = eta_terms(&e).unwrap();
        assert_eq!(terms.len(), 2);
        let e = parse_expr("lam(q^2)").unwrap();
        let terms = eta_terms(&e).unwrap();
        assert_eq!(terms[0].shift, 2);
        assert_eq!(terms[0].factors, BTreeMap::from([(2, 4), (10, 4)]));
        assert!(eta_terms(&parse_expr("phi(-q)").unwrap()).is_err());
        assert!(eta_terms(&parse_expr("H(2; f1)").unwrap()).is_err());
    }

    #[test]
    fn squarefree_parts() {
        // 4^10 2^-2 8^-4 = 2^6: square
        let f = BTreeMap::from([(4i64, 10i64), (2, -2), (8, -4)]);
        assert_eq!(squarefree_part(&f), 1);
        // 2^1: not a square
        let f = BTreeMap::from([(2i64, 1i64)]);
        assert_eq!(squarefree_part(&f), 2);
        // 2 * 10 / 5 = 4: square
        let f = BTreeMap::from([(2i64, 1i64), (10, 1), (5, -1)]);
        assert_eq!(squarefree_part(&f), 1);
    }

    #[test]
    fn prove_diss_f1_4_direct_small_bound() {
        let cert = prove(&builtin_entry("diss_f1_4").unwrap()).unwrap();
        assert!(cert.proven(), "{:?}", cert.verdict);
        assert_eq!(cert.level, 8);
        assert_eq!(cert.form, ProofForm::Direct);
        assert_eq!(cert.pole_bound, 1);
        assert!(cert.vanishing_order > cert.pole_bound);
    }

    #[test]
    fn prove_gates_non_eta_entries() {
        for name in ["lemma21_i", "lemma21_ii", "lemma21_iii"] {
            let cert = prove(&builtin_entry(name).unwrap()).unwrap();
            assert!(
                matches!(cert.verdict, RigorVerdict::NotApplicable { .. }),
                "{}: {:?}",
                name,
                cert.verdict
            );
        }
    }

    #[test]
    fn prove_refutes_planted_defect() {
        let mut entry = builtin_entry("diss_f1_4").unwrap();
        // perturb one coefficient with a legitimate eta term so the
        // combination still passes the modularity gates
        entry.rhs = entry.rhs.add(parse_expr("8*q*f2^2*f8^4/f4^2").unwrap());
        let cert = prove(&entry).unwrap();
        match cert.verdict {
            RigorVerdict::Refuted { exponent } => assert_eq!(exponent, 1),
            other => panic!("expected refutation, got {:?}", other),
        }
    }

    #[test]
    fn squared_route_planned_for_shared_character() {
        // f1^2 f6 vs f2 f3^2: the ratio has factor map
        // {1:-2, 2:1, 3:2, 6:-1}, weight 0, matching eta shifts, and
        // squarefree part 2, so the planner must take the squared route.
        let terms = vec![
            EtaTerm {
                coeff: BigRational::one(),
                shift: 0,
                factors: BTreeMap::from([(1, 2), (6, 1)]),
            },
            EtaTerm {
                coeff: -BigRational::one(),
                shift: 0,
                factors: BTreeMap::from([(2, 1), (3, 2)]),
            },
        ];
        let plan = plan_terms("synthetic", &terms).unwrap();
        assert_eq!(plan.form, ProofForm::Squared);
        assert_eq!(plan.level, 12);
    }

    #[test]
    fn squared_route_refutes_false_identity_honestly() {
        let entry = IdentityEntry {
            name: "synthetic_squared".into(),
            lhs: parse_expr("f1^2*f6").unwrap(),
            rhs: parse_expr("f2*f3^2").unwrap(),
            source: String::new(),
            default_order: 50,
        };
        let cert = prove(&entry).unwrap();
        assert_eq!(cert.form, ProofForm::Squared);
        match cert.verdict {
            RigorVerdict::Refuted { exponent } => assert_eq!(exponent, 1),
            other => panic!("expected refutation, got {:?}", other),
        }
    }
}
