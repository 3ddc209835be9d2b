//! Congruence scanning over arithmetic progressions of series
//! coefficients: isolated congruences, prime-power families, and exact
//! scalar relations, with counterexample reporting.
//!
//! Scans default to the Modular backend with the claim's own modulus;
//! scalar relations compare signed integers and run Exact.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::Result;
use crate::expr::{eval_exact, eval_mod, Expr};
use crate::parse::parse_expr;
use crate::ring::{reduce_bigint, CoefficientMode};
use crate::series::QSeries;

/// `a(mn + j) = 0 (mod modulus)` for all `0 <= n <= n_max`, where `a` is
/// the coefficient sequence of `series`.
#[derive(Clone, Debug)]
pub struct CongruenceClaim {
    pub name: String,
    pub series: Expr,
    pub m: i64,
    pub j: i64,
    pub modulus: u64,
    pub n_max: i64,
    pub source: String,
}

/// An infinite family indexed by `alpha`: progression `m = c * p^alpha`,
/// offset `c * p^alpha - offset_sub`, modulus `mod_coef * p^alpha`.
#[derive(Clone, Debug)]
pub struct FamilyClaim {
    pub name: String,
    pub series: Expr,
    pub p: i64,
    pub c: i64,
    /// Offset is `c * p^alpha - offset_sub` (1 or 2 in practice).
    pub offset_sub: i64,
    /// Modulus is `mod_coef * p^alpha`.
    pub mod_coef: u64,
    pub alpha_max: u32,
    pub n_max: i64,
    pub source: String,
}

/// `a(mn + j) = scalar * a(n - shift)` exactly, with `a(negative) = 0`.
#[derive(Clone, Debug)]
pub struct ScalarRelationClaim {
    pub name: String,
    pub series: Expr,
    pub m: i64,
    pub j: i64,
    pub scalar: i64,
    pub shift: i64,
    pub n_max: i64,
    pub source: String,
}

/// Outcome of one scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// First failing `n`, with a human-readable residue or value pair.
    Fail {
        n: i64,
        detail: String,
    },
}

#[derive(Clone, Debug)]
pub struct ClaimReport {
    pub name: String,
    pub outcome: Outcome,
    /// Summary of what was scanned, for the report line.
    pub detail: String,
    /// Extra notes (such as the congruence induced by a scalar relation).
    pub notes: Vec<String>,
}

impl ClaimReport {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

fn scan_residues(
    series: &QSeries<crate::ring::Modular>,
    m: i64,
    j: i64,
    modulus: u64,
    n_max: i64,
) -> Result<Outcome> {
    debug_assert_eq!(series.ring().modulus() % modulus, 0);
    for n in 0..=n_max {
        let c = series.coeff(m * n + j)?;
        let r = c % modulus;
        if r != 0 {
            return Ok(Outcome::Fail {
                n,
                detail: format!("residue={} mod={}", r, modulus),
            });
        }
    }
    Ok(Outcome::Pass)
}

fn scan_exact_residues(
    series: &QSeries<crate::ring::Exact>,
    m: i64,
    j: i64,
    modulus: u64,
    n_max: i64,
) -> Result<Outcome> {
    for n in 0..=n_max {
        let c = series.coeff(m * n + j)?;
        let r = reduce_bigint(&c, modulus);
        if r != 0 {
            return Ok(Outcome::Fail {
                n,
                detail: format!("residue={} mod={}", r, modulus),
            });
        }
    }
    Ok(Outcome::Pass)
}

/// Scan a congruence claim. The Modular mode must use a modulus the
/// claim's modulus divides; [`CoefficientMode::Exact`] reduces exact
/// coefficients instead (the cross-backend oracle).
pub fn check_claim(claim: &CongruenceClaim, mode: CoefficientMode) -> Result<ClaimReport> {
    assert!(
        claim.m >= 1 && (0..claim.m).contains(&claim.j) && claim.modulus >= 2,
        "claim requires m >= 1, 0 <= j < m, modulus >= 2"
    );
    let needed = claim.m * claim.n_max + claim.j;
    let outcome = match mode {
        CoefficientMode::Modular(m) => {
            assert!(
                m % claim.modulus == 0,
                "scan modulus {} does not contain claim modulus {}",
                m,
                claim.modulus
            );
            let series = eval_mod(&claim.series, needed, m)?;
            scan_residues(&series, claim.m, claim.j, claim.modulus, claim.n_max)?
        }
        CoefficientMode::Exact => {
            let series = eval_exact(&claim.series, needed)?;
            scan_exact_residues(&series, claim.m, claim.j, claim.modulus, claim.n_max)?
        }
    };
    Ok(ClaimReport {
        name: claim.name.clone(),
        outcome,
        detail: format!(
            "m={} j={} mod={} nmax={}",
            claim.m, claim.j, claim.modulus, claim.n_max
        ),
        notes: Vec::new(),
    })
}

/// Scan every `alpha <= alpha_max` of a family; one report per alpha,
/// named `<name>_a<alpha>`.
///
/// In Modular mode the series is expanded once, at the largest order any
/// alpha needs and modulo `mod_coef * p^alpha_max`; each alpha's modulus
/// divides that, so a single residue series serves the whole family.
pub fn check_family(family: &FamilyClaim, mode: CoefficientMode) -> Result<Vec<ClaimReport>> {
    let pa_max = family.p.pow(family.alpha_max);
    let m_max = family.c * pa_max;
    let needed = m_max * family.n_max + m_max - family.offset_sub;

    enum Backed {
        Modular(QSeries<crate::ring::Modular>),
        Exact(QSeries<crate::ring::Exact>),
    }
    let series = match mode {
        CoefficientMode::Modular(_) => Backed::Modular(eval_mod(
            &family.series,
            needed,
            family.mod_coef * pa_max as u64,
        )?),
        CoefficientMode::Exact => Backed::Exact(eval_exact(&family.series, needed)?),
    };

    let mut reports = Vec::new();
    for alpha in 1..=family.alpha_max {
        let pa = family.p.pow(alpha);
        let m = family.c * pa;
        let j = m - family.offset_sub;
        assert!((0..m).contains(&j), "family offset out of range");
        let modulus = family.mod_coef * pa as u64;
        let outcome = match &series {
            Backed::Modular(s) => scan_residues(s, m, j, modulus, family.n_max)?,
            Backed::Exact(s) => scan_exact_residues(s, m, j, modulus, family.n_max)?,
        };
        reports.push(ClaimReport {
            name: format!("{}_a{}", family.name, alpha),
            outcome,
            detail: format!("m={} j={} mod={} nmax={}", m, j, modulus, family.n_max),
            notes: Vec::new(),
        });
    }
    Ok(reports)
}

/// Scan a scalar relation with exact coefficients, against a
/// pre-evaluated series (callers batching several claims over the same
/// generating function evaluate it once).
pub fn check_scalar_relation_with(
    series: &QSeries<crate::ring::Exact>,
    claim: &ScalarRelationClaim,
) -> Result<ClaimReport> {
    assert!(
        claim.m >= 2 && (0..claim.m).contains(&claim.j),
        "scalar relation requires m >= 2 and 0 <= j < m"
    );
    let scalar = BigInt::from(claim.scalar);
    let mut outcome = Outcome::Pass;
    for n in 0..=claim.n_max {
        let lhs = series.coeff(claim.m * n + claim.j)?;
        let rhs = if n >= claim.shift {
            &scalar * series.coeff(n - claim.shift)?
        } else {
            BigInt::zero()
        };
        if lhs != rhs {
            outcome = Outcome::Fail {
                n,
                detail: format!("lhs={} rhs={}", lhs, rhs),
            };
            break;
        }
    }

    let mut notes = Vec::new();
    if outcome == Outcome::Pass && claim.scalar.unsigned_abs() >= 2 {
        // a(mn+j) = s*a(n-shift) forces a(mn+j) = 0 mod |s|; assert the
        // implication on the same coefficients.
        let modulus = claim.scalar.unsigned_abs();
        let induced = scan_exact_residues(series, claim.m, claim.j, modulus, claim.n_max)?;
        match induced {
            Outcome::Pass => notes.push(format!("induced_mod={}:PASS", modulus)),
            Outcome::Fail { n, detail } => {
                outcome = Outcome::Fail {
                    n,
                    detail: format!("induced congruence mod {} failed: {}", modulus, detail),
                };
            }
        }
    }

    Ok(ClaimReport {
        name: claim.name.clone(),
        outcome,
        detail: format!(
            "relation=a({}n+{})={}*a(n-{}) nmax={}",
            claim.m, claim.j, claim.scalar, claim.shift, claim.n_max
        ),
        notes,
    })
}

/// Evaluate the claim's series and scan the scalar relation.
pub fn check_scalar_relation(claim: &ScalarRelationClaim) -> Result<ClaimReport> {
    let needed = scalar_claim_needed_order(claim);
    let series = eval_exact(&claim.series, needed)?;
    check_scalar_relation_with(&series, claim)
}

pub fn scalar_claim_needed_order(claim: &ScalarRelationClaim) -> i64 {
    (claim.m * claim.n_max + claim.j).max(claim.n_max)
}

fn expr(src: &str) -> Expr {
    parse_expr(src).expect("builtin claim series parses")
}

/// Built-in isolated congruence claims.
pub fn builtin_congruence_claims() -> Vec<CongruenceClaim> {
    let pstar = "f1^4*f5^4";
    let mk = |name: &str, series: &str, m: i64, j: i64, modulus: u64, n_max: i64, source: &str| {
        CongruenceClaim {
            name: name.to_string(),
            series: expr(series),
            m,
            j,
            modulus,
            n_max,
            source: source.to_string(),
        }
    };
    vec![
        mk("Pstar_2n1_mod4", pstar, 2, 1, 4, 5000, "P*(2n+1) = 0 mod 4"),
        mk("Pstar_4n3_mod8", pstar, 4, 3, 8, 5000, "P*(4n+3) = 0 mod 8"),
        mk(
            "Pstar_8n7_mod64",
            pstar,
            8,
            7,
            64,
            700,
            "P*(8n+7) = 0 mod 64",
        ),
        mk(
            "Pstar_32n31_mod256",
            pstar,
            32,
            31,
            256,
            700,
            "P*(32n+31) = 0 mod 256",
        ),
        mk(
            "Pstar_64n63_mod512",
            pstar,
            64,
            63,
            512,
            700,
            "P*(64n+63) = 0 mod 512",
        ),
        mk(
            "A_7n6_mod7",
            "f2^6*f7^6/f1^2",
            7,
            6,
            7,
            2000,
            "A(7n+6) = 0 mod 7",
        ),
        mk(
            "B_7n4_mod7",
            "f1^6*f14^4/(f2^2*f7^2)",
            7,
            4,
            7,
            2000,
            "B(7n+4) = 0 mod 7",
        ),
        mk("Pstar_9n2_mod2", pstar, 9, 2, 2, 5000, "P*(9n+2) = 0 mod 2"),
        mk("Pstar_9n5_mod2", pstar, 9, 5, 2, 5000, "P*(9n+5) = 0 mod 2"),
        mk(
            "Pstar_10n1_mod4",
            pstar,
            10,
            1,
            4,
            5000,
            "P*(10n+1) = 0 mod 4",
        ),
        mk(
            "Pstar_10n7_mod4",
            pstar,
            10,
            7,
            4,
            5000,
            "P*(10n+7) = 0 mod 4",
        ),
        mk(
            "Pstar_10n3_mod8",
            pstar,
            10,
            3,
            8,
            5000,
            "P*(10n+3) = 0 mod 8",
        ),
        mk(
            "Pstar_10n5_mod8",
            pstar,
            10,
            5,
            8,
            5000,
            "P*(10n+5) = 0 mod 8",
        ),
    ]
}

/// Built-in prime-power families.
pub fn builtin_family_claims() -> Vec<FamilyClaim> {
    let mk = |name: &str,
              series: &str,
              p: i64,
              c: i64,
              offset_sub: i64,
              mod_coef: u64,
              alpha_max: u32,
              n_max: i64,
              source: &str| FamilyClaim {
        name: name.to_string(),
        series: expr(series),
        p,
        c,
        offset_sub,
        mod_coef,
        alpha_max,
        n_max,
        source: source.to_string(),
    };
    vec![
        mk(
            "Pstar_pow2_family",
            "f1^4*f5^4",
            2,
            1,
            1,
            2,
            8,
            200,
            "P*(2^a n + 2^a - 1) = 0 mod 2^(a+1)",
        ),
        mk(
            "M_family",
            "f2^5*f5^5/(f1*f10)",
            5,
            1,
            1,
            1,
            3,
            100,
            "M(5^a n + 5^a - 1) = 0 mod 5^a",
        ),
        mk(
            "Tstar_family",
            "f1^5*f10^5/(f2*f5)",
            5,
            1,
            2,
            1,
            3,
            100,
            "T*(5^a n + 5^a - 2) = 0 mod 5^a",
        ),
        mk(
            "Pstar_2x5_family",
            "f1^4*f5^4",
            5,
            2,
            1,
            4,
            3,
            100,
            "P*(2*5^a n + 2*5^a - 1) = 0 mod 4*5^a",
        ),
        mk(
            "K_family",
            "f1^2*f2^2*f7^2*f14^2",
            7,
            1,
            2,
            1,
            3,
            100,
            "K(7^a n + 7^a - 2) = 0 mod 7^a",
        ),
        mk(
            "L_family",
            "f1^5*f7^5/(f2*f14)",
            7,
            1,
            1,
            1,
            3,
            100,
            "L(7^a n + 7^a - 1) = 0 mod 7^a",
        ),
    ]
}

/// Built-in exact scalar relations.
pub fn builtin_scalar_claims() -> Vec<ScalarRelationClaim> {
    let mk = |name: &str,
              series: &str,
              m: i64,
              j: i64,
              scalar: i64,
              shift: i64,
              n_max: i64,
              source: &str| {
        ScalarRelationClaim {
            name: name.to_string(),
            series: expr(series),
            m,
            j,
            scalar,
            shift,
            n_max,
            source: source.to_string(),
        }
    };
    let pstar = "f1^4*f5^4";
    let l = "f1^5*f7^5/(f2*f14)";
    let k = "f1^2*f2^2*f7^2*f14^2";
    vec![
        mk(
            "Pstar_16n15_eq",
            pstar,
            16,
            15,
            -64,
            0,
            1000,
            "P*(16n+15) = -64 P*(n)",
        ),
        mk("Pstar_16n7_zero", pstar, 16, 7, 0, 0, 1000, "P*(16n+7) = 0"),
        mk(
            "Pstar_5n4_eq",
            pstar,
            5,
            4,
            -5,
            0,
            2000,
            "P*(5n+4) = -5 P*(n)",
        ),
        mk(
            "Pstar_25n24_eq",
            pstar,
            25,
            24,
            25,
            0,
            500,
            "P*(25n+24) = 25 P*(n)",
        ),
        mk("L_7n6_eq", l, 7, 6, -7, 0, 2000, "L(7n+6) = -7 L(n)"),
        mk("K_7n5_eq", k, 7, 5, -7, 1, 2000, "K(7n+5) = -7 K(n-1)"),
        mk("L1_a2_eq", l, 49, 48, 49, 0, 280, "L(49n+48) = 49 L(n)"),
        mk(
            "L1_a3_eq",
            l,
            343,
            342,
            -343,
            0,
            40,
            "L(343n+342) = -343 L(n)",
        ),
    ]
}

/// The two candidate readings of the iterated K(7n+5) relation at a
/// given `alpha >= 2`, scanned side by side.
///
/// The printed iterated form carries the q-prefactor `q^alpha`, i.e.
/// `K(7^a n + 7^a - 2) = (-7)^a K(n - alpha)`; direct iteration of the
/// base relation instead keeps a single `q`, i.e. shift 1. Both are
/// tested and the resolution reports which one the coefficients match;
/// neither is silently corrected.
#[derive(Clone, Debug)]
pub struct K1Resolution {
    pub alpha: u32,
    pub printed: ClaimReport,
    pub variant: ClaimReport,
    /// The q-exponent the data supports, if exactly one form passes.
    pub resolved_shift: Option<i64>,
}

pub fn resolve_k1(alpha: u32, n_max: i64) -> Result<K1Resolution> {
    assert!(alpha >= 2);
    let k = "f1^2*f2^2*f7^2*f14^2";
    let pa = 7i64.pow(alpha);
    let scalar = if alpha % 2 == 0 { pa } else { -pa };
    let printed_claim = ScalarRelationClaim {
        name: format!("K1_a{}_printed", alpha),
        series: expr(k),
        m: pa,
        j: pa - 2,
        scalar,
        shift: alpha as i64,
        n_max,
        source: format!(
            "K(7^{a} n + 7^{a} - 2) = (-7)^{a} K(n-{a}), as printed",
            a = alpha
        ),
    };
    let variant_claim = ScalarRelationClaim {
        name: format!("K1_a{}_qshift1", alpha),
        series: expr(k),
        shift: 1,
        source: format!(
            "K(7^{a} n + 7^{a} - 2) = (-7)^{a} K(n-1), iterated form",
            a = alpha
        ),
        ..printed_claim.clone()
    };
    let needed = scalar_claim_needed_order(&printed_claim);
    let series = eval_exact(&printed_claim.series, needed)?;
    let printed = check_scalar_relation_with(&series, &printed_claim)?;
    let variant = check_scalar_relation_with(&series, &variant_claim)?;
    let resolved_shift = match (printed.passed(), variant.passed()) {
        (true, false) => Some(alpha as i64),
        (false, true) => Some(1),
        _ => None,
    };
    Ok(K1Resolution {
        alpha,
        printed,
        variant,
        resolved_shift,
    })
}

/// Every built-in scan in one deterministic batch: isolated congruences
/// and families in Modular mode, scalar relations in Exact mode (shared
/// per generating function), and the K1 resolutions for alpha = 2, 3.
pub fn run_builtin_scans() -> Result<(Vec<ClaimReport>, Vec<K1Resolution>)> {
    let mut reports = Vec::new();
    for claim in builtin_congruence_claims() {
        reports.push(check_claim(
            &claim,
            CoefficientMode::Modular(claim.modulus),
        )?);
    }
    for family in builtin_family_claims() {
        // the placeholder modulus is replaced per alpha inside check_family
        reports.extend(check_family(&family, CoefficientMode::Modular(2))?);
    }

    // group scalar claims per generating function so each exact series
    // is expanded once at the largest order any claim needs
    let scalars = builtin_scalar_claims();
    let mut by_series: Vec<(String, Vec<&ScalarRelationClaim>, i64)> = Vec::new();
    for claim in &scalars {
        let key = claim.series.to_string();
        let needed = scalar_claim_needed_order(claim);
        match by_series.iter_mut().find(|(k, _, _)| *k == key) {
            Some((_, group, max_needed)) => {
                group.push(claim);
                *max_needed = (*max_needed).max(needed);
            }
            None => by_series.push((key, vec![claim], needed)),
        }
    }
    for (_, group, needed) in &by_series {
        let series = eval_exact(&group[0].series, *needed)?;
        for claim in group {
            reports.push(check_scalar_relation_with(&series, claim)?);
        }
    }

    let mut resolutions = Vec::new();
    for (alpha, n_max) in [(2u32, 280i64), (3, 40)] {
        resolutions.push(resolve_k1(alpha, n_max)?);
    }

    reports.sort_by(|a, b| a.name.cmp(&b.name));
    Ok((reports, resolutions))
}

/// Convenience check used by tests: scan a claim in both backends and
/// require identical outcomes.
pub fn backends_agree(claim: &CongruenceClaim) -> Result<bool> {
    let modular = check_claim(claim, CoefficientMode::Modular(claim.modulus))?;
    let exact = check_claim(claim, CoefficientMode::Exact)?;
    Ok(modular.outcome == exact.outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn quick_claim(m: i64, j: i64, modulus: u64, n_max: i64) -> CongruenceClaim {
        CongruenceClaim {
            name: "test".into(),
            series: expr("f1^4*f5^4"),
            m,
            j,
            modulus,
            n_max,
            source: String::new(),
        }
    }

    #[test]
    fn pstar_2n1_short_scan_passes() {
        let r = check_claim(&quick_claim(2, 1, 4, 200), CoefficientMode::Modular(4)).unwrap();
        assert!(r.passed(), "{:?}", r.outcome);
    }

    #[test]
    fn pstar_2n1_mod8_fails_at_zero() {
        // P*(1) = -4, so the very first progression member already has
        // residue 4 mod 8.
        let r = check_claim(&quick_claim(2, 1, 8, 200), CoefficientMode::Modular(8)).unwrap();
        match r.outcome {
            Outcome::Fail { n, ref detail } => {
                assert_eq!(n, 0);
                assert!(detail.contains("residue=4"), "{}", detail);
            }
            ref other => panic!("expected failure, got {:?}", other),
        }
    }

    #[test]
    fn backends_agree_on_small_scans() {
        for (m, j, modulus) in [(2, 1, 4u64), (5, 4, 5), (8, 7, 64)] {
            let claim = quick_claim(m, j, modulus, 150);
            assert!(backends_agree(&claim).unwrap(), "m={} j={}", m, j);
        }
    }

    #[test]
    fn family_expansion_names_and_moduli() {
        let family = &builtin_family_claims()[0]; // Pstar_pow2_family
        let reports = check_family(
            &FamilyClaim {
                alpha_max: 3,
                n_max: 30,
                ..family.clone()
            },
            CoefficientMode::Modular(2),
        )
        .unwrap();
        assert_eq!(reports.len(), 3);
        assert_eq!(reports[0].name, "Pstar_pow2_family_a1");
        assert!(reports.iter().all(|r| r.passed()));
        assert!(reports[2].detail.contains("mod=16"));
    }

    #[test]
    fn scalar_relation_16n15() {
        let claim = ScalarRelationClaim {
            n_max: 60,
            ..builtin_scalar_claims()[0].clone()
        };
        let r = check_scalar_relation(&claim).unwrap();
        assert!(r.passed(), "{:?}", r.outcome);
        assert_eq!(r.notes, vec!["induced_mod=64:PASS".to_string()]);
    }

    #[test]
    fn scalar_relation_counterexample_reported() {
        let claim = ScalarRelationClaim {
            name: "bogus".into(),
            series: expr("f1^4*f5^4"),
            m: 16,
            j: 15,
            scalar: -63, // wrong multiplier
            shift: 0,
            n_max: 40,
            source: String::new(),
        };
        let r = check_scalar_relation(&claim).unwrap();
        match r.outcome {
            Outcome::Fail { n: 0, ref detail } => {
                assert!(detail.contains("lhs=-64"), "{}", detail);
            }
            ref other => panic!("{:?}", other),
        }
    }

    #[test]
    fn k7n5_relation_has_shift_one() {
        let claim = ScalarRelationClaim {
            n_max: 80,
            ..builtin_scalar_claims()
                .into_iter()
                .find(|c| c.name == "K_7n5_eq")
                .unwrap()
        };
        let r = check_scalar_relation(&claim).unwrap();
        assert!(r.passed(), "{:?}", r.outcome);
    }

    #[test]
    fn k1_resolution_prefers_single_q() {
        let res = resolve_k1(2, 30).unwrap();
        assert!(!res.printed.passed());
        assert!(res.variant.passed());
        assert_eq!(res.resolved_shift, Some(1));
    }

    #[test]
    fn family_pass_reproducible_at_larger_working_order() {
        // scanning with a larger n_max evaluates the series further out;
        // the verdicts for the shared prefix must not change
        let base = builtin_family_claims()
            .into_iter()
            .find(|f| f.name == "K_family")
            .unwrap();
        let small = check_family(
            &FamilyClaim {
                alpha_max: 2,
                n_max: 10,
                ..base.clone()
            },
            CoefficientMode::Modular(49),
        )
        .unwrap();
        let large = check_family(
            &FamilyClaim {
                alpha_max: 2,
                n_max: 40,
                ..base
            },
            CoefficientMode::Modular(49),
        )
        .unwrap();
        for (s, l) in small.iter().zip(&large) {
            assert_eq!(s.outcome, Outcome::Pass);
            assert_eq!(l.outcome, Outcome::Pass);
        }
    }

    #[test]
    fn insufficient_precision_propagates() {
        // evaluating to a huge order overflows the working-order cap
        let claim = quick_claim(2, 1, 4, 2_000_000_000);
        assert!(matches!(
            check_claim(&claim, CoefficientMode::Modular(4)),
            Err(Error::InsufficientPrecision { .. })
        ));
    }
}
