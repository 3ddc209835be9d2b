//! Built-in catalog of series identities, each machine-checkable to a
//! configurable order.
//!
//! Every identity is transcribed exactly once, here, as a pair of DSL
//! expressions with its citation adjacent; a transcription slip shows up
//! as a FAIL when the catalog is verified, which is the point.

use num_bigint::BigInt;

use crate::error::Error;
use crate::expr::{eval_exact, Expr};
use crate::parse::parse_expr;

/// A named, checkable identity: `lhs = rhs` as q-series.
#[derive(Clone, Debug)]
pub struct IdentityEntry {
    pub name: String,
    pub lhs: Expr,
    pub rhs: Expr,
    /// Where the identity comes from.
    pub source: String,
    /// Order used when no explicit order is requested.
    pub default_order: i64,
}

/// Outcome of checking one identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass {
        order: i64,
    },
    /// First exponent where the sides disagree, with both coefficients.
    Fail {
        exponent: i64,
        lhs: BigInt,
        rhs: BigInt,
    },
    /// The entry could not be evaluated (for example division by a
    /// series that is zero at working precision).
    Inapplicable {
        reason: String,
    },
}

#[derive(Clone, Debug)]
pub struct VerificationResult {
    pub name: String,
    pub verdict: Verdict,
}

impl VerificationResult {
    pub fn passed(&self) -> bool {
        matches!(self.verdict, Verdict::Pass { .. })
    }
}

/// (name, lhs, rhs, source, default order)
///
/// In entries 10-11, theta is the Laurent combination
/// `lam(q^2)^3 / (lam(q) lam(q^4) (lam(q^2) + 2 lam(q^4)))` (valuation -1)
/// and delta is `lam(q^2)^3 / (lam(q^4) (lam(q^2) + 2 lam(q^4))^2)`.
const BUILTIN: &[(&str, &str, &str, &str, i64)] = &[
    (
        "lemma21_i",
        "f1",
        "f25*(1/R(q^5) - q - q^2*R(q^5))",
        "5-dissection of f1 via the Rogers-Ramanujan quotient (Hirschhorn, The Power of q, eq. 8.1.1)",
        500,
    ),
    (
        "lemma21_ii",
        "psi(q)",
        "theta(q^10,q^15) + q*theta(q^5,q^20) + q^3*psi(q^25)",
        "5-dissection of psi (Berndt, Ramanujan's Notebooks III, p. 262, Entry 10(i))",
        500,
    ),
    (
        "lemma21_iii",
        "phi(-q)",
        "-2*q*theta(-q^15,-q^35) + 2*q^4*theta(-q^5,-q^45) + phi(-q^25)",
        "5-dissection of phi(-q) (Berndt, Ramanujan's Notebooks III, p. 262, Entry 10(ii))",
        500,
    ),
    (
        "diss_f1_4",
        "f1^4",
        "f4^10/(f2^2*f8^4) - 4*q*f2^2*f8^4/f4^2",
        "2-dissection of f1^4 (Baruah-Kaur)",
        500,
    ),
    (
        "diss_f5_over_f1",
        "f5/f1",
        "f8*f20^2/(f2^2*f40) + q*f4^3*f10*f40/(f2^3*f8*f20)",
        "2-dissection of f5/f1 (Hirschhorn-Sellers)",
        500,
    ),
    (
        "diss_f1_over_f5",
        "f1/f5",
        "f2*f8*f20^3/(f4*f10^3*f40) - q*f4^2*f40/(f8*f10^2)",
        "2-dissection of f1/f5, from f5/f1 under q -> -q",
        500,
    ),
    (
        "diss_f1f5cubed",
        "f1*f5^3",
        "f2^3*f10 - q*f2^2*f10^2*f20/f4 + 2*q^2*f4*f20^3 - 2*q^3*f4^4*f10*f40^2/(f2*f8^2)",
        "2-dissection of f1*f5^3 (Berndt, Ramanujan's Notebooks III, p. 315)",
        500,
    ),
    (
        "diss_f1cubed_f5",
        "f1^3*f5",
        "f2^2*f4*f10^2/f20 + q*(2*f4^3*f20 - 5*f2*f10^3) + 2*q^2*f4^6*f10*f40^2/(f2*f8^2*f20^2)",
        "2-dissection of f1^3*f5 (Naika et al.)",
        500,
    ),
    (
        "jacobi_deg5",
        "f2^8*f10^8/(f1^4*f5^4*f4^4*f20^4) - f1^4*f5^4/(f2^4*f10^4)",
        "8*q + 16*q^3*f4^4*f20^4/(f2^4*f10^4)",
        "Jacobi's degree-5 modular equation in q-product form (Berndt)",
        500,
    ),
    (
        "theta_delta",
        // delta / theta
        "(lam(q^2)^3/(lam(q^4)*(lam(q^2)+2*lam(q^4))^2))/(lam(q^2)^3/(lam(q)*lam(q^4)*(lam(q^2)+2*lam(q^4))))",
        // theta - 8
        "lam(q^2)^3/(lam(q)*lam(q^4)*(lam(q^2)+2*lam(q^4))) - 8",
        "delta/theta = theta - 8, a rearrangement of the degree-5 modular equation",
        400,
    ),
    (
        "huff_theta",
        "H(2; lam(q^2)^3/(lam(q)*lam(q^4)*(lam(q^2)+2*lam(q^4))))",
        "4",
        "H_2(theta) = 4",
        200,
    ),
    (
        "lemma41",
        "H(2; lam(q))",
        "-4*lam(q^2) - 8*lam(q^4)",
        "huffing identity H_2(lambda(q)) = -4 lambda(q^2) - 8 lambda(q^4)",
        400,
    ),
    (
        "gf_p2n1",
        "AP(2,1; f1^4*f5^4)",
        "-4*(f1^2*f4^4*f10^10/(f2^2*f5^2*f20^4) + q^2*f2^10*f5^2*f20^4/(f1^2*f4^4*f10^2))",
        "generating function of P*(2n+1)",
        500,
    ),
    (
        "gf_p4n3",
        "AP(4,3; f1^4*f5^4)",
        "8*(f2^5*f5^5/(f1*f10) - q*f1^5*f10^5/(f2*f5))",
        "generating function of P*(4n+3)",
        500,
    ),
    (
        "gf_p8n7_s3",
        "AP(8,7; f1^4*f5^4)",
        "8*(f1^2*f2^3*f10^9/(f4*f5^2*f20^3) - f2^9*f5^2*f10^3/(f1^2*f4^3*f20) - 4*q*f1*f4^3*f5^3*f20 - 4*q^2*f1^3*f4*f5*f20^3)",
        "generating function of P*(8n+7), dissection form",
        500,
    ),
    (
        "gf_p8n7_s4",
        "q*AP(8,7; f1^4*f5^4)",
        "-64*lam(q^2)",
        "generating function of P*(8n+7), huffing form",
        500,
    ),
    (
        "gf_p16n7",
        "AP(16,7; f1^4*f5^4)",
        "0",
        "vanishing of P*(16n+7)",
        600,
    ),
    (
        "gf_p16n15",
        "q*AP(16,15; f1^4*f5^4)",
        "-64*lam(q)",
        "generating function of P*(16n+15)",
        500,
    ),
    (
        "gf_p32n31",
        "q*AP(32,31; f1^4*f5^4)",
        "256*lam(q) + 512*lam(q^2)",
        "generating function of P*(32n+31)",
        400,
    ),
    (
        "gf_p64n63",
        "q*AP(64,63; f1^4*f5^4)",
        "-512*lam(q) - 2048*lam(q^2)",
        "generating function of P*(64n+63)",
        300,
    ),
    (
        "thmM_a1",
        "AP(5,4; f2^5*f5^5/(f1*f10))",
        "5*q*f1^5*f10^5/(f2*f5)",
        "generating function of M(5n+4)",
        500,
    ),
    (
        "thmM_a2",
        "AP(25,24; f2^5*f5^5/(f1*f10))",
        "25*f2^5*f5^5/(f1*f10)",
        "generating function of M(25n+24)",
        500,
    ),
    (
        "thmT",
        "AP(5,3; f1^5*f10^5/(f2*f5))",
        "5*f2^5*f5^5/(f1*f10)",
        "generating function of T*(5n+3)",
        500,
    ),
    (
        "e17_a1",
        "AP(5,4; f1^4*f5^4)",
        "-5*f1^4*f5^4",
        "generating function of P*(5n+4)",
        500,
    ),
    (
        "thm_10n9_a1",
        "AP(10,9; f1^4*f5^4)",
        "20*(f1^2*f4^4*f10^10/(f2^2*f5^2*f20^4) + q^2*f2^10*f5^2*f20^4/(f1^2*f4^4*f10^2))",
        "generating function of P*(10n+9)",
        300,
    ),
    (
        "radu_A7n6",
        "(f2*f7^9/(q^4*f1^7*f14^13)) * AP(7,6; f2^6*f7^6/f1^2)",
        "-7*f2*f7^7/(q^2*f1*f14^7)",
        "RaduRK witness identity for A(7n+6) on Gamma_0(14)",
        300,
    ),
    (
        "gf_L7n6",
        "AP(7,6; f1^5*f7^5/(f2*f14))",
        "-7*f1^5*f7^5/(f2*f14)",
        "generating function of L(7n+6)",
        500,
    ),
    (
        "gf_K7n5",
        "AP(7,5; f1^2*f2^2*f7^2*f14^2)",
        "-7*q*f1^2*f2^2*f7^2*f14^2",
        "generating function of K(7n+5)",
        500,
    ),
    (
        "aux_R_S",
        "negq(f2^8*f10^8/(f1^4*f5^4*f4^4*f20^4))",
        "f1^4*f5^4/(f2^4*f10^4)",
        "the two sides of the degree-5 modular equation swap under q -> -q",
        500,
    ),
];

/// The built-in catalog, in declaration order. Names are fixed and
/// unique.
pub fn builtin_catalog() -> Vec<IdentityEntry> {
    BUILTIN
        .iter()
        .map(|&(name, lhs, rhs, source, default_order)| IdentityEntry {
            name: name.to_string(),
            lhs: parse_expr(lhs).unwrap_or_else(|e| panic!("builtin {} lhs: {}", name, e)),
            rhs: parse_expr(rhs).unwrap_or_else(|e| panic!("builtin {} rhs: {}", name, e)),
            source: source.to_string(),
            default_order,
        })
        .collect()
}

/// Find a builtin entry by name.
pub fn builtin_entry(name: &str) -> Option<IdentityEntry> {
    builtin_catalog().into_iter().find(|e| e.name == name)
}

/// Check `lhs - rhs = 0` through `q^order` with exact coefficients.
///
/// Evaluation failures are reported as [`Verdict::Inapplicable`] rather
/// than errors, so a whole catalog run always completes.
pub fn verify_entry(entry: &IdentityEntry, order: i64) -> VerificationResult {
    let verdict = match (eval_exact(&entry.lhs, order), eval_exact(&entry.rhs, order)) {
        (Ok(lhs), Ok(rhs)) => match lhs.first_difference(&rhs, order) {
            Ok(None) => Verdict::Pass { order },
            Ok(Some((exponent, a, b))) => Verdict::Fail {
                exponent,
                lhs: a,
                rhs: b,
            },
            Err(e) => Verdict::Inapplicable {
                reason: e.to_string(),
            },
        },
        (Err(e), _) | (_, Err(e)) => match e {
            Error::NotInvertible(_)
            | Error::InsufficientPrecision { .. }
            | Error::InvalidOrder { .. } => Verdict::Inapplicable {
                reason: e.to_string(),
            },
            other => Verdict::Inapplicable {
                reason: other.to_string(),
            },
        },
    };
    VerificationResult {
        name: entry.name.clone(),
        verdict,
    }
}

/// Verify every entry. With `order = None` each entry runs at its own
/// default order.
pub fn verify_all(entries: &[IdentityEntry], order: Option<i64>) -> Vec<VerificationResult> {
    entries
        .iter()
        .map(|e| verify_entry(e, order.unwrap_or(e.default_order)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_29_uniquely_named_entries() {
        let cat = builtin_catalog();
        assert_eq!(cat.len(), 29);
        let mut names: Vec<_> = cat.iter().map(|e| e.name.clone()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 29);
    }

    #[test]
    fn every_entry_renders_and_reparses() {
        for entry in builtin_catalog() {
            for side in [&entry.lhs, &entry.rhs] {
                let printed = side.to_string();
                let reparsed = parse_expr(&printed)
                    .unwrap_or_else(|e| panic!("{}: {:?}: {}", entry.name, printed, e));
                assert_eq!(*side, reparsed, "{}", entry.name);
            }
        }
    }

    #[test]
    fn smoke_verify_all_at_low_order() {
        let cat = builtin_catalog();
        for r in verify_all(&cat, Some(50)) {
            assert!(r.passed(), "{}: {:?}", r.name, r.verdict);
        }
    }

    #[test]
    fn theta_and_delta_are_laurent() {
        let theta = "lam(q^2)^3/(lam(q)*lam(q^4)*(lam(q^2)+2*lam(q^4)))";
        let s = eval_exact(&parse_expr(theta).unwrap(), 50).unwrap();
        assert_eq!(s.valuation(), -1);
        let delta = "lam(q^2)^3/(lam(q^4)*(lam(q^2)+2*lam(q^4))^2)";
        let s = eval_exact(&parse_expr(delta).unwrap(), 50).unwrap();
        assert_eq!(s.valuation(), -2);
    }

    #[test]
    fn planted_corruption_fails_at_its_exponent() {
        let mut entry = builtin_entry("diss_f1_4").unwrap();
        entry.rhs = entry.rhs.add(Expr::Q.pow(5));
        let r = verify_entry(&entry, 100);
        match r.verdict {
            Verdict::Fail { exponent, .. } => assert_eq!(exponent, 5),
            other => panic!("expected FAIL, got {:?}", other),
        }
    }

    #[test]
    fn zero_entry_passes_as_all_zero() {
        let entry = builtin_entry("gf_p16n7").unwrap();
        let r = verify_entry(&entry, 60);
        assert!(r.passed(), "{:?}", r.verdict);
    }

    #[test]
    fn monotone_pass_at_lower_orders() {
        let entry = builtin_entry("gf_p4n3").unwrap();
        for order in [10, 40, 80] {
            assert!(verify_entry(&entry, order).passed(), "order {}", order);
        }
    }
}
