//! Expression AST for the q-series DSL, with an evaluator.
//!
//! Evaluation is bottom-up with per-node order targets: operators that
//! consume precision (arithmetic-progression extraction, products and
//! quotients of series with nonzero valuation) request correspondingly
//! more from their children, guided by cheap static valuation bounds.
//! A top-level retry loop widens the target if cancellations make the
//! achieved order fall short, so the returned series is always tracked
//! to at least the requested order or the evaluation fails with an
//! insufficient-precision error.

use crate::error::{Error, Result};
use crate::ring::{CoeffRing, Exact, Modular};
use crate::series::QSeries;
use crate::special::{self, ThetaArg};

/// AST of the q-series DSL.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// Integer literal (nonnegative when produced by the parser; signs
    /// come from [`Expr::Neg`]).
    Int(i64),
    /// The variable `q`.
    Q,
    /// Euler product `f_k`.
    EtaF(i64),
    /// `phi(+-q^k)`.
    Phi {
        sign: i8,
        k: i64,
    },
    /// `psi(q^k)`.
    Psi {
        k: i64,
    },
    /// Rogers-Ramanujan quotient `R(q^k)`.
    Rrq {
        k: i64,
    },
    /// Ramanujan theta `f(a, b)` with arguments `+-q^e`.
    Theta {
        a: ThetaArg,
        b: ThetaArg,
    },
    /// `lambda(q^k) = q^k f_k^4 f_{5k}^4`.
    Lam {
        k: i64,
    },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    /// Huffing operator `H(k; e)`.
    Huff {
        k: i64,
        inner: Box<Expr>,
    },
    /// Arithmetic-progression extraction `AP(m, j; e)`.
    ExtractAp {
        m: i64,
        j: i64,
        inner: Box<Expr>,
    },
    /// Magnification `sub(k; e)`: `q -> q^k`.
    SubstPow {
        k: i64,
        inner: Box<Expr>,
    },
    /// `negq(e)`: `q -> -q`.
    NegQ(Box<Expr>),
}

impl Expr {
    pub fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }

    pub fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }

    pub fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }

    pub fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(rhs))
    }

    pub fn pow(self, k: i64) -> Expr {
        Expr::Pow(Box::new(self), k)
    }

    pub fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

// Static valuation bounds ------------------------------------------------

/// Sentinel for "possibly identically zero" (valuation unbounded).
const VAL_INF: i64 = 1 << 40;
/// Clamp for padding derived from bounds.
const PAD_CAP: i64 = 1 << 20;
/// Hard ceiling on any single working order; beyond this evaluation
/// reports insufficient precision instead of grinding forever.
const MAX_WORKING_ORDER: i64 = 2_000_000;

fn sat_add(a: i64, b: i64) -> i64 {
    a.saturating_add(b).clamp(-VAL_INF, VAL_INF)
}

/// Static `(lower, upper)` bounds on the valuation of an expression.
/// The lower bound is sound; the upper bound assumes no cancellation in
/// sums (cancellations only cost a retry, never a wrong result).
fn val_bounds(e: &Expr) -> (i64, i64) {
    match e {
        Expr::Int(0) => (VAL_INF, VAL_INF),
        Expr::Int(_) => (0, 0),
        Expr::Q => (1, 1),
        Expr::EtaF(_)
        | Expr::Phi { .. }
        | Expr::Psi { .. }
        | Expr::Rrq { .. }
        | Expr::Theta { .. } => (0, 0),
        Expr::Lam { k } => (*k, *k),
        Expr::Neg(x) | Expr::NegQ(x) => val_bounds(x),
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let (la, ha) = val_bounds(a);
            let (lb, hb) = val_bounds(b);
            (la.min(lb), ha.min(hb))
        }
        Expr::Mul(a, b) => {
            let (la, ha) = val_bounds(a);
            let (lb, hb) = val_bounds(b);
            (sat_add(la, lb), sat_add(ha, hb))
        }
        Expr::Div(a, b) => {
            let (la, ha) = val_bounds(a);
            let (lb, hb) = val_bounds(b);
            (sat_add(la, -hb), sat_add(ha, -lb))
        }
        Expr::Pow(a, k) => {
            let (la, ha) = val_bounds(a);
            if *k >= 0 {
                (
                    sat_add(0, la.saturating_mul(*k)),
                    sat_add(0, ha.saturating_mul(*k)),
                )
            } else {
                (
                    sat_add(0, ha.saturating_mul(*k)),
                    sat_add(0, la.saturating_mul(*k)),
                )
            }
        }
        Expr::Huff { k, inner } => {
            let (lo, _) = val_bounds(inner);
            let lo = crate::series::ceil_div(lo.clamp(-PAD_CAP, PAD_CAP), *k) * *k;
            (lo, VAL_INF)
        }
        Expr::ExtractAp { m, j, inner } => {
            let (lo, _) = val_bounds(inner);
            (
                crate::series::ceil_div(lo.clamp(-PAD_CAP, PAD_CAP) - j, *m),
                VAL_INF,
            )
        }
        Expr::SubstPow { k, inner } => {
            let (lo, hi) = val_bounds(inner);
            (
                lo.saturating_mul(*k).min(VAL_INF),
                hi.saturating_mul(*k).min(VAL_INF),
            )
        }
    }
}

fn clamp_pad(v: i64) -> i64 {
    v.clamp(-PAD_CAP, PAD_CAP)
}

// Evaluation --------------------------------------------------------------

fn eval_node<R: CoeffRing>(e: &Expr, ring: &R, target: i64) -> Result<QSeries<R>> {
    if target > MAX_WORKING_ORDER {
        return Err(Error::InsufficientPrecision {
            needed: target,
            have: MAX_WORKING_ORDER,
        });
    }
    match e {
        Expr::Int(c) => QSeries::monomial(ring.clone(), *c, 0, target.max(0)),
        Expr::Q => QSeries::monomial(ring.clone(), 1, 1, target.max(1)),
        Expr::EtaF(k) => Ok(special::euler_f(ring, *k, target)),
        Expr::Phi { sign, k } => Ok(special::phi(ring, *sign, *k, target)),
        Expr::Psi { k } => Ok(special::psi(ring, *k, target)),
        Expr::Rrq { k } => Ok(special::rr_quotient(ring, *k, target)),
        Expr::Theta { a, b } => Ok(special::theta_f(ring, *a, *b, target)),
        Expr::Lam { k } => Ok(special::lambda_series(ring, *k, target.max(*k))),
        Expr::Neg(x) => Ok(eval_node(x, ring, target)?.neg()),
        Expr::NegQ(x) => Ok(eval_node(x, ring, target)?.negate_q()),
        Expr::Add(a, b) => {
            let sa = eval_node(a, ring, target)?;
            let sb = eval_node(b, ring, target)?;
            Ok(sa.add(&sb))
        }
        Expr::Sub(a, b) => {
            let sa = eval_node(a, ring, target)?;
            let sb = eval_node(b, ring, target)?;
            Ok(sa.sub(&sb))
        }
        Expr::Mul(a, b) => {
            let (la, _) = val_bounds(a);
            let (lb, _) = val_bounds(b);
            let sa = eval_node(a, ring, target - clamp_pad(lb))?;
            let sb = eval_node(b, ring, target - clamp_pad(la))?;
            Ok(sa.mul(&sb))
        }
        Expr::Div(a, b) => {
            // mul-by-invert: the quotient needs the numerator past the
            // denominator's valuation and the denominator past twice it.
            let (la, _) = val_bounds(a);
            let (_, hb) = val_bounds(b);
            let pad_b = clamp_pad(hb).max(0);
            let sa = eval_node(a, ring, target + pad_b)?;
            let sb = eval_node(b, ring, target + 2 * pad_b - clamp_pad(la.min(0)))?;
            Ok(sa.mul(&sb.invert()?))
        }
        Expr::Pow(a, k) => {
            let (la, ha) = val_bounds(a);
            let pad = if *k >= 0 {
                -(k - 1).max(0) * clamp_pad(la.min(0))
            } else {
                (k.abs() + 1) * clamp_pad(ha).max(0) - clamp_pad(la.min(0))
            };
            let sa = eval_node(a, ring, target + pad)?;
            sa.pow_int(*k)
        }
        Expr::Huff { k, inner } => Ok(eval_node(inner, ring, target)?.huff(*k)),
        Expr::ExtractAp { m, j, inner } => {
            let t = m
                .checked_mul(target.max(0))
                .and_then(|v| v.checked_add(*j))
                .ok_or(Error::InsufficientPrecision {
                    needed: target,
                    have: MAX_WORKING_ORDER,
                })?;
            Ok(eval_node(inner, ring, t)?.extract_ap(*m, *j))
        }
        Expr::SubstPow { k, inner } => {
            let t = crate::series::ceil_div(target - k + 1, *k);
            Ok(eval_node(inner, ring, t)?.subst_power(*k))
        }
    }
}

/// Evaluate an expression so that the result is tracked to at least
/// `order`. Retries with extra working precision when interior
/// cancellation costs order; fails with insufficient precision if four
/// attempts cannot reach the target.
pub fn eval<R: CoeffRing>(e: &Expr, order: i64, ring: &R) -> Result<QSeries<R>> {
    let mut extra = 0i64;
    let mut last = eval_node(e, ring, order)?;
    for _ in 0..4 {
        if last.order() >= order {
            return Ok(last);
        }
        extra += (order - last.order()) + 8;
        last = eval_node(e, ring, order + extra)?;
    }
    if last.order() >= order {
        Ok(last)
    } else {
        Err(Error::InsufficientPrecision {
            needed: order,
            have: last.order(),
        })
    }
}

/// Evaluate with arbitrary-precision integer coefficients.
pub fn eval_exact(e: &Expr, order: i64) -> Result<QSeries<Exact>> {
    eval(e, order, &Exact)
}

/// Evaluate with coefficients modulo `m`.
pub fn eval_mod(e: &Expr, order: i64, m: u64) -> Result<QSeries<Modular>> {
    eval(e, order, &Modular::new(m))
}

// Printing ----------------------------------------------------------------

fn qpow_str(sign: i8, k: i64) -> String {
    let s = if sign < 0 { "-" } else { "" };
    if k == 1 {
        format!("{}q", s)
    } else {
        format!("{}q^{}", s, k)
    }
}

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    fn fmt_prec(&self, f: &mut std::fmt::Formatter<'_>, min_prec: u8) -> std::fmt::Result {
        let prec = self.prec();
        let parens = prec < min_prec;
        if parens {
            f.write_str("(")?;
        }
        match self {
            Expr::Int(c) => write!(f, "{}", c)?,
            Expr::Q => f.write_str("q")?,
            Expr::EtaF(k) => write!(f, "f{}", k)?,
            Expr::Phi { sign, k } => write!(f, "phi({})", qpow_str(*sign, *k))?,
            Expr::Psi { k } => write!(f, "psi({})", qpow_str(1, *k))?,
            Expr::Rrq { k } => write!(f, "R({})", qpow_str(1, *k))?,
            Expr::Theta { a, b } => write!(
                f,
                "theta({},{})",
                qpow_str(a.sign, a.exponent),
                qpow_str(b.sign, b.exponent)
            )?,
            Expr::Lam { k } => write!(f, "lam({})", qpow_str(1, *k))?,
            Expr::Neg(x) => {
                f.write_str("-")?;
                x.fmt_prec(f, 3)?;
            }
            Expr::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                f.write_str(" + ")?;
                b.fmt_prec(f, 2)?;
            }
            Expr::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                f.write_str(" - ")?;
                b.fmt_prec(f, 2)?;
            }
            Expr::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                f.write_str("*")?;
                b.fmt_prec(f, 3)?;
            }
            Expr::Div(a, b) => {
                a.fmt_prec(f, 2)?;
                f.write_str("/")?;
                b.fmt_prec(f, 3)?;
            }
            Expr::Pow(a, k) => {
                a.fmt_prec(f, 5)?;
                write!(f, "^{}", k)?;
            }
            Expr::Huff { k, inner } => write!(f, "H({}; {})", k, inner)?,
            Expr::ExtractAp { m, j, inner } => write!(f, "AP({},{}; {})", m, j, inner)?,
            Expr::SubstPow { k, inner } => write!(f, "sub({}; {})", k, inner)?,
            Expr::NegQ(x) => write!(f, "negq({})", x)?,
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_expr;
    use crate::special::{family_gf, FamilyName};

    #[test]
    fn eval_simple_products() {
        let e = parse_expr("f1^4*f5^4").unwrap();
        let s = eval_exact(&e, 16).unwrap();
        assert_eq!(s.coeff(0).unwrap(), 1.into());
        assert_eq!(s.coeff(15).unwrap(), (-64).into());
        let direct = family_gf(&Exact, FamilyName::Pstar, 16);
        assert!(s.eq_to_order(&direct, 16).unwrap());
    }

    #[test]
    fn eval_cancels_q_shift() {
        // q^-1 * lam(q) = f1^4 f5^4
        let e = parse_expr("lam(q)/q").unwrap();
        let s = eval_exact(&e, 40).unwrap();
        let direct = family_gf(&Exact, FamilyName::Pstar, 40);
        assert!(s.eq_to_order(&direct, 40).unwrap());
    }

    #[test]
    fn eval_extract_ap_reaches_requested_order() {
        let e = parse_expr("AP(16,7; f1^4*f5^4)").unwrap();
        let s = eval_exact(&e, 40).unwrap();
        assert!(s.order() >= 40);
        assert!(s.is_zero());
    }

    #[test]
    fn eval_division_of_laurent_series() {
        // (lam(q^2)/lam(q)) has valuation 1 and unit leading coefficient
        let e = parse_expr("lam(q^2)/lam(q)").unwrap();
        let s = eval_exact(&e, 25).unwrap();
        assert!(s.order() >= 25);
        assert_eq!(s.valuation(), 1);
        assert_eq!(s.coeff(1).unwrap(), 1.into());
    }

    #[test]
    fn eval_mod_matches_exact_reduction() {
        for src in [
            "f1^4*f5^4",
            "f2^5*f5^5/(f1*f10)",
            "H(2; lam(q)) + 4*lam(q^2) + 8*lam(q^4)",
            "AP(5,4; f1^4*f5^4)",
            "negq(f1*f2^3) - q^2*phi(-q)",
        ] {
            let e = parse_expr(src).unwrap();
            for m in [2u64, 8, 125, 343] {
                let exact = eval_exact(&e, 60).unwrap().reduce_mod(m);
                let modular = eval_mod(&e, 60, m).unwrap();
                assert!(
                    exact.eq_to_order(&modular, 60).unwrap(),
                    "{} mod {}",
                    src,
                    m
                );
            }
        }
    }

    #[test]
    fn eval_division_by_zero_series_fails() {
        let e = parse_expr("f1/(f2 - f2)").unwrap();
        assert!(matches!(eval_exact(&e, 10), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn printer_round_trips() {
        for src in [
            "f1^4*f5^4",
            "f4^10/(f2^2*f8^4) - 4*q*f2^2*f8^4/f4^2",
            "H(2; lam(q)) + 4*lam(q^2) + 8*lam(q^4)",
            "AP(7,6; f1^5*f7^5/(f2*f14))",
            "-2*q*theta(-q^15,-q^35) + 2*q^4*theta(-q^5,-q^45) + phi(-q^25)",
            "f25*(1/R(q^5) - q - q^2*R(q^5))",
            "sub(5; psi(q))^-2",
        ] {
            let ast = parse_expr(src).unwrap();
            let printed = ast.to_string();
            let reparsed = parse_expr(&printed)
                .unwrap_or_else(|e| panic!("printed form {:?} failed to parse: {}", printed, e));
            assert_eq!(ast, reparsed, "round trip through {:?}", printed);
        }
    }
}
