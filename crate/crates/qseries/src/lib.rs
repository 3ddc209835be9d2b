//! Exact q-series arithmetic for restricted-partition work.
//!
//! The crate provides:
//! - [`series`]: truncated Laurent series in `q` with pessimistic
//!   truncation-order tracking, dissection (`extract_ap`) and huffing
//!   operators;
//! - [`ring`]: the two coefficient backends (arbitrary-precision
//!   integers and word-sized residues) behind one interface;
//! - [`special`]: constructors for Euler products, Pochhammer symbols,
//!   theta functions, the Rogers-Ramanujan quotient, and the seven
//!   family generating functions;
//! - [`expr`] / [`parse`]: an expression AST with an evaluator and the
//!   text DSL for it;
//! - [`catalog`]: the built-in, machine-checkable identity catalog;
//! - [`congruence`]: congruence, family, and scalar-relation scanning;
//! - [`rigor`]: Ligozat modularity checks, cusp orders on Gamma_0(N),
//!   and valence-bound certificates that upgrade coefficient checks to
//!   proofs for pure eta-quotient identities;
//! - [`files`]: plain-text identity and claim file formats.

pub mod catalog;
pub mod congruence;
pub mod error;
pub mod expr;
pub mod files;
pub mod parse;
pub mod rigor;
pub mod ring;
pub mod series;
pub mod special;

pub use error::{Error, Result};
pub use expr::{eval, eval_exact, eval_mod, Expr};
pub use parse::parse_expr;
pub use ring::{CoeffRing, CoefficientMode, Exact, Modular};
pub use series::QSeries;
pub use special::{EtaQuotientSpec, FamilyName, ThetaArg};

/// Series with arbitrary-precision integer coefficients.
pub type ExactSeries = QSeries<Exact>;

/// Series with coefficients reduced modulo a word-sized modulus.
pub type ModularSeries = QSeries<Modular>;
