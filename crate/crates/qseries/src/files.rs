//! Plain-text identity and claim files.
//!
//! Both formats are line oriented: `[block]` headers, `key = value`
//! lines, `#` comments, blank lines ignored. Identity files hold
//! `[identity]` blocks (keys `name`, `lhs`, `rhs`, optional `order`,
//! `source`). Claim files hold `[congruence]` blocks (`name`, `series`,
//! `m`, `j`, `mod`, `nmax`), `[family]` blocks (`name`, `series`, `p`,
//! `c`, `offset` as a symbolic token like `p^a-1` or `2p^a-1`, `modexp`
//! with modulus `2^modexp * p^alpha`, `alphamax`, `nmax`), and
//! `[scalar]` blocks (`name`, `series`, `m`, `j`, `scalar`, `shift`,
//! `nmax`).

use crate::catalog::IdentityEntry;
use crate::congruence::{CongruenceClaim, FamilyClaim, ScalarRelationClaim};
use crate::error::{Error, Result};
use crate::parse::parse_expr;

/// Any claim block from a claim file.
#[derive(Clone, Debug)]
pub enum ClaimKind {
    Congruence(CongruenceClaim),
    Family(FamilyClaim),
    Scalar(ScalarRelationClaim),
}

impl ClaimKind {
    pub fn name(&self) -> &str {
        match self {
            ClaimKind::Congruence(c) => &c.name,
            ClaimKind::Family(f) => &f.name,
            ClaimKind::Scalar(s) => &s.name,
        }
    }
}

struct Block {
    kind: String,
    line: usize,
    fields: Vec<(String, String, usize)>,
}

impl Block {
    fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, _)| v.as_str())
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| Error::File {
            line: self.line,
            msg: format!("[{}] block is missing key {:?}", self.kind, key),
        })
    }

    fn require_int(&self, key: &str) -> Result<i64> {
        let raw = self.require(key)?;
        raw.parse().map_err(|_| Error::File {
            line: self.line,
            msg: format!("key {:?} is not an integer: {:?}", key, raw),
        })
    }

    fn expr(&self, key: &str) -> Result<crate::expr::Expr> {
        let raw = self.require(key)?;
        parse_expr(raw).map_err(|e| Error::File {
            line: self.line,
            msg: format!("key {:?}: {}", key, e),
        })
    }
}

fn split_blocks(text: &str) -> Result<Vec<Block>> {
    let mut blocks: Vec<Block> = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(p) => &raw_line[..p],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or(Error::File {
                line: line_no,
                msg: "unterminated block header".into(),
            })?;
            blocks.push(Block {
                kind: name.trim().to_string(),
                line: line_no,
                fields: Vec::new(),
            });
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(Error::File {
            line: line_no,
            msg: format!("expected `key = value`, got {:?}", line),
        })?;
        let block = blocks.last_mut().ok_or(Error::File {
            line: line_no,
            msg: "key outside of any [block]".into(),
        })?;
        block
            .fields
            .push((key.trim().to_string(), value.trim().to_string(), line_no));
    }
    Ok(blocks)
}

/// Parse an identity file into catalog entries.
pub fn parse_identity_file(text: &str) -> Result<Vec<IdentityEntry>> {
    let mut entries = Vec::new();
    for block in split_blocks(text)? {
        if block.kind != "identity" {
            return Err(Error::File {
                line: block.line,
                msg: format!("unexpected block [{}] in identity file", block.kind),
            });
        }
        entries.push(IdentityEntry {
            name: block.require("name")?.to_string(),
            lhs: block.expr("lhs")?,
            rhs: block.expr("rhs")?,
            source: block.get("source").unwrap_or_default().to_string(),
            default_order: block
                .get("order")
                .map(|v| {
                    v.parse().map_err(|_| Error::File {
                        line: block.line,
                        msg: format!("key \"order\" is not an integer: {:?}", v),
                    })
                })
                .transpose()?
                .unwrap_or(500),
        });
    }
    let mut names: Vec<&str> = entries.iter().map(|e| e.name.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::File {
            line: 0,
            msg: "duplicate identity names".into(),
        });
    }
    Ok(entries)
}

/// Offset token of a family block: `[c]p^a-k`, e.g. `p^a-1`, `2p^a-1`.
fn parse_offset_token(token: &str, line: usize) -> Result<(i64, i64)> {
    let bad = || Error::File {
        line,
        msg: format!("offset token {:?} is not of the form `[c]p^a-k`", token),
    };
    let token = token.trim();
    let (head, sub) = token.split_once("p^a-").ok_or_else(bad)?;
    let c = if head.is_empty() {
        1
    } else {
        head.parse().map_err(|_| bad())?
    };
    let k = sub.parse().map_err(|_| bad())?;
    if c < 1 || k < 1 {
        return Err(bad());
    }
    Ok((c, k))
}

/// Parse a claim file.
pub fn parse_claim_file(text: &str) -> Result<Vec<ClaimKind>> {
    let mut claims = Vec::new();
    for block in split_blocks(text)? {
        let name = block.require("name")?.to_string();
        let source = block.get("source").unwrap_or_default().to_string();
        match block.kind.as_str() {
            "congruence" => {
                let m = block.require_int("m")?;
                let j = block.require_int("j")?;
                let modulus = block.require_int("mod")?;
                if m < 1 || !(0..m).contains(&j) || modulus < 2 {
                    return Err(Error::File {
                        line: block.line,
                        msg: "need m >= 1, 0 <= j < m, mod >= 2".into(),
                    });
                }
                claims.push(ClaimKind::Congruence(CongruenceClaim {
                    name,
                    series: block.expr("series")?,
                    m,
                    j,
                    modulus: modulus as u64,
                    n_max: block.require_int("nmax")?,
                    source,
                }));
            }
            "family" => {
                let p = block.require_int("p")?;
                let (token_c, offset_sub) =
                    parse_offset_token(block.require("offset")?, block.line)?;
                let c = match block.get("c") {
                    Some(v) => v.parse().map_err(|_| Error::File {
                        line: block.line,
                        msg: format!("key \"c\" is not an integer: {:?}", v),
                    })?,
                    None => token_c,
                };
                if c != token_c {
                    return Err(Error::File {
                        line: block.line,
                        msg: format!("offset token says c={}, key says c={}", token_c, c),
                    });
                }
                let modexp = block.require_int("modexp")?;
                if p < 2 || !(0..=16).contains(&modexp) {
                    return Err(Error::File {
                        line: block.line,
                        msg: "need p >= 2 and 0 <= modexp <= 16".into(),
                    });
                }
                claims.push(ClaimKind::Family(FamilyClaim {
                    name,
                    series: block.expr("series")?,
                    p,
                    c,
                    offset_sub,
                    mod_coef: 1u64 << modexp,
                    alpha_max: block.require_int("alphamax")? as u32,
                    n_max: block.require_int("nmax")?,
                    source,
                }));
            }
            "scalar" => {
                let m = block.require_int("m")?;
                let j = block.require_int("j")?;
                if m < 2 || !(0..m).contains(&j) {
                    return Err(Error::File {
                        line: block.line,
                        msg: "need m >= 2 and 0 <= j < m".into(),
                    });
                }
                claims.push(ClaimKind::Scalar(ScalarRelationClaim {
                    name,
                    series: block.expr("series")?,
                    m,
                    j,
                    scalar: block.require_int("scalar")?,
                    shift: block.require_int("shift")?,
                    n_max: block.require_int("nmax")?,
                    source,
                }));
            }
            other => {
                return Err(Error::File {
                    line: block.line,
                    msg: format!("unknown block [{}] in claim file", other),
                });
            }
        }
    }
    Ok(claims)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_file_round_trip() {
        let text = "\
# a comment
[identity]
name = my_id
lhs = f1^4
rhs = f4^10/(f2^2*f8^4) - 4*q*f2^2*f8^4/f4^2
order = 120

[identity]
name = second
lhs = q
rhs = q
";
        let entries = parse_identity_file(text).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].name, "my_id");
        assert_eq!(entries[0].default_order, 120);
        assert_eq!(entries[1].default_order, 500);
    }

    #[test]
    fn claim_file_parses_all_kinds() {
        let text = "\
[congruence]
name = a7
series = f2^6*f7^6/f1^2
m = 7
j = 6
mod = 7
nmax = 50

[family]
name = K_family
series = f1^2*f2^2*f7^2*f14^2
p = 7
c = 1
offset = p^a-2
modexp = 0
alphamax = 2
nmax = 20

[scalar]
name = L_rel
series = f1^5*f7^5/(f2*f14)
m = 7
j = 6
scalar = -7
shift = 0
nmax = 50
";
        let claims = parse_claim_file(text).unwrap();
        assert_eq!(claims.len(), 3);
        match &claims[1] {
            ClaimKind::Family(f) => {
                assert_eq!(f.offset_sub, 2);
                assert_eq!(f.mod_coef, 1);
            }
            other => panic!("{:?}", other.name()),
        }
    }

    #[test]
    fn offset_tokens() {
        assert_eq!(parse_offset_token("p^a-1", 1).unwrap(), (1, 1));
        assert_eq!(parse_offset_token("p^a-2", 1).unwrap(), (1, 2));
        assert_eq!(parse_offset_token("2p^a-1", 1).unwrap(), (2, 1));
        assert!(parse_offset_token("p^b-1", 1).is_err());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_identity_file("[identity]\nname = x\nlhs = f1(\nrhs = q\n").unwrap_err();
        match err {
            Error::File { line, .. } => assert_eq!(line, 1),
            other => panic!("{:?}", other),
        }
        let err = parse_claim_file("[congruence]\nname = x\n").unwrap_err();
        assert!(matches!(err, Error::File { .. }));
        let err = parse_identity_file("stray = line\n").unwrap_err();
        match err {
            Error::File { line, msg } => {
                assert_eq!(line, 1);
                assert!(msg.contains("outside"), "{}", msg);
            }
            other => panic!("{:?}", other),
        }
    }
}
