//! Text form `[a0; a1, a2, ...]` with `(...)` around the period and a
//! trailing `oo` for the ∞-tail.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use super::{CFExpansion, Tail};
use crate::error::Error;

fn join(xs: &[BigInt]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for CFExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items: Vec<String> = self.body.iter().map(|x| x.to_string()).collect();
        match &self.tail {
            Tail::None => {}
            Tail::Infinity => items.push("oo".into()),
            Tail::Periodic(p) => items.push(format!("({})", join(p))),
        }
        if items.is_empty() {
            write!(f, "[{}]", self.a0)
        } else {
            write!(f, "[{}; {}]", self.a0, items.join(", "))
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<BigInt>, Error> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad partial quotient {t:?}"))))
        .collect()
}

impl FromStr for CFExpansion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = |why: &str| Error::Parse(format!("{why} in {s:?}"));
        let inner = s.trim().strip_prefix('[').and_then(|t| t.strip_suffix(']')).ok_or_else(|| bad("missing brackets"))?;
        let (a0, rest) = match inner.split_once(';') {
            Some((a, r)) => (a, r.trim()),
            None => (inner, ""),
        };
        let a0: BigInt = a0.trim().parse().map_err(|_| bad("bad a0"))?;
        if inner.contains(';') && rest.is_empty() {
            return Err(bad("empty list after ';'"));
        }
        if let Some(open) = rest.find('(') {
            let close = rest.rfind(')').ok_or_else(|| bad("unclosed period"))?;
            if close < open || !rest[close + 1..].trim().is_empty() {
                return Err(bad("text after period"));
            }
            let head = rest[..open].trim().trim_end_matches(',');
            let period = parse_list(&rest[open + 1..close])?;
            return CFExpansion::periodic(a0, parse_list(head)?, period);
        }
        let items: Vec<&str> = rest.split(',').map(str::trim).collect();
        match items.split_last() {
            Some((&"oo", head)) => CFExpansion::with_infinity_tail(a0, parse_list(&head.join(","))?),
            _ => CFExpansion::finite(a0, parse_list(rest)?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for s in ["[0; 2, 3, oo]", "[1; (2)]", "[2; (1, 4)]", "[2]", "[2; oo]", "[0; 1, 1]", "[3; 1, 2, (5, 6)]"] {
            let e: CFExpansion = s.parse().unwrap();
            assert_eq!(e.to_string(), s);
        }
    }

    #[test]
    fn rejects_malformed() {
        for s in ["0; 2", "[0; 2, x]", "[0; (2]", "[0; (2), 3]", "[0; 0, 2]", "[-1; 2]", "[0;]", "[0; ()]"] {
            assert!(s.parse::<CFExpansion>().is_err(), "{s}");
        }
    }

    #[test]
    fn tolerates_spacing() {
        let e: CFExpansion = " [ 0 ;2,3 , oo ] ".parse().unwrap();
        assert_eq!(e.to_string(), "[0; 2, 3, oo]");
    }
}
