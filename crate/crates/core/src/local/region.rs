//! Region descriptors for local spectral spaces.
//!
//! ```text
//! region := "empty" | "disc" re "," im "," r | "rect" a ":" b ":" c ":" d
//!         | "union(" region ("," region)* ")" | "inter(" region ("," region)* ")"
//! ```
//!
//! Discs and rectangles are closed.

use std::fmt;
use std::str::FromStr;

use crate::linalg::C64;
use crate::spectra::Rect;

use super::LocalError;

#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    Empty,
    Disc { center: C64, radius: f64 },
    Rect(Rect),
    Union(Vec<Region>),
    Inter(Vec<Region>),
}

impl Region {
    pub fn disc(center: C64, radius: f64) -> Self {
        Region::Disc { center, radius }
    }

    pub fn contains(&self, z: C64) -> bool {
        match self {
            Region::Empty => false,
            Region::Disc { center, radius } => (z - center).norm() <= *radius,
            Region::Rect(r) => r.contains(z),
            Region::Union(parts) => parts.iter().any(|p| p.contains(z)),
            Region::Inter(parts) => parts.iter().all(|p| p.contains(z)),
        }
    }

    /// `self ∩ other`.
    pub fn intersect(&self, other: Region) -> Region {
        Region::Inter(vec![self.clone(), other])
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, name: &str, parts: &[Region]| {
            write!(f, "{name}(")?;
            for (k, p) in parts.iter().enumerate() {
                if k > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")
        };
        match self {
            Region::Empty => write!(f, "empty"),
            Region::Disc { center, radius } => write!(f, "disc {},{},{}", center.re, center.im, radius),
            Region::Rect(r) => write!(f, "rect {}:{}:{}:{}", r.re_min, r.re_max, r.im_min, r.im_max),
            Region::Union(parts) => list(f, "union", parts),
            Region::Inter(parts) => list(f, "inter", parts),
        }
    }
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, msg: &str) -> LocalError {
        LocalError::Precondition(format!("region descriptor at offset {}: {msg}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.s[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.s[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), LocalError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{tok}`")))
        }
    }

    fn number(&mut self) -> Result<f64, LocalError> {
        self.skip_ws();
        let rest = &self.s[self.pos..];
        let len = rest
            .char_indices()
            .find(|&(k, ch)| {
                !(ch.is_ascii_digit()
                    || ch == '.'
                    || ch == 'e'
                    || ch == 'E'
                    || ((ch == '-' || ch == '+') && (k == 0 || matches!(rest.as_bytes()[k - 1], b'e' | b'E'))))
            })
            .map_or(rest.len(), |(k, _)| k);
        let v = rest[..len]
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.err("expected a number"))?;
        self.pos += len;
        Ok(v)
    }

    fn list(&mut self) -> Result<Vec<Region>, LocalError> {
        let mut parts = vec![self.region()?];
        while self.eat(",") {
            parts.push(self.region()?);
        }
        self.expect(")")?;
        Ok(parts)
    }

    fn region(&mut self) -> Result<Region, LocalError> {
        if self.eat("empty") {
            Ok(Region::Empty)
        } else if self.eat("disc") {
            let re = self.number()?;
            self.expect(",")?;
            let im = self.number()?;
            self.expect(",")?;
            let r = self.number()?;
            if r < 0.0 {
                return Err(self.err("disc radius must be >= 0"));
            }
            Ok(Region::disc(C64::new(re, im), r))
        } else if self.eat("rect") {
            let mut v = [0.0; 4];
            for (k, slot) in v.iter_mut().enumerate() {
                if k > 0 {
                    self.expect(":")?;
                }
                *slot = self.number()?;
            }
            Ok(Region::Rect(Rect::new(v[0], v[1], v[2], v[3])?))
        } else if self.eat("union(") {
            Ok(Region::Union(self.list()?))
        } else if self.eat("inter(") {
            Ok(Region::Inter(self.list()?))
        } else {
            Err(self.err("expected empty, disc, rect, union( or inter("))
        }
    }
}

impl FromStr for Region {
    type Err = LocalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut cur = Cursor { s, pos: 0 };
        let r = cur.region()?;
        cur.skip_ws();
        if cur.pos != s.len() {
            return Err(cur.err("trailing input"));
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn parse_and_contain() {
        let r: Region = "union(disc 1,0,0.1, rect -3:-2:-1:1)".parse().unwrap();
        assert!(r.contains(c(1.05, 0.0)));
        assert!(r.contains(c(-2.5, 0.5)));
        assert!(!r.contains(c(0.0, 0.0)));
        let e: Region = "empty".parse().unwrap();
        assert!(!e.contains(c(0.0, 0.0)));
        let i: Region = "inter(disc 0,0,1, rect 0:2:-2:2)".parse().unwrap();
        assert!(i.contains(c(0.5, 0.0)) && !i.contains(c(-0.5, 0.0)));
        let neg: Region = "disc -1e-1,-2,3e0".parse().unwrap();
        assert_eq!(neg, Region::disc(c(-0.1, -2.0), 3.0));
    }

    #[test]
    fn display_round_trips() {
        let r: Region = "union(disc 1,0,0.1, inter(rect -3:-2:-1:1, empty))".parse().unwrap();
        assert_eq!(r.to_string().parse::<Region>().unwrap(), r);
    }

    #[test]
    fn malformed_descriptors() {
        for s in ["disc 1,0", "rect 1:0:0:1", "union()", "blob", "disc 0,0,-1", "empty x"] {
            assert!(s.parse::<Region>().is_err(), "{s}");
        }
    }
}
