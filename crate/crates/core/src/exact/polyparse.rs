//! Text form of polynomials: `3*x^2*y - 1/2*z + (x+y)^3`.

use crate::error::{Error, Result};
use crate::exact::poly::MultiPoly;
use crate::exact::scalar::{parse_rational, BaseRing};

/// Parse `s` over `ring` with the given variable names.
pub fn parse_poly(s: &str, names: &[&str], ring: BaseRing) -> Result<MultiPoly> {
    let toks = tokenize(s)?;
    let mut p = Parser { toks, pos: 0, names, ring };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Invalid(format!("trailing input in polynomial '{s}'")));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Name(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Tok::Num(cs[st..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Name(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Invalid(format!("unexpected character '{c}' in polynomial")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    names: &'a [&'a str],
    ring: BaseRing,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let neg = self.eat('-');
        if !neg {
            self.eat('+');
        }
        let mut acc = self.term()?;
        if neg {
            acc = -&acc;
        }
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.power()?;
            } else if self.eat('/') {
                let d = match self.toks.get(self.pos) {
                    Some(Tok::Num(n)) => n.clone(),
                    _ => return Err(Error::Invalid("only numeric division is supported".into())),
                };
                self.pos += 1;
                let q = parse_rational(&format!("1/{d}")).ok_or_else(|| Error::Invalid("division by zero".into()))?;
                let inv = self.ring.embed(&q).ok_or_else(|| Error::Invalid(format!("{d} is not invertible")))?;
                acc = acc.scale(&inv);
            } else if matches!(self.peek(), Some(Tok::Name(_)) | Some(Tok::Op('('))) {
                acc = &acc * &self.power()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.eat('^') {
            let e = match self.toks.get(self.pos) {
                Some(Tok::Num(n)) => n.parse::<u32>().map_err(|_| Error::Invalid("bad exponent".into()))?,
                _ => return Err(Error::Invalid("exponent must be a non-negative integer".into())),
            };
            self.pos += 1;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        let n = self.names.len();
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                let q = parse_rational(&s).expect("digits");
                Ok(MultiPoly::constant(n, self.ring.embed(&q).expect("integer")))
            }
            Some(Tok::Name(s)) => {
                self.pos += 1;
                let i = self.names.iter().position(|x| *x == s).ok_or_else(|| Error::Invalid(format!("unknown variable '{s}'")))?;
                Ok(MultiPoly::var(n, i).scale(&self.ring.int(1)))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Invalid("missing ')'".into()));
                }
                Ok(e)
            }
            t => Err(Error::Invalid(format!("unexpected token {t:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let names = ["x", "y"];
        let p = parse_poly("3*x^2*y - 1/2*y + (x+y)^2", &names, BaseRing::Rationals).unwrap();
        let s = p.fmt_with(&["x".into(), "y".into()]);
        let q = parse_poly(&s, &names, BaseRing::Rationals).unwrap();
        assert_eq!(p, q);
        assert!(parse_poly("x + w", &names, BaseRing::Rationals).is_err());
        let m = parse_poly("2x + 7", &names, BaseRing::fp(7)).unwrap();
        assert_eq!(m, MultiPoly::var(2, 0).scale(&BaseRing::fp(7).int(2)));
    }
}
