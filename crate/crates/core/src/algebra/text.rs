//! Canonical text form of scalars and polynomials, and its parser.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' exponent)?
//! exponent := int | '-' int | '(' '-'? int ')'
//! atom   := int | 'i' | 'pi' | 'sqrt' '(' expr ')' | ident | '(' expr ')'
//! ```
//!
//! Division and negative powers are only allowed for invertible constants, and
//! `sqrt` only accepts arguments equal to `2*pi`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use super::poly::{Poly, RESERVED_NAMES};
use super::scalar::{render_part, ExactScalar, Rational};
use crate::error::{Error, Result};

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let vars = self.vars();
        for (idx, (exps, c)) in self.terms().into_iter().enumerate() {
            let monomial: Vec<String> = exps
                .iter()
                .zip(vars)
                .filter(|(e, _)| **e > 0)
                .map(|(e, v)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
                .collect();
            let monomial = monomial.join("*");

            let (negative, body) = match c.as_homogeneous() {
                Some((grade, coefficient)) => {
                    let (neg, body) = render_part(grade, coefficient);
                    let body = match (body.as_str(), monomial.is_empty()) {
                        ("1", false) => monomial.clone(),
                        (_, true) => body,
                        (_, false) => format!("{body}*{monomial}"),
                    };
                    (neg, body)
                }
                None if monomial.is_empty() => (false, c.to_string()),
                None => (false, format!("({c})*{monomial}")),
            };
            match (idx, negative) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Poly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parser = Parser::new(s)?;
        let p = parser.expr()?;
        if let Some(tok) = parser.peek() {
            return Err(parser.error_at(tok.pos, format!("unexpected `{}`", tok.kind)));
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum TokenKind {
    Int(BigInt),
    Ident(String),
    Op(char),
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Int(v) => write!(f, "{v}"),
            TokenKind::Ident(s) => write!(f, "{s}"),
            TokenKind::Op(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: TokenKind,
    pos: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().map(|(_, c)| c).collect();
            let value = text.parse::<BigInt>().map_err(|e| Error::Parse {
                position: pos,
                message: e.to_string(),
            })?;
            out.push(Token {
                kind: TokenKind::Int(value),
                pos,
            });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let text: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push(Token {
                kind: TokenKind::Ident(text),
                pos,
            });
        } else if "+-*/^()".contains(c) {
            out.push(Token {
                kind: TokenKind::Op(c),
                pos,
            });
            i += 1;
        } else {
            return Err(Error::Parse {
                position: pos,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
    end: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self> {
        Ok(Self {
            tokens: tokenize(src)?,
            at: 0,
            end: src.len(),
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at)
    }

    fn pos(&self) -> usize {
        self.peek().map(|t| t.pos).unwrap_or(self.end)
    }

    fn error_at(&self, position: usize, message: String) -> Error {
        Error::Parse { position, message }
    }

    fn eat_op(&mut self, op: char) -> bool {
        if matches!(self.peek(), Some(Token { kind: TokenKind::Op(c), .. }) if *c == op) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, op: char) -> Result<()> {
        if self.eat_op(op) {
            Ok(())
        } else {
            Err(self.error_at(self.pos(), format!("expected `{op}`")))
        }
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            if self.eat_op('+') {
                acc = &acc + &self.term()?;
            } else if self.eat_op('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        loop {
            if self.eat_op('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat_op('/') {
                let pos = self.pos();
                let divisor = self.unary()?;
                let inv = self.invert_constant(&divisor, pos)?;
                acc = acc.scale(&inv);
            } else {
                return Ok(acc);
            }
        }
    }

    fn invert_constant(&self, p: &Poly, pos: usize) -> Result<ExactScalar> {
        let c = p
            .as_constant()
            .ok_or_else(|| self.error_at(pos, format!("cannot divide by non-constant `{p}`")))?;
        c.inv()
            .map_err(|_| self.error_at(pos, format!("cannot divide by `{c}`")))
    }

    fn unary(&mut self) -> Result<Poly> {
        if self.eat_op('-') {
            Ok(-self.unary()?)
        } else if self.eat_op('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if !self.eat_op('^') {
            return Ok(base);
        }
        let pos = self.pos();
        let exponent = self.exponent()?;
        if exponent >= 0 {
            let e = u32::try_from(exponent)
                .map_err(|_| self.error_at(pos, "exponent too large".into()))?;
            Ok(base.pow(e))
        } else {
            let inv = self.invert_constant(&base, pos)?;
            let e = u32::try_from(-exponent)
                .map_err(|_| self.error_at(pos, "exponent too large".into()))?;
            Ok(Poly::constant(inv.pow(e)))
        }
    }

    fn exponent(&mut self) -> Result<i64> {
        let parenthesised = self.eat_op('(');
        let negative = self.eat_op('-');
        let pos = self.pos();
        let value = match self.peek().cloned() {
            Some(Token {
                kind: TokenKind::Int(v),
                ..
            }) => {
                self.at += 1;
                i64::try_from(v).map_err(|_| self.error_at(pos, "exponent too large".into()))?
            }
            _ => return Err(self.error_at(pos, "expected an integer exponent".into())),
        };
        if parenthesised {
            self.expect_op(')')?;
        }
        Ok(if negative { -value } else { value })
    }

    fn atom(&mut self) -> Result<Poly> {
        let pos = self.pos();
        let tok = self
            .peek()
            .cloned()
            .ok_or_else(|| self.error_at(pos, "unexpected end of input".into()))?;
        self.at += 1;
        match tok.kind {
            TokenKind::Int(v) => Ok(Poly::constant(ExactScalar::from_rational(
                Rational::from_integer(v),
            ))),
            TokenKind::Op('(') => {
                let inner = self.expr()?;
                self.expect_op(')')?;
                Ok(inner)
            }
            TokenKind::Ident(name) => match name.as_str() {
                "i" => Ok(Poly::constant(ExactScalar::i())),
                "pi" => Ok(Poly::constant(ExactScalar::pi())),
                "sqrt" => {
                    self.expect_op('(')?;
                    let arg = self.expr()?;
                    self.expect_op(')')?;
                    if arg == Poly::constant(ExactScalar::two_pi_pow(1)) {
                        Ok(Poly::constant(ExactScalar::sqrt_two_pi()))
                    } else {
                        Err(self.error_at(pos, format!("sqrt is only defined for 2*pi, got `{arg}`")))
                    }
                }
                _ => {
                    debug_assert!(!RESERVED_NAMES.contains(&name.as_str()));
                    Ok(Poly::var(&name))
                }
            },
            TokenKind::Op(c) => Err(self.error_at(tok.pos, format!("unexpected `{c}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::{rational, rational_int, GaussianRational, Grade};
    use proptest::prelude::*;

    #[test]
    fn parses_rationals_and_pi() {
        let p: Poly = "(1/3)*pi^2".parse().unwrap();
        assert_eq!(
            p.as_constant().unwrap(),
            ExactScalar::homogeneous(rational(1, 3), Rational::from_integer(0.into()), 2)
        );
        let q: ExactScalar = "2*pi^2".parse().unwrap();
        assert_eq!(q.to_string(), "2*pi^2");
    }

    #[test]
    fn parses_complex_and_sqrt() {
        let c: ExactScalar = "i*(2/5)*pi^2*sqrt(2*pi)".parse().unwrap();
        assert_eq!(c.to_string(), "(2/5)*i*pi^2*sqrt(2*pi)");
        let back: ExactScalar = c.to_string().parse().unwrap();
        assert_eq!(back, c);
        assert!("sqrt(3)".parse::<Poly>().is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!("u/s".parse::<Poly>().is_err());
        assert!("u^-1".parse::<Poly>().is_err());
        assert!("3 +".parse::<Poly>().is_err());
        assert!("(u".parse::<Poly>().is_err());
        assert!("u $ s".parse::<Poly>().is_err());
        assert!("1/0".parse::<Poly>().is_err());
    }

    #[test]
    fn negative_powers_of_constants() {
        let c: ExactScalar = "pi^(-2)".parse().unwrap();
        assert_eq!(c.pi_power(), Some(-2));
        let d: ExactScalar = "(2*pi)^-1".parse().unwrap();
        assert_eq!(d, ExactScalar::two_pi_pow(-1));
    }

    #[test]
    fn mixed_grade_coefficients_round_trip() {
        let p: Poly = "(pi + 1)*u - 3".parse().unwrap();
        assert_eq!(p.to_string(), "(1 + pi)*u - 3");
        assert_eq!(p.to_string().parse::<Poly>().unwrap(), p);
    }

    fn arb_gaussian() -> impl Strategy<Value = GaussianRational> {
        (-9i64..9, 1i64..6, -9i64..9, 1i64..6)
            .prop_map(|(a, b, c, d)| GaussianRational::new(rational(a, b), rational(c, d)))
    }

    fn arb_scalar() -> impl Strategy<Value = ExactScalar> {
        prop::collection::vec((arb_gaussian(), -3i32..4, any::<bool>()), 0..3).prop_map(|parts| {
            parts
                .into_iter()
                .map(|(c, k, h)| {
                    ExactScalar::graded(
                        c,
                        Grade {
                            pi_power: k,
                            sqrt_two_pi: h,
                        },
                    )
                })
                .sum()
        })
    }

    fn arb_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec((arb_scalar(), 0u32..4, 0u32..4, 0u32..2), 0..5).prop_map(|terms| {
            terms.into_iter().fold(Poly::zero(), |acc, (c, a, b, d)| {
                &acc + &Poly::monomial(c, &[("u", a), ("s", b), ("phi", d)])
            })
        })
    }

    proptest! {
        #[test]
        fn canonical_text_round_trips(p in arb_poly()) {
            let text = p.to_string();
            let back: Poly = text.parse().unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn substituting_a_variable_for_itself_is_identity(p in arb_poly()) {
            prop_assert_eq!(p.substitute("s", &Poly::var("s")), p.clone());
            prop_assert_eq!(p.substitute("u", &Poly::var("u")), p);
        }

        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a - &a).is_zero());
        }
    }

    #[test]
    fn integer_rendering() {
        let p = Poly::constant(ExactScalar::from_rational(rational_int(-7)));
        assert_eq!(p.to_string(), "-7");
    }
}
