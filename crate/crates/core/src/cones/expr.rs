use std::fmt;

use num_traits::{One, Zero};

use super::ConeError;
use crate::arith::rational::{self, Rational};

/// Rational function of the parameters `alpha` and `g`; `a` abbreviates
/// `alpha / (1 - alpha)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(Rational),
    Alpha,
    A,
    G,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

impl std::ops::Neg for Expr {
    type Output = Expr;

    fn neg(self) -> Expr {
        match self {
            Expr::Num(x) => Expr::Num(-x),
            Expr::Neg(e) => *e,
            e => Expr::Neg(Box::new(e)),
        }
    }
}

impl Expr {
    pub fn zero() -> Self {
        Expr::Num(Rational::zero())
    }

    pub fn int(n: i64) -> Self {
        Expr::Num(rational::int(n))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(x) if x.is_zero())
    }

    pub fn eval(&self, alpha: &Rational, g: &Rational) -> Result<Rational, ConeError> {
        Ok(match self {
            Expr::Num(x) => x.clone(),
            Expr::Alpha => alpha.clone(),
            Expr::A => {
                let d = Rational::one() - alpha;
                if d.is_zero() {
                    return Err(ConeError::Domain("a = alpha/(1-alpha) undefined at alpha = 1".into()));
                }
                alpha / d
            }
            Expr::G => g.clone(),
            Expr::Neg(e) => -e.eval(alpha, g)?,
            Expr::Add(l, r) => l.eval(alpha, g)? + r.eval(alpha, g)?,
            Expr::Sub(l, r) => l.eval(alpha, g)? - r.eval(alpha, g)?,
            Expr::Mul(l, r) => l.eval(alpha, g)? * r.eval(alpha, g)?,
            Expr::Div(l, r) => {
                let d = r.eval(alpha, g)?;
                if d.is_zero() {
                    return Err(ConeError::Domain(format!("division by zero in {self}")));
                }
                l.eval(alpha, g)? / d
            }
        })
    }

    pub fn parse(s: &str) -> Result<Expr, ConeError> {
        let mut p = Parser { src: s, pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.error("trailing input"));
        }
        Ok(e)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => write!(f, "{x}"),
            Expr::Alpha => write!(f, "alpha"),
            Expr::A => write!(f, "a"),
            Expr::G => write!(f, "g"),
            Expr::Neg(e) => match **e {
                Expr::Num(_) | Expr::Alpha | Expr::A | Expr::G => write!(f, "-{e}"),
                _ => write!(f, "-({e})"),
            },
            Expr::Add(l, r) => write!(f, "({l}+{r})"),
            Expr::Sub(l, r) => write!(f, "({l}-{r})"),
            Expr::Mul(l, r) => write!(f, "{l}*{r}"),
            Expr::Div(l, r) => match &**r {
                Expr::Alpha | Expr::A | Expr::G => write!(f, "{l}/{r}"),
                Expr::Num(x) if x.is_integer() && *x >= Rational::zero() => write!(f, "{l}/{r}"),
                _ => write!(f, "{l}/({r})"),
            },
        }
    }
}

/// Recursive descent over `expr := term (('+'|'-') term)*`,
/// `term := unary (('*'|'/') unary)*`, `unary := '-' unary | atom`.
struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ConeError {
        ConeError::Parse(format!("{msg} at offset {} in {:?}", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expr(&mut self) -> Result<Expr, ConeError> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ConeError> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ConeError> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, ConeError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit() || c == '.') {
                    self.pos += 1;
                }
                let x = rational::parse_rational(&self.src[start..self.pos]).map_err(|_| self.error("bad number"))?;
                Ok(Expr::Num(x))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.src[self.pos..].starts_with(|c: char| c.is_ascii_alphanumeric()) {
                    self.pos += 1;
                }
                match &self.src[start..self.pos] {
                    "alpha" => Ok(Expr::Alpha),
                    "a" => Ok(Expr::A),
                    "g" => Ok(Expr::G),
                    other => Err(ConeError::Parse(format!("unknown symbol {other:?} in {:?}", self.src))),
                }
            }
            _ => Err(self.error("expected a number, symbol or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;

    #[test]
    fn parse_and_eval() {
        let (al, g) = (rat(1, 3), rat(2, 1));
        let cases = [
            ("1", rat(1, 1)),
            ("-alpha", rat(-1, 3)),
            ("a", rat(1, 2)),
            ("g*g-1/2", rat(7, 2)),
            ("-(1-alpha)*g", rat(-4, 3)),
            ("2.5*a", rat(5, 4)),
            ("alpha/(1-alpha)-a", rat(0, 1)),
            ("g/(g*alpha)", rat(3, 1)),
            ("1/(1/3)", rat(3, 1)),
        ];
        for (src, want) in cases {
            let e = Expr::parse(src).unwrap();
            assert_eq!(e.eval(&al, &g).unwrap(), want, "{src}");
            let again = Expr::parse(&e.to_string()).unwrap();
            assert_eq!(again.eval(&al, &g).unwrap(), want, "round trip of {src}");
        }
        assert!(Expr::parse("beta").is_err());
        assert!(Expr::parse("(1").is_err());
        assert!(Expr::parse("1/(g-2)").unwrap().eval(&al, &g).is_err());
    }
}
