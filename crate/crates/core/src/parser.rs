//! Polynomial expression syntax.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary ('*' unary)*
//! unary   := ('-' | '+') unary | power
//! power   := atom ('^' INTEGER)*
//! atom    := INTEGER | INTEGER '/' INTEGER | 'i' | 'x'k | 'z'j
//!          | 'conj' '(' expr ')' | '(' expr ')'
//! ```
//!
//! `z<j>` stands for `x<2j-1> + i*x<2j>`. Variables are real, so `conj(e)`
//! conjugates the coefficients of the expanded `e`. Multiplication is always
//! explicit and decimal literals are rejected.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::polycore::{GaussianRational, Monomial, Polynomial};

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(BigInt),
    Rational(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::Syntax { position, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    let skip_ws = |mut p: usize| {
        while p < bytes.len() && bytes[p].is_ascii_whitespace() {
            p += 1;
        }
        p
    };
    let read_digits = |p: usize| {
        let mut end = p;
        while end < bytes.len() && bytes[end].is_ascii_digit() {
            end += 1;
        }
        end
    };
    loop {
        pos = skip_ws(pos);
        if pos >= bytes.len() {
            break;
        }
        let start = pos;
        let c = bytes[pos];
        let tok = match c {
            b'+' => Token::Plus,
            b'-' => Token::Minus,
            b'*' => Token::Star,
            b'^' => Token::Caret,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b'/' => return Err(syntax(pos, "'/' is only allowed inside rational literals like 1/2")),
            b'0'..=b'9' => {
                let end = read_digits(pos);
                let num: BigInt = text[pos..end].parse().expect("digits");
                if end < bytes.len() && bytes[end] == b'.' {
                    return Err(syntax(
                        end,
                        "decimal literals are not supported; write a rational such as 1/2",
                    ));
                }
                let after = skip_ws(end);
                if after < bytes.len() && bytes[after] == b'/' {
                    let dstart = skip_ws(after + 1);
                    let dend = read_digits(dstart);
                    if dend == dstart {
                        return Err(syntax(dstart, "expected a denominator after '/'"));
                    }
                    let den: BigInt = text[dstart..dend].parse().expect("digits");
                    if den.is_zero() {
                        return Err(syntax(dstart, "zero denominator"));
                    }
                    pos = dend;
                    out.push((start, Token::Rational(BigRational::new(num, den))));
                } else {
                    pos = end;
                    out.push((start, Token::Int(num)));
                }
                continue;
            }
            b'.' => {
                return Err(syntax(
                    pos,
                    "decimal literals are not supported; write a rational such as 1/2",
                ))
            }
            c if c.is_ascii_alphabetic() => {
                let mut end = pos;
                while end < bytes.len() && bytes[end].is_ascii_alphanumeric() {
                    end += 1;
                }
                pos = end;
                out.push((start, Token::Ident(text[start..end].to_string())));
                continue;
            }
            _ => {
                let ch = text[pos..].chars().next().unwrap_or('?');
                return Err(syntax(pos, format!("unexpected character '{ch}'")));
            }
        };
        pos += 1;
        out.push((start, tok));
    }
    Ok(out)
}

/// Which family a variable reference names.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    /// Real coordinate `x<k>`.
    Real,
    /// Complex coordinate `z<j> = x<2j-1> + i*x<2j>`.
    Complex,
}

/// Parsed expression before expansion; indices are one-based as written.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Integer(BigInt),
    Rational(BigRational),
    ImaginaryUnit,
    Var { kind: VarKind, index: usize },
    Neg(Box<Expr>),
    Conj(Box<Expr>),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, u32),
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<()> {
        let at = self.offset();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(syntax(at, format!("expected {what}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut items = vec![self.term()?];
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    items.push(self.term()?);
                }
                Some(Token::Minus) => {
                    self.bump();
                    items.push(Expr::Neg(Box::new(self.term()?)));
                }
                _ => break,
            }
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Expr::Sum(items) })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut items = vec![self.unary()?];
        while let Some(Token::Star) = self.peek() {
            self.bump();
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Expr::Product(items) })
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(Token::Minus) => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Token::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let mut base = self.atom()?;
        while let Some(Token::Caret) = self.peek() {
            self.bump();
            let at = self.offset();
            match self.bump() {
                Some(Token::Int(n)) => {
                    let e: u32 = u32::try_from(&n)
                        .map_err(|_| syntax(at, "exponent is too large"))?;
                    base = Expr::Pow(Box::new(base), e);
                }
                Some(Token::Minus) => return Err(Error::NegativeExponent { position: at }),
                _ => return Err(syntax(at, "exponent must be a non-negative integer literal")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let at = self.offset();
        match self.bump() {
            Some(Token::Int(n)) => Ok(Expr::Integer(n)),
            Some(Token::Rational(r)) => Ok(Expr::Rational(r)),
            Some(Token::LParen) => {
                let e = self.expr()?;
                self.expect(Token::RParen, "')'")?;
                Ok(e)
            }
            Some(Token::Ident(name)) => {
                if name == "i" {
                    return Ok(Expr::ImaginaryUnit);
                }
                if name == "conj" {
                    self.expect(Token::LParen, "'(' after conj")?;
                    let e = self.expr()?;
                    self.expect(Token::RParen, "')'")?;
                    return Ok(Expr::Conj(Box::new(e)));
                }
                let (head, digits) = name.split_at(1);
                let kind = match head {
                    "x" => VarKind::Real,
                    "z" => VarKind::Complex,
                    _ => return Err(syntax(at, format!("unknown identifier '{name}'"))),
                };
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(syntax(at, format!("unknown identifier '{name}'")));
                }
                let index: usize = digits
                    .parse()
                    .map_err(|_| syntax(at, format!("bad variable index in '{name}'")))?;
                Ok(Expr::Var { kind, index })
            }
            Some(_) => Err(syntax(at, "expected a number, variable, 'i', 'conj' or '('")),
            None => Err(syntax(at, "unexpected end of input")),
        }
    }
}

/// Parses text into an expression tree without expanding it.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0, end: text.len() };
    let e = p.expr()?;
    if p.pos < p.tokens.len() {
        return Err(syntax(p.offset(), "unexpected trailing input"));
    }
    Ok(e)
}

impl Expr {
    /// Expands into a canonical polynomial in `nvars` real variables.
    pub fn to_polynomial(&self, nvars: usize) -> Result<Polynomial> {
        let constant = |c: GaussianRational| Polynomial::constant(nvars, c);
        Ok(match self {
            Expr::Integer(n) => constant(GaussianRational::real(BigRational::from_integer(n.clone()))),
            Expr::Rational(r) => constant(GaussianRational::real(r.clone())),
            Expr::ImaginaryUnit => constant(GaussianRational::imaginary_unit()),
            Expr::Var { kind: VarKind::Real, index } => {
                if *index == 0 || *index > nvars {
                    return Err(Error::VariableOutOfRange { name: format!("x{index}"), nvars });
                }
                Polynomial::variable(nvars, index - 1)?
            }
            Expr::Var { kind: VarKind::Complex, index } => {
                if *index == 0 || 2 * index > nvars {
                    return Err(Error::VariableOutOfRange { name: format!("z{index}"), nvars });
                }
                let re = Polynomial::variable(nvars, 2 * index - 2)?;
                let im = Polynomial::variable(nvars, 2 * index - 1)?;
                &re + &im.scale(&GaussianRational::imaginary_unit())
            }
            Expr::Neg(e) => -&e.to_polynomial(nvars)?,
            Expr::Conj(e) => e.to_polynomial(nvars)?.conj(),
            Expr::Sum(items) => {
                let mut acc = Polynomial::zero(nvars);
                for e in items {
                    acc = &acc + &e.to_polynomial(nvars)?;
                }
                acc
            }
            Expr::Product(items) => {
                let mut acc = Polynomial::one(nvars);
                for e in items {
                    acc = &acc * &e.to_polynomial(nvars)?;
                }
                acc
            }
            Expr::Pow(e, k) => e.to_polynomial(nvars)?.pow(*k),
        })
    }
}

/// Parses and expands `text` into a polynomial in `nvars` real variables.
pub fn parse(text: &str, nvars: usize) -> Result<Polynomial> {
    if nvars == 0 {
        return Err(Error::InvalidVariety("variable count must be positive".into()));
    }
    parse_expr(text)?.to_polynomial(nvars)
}

fn render_monomial(m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("x{}", i + 1)),
            _ => parts.push(format!("x{}^{}", i + 1, e)),
        }
    }
    parts.join("*")
}

/// Canonical text, terms in descending graded-lex order, e.g.
/// `x1^2 - x2^2 + 2*i*x1*x2`. The output parses back to the same polynomial.
pub fn render(p: &Polynomial) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (idx, (m, c)) in p.terms().rev().enumerate() {
        // Pull a leading minus out of purely real or purely imaginary
        // coefficients so sums read `a - b` rather than `a + -b`.
        let negative = (c.im().is_zero() && c.re().is_negative())
            || (c.re().is_zero() && c.im().is_negative());
        let mag = if negative { -c } else { c.clone() };
        if idx == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let mono = render_monomial(m);
        if mono.is_empty() {
            out.push_str(&mag.to_string());
        } else if mag.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&mag.to_string());
            out.push('*');
            out.push_str(&mono);
        }
    }
    out
}
