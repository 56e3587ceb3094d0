//! Arithmetic expressions over the chart coordinates `x1..xn`.
//!
//! Grammar (lowest precedence first):
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | 'x' index | func '(' sum ')' | '(' sum ')'
//! func    := 'exp' | 'sin' | 'cos'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so
//! `-x1^2` is `-(x1^2)`.

use thiserror::Error;
use weylscope_core::jet::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message} at position {position}")]
pub struct ExprError {
    /// Byte offset into the source, 0-based.
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// 0-based coordinate index.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Var(usize),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn err(position: usize, message: impl Into<String>) -> ExprError {
    ExprError {
        position,
        message: message.into(),
    }
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent part such as 1e-3
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| err(start, format!("malformed number '{text}'")))?;
            out.push((start, Tok::Num(v)));
            continue;
        }
        if c.is_ascii_alphabetic() {
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let word = &src[start..i];
            let tok = match word.strip_prefix('x') {
                Some(digits) if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) => {
                    let k: usize = digits.parse().map_err(|_| err(start, format!("bad variable '{word}'")))?;
                    if k == 0 {
                        return Err(err(start, "variables are numbered from x1"));
                    }
                    Tok::Var(k - 1)
                }
                _ => Tok::Ident(word.to_string()),
            };
            out.push((start, tok));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => return Err(err(start, format!("unexpected character '{c}'"))),
        };
        out.push((start, tok));
        i += c.len_utf8();
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.product()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.bump();
            let rhs = self.product()?;
            lhs = if op == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.bump();
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn expect_rparen(&mut self, open: usize) -> Result<(), ExprError> {
        match self.peek() {
            Some(Tok::RParen) => {
                self.bump();
                Ok(())
            }
            _ => Err(err(self.here(), format!("expected ')' to close '(' at position {open}"))),
        }
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let at = self.here();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::Var(k)) => Ok(Expr::Var(k)),
            Some(Tok::LParen) => {
                let inner = self.sum()?;
                self.expect_rparen(at)?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                let f = match name.as_str() {
                    "exp" => Func::Exp,
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    _ => return Err(err(at, format!("unknown name '{name}'"))),
                };
                let open = self.here();
                if self.bump() != Some(Tok::LParen) {
                    return Err(err(open, format!("expected '(' after '{name}'")));
                }
                let arg = self.sum()?;
                self.expect_rparen(open)?;
                Ok(Expr::Call(f, Box::new(arg)))
            }
            Some(Tok::Op(c)) => Err(err(at, format!("unexpected operator '{c}'"))),
            Some(Tok::RParen) => Err(err(at, "unexpected ')'")),
            None => Err(err(at, "unexpected end of expression")),
        }
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self, ExprError> {
        let toks = tokenize(src)?;
        let mut p = Parser {
            toks,
            pos: 0,
            end: src.len(),
        };
        let e = p.sum()?;
        if p.pos < p.toks.len() {
            return Err(err(p.here(), "unexpected trailing input"));
        }
        Ok(e)
    }

    /// Largest variable index used plus one (0 for constants).
    pub fn arity(&self) -> usize {
        match self {
            Expr::Num(_) => 0,
            Expr::Var(k) => k + 1,
            Expr::Neg(a) | Expr::Call(_, a) => a.arity(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.arity().max(b.arity())
            }
        }
    }

    /// Value of a variable-free subtree.
    fn constant(&self) -> Option<f64> {
        Some(match self {
            Expr::Num(v) => *v,
            Expr::Var(_) => return None,
            Expr::Neg(a) => -a.constant()?,
            Expr::Add(a, b) => a.constant()? + b.constant()?,
            Expr::Sub(a, b) => a.constant()? - b.constant()?,
            Expr::Mul(a, b) => a.constant()? * b.constant()?,
            Expr::Div(a, b) => a.constant()? / b.constant()?,
            Expr::Pow(a, b) => {
                let (a, b) = (a.constant()?, b.constant()?);
                if b.fract() == 0.0 && b.abs() <= 64.0 {
                    a.powi(b as i32)
                } else {
                    a.powf(b)
                }
            }
            Expr::Call(f, a) => {
                let v = a.constant()?;
                match f {
                    Func::Exp => v.exp(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                }
            }
        })
    }

    pub fn eval<T: Scalar>(&self, x: &[T]) -> T {
        match self {
            Expr::Num(v) => x[0].lift(*v),
            Expr::Var(k) => x[*k].clone(),
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, b) => {
                let base = a.eval(x);
                match b.constant() {
                    Some(p) if p.fract() == 0.0 && p.abs() <= 64.0 => base.powi(p as i32),
                    Some(p) => base.powf(p),
                    None => (b.eval(x) * base.ln()).exp(),
                }
            }
            Expr::Call(f, a) => {
                let v = a.eval(x);
                match f {
                    Func::Exp => v.exp(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ev(src: &str, x: &[f64]) -> f64 {
        Expr::parse(src).unwrap().eval(x)
    }

    #[test]
    fn precedence_and_associativity() {
        let x = [2.0, 3.0];
        assert_eq!(ev("1+2*3", &x), 7.0);
        assert_eq!(ev("(1+2)*3", &x), 9.0);
        assert_eq!(ev("2^3^2", &x), 512.0);
        assert_eq!(ev("-x1^2", &x), -4.0);
        assert_eq!(ev("x1 - x2 - 1", &x), -2.0);
        assert_eq!(ev("8/2/2", &x), 2.0);
        assert_eq!(ev("x1^-1", &x), 0.5);
        assert_eq!(ev("1.5e1 + 2E-1", &x), 15.2);
    }

    #[test]
    fn functions_and_general_powers() {
        let x = [0.5, 2.0];
        assert!((ev("exp(x1)*cos(x2) - sin(x1)", &x) - (0.5f64.exp() * 2.0f64.cos() - 0.5f64.sin())).abs() < 1e-15);
        assert!((ev("x2^x1", &x) - 2.0f64.powf(0.5)).abs() < 1e-15);
        assert!((ev("x2^0.5", &x) - 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_positions() {
        let e = Expr::parse("1+*x1").unwrap_err();
        assert_eq!(e.position, 2);
        assert_eq!(Expr::parse("(1+x1").unwrap_err().position, 5);
        assert_eq!(Expr::parse("1 + foo(2)").unwrap_err().position, 4);
        assert_eq!(Expr::parse("x0").unwrap_err().position, 0);
        assert_eq!(Expr::parse("1 2").unwrap_err().position, 2);
        assert_eq!(Expr::parse("2 $ 3").unwrap_err().position, 2);
        assert!(Expr::parse("").is_err());
    }

    #[test]
    fn arity_counts_highest_variable() {
        assert_eq!(Expr::parse("1+x1*x4").unwrap().arity(), 4);
        assert_eq!(Expr::parse("3").unwrap().arity(), 0);
    }

    fn show(e: &Expr) -> String {
        match e {
            Expr::Num(v) => format!("{v:?}"),
            Expr::Var(k) => format!("x{}", k + 1),
            Expr::Neg(a) => format!("(-{})", show(a)),
            Expr::Add(a, b) => format!("({}+{})", show(a), show(b)),
            Expr::Sub(a, b) => format!("({}-{})", show(a), show(b)),
            Expr::Mul(a, b) => format!("({}*{})", show(a), show(b)),
            Expr::Div(a, b) => format!("({}/{})", show(a), show(b)),
            Expr::Pow(a, b) => format!("({}^{})", show(a), show(b)),
            Expr::Call(f, a) => format!("{}({})", format!("{f:?}").to_lowercase(), show(a)),
        }
    }

    fn tree() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![(0.0..10.0f64).prop_map(Expr::Num), (0..3usize).prop_map(Expr::Var)];
        leaf.prop_recursive(4, 24, 2, |inner| {
            let b = |e: Expr| Box::new(e);
            prop_oneof![
                inner.clone().prop_map(move |a| Expr::Neg(b(a))),
                (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Add(b(x), b(y))),
                (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Sub(b(x), b(y))),
                (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Mul(b(x), b(y))),
                inner.clone().prop_map(move |a| Expr::Call(Func::Sin, b(a))),
                inner.prop_map(move |a| Expr::Call(Func::Cos, b(a))),
            ]
        })
    }

    proptest! {
        #[test]
        fn printed_trees_parse_back(e in tree()) {
            let parsed = Expr::parse(&show(&e)).unwrap();
            let x = [0.3, -1.2, 2.5];
            prop_assert_eq!(parsed.eval(&x), e.eval(&x));
        }
    }
}
