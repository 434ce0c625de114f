//! A small language for real functions of one variable `x`.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '/') factor)*
//! factor  := unary ('^' factor)?
//! unary   := '-'? primary
//! primary := number | 'x' | ident '(' args ')' | '(' expr ')'
//! ```
//!
//! Unary minus binds tighter than `^`, so `-x^2` is `(-x)^2`, and `^` is
//! right-associative. Functions: `exp ln sqrt gamma abs` (one argument) and
//! `pow` (two).

use std::fmt;

use crate::error::{Error, Result};
use crate::special;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Gamma,
    Abs,
    Pow,
}

impl Func {
    pub const ALL: [Func; 6] = [
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
        Func::Gamma,
        Func::Abs,
        Func::Pow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Gamma => "gamma",
            Func::Abs => "abs",
            Func::Pow => "pow",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Pow => 2,
            _ => 1,
        }
    }

    fn lookup(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Neg(e) => -e.eval(x)?,
            Expr::Binary(op, l, r) => {
                let (a, b) = (l.eval(x)?, r.eval(x)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(func, args) => {
                let a = args[0].eval(x)?;
                let domain = |constraint| Error::ExprDomain {
                    subexpression: self.to_string(),
                    argument: a,
                    constraint,
                };
                match func {
                    Func::Exp => a.exp(),
                    Func::Ln if a <= 0.0 => return Err(domain("argument must be positive")),
                    Func::Ln => a.ln(),
                    Func::Sqrt if a < 0.0 => return Err(domain("argument must be nonnegative")),
                    Func::Sqrt => a.sqrt(),
                    Func::Gamma => match special::gamma(a) {
                        Ok(v) => v,
                        Err(_) => return Err(domain("pole at a non-positive integer")),
                    },
                    Func::Abs => a.abs(),
                    Func::Pow => a.powf(args[1].eval(x)?),
                }
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Neg(_) => 4,
            _ => 5,
        }
    }
}

/// Prints with the fewest parentheses that parse back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn wrap(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
            if parens {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::X => f.write_str("x"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                wrap(f, e, e.precedence() < 5)
            }
            Expr::Binary(op, l, r) => {
                let p = op.precedence();
                let (left_parens, right_parens) = match op {
                    BinOp::Pow => (l.precedence() <= p, r.precedence() < p),
                    _ => (l.precedence() < p, r.precedence() <= p),
                };
                wrap(f, l, left_parens)?;
                write!(f, " {} ", op.symbol())?;
                wrap(f, r, right_parens)
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::End => "end of input".into(),
        }
    }
}

fn syntax(offset: usize, expected: impl Into<String>) -> Error {
    Error::Syntax {
        offset,
        expected: expected.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let start = i;
            let digits = |i: &mut usize| {
                let s = *i;
                while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                    *i += 1;
                }
                *i > s
            };
            let mut any = digits(&mut i);
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                any |= digits(&mut i);
            }
            if !any {
                return Err(syntax(start, "digits in number"));
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                i += 1;
                if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                    i += 1;
                }
                if !digits(&mut i) {
                    return Err(syntax(i, "exponent digits"));
                }
            }
            let value: f64 = text[start..i]
                .parse()
                .map_err(|_| syntax(start, "a decimal number"))?;
            if !value.is_finite() {
                return Err(syntax(start, "a finite number"));
            }
            out.push((Tok::Num(value), start));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if b"+-*/^(),".contains(&c) {
            out.push((Tok::Sym(c as char), i));
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(syntax(
                i,
                format!("an operator, number or name, found `{ch}`"),
            ));
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(syntax(
                self.offset(),
                format!("`{c}`, found {}", self.peek().describe()),
            ))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(self.factor()?));
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.unary()?;
        if self.eat('^') {
            let exponent = self.factor()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.primary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Tok::Ident(name) if name == "x" => {
                self.pos += 1;
                Ok(Expr::X)
            }
            Tok::Ident(name) => {
                let func = Func::lookup(&name).ok_or_else(|| {
                    let known: Vec<_> = Func::ALL.iter().map(|f| f.name()).collect();
                    syntax(
                        offset,
                        format!("`x` or a function ({}), found `{name}`", known.join(", ")),
                    )
                })?;
                self.pos += 1;
                self.expect('(')?;
                let mut args = vec![self.expr()?];
                while self.eat(',') {
                    args.push(self.expr()?);
                }
                if args.len() != func.arity() {
                    return Err(syntax(
                        offset,
                        format!(
                            "{} argument(s) to {}, found {}",
                            func.arity(),
                            func.name(),
                            args.len()
                        ),
                    ));
                }
                self.expect(')')?;
                Ok(Expr::Call(func, args))
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            other => Err(syntax(
                offset,
                format!(
                    "a number, `x`, a function or `(`, found {}",
                    other.describe()
                ),
            )),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(
            p.offset(),
            format!("an operator or end of input, found {}", p.peek().describe()),
        ));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ev(s: &str, x: f64) -> f64 {
        parse(s).unwrap().eval(x).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(ev("2+3*4", 7.0), 14.0);
        assert_eq!(ev("x^3*exp(-x/2)", 0.0), 0.0);
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("gamma(x+1)", 4.0), 24.0);
        assert_eq!(ev("3^x/gamma(x+1)", 2.0), 4.5);
        assert!((ev("x^3*exp(-x/2)", 2.0) - 8.0 * (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn unary_minus_binds_tighter_than_power() {
        assert_eq!(ev("-x^2", 3.0), 9.0);
        assert_eq!(ev("-(x^2)", 3.0), -9.0);
        assert_eq!(ev("2^-1", 0.0), 0.5);
        assert_eq!(ev("1 - -1", 0.0), 2.0);
        assert_eq!(ev("8/2/2", 0.0), 2.0);
        assert_eq!(ev("8-2-2", 0.0), 4.0);
    }

    #[test]
    fn functions_and_numbers() {
        assert_eq!(ev("pow(2, 10)", 0.0), 1024.0);
        assert_eq!(ev("abs(-2.5e1)", 0.0), 25.0);
        assert_eq!(ev("sqrt(x)", 16.0), 4.0);
        assert_eq!(ev("ln(exp(1))", 0.0), 1.0);
        assert_eq!(ev(".5 + 1.", 0.0), 1.5);
        assert_eq!(ev("1E+2", 0.0), 100.0);
        assert!((ev("gamma(-0.5)", 0.0) + 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    fn offset(s: &str) -> usize {
        match parse(s).unwrap_err() {
            Error::Syntax { offset, .. } => offset,
            e => panic!("not a syntax error: {e:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        assert_eq!(offset(""), 0);
        assert_eq!(offset("2 +"), 3);
        assert_eq!(offset("(x"), 2);
        assert_eq!(offset("x y"), 2);
        assert_eq!(offset("foo(x)"), 0);
        assert_eq!(offset("pow(x)"), 0);
        assert_eq!(offset("exp(x, 1)"), 0);
        assert_eq!(offset("1e400"), 0);
        assert_eq!(offset("1e"), 2);
        assert_eq!(offset("2 $ 3"), 2);
        assert_eq!(offset("--x"), 1);
        assert_eq!(offset("y"), 0);
        assert!(parse("exp x").is_err());
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let e = parse("1 + ln(x - 1)").unwrap();
        match e.eval(1.0).unwrap_err() {
            Error::ExprDomain { subexpression, .. } => assert_eq!(subexpression, "ln(x - 1.0)"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse("gamma(x)").unwrap().eval(-2.0),
            Err(Error::ExprDomain { .. })
        ));
        assert!(parse("sqrt(x)").unwrap().eval(-1.0).is_err());
        assert!(parse("1/x").unwrap().eval(0.0).unwrap().is_infinite());
    }

    #[test]
    fn printing_examples() {
        for (src, printed) in [
            ("-x^2", "-x ^ 2.0"),
            ("-(x^2)", "-(x ^ 2.0)"),
            ("(2^3)^2", "(2.0 ^ 3.0) ^ 2.0"),
            ("2^3^2", "2.0 ^ 3.0 ^ 2.0"),
        ] {
            assert_eq!(parse(src).unwrap().to_string(), printed);
        }
        assert_eq!(parse("8-(2-2)").unwrap().to_string(), "8.0 - (2.0 - 2.0)");
        assert_eq!(
            parse("pow(x,2)*3").unwrap().to_string(),
            "pow(x, 2.0) * 3.0"
        );
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0.0f64..1e6).prop_map(Expr::Num),
            (0u32..50).prop_map(|v| Expr::Num(v as f64)),
            Just(Expr::X),
        ];
        leaf.prop_recursive(5, 48, 3, |inner| {
            let op = prop_oneof![
                Just(BinOp::Add),
                Just(BinOp::Sub),
                Just(BinOp::Mul),
                Just(BinOp::Div),
                Just(BinOp::Pow),
            ];
            let unary = prop_oneof![
                Just(Func::Exp),
                Just(Func::Ln),
                Just(Func::Sqrt),
                Just(Func::Gamma),
                Just(Func::Abs),
            ];
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (op, inner.clone(), inner.clone()).prop_map(|(o, l, r)| Expr::Binary(
                    o,
                    Box::new(l),
                    Box::new(r)
                )),
                (unary, inner.clone()).prop_map(|(f, a)| Expr::Call(f, vec![a])),
                (inner.clone(), inner).prop_map(|(a, b)| Expr::Call(Func::Pow, vec![a, b])),
            ]
        })
    }

    fn same(a: Result<f64>, b: Result<f64>) -> bool {
        match (a, b) {
            (Ok(a), Ok(b)) => a == b || (a.is_nan() && b.is_nan()),
            (Err(_), Err(_)) => true,
            _ => false,
        }
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            let printed = e.to_string();
            let back = parse(&printed).unwrap();
            prop_assert_eq!(back, e);
        }

        #[test]
        fn sum_is_homomorphic(f in arb_expr(), g in arb_expr(), x in -5.0f64..5.0) {
            let fg = parse(&format!("({f}) + ({g})")).unwrap();
            let want = match (f.eval(x), g.eval(x)) {
                (Ok(a), Ok(b)) => Ok(a + b),
                (Err(e), _) | (_, Err(e)) => Err(e),
            };
            prop_assert!(same(fg.eval(x), want));
        }
    }
}
