//! Expression DSL for immersion coordinates.
//!
//! Grammar (whitespace insignificant, numbers are plain decimal literals):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := atom ('^' integer)?
//! atom   := number | ident | ident '(' expr ')' | '(' expr ')' | '-' atom
//! ```
//!
//! Identifiers are the parameters `u1 … un`, declared named constants, or the
//! functions `sin`, `cos`, `exp`, `sqrt`; anything else is a parse error.
//! Note that `-u1^2` parses as `(-u1)^2`: the unary minus binds inside the
//! atom the exponent applies to.
//!
//! Every node carries its source position so that evaluation errors
//! (division by zero, square roots of negative values, overflow) can point
//! at the offending token.

use std::collections::BTreeMap;

use crate::error::{GeoError, Result};

/// 1-based source position of a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

/// Builtin unary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Binary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Parsed expression tree with resolved identifiers.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number { value: f64, span: Span },
    /// Parameter uᵢ (0-based index).
    Var { index: usize, span: Span },
    /// Declared named constant with its resolved value.
    Const { name: String, value: f64, span: Span },
    Neg { arg: Box<Expr>, span: Span },
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr>, span: Span },
    Pow { base: Box<Expr>, exp: i32, span: Span },
    Call { func: Func, arg: Box<Expr>, span: Span },
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::Number { span, .. }
            | Expr::Var { span, .. }
            | Expr::Const { span, .. }
            | Expr::Neg { span, .. }
            | Expr::Binary { span, .. }
            | Expr::Pow { span, .. }
            | Expr::Call { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Number(v) => format!("number `{v}`"),
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Plus => "`+`".into(),
            TokenKind::Minus => "`-`".into(),
            TokenKind::Star => "`*`".into(),
            TokenKind::Slash => "`/`".into(),
            TokenKind::Caret => "`^`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    span: Span,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {}
            '+' => tokens.push(Token { kind: TokenKind::Plus, span }),
            '-' => tokens.push(Token { kind: TokenKind::Minus, span }),
            '*' => tokens.push(Token { kind: TokenKind::Star, span }),
            '/' => tokens.push(Token { kind: TokenKind::Slash, span }),
            '^' => tokens.push(Token { kind: TokenKind::Caret, span }),
            '(' => tokens.push(Token { kind: TokenKind::LParen, span }),
            ')' => tokens.push(Token { kind: TokenKind::RParen, span }),
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                let mut digits = 0usize;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    digits += 1;
                    i += 1;
                    col += 1;
                }
                if i < chars.len() && chars[i] == '.' {
                    i += 1;
                    col += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        digits += 1;
                        i += 1;
                        col += 1;
                    }
                }
                if digits == 0 {
                    return Err(GeoError::Parse {
                        line: span.line,
                        col: span.col,
                        message: "malformed number: no digits".into(),
                    });
                }
                let lexeme: String = chars[start..i].iter().collect();
                let value: f64 = lexeme.parse().map_err(|_| GeoError::Parse {
                    line: span.line,
                    col: span.col,
                    message: format!("malformed number `{lexeme}`"),
                })?;
                tokens.push(Token { kind: TokenKind::Number(value), span });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                    col += 1;
                }
                let name: String = chars[start..i].iter().collect();
                tokens.push(Token { kind: TokenKind::Ident(name), span });
                continue;
            }
            other => {
                return Err(GeoError::Parse {
                    line: span.line,
                    col: span.col,
                    message: format!("unexpected character `{other}`"),
                });
            }
        }
        i += 1;
        col += 1;
    }
    tokens.push(Token { kind: TokenKind::Eof, span: Span { line, col } });
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    nvars: usize,
    constants: &'a BTreeMap<String, f64>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, span: Span, message: String) -> GeoError {
        GeoError::Parse { line: span.line, col: span.col, message }
    }

    fn parse_expr(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_term()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Plus => BinOp::Add,
                TokenKind::Minus => BinOp::Sub,
                _ => break,
            };
            let span = self.advance().span;
            let rhs = self.parse_term()?;
            lhs = Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn parse_term(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_factor()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Star => BinOp::Mul,
                TokenKind::Slash => BinOp::Div,
                _ => break,
            };
            let span = self.advance().span;
            let rhs = self.parse_factor()?;
            lhs = Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn parse_factor(&mut self) -> Result<Expr> {
        let base = self.parse_atom()?;
        if self.peek().kind != TokenKind::Caret {
            return Ok(base);
        }
        let caret = self.advance();
        let negative = if self.peek().kind == TokenKind::Minus {
            self.advance();
            true
        } else {
            false
        };
        let tok = self.advance();
        let TokenKind::Number(value) = tok.kind else {
            return Err(self.error(
                tok.span,
                format!("expected integer exponent, found {}", tok.kind.describe()),
            ));
        };
        if value.fract() != 0.0 || value.abs() > i32::MAX as f64 {
            return Err(self.error(
                tok.span,
                format!("exponent must be an integer, found `{value}`"),
            ));
        }
        let mut exp = value as i32;
        if negative {
            exp = -exp;
        }
        Ok(Expr::Pow { base: Box::new(base), exp, span: caret.span })
    }

    fn parse_atom(&mut self) -> Result<Expr> {
        let tok = self.advance();
        match tok.kind {
            TokenKind::Number(value) => Ok(Expr::Number { value, span: tok.span }),
            TokenKind::Minus => {
                let arg = self.parse_atom()?;
                Ok(Expr::Neg { arg: Box::new(arg), span: tok.span })
            }
            TokenKind::LParen => {
                let inner = self.parse_expr()?;
                let close = self.advance();
                if close.kind != TokenKind::RParen {
                    return Err(self.error(
                        close.span,
                        format!("expected `)`, found {}", close.kind.describe()),
                    ));
                }
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                if self.peek().kind == TokenKind::LParen {
                    let Some(func) = Func::from_name(&name) else {
                        return Err(self.error(
                            tok.span,
                            format!("unknown function `{name}` (supported: sin, cos, exp, sqrt)"),
                        ));
                    };
                    self.advance();
                    let arg = self.parse_expr()?;
                    let close = self.advance();
                    if close.kind != TokenKind::RParen {
                        return Err(self.error(
                            close.span,
                            format!("expected `)`, found {}", close.kind.describe()),
                        ));
                    }
                    return Ok(Expr::Call { func, arg: Box::new(arg), span: tok.span });
                }
                self.resolve_ident(&name, tok.span)
            }
            other => Err(self.error(
                tok.span,
                format!("expected a number, identifier, or `(`, found {}", other.describe()),
            )),
        }
    }

    fn resolve_ident(&self, name: &str, span: Span) -> Result<Expr> {
        if let Some(rest) = name.strip_prefix('u') {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                let k: usize = rest.parse().map_err(|_| {
                    self.error(span, format!("parameter index in `{name}` is out of range"))
                })?;
                if k >= 1 && k <= self.nvars {
                    return Ok(Expr::Var { index: k - 1, span });
                }
                if !self.constants.contains_key(name) {
                    return Err(self.error(
                        span,
                        format!(
                            "parameter `{name}` exceeds the declared dimension ({} parameter{})",
                            self.nvars,
                            if self.nvars == 1 { "" } else { "s" }
                        ),
                    ));
                }
            }
        }
        if let Some(&value) = self.constants.get(name) {
            return Ok(Expr::Const { name: name.to_string(), value, span });
        }
        Err(self.error(span, format!("unknown identifier `{name}`")))
    }
}

/// Parses one coordinate expression against `nvars` parameters and the
/// declared constants.
pub fn parse_expression(
    text: &str,
    nvars: usize,
    constants: &BTreeMap<String, f64>,
) -> Result<Expr> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, nvars, constants };
    let expr = parser.parse_expr()?;
    let trailing = parser.peek();
    if trailing.kind != TokenKind::Eof {
        return Err(GeoError::Parse {
            line: trailing.span.line,
            col: trailing.span.col,
            message: format!("unexpected trailing {}", trailing.kind.describe()),
        });
    }
    Ok(expr)
}

/// Scalar types an expression can be evaluated over: plain values and
/// second-order jets share one code path.
pub trait EvalScalar: Sized + Clone {
    fn constant(value: f64, nvars: usize) -> Self;
    fn variable(value: f64, index: usize, nvars: usize) -> Self;
    fn value(&self) -> f64;
    fn is_finite(&self) -> bool;
    fn neg(&self) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Self;
    fn powi(&self, exp: i32) -> std::result::Result<Self, String>;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;
    fn sqrt(&self) -> std::result::Result<Self, String>;
}

impl EvalScalar for f64 {
    fn constant(value: f64, _nvars: usize) -> Self {
        value
    }
    fn variable(value: f64, _index: usize, _nvars: usize) -> Self {
        value
    }
    fn value(&self) -> f64 {
        *self
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn powi(&self, exp: i32) -> std::result::Result<Self, String> {
        if *self == 0.0 && exp < 0 {
            return Err("zero raised to a negative exponent".into());
        }
        Ok(f64::powi(*self, exp))
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn sqrt(&self) -> std::result::Result<Self, String> {
        if *self < 0.0 {
            return Err(format!("square root of negative value {self}"));
        }
        Ok(f64::sqrt(*self))
    }
}

fn eval_error(span: Span, node: &str, message: String) -> GeoError {
    GeoError::Evaluation {
        line: span.line,
        col: span.col,
        node: node.to_string(),
        message,
    }
}

/// Evaluates an expression over any [`EvalScalar`], checking for
/// singularities and non-finite intermediates.
pub fn eval_expr<S: EvalScalar>(expr: &Expr, vars: &[S]) -> Result<S> {
    let n = vars.len();
    let (out, label): (S, &str) = match expr {
        Expr::Number { value, .. } => (S::constant(*value, n), "number"),
        Expr::Const { value, .. } => (S::constant(*value, n), "constant"),
        Expr::Var { index, .. } => (vars[*index].clone(), "parameter"),
        Expr::Neg { arg, .. } => (eval_expr(arg, vars)?.neg(), "negation"),
        Expr::Binary { op, lhs, rhs, span } => {
            let a = eval_expr(lhs, vars)?;
            let b = eval_expr(rhs, vars)?;
            let (v, label) = match op {
                BinOp::Add => (a.add(&b), "addition"),
                BinOp::Sub => (a.sub(&b), "subtraction"),
                BinOp::Mul => (a.mul(&b), "multiplication"),
                BinOp::Div => {
                    if b.value() == 0.0 {
                        return Err(eval_error(*span, "division", "division by zero".into()));
                    }
                    (a.div(&b), "division")
                }
            };
            (v, label)
        }
        Expr::Pow { base, exp, span } => {
            let b = eval_expr(base, vars)?;
            let v = b
                .powi(*exp)
                .map_err(|m| eval_error(*span, "power", m))?;
            (v, "power")
        }
        Expr::Call { func, arg, span } => {
            let a = eval_expr(arg, vars)?;
            let v = match func {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
                Func::Sqrt => a
                    .sqrt()
                    .map_err(|m| eval_error(*span, "sqrt", m))?,
            };
            (v, func.name())
        }
    };
    if !out.is_finite() {
        return Err(eval_error(expr.span(), label, "non-finite result".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn consts(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn parse2(text: &str) -> Result<Expr> {
        parse_expression(text, 2, &BTreeMap::new())
    }

    fn eval2(text: &str, u: [f64; 2]) -> f64 {
        eval_expr(&parse2(text).unwrap(), u.as_ref()).unwrap()
    }

    #[test]
    fn parses_function_call() {
        let ast = parse2("cos(u1)").unwrap();
        match ast {
            Expr::Call { func: Func::Cos, arg, .. } => {
                assert!(matches!(*arg, Expr::Var { index: 0, .. }));
            }
            other => panic!("unexpected AST {other:?}"),
        }
    }

    #[test]
    fn parses_constant_product() {
        let c = consts(&[("r", 2.0)]);
        let ast = parse_expression("r*cos(u1)*sin(u2)", 2, &c).unwrap();
        // left-associated: Mul(Mul(r, cos u1), sin u2)
        let Expr::Binary { op: BinOp::Mul, lhs, rhs, .. } = ast else {
            panic!("expected top-level product");
        };
        assert!(matches!(*rhs, Expr::Call { func: Func::Sin, .. }));
        let Expr::Binary { op: BinOp::Mul, lhs: ll, .. } = *lhs else {
            panic!("expected nested product");
        };
        assert!(matches!(*ll, Expr::Const { ref name, value, .. } if name == "r" && value == 2.0));
    }

    #[test]
    fn syntax_error_positions() {
        let err = parse2("u1 + * u2").unwrap_err();
        match err {
            GeoError::Parse { line, col, .. } => {
                assert_eq!((line, col), (1, 6), "error should point at the `*`");
            }
            other => panic!("unexpected error {other:?}"),
        }

        let err = parse2("(u1 + u2").unwrap_err();
        assert!(matches!(err, GeoError::Parse { col: 9, .. }), "got {err:?}");

        let err = parse2("u1 u2").unwrap_err();
        assert!(
            matches!(err, GeoError::Parse { col: 4, .. }),
            "trailing token at col 4, got {err:?}"
        );
    }

    #[test]
    fn identifier_resolution_errors() {
        let err = parse2("w1 + 1").unwrap_err();
        assert!(
            matches!(err, GeoError::Parse { col: 1, ref message, .. } if message.contains("unknown identifier")),
            "got {err:?}"
        );

        let err = parse2("u3").unwrap_err();
        assert!(
            matches!(err, GeoError::Parse { ref message, .. } if message.contains("exceeds the declared dimension")),
            "got {err:?}"
        );

        let err = parse2("tan(u1)").unwrap_err();
        assert!(
            matches!(err, GeoError::Parse { ref message, .. } if message.contains("unknown function")),
            "got {err:?}"
        );
    }

    #[test]
    fn exponent_rules() {
        // `-u1^2` is `(-u1)^2` because unary minus is part of the atom.
        assert_eq!(eval2("-u1^2", [3.0, 0.0]), 9.0);
        assert_eq!(eval2("u1^3", [2.0, 0.0]), 8.0);
        assert_eq!(eval2("2^-2", [0.0, 0.0]), 0.25);
        let err = parse2("u1^2.5").unwrap_err();
        assert!(
            matches!(err, GeoError::Parse { ref message, .. } if message.contains("integer")),
            "got {err:?}"
        );
        let err = parse2("u1^u2").unwrap_err();
        assert!(
            matches!(err, GeoError::Parse { ref message, .. } if message.contains("integer exponent")),
            "got {err:?}"
        );
    }

    #[test]
    fn arithmetic_evaluation() {
        assert_eq!(eval2("u1^2*u2 + 3", [2.0, 5.0]), 23.0);
        assert_eq!(eval2("(u1 + u2)/(u1 - u2)", [3.0, 1.0]), 2.0);
        assert!((eval2("sin(u1)^2 + cos(u1)^2", [0.7, 0.0]) - 1.0).abs() < 1e-15);
        assert_eq!(eval2("sqrt(u1 + u2)", [9.0, 7.0]), 4.0);
        assert_eq!(eval2("0.5 - 1.25", [0.0, 0.0]), -0.75);
    }

    #[test]
    fn evaluation_errors_carry_positions() {
        let ast = parse2("1/(u1 - 1)").unwrap();
        let err = eval_expr(&ast, &[1.0_f64, 0.0]).unwrap_err();
        match err {
            GeoError::Evaluation { col, ref node, .. } => {
                assert_eq!(col, 2, "division operator position");
                assert_eq!(node, "division");
            }
            other => panic!("unexpected error {other:?}"),
        }

        let ast = parse2("sqrt(-1 - u1^2)").unwrap();
        let err = eval_expr(&ast, &[0.0_f64, 0.0]).unwrap_err();
        assert!(
            matches!(err, GeoError::Evaluation { ref node, .. } if node == "sqrt"),
            "got {err:?}"
        );

        let ast = parse2("exp(u1)").unwrap();
        let err = eval_expr(&ast, &[1e9_f64, 0.0]).unwrap_err();
        assert!(
            matches!(err, GeoError::Evaluation { ref message, .. } if message.contains("non-finite")),
            "got {err:?}"
        );
    }

    #[test]
    fn number_token_forms() {
        assert_eq!(eval2("1.5", [0.0; 2]), 1.5);
        assert_eq!(eval2("2.", [0.0; 2]), 2.0);
        assert_eq!(eval2(".5", [0.0; 2]), 0.5);
        let err = parse2("1e3").unwrap_err();
        assert!(
            matches!(err, GeoError::Parse { .. }),
            "exponent notation is not part of the grammar: {err:?}"
        );
    }
}
