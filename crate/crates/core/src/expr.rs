//! Expression front-end: parse a univariate expression, evaluate it, and
//! differentiate it symbolically (twice) to obtain the `(f, f', f'')` triple
//! the rule and bound modules consume.
//!
//! The grammar (EBNF):
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' factor)?
//! atom   := number | 'x' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//! func   := sin | cos | tan | exp | ln | sqrt
//! ```
//!
//! `^` binds tighter than unary minus and is right-associative. Numbers are
//! decimal with an optional exponent part. `abs` and other primitives that
//! are not twice differentiable are deliberately absent.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Unary operators and function applications.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
}

/// Binary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// AST of a univariate real expression in the variable `x`.
///
/// Trees are immutable after construction; all operations on them are pure.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

/// Syntax error with the byte offset at which it was detected.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("syntax error at byte {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    InvalidNumber,
    UnknownIdentifier(String),
    /// `**` is rejected outright; `^` is the power operator.
    DoubleStar,
    UnexpectedToken(String),
    UnexpectedEnd,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character '{c}'"),
            ParseErrorKind::InvalidNumber => write!(f, "invalid number literal"),
            ParseErrorKind::UnknownIdentifier(s) => write!(f, "unknown identifier '{s}'"),
            ParseErrorKind::DoubleStar => {
                write!(f, "'**' is not an operator; use '^' for powers")
            }
            ParseErrorKind::UnexpectedToken(s) => write!(f, "unexpected token '{s}'"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
        }
    }
}

/// Domain or range failure while evaluating an expression at a point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero at x = {x}")]
    DivisionByZero { x: f64 },
    #[error("ln of non-positive value {arg}")]
    LogNonPositive { arg: f64 },
    #[error("sqrt of negative value {arg}")]
    SqrtNegative { arg: f64 },
    #[error("power with non-positive base {base} and non-constant exponent")]
    PowNonPositiveBase { base: f64 },
    #[error("power produced a non-real result (base {base}, exponent {exponent})")]
    PowDomain { base: f64, exponent: f64 },
    #[error("evaluation produced a non-finite value at x = {x}")]
    NonFinite { x: f64 },
    #[error("argument {x} outside the declared domain ({lo}, {hi})")]
    OutsideDomain { x: f64, lo: f64, hi: f64 },
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Num(v) => write!(f, "{v}"),
            TokenKind::Ident(s) => write!(f, "{s}"),
            TokenKind::Plus => write!(f, "+"),
            TokenKind::Minus => write!(f, "-"),
            TokenKind::Star => write!(f, "*"),
            TokenKind::Slash => write!(f, "/"),
            TokenKind::Caret => write!(f, "^"),
            TokenKind::LParen => write!(f, "("),
            TokenKind::RParen => write!(f, ")"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                tokens.push(Token { kind: TokenKind::Plus, offset: i });
                i += 1;
            }
            '-' => {
                tokens.push(Token { kind: TokenKind::Minus, offset: i });
                i += 1;
            }
            '*' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b'*' {
                    return Err(ParseError { offset: i, kind: ParseErrorKind::DoubleStar });
                }
                tokens.push(Token { kind: TokenKind::Star, offset: i });
                i += 1;
            }
            '/' => {
                tokens.push(Token { kind: TokenKind::Slash, offset: i });
                i += 1;
            }
            '^' => {
                tokens.push(Token { kind: TokenKind::Caret, offset: i });
                i += 1;
            }
            '(' => {
                tokens.push(Token { kind: TokenKind::LParen, offset: i });
                i += 1;
            }
            ')' => {
                tokens.push(Token { kind: TokenKind::RParen, offset: i });
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' && i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                // Exponent part only when it is unambiguously one; a bare
                // trailing 'e' stays an identifier token.
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let lit = &text[start..i];
                let value: f64 = lit
                    .parse()
                    .map_err(|_| ParseError { offset: start, kind: ParseErrorKind::InvalidNumber })?;
                tokens.push(Token { kind: TokenKind::Num(value), offset: start });
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(text[start..i].to_string()),
                    offset: start,
                });
            }
            other => {
                return Err(ParseError { offset: i, kind: ParseErrorKind::UnexpectedChar(other) })
            }
        }
    }
    Ok(tokens)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn end_offset(&self) -> usize {
        self.tokens.last().map_or(self.len, |t| t.offset + 1)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(tok) = self.peek() {
            let op = match tok.kind {
                TokenKind::Plus => BinaryOp::Add,
                TokenKind::Minus => BinaryOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while let Some(tok) = self.peek() {
            let op = match tok.kind {
                TokenKind::Star => BinaryOp::Mul,
                TokenKind::Slash => BinaryOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if let Some(tok) = self.peek() {
            if tok.kind == TokenKind::Minus {
                self.bump();
                let inner = self.factor()?;
                return Ok(Expr::Unary(UnaryOp::Neg, Box::new(inner)));
            }
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Some(tok) = self.peek() {
            if tok.kind == TokenKind::Caret {
                self.bump();
                let exponent = self.factor()?;
                return Ok(Expr::Binary(BinaryOp::Pow, Box::new(base), Box::new(exponent)));
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let end = self.end_offset();
        let tok = match self.bump() {
            Some(t) => t.clone(),
            None => return Err(ParseError { offset: end, kind: ParseErrorKind::UnexpectedEnd }),
        };
        match tok.kind {
            TokenKind::Num(v) => Ok(Expr::Const(v)),
            TokenKind::Ident(name) => match name.as_str() {
                "x" => Ok(Expr::Var),
                "pi" => Ok(Expr::Const(std::f64::consts::PI)),
                "e" => Ok(Expr::Const(std::f64::consts::E)),
                "sin" | "cos" | "tan" | "exp" | "ln" | "sqrt" => {
                    let op = match name.as_str() {
                        "sin" => UnaryOp::Sin,
                        "cos" => UnaryOp::Cos,
                        "tan" => UnaryOp::Tan,
                        "exp" => UnaryOp::Exp,
                        "ln" => UnaryOp::Ln,
                        _ => UnaryOp::Sqrt,
                    };
                    self.expect(TokenKind::LParen)?;
                    let arg = self.expr()?;
                    self.expect(TokenKind::RParen)?;
                    Ok(Expr::Unary(op, Box::new(arg)))
                }
                _ => Err(ParseError {
                    offset: tok.offset,
                    kind: ParseErrorKind::UnknownIdentifier(name),
                }),
            },
            TokenKind::LParen => {
                let inner = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            other => Err(ParseError {
                offset: tok.offset,
                kind: ParseErrorKind::UnexpectedToken(other.to_string()),
            }),
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<(), ParseError> {
        let end = self.end_offset();
        match self.bump() {
            Some(t) if t.kind == kind => Ok(()),
            Some(t) => Err(ParseError {
                offset: t.offset,
                kind: ParseErrorKind::UnexpectedToken(t.kind.to_string()),
            }),
            None => Err(ParseError { offset: end, kind: ParseErrorKind::UnexpectedEnd }),
        }
    }
}

/// Parses `text` into an [`Expr`].
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens: &tokens, pos: 0, len: text.len() };
    let expr = parser.expr()?;
    if let Some(tok) = parser.peek() {
        return Err(ParseError {
            offset: tok.offset,
            kind: ParseErrorKind::UnexpectedToken(tok.kind.to_string()),
        });
    }
    Ok(expr)
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

impl Expr {
    /// Evaluates the expression at `x`.
    ///
    /// A power with a non-constant exponent is evaluated as
    /// `exp(exponent * ln(base))` and therefore requires `base > 0`.
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        match self {
            Expr::Const(v) => Ok(*v),
            Expr::Var => Ok(x),
            Expr::Unary(op, child) => {
                let u = child.eval(x)?;
                let v = match op {
                    UnaryOp::Neg => -u,
                    UnaryOp::Sin => u.sin(),
                    UnaryOp::Cos => u.cos(),
                    UnaryOp::Tan => u.tan(),
                    UnaryOp::Exp => u.exp(),
                    UnaryOp::Ln => {
                        if u <= 0.0 {
                            return Err(EvalError::LogNonPositive { arg: u });
                        }
                        u.ln()
                    }
                    UnaryOp::Sqrt => {
                        if u < 0.0 {
                            return Err(EvalError::SqrtNegative { arg: u });
                        }
                        u.sqrt()
                    }
                };
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(EvalError::NonFinite { x })
                }
            }
            Expr::Binary(op, lhs, rhs) => {
                let v = match op {
                    BinaryOp::Add => lhs.eval(x)? + rhs.eval(x)?,
                    BinaryOp::Sub => lhs.eval(x)? - rhs.eval(x)?,
                    BinaryOp::Mul => lhs.eval(x)? * rhs.eval(x)?,
                    BinaryOp::Div => {
                        let den = rhs.eval(x)?;
                        if den == 0.0 {
                            return Err(EvalError::DivisionByZero { x });
                        }
                        lhs.eval(x)? / den
                    }
                    BinaryOp::Pow => {
                        let base = lhs.eval(x)?;
                        match rhs.as_const() {
                            Some(c) => {
                                let v = base.powf(c);
                                if v.is_nan() {
                                    return Err(EvalError::PowDomain { base, exponent: c });
                                }
                                v
                            }
                            None => {
                                if base <= 0.0 {
                                    return Err(EvalError::PowNonPositiveBase { base });
                                }
                                let exponent = rhs.eval(x)?;
                                (exponent * base.ln()).exp()
                            }
                        }
                    }
                };
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(EvalError::NonFinite { x })
                }
            }
        }
    }

    fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(v) => Some(*v),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Differentiation
// ---------------------------------------------------------------------------

// Construction helpers that apply the trivial simplifications (constant
// folding, 0*e, 1*e, e+0, e^1, ...) so second derivatives stay readable.

fn c(v: f64) -> Expr {
    Expr::Const(v)
}

fn unary(op: UnaryOp, e: Expr) -> Expr {
    Expr::Unary(op, Box::new(e))
}

fn neg(e: Expr) -> Expr {
    match e {
        Expr::Const(v) => c(-v),
        Expr::Unary(UnaryOp::Neg, inner) => *inner,
        other => unary(UnaryOp::Neg, other),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => c(x + y),
        (Expr::Const(z), e) if z == 0.0 => e,
        (e, Expr::Const(z)) if z == 0.0 => e,
        (a, b) => Expr::Binary(BinaryOp::Add, Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => c(x - y),
        (e, Expr::Const(z)) if z == 0.0 => e,
        (Expr::Const(z), e) if z == 0.0 => neg(e),
        (a, b) => Expr::Binary(BinaryOp::Sub, Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => c(x * y),
        (Expr::Const(z), _) | (_, Expr::Const(z)) if z == 0.0 => c(0.0),
        (Expr::Const(o), e) if o == 1.0 => e,
        (e, Expr::Const(o)) if o == 1.0 => e,
        (a, b) => Expr::Binary(BinaryOp::Mul, Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(z), _) if z == 0.0 => c(0.0),
        (e, Expr::Const(o)) if o == 1.0 => e,
        (Expr::Const(x), Expr::Const(y)) if y != 0.0 => c(x / y),
        (a, b) => Expr::Binary(BinaryOp::Div, Box::new(a), Box::new(b)),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (_, Expr::Const(z)) if *z == 0.0 => c(1.0),
        (_, Expr::Const(o)) if *o == 1.0 => a,
        (Expr::Const(x), Expr::Const(y)) => {
            let v = x.powf(*y);
            if v.is_finite() {
                c(v)
            } else {
                Expr::Binary(BinaryOp::Pow, Box::new(a), Box::new(b))
            }
        }
        _ => Expr::Binary(BinaryOp::Pow, Box::new(a), Box::new(b)),
    }
}

impl Expr {
    /// Exact symbolic derivative with respect to `x`.
    ///
    /// The power rule is applied when the exponent is a constant; a general
    /// power `b^e` differentiates through `b^e * (e' ln b + e b'/b)`.
    pub fn differentiate(&self) -> Expr {
        match self {
            Expr::Const(_) => c(0.0),
            Expr::Var => c(1.0),
            Expr::Unary(op, child) => {
                let u = (**child).clone();
                let du = child.differentiate();
                match op {
                    UnaryOp::Neg => neg(du),
                    UnaryOp::Sin => mul(du, unary(UnaryOp::Cos, u)),
                    UnaryOp::Cos => neg(mul(du, unary(UnaryOp::Sin, u))),
                    UnaryOp::Tan => div(du, pow(unary(UnaryOp::Cos, u), c(2.0))),
                    UnaryOp::Exp => mul(du, unary(UnaryOp::Exp, u)),
                    UnaryOp::Ln => div(du, u),
                    UnaryOp::Sqrt => div(du, mul(c(2.0), unary(UnaryOp::Sqrt, u))),
                }
            }
            Expr::Binary(op, lhs, rhs) => {
                let l = (**lhs).clone();
                let r = (**rhs).clone();
                let dl = lhs.differentiate();
                let dr = rhs.differentiate();
                match op {
                    BinaryOp::Add => add(dl, dr),
                    BinaryOp::Sub => sub(dl, dr),
                    BinaryOp::Mul => add(mul(dl, r), mul(l, dr)),
                    BinaryOp::Div => div(
                        sub(mul(dl, r.clone()), mul(l, dr)),
                        pow(r, c(2.0)),
                    ),
                    BinaryOp::Pow => match rhs.as_const() {
                        Some(k) => mul(mul(c(k), pow(l, c(k - 1.0))), dl),
                        None => mul(
                            pow(l.clone(), r.clone()),
                            add(mul(dr, unary(UnaryOp::Ln, l.clone())), div(mul(r, dl), l)),
                        ),
                    },
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

// Precedence levels used for parenthesization: 1 add/sub, 2 mul/div,
// 3 unary minus (and negative literals), 4 power, 5 atoms.
fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Const(v) if *v < 0.0 => 3,
        Expr::Const(_) | Expr::Var => 5,
        Expr::Unary(UnaryOp::Neg, _) => 3,
        Expr::Unary(_, _) => 5,
        Expr::Binary(BinaryOp::Pow, _, _) => 4,
        Expr::Binary(BinaryOp::Mul, _, _) | Expr::Binary(BinaryOp::Div, _, _) => 2,
        Expr::Binary(_, _, _) => 1,
    }
}

impl Expr {
    /// Renders the expression back to parseable text.
    ///
    /// `parse(render(n))` evaluates identically to `n` (the tree shape may
    /// differ, e.g. a negative literal reparses as a negation).
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out);
        out
    }

    fn render_into(&self, out: &mut String) {
        match self {
            Expr::Const(v) => {
                out.push_str(&format!("{v}"));
            }
            Expr::Var => out.push('x'),
            Expr::Unary(UnaryOp::Neg, child) => {
                out.push('-');
                self.render_child(child, 3, out);
            }
            Expr::Unary(op, child) => {
                let name = match op {
                    UnaryOp::Sin => "sin",
                    UnaryOp::Cos => "cos",
                    UnaryOp::Tan => "tan",
                    UnaryOp::Exp => "exp",
                    UnaryOp::Ln => "ln",
                    UnaryOp::Sqrt => "sqrt",
                    UnaryOp::Neg => unreachable!(),
                };
                out.push_str(name);
                out.push('(');
                child.render_into(out);
                out.push(')');
            }
            Expr::Binary(op, lhs, rhs) => {
                let (sym, prec) = match op {
                    BinaryOp::Add => (" + ", 1),
                    BinaryOp::Sub => (" - ", 1),
                    BinaryOp::Mul => ("*", 2),
                    BinaryOp::Div => ("/", 2),
                    BinaryOp::Pow => ("^", 4),
                };
                if *op == BinaryOp::Pow {
                    // Right-associative: parenthesize a power (or anything
                    // looser) on the left, allow a negated exponent bare.
                    self.render_child(lhs, 5, out);
                    out.push_str(sym);
                    self.render_child(rhs, 3, out);
                } else {
                    self.render_child(lhs, prec, out);
                    out.push_str(sym);
                    let right_min = match op {
                        BinaryOp::Sub | BinaryOp::Div => prec + 1,
                        _ => prec,
                    };
                    self.render_child(rhs, right_min, out);
                }
            }
        }
    }

    fn render_child(&self, child: &Expr, min_prec: u8, out: &mut String) {
        if precedence(child) < min_prec {
            out.push('(');
            child.render_into(out);
            out.push(')');
        } else {
            child.render_into(out);
        }
    }
}

// ---------------------------------------------------------------------------
// DifferentiableFunction
// ---------------------------------------------------------------------------

type RealFn = Arc<dyn Fn(f64) -> Result<f64, EvalError> + Send + Sync>;

/// Bundle of `(f, f', f'')` as evaluable maps with a validity domain.
///
/// Built either from a parsed expression (derivatives are symbolic) or from
/// raw closures. Immutable after construction and safe to share across
/// threads; domain errors surface lazily at evaluation sites.
#[derive(Clone)]
pub struct DifferentiableFunction {
    value_fn: RealFn,
    deriv_fn: RealFn,
    second_fn: RealFn,
    domain: (f64, f64),
}

impl DifferentiableFunction {
    /// Builds the triple from an expression by differentiating it twice.
    pub fn from_expr(expr: &Expr) -> Self {
        let d1 = expr.differentiate();
        let d2 = d1.differentiate();
        let e0 = expr.clone();
        Self {
            value_fn: Arc::new(move |x| e0.eval(x)),
            deriv_fn: Arc::new(move |x| d1.eval(x)),
            second_fn: Arc::new(move |x| d2.eval(x)),
            domain: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Parses `text` and builds the triple.
    pub fn from_text(text: &str) -> Result<Self, ParseError> {
        Ok(Self::from_expr(&parse(text)?))
    }

    /// Wraps raw `(f, f', f'')` closures. Non-finite values are reported as
    /// evaluation errors.
    pub fn from_fns<F, D, S>(f: F, df: D, d2f: S) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
        S: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        fn wrap<G: Fn(f64) -> f64 + Send + Sync + 'static>(g: G) -> RealFn {
            Arc::new(move |x| {
                let v = g(x);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(EvalError::NonFinite { x })
                }
            })
        }
        Self {
            value_fn: wrap(f),
            deriv_fn: wrap(df),
            second_fn: wrap(d2f),
            domain: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Restricts the open interval on which the triple may be evaluated.
    pub fn with_domain(mut self, lo: f64, hi: f64) -> Self {
        self.domain = (lo, hi);
        self
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    fn check(&self, x: f64) -> Result<(), EvalError> {
        let (lo, hi) = self.domain;
        if x > lo && x < hi {
            Ok(())
        } else if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
            Ok(())
        } else {
            Err(EvalError::OutsideDomain { x, lo, hi })
        }
    }

    /// Evaluates `f(x)`.
    pub fn f(&self, x: f64) -> Result<f64, EvalError> {
        self.check(x)?;
        (self.value_fn)(x)
    }

    /// Evaluates `f'(x)`.
    pub fn df(&self, x: f64) -> Result<f64, EvalError> {
        self.check(x)?;
        (self.deriv_fn)(x)
    }

    /// Evaluates `f''(x)`.
    pub fn d2f(&self, x: f64) -> Result<f64, EvalError> {
        self.check(x)?;
        (self.second_fn)(x)
    }
}

impl fmt::Debug for DifferentiableFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DifferentiableFunction")
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}
