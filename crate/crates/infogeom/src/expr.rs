//! Recursive-descent parser and evaluator for embedding expressions.
//!
//! Grammar (ASCII, case-sensitive):
//!
//! ```text
//! components := expr (";" expr)*
//! expr       := term (("+"|"-") term)*
//! term       := factor (("*"|"/") factor)*
//! factor     := unary ("^" factor)?          -- "^" binds right
//! unary      := "-"? atom
//! atom       := number | ident | func "(" expr ")" | "(" expr ")"
//! func       := "sin"|"cos"|"tan"|"exp"|"ln"|"sqrt"|"sech"
//! number     := decimal literal
//! ```
//!
//! Identifiers must be declared parameter names; `pi` is a reserved
//! constant. Note one consequence of the grammar: the unary minus binds
//! tighter than `^`, so `-x^2` parses as `(-x)^2`.

use std::fmt;

use thiserror::Error;

/// A parse failure with 1-based source position.
#[derive(Debug, Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug)]
pub enum ParseErrorKind {
    UnexpectedChar {
        found: char,
    },
    UnexpectedToken {
        found: String,
        expected: Vec<&'static str>,
    },
    UnexpectedEnd {
        expected: Vec<&'static str>,
    },
    UnknownIdentifier {
        name: String,
    },
    UnknownFunction {
        name: String,
    },
    DuplicateParameter {
        name: String,
    },
    ReservedParameter {
        name: String,
    },
    MalformedNumber {
        text: String,
    },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at line {}, column {}: ",
            self.line, self.col
        )?;
        match &self.kind {
            ParseErrorKind::UnexpectedChar { found } => {
                write!(f, "unexpected character '{found}'")
            }
            ParseErrorKind::UnexpectedToken { found, expected } => {
                write!(
                    f,
                    "unexpected {found}, expected one of: {}",
                    expected.join(", ")
                )
            }
            ParseErrorKind::UnexpectedEnd { expected } => {
                write!(
                    f,
                    "unexpected end of input, expected one of: {}",
                    expected.join(", ")
                )
            }
            ParseErrorKind::UnknownIdentifier { name } => {
                write!(f, "unknown identifier `{name}` (not a declared parameter)")
            }
            ParseErrorKind::UnknownFunction { name } => write!(f, "unknown function `{name}`"),
            ParseErrorKind::DuplicateParameter { name } => {
                write!(f, "parameter `{name}` is declared more than once")
            }
            ParseErrorKind::ReservedParameter { name } => {
                write!(
                    f,
                    "`{name}` is a reserved constant and cannot be a parameter"
                )
            }
            ParseErrorKind::MalformedNumber { text } => write!(f, "malformed number `{text}`"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FuncKind {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Sech,
}

impl FuncKind {
    fn from_name(name: &str) -> Option<Self> {
        match name {
            "sin" => Some(Self::Sin),
            "cos" => Some(Self::Cos),
            "tan" => Some(Self::Tan),
            "exp" => Some(Self::Exp),
            "ln" => Some(Self::Ln),
            "sqrt" => Some(Self::Sqrt),
            "sech" => Some(Self::Sech),
            _ => None,
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Self::Sin => v.sin(),
            Self::Cos => v.cos(),
            Self::Tan => v.tan(),
            Self::Exp => v.exp(),
            Self::Ln => v.ln(),
            Self::Sqrt => v.sqrt(),
            Self::Sech => 1.0 / v.cosh(),
        }
    }
}

/// A parsed expression over declared parameters.
#[derive(Debug, Clone)]
pub enum Expr {
    Number(f64),
    Pi,
    Param(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Func(FuncKind, Box<Expr>),
}

impl Expr {
    /// Evaluate at a parameter point. Out-of-domain math (division by zero,
    /// `ln` of a negative number) propagates as inf/NaN in the usual IEEE
    /// way; quadrature and the finite-difference Jacobian will flag it.
    pub fn eval(&self, theta: &[f64]) -> f64 {
        match self {
            Expr::Number(v) => *v,
            Expr::Pi => std::f64::consts::PI,
            Expr::Param(i) => theta[*i],
            Expr::Neg(e) => -e.eval(theta),
            Expr::Add(l, r) => l.eval(theta) + r.eval(theta),
            Expr::Sub(l, r) => l.eval(theta) - r.eval(theta),
            Expr::Mul(l, r) => l.eval(theta) * r.eval(theta),
            Expr::Div(l, r) => l.eval(theta) / r.eval(theta),
            Expr::Pow(l, r) => l.eval(theta).powf(r.eval(theta)),
            Expr::Func(kind, e) => kind.apply(e.eval(theta)),
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
    Semicolon,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Number(v) => format!("number `{v}`"),
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Plus => "'+'".to_string(),
            TokenKind::Minus => "'-'".to_string(),
            TokenKind::Star => "'*'".to_string(),
            TokenKind::Slash => "'/'".to_string(),
            TokenKind::Caret => "'^'".to_string(),
            TokenKind::LParen => "'('".to_string(),
            TokenKind::RParen => "')'".to_string(),
            TokenKind::Semicolon => "';'".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    line: usize,
    col: usize,
}

fn lex(source: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = source.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tok_line, tok_col) = (line, col);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '+' | '-' | '*' | '/' | '^' | '(' | ')' | ';' => {
                chars.next();
                col += 1;
                let kind = match c {
                    '+' => TokenKind::Plus,
                    '-' => TokenKind::Minus,
                    '*' => TokenKind::Star,
                    '/' => TokenKind::Slash,
                    '^' => TokenKind::Caret,
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    _ => TokenKind::Semicolon,
                };
                tokens.push(Token {
                    kind,
                    line: tok_line,
                    col: tok_col,
                });
            }
            c if c.is_ascii_digit() || c == '.' => {
                let mut text = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() || d == '.' {
                        text.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                let value: f64 = text.parse().map_err(|_| ParseError {
                    line: tok_line,
                    col: tok_col,
                    kind: ParseErrorKind::MalformedNumber { text: text.clone() },
                })?;
                tokens.push(Token {
                    kind: TokenKind::Number(value),
                    line: tok_line,
                    col: tok_col,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut text = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        text.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(text),
                    line: tok_line,
                    col: tok_col,
                });
            }
            other => {
                return Err(ParseError {
                    line: tok_line,
                    col: tok_col,
                    kind: ParseErrorKind::UnexpectedChar { found: other },
                });
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    params: &'a [&'a str],
    end_line: usize,
    end_col: usize,
}

const ATOM_EXPECTED: &[&str] = &["number", "identifier", "function", "'('", "'-'"];

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, kind: &TokenKind, expected: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t.kind == *kind => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(ParseError {
                line: t.line,
                col: t.col,
                kind: ParseErrorKind::UnexpectedToken {
                    found: t.kind.describe(),
                    expected: vec![expected],
                },
            }),
            None => Err(self.eof_error(vec![expected])),
        }
    }

    fn eof_error(&self, expected: Vec<&'static str>) -> ParseError {
        ParseError {
            line: self.end_line,
            col: self.end_col,
            kind: ParseErrorKind::UnexpectedEnd { expected },
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_term()?;
        while let Some(t) = self.peek() {
            let op = match t.kind {
                TokenKind::Plus => true,
                TokenKind::Minus => false,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.parse_term()?;
            lhs = if op {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn parse_term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_factor()?;
        while let Some(t) = self.peek() {
            let mul = match t.kind {
                TokenKind::Star => true,
                TokenKind::Slash => false,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.parse_factor()?;
            lhs = if mul {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn parse_factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.parse_unary()?;
        if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Caret)) {
            self.pos += 1;
            let exponent = self.parse_factor()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn parse_unary(&mut self) -> Result<Expr, ParseError> {
        if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Minus)) {
            self.pos += 1;
            let atom = self.parse_atom()?;
            return Ok(Expr::Neg(Box::new(atom)));
        }
        self.parse_atom()
    }

    fn parse_atom(&mut self) -> Result<Expr, ParseError> {
        let token = match self.advance() {
            Some(t) => t,
            None => return Err(self.eof_error(ATOM_EXPECTED.to_vec())),
        };
        match token.kind {
            TokenKind::Number(v) => Ok(Expr::Number(v)),
            TokenKind::Ident(name) => {
                if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::LParen)) {
                    let func = FuncKind::from_name(&name).ok_or(ParseError {
                        line: token.line,
                        col: token.col,
                        kind: ParseErrorKind::UnknownFunction { name },
                    })?;
                    self.eat(&TokenKind::LParen, "'('")?;
                    let arg = self.parse_expr()?;
                    self.eat(&TokenKind::RParen, "')'")?;
                    Ok(Expr::Func(func, Box::new(arg)))
                } else if name == "pi" {
                    Ok(Expr::Pi)
                } else if let Some(idx) = self.params.iter().position(|p| *p == name) {
                    Ok(Expr::Param(idx))
                } else {
                    Err(ParseError {
                        line: token.line,
                        col: token.col,
                        kind: ParseErrorKind::UnknownIdentifier { name },
                    })
                }
            }
            TokenKind::LParen => {
                let inner = self.parse_expr()?;
                self.eat(&TokenKind::RParen, "')'")?;
                Ok(inner)
            }
            other => Err(ParseError {
                line: token.line,
                col: token.col,
                kind: ParseErrorKind::UnexpectedToken {
                    found: other.describe(),
                    expected: ATOM_EXPECTED.to_vec(),
                },
            }),
        }
    }
}

/// Parse semicolon-separated expression components over the declared
/// parameter names.
pub fn parse_components(source: &str, param_names: &[&str]) -> Result<Vec<Expr>, ParseError> {
    for (i, name) in param_names.iter().enumerate() {
        if *name == "pi" {
            return Err(ParseError {
                line: 1,
                col: 1,
                kind: ParseErrorKind::ReservedParameter {
                    name: name.to_string(),
                },
            });
        }
        if param_names[..i].contains(name) {
            return Err(ParseError {
                line: 1,
                col: 1,
                kind: ParseErrorKind::DuplicateParameter {
                    name: name.to_string(),
                },
            });
        }
    }

    let tokens = lex(source)?;
    let (end_line, end_col) = source.lines().last().map_or((1, 1), |last| {
        (source.lines().count().max(1), last.chars().count() + 1)
    });
    let mut parser = Parser {
        tokens,
        pos: 0,
        params: param_names,
        end_line,
        end_col,
    };

    let mut components = vec![parser.parse_expr()?];
    loop {
        match parser.advance() {
            None => break,
            Some(t) if t.kind == TokenKind::Semicolon => {
                components.push(parser.parse_expr()?);
            }
            Some(t) => {
                return Err(ParseError {
                    line: t.line,
                    col: t.col,
                    kind: ParseErrorKind::UnexpectedToken {
                        found: t.kind.describe(),
                        expected: vec!["';'", "end of input", "'+'", "'-'", "'*'", "'/'", "'^'"],
                    },
                });
            }
        }
    }
    Ok(components)
}
