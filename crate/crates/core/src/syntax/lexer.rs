use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{ParseError, Pos};
use crate::interval::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Non-negative numeric literal; `1.5` and `3/2` are both exact.
    Num(Rational),
    Str(String),
    /// `#name` at the start of a directive.
    Directive(String),
    True,
    False,
    Cut,
    Left,
    Right,
    Exists,
    Forall,
    Fun,
    Let,
    In,
    MkBool,
    IsTrue,
    IsFalse,
    Real,
    Prop,
    Bool,
    Inf,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Lt,
    Gt,
    /// `/\`
    And,
    /// `\/`
    Or,
    /// `||`
    Join,
    /// `~>`
    Restrict,
    /// `=>`
    FatArrow,
    /// `->`
    Arrow,
    Comma,
    Colon,
    /// `;;`
    Terminator,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Hash,
    Eq,
    Eof,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "True" => Tok::True,
        "False" => Tok::False,
        "cut" => Tok::Cut,
        "left" => Tok::Left,
        "right" => Tok::Right,
        "exists" => Tok::Exists,
        "forall" => Tok::Forall,
        "fun" => Tok::Fun,
        "let" => Tok::Let,
        "in" => Tok::In,
        "mkbool" => Tok::MkBool,
        "is_true" => Tok::IsTrue,
        "is_false" => Tok::IsFalse,
        "real" => Tok::Real,
        "prop" => Tok::Prop,
        "bool" => Tok::Bool,
        "inf" => Tok::Inf,
        _ => return None,
    })
}

struct Lexer {
    chars: Vec<char>,
    i: usize,
    line: usize,
    col: usize,
}

impl Lexer {
    fn peek(&self, k: usize) -> Option<char> {
        self.chars.get(self.i + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.i).copied()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn error(&self, pos: Pos, msg: impl Into<String>) -> ParseError {
        ParseError {
            pos,
            msg: msg.into(),
        }
    }

    fn skip_comment(&mut self, start: Pos) -> Result<(), ParseError> {
        // positioned just after the opening `(*`
        let mut depth = 1;
        while depth > 0 {
            match (self.peek(0), self.peek(1)) {
                (Some('('), Some('*')) => {
                    self.bump();
                    self.bump();
                    depth += 1;
                }
                (Some('*'), Some(')')) => {
                    self.bump();
                    self.bump();
                    depth -= 1;
                }
                (Some(_), _) => {
                    self.bump();
                }
                (None, _) => return Err(self.error(start, "unterminated comment")),
            }
        }
        Ok(())
    }

    fn digits(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek(0).filter(char::is_ascii_digit) {
            s.push(c);
            self.bump();
        }
        s
    }

    fn number(&mut self) -> Rational {
        let whole = self.digits();
        let mut value = Rational::from_integer(whole.parse::<BigInt>().unwrap_or_default());
        if self.peek(0) == Some('.') && self.peek(1).is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            let frac = self.digits();
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            let frac_val: BigInt = frac.parse().unwrap_or_default();
            value += Rational::new(frac_val, scale);
        }
        // `3/2` written without spaces is a single rational literal.
        if self.peek(0) == Some('/') && self.peek(1).is_some_and(|c| c.is_ascii_digit()) {
            let save = (self.i, self.line, self.col);
            self.bump();
            let den = self.digits();
            let den: BigInt = den.parse().unwrap_or_default();
            if den.is_zero() {
                (self.i, self.line, self.col) = save;
            } else {
                value /= Rational::from_integer(den);
            }
        }
        if value.denom().is_one() {
            value
        } else {
            value.reduced()
        }
    }

    fn run(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        loop {
            let pos = self.pos();
            let Some(c) = self.peek(0) else {
                out.push(Token { tok: Tok::Eof, pos });
                return Ok(out);
            };
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            if c == '(' && self.peek(1) == Some('*') {
                self.bump();
                self.bump();
                self.skip_comment(pos)?;
                continue;
            }
            let tok = if c.is_ascii_digit() {
                Tok::Num(self.number())
            } else if c.is_alphabetic() || c == '_' {
                let mut word = String::new();
                while let Some(c) = self
                    .peek(0)
                    .filter(|c| c.is_alphanumeric() || *c == '_' || *c == '\'')
                {
                    word.push(c);
                    self.bump();
                }
                keyword(&word).unwrap_or(Tok::Ident(word))
            } else if c == '"' {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        Some('"') => break,
                        Some('\\') => match self.bump() {
                            Some('n') => s.push('\n'),
                            Some(c) => s.push(c),
                            None => return Err(self.error(pos, "unterminated string")),
                        },
                        Some(c) => s.push(c),
                        None => return Err(self.error(pos, "unterminated string")),
                    }
                }
                Tok::Str(s)
            } else if c == '#' {
                self.bump();
                if self.peek(0).is_some_and(|c| c.is_alphabetic()) {
                    let mut name = String::new();
                    while let Some(c) = self.peek(0).filter(|c| c.is_alphanumeric() || *c == '_') {
                        name.push(c);
                        self.bump();
                    }
                    Tok::Directive(name)
                } else {
                    Tok::Hash
                }
            } else {
                let two: String = [Some(c), self.peek(1)].iter().flatten().collect();
                let (tok, len) = match two.as_str() {
                    "/\\" => (Tok::And, 2),
                    "\\/" => (Tok::Or, 2),
                    "||" => (Tok::Join, 2),
                    "~>" => (Tok::Restrict, 2),
                    "=>" => (Tok::FatArrow, 2),
                    "->" => (Tok::Arrow, 2),
                    ";;" => (Tok::Terminator, 2),
                    _ => match c {
                        '+' => (Tok::Plus, 1),
                        '-' => (Tok::Minus, 1),
                        '*' => (Tok::Star, 1),
                        '/' => (Tok::Slash, 1),
                        '^' => (Tok::Caret, 1),
                        '<' => (Tok::Lt, 1),
                        '>' => (Tok::Gt, 1),
                        ',' => (Tok::Comma, 1),
                        ':' => (Tok::Colon, 1),
                        '(' => (Tok::LParen, 1),
                        ')' => (Tok::RParen, 1),
                        '[' => (Tok::LBracket, 1),
                        ']' => (Tok::RBracket, 1),
                        '=' => (Tok::Eq, 1),
                        _ => return Err(self.error(pos, format!("illegal character '{c}'"))),
                    },
                };
                for _ in 0..len {
                    self.bump();
                }
                tok
            };
            out.push(Token { tok, pos });
        }
    }
}

/// Splits source text into tokens, dropping whitespace and `(* ... *)` comments.
/// The returned list always ends with [`Tok::Eof`].
pub fn tokenize(source: &str) -> Result<Vec<Token>, ParseError> {
    Lexer {
        chars: source.chars().collect(),
        i: 0,
        line: 1,
        col: 1,
    }
    .run()
}
