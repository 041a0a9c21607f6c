//! Surface syntax: abstract syntax tree, lexer, parser and printer.

mod lexer;
mod parser;
mod pretty;

use std::fmt;

pub use lexer::{tokenize, Tok, Token};
pub use parser::{parse_expr, parse_program, parse_type};
pub use pretty::pretty_print;

use crate::interval::{GInterval, Rational, XRat};

pub type Name = String;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {msg}")]
pub struct ParseError {
    pub pos: Pos,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ty {
    Real,
    Prop,
    Bool,
    Product(Vec<Ty>),
    Arrow(Box<Ty>, Box<Ty>),
}

impl Ty {
    pub fn arrow(from: Ty, to: Ty) -> Ty {
        Ty::Arrow(Box::new(from), Box::new(to))
    }

    /// A base type contains no function arrow.
    pub fn is_base(&self) -> bool {
        match self {
            Ty::Real | Ty::Prop | Ty::Bool => true,
            Ty::Product(ts) => ts.iter().all(Ty::is_base),
            Ty::Arrow(..) => false,
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Real => write!(f, "real"),
            Ty::Prop => write!(f, "prop"),
            Ty::Bool => write!(f, "bool"),
            Ty::Product(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " * ")?;
                    }
                    match t {
                        Ty::Product(_) | Ty::Arrow(..) => write!(f, "({t})")?,
                        _ => write!(f, "{t}")?,
                    }
                }
                Ok(())
            }
            Ty::Arrow(a, b) => match **a {
                Ty::Arrow(..) => write!(f, "({a}) -> {b}"),
                _ => write!(f, "{a} -> {b}"),
            },
        }
    }
}

/// A range `[a, b]`, `(a, b)` or a mix of open and closed ends.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Range {
    pub lo: XRat,
    pub hi: XRat,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Range {
    pub fn closed(lo: Rational, hi: Rational) -> Range {
        Range {
            lo: XRat::Fin(lo),
            hi: XRat::Fin(hi),
            lo_open: false,
            hi_open: false,
        }
    }

    pub fn open(lo: XRat, hi: XRat) -> Range {
        Range {
            lo,
            hi,
            lo_open: true,
            hi_open: true,
        }
    }

    pub fn is_compact(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite() && !self.lo_open && !self.hi_open
    }

    /// The proper interval spanned by the range.
    pub fn interval(&self) -> GInterval {
        GInterval::new(self.lo.clone(), self.hi.clone())
    }

    /// Same open/closed flags, new endpoints.
    pub fn with_bounds(&self, lo: XRat, hi: XRat) -> Range {
        Range {
            lo,
            hi,
            lo_open: self.lo_open,
            hi_open: self.hi_open,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(Name),
    True,
    False,
    Rat(Rational),
    /// `cut x : r left L right R`. `probes` counts visits that searched for a
    /// finite bound on an infinite end of the range.
    Cut {
        var: Name,
        range: Range,
        left: Box<Expr>,
        right: Box<Expr>,
        probes: u32,
    },
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Less(Box<Expr>, Box<Expr>),
    Exists {
        var: Name,
        range: Range,
        body: Box<Expr>,
    },
    Forall {
        var: Name,
        range: Range,
        body: Box<Expr>,
    },
    Tuple(Vec<Expr>),
    /// Projection `e#k`, with `k >= 1`.
    Proj(Box<Expr>, usize),
    Lambda {
        var: Name,
        ty: Ty,
        body: Box<Expr>,
    },
    App(Box<Expr>, Box<Expr>),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Let {
        var: Name,
        value: Box<Expr>,
        body: Box<Expr>,
    },
    /// `guard ~> body`
    Restrict(Box<Expr>, Box<Expr>),
    Join(Vec<Expr>),
    MkBool(Box<Expr>, Box<Expr>),
    IsTrue(Box<Expr>),
    IsFalse(Box<Expr>),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Rat(crate::interval::int(n))
    }

    pub fn arith(op: ArithOp, a: Expr, b: Expr) -> Expr {
        Expr::Arith(op, Box::new(a), Box::new(b))
    }

    pub fn less(a: Expr, b: Expr) -> Expr {
        Expr::Less(Box::new(a), Box::new(b))
    }

    pub fn app(f: Expr, a: Expr) -> Expr {
        Expr::App(Box::new(f), Box::new(a))
    }

    pub fn restrict(guard: Expr, body: Expr) -> Expr {
        Expr::Restrict(Box::new(guard), Box::new(body))
    }

    pub fn mkbool(p: Expr, q: Expr) -> Expr {
        Expr::MkBool(Box::new(p), Box::new(q))
    }

    pub fn lambda(var: &str, ty: Ty, body: Expr) -> Expr {
        Expr::Lambda {
            var: var.to_string(),
            ty,
            body: Box::new(body),
        }
    }

    pub fn cut(var: &str, range: Range, left: Expr, right: Expr) -> Expr {
        Expr::Cut {
            var: var.to_string(),
            range,
            left: Box::new(left),
            right: Box::new(right),
            probes: 0,
        }
    }

    pub fn exists(var: &str, range: Range, body: Expr) -> Expr {
        Expr::Exists {
            var: var.to_string(),
            range,
            body: Box::new(body),
        }
    }

    pub fn forall(var: &str, range: Range, body: Expr) -> Expr {
        Expr::Forall {
            var: var.to_string(),
            range,
            body: Box::new(body),
        }
    }

    /// True when no `||` occurs anywhere in the expression.
    pub fn is_join_free(&self) -> bool {
        let mut free = true;
        self.visit(&mut |e| {
            if matches!(e, Expr::Join(_)) {
                free = false;
            }
        });
        free
    }

    /// Pre-order traversal over every subexpression.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Var(_) | Expr::True | Expr::False | Expr::Rat(_) => {}
            Expr::Cut { left, right, .. } => {
                left.visit(f);
                right.visit(f);
            }
            Expr::And(es) | Expr::Or(es) | Expr::Tuple(es) | Expr::Join(es) => {
                for e in es {
                    e.visit(f);
                }
            }
            Expr::Less(a, b)
            | Expr::App(a, b)
            | Expr::Arith(_, a, b)
            | Expr::Restrict(a, b)
            | Expr::MkBool(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Expr::Exists { body, .. } | Expr::Forall { body, .. } | Expr::Lambda { body, .. } => {
                body.visit(f)
            }
            Expr::Proj(e, _) | Expr::Pow(e, _) | Expr::IsTrue(e) | Expr::IsFalse(e) => e.visit(f),
            Expr::Let { value, body, .. } => {
                value.visit(f);
                body.visit(f);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_print(self))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Directive {
    Precision(Rational),
    Use(String),
    Trace(bool),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TopItem {
    Def(Name, Expr),
    Eval(Expr),
    Directive(Directive),
}

/// A top-level item together with the position of its first token.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Item {
    pub pos: Pos,
    pub item: TopItem,
}
