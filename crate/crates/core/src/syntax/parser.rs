use num_traits::{Signed, ToPrimitive, Zero};

use super::lexer::{tokenize, Tok, Token};
use super::{ArithOp, Directive, Expr, Item, ParseError, Pos, Range, TopItem, Ty};
use crate::interval::{Rational, XRat};

struct Parser {
    toks: Vec<Token>,
    i: usize,
}

type PResult<T> = Result<T, ParseError>;

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Num(q) => format!("number {q}"),
        Tok::Str(s) => format!("string \"{s}\""),
        Tok::Directive(d) => format!("directive #{d}"),
        Tok::Eof => "end of input".to_string(),
        other => format!("{other:?}"),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.i].tok.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.advance();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.error(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                Ok(s)
            }
            other => self.error(format!("expected identifier, found {}", describe(&other))),
        }
    }

    fn natural(&mut self, what: &str) -> PResult<u64> {
        match self.peek().clone() {
            Tok::Num(q) if q.is_integer() => match q.to_integer().to_u64() {
                Some(n) => {
                    self.advance();
                    Ok(n)
                }
                None => self.error(format!("{what} is too large")),
            },
            other => self.error(format!("expected {what}, found {}", describe(&other))),
        }
    }

    // ---- types ----

    fn ty(&mut self) -> PResult<Ty> {
        let from = self.product_ty()?;
        if self.eat(&Tok::Arrow) {
            let to = self.ty()?;
            Ok(Ty::arrow(from, to))
        } else {
            Ok(from)
        }
    }

    fn product_ty(&mut self) -> PResult<Ty> {
        let first = self.atom_ty()?;
        if self.peek() != &Tok::Star {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.eat(&Tok::Star) {
            parts.push(self.atom_ty()?);
        }
        Ok(Ty::Product(parts))
    }

    fn atom_ty(&mut self) -> PResult<Ty> {
        match self.advance() {
            Tok::Real => Ok(Ty::Real),
            Tok::Prop => Ok(Ty::Prop),
            Tok::Bool => Ok(Ty::Bool),
            Tok::LParen => {
                let t = self.ty()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            other => {
                self.i -= 1;
                self.error(format!("expected a type, found {}", describe(&other)))
            }
        }
    }

    // ---- ranges ----

    fn limit(&mut self) -> PResult<XRat> {
        let negative = self.eat(&Tok::Minus);
        match self.advance() {
            Tok::Inf => Ok(if negative { XRat::NegInf } else { XRat::PosInf }),
            Tok::Num(q) => Ok(XRat::Fin(if negative { -q } else { q })),
            other => {
                self.i -= 1;
                self.error(format!(
                    "expected a range limit, found {}",
                    describe(&other)
                ))
            }
        }
    }

    fn range(&mut self) -> PResult<Range> {
        let start = self.pos();
        let lo_open = match self.advance() {
            Tok::LParen => true,
            Tok::LBracket => false,
            other => {
                self.i -= 1;
                return self.error(format!(
                    "expected `(` or `[` to open a range, found {}",
                    describe(&other)
                ));
            }
        };
        let lo = self.limit()?;
        self.expect(Tok::Comma, "`,` in range")?;
        let hi = self.limit()?;
        let hi_open = match self.advance() {
            Tok::RParen => true,
            Tok::RBracket => false,
            other => {
                self.i -= 1;
                return self.error(format!(
                    "expected `)` or `]` to close a range, found {}",
                    describe(&other)
                ));
            }
        };
        let err = |msg: &str| {
            Err(ParseError {
                pos: start,
                msg: msg.to_string(),
            })
        };
        if (!lo.is_finite() && !lo_open) || (!hi.is_finite() && !hi_open) {
            return err("an infinite range limit requires an open bracket");
        }
        if lo == XRat::PosInf || hi == XRat::NegInf {
            return err("range limits are reversed");
        }
        if lo > hi {
            return err("range lower limit exceeds upper limit");
        }
        Ok(Range {
            lo,
            hi,
            lo_open,
            hi_open,
        })
    }

    // ---- expressions, loosest to tightest ----

    fn expr(&mut self) -> PResult<Expr> {
        let first = self.restrict()?;
        if self.peek() != &Tok::Join {
            return Ok(first);
        }
        let mut parts = Vec::new();
        flatten_into(&mut parts, first, split_join);
        while self.eat(&Tok::Join) {
            flatten_into(&mut parts, self.restrict()?, split_join);
        }
        Ok(Expr::Join(parts))
    }

    fn restrict(&mut self) -> PResult<Expr> {
        let guard = self.or()?;
        if self.eat(&Tok::Restrict) {
            let body = self.restrict()?;
            Ok(Expr::restrict(guard, body))
        } else {
            Ok(guard)
        }
    }

    fn or(&mut self) -> PResult<Expr> {
        let first = self.and()?;
        if self.peek() != &Tok::Or {
            return Ok(first);
        }
        let mut parts = Vec::new();
        flatten_into(&mut parts, first, split_or);
        while self.eat(&Tok::Or) {
            flatten_into(&mut parts, self.and()?, split_or);
        }
        Ok(Expr::Or(parts))
    }

    fn and(&mut self) -> PResult<Expr> {
        let first = self.cmp()?;
        if self.peek() != &Tok::And {
            return Ok(first);
        }
        let mut parts = Vec::new();
        flatten_into(&mut parts, first, split_and);
        while self.eat(&Tok::And) {
            flatten_into(&mut parts, self.cmp()?, split_and);
        }
        Ok(Expr::And(parts))
    }

    fn cmp(&mut self) -> PResult<Expr> {
        let lhs = self.additive()?;
        if self.eat(&Tok::Lt) {
            let rhs = self.additive()?;
            Ok(Expr::less(lhs, rhs))
        } else if self.eat(&Tok::Gt) {
            let rhs = self.additive()?;
            Ok(Expr::less(rhs, lhs))
        } else {
            Ok(lhs)
        }
    }

    fn additive(&mut self) -> PResult<Expr> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.multiplicative()?;
            lhs = Expr::arith(op, lhs, rhs);
        }
    }

    fn multiplicative(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => ArithOp::Mul,
                Tok::Slash => ArithOp::Div,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.unary()?;
            lhs = Expr::arith(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat(&Tok::Minus) {
            // negating a bare literal yields a negative literal; anything else is `0 - e`
            return Ok(match self.unary()? {
                Expr::Rat(q) => Expr::Rat(-q),
                e => Expr::arith(ArithOp::Sub, Expr::Rat(Rational::zero()), e),
            });
        }
        self.power()
    }

    fn power(&mut self) -> PResult<Expr> {
        let mut base = self.application()?;
        while self.eat(&Tok::Caret) {
            let k = self.natural("natural exponent")?;
            let Ok(k) = u32::try_from(k) else {
                return self.error("exponent is too large");
            };
            base = Expr::Pow(Box::new(base), k);
        }
        Ok(base)
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_)
                | Tok::Num(_)
                | Tok::True
                | Tok::False
                | Tok::LParen
                | Tok::Fun
                | Tok::Cut
                | Tok::Exists
                | Tok::Forall
                | Tok::Let
        )
    }

    fn application(&mut self) -> PResult<Expr> {
        match self.peek() {
            Tok::MkBool => {
                self.advance();
                let p = self.postfix()?;
                let q = self.postfix()?;
                return Ok(Expr::mkbool(p, q));
            }
            Tok::IsTrue => {
                self.advance();
                return Ok(Expr::IsTrue(Box::new(self.postfix()?)));
            }
            Tok::IsFalse => {
                self.advance();
                return Ok(Expr::IsFalse(Box::new(self.postfix()?)));
            }
            _ => {}
        }
        let mut head = self.postfix()?;
        while self.starts_atom() {
            let arg = self.postfix()?;
            head = Expr::app(head, arg);
        }
        Ok(head)
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.atom()?;
        while self.peek() == &Tok::Hash {
            self.advance();
            let k = self.natural("projection index")?;
            if k == 0 {
                return self.error("projection indices start at 1");
            }
            e = Expr::Proj(Box::new(e), k as usize);
        }
        Ok(e)
    }

    fn atom(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.advance();
                Ok(Expr::Var(name))
            }
            Tok::Num(q) => {
                self.advance();
                Ok(Expr::Rat(q))
            }
            Tok::True => {
                self.advance();
                Ok(Expr::True)
            }
            Tok::False => {
                self.advance();
                Ok(Expr::False)
            }
            Tok::LParen => {
                self.advance();
                let first = self.expr()?;
                if self.eat(&Tok::RParen) {
                    return Ok(first);
                }
                let mut parts = vec![first];
                while self.eat(&Tok::Comma) {
                    parts.push(self.expr()?);
                }
                self.expect(Tok::RParen, "`)` or `,`")?;
                Ok(Expr::Tuple(parts))
            }
            Tok::Fun => {
                self.advance();
                let var = self.ident()?;
                self.expect(Tok::Colon, "`:` after function parameter")?;
                let ty = self.ty()?;
                self.expect(Tok::FatArrow, "`=>`")?;
                let body = self.expr()?;
                Ok(Expr::Lambda {
                    var,
                    ty,
                    body: Box::new(body),
                })
            }
            Tok::Cut => {
                self.advance();
                let var = self.ident()?;
                self.expect(Tok::Colon, "`:` after cut variable")?;
                let range = self.range()?;
                self.expect(Tok::Left, "`left`")?;
                let left = self.expr()?;
                self.expect(Tok::Right, "`right`")?;
                let right = self.expr()?;
                Ok(Expr::Cut {
                    var,
                    range,
                    left: Box::new(left),
                    right: Box::new(right),
                    probes: 0,
                })
            }
            Tok::Exists | Tok::Forall => {
                let universal = self.advance() == Tok::Forall;
                let var = self.ident()?;
                self.expect(Tok::Colon, "`:` after quantified variable")?;
                let range = self.range()?;
                self.expect(Tok::Comma, "`,` after quantifier range")?;
                let body = Box::new(self.expr()?);
                Ok(if universal {
                    Expr::Forall { var, range, body }
                } else {
                    Expr::Exists { var, range, body }
                })
            }
            Tok::Let => {
                self.advance();
                let var = self.ident()?;
                self.expect(Tok::Eq, "`=`")?;
                let value = self.expr()?;
                self.expect(Tok::In, "`in`")?;
                let body = self.expr()?;
                Ok(Expr::Let {
                    var,
                    value: Box::new(value),
                    body: Box::new(body),
                })
            }
            other => self.error(format!(
                "expected an expression, found {}",
                describe(&other)
            )),
        }
    }

    // ---- top level ----

    fn terminator(&mut self) -> PResult<()> {
        if self.peek() == &Tok::Eof {
            return self.error("unterminated item: missing `;;`");
        }
        self.expect(Tok::Terminator, "`;;`")
    }

    fn directive(&mut self, name: &str) -> PResult<Directive> {
        match name {
            "precision" => {
                let negative = self.eat(&Tok::Minus);
                match self.advance() {
                    Tok::Num(q) if !negative && q.is_positive() => Ok(Directive::Precision(q)),
                    Tok::Num(_) => self.error("precision must be positive"),
                    other => self.error(format!(
                        "expected a rational precision, found {}",
                        describe(&other)
                    )),
                }
            }
            "use" => match self.advance() {
                Tok::Str(path) => Ok(Directive::Use(path)),
                other => self.error(format!(
                    "expected a quoted file name, found {}",
                    describe(&other)
                )),
            },
            "trace" => match self.advance() {
                Tok::Ident(s) if s == "on" => Ok(Directive::Trace(true)),
                Tok::Ident(s) if s == "off" => Ok(Directive::Trace(false)),
                other => self.error(format!(
                    "expected `on` or `off`, found {}",
                    describe(&other)
                )),
            },
            other => self.error(format!("unknown directive #{other}")),
        }
    }

    fn item(&mut self) -> PResult<Item> {
        let pos = self.pos();
        if let Tok::Directive(name) = self.peek().clone() {
            self.advance();
            let d = self.directive(&name)?;
            self.terminator()?;
            return Ok(Item {
                pos,
                item: TopItem::Directive(d),
            });
        }
        if self.peek() == &Tok::Let
            && matches!(self.peek_at(1), Tok::Ident(_))
            && self.peek_at(2) == &Tok::Eq
        {
            self.advance();
            let var = self.ident()?;
            self.advance();
            let value = self.expr()?;
            if self.peek() == &Tok::In {
                self.advance();
                let body = self.expr()?;
                self.terminator()?;
                return Ok(Item {
                    pos,
                    item: TopItem::Eval(Expr::Let {
                        var,
                        value: Box::new(value),
                        body: Box::new(body),
                    }),
                });
            }
            self.terminator()?;
            return Ok(Item {
                pos,
                item: TopItem::Def(var, value),
            });
        }
        let e = self.expr()?;
        self.terminator()?;
        Ok(Item {
            pos,
            item: TopItem::Eval(e),
        })
    }
}

fn split_join(e: &mut Expr) -> Option<Vec<Expr>> {
    match e {
        Expr::Join(v) => Some(std::mem::take(v)),
        _ => None,
    }
}

fn split_or(e: &mut Expr) -> Option<Vec<Expr>> {
    match e {
        Expr::Or(v) => Some(std::mem::take(v)),
        _ => None,
    }
}

fn split_and(e: &mut Expr) -> Option<Vec<Expr>> {
    match e {
        Expr::And(v) => Some(std::mem::take(v)),
        _ => None,
    }
}

fn flatten_into(parts: &mut Vec<Expr>, mut e: Expr, split: fn(&mut Expr) -> Option<Vec<Expr>>) {
    match split(&mut e) {
        Some(v) => parts.extend(v),
        None => parts.push(e),
    }
}

fn parser_for(source: &str) -> PResult<Parser> {
    Ok(Parser {
        toks: tokenize(source)?,
        i: 0,
    })
}

/// Parses a whole program: a sequence of `;;`-terminated items.
pub fn parse_program(source: &str) -> Result<Vec<Item>, ParseError> {
    let mut p = parser_for(source)?;
    let mut items = Vec::new();
    while p.peek() != &Tok::Eof {
        items.push(p.item()?);
    }
    Ok(items)
}

/// Parses a single expression with no terminator.
pub fn parse_expr(source: &str) -> Result<Expr, ParseError> {
    let mut p = parser_for(source)?;
    let e = p.expr()?;
    if p.peek() != &Tok::Eof {
        return p.error(format!("unexpected {}", describe(p.peek())));
    }
    Ok(e)
}

pub fn parse_type(source: &str) -> Result<Ty, ParseError> {
    let mut p = parser_for(source)?;
    let t = p.ty()?;
    if p.peek() != &Tok::Eof {
        return p.error(format!("unexpected {}", describe(p.peek())));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::{int, rat};

    fn only_item(src: &str) -> TopItem {
        let mut items = parse_program(src).unwrap();
        assert_eq!(items.len(), 1);
        items.pop().unwrap().item
    }

    #[test]
    fn definition_of_a_function() {
        let item = only_item("let a = fun x : real => x + 1;;");
        assert_eq!(
            item,
            TopItem::Def(
                "a".into(),
                Expr::lambda(
                    "x",
                    Ty::Real,
                    Expr::arith(ArithOp::Add, Expr::var("x"), Expr::int(1))
                )
            )
        );
    }

    #[test]
    fn cut_with_flipped_comparisons() {
        let item = only_item("cut x : [0,2] left x < 0 \\/ x*x < 2 right x > 0 /\\ x*x > 2;;");
        let x = || Expr::var("x");
        let xx = || Expr::arith(ArithOp::Mul, x(), x());
        let expected = Expr::cut(
            "x",
            Range::closed(int(0), int(2)),
            Expr::Or(vec![
                Expr::less(x(), Expr::int(0)),
                Expr::less(xx(), Expr::int(2)),
            ]),
            Expr::And(vec![
                Expr::less(Expr::int(0), x()),
                Expr::less(Expr::int(2), xx()),
            ]),
        );
        assert_eq!(item, TopItem::Eval(expected));
    }

    #[test]
    fn join_is_looser_than_restriction() {
        let e = parse_expr("a < b ~> c || d ~> e").unwrap();
        assert_eq!(
            e,
            Expr::Join(vec![
                Expr::restrict(Expr::less(Expr::var("a"), Expr::var("b")), Expr::var("c")),
                Expr::restrict(Expr::var("d"), Expr::var("e")),
            ])
        );
    }

    #[test]
    fn precedence_ladder() {
        let e = parse_expr("a \\/ b /\\ c < d + e * f ^ 2").unwrap();
        let rhs = Expr::arith(
            ArithOp::Add,
            Expr::var("d"),
            Expr::arith(
                ArithOp::Mul,
                Expr::var("e"),
                Expr::Pow(Box::new(Expr::var("f")), 2),
            ),
        );
        assert_eq!(
            e,
            Expr::Or(vec![
                Expr::var("a"),
                Expr::And(vec![Expr::var("b"), Expr::less(Expr::var("c"), rhs)]),
            ])
        );
    }

    #[test]
    fn application_and_projection() {
        let e = parse_expr("f x y#2").unwrap();
        assert_eq!(
            e,
            Expr::app(
                Expr::app(Expr::var("f"), Expr::var("x")),
                Expr::Proj(Box::new(Expr::var("y")), 2)
            )
        );
    }

    #[test]
    fn negative_literals() {
        assert_eq!(parse_expr("-3/2").unwrap(), Expr::Rat(rat(-3, 2)));
        assert_eq!(
            parse_expr("-2^2").unwrap(),
            Expr::arith(
                ArithOp::Sub,
                Expr::int(0),
                Expr::Pow(Box::new(Expr::int(2)), 2)
            )
        );
        assert_eq!(
            parse_expr("accel (-5) 10").unwrap(),
            Expr::app(Expr::app(Expr::var("accel"), Expr::int(-5)), Expr::int(10))
        );
    }

    #[test]
    fn binders_extend_right() {
        let e = parse_expr("exists x : [0, 1], x < 1 /\\ 0 < x").unwrap();
        match e {
            Expr::Exists { body, .. } => assert!(matches!(*body, Expr::And(_))),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ranges() {
        let e = parse_expr("cut z : (-inf, inf) left z < 0 right 0 < z").unwrap();
        match e {
            Expr::Cut { range, .. } => {
                assert_eq!(range, Range::open(XRat::NegInf, XRat::PosInf));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_expr("cut z : [-inf, 1) left True right True").is_err());
        assert!(parse_expr("exists x : [2, 1], True").is_err());
    }

    #[test]
    fn types() {
        assert_eq!(
            parse_type("real * prop -> bool").unwrap(),
            Ty::arrow(Ty::Product(vec![Ty::Real, Ty::Prop]), Ty::Bool)
        );
        assert_eq!(
            parse_type("(real -> real) -> real").unwrap(),
            Ty::arrow(Ty::arrow(Ty::Real, Ty::Real), Ty::Real)
        );
    }

    #[test]
    fn directives() {
        let items = parse_program("#precision 1/1000000;; #use \"a.msl\";; #trace on;;").unwrap();
        let items: Vec<TopItem> = items.into_iter().map(|i| i.item).collect();
        assert_eq!(
            items,
            vec![
                TopItem::Directive(Directive::Precision(rat(1, 1_000_000))),
                TopItem::Directive(Directive::Use("a.msl".into())),
                TopItem::Directive(Directive::Trace(true)),
            ]
        );
        assert!(parse_program("#precision 0;;").is_err());
        assert!(parse_program("#frobnicate 1;;").is_err());
    }

    #[test]
    fn missing_terminator() {
        let err = parse_program("1 + 1").unwrap_err();
        assert!(err.msg.contains(";;"), "{err}");
    }

    #[test]
    fn syntax_error_location() {
        let err = parse_program("1 +\n  ) ;;").unwrap_err();
        assert_eq!(err.pos, Pos { line: 2, col: 3 });
    }

    #[test]
    fn let_in_at_top_level() {
        let item = only_item("let x = 1 in x + x;;");
        assert!(matches!(item, TopItem::Eval(Expr::Let { .. })));
    }
}
