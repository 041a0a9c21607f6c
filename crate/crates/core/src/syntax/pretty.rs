use num_traits::Signed;

use super::{ArithOp, Expr, Range};
use crate::interval::{Rational, XRat};

// Binding strength of each syntactic level; higher binds tighter.
const JOIN: u8 = 0;
const RESTRICT: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const CMP: u8 = 4;
const ADD: u8 = 5;
const MUL: u8 = 6;
const UNARY: u8 = 7;
const POW: u8 = 8;
const APP: u8 = 9;
const ATOM: u8 = 10;

pub(crate) fn rational(q: &Rational) -> String {
    if q.is_negative() {
        format!("(-{})", -q)
    } else {
        q.to_string()
    }
}

fn limit(x: &XRat) -> String {
    x.to_string()
}

fn range(r: &Range) -> String {
    format!(
        "{}{}, {}{}",
        if r.lo_open { '(' } else { '[' },
        limit(&r.lo),
        limit(&r.hi),
        if r.hi_open { ')' } else { ']' }
    )
}

fn join_with(es: &[Expr], sep: &str, need: u8) -> String {
    es.iter()
        .map(|e| print(e, need))
        .collect::<Vec<_>>()
        .join(sep)
}

fn print(e: &Expr, need: u8) -> String {
    let (text, level) = layout(e);
    if level < need {
        format!("({text})")
    } else {
        text
    }
}

fn layout(e: &Expr) -> (String, u8) {
    match e {
        Expr::Var(x) => (x.clone(), ATOM),
        Expr::True => ("True".into(), ATOM),
        Expr::False => ("False".into(), ATOM),
        Expr::Rat(q) => (rational(q), ATOM),
        Expr::Tuple(es) => (format!("({})", join_with(es, ", ", JOIN)), ATOM),
        Expr::Proj(inner, k) => (format!("{}#{k}", print(inner, ATOM)), ATOM),
        Expr::App(f, a) => {
            let head = match **f {
                Expr::MkBool(..) | Expr::IsTrue(_) | Expr::IsFalse(_) => print(f, ATOM),
                _ => print(f, APP),
            };
            (format!("{head} {}", print(a, ATOM)), APP)
        }
        Expr::MkBool(p, q) => (format!("mkbool {} {}", print(p, ATOM), print(q, ATOM)), APP),
        Expr::IsTrue(b) => (format!("is_true {}", print(b, ATOM)), APP),
        Expr::IsFalse(b) => (format!("is_false {}", print(b, ATOM)), APP),
        Expr::Pow(b, k) => (format!("{} ^ {k}", print(b, APP)), POW),
        Expr::Arith(op, a, b) => {
            let level = match op {
                ArithOp::Add | ArithOp::Sub => ADD,
                ArithOp::Mul | ArithOp::Div => MUL,
            };
            let rhs_need = if level == ADD { MUL } else { UNARY };
            (
                format!("{} {} {}", print(a, level), op.symbol(), print(b, rhs_need)),
                level,
            )
        }
        Expr::Less(a, b) => (format!("{} < {}", print(a, ADD), print(b, ADD)), CMP),
        Expr::And(es) => (join_with(es, " /\\ ", CMP), AND),
        Expr::Or(es) => (join_with(es, " \\/ ", AND), OR),
        Expr::Restrict(g, b) => (
            format!("{} ~> {}", print(g, OR), print(b, RESTRICT)),
            RESTRICT,
        ),
        Expr::Join(es) => (join_with(es, " || ", RESTRICT), JOIN),
        // Binders extend as far right as possible, so they print bare only at
        // the loosest level.
        Expr::Lambda { var, ty, body } => {
            (format!("fun {var} : {ty} => {}", print(body, JOIN)), JOIN)
        }
        Expr::Cut {
            var,
            range: r,
            left,
            right,
            ..
        } => (
            format!(
                "cut {var} : {} left {} right {}",
                range(r),
                print(left, JOIN),
                print(right, JOIN)
            ),
            JOIN,
        ),
        Expr::Exists {
            var,
            range: r,
            body,
        } => (
            format!("exists {var} : {}, {}", range(r), print(body, JOIN)),
            JOIN,
        ),
        Expr::Forall {
            var,
            range: r,
            body,
        } => (
            format!("forall {var} : {}, {}", range(r), print(body, JOIN)),
            JOIN,
        ),
        Expr::Let { var, value, body } => (
            format!(
                "let {var} = {} in {}",
                print(value, JOIN),
                print(body, JOIN)
            ),
            JOIN,
        ),
    }
}

/// Renders an expression in surface syntax with only the parentheses needed to
/// parse back to the same tree.
pub fn pretty_print(e: &Expr) -> String {
    let (text, level) = layout(e);
    if level == JOIN && matches!(e, Expr::Join(_)) {
        format!("({text})")
    } else {
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::rat;
    use crate::syntax::parse_expr;

    #[test]
    fn rationals() {
        assert_eq!(pretty_print(&Expr::Rat(rat(3, 2))), "3/2");
        assert_eq!(pretty_print(&Expr::Rat(rat(-3, 2))), "(-3/2)");
        assert_eq!(pretty_print(&Expr::int(7)), "7");
    }

    #[test]
    fn join_is_parenthesized() {
        let e = Expr::Join(vec![Expr::var("a"), Expr::var("b")]);
        assert_eq!(pretty_print(&e), "(a || b)");
    }

    #[test]
    fn minimal_parentheses() {
        for src in [
            "a - (b - c)",
            "a - b - c",
            "(x ^ 2) ^ 3",
            "f (g x) y#2",
            "(fun x : real => x) 1",
            "mkbool (x < 1) (0 < x)",
            "a ~> b ~> c",
            "(a ~> b) || c",
            "(a \\/ b) /\\ c",
            "cut x : (-inf, 2] left x < 0 right 0 < x",
        ] {
            let e = parse_expr(src).unwrap();
            let printed = pretty_print(&e);
            assert_eq!(
                parse_expr(&printed).unwrap(),
                e,
                "{src} printed as {printed}"
            );
        }
        assert_eq!(
            pretty_print(&parse_expr("a - (b - c)").unwrap()),
            "a - (b - c)"
        );
        assert_eq!(pretty_print(&parse_expr("a*b + c").unwrap()), "a * b + c");
    }
}
