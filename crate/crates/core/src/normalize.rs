//! Reduction to a list of join-free alternatives.
//!
//! Lets and beta-redexes are eliminated by substitution, projections of tuples
//! are reduced and every `||` is moved outward until only the top-level list of
//! alternatives remains. Below the root a prop-valued choice is an ordinary
//! disjunction, so prop alternatives are folded into `Or` where they arise.

use std::collections::HashSet;

use crate::syntax::{ArithOp, Expr, Name, Ty};
use crate::typing::{infer_type, TyCtx, TypeError};

/// A non-empty list of join-free alternatives, all of one type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub disjuncts: Vec<Expr>,
    pub ty: Ty,
}

impl NormalForm {
    /// Rebuilds a single expression, joining the alternatives when there are
    /// several.
    pub fn into_expr(mut self) -> Expr {
        if self.disjuncts.len() == 1 {
            self.disjuncts.pop().unwrap()
        } else {
            Expr::Join(self.disjuncts)
        }
    }
}

pub fn free_vars(e: &Expr) -> HashSet<Name> {
    fn go(e: &Expr, bound: &mut Vec<Name>, out: &mut HashSet<Name>) {
        let under = |var: &Name, body: &Expr, bound: &mut Vec<Name>, out: &mut HashSet<Name>| {
            bound.push(var.clone());
            go(body, bound, out);
            bound.pop();
        };
        match e {
            Expr::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Expr::True | Expr::False | Expr::Rat(_) => {}
            Expr::Cut {
                var, left, right, ..
            } => {
                under(var, left, bound, out);
                under(var, right, bound, out);
            }
            Expr::Exists { var, body, .. }
            | Expr::Forall { var, body, .. }
            | Expr::Lambda { var, body, .. } => under(var, body, bound, out),
            Expr::Let { var, value, body } => {
                go(value, bound, out);
                under(var, body, bound, out);
            }
            Expr::And(es) | Expr::Or(es) | Expr::Tuple(es) | Expr::Join(es) => {
                for e in es {
                    go(e, bound, out);
                }
            }
            Expr::Less(a, b)
            | Expr::App(a, b)
            | Expr::Arith(_, a, b)
            | Expr::Restrict(a, b)
            | Expr::MkBool(a, b) => {
                go(a, bound, out);
                go(b, bound, out);
            }
            Expr::Proj(a, _) | Expr::Pow(a, _) | Expr::IsTrue(a) | Expr::IsFalse(a) => {
                go(a, bound, out)
            }
        }
    }
    let mut out = HashSet::new();
    go(e, &mut Vec::new(), &mut out);
    out
}

fn fresh(base: &str, avoid: &HashSet<Name>) -> Name {
    let mut name = format!("{base}'");
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

/// Capture-avoiding substitution `[v/x]e`.
pub fn substitute(x: &str, v: &Expr, e: &Expr) -> Expr {
    let fv = free_vars(v);
    subst(x, v, &fv, e)
}

// Substitutes under a binder for `var`. Returns the possibly renamed binder
// together with the substituted bodies.
fn under_binder(
    x: &str,
    v: &Expr,
    fv: &HashSet<Name>,
    var: &Name,
    bodies: &[&Expr],
) -> (Name, Vec<Expr>) {
    if var == x {
        return (var.clone(), bodies.iter().map(|b| (*b).clone()).collect());
    }
    let occurs = bodies.iter().any(|b| free_vars(b).contains(x));
    if occurs && fv.contains(var) {
        let mut avoid = fv.clone();
        for b in bodies {
            avoid.extend(free_vars(b));
        }
        avoid.insert(x.to_string());
        let renamed = fresh(var, &avoid);
        let rv = Expr::Var(renamed.clone());
        let out = bodies
            .iter()
            .map(|b| subst(x, v, fv, &substitute(var, &rv, b)))
            .collect();
        (renamed, out)
    } else {
        (
            var.clone(),
            bodies.iter().map(|b| subst(x, v, fv, b)).collect(),
        )
    }
}

fn subst(x: &str, v: &Expr, fv: &HashSet<Name>, e: &Expr) -> Expr {
    let s = |e: &Expr| Box::new(subst(x, v, fv, e));
    let all = |es: &[Expr]| es.iter().map(|e| subst(x, v, fv, e)).collect::<Vec<_>>();
    match e {
        Expr::Var(y) if y == x => v.clone(),
        Expr::Var(_) | Expr::True | Expr::False | Expr::Rat(_) => e.clone(),
        Expr::Cut {
            var,
            range,
            left,
            right,
            probes,
        } => {
            let (var, mut bodies) = under_binder(x, v, fv, var, &[left, right]);
            let right = bodies.pop().unwrap();
            let left = bodies.pop().unwrap();
            Expr::Cut {
                var,
                range: range.clone(),
                left: Box::new(left),
                right: Box::new(right),
                probes: *probes,
            }
        }
        Expr::Exists { var, range, body } => {
            let (var, mut b) = under_binder(x, v, fv, var, &[body]);
            Expr::Exists {
                var,
                range: range.clone(),
                body: Box::new(b.pop().unwrap()),
            }
        }
        Expr::Forall { var, range, body } => {
            let (var, mut b) = under_binder(x, v, fv, var, &[body]);
            Expr::Forall {
                var,
                range: range.clone(),
                body: Box::new(b.pop().unwrap()),
            }
        }
        Expr::Lambda { var, ty, body } => {
            let (var, mut b) = under_binder(x, v, fv, var, &[body]);
            Expr::Lambda {
                var,
                ty: ty.clone(),
                body: Box::new(b.pop().unwrap()),
            }
        }
        Expr::Let { var, value, body } => {
            let value = s(value);
            let (var, mut b) = under_binder(x, v, fv, var, &[body]);
            Expr::Let {
                var,
                value,
                body: Box::new(b.pop().unwrap()),
            }
        }
        Expr::And(es) => Expr::And(all(es)),
        Expr::Or(es) => Expr::Or(all(es)),
        Expr::Tuple(es) => Expr::Tuple(all(es)),
        Expr::Join(es) => Expr::Join(all(es)),
        Expr::Less(a, b) => Expr::Less(s(a), s(b)),
        Expr::App(a, b) => Expr::App(s(a), s(b)),
        Expr::Arith(op, a, b) => Expr::Arith(*op, s(a), s(b)),
        Expr::Restrict(a, b) => Expr::Restrict(s(a), s(b)),
        Expr::MkBool(a, b) => Expr::MkBool(s(a), s(b)),
        Expr::Proj(a, k) => Expr::Proj(s(a), *k),
        Expr::Pow(a, k) => Expr::Pow(s(a), *k),
        Expr::IsTrue(a) => Expr::IsTrue(s(a)),
        Expr::IsFalse(a) => Expr::IsFalse(s(a)),
    }
}

fn push_unique(out: &mut Vec<Expr>, e: Expr) {
    if !out.contains(&e) {
        out.push(e);
    }
}

/// Flattened, constant-folded conjunction.
pub fn and_of(es: impl IntoIterator<Item = Expr>) -> Expr {
    let mut out = Vec::new();
    for e in es {
        match e {
            Expr::True => {}
            Expr::False => return Expr::False,
            Expr::And(inner) => {
                for e in inner {
                    push_unique(&mut out, e);
                }
            }
            e => push_unique(&mut out, e),
        }
    }
    match out.len() {
        0 => Expr::True,
        1 => out.pop().unwrap(),
        _ => Expr::And(out),
    }
}

/// Flattened, constant-folded disjunction.
pub fn or_of(es: impl IntoIterator<Item = Expr>) -> Expr {
    let mut out = Vec::new();
    for e in es {
        match e {
            Expr::False => {}
            Expr::True => return Expr::True,
            Expr::Or(inner) => {
                for e in inner {
                    push_unique(&mut out, e);
                }
            }
            e => push_unique(&mut out, e),
        }
    }
    match out.len() {
        0 => Expr::False,
        1 => out.pop().unwrap(),
        _ => Expr::Or(out),
    }
}

/// `g ~> body` with the prop case read as a conjunction and nested guards
/// merged.
pub fn restrict_of(guard: Expr, body: Expr, ty: &Ty) -> Expr {
    if *ty == Ty::Prop {
        return and_of([guard, body]);
    }
    match (guard, body) {
        (Expr::True, body) => body,
        (g, Expr::Restrict(g2, b)) => Expr::Restrict(Box::new(and_of([g, *g2])), b),
        (g, b) => Expr::restrict(g, b),
    }
}

/// `is_true b` for a normalized bool `b`.
pub fn is_true_of(b: Expr) -> Expr {
    match b {
        Expr::MkBool(p, _) => *p,
        Expr::Restrict(g, b) => and_of([*g, is_true_of(*b)]),
        b => Expr::IsTrue(Box::new(b)),
    }
}

/// `is_false b` for a normalized bool `b`.
pub fn is_false_of(b: Expr) -> Expr {
    match b {
        Expr::MkBool(_, q) => *q,
        Expr::Restrict(g, b) => and_of([*g, is_false_of(*b)]),
        b => Expr::IsFalse(Box::new(b)),
    }
}

fn proj_of(e: Expr, k: usize) -> Expr {
    match e {
        Expr::Tuple(mut es) => es.swap_remove(k - 1),
        Expr::Restrict(g, t) => Expr::Restrict(g, Box::new(proj_of(*t, k))),
        e => Expr::Proj(Box::new(e), k),
    }
}

fn quantifier_of(e: &Expr, body: Expr) -> Expr {
    if matches!(body, Expr::True | Expr::False) {
        return body;
    }
    match e {
        Expr::Exists { var, range, .. } => Expr::exists(var, range.clone(), body),
        Expr::Forall { var, range, .. } => Expr::forall(var, range.clone(), body),
        _ => unreachable!(),
    }
}

fn cartesian(lists: Vec<Vec<Expr>>) -> Vec<Vec<Expr>> {
    let mut acc: Vec<Vec<Expr>> = vec![Vec::new()];
    for list in lists {
        let mut next = Vec::with_capacity(acc.len() * list.len());
        for prefix in &acc {
            for item in &list {
                let mut row = prefix.clone();
                row.push(item.clone());
                next.push(row);
            }
        }
        acc = next;
    }
    acc
}

fn dedup(es: Vec<Expr>) -> Vec<Expr> {
    let mut out = Vec::with_capacity(es.len());
    for e in es {
        push_unique(&mut out, e);
    }
    out
}

struct Normalizer {
    ctx: TyCtx,
    steps: usize,
}

impl Normalizer {
    fn bound<T>(&mut self, var: &str, ty: Ty, f: impl FnOnce(&mut Self) -> T) -> T {
        self.ctx.push(var, ty);
        let out = f(self);
        self.ctx.pop();
        out
    }

    /// Alternatives of a subterm, folded into one disjunction when prop-typed.
    fn child(&mut self, e: &Expr) -> (Vec<Expr>, Ty) {
        let (alts, ty) = self.norm(e);
        if ty == Ty::Prop && alts.len() > 1 {
            (vec![or_of(alts)], ty)
        } else {
            (alts, ty)
        }
    }

    fn prop(&mut self, e: &Expr) -> Expr {
        let (alts, _) = self.norm(e);
        or_of(alts)
    }

    fn norm(&mut self, e: &Expr) -> (Vec<Expr>, Ty) {
        self.steps += 1;
        let (alts, ty) = match e {
            Expr::Var(x) => {
                let ty = self
                    .ctx
                    .lookup(x)
                    .cloned()
                    .expect("normalize runs on well-typed input");
                (vec![e.clone()], ty)
            }
            Expr::True | Expr::False => (vec![e.clone()], Ty::Prop),
            Expr::Rat(_) => (vec![e.clone()], Ty::Real),
            Expr::Cut {
                var,
                range,
                left,
                right,
                probes,
            } => {
                let (l, r) = self.bound(var, Ty::Real, |n| (n.prop(left), n.prop(right)));
                let cut = Expr::Cut {
                    var: var.clone(),
                    range: range.clone(),
                    left: Box::new(l),
                    right: Box::new(r),
                    probes: *probes,
                };
                (vec![cut], Ty::Real)
            }
            Expr::And(es) => {
                let parts: Vec<Expr> = es.iter().map(|e| self.prop(e)).collect();
                (vec![and_of(parts)], Ty::Prop)
            }
            Expr::Or(es) => {
                let parts: Vec<Expr> = es.iter().map(|e| self.prop(e)).collect();
                (vec![or_of(parts)], Ty::Prop)
            }
            Expr::Less(a, b) => {
                let (xs, _) = self.child(a);
                let (ys, _) = self.child(b);
                let mut out = Vec::new();
                for x in &xs {
                    for y in &ys {
                        out.push(Expr::less(x.clone(), y.clone()));
                    }
                }
                (out, Ty::Prop)
            }
            Expr::Exists { var, body, .. } | Expr::Forall { var, body, .. } => {
                let b = self.bound(var, Ty::Real, |n| n.prop(body));
                (vec![quantifier_of(e, b)], Ty::Prop)
            }
            Expr::Tuple(es) => {
                let mut lists = Vec::new();
                let mut tys = Vec::new();
                for e in es {
                    let (alts, ty) = self.child(e);
                    lists.push(alts);
                    tys.push(ty);
                }
                let out = cartesian(lists).into_iter().map(Expr::Tuple).collect();
                (out, Ty::Product(tys))
            }
            Expr::Proj(inner, k) => {
                let (alts, ty) = self.child(inner);
                let Ty::Product(tys) = ty else {
                    unreachable!("projection from a non-tuple")
                };
                let ty = tys[k - 1].clone();
                let out = alts
                    .into_iter()
                    .map(|a| match proj_of(a, *k) {
                        Expr::Restrict(g, b) => restrict_of(*g, *b, &ty),
                        e => e,
                    })
                    .collect();
                (out, ty)
            }
            Expr::Lambda { var, ty, body } => {
                let (alts, result) = self.bound(var, ty.clone(), |n| n.child(body));
                let out = alts
                    .into_iter()
                    .map(|b| Expr::lambda(var, ty.clone(), b))
                    .collect();
                (out, Ty::arrow(ty.clone(), result))
            }
            Expr::App(f, a) => {
                let (fs, fty) = self.child(f);
                let (args, _) = self.child(a);
                let Ty::Arrow(_, result) = fty else {
                    unreachable!("application of a non-function")
                };
                let mut out = Vec::new();
                for f in &fs {
                    for a in &args {
                        match f {
                            Expr::Lambda { var, body, .. } => {
                                let (alts, _) = self.norm(&substitute(var, a, body));
                                out.extend(alts);
                            }
                            f => out.push(Expr::app(f.clone(), a.clone())),
                        }
                    }
                }
                (out, *result)
            }
            Expr::Arith(op, a, b) => {
                let (xs, _) = self.child(a);
                let (ys, _) = self.child(b);
                let mut out = Vec::new();
                for x in &xs {
                    for y in &ys {
                        out.push(Expr::arith(*op, x.clone(), y.clone()));
                    }
                }
                (out, Ty::Real)
            }
            Expr::Pow(b, k) => {
                let (xs, _) = self.child(b);
                let out = xs.into_iter().map(|x| Expr::Pow(Box::new(x), *k)).collect();
                (out, Ty::Real)
            }
            Expr::Let { var, value, body } => {
                let (vs, _) = self.child(value);
                let mut out = Vec::new();
                let mut ty = None;
                for v in &vs {
                    let (alts, t) = self.norm(&substitute(var, v, body));
                    out.extend(alts);
                    ty = Some(t);
                }
                (out, ty.expect("at least one alternative"))
            }
            Expr::Restrict(g, b) => {
                let g = self.prop(g);
                let (bs, ty) = self.child(b);
                let out = bs
                    .into_iter()
                    .map(|b| restrict_of(g.clone(), b, &ty))
                    .collect();
                (out, ty)
            }
            Expr::Join(es) => {
                let mut out = Vec::new();
                let mut ty = None;
                for e in es {
                    let (alts, t) = self.norm(e);
                    out.extend(alts);
                    ty = Some(t);
                }
                (out, ty.expect("joins are non-empty"))
            }
            Expr::MkBool(p, q) => {
                let p = self.prop(p);
                let q = self.prop(q);
                (vec![Expr::mkbool(p, q)], Ty::Bool)
            }
            Expr::IsTrue(b) => {
                let (bs, _) = self.child(b);
                (bs.into_iter().map(is_true_of).collect(), Ty::Prop)
            }
            Expr::IsFalse(b) => {
                let (bs, _) = self.child(b);
                (bs.into_iter().map(is_false_of).collect(), Ty::Prop)
            }
        };
        (dedup(alts), ty)
    }
}

/// Normalizes `e` under the given free-variable typing, also returning the
/// number of nodes visited.
pub fn normalize_counted(ctx: &TyCtx, e: &Expr) -> Result<(NormalForm, usize), TypeError> {
    infer_type(&mut ctx.clone(), e)?;
    let mut n = Normalizer {
        ctx: ctx.clone(),
        steps: 0,
    };
    let (disjuncts, ty) = n.norm(e);
    Ok((NormalForm { disjuncts, ty }, n.steps))
}

/// Normalizes a closed expression that is already known to be well typed.
///
/// Definitions may normalize to a choice between functions, which has no
/// surface type of its own; programs built by substituting such values are
/// checked before substitution and normalized with this entry point.
pub fn normalize_unchecked(e: &Expr) -> NormalForm {
    let mut n = Normalizer {
        ctx: TyCtx::new(),
        steps: 0,
    };
    let (disjuncts, ty) = n.norm(e);
    NormalForm { disjuncts, ty }
}

pub fn normalize_in(ctx: &TyCtx, e: &Expr) -> Result<NormalForm, TypeError> {
    normalize_counted(ctx, e).map(|(nf, _)| nf)
}

/// Normalizes a closed expression.
pub fn normalize(e: &Expr) -> Result<NormalForm, TypeError> {
    normalize_in(&TyCtx::new(), e)
}

/// Whether `e` is free of lets, beta-redexes and reducible projections.
pub fn is_reduced(e: &Expr) -> bool {
    let mut ok = true;
    e.visit(&mut |e| match e {
        Expr::Let { .. } | Expr::Join(_) => ok = false,
        Expr::App(f, _) if matches!(**f, Expr::Lambda { .. }) => ok = false,
        Expr::Proj(t, _) if matches!(**t, Expr::Tuple(_) | Expr::Restrict(..)) => ok = false,
        Expr::IsTrue(b) | Expr::IsFalse(b) if matches!(**b, Expr::MkBool(..)) => ok = false,
        _ => {}
    });
    ok
}

/// Direct exact evaluator for closed arithmetic over literals. Returns `None`
/// on anything else or on division by zero.
pub fn eval_rational(e: &Expr) -> Option<crate::interval::Rational> {
    use num_traits::Zero;
    Some(match e {
        Expr::Rat(q) => q.clone(),
        Expr::Arith(op, a, b) => {
            let (a, b) = (eval_rational(a)?, eval_rational(b)?);
            match op {
                ArithOp::Add => a + b,
                ArithOp::Sub => a - b,
                ArithOp::Mul => a * b,
                ArithOp::Div if b.is_zero() => return None,
                ArithOp::Div => a / b,
            }
        }
        Expr::Pow(b, k) => num_traits::pow(eval_rational(b)?, *k as usize),
        _ => return None,
    })
}
