//! Type checking.

use thiserror::Error;

use crate::syntax::{Expr, Name, Ty};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    Unbound(Name),
    #[error("expected {expected} but `{expr}` has type {found}")]
    Mismatch {
        expected: Ty,
        found: Ty,
        expr: String,
    },
    #[error("branches of `||` disagree: {first} versus {other}")]
    BranchMismatch { first: Ty, other: Ty },
    #[error("`{expr}` has type {ty}, which is not a base type (`||` and `~>` need one)")]
    NotBase { ty: Ty, expr: String },
    #[error("projection #{index} out of range for a {arity}-tuple")]
    ProjectionOutOfRange { index: usize, arity: usize },
    #[error("`{expr}` has type {ty}, which is not a tuple")]
    NotAProduct { ty: Ty, expr: String },
    #[error("`{expr}` has type {ty} and cannot be applied")]
    NotAFunction { ty: Ty, expr: String },
    #[error("quantifier over `{var}` needs a closed range with finite limits")]
    NonCompactRange { var: Name },
}

/// Typing context. Later bindings shadow earlier ones.
#[derive(Clone, Debug, Default)]
pub struct TyCtx {
    bindings: Vec<(Name, Ty)>,
}

impl TyCtx {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: &str, ty: Ty) {
        self.bindings.push((name.to_string(), ty));
    }

    pub fn pop(&mut self) {
        self.bindings.pop();
    }

    pub fn lookup(&self, name: &str) -> Option<&Ty> {
        self.bindings
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    fn with<T>(&mut self, name: &str, ty: Ty, f: impl FnOnce(&mut Self) -> T) -> T {
        self.push(name, ty);
        let out = f(self);
        self.pop();
        out
    }
}

pub fn is_base(t: &Ty) -> bool {
    t.is_base()
}

fn expect(ctx: &mut TyCtx, e: &Expr, expected: Ty) -> Result<(), TypeError> {
    let found = infer_type(ctx, e)?;
    if found == expected {
        Ok(())
    } else {
        Err(TypeError::Mismatch {
            expected,
            found,
            expr: e.to_string(),
        })
    }
}

fn expect_base(ctx: &mut TyCtx, e: &Expr) -> Result<Ty, TypeError> {
    let ty = infer_type(ctx, e)?;
    if ty.is_base() {
        Ok(ty)
    } else {
        Err(TypeError::NotBase {
            ty,
            expr: e.to_string(),
        })
    }
}

pub fn infer_type(ctx: &mut TyCtx, e: &Expr) -> Result<Ty, TypeError> {
    match e {
        Expr::Var(x) => ctx
            .lookup(x)
            .cloned()
            .ok_or_else(|| TypeError::Unbound(x.clone())),
        Expr::True | Expr::False => Ok(Ty::Prop),
        Expr::Rat(_) => Ok(Ty::Real),
        Expr::Cut {
            var, left, right, ..
        } => ctx.with(var, Ty::Real, |ctx| {
            expect(ctx, left, Ty::Prop)?;
            expect(ctx, right, Ty::Prop)?;
            Ok(Ty::Real)
        }),
        Expr::And(es) | Expr::Or(es) => {
            for e in es {
                expect(ctx, e, Ty::Prop)?;
            }
            Ok(Ty::Prop)
        }
        Expr::Less(a, b) => {
            expect(ctx, a, Ty::Real)?;
            expect(ctx, b, Ty::Real)?;
            Ok(Ty::Prop)
        }
        Expr::Exists { var, range, body } | Expr::Forall { var, range, body } => {
            if !range.is_compact() {
                return Err(TypeError::NonCompactRange { var: var.clone() });
            }
            ctx.with(var, Ty::Real, |ctx| expect(ctx, body, Ty::Prop))?;
            Ok(Ty::Prop)
        }
        Expr::Tuple(es) => Ok(Ty::Product(
            es.iter()
                .map(|e| infer_type(ctx, e))
                .collect::<Result<_, _>>()?,
        )),
        Expr::Proj(inner, k) => match infer_type(ctx, inner)? {
            Ty::Product(ts) => {
                ts.get(k.wrapping_sub(1))
                    .cloned()
                    .ok_or(TypeError::ProjectionOutOfRange {
                        index: *k,
                        arity: ts.len(),
                    })
            }
            ty => Err(TypeError::NotAProduct {
                ty,
                expr: inner.to_string(),
            }),
        },
        Expr::Lambda { var, ty, body } => {
            let result = ctx.with(var, ty.clone(), |ctx| infer_type(ctx, body))?;
            Ok(Ty::arrow(ty.clone(), result))
        }
        Expr::App(f, a) => match infer_type(ctx, f)? {
            Ty::Arrow(from, to) => {
                expect(ctx, a, *from)?;
                Ok(*to)
            }
            ty => Err(TypeError::NotAFunction {
                ty,
                expr: f.to_string(),
            }),
        },
        Expr::Arith(_, a, b) => {
            expect(ctx, a, Ty::Real)?;
            expect(ctx, b, Ty::Real)?;
            Ok(Ty::Real)
        }
        Expr::Pow(b, _) => {
            expect(ctx, b, Ty::Real)?;
            Ok(Ty::Real)
        }
        Expr::Let { var, value, body } => {
            let vt = infer_type(ctx, value)?;
            ctx.with(var, vt, |ctx| infer_type(ctx, body))
        }
        Expr::Restrict(guard, body) => {
            expect(ctx, guard, Ty::Prop)?;
            expect_base(ctx, body)
        }
        Expr::Join(es) => {
            let mut iter = es.iter();
            let first = match iter.next() {
                Some(e) => expect_base(ctx, e)?,
                None => unreachable!("parser never builds an empty join"),
            };
            for e in iter {
                let other = expect_base(ctx, e)?;
                if other != first {
                    return Err(TypeError::BranchMismatch { first, other });
                }
            }
            Ok(first)
        }
        Expr::MkBool(p, q) => {
            expect(ctx, p, Ty::Prop)?;
            expect(ctx, q, Ty::Prop)?;
            Ok(Ty::Bool)
        }
        Expr::IsTrue(b) | Expr::IsFalse(b) => {
            expect(ctx, b, Ty::Bool)?;
            Ok(Ty::Prop)
        }
    }
}

/// Infers the type of a closed expression.
pub fn type_of(e: &Expr) -> Result<Ty, TypeError> {
    infer_type(&mut TyCtx::new(), e)
}
