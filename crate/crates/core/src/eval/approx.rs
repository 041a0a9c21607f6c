//! Interval approximation of reals and lower/upper approximation of props.
//!
//! Both modes use one comparison test, `hi(a) < lo(b)` for `a < b`, and encode
//! the reading of each variable in the shape of its interval. A proper interval
//! reads "for every point", an improper one "for some point". The Upper mode is
//! the dual of the Lower mode applied to the negated prop, so every binding is
//! swapped in Upper mode.
//!
//! An improper interval is only exact when the variable occurs once and the
//! comparison it occurs in mentions no variable bound by a quantifier of the
//! opposite reading nested below it. Otherwise the variable is approximated by
//! the midpoint of its range, which is a single valid witness.

use crate::interval::{GInterval, IntervalError, Rational};
use crate::syntax::{ArithOp, Expr, Name, Range};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Lower,
    Upper,
}

impl Mode {
    pub fn dual(self) -> Mode {
        match self {
            Mode::Lower => Mode::Upper,
            Mode::Upper => Mode::Lower,
        }
    }

    /// The interval carrying no information in this mode.
    pub fn no_info(self) -> GInterval {
        match self {
            Mode::Lower => GInterval::entire(),
            Mode::Upper => GInterval::entire().dual(),
        }
    }

    /// `x` as given in Lower mode, its dual in Upper mode.
    pub fn orient(self, x: GInterval) -> GInterval {
        match self {
            Mode::Lower => x,
            Mode::Upper => x.dual(),
        }
    }
}

/// Intervals for the real variables in scope. Later bindings shadow earlier
/// ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ApproxEnv {
    vars: Vec<(Name, GInterval)>,
}

impl ApproxEnv {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds each variable to its proper range, dualized in Upper mode.
    pub fn from_ranges<'a>(
        ranges: impl IntoIterator<Item = &'a (Name, GInterval)>,
        mode: Mode,
    ) -> Self {
        ApproxEnv {
            vars: ranges
                .into_iter()
                .map(|(n, x)| (n.clone(), mode.orient(x.clone())))
                .collect(),
        }
    }

    pub fn bind(&mut self, name: &str, x: GInterval) {
        self.vars.push((name.to_string(), x));
    }

    pub fn unbind(&mut self) {
        self.vars.pop();
    }

    pub fn get(&self, name: &str) -> Option<&GInterval> {
        self.vars
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, x)| x)
    }

    fn with<T>(&mut self, name: &str, x: GInterval, f: impl FnOnce(&mut Self) -> T) -> T {
        self.bind(name, x);
        let out = f(self);
        self.unbind();
        out
    }
}

/// No usable enclosure: an indeterminate operation, an unsatisfied guard or an
/// unknown variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoInfo;

impl From<IntervalError> for NoInfo {
    fn from(_: IntervalError) -> Self {
        NoInfo
    }
}

fn range_interval(r: &Range, mode: Mode) -> GInterval {
    mode.orient(r.interval())
}

fn approx(e: &Expr, env: &mut ApproxEnv, mode: Mode) -> Result<GInterval, NoInfo> {
    Ok(match e {
        Expr::Rat(q) => GInterval::point(q.clone()),
        Expr::Var(x) => env.get(x).cloned().ok_or(NoInfo)?,
        Expr::Cut { range, .. } => range_interval(range, mode),
        Expr::Arith(op, a, b) => {
            let a = approx(a, env, mode)?;
            let b = approx(b, env, mode)?;
            match op {
                ArithOp::Add => a.add(&b)?,
                ArithOp::Sub => a.sub(&b)?,
                ArithOp::Mul => a.mul(&b),
                ArithOp::Div => a.div(&b)?,
            }
        }
        Expr::Pow(b, k) => approx(b, env, mode)?.pow(*k),
        Expr::Restrict(g, b) if approx_prop(g, env, mode) => approx(b, env, mode)?,
        _ => return Err(NoInfo),
    })
}

/// Interval approximation of a join-free real expression. Indeterminate
/// results become the mode's no-information interval.
pub fn real_approx(e: &Expr, env: &ApproxEnv, mode: Mode) -> GInterval {
    approx(e, &mut env.clone(), mode).unwrap_or_else(|_| mode.no_info())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Quant {
    Exists,
    Forall,
}

// Occurrences of `var` that the approximation reads: cut bodies only matter
// through the cut's range, and inner rebindings hide the variable.
fn count_uses(e: &Expr, var: &str) -> usize {
    match e {
        Expr::Var(x) => usize::from(x == var),
        Expr::Cut { .. } => 0,
        Expr::Exists { var: v, body, .. }
        | Expr::Forall { var: v, body, .. }
        | Expr::Lambda { var: v, body, .. } => {
            if v == var {
                0
            } else {
                count_uses(body, var)
            }
        }
        Expr::Let {
            var: v,
            value,
            body,
        } => count_uses(value, var) + if v == var { 0 } else { count_uses(body, var) },
        Expr::True | Expr::False | Expr::Rat(_) => 0,
        Expr::And(es) | Expr::Or(es) | Expr::Tuple(es) | Expr::Join(es) => {
            es.iter().map(|e| count_uses(e, var)).sum()
        }
        Expr::Less(a, b)
        | Expr::App(a, b)
        | Expr::Arith(_, a, b)
        | Expr::Restrict(a, b)
        | Expr::MkBool(a, b) => count_uses(a, var) + count_uses(b, var),
        Expr::Proj(a, _) | Expr::Pow(a, _) | Expr::IsTrue(a) | Expr::IsFalse(a) => {
            count_uses(a, var)
        }
    }
}

// Whether every comparison that reads `var` avoids the variables in `opposite`,
// pushing nested binders of kind `against` onto it on the way down.
fn atoms_avoid(e: &Expr, var: &str, against: Quant, opposite: &mut Vec<Name>) -> bool {
    match e {
        Expr::Less(..) => count_uses(e, var) == 0 || opposite.iter().all(|y| count_uses(e, y) == 0),
        Expr::Exists { var: v, body, .. } | Expr::Forall { var: v, body, .. } => {
            if v == var {
                return true;
            }
            let kind = if matches!(e, Expr::Exists { .. }) {
                Quant::Exists
            } else {
                Quant::Forall
            };
            if kind == against {
                opposite.push(v.clone());
                let ok = atoms_avoid(body, var, against, opposite);
                opposite.pop();
                ok
            } else {
                // Same-kind binder shadowing an opposite one must not be
                // mistaken for it.
                let saved = opposite.clone();
                opposite.retain(|y| y != v);
                let ok = atoms_avoid(body, var, against, opposite);
                *opposite = saved;
                ok
            }
        }
        Expr::And(es) | Expr::Or(es) => es.iter().all(|e| atoms_avoid(e, var, against, opposite)),
        _ => true,
    }
}

fn improper_is_exact(var: &str, body: &Expr, kind: Quant) -> bool {
    let against = match kind {
        Quant::Exists => Quant::Forall,
        Quant::Forall => Quant::Exists,
    };
    count_uses(body, var) == 1 && atoms_avoid(body, var, against, &mut Vec::new())
}

fn midpoint_of(r: &Range) -> GInterval {
    let m = r
        .interval()
        .midpoint()
        .expect("quantifier ranges are bounded");
    GInterval::point(m)
}

// The interval a quantified variable is bound to in the given mode.
fn quantifier_binding(kind: Quant, var: &str, range: &Range, body: &Expr, mode: Mode) -> GInterval {
    let every = range.interval();
    let some = every.dual();
    match (kind, mode) {
        (Quant::Forall, Mode::Lower) => every,
        (Quant::Exists, Mode::Upper) => some,
        (Quant::Exists, Mode::Lower) => {
            if improper_is_exact(var, body, kind) {
                some
            } else {
                midpoint_of(range)
            }
        }
        (Quant::Forall, Mode::Upper) => {
            if improper_is_exact(var, body, kind) {
                every
            } else {
                midpoint_of(range)
            }
        }
    }
}

fn approx_prop(e: &Expr, env: &mut ApproxEnv, mode: Mode) -> bool {
    match e {
        Expr::True => true,
        Expr::False => false,
        Expr::And(es) => es.iter().all(|e| approx_prop(e, env, mode)),
        Expr::Or(es) => es.iter().any(|e| approx_prop(e, env, mode)),
        Expr::Less(a, b) => match (approx(a, env, mode), approx(b, env, mode)) {
            (Ok(a), Ok(b)) => a.hi < b.lo,
            _ => mode == Mode::Upper,
        },
        Expr::Exists { var, range, body } => {
            let x = quantifier_binding(Quant::Exists, var, range, body, mode);
            env.with(var, x, |env| approx_prop(body, env, mode))
        }
        Expr::Forall { var, range, body } => {
            let x = quantifier_binding(Quant::Forall, var, range, body, mode);
            env.with(var, x, |env| approx_prop(body, env, mode))
        }
        // Anything else has no computable approximant here.
        _ => mode == Mode::Upper,
    }
}

/// Lower (`Mode::Lower`) or upper (`Mode::Upper`) approximant of a join-free
/// prop. Lower implies the prop, which implies Upper.
pub fn prop_approx(e: &Expr, env: &ApproxEnv, mode: Mode) -> bool {
    approx_prop(e, &mut env.clone(), mode)
}

/// Lower approximant with `var` bound to the single point `q`.
pub fn holds_at(e: &Expr, env: &ApproxEnv, var: &str, q: &Rational) -> bool {
    let mut env = env.clone();
    env.bind(var, GInterval::point(q.clone()));
    approx_prop(e, &mut env, Mode::Lower)
}
