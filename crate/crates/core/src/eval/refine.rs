//! One refinement step: narrow cuts, split quantifiers, decide guards.

use num_traits::One;

use super::approx::{holds_at, prop_approx, ApproxEnv, Mode};
use crate::interval::{GInterval, Rational, XRat};
use crate::normalize::{and_of, or_of};
use crate::syntax::{Expr, Name, Range};

/// A sub-range on which an existential was proven.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub var: Name,
    pub lo: Rational,
    pub hi: Rational,
}

/// Result of refining a non-prop value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refined {
    Value(Expr),
    /// A guard was refuted; the value is undefined.
    Pruned,
}

/// Whether `e` is syntactically a prop in a normalized closed program.
pub fn is_prop_node(e: &Expr) -> bool {
    matches!(
        e,
        Expr::True
            | Expr::False
            | Expr::And(_)
            | Expr::Or(_)
            | Expr::Less(..)
            | Expr::Exists { .. }
            | Expr::Forall { .. }
            | Expr::IsTrue(_)
            | Expr::IsFalse(_)
    )
}

/// Refinement state for one expression: the ranges of enclosing cut and
/// quantifier variables, and the witnesses found so far.
#[derive(Default)]
pub struct Refiner {
    ranges: Vec<(Name, GInterval)>,
    pub witnesses: Vec<Witness>,
}

fn two_pow(n: u32) -> Rational {
    Rational::from_integer(num_bigint::BigInt::one() << n)
}

impl Refiner {
    pub fn new() -> Self {
        Self::default()
    }

    fn env(&self, mode: Mode) -> ApproxEnv {
        ApproxEnv::from_ranges(&self.ranges, mode)
    }

    fn within<T>(&mut self, var: &str, x: GInterval, f: impl FnOnce(&mut Self) -> T) -> T {
        self.ranges.push((var.to_string(), x));
        let out = f(self);
        self.ranges.pop();
        out
    }

    /// Refines a prop. Never pruned: an undefined value inside a comparison
    /// makes the comparison false.
    pub fn prop(&mut self, e: &Expr) -> Expr {
        if matches!(e, Expr::True | Expr::False) {
            return e.clone();
        }
        if prop_approx(e, &self.env(Mode::Lower), Mode::Lower) {
            self.record_witnesses(e);
            return Expr::True;
        }
        if !prop_approx(e, &self.env(Mode::Upper), Mode::Upper) {
            return Expr::False;
        }
        match e {
            Expr::And(es) => and_of(es.iter().map(|e| self.prop(e)).collect::<Vec<_>>()),
            Expr::Or(es) => {
                let mut out = Vec::with_capacity(es.len());
                for e in es {
                    let r = self.prop(e);
                    let done = r == Expr::True;
                    out.push(r);
                    if done {
                        break;
                    }
                }
                or_of(out)
            }
            Expr::Less(a, b) => match (self.value(a), self.value(b)) {
                (Refined::Value(a), Refined::Value(b)) => Expr::less(a, b),
                _ => Expr::False,
            },
            Expr::Exists { var, range, body } => {
                let (lo, mid, hi) = halves(range);
                let body = self.within(var, range.interval(), |r| r.prop(body));
                or_of([
                    quantified(true, var, &lo, &mid, &body),
                    quantified(true, var, &mid, &hi, &body),
                ])
            }
            Expr::Forall { var, range, body } => {
                let (lo, mid, hi) = halves(range);
                let body = self.within(var, range.interval(), |r| r.prop(body));
                and_of([
                    quantified(false, var, &lo, &mid, &body),
                    quantified(false, var, &mid, &hi, &body),
                ])
            }
            other => other.clone(),
        }
    }

    // Follows a proven prop down to the existentials that prove it.
    fn record_witnesses(&mut self, e: &Expr) {
        match e {
            Expr::Exists { var, range, .. } => {
                if let (Some(lo), Some(hi)) = (range.lo.finite(), range.hi.finite()) {
                    self.witnesses.push(Witness {
                        var: var.clone(),
                        lo: lo.clone(),
                        hi: hi.clone(),
                    });
                }
            }
            Expr::Or(es) => {
                let env = self.env(Mode::Lower);
                if let Some(d) = es.iter().find(|d| prop_approx(d, &env, Mode::Lower)) {
                    self.record_witnesses(d);
                }
            }
            Expr::And(es) => {
                for d in es {
                    self.record_witnesses(d);
                }
            }
            _ => {}
        }
    }

    /// Refines a value of non-prop type.
    pub fn value(&mut self, e: &Expr) -> Refined {
        if is_prop_node(e) {
            return Refined::Value(self.prop(e));
        }
        let v = match e {
            Expr::Rat(_) | Expr::Var(_) => e.clone(),
            Expr::Arith(op, a, b) => match (self.value(a), self.value(b)) {
                (Refined::Value(a), Refined::Value(b)) => Expr::arith(*op, a, b),
                _ => return Refined::Pruned,
            },
            Expr::Pow(b, k) => match self.value(b) {
                Refined::Value(b) => Expr::Pow(Box::new(b), *k),
                Refined::Pruned => return Refined::Pruned,
            },
            Expr::Tuple(es) => {
                let mut out = Vec::with_capacity(es.len());
                for e in es {
                    match self.value(e) {
                        Refined::Value(v) => out.push(v),
                        Refined::Pruned => return Refined::Pruned,
                    }
                }
                Expr::Tuple(out)
            }
            Expr::MkBool(p, q) => Expr::mkbool(self.prop(p), self.prop(q)),
            Expr::Restrict(g, b) => match self.prop(g) {
                Expr::False => return Refined::Pruned,
                Expr::True => return self.value(b),
                g => match self.value(b) {
                    Refined::Value(b) => Expr::restrict(g, b),
                    Refined::Pruned => return Refined::Pruned,
                },
            },
            Expr::Cut {
                var,
                range,
                left,
                right,
                probes,
            } => self.cut(var, range, left, right, *probes),
            other => other.clone(),
        };
        Refined::Value(v)
    }

    fn cut(&mut self, var: &str, range: &Range, left: &Expr, right: &Expr, probes: u32) -> Expr {
        let env = self.env(Mode::Lower);
        let mut lo = range.lo.clone();
        let mut hi = range.hi.clone();
        let mut lo_open = range.lo_open;
        let mut hi_open = range.hi_open;
        let mut probes = probes;
        match (&lo, &hi) {
            (XRat::Fin(a), XRat::Fin(b)) => {
                let three = Rational::from_integer(3.into());
                let q1 = (a * Rational::from_integer(2.into()) + b) / &three;
                let q2 = (a + b * Rational::from_integer(2.into())) / &three;
                if holds_at(left, &env, var, &q1) {
                    lo = XRat::Fin(q1);
                    lo_open = false;
                }
                if holds_at(right, &env, var, &q2) {
                    hi = XRat::Fin(q2);
                    hi_open = false;
                }
            }
            _ => {
                let step = two_pow(probes);
                if lo == XRat::NegInf {
                    let c = match &hi {
                        XRat::Fin(b) => std::cmp::min(-step.clone(), b - &step),
                        _ => -step.clone(),
                    };
                    if holds_at(left, &env, var, &c) {
                        lo = XRat::Fin(c);
                        lo_open = false;
                    }
                }
                if hi == XRat::PosInf {
                    let c = match &lo {
                        XRat::Fin(a) => std::cmp::max(step.clone(), a + &step),
                        _ => step.clone(),
                    };
                    if holds_at(right, &env, var, &c) {
                        hi = XRat::Fin(c);
                        hi_open = false;
                    }
                }
                probes += 1;
            }
        }
        let narrowed = Range {
            lo,
            hi,
            lo_open,
            hi_open,
        };
        let (left, right) =
            self.within(var, narrowed.interval(), |r| (r.prop(left), r.prop(right)));
        Expr::Cut {
            var: var.to_string(),
            range: narrowed,
            left: Box::new(left),
            right: Box::new(right),
            probes,
        }
    }
}

fn halves(range: &Range) -> (Rational, Rational, Rational) {
    let lo = range
        .lo
        .finite()
        .expect("quantifier ranges are bounded")
        .clone();
    let hi = range
        .hi
        .finite()
        .expect("quantifier ranges are bounded")
        .clone();
    let two = Rational::from_integer(2.into());
    let mid = (&lo + &hi) / two;
    (lo, mid, hi)
}

fn quantified(exists: bool, var: &str, lo: &Rational, hi: &Rational, body: &Expr) -> Expr {
    if matches!(body, Expr::True | Expr::False) {
        return body.clone();
    }
    let range = Range::closed(lo.clone(), hi.clone());
    if exists {
        Expr::exists(var, range, body.clone())
    } else {
        Expr::forall(var, range, body.clone())
    }
}

/// One refinement step of a join-free closed expression.
pub fn refine_step(e: &Expr) -> Refined {
    Refiner::new().value(e)
}

/// Width of a cut's current range, if the expression is a cut.
pub fn cut_width(e: &Expr) -> Option<XRat> {
    match e {
        Expr::Cut { range, .. } => Some(range.interval().width()),
        _ => None,
    }
}
