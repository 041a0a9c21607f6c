use num_traits::Zero;
use thiserror::Error;

use super::approx::{prop_approx, real_approx, ApproxEnv, Mode};
use super::refine::{is_prop_node, Refined, Refiner, Witness};
use crate::interval::{rat, Rational, XRat};
use crate::normalize::{normalize, NormalForm};
use crate::syntax::{Expr, Ty};
use crate::typing::TypeError;

/// Target width below which a real's enclosure is accepted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Precision(Rational);

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("precision must be positive, got {0}")]
pub struct NonPositivePrecision(pub Rational);

impl Precision {
    pub fn new(p: Rational) -> Result<Self, NonPositivePrecision> {
        if p > Rational::zero() {
            Ok(Precision(p))
        } else {
            Err(NonPositivePrecision(p))
        }
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision(rat(1, 1000))
    }
}

pub const DEFAULT_MAX_STEPS: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    RealBall {
        center: Rational,
        radius: Rational,
    },
    PropTrue,
    /// Refinement reached the literal `False`.
    PropFalseProven,
    BoolTT,
    BoolFF,
    TupleOf(Vec<Outcome>),
    /// Function-typed programs are not evaluated.
    FunctionValue,
    Diverged {
        steps: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub outcome: Outcome,
    /// Refinement rounds performed before the outcome was reached.
    pub steps: u64,
    /// Sub-ranges on which existentials of the answering alternative were
    /// proven, when tracing.
    pub witnesses: Vec<Witness>,
}

fn evaluate(e: &Expr, p: &Rational) -> Option<Outcome> {
    let env = ApproxEnv::new();
    match e {
        Expr::True => Some(Outcome::PropTrue),
        Expr::False => Some(Outcome::PropFalseProven),
        e if is_prop_node(e) => None,
        Expr::MkBool(t, f) => match (&**t, &**f) {
            (Expr::True, _) => Some(Outcome::BoolTT),
            (_, Expr::True) => Some(Outcome::BoolFF),
            _ => None,
        },
        Expr::Tuple(es) => es
            .iter()
            .map(|e| evaluate(e, p))
            .collect::<Option<Vec<_>>>()
            .map(Outcome::TupleOf),
        Expr::Restrict(g, b) if prop_approx(g, &env, Mode::Lower) => evaluate(b, p),
        Expr::Restrict(..) => None,
        e => {
            let x = real_approx(e, &env, Mode::Lower);
            match (&x.lo, &x.hi) {
                (XRat::Fin(a), XRat::Fin(b)) if a <= b && &(b - a) < p => {
                    let two = Rational::from_integer(2.into());
                    Some(Outcome::RealBall {
                        center: (a + b) / &two,
                        radius: (b - a) / &two,
                    })
                }
                _ => None,
            }
        }
    }
}

/// Checks every alternative in order and returns the first answer. A literal
/// `False` alternative only answers when every alternative is `False`.
pub fn evaluate_step(disjuncts: &[Expr], p: &Precision) -> Option<(usize, Outcome)> {
    for (i, d) in disjuncts.iter().enumerate() {
        if *d == Expr::False {
            continue;
        }
        if let Some(o) = evaluate(d, &p.0) {
            return Some((i, o));
        }
    }
    if !disjuncts.is_empty() && disjuncts.iter().all(|d| *d == Expr::False) {
        return Some((0, Outcome::PropFalseProven));
    }
    None
}

struct Live {
    expr: Expr,
    witnesses: Vec<Witness>,
}

/// Refines a normal form until one alternative answers at precision `p` or
/// the step budget runs out.
pub fn run_normal_form(nf: &NormalForm, p: &Precision, max_steps: u64, trace: bool) -> RunReport {
    if matches!(nf.ty, Ty::Arrow(..)) {
        return RunReport {
            outcome: Outcome::FunctionValue,
            steps: 0,
            witnesses: Vec::new(),
        };
    }
    let mut live: Vec<Live> = nf
        .disjuncts
        .iter()
        .map(|e| Live {
            expr: e.clone(),
            witnesses: Vec::new(),
        })
        .collect();
    let mut steps = 0;
    loop {
        let exprs: Vec<Expr> = live.iter().map(|l| l.expr.clone()).collect();
        if let Some((i, outcome)) = evaluate_step(&exprs, p) {
            let witnesses = if trace {
                std::mem::take(&mut live[i].witnesses)
            } else {
                Vec::new()
            };
            return RunReport {
                outcome,
                steps,
                witnesses,
            };
        }
        if steps >= max_steps || live.is_empty() {
            return RunReport {
                outcome: Outcome::Diverged { steps: max_steps },
                steps,
                witnesses: Vec::new(),
            };
        }
        steps += 1;
        let mut next = Vec::with_capacity(live.len());
        for mut l in live {
            let mut r = Refiner::new();
            if let Refined::Value(e) = r.value(&l.expr) {
                l.witnesses.extend(r.witnesses);
                l.expr = e;
                next.push(l);
            }
        }
        // A false alternative of a prop choice can never answer while another
        // alternative is still open.
        if next.iter().any(|l| l.expr != Expr::False) {
            next.retain(|l| l.expr != Expr::False);
        }
        live = next;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RunError {
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// Type checks, normalizes and evaluates a closed program.
pub fn run(e: &Expr, p: &Precision, max_steps: u64, trace: bool) -> Result<RunReport, RunError> {
    let nf = normalize(e)?;
    Ok(run_normal_form(&nf, p, max_steps, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_expr;

    fn go(src: &str) -> Outcome {
        run(
            &parse_expr(src).unwrap(),
            &Precision::default(),
            10_000,
            false,
        )
        .unwrap()
        .outcome
    }

    #[test]
    fn single_step_outcomes() {
        let p = Precision::new(rat(1, 100)).unwrap();
        assert_eq!(
            evaluate_step(&[Expr::True], &p).map(|x| x.1),
            Some(Outcome::PropTrue)
        );
        assert_eq!(
            evaluate_step(&[parse_expr("mkbool True False").unwrap()], &p).map(|x| x.1),
            Some(Outcome::BoolTT)
        );
        assert_eq!(
            evaluate_step(&[parse_expr("1 + 1").unwrap()], &p).map(|x| x.1),
            Some(Outcome::RealBall {
                center: rat(2, 1),
                radius: rat(0, 1)
            })
        );
        assert_eq!(evaluate_step(&[parse_expr("1 < 2").unwrap()], &p), None);
    }

    #[test]
    fn false_alternative_waits_for_the_others() {
        let p = Precision::default();
        let open = parse_expr("exists x : [0, 1], x * x < 1/2").unwrap();
        assert_eq!(evaluate_step(&[Expr::False, open], &p), None);
        assert_eq!(
            evaluate_step(&[Expr::False, Expr::False], &p).map(|x| x.1),
            Some(Outcome::PropFalseProven)
        );
    }

    #[test]
    fn sqrt_two() {
        let Outcome::RealBall { center, radius } =
            go("cut x : [0,2] left x < 0 \\/ x*x < 2 right x > 0 /\\ x*x > 2")
        else {
            panic!()
        };
        assert!(radius < rat(1, 1000));
        let lo = &center - &radius;
        let hi = &center + &radius;
        assert!(&lo * &lo <= rat(2, 1) && rat(2, 1) <= &hi * &hi);
    }

    #[test]
    fn join_answers_with_either() {
        let o = go("0 || 1");
        assert!(
            o == Outcome::RealBall {
                center: rat(0, 1),
                radius: rat(0, 1)
            } || o
                == Outcome::RealBall {
                    center: rat(1, 1),
                    radius: rat(0, 1)
                }
        );
    }

    #[test]
    fn approximate_comparison_at_one() {
        assert_eq!(
            go("let x = 1 in mkbool (x > -1/2) (x < 1/2)"),
            Outcome::BoolTT
        );
    }

    #[test]
    fn forall_refuted() {
        assert_eq!(go("forall x : [0, 2], x < 1"), Outcome::PropFalseProven);
        assert_eq!(go("exists x : [0, 2], x * x < 1/100"), Outcome::PropTrue);
    }

    #[test]
    fn all_pruned_diverges() {
        assert_eq!(go("2 < 1 ~> 5"), Outcome::Diverged { steps: 10_000 });
    }

    #[test]
    fn function_value() {
        assert_eq!(go("fun x : real => x"), Outcome::FunctionValue);
    }

    #[test]
    fn restricted_value_waits_for_guard() {
        let Outcome::RealBall { center, .. } = go("(exists x : [0, 1], x * x < 1/9) ~> 3") else {
            panic!()
        };
        assert_eq!(center, rat(3, 1));
    }

    #[test]
    fn trace_records_witness() {
        let r = run(
            &parse_expr("exists x : [0, 4], x * x - 2 * x < (-9)/10").unwrap(),
            &Precision::default(),
            1000,
            true,
        )
        .unwrap();
        assert_eq!(r.outcome, Outcome::PropTrue);
        let w = r.witnesses.last().expect("a witness");
        // x*x - 2x < -0.9 only for x within 0.32 of 1.
        assert!(w.lo <= rat(4, 3) && w.hi >= rat(2, 3), "{w:?}");
    }
}
