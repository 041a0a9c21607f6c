//! Interactive sessions: definitions, directives, evaluation and rendering.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::eval::{run_normal_form, Outcome, Precision, RunReport, DEFAULT_MAX_STEPS};
use crate::interval::Rational;
use crate::normalize::{free_vars, normalize_unchecked, substitute, NormalForm};
use crate::prelude::load_prelude;
use crate::syntax::{parse_program, Directive, Expr, Item, Name, ParseError, Pos, TopItem, Ty};
use crate::typing::{infer_type, TyCtx, TypeError};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Format {
    Interval,
    #[default]
    Decimal,
}

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("{origin}{0}", origin = origin_prefix(.1))]
    Parse(ParseError, Option<PathBuf>),
    #[error("{origin}{pos}: type error in `{expr}`: {err}", origin = origin_prefix(origin))]
    Type {
        pos: Pos,
        expr: String,
        err: Box<TypeError>,
        origin: Option<PathBuf>,
    },
    #[error("{origin}{pos}: {msg}", origin = origin_prefix(origin))]
    Directive {
        pos: Pos,
        msg: String,
        origin: Option<PathBuf>,
    },
}

fn origin_prefix(origin: &Option<PathBuf>) -> String {
    origin
        .as_ref()
        .map(|p| format!("{}: ", p.display()))
        .unwrap_or_default()
}

#[derive(Clone, Debug)]
struct Definition {
    name: Name,
    value: Expr,
    ty: Ty,
}

/// Session state: earlier definitions, evaluation settings and counters used
/// for the exit status.
#[derive(Clone, Debug)]
pub struct SessionState {
    defs: Vec<Definition>,
    pub precision: Precision,
    pub step_budget: u64,
    pub trace: bool,
    pub format: Format,
    /// Number of evaluations that produced no result within the budget.
    pub diverged: usize,
}

const MAX_USE_DEPTH: usize = 32;

impl Default for SessionState {
    fn default() -> Self {
        Self::new()
    }
}

impl SessionState {
    /// A session with the prelude loaded.
    pub fn new() -> Self {
        let mut s = Self::empty();
        for item in load_prelude() {
            s.execute_item(&item)
                .expect("the prelude type checks and has no directives");
        }
        s
    }

    /// A session without the prelude.
    pub fn empty() -> Self {
        SessionState {
            defs: Vec::new(),
            precision: Precision::default(),
            step_budget: DEFAULT_MAX_STEPS,
            trace: false,
            format: Format::default(),
            diverged: 0,
        }
    }

    pub fn lookup(&self, name: &str) -> Option<(&Expr, &Ty)> {
        self.defs
            .iter()
            .rev()
            .find(|d| d.name == name)
            .map(|d| (&d.value, &d.ty))
    }

    fn ctx(&self) -> TyCtx {
        let mut ctx = TyCtx::new();
        for d in &self.defs {
            ctx.push(&d.name, d.ty.clone());
        }
        ctx
    }

    /// Replaces every defined name free in `e` by its (closed) value.
    pub fn close(&self, e: &Expr) -> Expr {
        let mut out = e.clone();
        for name in free_vars(e) {
            if let Some((value, _)) = self.lookup(&name) {
                out = substitute(&name, value, &out);
            }
        }
        out
    }

    fn check(&self, pos: Pos, e: &Expr, origin: Option<&Path>) -> Result<Ty, SessionError> {
        infer_type(&mut self.ctx(), e).map_err(|err| SessionError::Type {
            pos,
            expr: e.to_string(),
            err: Box::new(err),
            origin: origin.map(Path::to_path_buf),
        })
    }

    /// Type checks, closes and normalizes an expression.
    fn prepare(
        &self,
        pos: Pos,
        e: &Expr,
        origin: Option<&Path>,
    ) -> Result<(NormalForm, Ty), SessionError> {
        let ty = self.check(pos, e, origin)?;
        Ok((normalize_unchecked(&self.close(e)), ty))
    }

    /// Evaluates a closed-over expression with the session's settings.
    pub fn evaluate(&self, e: &Expr) -> Result<(RunReport, Ty), SessionError> {
        let (nf, ty) = self.prepare(Pos { line: 1, col: 1 }, e, None)?;
        Ok((
            run_normal_form(&nf, &self.precision, self.step_budget, self.trace),
            ty,
        ))
    }

    /// Executes one item. `#use` paths are resolved against the current
    /// directory.
    pub fn execute_item(&mut self, item: &Item) -> Result<Vec<String>, SessionError> {
        self.execute(item, None, 0)
    }

    fn execute(
        &mut self,
        item: &Item,
        origin: Option<&Path>,
        depth: usize,
    ) -> Result<Vec<String>, SessionError> {
        match &item.item {
            TopItem::Def(name, e) => {
                let (nf, ty) = self.prepare(item.pos, e, origin)?;
                let line = format!("defined {name} : {ty}");
                self.defs.push(Definition {
                    name: name.clone(),
                    value: nf.into_expr(),
                    ty,
                });
                Ok(vec![line])
            }
            TopItem::Eval(e) => {
                let (nf, ty) = self.prepare(item.pos, e, origin)?;
                let report = run_normal_form(&nf, &self.precision, self.step_budget, self.trace);
                if matches!(report.outcome, Outcome::Diverged { .. }) {
                    self.diverged += 1;
                }
                let mut lines = vec![format!(
                    "{e} : {ty} = {}",
                    render(&report.outcome, self.format)
                )];
                if self.trace {
                    for w in &report.witnesses {
                        lines.push(format!(
                            "  witness {} in [{}, {}]",
                            w.var,
                            render_rational(&w.lo, self.format),
                            render_rational(&w.hi, self.format)
                        ));
                    }
                }
                Ok(lines)
            }
            TopItem::Directive(d) => self.directive(item.pos, d, origin, depth),
        }
    }

    fn directive(
        &mut self,
        pos: Pos,
        d: &Directive,
        origin: Option<&Path>,
        depth: usize,
    ) -> Result<Vec<String>, SessionError> {
        let fail = |msg: String| SessionError::Directive {
            pos,
            msg,
            origin: origin.map(Path::to_path_buf),
        };
        match d {
            Directive::Precision(q) => {
                self.precision = Precision::new(q.clone()).map_err(|e| fail(e.to_string()))?;
                Ok(vec![format!("precision {q}")])
            }
            Directive::Trace(on) => {
                self.trace = *on;
                Ok(vec![format!("trace {}", if *on { "on" } else { "off" })])
            }
            Directive::Use(path) => {
                if depth >= MAX_USE_DEPTH {
                    return Err(fail(format!("#use nested too deeply at \"{path}\"")));
                }
                let resolved = match origin.and_then(Path::parent) {
                    Some(dir) if Path::new(path).is_relative() => dir.join(path),
                    _ => PathBuf::from(path),
                };
                let source = std::fs::read_to_string(&resolved)
                    .map_err(|e| fail(format!("cannot read \"{}\": {e}", resolved.display())))?;
                self.run_source(&source, Some(&resolved), depth + 1)
            }
        }
    }

    fn run_source(
        &mut self,
        source: &str,
        origin: Option<&Path>,
        depth: usize,
    ) -> Result<Vec<String>, SessionError> {
        let items = parse_program(source)
            .map_err(|e| SessionError::Parse(e, origin.map(Path::to_path_buf)))?;
        let mut out = Vec::new();
        for item in &items {
            out.extend(self.execute(item, origin, depth)?);
        }
        Ok(out)
    }

    /// Parses and executes a whole program. Stops at the first error; output
    /// of the items before it is returned alongside.
    pub fn execute_source(
        &mut self,
        source: &str,
        origin: Option<&Path>,
    ) -> (Vec<String>, Option<SessionError>) {
        let items = match parse_program(source) {
            Ok(items) => items,
            Err(e) => {
                return (
                    Vec::new(),
                    Some(SessionError::Parse(e, origin.map(Path::to_path_buf))),
                )
            }
        };
        let mut out = Vec::new();
        for item in &items {
            match self.execute(item, origin, 0) {
                Ok(lines) => out.extend(lines),
                Err(e) => return (out, Some(e)),
            }
        }
        (out, None)
    }
}

fn terminating_decimal(q: &Rational) -> Option<String> {
    let mut den = q.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut twos = 0usize;
    let mut fives = 0usize;
    while den.is_even() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if den != BigInt::from(1) {
        return None;
    }
    let digits = twos.max(fives);
    let scaled = q.abs() * Rational::from_integer(num_traits::pow(BigInt::from(10), digits));
    let n = scaled.to_integer().to_string();
    let mut s = String::new();
    if q.is_negative() {
        s.push('-');
    }
    if digits == 0 {
        s.push_str(&n);
    } else {
        let padded = format!("{n:0>width$}", width = digits + 1);
        let (int, frac) = padded.split_at(padded.len() - digits);
        let _ = write!(s, "{int}.{frac}");
    }
    Some(s)
}

/// A rational as an exact decimal when one exists, otherwise as `n/d`.
pub fn render_rational(q: &Rational, format: Format) -> String {
    match format {
        Format::Interval => q.to_string(),
        Format::Decimal => terminating_decimal(q).unwrap_or_else(|| q.to_string()),
    }
}

pub fn render(o: &Outcome, format: Format) -> String {
    match o {
        Outcome::RealBall { center, radius } => match format {
            Format::Interval => format!("[{}, {}]", center - radius, center + radius),
            Format::Decimal => format!(
                "{} ± {}",
                render_rational(center, format),
                render_rational(radius, format)
            ),
        },
        Outcome::PropTrue => "True".into(),
        Outcome::PropFalseProven => "False (proven)".into(),
        Outcome::BoolTT => "tt".into(),
        Outcome::BoolFF => "ff".into(),
        Outcome::TupleOf(os) => format!(
            "({})",
            os.iter()
                .map(|o| render(o, format))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        Outcome::FunctionValue => "<fun>".into(),
        Outcome::Diverged { steps } => format!("no result within {steps} steps"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::rat;

    fn session(src: &str) -> Vec<String> {
        let mut s = SessionState::new();
        let (out, err) = s.execute_source(src, None);
        assert!(err.is_none(), "{err:?}");
        out
    }

    #[test]
    fn precision_directive() {
        let mut s = SessionState::new();
        let (_, err) = s.execute_source("#precision 1/1000000;;", None);
        assert!(err.is_none());
        assert_eq!(s.precision.value(), &rat(1, 1_000_000));
        let (_, err) = s.execute_source("#precision 0;;", None);
        assert!(matches!(err, Some(SessionError::Parse(..))));
        assert_eq!(s.precision.value(), &rat(1, 1_000_000));
    }

    #[test]
    fn definition_then_evaluation() {
        let out = session("#precision 1/100;; let two = 1 + 1;; two;;");
        assert_eq!(out.last().unwrap(), "two : real = 2 ± 0");
        assert_eq!(out[1], "defined two : real");
    }

    #[test]
    fn type_error_leaves_session_unchanged() {
        let mut s = SessionState::new();
        let (_, err) = s.execute_source("let bad = 1 + True;;", None);
        let err = err.unwrap();
        assert!(
            err.to_string().starts_with("line 1, column 1: type error"),
            "{err}"
        );
        assert!(s.lookup("bad").is_none());
    }

    #[test]
    fn renderings() {
        let ball = Outcome::RealBall {
            center: rat(3, 2),
            radius: rat(1, 4),
        };
        assert_eq!(render(&ball, Format::Interval), "[5/4, 7/4]");
        assert_eq!(render(&ball, Format::Decimal), "1.5 ± 0.25");
        let third = Outcome::RealBall {
            center: rat(-1, 3),
            radius: rat(1, 200),
        };
        assert_eq!(render(&third, Format::Decimal), "-1/3 ± 0.005");
        assert_eq!(render(&Outcome::BoolTT, Format::Decimal), "tt");
        assert_eq!(
            render(&Outcome::Diverged { steps: 100_000 }, Format::Decimal),
            "no result within 100000 steps"
        );
        assert_eq!(
            render(
                &Outcome::TupleOf(vec![Outcome::PropTrue, Outcome::PropFalseProven]),
                Format::Decimal
            ),
            "(True, False (proven))"
        );
        assert_eq!(terminating_decimal(&rat(-1, 40)).unwrap(), "-0.025");
        assert_eq!(terminating_decimal(&rat(7, 1)).unwrap(), "7");
    }

    #[test]
    fn prelude_booleans() {
        let out = session("is_true (band tt tt);; bneg tt;; band tt ff;;");
        assert_eq!(
            out[out.len() - 3..],
            [
                "is_true (band tt tt) : prop = True",
                "bneg tt : bool = ff",
                "band tt ff : bool = ff"
            ]
        );
    }
}
