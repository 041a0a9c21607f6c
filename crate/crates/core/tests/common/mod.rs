//! Independent oracles and generators shared by the integration tests.

#![allow(dead_code)]

use cutreal::interval::{rat, Rational};
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Bisection for the square root of 2 until the bracket is narrower than `tol`.
pub fn sqrt2_bisection(tol: &Rational) -> (Rational, Rational) {
    let two = rat(2, 1);
    let (mut lo, mut hi) = (rat(1, 1), rat(2, 1));
    while &(&hi - &lo) >= tol {
        let mid = (&lo + &hi) / rat(2, 1);
        if &mid * &mid < two {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

pub fn small_rational(rng: &mut ChaCha8Rng, num: i64, den: i64) -> Rational {
    rat(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

// Yellow-light kinematics with w = 10, eps = 1, T = 4, a_max = 2, a_min = -3.

pub struct Car;

impl Car {
    pub fn w() -> Rational {
        rat(10, 1)
    }
    pub fn eps() -> Rational {
        rat(1, 1)
    }
    pub fn t() -> Rational {
        rat(4, 1)
    }
    pub fn a_max() -> Rational {
        rat(2, 1)
    }
    pub fn a_min() -> Rational {
        rat(-3, 1)
    }

    pub fn a_go(x: &Rational, v: &Rational) -> Rational {
        let t = Self::t();
        let raw = rat(2, 1) * (Self::w() + Self::eps() - x - v * &t) / (&t * &t);
        if raw > Rational::zero() {
            raw
        } else {
            Rational::zero()
        }
    }

    pub fn a_stop(x: &Rational, v: &Rational) -> Rational {
        v * v / (rat(2, 1) * (x + Self::eps()))
    }

    /// Position when the light turns red; a decelerating car stays where it
    /// stops.
    pub fn position(x: &Rational, v: &Rational, a: &Rational) -> Rational {
        let t = Self::t();
        if a.is_negative() && (v + a * &t).is_negative() {
            x - v * v / (rat(2, 1) * a)
        } else {
            x + v * &t + a * &t * &t / rat(2, 1)
        }
    }

    pub fn safe_with_margin(x: &Rational, v: &Rational, a: &Rational, margin: &Rational) -> bool {
        let pos = Self::position(x, v, a);
        pos < -margin.clone() || pos > Self::w() + margin
    }
}

/// Polynomial of total degree at most two in up to two variables, stored as
/// coefficients of 1, x, y, x^2, x*y, y^2.
#[derive(Clone, Debug)]
pub struct Poly {
    pub c: [i64; 6],
}

impl Poly {
    pub fn random(rng: &mut ChaCha8Rng, vars: usize) -> Poly {
        let mut c = [0i64; 6];
        for (i, slot) in c.iter_mut().enumerate() {
            let uses_y = matches!(i, 2 | 4 | 5);
            if uses_y && vars < 2 {
                continue;
            }
            if i == 0 || rng.gen_bool(0.6) {
                *slot = rng.gen_range(-2..=2);
            }
        }
        if c[1..].iter().all(|&k| k == 0) {
            c[1] = if rng.gen_bool(0.5) { 1 } else { -1 };
        }
        Poly { c }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let c = self.c.map(|k| k as f64);
        c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y
    }

    /// Bounds on |dP/dx| and |dP/dy| over the box |x|, |y| <= r.
    pub fn lipschitz(&self, r: f64) -> (f64, f64) {
        let c = self.c.map(|k| (k as f64).abs());
        (
            c[1] + 2.0 * c[3] * r + c[4] * r,
            c[2] + c[4] * r + 2.0 * c[5] * r,
        )
    }

    pub fn source(&self, x: &str, y: &str) -> String {
        let monos = [
            "1".to_string(),
            x.to_string(),
            y.to_string(),
            format!("{x} ^ 2"),
            format!("{x} * {y}"),
            format!("{y} ^ 2"),
        ];
        let mut parts = Vec::new();
        for (k, m) in self.c.iter().zip(monos.iter()) {
            if *k == 0 {
                continue;
            }
            let term = if m == "1" {
                format!("{}", k.abs())
            } else if k.abs() == 1 {
                m.clone()
            } else {
                format!("{} * {m}", k.abs())
            };
            if parts.is_empty() {
                parts.push(if *k < 0 { format!("0 - {term}") } else { term });
            } else {
                parts.push(format!("{} {term}", if *k < 0 { "-" } else { "+" }));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" ")
        }
    }
}

/// Comparison `p < c` or `c < p` with `c` a multiple of 1/4.
#[derive(Clone, Debug)]
pub struct Atom {
    pub poly: Poly,
    pub bound: i64,
    pub poly_below: bool,
}

impl Atom {
    fn c(&self) -> f64 {
        self.bound as f64 / 4.0
    }

    /// Positive exactly where the comparison holds.
    pub fn value(&self, x: f64, y: f64) -> f64 {
        let p = self.poly.eval(x, y);
        if self.poly_below {
            self.c() - p
        } else {
            p - self.c()
        }
    }

    pub fn source(&self, x: &str, y: &str) -> String {
        let c = if self.bound < 0 {
            format!("(-{}/4)", -self.bound)
        } else {
            format!("{}/4", self.bound)
        };
        if self.poly_below {
            format!("{} < {c}", self.poly.source(x, y))
        } else {
            format!("{c} < {}", self.poly.source(x, y))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Q {
    Forall,
    Exists,
}

/// A prop `Q1 x : [a, b], [Q2 y : [c, d],] body` whose body is one comparison
/// or a conjunction or disjunction of two.
#[derive(Clone, Debug)]
pub struct QProp {
    pub quants: Vec<(Q, i64, i64)>,
    pub atoms: Vec<Atom>,
    pub conj: bool,
}

const GRID: f64 = 128.0;

impl QProp {
    pub fn random(rng: &mut ChaCha8Rng) -> QProp {
        let nq = rng.gen_range(1..=2);
        let quants = (0..nq)
            .map(|_| {
                let q = if rng.gen_bool(0.5) {
                    Q::Forall
                } else {
                    Q::Exists
                };
                let lo = rng.gen_range(-4..=0);
                let hi = lo + rng.gen_range(2..=6);
                (q, lo, hi)
            })
            .collect();
        let natoms = rng.gen_range(1..=2);
        let atoms = (0..natoms)
            .map(|_| Atom {
                poly: Poly::random(rng, nq),
                bound: rng.gen_range(-8..=8),
                poly_below: rng.gen_bool(0.5),
            })
            .collect();
        QProp {
            quants,
            atoms,
            conj: rng.gen_bool(0.5),
        }
    }

    fn body(&self, x: f64, y: f64) -> f64 {
        let vals = self.atoms.iter().map(|a| a.value(x, y));
        if self.conj {
            vals.fold(f64::INFINITY, f64::min)
        } else {
            vals.fold(f64::NEG_INFINITY, f64::max)
        }
    }

    fn grid(lo: i64, hi: i64) -> impl Iterator<Item = f64> {
        let (a, b) = (lo as f64 / 2.0, hi as f64 / 2.0);
        let n = ((b - a) * GRID).round() as i64;
        (0..=n).map(move |k| a + k as f64 / GRID)
    }

    fn reduce(q: Q, vals: impl Iterator<Item = f64>) -> f64 {
        match q {
            Q::Forall => vals.fold(f64::INFINITY, f64::min),
            Q::Exists => vals.fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Robust truth value on the grid: positive means true, negative false.
    pub fn grid_value(&self) -> f64 {
        let (q1, a, b) = self.quants[0];
        match self.quants.get(1) {
            None => Self::reduce(q1, Self::grid(a, b).map(|x| self.body(x, 0.0))),
            Some(&(q2, c, d)) => Self::reduce(
                q1,
                Self::grid(a, b)
                    .map(|x| Self::reduce(q2, Self::grid(c, d).map(|y| self.body(x, y)))),
            ),
        }
    }

    /// Worst-case gap between the grid value and the exact one.
    pub fn grid_error(&self) -> f64 {
        let r = self
            .quants
            .iter()
            .map(|&(_, lo, hi)| (lo.abs().max(hi.abs())) as f64 / 2.0)
            .fold(0.0, f64::max);
        let (mut lx, mut ly) = (0.0f64, 0.0f64);
        for a in &self.atoms {
            let (px, py) = a.poly.lipschitz(r);
            lx = lx.max(px);
            ly = ly.max(py);
        }
        let h = 1.0 / GRID;
        let ly = if self.quants.len() > 1 { ly } else { 0.0 };
        (lx + ly) * h / 2.0
    }

    /// `Some(true)` or `Some(false)` when the grid certifies the prop with
    /// at least `margin` to spare, `None` otherwise.
    pub fn certify(&self, margin: f64) -> Option<bool> {
        let v = self.grid_value();
        let slack = self.grid_error() + margin;
        if v > slack {
            Some(true)
        } else if v < -slack {
            Some(false)
        } else {
            None
        }
    }

    pub fn source(&self) -> String {
        let names = ["x", "y"];
        let mut s = String::new();
        for (i, &(q, lo, hi)) in self.quants.iter().enumerate() {
            let kw = match q {
                Q::Forall => "forall",
                Q::Exists => "exists",
            };
            s.push_str(&format!(
                "{kw} {} : [{}, {}], ",
                names[i],
                half(lo),
                half(hi)
            ));
        }
        let op = if self.conj { " /\\ " } else { " \\/ " };
        let body: Vec<String> = self.atoms.iter().map(|a| a.source("x", "y")).collect();
        s.push_str(&body.join(op));
        s
    }
}

fn half(k: i64) -> String {
    if k % 2 == 0 {
        format!("{}", k / 2)
    } else {
        format!("{}/2", k)
    }
}

/// Real expressions with exactly one cut, which encloses the positive square
/// root or the cube root of a random rational. Divisions only by nonzero
/// literals.
#[derive(Clone, Debug)]
pub enum RExpr {
    Lit(Rational),
    Root { k: Rational, cube: bool },
    Add(Box<RExpr>, Box<RExpr>),
    Sub(Box<RExpr>, Box<RExpr>),
    Mul(Box<RExpr>, Box<RExpr>),
    DivLit(Box<RExpr>, Rational),
    Square(Box<RExpr>),
}

fn lit_source(q: &Rational) -> String {
    if q.is_negative() {
        format!("(-{})", -q)
    } else {
        q.to_string()
    }
}

impl RExpr {
    pub fn random(rng: &mut ChaCha8Rng, depth: u32, with_cut: bool) -> RExpr {
        if depth == 0 || (!with_cut && rng.gen_bool(0.4)) {
            return if with_cut {
                let cube = rng.gen_bool(0.5);
                let k = if cube {
                    small_rational(rng, 30, 4)
                } else {
                    rat(rng.gen_range(1..=40), rng.gen_range(1..=5))
                };
                RExpr::Root { k, cube }
            } else {
                RExpr::Lit(small_rational(rng, 9, 4))
            };
        }
        let left_cut = rng.gen_bool(0.5);
        let sub = |rng: &mut ChaCha8Rng, cut: bool| Box::new(RExpr::random(rng, depth - 1, cut));
        match rng.gen_range(0..5) {
            0 => RExpr::Add(
                sub(rng, with_cut && left_cut),
                sub(rng, with_cut && !left_cut),
            ),
            1 => RExpr::Sub(
                sub(rng, with_cut && left_cut),
                sub(rng, with_cut && !left_cut),
            ),
            2 => RExpr::Mul(
                sub(rng, with_cut && left_cut),
                sub(rng, with_cut && !left_cut),
            ),
            3 => {
                let mut d = small_rational(rng, 5, 3);
                if d.is_zero() {
                    d = rat(3, 2);
                }
                RExpr::DivLit(sub(rng, with_cut), d)
            }
            _ => RExpr::Square(sub(rng, with_cut)),
        }
    }

    pub fn source(&self) -> String {
        match self {
            RExpr::Lit(q) => lit_source(q),
            RExpr::Root { k, cube: false } => {
                // The root lies in [0, max(1, k)].
                let hi = if *k > rat(1, 1) { k.clone() } else { rat(1, 1) };
                let k = lit_source(k);
                format!(
                    "(cut z : [0, {hi}] left z < 0 \\/ z * z < {k} right 0 < z /\\ {k} < z * z)"
                )
            }
            RExpr::Root { k, cube: true } => {
                let b = abs(k) + rat(1, 1);
                let k = lit_source(k);
                format!("(cut z : [-{b}, {b}] left z * z * z < {k} right {k} < z * z * z)")
            }
            RExpr::Add(a, b) => format!("({} + {})", a.source(), b.source()),
            RExpr::Sub(a, b) => format!("({} - {})", a.source(), b.source()),
            RExpr::Mul(a, b) => format!("({} * {})", a.source(), b.source()),
            RExpr::DivLit(a, d) => format!("({} / {})", a.source(), lit_source(d)),
            RExpr::Square(a) => format!("({} ^ 2)", a.source()),
        }
    }

    /// Float value for sanity checks.
    pub fn approx(&self) -> f64 {
        use num_traits::ToPrimitive;
        match self {
            RExpr::Lit(q) => q.to_f64().unwrap(),
            RExpr::Root { k, cube } => {
                let k = k.to_f64().unwrap();
                if *cube {
                    k.cbrt()
                } else {
                    k.sqrt()
                }
            }
            RExpr::Add(a, b) => a.approx() + b.approx(),
            RExpr::Sub(a, b) => a.approx() - b.approx(),
            RExpr::Mul(a, b) => a.approx() * b.approx(),
            RExpr::DivLit(a, d) => a.approx() / d.to_f64().unwrap(),
            RExpr::Square(a) => a.approx().powi(2),
        }
    }
}
