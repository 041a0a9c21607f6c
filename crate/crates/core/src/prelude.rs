//! The standard library and the bundled example programs.

use crate::eval::Outcome;
use crate::interval::{rat, Rational};
use crate::syntax::{parse_program, Item};

pub const PRELUDE_SOURCE: &str = include_str!("../examples/prelude.msl");
pub const CAR_SOURCE: &str = include_str!("../examples/car.msl");
pub const ROOTS_SOURCE: &str = include_str!("../examples/roots.msl");

/// What one evaluated item of an asset must produce.
#[derive(Clone, Copy)]
pub struct Expectation {
    /// Index of the item in the asset's source, counting from zero.
    pub item: usize,
    pub description: &'static str,
    pub check: fn(&Outcome) -> bool,
}

#[derive(Clone)]
pub struct Asset {
    pub name: &'static str,
    /// Path of the source file relative to the crate root.
    pub path: &'static str,
    pub source: &'static str,
    pub expected: Vec<Expectation>,
}

impl Asset {
    pub fn items(&self) -> Vec<Item> {
        parse_program(self.source).expect("bundled assets parse")
    }
}

pub fn load_prelude() -> Vec<Item> {
    parse_program(PRELUDE_SOURCE).expect("the prelude parses")
}

/// Whether a real outcome's ball contains `value`.
pub fn ball_contains(o: &Outcome, value: &Rational) -> bool {
    match o {
        Outcome::RealBall { center, radius } => {
            let d = center - value;
            let d = if d < Rational::from_integer(0.into()) {
                -d
            } else {
                d
            };
            &d <= radius
        }
        _ => false,
    }
}

pub fn car_controller_asset() -> Asset {
    Asset {
        name: "car",
        path: "examples/car.msl",
        source: CAR_SOURCE,
        expected: vec![
            Expectation {
                item: 8,
                description: "accel (-5) 10 goes with acceleration 0",
                check: |o| ball_contains(o, &rat(0, 1)),
            },
            Expectation {
                item: 9,
                description: "accel (-100) 5 stops with acceleration -25/198",
                check: |o| ball_contains(o, &rat(-25, 198)),
            },
        ],
    }
}

pub fn roots_asset() -> Asset {
    Asset {
        name: "roots",
        path: "examples/roots.msl",
        source: ROOTS_SOURCE,
        expected: vec![
            Expectation {
                item: 4,
                description: "x - 1/2 has a near-root",
                check: |o| *o == Outcome::BoolTT,
            },
            Expectation {
                item: 5,
                description: "x + 1 has none",
                check: |o| *o == Outcome::BoolFF,
            },
            Expectation {
                item: 6,
                description: "x * x has a near-root",
                check: |o| *o == Outcome::BoolTT,
            },
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::TopItem;

    #[test]
    fn prelude_defines_the_boolean_operations() {
        let names: Vec<String> = load_prelude()
            .into_iter()
            .filter_map(|i| match i.item {
                TopItem::Def(n, _) => Some(n),
                _ => None,
            })
            .collect();
        for n in ["tt", "ff", "bneg", "band", "bor", "max", "forall_bool"] {
            assert!(names.iter().any(|m| m == n), "{n}");
        }
    }

    #[test]
    fn expectations_point_at_evaluations() {
        for asset in [car_controller_asset(), roots_asset()] {
            let items = asset.items();
            for e in &asset.expected {
                assert!(
                    matches!(items[e.item].item, TopItem::Eval(_)),
                    "{}: item {}",
                    asset.name,
                    e.item
                );
            }
        }
    }
}
