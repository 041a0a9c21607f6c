//! Exact real arithmetic by cuts, with restriction and nondeterministic join.
//!
//! Programs are parsed by [`syntax`], checked by [`typing`], brought to a
//! join-free list of alternatives by [`normalize`] and evaluated by repeated
//! interval refinement in [`eval`].

pub mod cli;
pub mod eval;
pub mod interval;
pub mod normalize;
pub mod prelude;
pub mod syntax;
pub mod typing;
