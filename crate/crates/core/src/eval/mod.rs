//! Evaluation by repeated refinement.

mod approx;
mod refine;
mod run;

pub use approx::{holds_at, prop_approx, real_approx, ApproxEnv, Mode, NoInfo};
pub use refine::{cut_width, is_prop_node, refine_step, Refined, Refiner, Witness};
pub use run::{
    evaluate_step, run, run_normal_form, NonPositivePrecision, Outcome, Precision, RunError,
    RunReport, DEFAULT_MAX_STEPS,
};
