//! CPS translations into the target calculus.

pub mod coherence;
pub mod ctx;
pub mod simulate;
pub mod sn;
pub mod translate;

pub use ctx::{build_eval_ctx, e_depth, e_depth_at, EvalCtx};
pub use simulate::{check_one_step_simulation, simulate_step, simulate_terms, simulate_terms_in, MatchMode, Simulation, DEFAULT_SEARCH_FUEL};
pub use sn::{sn_top, sn_translate, sn_translate_jump, tilde, top_continuation, TildeEnv};
pub use translate::{colon, colon_jump, cps_colon, cps_standard, cps_standard_mod};
