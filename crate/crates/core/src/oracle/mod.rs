//! Brute-force ground truth: exhaustive equilibrium enumeration, WUC and
//! weight-form checks, and a generic penalised projection.

mod dynamic;
mod qp;
mod raw;
mod report;
mod single;

pub use dynamic::{
    analyze_stopping, verify_quitting, verify_quitting_tree, verify_stopping_equilibrium,
    StoppingPayoff, Verification, QUITTING_MAX_PROFILES, STOPPING_MAX_INTERNAL_NODES,
    STOPPING_MAX_PLAYERS,
};
pub use qp::{epsilon_projection, minimize_box_qp, norm_projection};
pub use raw::{RawGame, RawWeightTable, SingleGameView, RAW_MAX_PLAYERS};
pub use report::{EquilibriumReport, MAX_PROFILES};
pub use single::{
    analyze_single, check_weight_form, check_wuc, exercise_set_of, profile_index,
    search_wuc_violation, WucCounterexample, WucViolation, EXERCISE, SINGLE_MAX_PLAYERS,
    WUC_MAX_PLAYERS,
};
